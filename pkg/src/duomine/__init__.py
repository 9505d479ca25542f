"""Two independent block-withholding attackers on a proof-of-work chain.

Library layout: `params` (scenario types), `closedform` (cap-2/cap-4 revenue
polynomials), `engine` (the protocol rule engine shared by everything),
`chain` (rule-generated Markov chains and stationary revenue rates),
`simulate` (block-level Monte Carlo), `thresholds` (profitability searches),
`epochs` (difficulty-adjustment transients), `figures` (reference datasets),
`service` (FastAPI wrapper) and `cli` (thin client).
"""

__version__ = "0.1.0"

from .params import (  # noqa: F401
    HashrateProfile,
    MinerId,
    ProtocolParams,
    Scenario,
    TieBreakParams,
    symmetric_scenario,
    validate_scenario,
)
