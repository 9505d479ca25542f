"""Exception types shared across the package."""


class DuomineError(Exception):
    """Base class for all library errors."""


class InvalidPartition(DuomineError):
    """Hashrates are outside [0, 1] or do not sum to one."""


class HonestMinority(DuomineError):
    """Honest hashrate does not strictly exceed each attacker's share."""


class UndefinedBeta(DuomineError):
    """gamma1 + gamma2 == 0, so the attacker-vs-attacker tie weights 0/0."""


class ZeroTotal(DuomineError):
    """All reward rates are zero; relative revenue is undefined."""


class InconsistentState(DuomineError):
    """The simulated world violates a structural invariant (engine bug)."""


class StateExplosion(DuomineError):
    """Chain enumeration exceeded the configured state budget."""


class SingularSystem(DuomineError):
    """The stationary linear system could not be solved to tolerance."""


class NoSignChange(DuomineError):
    """Profitability never changes sign on the search interval."""


class NonMonotone(DuomineError):
    """Profitability changes sign more than once on the search interval."""


class DivergentSchedule(DuomineError):
    """A hashrate growth schedule produced a non-finite epoch quantity."""


class NeverProfitable(DuomineError):
    """Steady-state revenue never exceeds the honest baseline."""
