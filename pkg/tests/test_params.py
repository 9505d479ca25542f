import pytest

from duomine.errors import HonestMinority, InvalidPartition, UndefinedBeta
from duomine.params import (
    HashrateProfile,
    ProtocolParams,
    TieBreakParams,
    validate_scenario,
)


def test_alpha_h_derived_when_omitted():
    sc = validate_scenario(HashrateProfile(0.25, 0.25))
    assert sc.alpha_h == pytest.approx(0.5)


def test_partition_must_sum_to_one():
    with pytest.raises(InvalidPartition):
        validate_scenario(HashrateProfile(0.3, 0.3, 0.3))


def test_shares_must_be_in_unit_interval():
    with pytest.raises(InvalidPartition):
        validate_scenario(HashrateProfile(-0.1, 0.6, 0.5))


def test_honest_minority_rejected_by_default():
    with pytest.raises(HonestMinority):
        validate_scenario(HashrateProfile(0.45, 0.35, 0.2))


def test_honest_minority_allowed_when_waived():
    sc = validate_scenario(
        HashrateProfile(0.45, 0.35, 0.2),
        protocol=ProtocolParams(honest_majority_required=False),
    )
    assert sc.alpha_h == pytest.approx(0.2)


def test_tiebreak_defaults():
    tb = TieBreakParams()
    assert tb.gamma1 == tb.gamma2 == 0.5
    assert tb.theta1 == tb.theta2 == pytest.approx(1.0 / 3.0)
    assert tb.beta1 == tb.beta2 == 0.5


def test_theta_sum_bounded():
    with pytest.raises(InvalidPartition):
        validate_scenario(HashrateProfile(0.2, 0.2), TieBreakParams(theta1=0.7, theta2=0.7))


def test_beta_undefined_when_gammas_zero():
    tb = TieBreakParams(gamma1=0.0, gamma2=0.0)
    with pytest.raises(UndefinedBeta):
        tb.beta1


def test_beta_weights():
    tb = TieBreakParams(gamma1=0.2, gamma2=0.6)
    assert tb.beta1 == pytest.approx(0.25)
    assert tb.beta2 == pytest.approx(0.75)


def test_n_cap_must_be_at_least_two():
    with pytest.raises(InvalidPartition):
        validate_scenario(HashrateProfile(0.2, 0.2), protocol=ProtocolParams(n_cap=1))


def test_revalidation_is_idempotent():
    sc = validate_scenario(HashrateProfile(0.25, 0.2), TieBreakParams(0.3, 0.9, 0.1, 0.5))
    again = validate_scenario(sc.profile, sc.tiebreak, sc.protocol)
    assert again == sc
