"""Exact rational cross-checks between the rule-built chain and the closed forms."""
from duomine import diagnostics


def test_cap_two_identity():
    rep = diagnostics.verify_closed_form(2, points=4, seed=5)
    assert rep.identical
    assert rep.max_abs_error == 0
    assert rep.points == 4


def test_cap_four_identity():
    rep = diagnostics.verify_closed_form(4, points=2, seed=6)
    assert rep.identical
    assert rep.max_abs_error == 0


def test_verify_all():
    reports = diagnostics.verify_all(points=2, seed=9)
    assert [r.n_cap for r in reports] == [2, 4]
    assert all(r.identical for r in reports)
