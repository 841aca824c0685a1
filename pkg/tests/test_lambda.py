"""Mirror maps, master equation and the permutation search at small cutoffs."""

from fractions import Fraction

import pytest

from k3lambda import lambda_
from k3lambda.indicial import GRAM_WITNESS
from k3lambda.series import MultiSeries, compose_poly, solve_fixed_point


@pytest.mark.parametrize("side", ["o1", "o1plus"])
def test_lagrange_inversion_matches_fixed_point(side):
    N, W = 2, 1
    pol, _, consts, inv = lambda_._mirror_core(side, N, W)
    polys = [{tuple(int(x) for x in e): c.rational() for e, c in S.terms()} for S in inv.S]

    def S(zs):
        return [compose_poly(p, zs) if p else MultiSeries.zero(pol) for p in polys]

    lin = [(consts[k], tuple(int(i == k) for i in range(4))) for k in range(4)]
    assert solve_fixed_point(lin, S, pol) == lambda_.build_mirror_map(side, N, W).z_Q


def test_constants():
    assert lambda_.build_mirror_map("o1", 2, 2).consts == (4, 4, 4, 1)
    assert lambda_.build_mirror_map("o1plus", 2, 2).consts == (4, 4, 1, 1)


def test_box_policy():
    pol = lambda_.q_box_policy(GRAM_WITNESS["o1"], 3, 3)
    assert pol.weights == (1, 1, 0, 0)
    assert pol.windows[2:] == (9, 6)
    pol = lambda_.q_box_policy(GRAM_WITNESS["o1plus"], 3, 3)
    assert pol.weights == (0, 0, 1, 1)
    assert pol.windows[:2] == (6, 6)


def test_q_and_Q_maps_are_inverse():
    P = GRAM_WITNESS["o1"]
    back = lambda_.Q_of_q(P, lambda_.O1_SIGNS)
    assert back == lambda_.QBYQ_O1
    assert lambda_.branch_shift_check()["pass"]
    with pytest.raises(ValueError):
        lambda_._int_inverse([[2, 0], [0, 1]])


@pytest.mark.parametrize("side", ["o1", "o1plus"])
def test_round_trip_and_leading_terms(side):
    m = lambda_.build_mirror_map(side, 2, 2)
    assert lambda_.round_trip_check(m)
    assert all(lambda_.leading_checks(m).values())


def test_o1_mirror_in_q():
    m = lambda_.build_mirror_map("o1", 2, 2)
    z1, _, z3, _ = m.z_q()
    assert z1.coefficient((1, 0, -1, 0)) == 4
    assert z3.coefficient((0, 0, 0, 1)) == -4


def test_omega0_square_display():
    rep = lambda_.omega0_square_check(lambda_.build_mirror_map("o1", 2, 2))
    assert rep["pass"], rep
    assert rep["terms_weight_le_2"] == len(lambda_.omega0_square_display()) == 14


def test_theta_index_signs():
    # tau sends [123][456] to [326][154]: sorting costs one swap per block
    assert lambda_.theta_index(lambda_.TAU, 0) == (8, 1)
    assert lambda_.theta_index((1, 2, 3, 4, 5, 6), 4) == (6, 1)
    assert lambda_.theta_index((2, 1, 3, 4, 5, 6), 0) == (1, -1)


@pytest.mark.parametrize("side, sigma", [("o1", lambda_.TAU), ("o1plus", lambda_.RHO)])
def test_master_equation_low_weight(side, sigma):
    rep = lambda_.verify_master_equation(side, sigma, 2, 2)
    assert rep.passed, rep.first_mismatch
    assert len(rep.verdicts) == 10


def test_master_equation_fails_for_identity():
    rep = lambda_.verify_master_equation("o1", (1, 2, 3, 4, 5, 6), 2, 2)
    assert not rep.passed
    assert rep.to_json()["first_mismatch"] is not None


def test_search_o1():
    res = lambda_.permutation_search("o1", 2, 2)
    assert res["found"] == [list(lambda_.TAU)]


def test_search_o1plus():
    res = lambda_.permutation_search("o1plus", 2, 2)
    assert res["found"] == [list(lambda_.RHO)]


def test_search_sees_q3_q4_swap_as_symmetry():
    # every squared theta is symmetric in q3, q4, so the swap leaves the answer alone
    res = lambda_.permutation_search("o1", 2, 2, swap34=True)
    assert res["found"] == [list(lambda_.TAU)]


def test_search_without_branch_shift_finds_nothing():
    res = lambda_.permutation_search("o1", 2, 2, signs=(1, 1, 1, 1))
    assert res["found"] == []
    assert res["best_score"] < 10


def test_o1plus_sign_search_unique():
    assert lambda_.o1plus_sign_search(2)["hits"] == [[1, 1, 1, -1]]
    assert lambda_.o1plus_signs() == (1, 1, 1, -1)


@pytest.mark.parametrize("side", ["o1", "o1plus"])
def test_theta_identities_low_weight(side):
    rep = lambda_.lambda_theta_identities(side, 2, 2)
    assert rep["pass"], rep["checks"]
    assert len(rep["checks"]) == 7


def test_t_quadratic():
    assert lambda_.t_quadratic_check(3)["pass"]


def test_mirror_report_o1():
    rep = lambda_.mirror_report("o1", 2, 2)
    assert rep["pass"]
    assert rep["consts"] == ["4", "4", "4", "1"]
    assert Fraction(rep["consts"][3]) == 1
