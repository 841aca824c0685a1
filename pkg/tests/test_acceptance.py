"""End-to-end acceptance checks, one test per criterion, all exact.

Each test prints its verdict; the terminal summary repeats one PASS/FAIL
line per criterion.
"""

import time

from k3lambda import elliptic, gkz, indicial, lambda_, moduli, theta


def verdict(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, detail


def test_criterion_01_elliptic_baseline():
    t0 = time.perf_counter()
    rep = elliptic.ell_lambda_identity(20)
    secs = time.perf_counter() - t0
    checks = rep["checks"]
    ok = (checks["lambda"]["pass"] and checks["omega0_squared"]["pass"] and rep["pass"]
          and rep["cutoff"] == 20 and secs < 5)
    verdict(1, ok, f"through q^20 in {secs:.2f}s")


def test_criterion_02_frobenius_annihilation():
    t0 = time.perf_counter()
    reps = {tag: gkz.verify_annihilation(tag, N=6) for tag in ("o1", "o1plus", "o2", "o2plus", "o3plus")}
    secs = time.perf_counter() - t0
    ok = all(r["pass"] and r["checked"] == 54 for r in reps.values()) and secs < 120
    verdict(2, ok, f"9 operators x 6 solutions on 5 charts, degree 6, {secs:.1f}s")


def test_criterion_03_quadratic_period_relation():
    t0 = time.perf_counter()
    reps = [gkz.verify_quadratic_relation(tag, 2, 4) for tag in ("o1", "o1plus")]
    secs = time.perf_counter() - t0
    verdict(3, all(r["pass"] for r in reps) and secs < 60, f"degree 4, d = 2, {secs:.1f}s")


def test_criterion_04_indicial_ring_and_gram():
    t0 = time.perf_counter()
    reps = {tag: indicial.indicial_report(tag) for tag in ("o1", "o1plus")}
    secs = time.perf_counter() - t0
    ok = all(r["dims"] == [1, 4, 1, 0] and r["M_expected"] and r["gram"] for r in reps.values()) and secs < 1
    verdict(4, ok, f"{secs:.2f}s")


def test_criterion_05_omega0_square_display():
    m = lambda_.build_mirror_map("o1", 3, 3)
    rep = lambda_.omega0_square_check(m)
    verdict(5, rep["pass"], f"{rep['terms_weight_le_2']} terms of weight <= 2")


def test_criterion_06_master_equation_and_search():
    # time from a cold cache so the mirror maps are included
    lambda_._mirror_core.cache_clear()
    lambda_._sides_data.cache_clear()
    t0 = time.perf_counter()
    ver = [lambda_.verify_master_equation("o1", lambda_.TAU, 3, 3),
           lambda_.verify_master_equation("o1plus", lambda_.RHO, 3, 3)]
    s1 = lambda_.permutation_search("o1", 2, 2)
    s2 = lambda_.permutation_search("o1plus", 2, 2)
    secs = time.perf_counter() - t0
    ok = (all(r.passed and len(r.verdicts) == 10 for r in ver)
          and s1["found"] == [list(lambda_.TAU)] and s2["found"] == [list(lambda_.RHO)] and secs < 600)
    verdict(6, ok, f"tau, rho unique in S6, {secs:.0f}s")


def test_criterion_07_theta_identities():
    reps = [lambda_.lambda_theta_identities(side, 3, 3) for side in ("o1", "o1plus")]
    failed = [(r["side"], k) for r in reps for k, c in r["checks"].items() if not c["pass"]]
    ok = not failed and all(len(r["checks"]) == 7 for r in reps)
    verdict(7, ok, f"14 cleared identities at weight <= 3 {failed or ''}")


def test_criterion_08_theta_structure():
    rep = theta.theta_report(2, 2)
    ok = rep["rank"] == 5 and rep["leading_tilde"] and rep["integral"]
    verdict(8, ok, f"rank {rep['rank']}")


def test_criterion_09_s6_and_twists():
    cf = moduli.closed_form_check(20, 0)
    alpha = moduli.o2_alpha_check()
    ell = elliptic.ell_s3_tables(12, 20, 0)
    tables_ok = all(all(v.values()) for v in ell["tables"].values())
    ok = (cf["pass"] and all(v["points"] == 20 for v in cf["sigmas"].values())
          and alpha["pass"] and tables_ok and ell["pass"])
    verdict(9, ok)


def test_criterion_10_negative_support_phenomenon():
    rep = gkz.yoshida_laurent_witness(3)
    ok = (rep["yoshida_witness"] is not None and min(rep["yoshida_witness"]["n"]) < 0
          and not rep["o1_negative_first"] and not rep["o1_negative_second"] and rep["pass"])
    verdict(10, ok, f"witness at n = {rep['yoshida_witness']['n']}")
