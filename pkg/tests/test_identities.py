import json
import os
import random

import mpmath as mp
import pytest

from qbessel import (DomainError, IdentityId, TruncationPolicy, check_identity,
                     kernel_delta, kernel_symmetry_residual, kernel_table,
                     parse_identity, product_expand, run_limit_check)

import oracle_mp

Q = 0.5
HERE = os.path.dirname(__file__)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ------------------------------------------------------------- dispatcher

def test_parse_identity_aliases():
    assert parse_identity("Corollary43") is IdentityId.COROLLARY43
    assert parse_identity("prop31") is IdentityId.LIMIT_JACOBI_BESSEL
    with pytest.raises(DomainError):
        parse_identity("prop99")


def test_report_shape_and_scaling():
    r = check_identity("transform27", {"a": 0.1, "w": 0.4, "z": 0.3, "q": 0.5})
    d = r.to_json_dict()
    assert set(d) == {"identity", "params", "lhs", "rhs", "abs_residual",
                      "rel_residual", "tail_budget", "pass"}
    scale = max(abs(r.lhs), abs(r.rhs), 1.0)
    assert r.rel_residual == pytest.approx(r.abs_residual / scale)
    assert r.passed and r.rel_residual < 1e-10


def test_prop21_trivial_shift_is_exact():
    r = check_identity("prop21", {"n": 0, "a": 0.2, "z": 0.5, "q": 0.5})
    assert r.abs_residual == 0.0


def test_prop21_residual_across_shifts():
    rng = random.Random(1)
    for n in range(-6, 7):
        for _ in range(5):
            a = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.5, 0.5))
            z = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.5, 0.5))
            if n < 0 and abs(z) < 0.05:
                continue
            r = check_identity("prop21", {"n": n, "a": a, "z": z, "q": 0.5},
                               tol=1e-10)
            assert r.passed, (n, a, z, r.rel_residual)


def test_jacobi_orthogonality_off_and_on_diagonal():
    for m in range(4):
        for n in range(4):
            r = check_identity(
                "jacobi_orth",
                {"m": m, "n": n, "alpha": 0.3, "beta": 0.7, "q": 0.5},
                tol=1e-10)
            if m == n:
                assert r.passed and r.rel_residual < 1e-12, (m, n)
            else:
                assert abs(r.lhs) < 1e-12, (m, n)


def test_krawtchouk_orthogonality_exact_sums():
    for N in (3, 5):
        for n in range(N + 1):
            for m in range(N + 1):
                r = check_identity(
                    "krawtchouk_orth",
                    {"n": n, "m": m, "t": 0.5, "N": N, "q": 0.5}, tol=1e-10)
                assert r.passed, (N, n, m, r.rel_residual)


# ------------------------------------------------------------------ limits

def test_limit_jacobi_trivial_argument():
    rep = run_limit_check("prop31", {"alpha": 0.3, "beta": 0.7, "x": 0.0,
                                     "q": 0.5}, [5, 10, 15])
    assert all(r == 0.0 for r in rep.residuals)


def test_limit_jacobi_converges_geometrically():
    rep = run_limit_check("prop31", {"alpha": 0.3, "beta": 0.7, "x": 1.0,
                                     "q": 0.5}, [5, 10, 15, 20, 25])
    assert rep.monotone_tail
    rs = rep.residuals
    assert all(rs[i + 1] < rs[i] for i in range(len(rs) - 1))
    # rate ~ q^n: five steps of 5 shrink by roughly q^20
    assert rs[-1] < rs[0] * 1e-4


def test_limit_krawtchouk_converges():
    rep = run_limit_check("prop32", {"z": 1, "N": 4, "t": 0.5, "x": 2,
                                     "q": 0.5}, [5, 10, 20])
    rs = rep.residuals
    assert rs[2] < rs[1] < rs[0]
    assert rs[-1] < 1e-6


def test_limit_check_validates_indices():
    with pytest.raises(DomainError):
        run_limit_check("prop31", {"alpha": 0.3, "beta": 0.7, "x": 1.0,
                                   "q": 0.5}, [5, 5])


# ------------------------------------------------------------------ kernel

def test_kernel_values_match_independent_oracle():
    for (nu, x, y, z) in [(1.5, 3, 0, 1), (0.5, 4, 0, 4), (3.0, 2, 4, 0),
                          (1.5, 0, 0, 7), (1.5, 3, 2, -5), (0.5, 0, 3, 2)]:
        got = kernel_delta(nu, x, y, z, Q).value
        want = float(oracle_mp.kernel_delta(nu, x, y, z, Q))
        assert rel(got, want) < 1e-13, (nu, x, y, z)


def test_kernel_positive_and_tail_reported():
    kv = kernel_delta(0.5, 2, 1, -3, Q)
    assert kv.value >= 0.0
    assert kv.tail_bound >= 0.0 and kv.n_terms > 0


def test_kernel_first_two_slots_symmetric():
    for (x, y, z) in [(1, 2, 0), (0, 3, 2), (4, 1, -2)]:
        a = kernel_delta(1.5, x, y, z, Q).value
        b = kernel_delta(1.5, y, x, z, Q).value
        assert rel(a, b) < 1e-13


def test_kernel_weighted_full_permutation_symmetry():
    for nu in (0.5, 1.5, 3.0):
        for (x, y, z) in [(1, 2, 0), (3, 0, 1), (0, 2, 4), (2, 2, 1)]:
            _, dev = kernel_symmetry_residual(nu, x, y, z, Q)
            assert dev < 1e-12, (nu, x, y, z, dev)


def test_kernel_rejects_bad_order_and_noninteger():
    with pytest.raises(DomainError):
        kernel_delta(-0.5, 1, 1, 1, Q)
    with pytest.raises(DomainError):
        kernel_delta(1.5, 1.5, 1, 1, Q)


def test_kernel_table_degenerate_grid():
    t = kernel_table(1.5, (2, 2), (1, 1), (0, 0), Q)
    assert len(t.grid) == 1
    assert t.grid[0][4] == 0.0  # no permuted partners inside the grid
    assert t.symmetry_residual_max == 0.0


def test_kernel_table_counts_and_positivity():
    t = kernel_table(1.5, (0, 3), (0, 3), (-4, 8), Q)
    assert len(t.grid) == 4 * 4 * 13
    assert t.min_value >= 0.0
    assert t.symmetry_residual_max < 1e-12
    assert t.n_sum_terms > 0


def test_product_expansion_examples():
    r = product_expand(1.5, 0, 0, Q, -8, 12)
    assert r.rel_residual < 1e-8 and r.passed
    r = product_expand(2.0, 1, 3, Q, -8, 14)
    assert r.rel_residual < 1e-8 and r.passed


def test_product_expansion_widening_stays_within_tail():
    base = product_expand(1.5, 1, 2, Q, -6, 10)
    wide = product_expand(1.5, 1, 2, Q, -10, 16)
    assert abs(base.rhs - wide.rhs) <= base.tail_budget * 1.5 + 1e-15


def test_product_expansion_wide_window_all_orders():
    # with a window deep enough for the slowest decay, every order certifies
    for nu in (0.5, 1.5, 3.0):
        r = product_expand(nu, 2, 0, Q, -10, 30)
        assert r.rel_residual < 1e-10, (nu, r.rel_residual)


def test_refinement_never_flips_reports():
    tight = TruncationPolicy(eps_term=1e-18, eps_tail=1e-13, max_terms=20000)
    for id_, params in [
            ("corollary43", {"nu": 1.5, "t": 0.8, "x": 2, "z": 1, "N": 4, "q": 0.5}),
            ("transform27", {"a": 0.1, "w": 0.4, "z": 0.3, "q": 0.5}),
            ("kernel_symmetry", {"nu": 0.5, "x": 4, "y": 0, "z": 2, "q": 0.5}),
    ]:
        a = check_identity(id_, params)
        b = check_identity(id_, params, policy=tight)
        assert a.passed and b.passed


# ------------------------------------------------- addition-formula family

def test_corollary_against_high_precision_lhs():
    # LHS is simple enough to recompute with the oracle directly
    nu, t, x, z, N = 1.5, 0.8, 2, 1, 4
    r = check_identity("corollary43",
                       {"nu": nu, "t": t, "x": x, "z": z, "N": N, "q": 0.5})
    want = float(
        oracle_mp.bessel_j(nu, mp.mpf(Q) ** (x + 1), Q)
        * oracle_mp.phi([mp.mpf(t) * mp.mpf(Q) ** (N - x + 1)],
                        [mp.mpf(t) * Q], Q, mp.mpf(Q) ** (x - z + 1)))
    assert rel(r.lhs, want) < 1e-13
    assert rel(r.rhs, want) < 1e-12
    assert r.passed


def test_theorem_reduces_to_corollary_at_zero_offset():
    p = {"nu": 0.5, "t": 0.8, "x": 1, "z": 0, "N": 3, "q": 0.5}
    a = check_identity("corollary43", p)
    b = check_identity("theorem41", {**p, "l": 0})
    assert a.lhs == b.lhs and a.rhs == b.rhs


def test_theorem_with_offset_matches_shifted_instance():
    # the offset enters only through coordinate shifts of a zero-offset run
    p1 = check_identity("theorem41", {"nu": 1.5, "t": 0.8, "x": 3, "z": 2,
                                      "N": 5, "l": 2, "q": 0.5})
    p2 = check_identity("corollary43", {"nu": 1.5, "t": 0.8, "x": 1, "z": 0,
                                        "N": 3, "q": 0.5})
    assert rel(p1.lhs, p2.lhs) < 1e-13
    assert rel(p1.rhs, p2.rhs) < 1e-12


def test_addition_large_n_limit_consistency():
    # the dedicated large-N check agrees with the finite-N formula's own
    # large-N behavior at t = q^mu
    # the finite-N instance approaches the limit like q^(N-z)
    nu, mu, x, z = 1.5, 0.5, 2, 1
    r_inf = check_identity("addition_n_infinity",
                           {"nu": nu, "mu": mu, "x": x, "z": z, "q": 0.5})
    r_fin = check_identity("corollary43",
                           {"nu": nu, "t": Q**mu, "x": x, "z": z, "N": 40,
                            "q": 0.5})
    assert rel(r_inf.lhs, r_fin.lhs) < 1e-10
    assert rel(r_inf.rhs, r_fin.rhs) < 1e-10
    assert r_inf.passed


def test_prop51_reports_without_error():
    r = check_identity("prop51", {"m": 0, "z": 1, "k": 1, "t": 0.5, "y": 1.0,
                                  "nu": 1.5, "q": 0.5})
    assert r.tail_budget == 0.0
    assert r.rel_residual <= 1.0 + 1e-12  # reported, not asserted


# -------------------------------------------------------------- regression

def test_regression_baseline_stable():
    with open(os.path.join(HERE, "data", "regression_baseline.json")) as fh:
        baseline = json.load(fh)
    for case in baseline:
        r = check_identity(case["identity"], dict(case["params"]))
        d = r.to_json_dict()
        assert abs(d["rel_residual"] - case["rel_residual"]) <= 1e-12, case
        for side in ("lhs", "rhs"):
            for got, want in zip(d[side], case[side]):
                assert abs(got - want) <= 1e-12 * max(1.0, abs(want)), case


# ------------------------------------------------------------------ bounds

def test_bound_checks_pass_on_sweeps():
    rng = random.Random(5)
    for _ in range(100):
        r = check_identity("bound24", {"alpha": rng.uniform(0.05, 3.0),
                                       "n": rng.randint(0, 30), "q": 0.5})
        assert r.passed
        r = check_identity("bound25", {"m": rng.randint(0, 10),
                                       "n": rng.randint(0, 10), "q": 0.5})
        assert r.passed
    for _ in range(60):
        N = rng.randint(0, 8)
        rr = rng.randint(0, 6)
        r = check_identity("bound_lemma42",
                           {"nu": rng.uniform(0.1, 3.0), "N": N,
                            "z": rng.randint(0, N), "r": rr,
                            "s": rng.randint(0, rr), "q": 0.5})
        assert r.passed
    for _ in range(40):
        N = rng.randint(1, 7)
        r = check_identity("bound_prop32",
                           {"z": rng.randint(0, N), "N": N,
                            "t": rng.uniform(0.1, 1.8),
                            "x_re": rng.uniform(-1.0, 5.0),
                            "x_im": rng.uniform(-2.0, 2.0), "q": 0.5})
        assert r.passed


def test_identity_domain_errors_are_raised():
    with pytest.raises(DomainError):
        check_identity("corollary43", {"nu": -1.0, "t": 0.8, "x": 1, "z": 0,
                                       "N": 3, "q": 0.5})
    with pytest.raises(DomainError):
        check_identity("floris_koelink_addition",
                       {"l": 3, "m": 1, "z": 4, "N": 5, "x": 2, "nu": 1.5,
                        "t": 0.8, "q": 0.5})  # z + l > N
    with pytest.raises(DomainError):
        check_identity("transform27", {"a": 0.1, "w": 0.0, "z": 0.3, "q": 0.5})
