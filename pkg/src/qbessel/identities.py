"""Identity verification harness.

Evaluates both sides of every supported identity, limit transition, and bound
through maximally independent code paths and reports residuals instead of
raising on mismatch. Also computes the product-formula kernel with its
symmetry and positivity diagnostics.

Where the working formulas deviate from their commonly printed forms (sum
starting index, normalization weights, argument shifts), the docstrings below
state the formula actually implemented; each implemented form is pinned by
high-precision oracles in the test suite.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .errors import DomainError
from .hyperq import phi11, phi11_weighted
from .qcore import (DEFAULT_POLICY, CompensatedSum, TruncationPolicy,
                    as_series_base, qpochhammer, qpochhammer_ex,
                    qpoch_inf_qexp, qpoch_qexp, qpoch_qexp_signed)
from .qspecial import (affine_q_krawtchouk, bessel_j_qexp, big_q_bessel,
                       jacobi_orthogonality_rhs, krawtchouk_hat,
                       little_q_bessel_j, little_q_jacobi,
                       little_q_jacobi_std, r_poly, c_addition_general)

DEFAULT_TOL = 1e-8


class IdentityId(str, enum.Enum):
    PROP21 = "prop21"
    TRANSFORM27 = "transform27"
    JACOBI_ORTH = "jacobi_orth"
    KRAWTCHOUK_ORTH = "krawtchouk_orth"
    LIMIT_JACOBI_BESSEL = "prop31"
    LIMIT_KRAWTCHOUK_BIG_BESSEL = "prop32"
    FLORIS_KOELINK_ADDITION = "floris_koelink_addition"
    JACOBI_ADDITION = "jacobi_addition"
    THEOREM41 = "theorem41"
    COROLLARY43 = "corollary43"
    ADDITION_N_INFINITY = "addition_n_infinity"
    PROP51 = "prop51"
    PRODUCT_FORMULA52 = "product_formula52"
    KERNEL_SYMMETRY = "kernel_symmetry"
    KERNEL_POSITIVITY = "kernel_positivity"
    BOUND24 = "bound24"
    BOUND25 = "bound25"
    BOUND_LEMMA42 = "bound_lemma42"
    BOUND_PROP32 = "bound_prop32"


_ALIASES = {
    "limit_jacobi_bessel": IdentityId.LIMIT_JACOBI_BESSEL,
    "limit_krawtchouk_big_bessel": IdentityId.LIMIT_KRAWTCHOUK_BIG_BESSEL,
    "product52": IdentityId.PRODUCT_FORMULA52,
}


def parse_identity(name: str) -> IdentityId:
    key = name.strip().lower()
    try:
        return IdentityId(key)
    except ValueError:
        if key in _ALIASES:
            return _ALIASES[key]
        raise DomainError(f"unknown identity: {name!r}")


@dataclass(frozen=True)
class IdentityReport:
    """Both sides of one identity instance plus residuals and truncation budget."""

    id: IdentityId
    params: dict
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    tail_budget: float
    passed: bool

    def to_json_dict(self) -> dict:
        lhs = complex(self.lhs)
        rhs = complex(self.rhs)

        def safe(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v

        return {
            "identity": self.id.value,
            "params": {k: safe(v) for k, v in self.params.items()},
            "lhs": [lhs.real, lhs.imag],
            "rhs": [rhs.real, rhs.imag],
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tail_budget": self.tail_budget,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class LimitReport:
    """Residual-versus-index table for one limit transition."""

    id: IdentityId
    index_values: tuple
    residuals: tuple
    target: complex
    monotone_tail: bool

    def to_json_dict(self) -> dict:
        target = complex(self.target)
        return {
            "identity": self.id.value,
            "index_values": list(self.index_values),
            "residuals": list(self.residuals),
            "target": [target.real, target.imag],
            "monotone_tail": self.monotone_tail,
        }


@dataclass
class KernelTable:
    """Grid of kernel values with symmetry and positivity diagnostics."""

    nu: float
    q: float
    grid: list = field(default_factory=list)  # (x, y, z, delta, sym_residual)
    symmetry_residual_max: float = 0.0
    min_value: float = 0.0
    n_sum_terms: int = 0

    def to_json_dict(self) -> dict:
        return {
            "nu": self.nu,
            "q": self.q,
            "grid": [{"x": x, "y": y, "z": z, "delta": d, "sym_residual": s}
                     for (x, y, z, d, s) in self.grid],
            "symmetry_residual_max": self.symmetry_residual_max,
            "min_value": self.min_value,
            "n_sum_terms": self.n_sum_terms,
        }


def _report(id_, params, lhs, rhs, tail, tol) -> IdentityReport:
    abs_res = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs), 1.0)
    rel = abs_res / scale
    passed = rel <= tol and tail <= tol / 10.0
    return IdentityReport(id_, params, lhs, rhs, abs_res, rel, tail, passed)


def _bound_report(id_, params, value, bound, tol) -> IdentityReport:
    violation = max(0.0, value - bound)
    scale = max(abs(value), abs(bound), 1.0)
    return IdentityReport(id_, params, value, bound, violation,
                          violation / scale, 0.0, violation / scale <= tol)


# ---------------------------------------------------------------- kernel

class KernelValue(NamedTuple):
    value: float
    n_terms: int
    tail_bound: float


@lru_cache(maxsize=300_000)
def _kernel_delta_cached(nu, x, y, z, q, policy) -> KernelValue:
    pref = (1.0 - q**nu) / qpoch_inf_qexp(1, q, policy)
    # Terms are only nonzero once the regularizing weight in the denominator is
    # nonzero, which also needs 1 + N + y - x - z >= 1; below that the squared
    # numerator vanishes to second order and the term's limit is 0.
    n0 = max(x, z, x + z - y)
    acc = CompensatedSum(0.0)
    n_terms = 0
    stall = 0
    term = 0.0
    big_n = n0
    while n_terms < policy.max_terms:
        a_exp = 1 + big_n + y - x - z
        b_exp = 1 + y - x
        w_exp = 1 + z - x
        # evaluate the squared bracket through whichever argument order keeps
        # the series argument small (the two orders are exchanged by the
        # standard argument<->parameter transformation)
        if w_exp >= b_exp:
            brk = phi11_weighted(q**a_exp, b_exp, q**w_exp, q, policy)
        else:
            brk = phi11_weighted(q ** (1 + big_n - x), w_exp, q**b_exp, q, policy)
        den = (qpoch_qexp(1, q, big_n - z) * qpoch_qexp(big_n, q, x, step=-1)
               * qpoch_inf_qexp(big_n + 1, q, policy)
               * qpoch_inf_qexp(a_exp, q, policy))
        term = (brk.value * brk.value / den
                * q ** (nu * (big_n - x) + (1 + y - x) * (z - x)))
        acc.add(term)
        n_terms += 1
        if n_terms > 1 and term < policy.eps_term * max(acc.value, 1e-300):
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
        big_n += 1
    rho = q**nu * (1.0 + 8.0 * q ** (big_n - max(x, z)))
    tail = term * rho / (1.0 - rho) if rho < 1.0 else float("inf")
    return KernelValue(pref * acc.value, n_terms, pref * tail)


def kernel_delta(nu: float, x: int, y: int, z: int, q,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> KernelValue:
    """Product-formula kernel at one lattice triple.

    Sum over the internal index N >= max(x, z) of squared regularized
    confluent-series brackets against positive weights; every term is
    nonnegative, so the kernel is nonnegative by construction.
    """
    q = as_series_base(q)
    if nu <= 0:
        raise DomainError("kernel order must be positive")
    if not all(isinstance(v, int) for v in (x, y, z)):
        raise DomainError("kernel coordinates must be integers")
    return _kernel_delta_cached(float(nu), x, y, z, q, policy)


def kernel_weighted(nu: float, x: int, y: int, z: int, q,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Symmetric weighted kernel q^((nu+1)(x+y)) * delta(x, y, z).

    This weighting is invariant under all six permutations of (x, y, z); the
    kernel itself is symmetric in its first two slots outright.
    """
    return q ** ((nu + 1) * (x + y)) * kernel_delta(nu, x, y, z, q, policy).value


_PERMS = ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0))


def kernel_symmetry_residual(nu, x, y, z, q,
                             policy: TruncationPolicy = DEFAULT_POLICY):
    """Max relative spread of the weighted kernel over all argument permutations."""
    coords = (x, y, z)
    vals = []
    for p in _PERMS:
        a, b, c = coords[p[0]], coords[p[1]], coords[p[2]]
        vals.append(kernel_weighted(nu, a, b, c, q, policy))
    scale = max(max(abs(v) for v in vals), 1e-300)
    worst = max(abs(v - vals[0]) for v in vals)
    return vals[0], worst / scale


def kernel_table(nu: float, x_range, y_range, z_range, q,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> KernelTable:
    """Fill a grid of kernel values with per-entry symmetry diagnostics.

    Per-entry sym_residual compares the weighted kernel against every argument
    permutation that also falls inside the grid ranges.
    """
    q = as_series_base(q)
    xs = list(range(x_range[0], x_range[1] + 1))
    ys = list(range(y_range[0], y_range[1] + 1))
    zs = list(range(z_range[0], z_range[1] + 1))
    if not xs or not ys or not zs:
        raise DomainError("ranges must be nonempty")
    inside = lambda a, b, c: (x_range[0] <= a <= x_range[1]
                              and y_range[0] <= b <= y_range[1]
                              and z_range[0] <= c <= z_range[1])
    table = KernelTable(nu=float(nu), q=q)
    min_value = math.inf
    max_terms = 0
    sym_max = 0.0
    for x in xs:
        for y in ys:
            for z in zs:
                kv = kernel_delta(nu, x, y, z, q, policy)
                w0 = q ** ((nu + 1) * (x + y)) * kv.value
                dev = 0.0
                scale = max(abs(w0), 1e-300)
                for p in _PERMS[1:]:
                    coords = (x, y, z)
                    a, b, c = coords[p[0]], coords[p[1]], coords[p[2]]
                    if inside(a, b, c):
                        wp = q ** ((nu + 1) * (a + b)) * kernel_delta(
                            nu, a, b, c, q, policy).value
                        scale = max(scale, abs(wp))
                        dev = max(dev, abs(w0 - wp))
                sym = dev / scale
                table.grid.append((x, y, z, kv.value, sym))
                sym_max = max(sym_max, sym)
                min_value = min(min_value, kv.value)
                max_terms = max(max_terms, kv.n_terms)
    table.symmetry_residual_max = sym_max
    table.min_value = min_value
    table.n_sum_terms = max_terms
    return table


def product_expand(nu: float, x: int, y: int, q, z_lo: int, z_hi: int,
                   policy: TruncationPolicy = DEFAULT_POLICY,
                   tol: float = DEFAULT_TOL) -> IdentityReport:
    """Reconstruct j(q^x) j(q^y) from the kernel-weighted lattice sum over z.

    tail_budget adds the per-kernel truncation bounds to a geometric estimate
    of the mass outside [z_lo, z_hi] fitted from the edge terms.
    """
    q = as_series_base(q)
    if z_lo > z_hi:
        raise DomainError("need z_lo <= z_hi")
    if nu <= 0:
        raise DomainError("kernel order must be positive")
    lhs = bessel_j_qexp(nu, x, q, policy) * bessel_j_qexp(nu, y, q, policy)
    acc = CompensatedSum(0.0)
    tail = 0.0
    terms = {}
    for z in range(z_lo, z_hi + 1):
        kv = kernel_delta(nu, x, y, z, q, policy)
        jz = bessel_j_qexp(nu, z, q, policy)
        terms[z] = kv.value * jz
        acc.add(terms[z])
        tail += kv.tail_bound * abs(jz)
    # geometric fit of the mass beyond each edge
    if z_hi - 1 in terms and abs(terms[z_hi - 1]) > 0:
        rho = min(abs(terms[z_hi]) / abs(terms[z_hi - 1]), 0.9)
        tail += abs(terms[z_hi]) * rho / (1.0 - rho)
    if z_lo + 1 in terms and abs(terms[z_lo + 1]) > 0:
        rho = min(abs(terms[z_lo]) / abs(terms[z_lo + 1]), 0.9)
        tail += abs(terms[z_lo]) * rho / (1.0 - rho)
    params = {"nu": nu, "x": x, "y": y, "q": q, "z_lo": z_lo, "z_hi": z_hi}
    return _report(IdentityId.PRODUCT_FORMULA52, params, lhs, acc.value, tail, tol)


# ------------------------------------------------------- addition formulas

def _phi11_kraw(t, c_exp, arg_exp, q, policy):
    """1phi1(t q^c_exp; t q; q, q^arg_exp), stable for any integer arg_exp.

    For arg_exp <= 0 the argument<->parameter transformation turns the series
    into a regularized expansion with uniformly tiny terms.
    """
    if arg_exp >= 0:
        return phi11(t * q**c_exp, t * q, q, q**arg_exp, policy).value
    num = phi11_weighted(q ** (c_exp + arg_exp - 1), arg_exp, t * q, q, policy)
    return num.value / qpochhammer(t * q, q, policy=policy)


def addition_lhs(nu, t, x, z, N, l, q, policy=DEFAULT_POLICY):
    return (bessel_j_qexp(nu, x - l + 1, q, policy)
            * _phi11_kraw(t, N - x + 1, x - z + 1, q, policy))


def addition_rhs(nu, t, x, z, N, l, q, policy=DEFAULT_POLICY):
    """Double sum of the Bessel-family addition formula.

    Layer r gathers s = 0..r; the off-diagonal part (s < r) couples the two
    normalized Bessel factors at lattice point z+s-l+1 to the shifted
    Krawtchouk-limit series at x-z+r-s+1, the remaining part at z+r-l+1 and
    x-z-r+s+1. Outer truncation stalls once a layer drops below eps_term
    relative to the running sum; the reported tail is a geometric fit.
    """
    c_inf_sq = qpoch_inf_qexp(nu + 1, q, policy) ** 2
    acc = CompensatedSum(0.0)
    r = 0
    stall = 0
    layers = []
    while r < policy.max_terms:
        layer = CompensatedSum(0.0)
        for s in range(r + 1):
            theta = (qpoch_inf_qexp(nu + r + s + 1, q, policy) ** 2
                     * (1.0 - q ** (nu + r + s)) / (c_inf_sq * (1.0 - q**nu)))
            bf = (qpoch_qexp(nu, q, r) * qpoch_qexp(nu, q, s)
                  / (qpoch_qexp(1, q, r) * qpoch_qexp(1, q, s)))
            if s != r:
                layer.add(theta * bf * q ** ((r + s) * (z + s - l + 1) - s) * t**r
                          * qpoch_qexp(N - z + 1, q, r - s)
                          * bessel_j_qexp(nu + r + s, z + s - l + 1, q, policy)
                          * little_q_bessel_j(nu + r + s, t * q ** (z + s - l + 1),
                                              q, policy)
                          * little_q_jacobi_std(s, q ** (N - z), nu - 1, r - s, q)
                          * _phi11_kraw(t, N - x + 1, x - z + r - s + 1, q, policy))
            layer.add(theta * bf * q ** ((s + r) * (z + r - l)) * (t * q) ** s
                      * bessel_j_qexp(nu + r + s, z + r - l + 1, q, policy)
                      * little_q_bessel_j(nu + r + s, t * q ** (z + r - l + 1),
                                          q, policy)
                      * little_q_jacobi_std(s, q ** (N - z + s - r), nu - 1, r - s, q)
                      * _phi11_kraw(t, N - x + 1, x - z - r + s + 1, q, policy))
        lv = layer.value
        acc.add(lv)
        layers.append(abs(lv))
        if abs(lv) < policy.eps_term * max(abs(acc.value), 1.0):
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
        r += 1
    rho = t * q ** (z + 1)
    if len(layers) >= 2 and layers[-2] > 0:
        rho = max(rho, layers[-1] / layers[-2])
    rho = min(rho, 0.9)
    tail = layers[-1] * rho / (1.0 - rho) if layers else 0.0
    return acc.value, tail


# ------------------------------------------------------ individual checks

def _check_prop21(p, q, policy, tol):
    n = int(p["n"])
    a = complex(p["a"])
    z = complex(p["z"])
    if a.imag == 0:
        a = a.real
    if z.imag == 0:
        z = z.real
    lhs = phi11_weighted(a, 1 - n, z, q, policy)
    pref = ((-z) ** n if n >= 0 else 1.0 / ((-z) ** (-n)))
    pref *= q ** (n * (n - 1) // 2) * qpochhammer(a, q, n, policy)
    inner = phi11_weighted(a * q**n, 1 + n, (q**n) * z, q, policy)
    rhs = pref * inner.value
    tail = lhs.tail_bound + abs(pref) * inner.tail_bound
    return lhs.value, rhs, tail


def _check_transform27(p, q, policy, tol):
    a = complex(p["a"])
    w = complex(p["w"])
    z = complex(p["z"])
    if w == 0:
        raise DomainError("w must be nonzero")
    lhs_f = phi11(a, w, q, z, policy)
    rhs_f = phi11(a * z / w, z, q, w, policy)
    wp, _, wt = qpochhammer_ex(w, q, policy=policy)
    zp, _, zt = qpochhammer_ex(z, q, policy=policy)
    lhs = wp * lhs_f.value
    rhs = zp * rhs_f.value
    tail = (abs(wp) * lhs_f.tail_bound + abs(zp) * rhs_f.tail_bound
            + wt * abs(lhs) + zt * abs(rhs))
    return lhs, rhs, tail


def _check_jacobi_orth(p, q, policy, tol):
    m, n = int(p["m"]), int(p["n"])
    al, be = float(p["alpha"]), float(p["beta"])
    if al <= -1 or be <= -1:
        raise DomainError("orthogonality needs both exponents > -1")
    pref = (qpoch_inf_qexp(al + 1, q, policy) * qpoch_inf_qexp(be + 1, q, policy)
            / (qpoch_inf_qexp(al + be + 2, q, policy) * qpoch_inf_qexp(1, q, policy)))
    acc = CompensatedSum(0.0)
    w = qpoch_inf_qexp(1, q, policy) / qpoch_inf_qexp(be + 1, q, policy)
    k = 0
    stall = 0
    while k < policy.max_terms:
        term = (little_q_jacobi_std(m, q**k, al, be, q)
                * little_q_jacobi_std(n, q**k, al, be, q) * w)
        acc.add(term)
        if abs(term) < policy.eps_term * max(abs(acc.value), 1.0):
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
        w *= q ** (al + 1) * (1.0 - q ** (be + k + 1)) / (1.0 - q ** (k + 1))
        k += 1
    lhs = pref * acc.value
    rhs = jacobi_orthogonality_rhs(n, al, be, q) if m == n else 0.0
    rho = q ** (al + 1)
    tail = abs(pref) * abs(term) * rho / (1.0 - rho)
    return lhs, rhs, tail


def _check_krawtchouk_orth(p, q, policy, tol):
    n, m = int(p["n"]), int(p["m"])
    t, N = float(p["t"]), int(p["N"])
    if not (0 <= n <= N and 0 <= m <= N):
        raise DomainError("need 0 <= n, m <= N")
    acc = CompensatedSum(0.0)
    for x in range(N + 1):
        w = (qpochhammer(t * q, q, x, policy) * qpoch_qexp(1, q, N)
             / (qpoch_qexp(1, q, x) * qpoch_qexp(1, q, N - x)) * (t * q) ** (-x))
        acc.add(w * affine_q_krawtchouk(n, q ** (-x), t, N, q, policy).real
                * affine_q_krawtchouk(m, q ** (-x), t, N, q, policy).real)
    lhs = acc.value
    rhs = 0.0
    if n == m:
        rhs = ((t * q) ** (n - N) * qpoch_qexp(1, q, n) * qpoch_qexp(1, q, N - n)
               / (qpochhammer(t * q, q, n, policy) * qpoch_qexp(1, q, N)))
    return lhs, rhs, 0.0


def _r_poly_pair(l, m, nu, x1, x2, q):
    """Product of two coupled-index polynomials at arguments x1, x2 with their
    square-root weights grouped into one radical.

    The individual radicands can dip negative past an exact zero of the
    partner's radicand; their product never does on the checked domain.
    """
    if l >= m:
        rad = 1.0
        for j in range(1, l - m + 1):
            rad *= (1.0 - x1 * q**j) * (1.0 - x2 * q**j)
        poly = (little_q_jacobi_std(m, x1, nu, l - m, q)
                * little_q_jacobi_std(m, x2, nu, l - m, q))
    else:
        rad = 1.0
        for j in range(m - l):
            rad *= (1.0 - x1 * q ** (-j)) * (1.0 - x2 * q ** (-j))
        poly = (little_q_jacobi_std(l, x1 * q ** (l - m), nu, m - l, q)
                * little_q_jacobi_std(l, x2 * q ** (l - m), nu, m - l, q))
    return _sqrt0(rad) * poly


def _check_floris_koelink(p, q, policy, tol):
    l, m = int(p["l"]), int(p["m"])
    z, N, x = int(p["z"]), int(p["N"]), int(p["x"])
    nu, t = float(p["nu"]), float(p["t"])
    if z + l > N:
        raise DomainError("need z + l <= N")
    if x < max(0, l - m) or x > N:
        raise DomainError("lattice point x out of the checked window")
    xval = q**x
    pref_rad = ((t * q) ** (m - l)
                * qpoch_qexp_signed(x + m - l + 1, q, l - m)
                / qpoch_qexp_signed(N + m - l + 1, q, l - m))
    pref = (-1) ** (l - m) * pref_rad**0.5
    lhs = (pref * r_poly(l, m, nu, xval * q ** (m - l), q)
           * krawtchouk_hat(z, x + m - l, t, N + m - l, q, policy))
    acc = CompensatedSum(0.0)
    for r in range(l + 1):
        for s in range(m + 1):
            acc.add(c_addition_general(l, m, r, s, nu, q) * (-1) ** (r - s)
                    * t ** (0.5 * (r + s)) * q ** (0.5 * (r - s)) * q ** (z * (r + s))
                    * _r_poly_pair(l - r, m - s, nu + r + s, q**z, t * q**z, q)
                    * r_poly(r, s, nu - 1, q ** (N + m - l - z), q)
                    * krawtchouk_hat(z + l - m + s - r, x, t, N, q, policy))
    return lhs, acc.value, 0.0


def _check_jacobi_addition(p, q, policy, tol):
    l = int(p["l"])
    z, N, x = int(p["z"]), int(p["N"]), int(p["x"])
    nu, t = float(p["nu"]), float(p["t"])
    if z + l > N:
        raise DomainError("need z + l <= N")
    if not 0 <= x <= N:
        raise DomainError("lattice point x out of the checked window")
    lhs = (little_q_jacobi_std(l, q**x, nu, 0, q)
           * krawtchouk_hat(z, x, t, N, q, policy))
    acc = CompensatedSum(0.0)
    for r in range(l + 1):
        for s in range(r + 1):
            cc = c_addition_general(l, l, r, s, nu, q)
            com = cc * (-1) ** (r - s) * t ** (0.5 * (r + s)) * q ** (0.5 * (r - s))
            if s != r:
                rad = (qpoch_qexp_signed(z, q, r - s, step=-1)
                       * _poch_value_desc(t * q**z, q, r - s)
                       * qpoch_qexp(N - z + 1, q, r - s))
                acc.add(com * q ** (z * (r + s)) * _sqrt0(rad)
                        * little_q_jacobi_std(l - r, q ** (z + s - r), nu + r + s, r - s, q)
                        * little_q_jacobi_std(l - r, t * q ** (z + s - r), nu + r + s, r - s, q)
                        * little_q_jacobi_std(s, q ** (N - z), nu - 1, r - s, q)
                        * krawtchouk_hat(z + s - r, x, t, N, q, policy))
            rad2 = (qpoch_qexp(z + 1, q, r - s)
                    * qpochhammer(t * q ** (z + 1), q, r - s, policy)
                    * qpoch_qexp(N - z, q, r - s, step=-1))
            acc.add(com * q ** (r * r - s * s) * q ** (z * (r + s)) * _sqrt0(rad2)
                    * little_q_jacobi_std(l - r, q**z, nu + r + s, r - s, q)
                    * little_q_jacobi_std(l - r, t * q**z, nu + r + s, r - s, q)
                    * little_q_jacobi_std(s, q ** (N - z + s - r), nu - 1, r - s, q)
                    * krawtchouk_hat(z + r - s, x, t, N, q, policy))
    return lhs, acc.value, 0.0


def _poch_value_desc(a, q, n):
    """prod_{j=0}^{n-1} (1 - a q^(-j)): finite descending-base product."""
    prod = 1.0
    for j in range(n):
        prod *= 1.0 - a * q ** (-j)
    return prod


def _sqrt0(rad):
    if rad < 0:
        if rad > -1e-12:
            return 0.0
        raise DomainError(f"radicand {rad} < 0 outside the checked window")
    return rad**0.5


def _check_theorem41(p, q, policy, tol):
    nu, t = float(p["nu"]), float(p["t"])
    x, z, N = int(p["x"]), int(p["z"]), int(p["N"])
    l = int(p.get("l", 0))
    if nu <= 0:
        raise DomainError("order must be positive")
    if not 0.0 < t * q < 1.0:
        raise DomainError("need 0 < t*q < 1")
    if z > N:
        raise DomainError("need z <= N")
    lhs = addition_lhs(nu, t, x, z, N, l, q, policy)
    rhs, tail = addition_rhs(nu, t, x, z, N, l, q, policy)
    return lhs, rhs, tail


def _check_corollary43(p, q, policy, tol):
    p2 = dict(p)
    p2["l"] = 0
    return _check_theorem41(p2, q, policy, tol)


def _check_addition_n_infinity(p, q, policy, tol):
    """Large-N limit of the addition formula with t pinned to q^mu."""
    nu, mu = float(p["nu"]), float(p["mu"])
    x, z = int(p["x"]), int(p["z"])
    if nu <= 0 or mu <= -1:
        raise DomainError("need nu > 0 and mu > -1")
    lhs = bessel_j_qexp(nu, x + 1, q, policy) * bessel_j_qexp(mu, x - z + 1, q, policy)
    c_inf_sq = qpoch_inf_qexp(nu + 1, q, policy) ** 2
    acc = CompensatedSum(0.0)
    r = 0
    stall = 0
    last = 0.0
    while r < policy.max_terms:
        layer = CompensatedSum(0.0)
        for s in range(r + 1):
            theta = (qpoch_inf_qexp(nu + r + s + 1, q, policy) ** 2
                     * (1.0 - q ** (nu + r + s)) / (c_inf_sq * (1.0 - q**nu)))
            bf = (qpoch_qexp(nu, q, r) * qpoch_qexp(nu, q, s)
                  / (qpoch_qexp(1, q, r) * qpoch_qexp(1, q, s)))
            if s != r:
                layer.add(theta * bf * q ** ((r + s) * (z + s + 1) - s) * q ** (mu * r)
                          * bessel_j_qexp(nu + r + s, z + s + 1, q, policy)
                          * bessel_j_qexp(nu + r + s, z + s + 1 + mu, q, policy)
                          * bessel_j_qexp(mu, x - z + r - s + 1, q, policy))
            layer.add(theta * bf * q ** ((s + r) * (z + r)) * q ** ((1 + mu) * s)
                      * bessel_j_qexp(nu + r + s, z + r + 1, q, policy)
                      * bessel_j_qexp(nu + r + s, z + r + 1 + mu, q, policy)
                      * bessel_j_qexp(mu, x - z - r + s + 1, q, policy))
        lv = layer.value
        acc.add(lv)
        if abs(lv) < policy.eps_term * max(abs(acc.value), 1.0):
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
        last = abs(lv)
        r += 1
    rho = min(q ** (z + 1 + min(mu, 0.0)), 0.9)
    return lhs, acc.value, last * rho / (1.0 - rho)


def _check_prop51(p, q, policy, tol):
    """Double-sum product relation evaluated as printed, on a finite window.

    The printed display carries free symbols whose intended couplings are not
    stated, and its inner lattice sum grows without bound in both directions
    (the quadratic weight exponent flips sign). All of (m, z, k, t, y, nu) are
    taken as explicit parameters and the inner sum runs over the window
    x in [z - x_lo_offset, min(N, z + x_hi_offset)]. Residuals are reported,
    never asserted.
    """
    m, z, k = int(p["m"]), int(p["z"]), int(p["k"])
    t, y, nu = float(p["t"]), float(p["y"]), float(p["nu"])
    x_lo = z - int(p.get("x_lo_offset", 4))
    x_hi_off = int(p.get("x_hi_offset", 4))
    if nu <= 0 or not 0.0 < t * q < 1.0:
        raise DomainError("need nu > 0 and 0 < t*q < 1")
    lhs = (bessel_j_qexp(nu, z - m, q, policy)
           * little_q_bessel_j(nu, t * q ** (z - m), q, policy))
    pref = ((1.0 - q**nu) * qpochhammer(t * q, q, policy=policy)
            / qpoch_inf_qexp(1, q, policy))
    acc = CompensatedSum(0.0)
    stall = 0
    big_n = z + k
    n_count = 0
    max_layers = min(policy.max_terms, 60)
    while n_count < max_layers:
        inner = CompensatedSum(0.0)
        for x in range(x_lo, min(big_n, z + x_hi_off) + 1):
            w = (qpochhammer(t * q, q, big_n - x, policy)
                 * q ** (nu * (big_n - z - k) + (x - z) * (1 + y - x))
                 / (qpoch_qexp(1, q, big_n - x)
                    * qpoch_qexp(big_n, q, z + k, step=-1) ** 0.5
                    * qpoch_qexp(big_n - k, q, z, step=-1) ** 0.5
                    * qpoch_inf_qexp(big_n + 1, q, policy) ** 0.5
                    * qpoch_inf_qexp(big_n - k + 1, q, policy) ** 0.5))
            inner.add(w * _phi11_kraw(t, 1 + big_n - x - k, 1 + x - z, q, policy)
                      * _phi11_kraw(t, 1 + big_n - x, 1 + x - z - k, q, policy)
                      * bessel_j_qexp(nu, x - k - m, q, policy))
        lv = inner.value
        acc.add(lv)
        n_count += 1
        if abs(lv) < policy.eps_term * max(abs(acc.value), 1.0):
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
        big_n += 1
    return lhs, pref * acc.value, 0.0


def _check_bound25(p, q, policy, tol):
    m, n = int(p["m"]), int(p["n"])
    if m < 0 or n < 0:
        raise DomainError("need m, n >= 0")
    lhs = abs(qpoch_qexp(-m, q, n) * q ** (n * m))
    rhs = q ** (n * (n - 1) // 2)
    return None, None, (lhs, rhs)  # marker: bound-style, see dispatcher


def _check_bound_lemma42(p, q, policy, tol):
    nu = float(p["nu"])
    N, z = int(p["N"]), int(p["z"])
    r, s = int(p["r"]), int(p["s"])
    if nu <= 0 or not (0 <= z <= N) or not (0 <= s <= r):
        raise DomainError("need nu > 0, 0 <= z <= N, 0 <= s <= r")
    lhs = abs(little_q_jacobi_std(s, q ** (N - z), nu - 1, r - s, q))
    rhs = (qpochhammer(-q, q, policy=policy)
           * qpochhammer(-(q**nu), q, policy=policy)
           * qpochhammer(-(q ** (z - N)), q, policy=policy)
           / (qpoch_inf_qexp(1, q, policy) * qpoch_inf_qexp(nu, q, policy) ** 2)
           * q ** (s * (N - z)) * q ** (-s * (s - 1) / 2.0))
    return None, None, (lhs, rhs)


def _check_bound_prop32(p, q, policy, tol):
    z, N, t = int(p["z"]), int(p["N"]), float(p["t"])
    x = complex(float(p.get("x_re", 0.0)), float(p.get("x_im", 0.0)))
    if not (0 <= z <= N) or not 0.0 < t * q < 1.0:
        raise DomainError("need 0 <= z <= N and 0 < t*q < 1")
    val = abs(affine_q_krawtchouk(z, q ** (x - N), t, N, q, policy))
    bound = phi11(-t * q ** (N - x.real + 1), t * q, q,
                  -(q ** (x.real - z + 1)), policy).value
    bound = abs(bound) / qpoch_inf_qexp(1, q, policy)
    return None, None, (val, bound)


_EQUALITY_CHECKS = {
    IdentityId.PROP21: _check_prop21,
    IdentityId.TRANSFORM27: _check_transform27,
    IdentityId.JACOBI_ORTH: _check_jacobi_orth,
    IdentityId.KRAWTCHOUK_ORTH: _check_krawtchouk_orth,
    IdentityId.FLORIS_KOELINK_ADDITION: _check_floris_koelink,
    IdentityId.JACOBI_ADDITION: _check_jacobi_addition,
    IdentityId.THEOREM41: _check_theorem41,
    IdentityId.COROLLARY43: _check_corollary43,
    IdentityId.ADDITION_N_INFINITY: _check_addition_n_infinity,
    IdentityId.PROP51: _check_prop51,
}

_BOUND_CHECKS = {
    IdentityId.BOUND25: _check_bound25,
    IdentityId.BOUND_LEMMA42: _check_bound_lemma42,
    IdentityId.BOUND_PROP32: _check_bound_prop32,
}


def check_identity(id_, params: dict, policy: TruncationPolicy = DEFAULT_POLICY,
                   tol: float = DEFAULT_TOL) -> IdentityReport:
    """Evaluate one identity instance and report residuals.

    Never raises on a residual failure; the report's pass flag carries it.
    Raises DomainError when params violate the identity's documented domain.
    """
    if isinstance(id_, str):
        id_ = parse_identity(id_)
    q = as_series_base(params.get("q", 0.5))
    if id_ in _EQUALITY_CHECKS:
        lhs, rhs, tail = _EQUALITY_CHECKS[id_](params, q, policy, tol)
        return _report(id_, params, lhs, rhs, tail, tol)
    if id_ in _BOUND_CHECKS:
        _, _, (value, bound) = _BOUND_CHECKS[id_](params, q, policy, tol)
        return _bound_report(id_, params, value, bound, tol)
    if id_ is IdentityId.BOUND24:
        alpha, n = float(params["alpha"]), int(params["n"])
        if alpha <= 0 or n < 0:
            raise DomainError("need alpha > 0 and n >= 0")
        mid = qpoch_qexp(alpha, q, n)
        lo = qpoch_inf_qexp(alpha, q, policy)
        hi = qpochhammer(-(q**alpha), q, policy=policy)
        violation = max(0.0, lo - mid, mid - hi)
        scale = max(abs(mid), abs(hi), 1.0)
        return IdentityReport(id_, params, mid, mid + violation, violation,
                              violation / scale, 0.0, violation / scale <= tol)
    if id_ is IdentityId.KERNEL_SYMMETRY:
        nu = float(params["nu"])
        x, y, z = int(params["x"]), int(params["y"]), int(params["z"])
        base, dev = kernel_symmetry_residual(nu, x, y, z, q, policy)
        return IdentityReport(id_, params, base, base, abs(base) * dev, dev,
                              0.0, dev <= tol)
    if id_ is IdentityId.KERNEL_POSITIVITY:
        nu = float(params["nu"])
        x, y, z = int(params["x"]), int(params["y"]), int(params["z"])
        kv = kernel_delta(nu, x, y, z, q, policy)
        viol = max(0.0, -kv.value)
        return IdentityReport(id_, params, kv.value, max(kv.value, 0.0), viol,
                              viol, kv.tail_bound, viol <= tol)
    if id_ is IdentityId.PRODUCT_FORMULA52:
        return product_expand(float(params["nu"]), int(params["x"]),
                              int(params["y"]), q, int(params["z_lo"]),
                              int(params["z_hi"]), policy, tol)
    if id_ in (IdentityId.LIMIT_JACOBI_BESSEL,
               IdentityId.LIMIT_KRAWTCHOUK_BIG_BESSEL):
        indices = params.get("indices", (5, 10, 15, 20, 25))
        rep = run_limit_check(id_, params, list(indices), policy)
        final = rep.residuals[-1]
        return IdentityReport(id_, params, rep.target + final, rep.target, final,
                              final / max(abs(rep.target), 1.0), 0.0,
                              rep.monotone_tail and final <= tol)
    raise DomainError(f"unhandled identity: {id_}")


def run_limit_check(id_, params: dict, indices: list,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> LimitReport:
    """Residual-versus-index table for the two limit transitions.

    Jacobi-to-Bessel: residual_n = |p_n(q^n x) - j_alpha(x)| in the plain
    argument convention. Krawtchouk-to-big-Bessel: residual_m uses the scaled
    polynomial (q^(N+m); 1/q)_(z+m) K_(z+m)(q^(x-N); t, N+m) against the big
    q-Bessel value; the scaling factor's exponent sign follows the finite
    rewrite of the polynomial (the commonly printed reciprocal lattice power
    makes the products explode, see the project notes).
    """
    if isinstance(id_, str):
        id_ = parse_identity(id_)
    if not indices or any(indices[i] >= indices[i + 1]
                          for i in range(len(indices) - 1)):
        raise DomainError("indices must be strictly increasing and nonempty")
    q = as_series_base(params.get("q", 0.5))
    residuals = []
    if id_ is IdentityId.LIMIT_JACOBI_BESSEL:
        alpha = float(params["alpha"])
        beta = float(params["beta"])
        x = complex(params["x"])
        if x.imag == 0:
            x = x.real
        target = little_q_bessel_j(alpha, x, q, policy)
        for n in indices:
            pn = little_q_jacobi(int(n), (q**n) * x, alpha, beta, q)
            residuals.append(abs(pn - target))
    elif id_ is IdentityId.LIMIT_KRAWTCHOUK_BIG_BESSEL:
        z, N = int(params["z"]), int(params["N"])
        t, x = float(params["t"]), int(params["x"])
        target = big_q_bessel(-(q ** (N - z + 1)), (1.0 / t) * q ** (x - N - 1),
                              t * q, q, policy)
        for m in indices:
            val = (qpoch_qexp(N + m, q, z + m, step=-1)
                   * affine_q_krawtchouk(z + m, q ** (x - N), t, N + m, q, policy))
            residuals.append(abs(val - target))
    else:
        raise DomainError(f"not a limit transition: {id_}")
    half = residuals[len(residuals) // 2:]
    monotone = all(half[i + 1] <= half[i] for i in range(len(half) - 1))
    return LimitReport(id_, tuple(indices), tuple(residuals), target, monotone)
