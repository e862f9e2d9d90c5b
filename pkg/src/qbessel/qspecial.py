"""The q-special-function zoo.

Little q-Bessel functions (both normalizations), little q-Jacobi polynomials
(two argument conventions, see below), affine q-Krawtchouk polynomials (plain
and hat-normalized), big q-Bessel functions, and the coupled-index polynomial
family with its normalization coefficients.

Convention note: the little q-Jacobi polynomial appears in two argument
conventions. ``little_q_jacobi`` evaluates the terminating sum with argument x
as written; ``little_q_jacobi_std`` uses the shifted argument q*x. The shifted
convention is the one under which the orthogonality weight on the q-lattice
and the whole addition/product-formula family close up exactly; the plain
convention is the one whose large-degree limit is the normalized little
q-Bessel function. Both are exposed because the identity harness needs both.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import BranchError, DomainError, NegativeRadicand
from .hyperq import PhiSpec, eval_phi, phi11, phi11_weighted
from .qcore import (DEFAULT_POLICY, TruncationPolicy, as_series_base,
                    qpochhammer, qpoch_inf_qexp, qpoch_qexp, _is_int)

# relative slack for clamping radicands whose exact value is zero but whose
# floating evaluation lands a hair below it (non-dyadic bases only)
_RADICAND_SLACK = 1e-12


def little_q_bessel_j(alpha: float, z, q,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Normalized little q-Bessel function: 1phi1(0; q^(alpha+1); q, z)."""
    q = as_series_base(q)
    if alpha <= -1:
        raise DomainError("order must exceed -1")
    return phi11(0.0, q ** (alpha + 1), q, z, policy).value


def little_q_bessel_J(alpha: float, z, q,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Little q-Bessel function z^alpha (q^(alpha+1);q)_inf/(q;q)_inf j_alpha(z;q)."""
    q = as_series_base(q)
    if alpha <= -1:
        raise DomainError("order must exceed -1")
    if _is_int(alpha):
        za = z ** int(alpha)
    else:
        if isinstance(z, complex) or z <= 0:
            raise BranchError(
                "fractional order needs a positive real argument for z^alpha")
        za = z**alpha
    pref = qpoch_inf_qexp(alpha + 1, q, policy) / qpoch_inf_qexp(1, q, policy)
    return za * pref * little_q_bessel_j(alpha, z, q, policy)


def bessel_j_qexp(alpha: float, e: int, q,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """j_alpha(q^e; q) on the lattice, stable for any integer e.

    Large negative e makes the defining series cancel catastrophically; there
    the argument<->parameter swap of the confluent series gives the value as a
    regularized expansion whose terms are all tiny.
    """
    q = as_series_base(q)
    if alpha <= -1:
        raise DomainError("order must exceed -1")
    if e >= -1:
        return phi11(0.0, q ** (alpha + 1), q, q**e, policy).value
    num = phi11_weighted(0.0, e, q ** (alpha + 1), q, policy).value
    return num / qpoch_inf_qexp(alpha + 1, q, policy)


def little_q_jacobi(n: int, x, a_exp: float, b_exp: float, q) -> complex:
    """Little q-Jacobi polynomial of degree n, plain argument convention.

    Terminating sum with ratio factors built from exponents, so the cut after
    n + 1 terms is exact for every base.
    """
    q = as_series_base(q)
    if n < 0:
        raise DomainError("degree must be >= 0")
    term = 1.0 + x * 0
    total = term
    for k in range(n):
        num = (1.0 - q ** (k - n)) * (1.0 - q ** (a_exp + b_exp + n + 1 + k))
        den = (1.0 - q ** (a_exp + 1 + k)) * (1.0 - q ** (k + 1))
        term = term * num / den * x
        total = total + term
    return total


def little_q_jacobi_std(n: int, x, a_exp: float, b_exp: float, q) -> complex:
    """Little q-Jacobi polynomial, shifted argument convention (argument q*x)."""
    return little_q_jacobi(n, q * x, a_exp, b_exp, q)


def jacobi_orthogonality_rhs(n: int, a_exp: float, b_exp: float, q) -> float:
    """Diagonal value of the weighted lattice sum for degree n."""
    q = as_series_base(q)
    num = (q ** (n * (a_exp + 1)) * (1.0 - q ** (a_exp + b_exp + 1))
           * qpoch_qexp(b_exp + 1, q, n) * qpoch_qexp(1, q, n))
    den = ((1.0 - q ** (a_exp + b_exp + 2 * n + 1))
           * qpoch_qexp(a_exp + 1, q, n) * qpoch_qexp(a_exp + b_exp + 1, q, n))
    return num / den


def _kraw_exact(z: int, x_arg, t, N: int, q) -> float:
    """Terminating 3phi2 for K_z summed in exact rational arithmetic.

    The defining sum cancels from terms many orders above the result when the
    lattice value is large, far beyond double precision; the sum is finite and
    rational in (q, t, x_arg), so Fraction arithmetic recovers the value to
    one rounding of the final conversion.
    """
    qf = Fraction(q)
    xf = x_arg if isinstance(x_arg, Fraction) else Fraction(x_arg)
    tqf = Fraction(t) * qf
    qmz = qf ** (-z)
    qmn = qf ** (-N)
    term = Fraction(1)
    total = Fraction(1)
    qk = Fraction(1)
    for k in range(z):
        num = (1 - qmz * qk) * (1 - xf * qk) * qf
        den = (1 - tqf * qk) * (1 - qmn * qk) * (1 - qf * qk)
        term = term * num / den
        if term == 0:
            break
        total += term
        qk *= qf
    return float(total)


def affine_q_krawtchouk(z: int, x_arg, t: float, N: int, q,
                        policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Affine q-Krawtchouk polynomial K_z as a terminating 3phi2.

    x_arg is the already-exponentiated lattice value q^(-x); complex x is
    supported through it. Exactly z + 1 terms contribute. Real lattice values
    above 1 are summed in exact rational arithmetic: the floating sum loses
    all significance at the far corner of the lattice.
    """
    q = as_series_base(q)
    if not 0 <= z <= N:
        raise DomainError("need 0 <= z <= N")
    if not 0.0 < t * q < 1.0:
        raise DomainError("need 0 < t*q < 1")
    if not isinstance(x_arg, complex) and abs(x_arg) > 1.0 and z <= 400:
        return _kraw_exact(z, x_arg, t, N, q)
    spec = PhiSpec((q ** (-z), x_arg, 0.0), (t * q, q ** (-N)), q, q,
                   terminate_after=z)
    return eval_phi(spec, policy).value


def affine_q_krawtchouk_int(z: int, x: int, t: float, N: int, q,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Convenience wrapper for integer lattice points: K_z(q^(-x); t, N; q)."""
    if x < 0:
        raise DomainError("lattice point must be >= 0")
    q = as_series_base(q)
    if not 0 <= z <= N:
        raise DomainError("need 0 <= z <= N")
    if not 0.0 < t * q < 1.0:
        raise DomainError("need 0 < t*q < 1")
    spec = PhiSpec((q ** (-z), q ** (-x), 0.0), (t * q, q ** (-N)), q, q,
                   terminate_after=min(z, x))
    return eval_phi(spec, policy).value


def krawtchouk_hat(z: int, x: int, t: float, N: int, q,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Hat-normalized affine q-Krawtchouk value at the lattice point q^(x-N).

    Zero outside the support 0 <= z <= N, which is the convention the finite
    addition formulas rely on when their index shifts run off the lattice.
    """
    q = as_series_base(q)
    if not 0.0 < t * q < 1.0:
        raise DomainError("need 0 < t*q < 1")
    if z < 0 or z > N:
        return 0.0
    rad = (qpoch_qexp(N, q, z, step=-1) * qpochhammer(t * q, q, z)
           / qpoch_qexp(1, q, z))
    if rad < 0:
        raise NegativeRadicand(f"normalization radicand {rad} < 0")
    val = affine_q_krawtchouk(z, q ** (x - N), t, N, q, policy)
    return (-1) ** z * (t * q) ** (-0.5 * z) * rad**0.5 * val


def big_q_bessel(lam, x, a, q,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Big q-Bessel function: 1phi1(1/x; a; q, -lam*a*x)."""
    q = as_series_base(q)
    if x == 0:
        raise DomainError("x must be nonzero")
    return phi11(1.0 / x, a, q, -lam * a * x, policy).value


def _sqrt_clamped(rad, scale) -> float:
    if rad < 0:
        if rad >= -_RADICAND_SLACK * max(scale, 1.0):
            return 0.0
        raise NegativeRadicand(f"radicand {rad} < 0")
    return rad**0.5


def r_poly(l: int, m: int, nu: float, x, q) -> float:
    """Coupled-index polynomial: a square-root weight times a little q-Jacobi
    polynomial in the shifted-argument convention, branching on l >= m vs l <= m.
    Both branches agree at l = m."""
    q = as_series_base(q)
    if l < 0 or m < 0:
        raise DomainError("indices must be >= 0")
    if l >= m:
        rad = 1.0
        scale = 1.0
        for j in range(l - m):
            f = x * q ** (j + 1)
            rad *= 1.0 - f
            scale *= 1.0 + abs(f)
        return _sqrt_clamped(rad, scale) * little_q_jacobi_std(m, x, nu, l - m, q)
    rad = 1.0
    scale = 1.0
    for j in range(m - l):
        f = x * q ** (-j)
        rad *= 1.0 - f
        scale *= 1.0 + abs(f)
    return _sqrt_clamped(rad, scale) * little_q_jacobi_std(
        l, x * q ** (l - m), nu, m - l, q)


def c_norm(l: int, m: int, nu: float, q) -> float:
    """Positive normalization constant of the coupled-index family."""
    q = as_series_base(q)
    if l < 0 or m < 0:
        raise DomainError("indices must be >= 0")
    if nu <= -1:
        raise DomainError("order must exceed -1")
    return (q ** (m * (nu + 1)) * (1.0 - q ** (nu + 1))
            / (1.0 - q ** (nu + l + m + 1))
            * qpoch_qexp(1, q, l) * qpoch_qexp(1, q, m)
            / (qpoch_qexp(nu + 1, q, l) * qpoch_qexp(nu + 1, q, m)))


def c_addition_general(l: int, m: int, r: int, s: int, nu: float, q) -> float:
    """Coupling coefficient of the finite addition formula, general (l, m).

    Closed form: (1-q^(nu+r+s+1))/(1-q^(nu+1)) * c_{l,m} / (c_{l-r,m-s} c_{r,s}),
    the first c at order nu, the second at nu+r+s, the third at nu-1. The
    off-diagonal case extends the diagonal closed form; the finite addition
    formula tests pin it down numerically.
    """
    if not (0 <= r <= l and 0 <= s <= m):
        raise DomainError("need 0 <= r <= l and 0 <= s <= m")
    q = as_series_base(q)
    return ((1.0 - q ** (nu + r + s + 1)) / (1.0 - q ** (nu + 1))
            * c_norm(l, m, nu, q)
            / (c_norm(l - r, m - s, nu + r + s, q) * c_norm(r, s, nu - 1, q)))


def c_addition(l: int, r: int, s: int, nu: float, q) -> float:
    """Diagonal coupling coefficient (both outer indices equal to l)."""
    if not 0 <= s <= r <= l:
        raise DomainError("need 0 <= s <= r <= l")
    return c_addition_general(l, l, r, s, nu, q)
