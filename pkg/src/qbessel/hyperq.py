"""Basic hypergeometric series engine.

Series are generated term by term via the multiplicative term ratio, so a
numerator parameter of the form q^(-n) cuts the sum exactly instead of leaving
a rounding-sized ghost tail. A regularized weighted variant handles the
confluent series whose lower parameter is a nonpositive power of q, where the
bare series has a pole that the weight (q^b; q)_inf cancels.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetExceeded, DivergenceError, DomainError, PoleError
from .qcore import (DEFAULT_POLICY, CompensatedSum, TruncationPolicy,
                    as_series_base, qpochhammer, qpoch_inf_qexp, _is_int)


@dataclass(frozen=True)
class PhiSpec:
    """One r-phi-s series instance: numerator/denominator parameters, base, argument.

    terminate_after, when set, cuts the sum after index k = terminate_after;
    callers that know a numerator parameter equals q^(-n) exactly should pass
    n here so termination does not depend on floating-point coincidences.
    """

    numerator: tuple = ()
    denominator: tuple = ()
    q: float = 0.5
    z: complex = 0.0
    terminate_after: int | None = None

    def __post_init__(self):
        as_series_base(self.q)
        if self.terminate_after is not None and self.terminate_after < 0:
            raise DomainError("terminate_after must be >= 0")


@dataclass(frozen=True)
class SeriesResult:
    """Value of a truncated series plus how it stopped."""

    value: complex
    terms_used: int
    tail_bound: float
    terminated: bool = False

    def __complex__(self):
        return complex(self.value)


def _tail_estimate(num_params, den_params, q, z, d, k, last_abs):
    """Geometric/super-geometric tail bound after stopping at index k."""
    c = abs(z)
    for a in num_params:
        c *= 1.0 + abs(a) * q**k
    for b in den_params:
        f = 1.0 - abs(b) * q**k
        if f <= 0:
            return float("inf")
        c /= f
    c /= 1.0 - q ** (k + 1)
    rho = c * (q ** (d * k) if d > 0 else 1.0)
    if rho >= 1.0:
        return float("inf")
    return last_abs * rho / (1.0 - rho)


def eval_phi(spec: PhiSpec, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """Evaluate the series sum_k [(a_1..a_r;q)_k / ((b_1..b_s;q)_k (q;q)_k)]
    ((-1)^k q^C(k,2))^(1+s-r) z^k by term ratios."""
    q = as_series_base(spec.q)
    nums = tuple(spec.numerator)
    dens = tuple(spec.denominator)
    z = spec.z
    d = 1 + len(dens) - len(nums)
    cut = spec.terminate_after
    stall_legal = d >= 1 or (d == 0 and abs(z) < 1.0) or cut is not None

    term = 1.0 + z * 0
    acc = CompensatedSum(term)
    n_terms = 1
    scale = 1.0
    stall = 0
    terminated = False
    stalled = False
    k = 0
    while True:
        if cut is not None and k >= cut:
            terminated = True
            break
        if k >= policy.max_terms:
            if not stall_legal:
                raise DivergenceError(
                    "no stopping rule applies: series neither terminates nor decays")
            raise BudgetExceeded(f"series did not settle within {policy.max_terms} terms")
        num_f = 1.0 + z * 0
        for a in nums:
            num_f = num_f * (1.0 - a * q**k)
        if num_f == 0:
            terminated = True
            break
        den_f = 1.0 - q ** (k + 1)
        for b in dens:
            f = 1.0 - b * q**k
            if f == 0:
                raise PoleError(
                    f"denominator parameter hit a vanishing factor at k={k}")
            den_f = den_f * f
        ratio = num_f / den_f * z
        if d:
            ratio = ratio * ((-(q**k)) ** d if d > 0 else 1.0 / ((-(q**k)) ** (-d)))
        term = term * ratio
        k += 1
        if term == 0:
            break  # underflow of the convergence factor: exact cutoff
        acc.add(term)
        n_terms += 1
        a_total = abs(acc.value)
        if a_total > scale:
            scale = a_total
        if stall_legal and cut is None and abs(term) < policy.eps_term * scale:
            stall += 1
            if stall >= policy.stall_window:
                stalled = True
                break
        else:
            stall = 0
    if stalled:
        tail = _tail_estimate(nums, dens, q, z, d, k, abs(term))
    else:
        tail = 0.0
    return SeriesResult(acc.value, n_terms, tail, terminated)


def phi11(a, b, q, z, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """1phi1(a; b; q, z); entire in z thanks to the q^C(k,2) convergence factor."""
    return eval_phi(PhiSpec((a,), (b,), q, z), policy)


def phi11_weighted(a, b_exp, z, q,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """(q^b_exp; q)_inf * 1phi1(a; q^b_exp; q, z), evaluated in regularized form.

    The expansion sum_k (a;q)_k (q^(b_exp+k);q)_inf / (q;q)_k (-1)^k q^C(k,2) z^k
    stays finite for every integer b_exp: for b_exp <= 0 the first 1 - b_exp
    terms vanish identically and the sum starts at k0 = 1 - b_exp. This is the
    numerically stable route whenever the bare series has a vanishing weight,
    and the building block for the kernel of the product formula.
    """
    q = as_series_base(q)
    k0 = max(0, 1 - int(round(b_exp))) if _is_int(b_exp) else 0
    lead = qpochhammer(a, q, k0, policy) / qpochhammer(q, q, k0, policy)
    lead = lead * (-1) ** k0 * q ** (k0 * (k0 - 1) // 2) * z**k0
    term = lead * qpoch_inf_qexp(b_exp + k0, q, policy)
    acc = CompensatedSum(term)
    scale = max(abs(term), 1.0)
    stall = 0
    k = k0
    while k - k0 < policy.max_terms:
        den = (1.0 - q ** (k + 1)) * (1.0 - q ** (b_exp + k))
        term = term * (1.0 - a * q**k) / den * (-(q**k) * z)
        k += 1
        if term == 0:
            return SeriesResult(acc.value, k - k0, 0.0, True)
        acc.add(term)
        a_total = abs(acc.value)
        if a_total > scale:
            scale = a_total
        if abs(term) < policy.eps_term * scale:
            stall += 1
            if stall >= policy.stall_window:
                break
        else:
            stall = 0
    else:
        raise BudgetExceeded(f"series did not settle within {policy.max_terms} terms")
    rho = abs(z) * q**k * (1.0 + abs(a) * q**k)
    rho /= (1.0 - q ** (k + 1)) * abs(1.0 - q ** (b_exp + k))
    tail = abs(term) * rho / (1.0 - rho) if rho < 1.0 else float("inf")
    return SeriesResult(acc.value, k - k0 + 1, tail, False)


def phi11_shifted(n: int, a, z, q,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Index-shifted confluent-series combination
    (-z)^n q^C(n,2) (a;q)_n (q^(1+n);q)_inf 1phi1(a q^n; q^(1+n); q, q^n z).

    Equals (q^(1-n);q)_inf 1phi1(a; q^(1-n); q, z) for every integer n; the
    negative-index factor (a;q)_n follows the reciprocal convention, so z = 0
    is outside the domain when n < 0.
    """
    q = as_series_base(q)
    if n < 0 and z == 0:
        raise DomainError("z must be nonzero when the shift index is negative")
    pref = (-z) ** n if n >= 0 else 1.0 / ((-z) ** (-n))
    pref = pref * q ** (n * (n - 1) // 2) * qpochhammer(a, q, n, policy)
    inner = phi11_weighted(a * q**n, 1 + n, (q**n) * z, q, policy)
    return pref * inner.value
