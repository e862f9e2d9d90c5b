"""q-shifted factorials for finite, negative, and infinite index.

All evaluation is plain Python arithmetic on whatever numeric type the caller
passes in, so the same code runs on floats/complex for production and on
mpmath types when an oracle needs elevated precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BudgetExceeded, DomainError, Overflow, ZeroDivisor

INFINITY = math.inf

DEFAULT_Q_MAX = 0.99


@dataclass(frozen=True)
class QBase:
    """Deformation base with its validity window.

    The base must sit strictly inside (0, 1); infinite products and series
    additionally require q <= q_max (default 0.99) to keep truncation budgets
    sane.
    """

    q: float
    q_max: float = DEFAULT_Q_MAX

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"q out of range: q={self.q} must lie in (0, 1)")
        if not (0.0 < self.q_max < 1.0):
            raise DomainError(f"q_max out of range: {self.q_max}")

    def for_series(self) -> float:
        if self.q > self.q_max:
            raise DomainError(
                f"q out of range: q={self.q} exceeds q_max={self.q_max} "
                "for infinite products/series")
        return self.q


def as_series_base(q) -> float:
    """Validate a base for infinite products / series and return it as a number."""
    if isinstance(q, QBase):
        return q.for_series()
    if isinstance(q, complex):
        raise DomainError("base must be real for infinite products/series")
    return QBase(float(q)).for_series()


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rules and error budget for infinite sums and products."""

    eps_term: float = 1e-17
    eps_tail: float = 1e-12
    max_terms: int = 10000
    stall_window: int = 3

    def __post_init__(self):
        if self.eps_term <= 0 or self.eps_tail <= 0:
            raise DomainError("eps_term and eps_tail must be positive")
        if self.max_terms < 1 or self.stall_window < 1:
            raise DomainError("max_terms and stall_window must be >= 1")

    def tightened(self, factor: float = 10.0) -> "TruncationPolicy":
        return TruncationPolicy(self.eps_term / factor, self.eps_tail / factor,
                                self.max_terms * 2, self.stall_window)


DEFAULT_POLICY = TruncationPolicy()


class CompensatedSum:
    """Neumaier-compensated accumulator; works for real and complex values."""

    __slots__ = ("_s", "_c")

    def __init__(self, start=0.0):
        self._s = start
        self._c = start * 0

    def add(self, v):
        t = self._s + v
        if abs(self._s) >= abs(v):
            self._c += (self._s - t) + v
        else:
            self._c += (v - t) + self._s
        self._s = t

    @property
    def value(self):
        return self._s + self._c


def _is_int(n) -> bool:
    return isinstance(n, int) or (isinstance(n, float) and n.is_integer())


def qpochhammer(a, base, n=INFINITY, policy: TruncationPolicy = DEFAULT_POLICY):
    """(a; base)_n: product of (1 - a*base^k) over k = 0..n-1.

    n may be a nonnegative integer, a negative integer (reciprocal-product
    extension), or INFINITY. Finite products accept any real base; the
    infinite product needs base in (0, 1).
    """
    value, _, _ = qpochhammer_ex(a, base, n, policy)
    return value


def qpochhammer_ex(a, base, n=INFINITY, policy: TruncationPolicy = DEFAULT_POLICY):
    """Like qpochhammer but returns (value, factors_used, tail_bound).

    tail_bound bounds the relative truncation error of the infinite product:
    |a| * base^K / (1 - base) summed over the dropped factors; 0 for finite n.
    """
    if isinstance(base, complex):
        raise DomainError("base must be real")
    if n == INFINITY:
        q = as_series_base(base)
        if a == 0:
            return (a * 0 + 1.0), 0, 0.0
        prod = 1.0 + a * 0
        k = 0
        stall = 0
        while k < policy.max_terms:
            prod = prod * (1.0 - a * q**k)
            k += 1
            if abs(a) * q**k < policy.eps_term:
                stall += 1
                if stall >= policy.stall_window:
                    break
            else:
                stall = 0
        else:
            raise BudgetExceeded("infinite product did not settle within max_terms")
        # sum of dropped |a| q^j majorizes |log| of the dropped factors; the
        # /(1-s) turns that into a bound on the relative product error
        s = abs(a) * q**k / (1.0 - q)
        tail = s / (1.0 - s) if s < 1.0 else float("inf")
        return prod, k, tail
    if not _is_int(n):
        raise DomainError(f"index must be an integer or INFINITY, got {n!r}")
    n = int(n)
    if n >= 0:
        if n > policy.max_terms and abs(base) >= 1.0:
            raise Overflow(
                f"finite product of length {n} with |base| >= 1 exceeds max_terms")
        prod = 1.0 + a * 0
        for k in range(n):
            prod = prod * (1.0 - a * base**k)
        return prod, n, 0.0
    # negative index: (a;q)_{-m} = 1 / (a q^{-m}; q)_m
    m = -n
    for j in range(1, m + 1):
        if a == base**j:
            raise ZeroDivisor(
                f"negative-index product hits a vanishing factor at a = base^{j}")
    prod = 1.0 + a * 0
    for k in range(m):
        f = 1.0 - a * base ** (k - m)
        if f == 0:
            raise ZeroDivisor("negative-index product hits a vanishing factor")
        prod = prod * f
    return 1.0 / prod, m, 0.0


def qpochhammer_multi(params, base, n=INFINITY,
                      policy: TruncationPolicy = DEFAULT_POLICY):
    """Product of qpochhammer(a, base, n) over a nonempty list of parameters."""
    params = list(params)
    if not params:
        raise DomainError("parameter list must be nonempty")
    prod = 1.0
    for a in params:
        prod = prod * qpochhammer(a, base, n, policy)
    return prod


# -- lattice-exponent helpers -------------------------------------------------
#
# Large parts of the identity harness live on the lattice q^Z, where factors
# like (1 - q^(e+j)) must vanish *exactly* when the exponent is zero. These
# helpers take exponents instead of prefolded values so that q**0 == 1.0 holds
# for every base, not just dyadic ones.

def qpoch_qexp(e, q, n: int, step: int = 1):
    """prod_{j=0}^{n-1} (1 - q^(e + j*step)) for n >= 0."""
    prod = 1.0
    for j in range(n):
        prod *= 1.0 - q ** (e + j * step)
    return prod


def qpoch_qexp_signed(e, q, n: int, step: int = 1):
    """qpoch_qexp extended to negative n via the reciprocal convention."""
    if n >= 0:
        return qpoch_qexp(e, q, n, step)
    m = -n
    denom = qpoch_qexp(e - m * step, q, m, step)
    if denom == 0:
        raise ZeroDivisor("negative-index lattice product hits a vanishing factor")
    return 1.0 / denom


_INF_CACHE: dict = {}


def qpoch_inf_qexp(e, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """(q^e; q)_inf, exactly 0 for integer e <= 0; cached per (e, q, eps)."""
    if _is_int(e) and e <= 0:
        return 0.0
    key = (e, q, policy.eps_term)
    v = _INF_CACHE.get(key)
    if v is None:
        v = qpochhammer(q**e, q, INFINITY, policy)
        if len(_INF_CACHE) > 1_000_000:
            _INF_CACHE.clear()
        _INF_CACHE[key] = v
    return v
