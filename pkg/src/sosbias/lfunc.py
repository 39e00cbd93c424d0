"""Hurwitz zeta and Dirichlet L-values at real s > 0.

Everything goes through the shifted sum

    T(s; q, a) = sum_{n >= 0} (q n + a)^(-s) = q^(-s) zeta(s, a/q),

evaluated by Euler-Maclaurin at a cut-off N.  For real s > 0 the function
(q x + a)^(-s) is completely monotone, so the remainder after m correction
terms has the sign of, and is bounded by, the first omitted term.  That
term is the error bound reported (plus a rounding allowance).

Working with T rather than zeta(s, a/q) keeps L(2^k, chi) finite for large
k, where q^s and zeta(s, a/q) would overflow separately.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import chargroup
from .chargroup import Character
from .errors import DomainError, PoleError, PrecisionError

DEFAULT_TOL = 1e-10
MIN_TOL = 1e-14
MAX_CUTOFF = 1 << 20
_EPS = sys.float_info.epsilon

# B_2, B_4, ..., B_32
BERNOULLI_EVEN = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
    Fraction(8553103, 6),
    Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322),
    Fraction(-7709321041217, 510),
)
MAX_TERMS = len(BERNOULLI_EVEN) - 1  # one Bernoulli number is held back for the bound

# log(|B_2k| / (2k)!) for k = 1..16
_LOG_BCOEF = tuple(
    math.log(abs(b.numerator)) - math.log(b.denominator) - math.lgamma(2 * k + 1)
    for k, b in enumerate(BERNOULLI_EVEN, start=1)
)


@dataclass(frozen=True)
class LValueResult:
    value: float | complex
    error_bound: float
    s: float
    character_id: tuple[int, int] | str

    def __float__(self) -> float:
        if isinstance(self.value, complex):
            raise TypeError("complex L-value")
        return self.value


def _log_rising(s: float, j: int) -> float:
    return math.lgamma(s + j) - math.lgamma(s)


def _correction_log(s: float, q: int, X: float, k: int) -> float:
    """log of |B_2k/(2k)! * d^(2k-1)/dx^(2k-1) (q x + a)^(-s)| at q x + a = X."""
    j = 2 * k - 1
    return _LOG_BCOEF[k - 1] + _log_rising(s, j) + j * math.log(q) - (s + j) * math.log(X)


def _plan(s: float, q: int, a: float, target: float) -> tuple[int, int, float]:
    """Pick (N, m) so the first omitted Euler-Maclaurin term is below target."""
    N = 1
    while N <= MAX_CUTOFF:
        X = q * N + a
        best_m, best = 0, math.inf
        for m in range(1, MAX_TERMS + 1):
            b = math.exp(_correction_log(s, q, X, m + 1))
            if b < best:
                best_m, best = m, b
        if best <= target:
            return N, best_m, best
        N *= 2
    raise PrecisionError(f"tolerance {target:g} unattainable at s={s}")


def shifted_sum(s: float, q: int, a: float, tol: float = DEFAULT_TOL, finite_part: bool = False):
    """sum_{n>=0} (q n + a)^(-s) and an error bound.

    With ``finite_part`` the pole term 1/(q (s-1)) is dropped, which is what
    is needed at s = 1 when summing against a non-principal character.
    """
    N, m, trunc = _plan(s, q, a, tol / 2)
    X = q * N + a
    terms = [(q * n + a) ** (-s) for n in range(N)]
    head = math.fsum(terms)
    if s == 1:
        if not finite_part:
            raise PoleError("pole at s = 1")
        integral = -math.log(X) / q
    else:
        integral = X ** (1 - s) / (q * (s - 1))
        if finite_part:
            integral -= 1 / (q * (s - 1))
    corr = [0.5 * X ** (-s)]
    for k in range(1, m + 1):
        sign = 1.0 if BERNOULLI_EVEN[k - 1] > 0 else -1.0
        corr.append(sign * math.exp(_correction_log(s, q, X, k)))
    total = head + integral + math.fsum(corr)
    rounding = 4 * _EPS * (math.fsum(terms) + abs(integral) + math.fsum(abs(c) for c in corr) + N * _EPS)
    return total, trunc + rounding


def hurwitz_zeta(s: float, a: float, tol: float = DEFAULT_TOL) -> LValueResult:
    """zeta(s, a) = sum_{n>=0} (n + a)^(-s) for s > 0, s != 1, 0 < a <= 1."""
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    if not 0 < a <= 1:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    _check_tol(tol)
    value, err = shifted_sum(float(s), 1, float(a), tol)
    if err > tol:
        raise PrecisionError(f"error bound {err:g} exceeds tolerance {tol:g}")
    return LValueResult(value, err, float(s), f"hurwitz({a})")


def _check_tol(tol: float) -> None:
    if not tol >= MIN_TOL:
        raise PrecisionError(f"tolerance {tol:g} below supported minimum {MIN_TOL:g}")


def l_value(chi: Character, s: float, tol: float = DEFAULT_TOL) -> LValueResult:
    """L(s, chi) at the modulus of chi (imprimitive characters keep their missing Euler factors)."""
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    _check_tol(tol)
    return _l_value_cached(chi, float(s), float(tol))


@lru_cache(maxsize=4096)
def _l_value_cached(chi: Character, s: float, tol: float) -> LValueResult:
    q = chi.modulus
    if chi.is_principal:
        if s == 1:
            raise PoleError("principal L-function has a pole at s = 1")
        zeta, err = shifted_sum(s, 1, 1.0, tol / 2)
        factor = math.prod(1 - p ** (-s) for p, _ in chargroup.factorize(q))
        value, err = zeta * factor, err * factor + 4 * _EPS * abs(zeta)
    else:
        units = [a for a in range(1, q) if math.gcd(a, q) == 1]
        part_tol = tol / (2 * len(units))
        parts = [(chi(a), *shifted_sum(s, q, float(a), part_tol, finite_part=True)) for a in units]
        if chi.is_real:
            value = math.fsum(c * v for c, v, _ in parts)
        else:
            value = sum(c * v for c, v, _ in parts)
        err = sum(e for _, _, e in parts) + 4 * _EPS * sum(abs(v) for _, v, _ in parts)
    if err > tol:
        raise PrecisionError(f"error bound {err:g} exceeds tolerance {tol:g}")
    return LValueResult(value, err, s, chi.id)


def l_half_product(chi: Character, tol: float = DEFAULT_TOL) -> float:
    """sqrt(L(1/2, chi) L(1/2, chi chi_-4)), non-negative branch, for real non-principal chi."""
    from .errors import GRHViolationSignal

    if not chi.is_real:
        raise DomainError("l_half_product needs a real character")
    if chi.is_principal:
        raise DomainError("principal characters are excluded")
    a = l_value(chi, 0.5, tol)
    b = l_value(chargroup.twist_by_chi_minus4(chi), 0.5, tol)
    prod = a.value * b.value
    slack = abs(a.value) * b.error_bound + abs(b.value) * a.error_bound + a.error_bound * b.error_bound
    if prod < -slack:
        raise GRHViolationSignal(f"L(1/2)L(1/2, twist) = {prod:.6g} < 0 for {chi!r}")
    return math.sqrt(max(prod, 0.0))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def euler_factor(chi: Character, p: int, s: float, f_local: bool = False):
    """(1 - chi(p) p^-s)^-1; with ``f_local`` the local factor of sum_{n in S} chi(n) n^-s.

    For p = 3 mod 4 only even powers of p lie in S, giving (1 - chi(p)^2 p^-2s)^-1.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    c = chi(p)
    if f_local and p % 4 == 3:
        return 1 / (1 - c * c * p ** (-2 * s))
    return 1 / (1 - c * p ** (-s))
