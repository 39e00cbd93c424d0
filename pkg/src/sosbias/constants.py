"""Explicit constants governing the bias.

K (Landau-Ramanujan), Gamma(1/4), C_q, G(1/2, chi), the race constants
C_{q,a,b} (sums of two squares) and D_{q,a,b} (omega / Omega races), and a
local Euler-factor check of the generating-function identity for
sum_{n in S} chi(n) n^-s.

The product over primes p = 3 mod 4 of (1 - p^-2)^(-1/4) is never truncated
here; it equals (sqrt(2) K)^(1/2), and K comes from a product over k of
zeta(2^k) and L(2^k, chi_-4) that converges doubly exponentially.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

from . import chargroup
from .chargroup import Character, build_group, chi_minus4, factorize, real_characters
from .errors import DomainError
from .lfunc import DEFAULT_TOL, euler_factor, is_prime, l_half_product, l_value

DEFAULT_K_MAX = 12

# Values of C_{15,a,b} as printed in the published table, keyed (a, b).
PUBLISHED_TABLE1 = {
    (1, 2): 1.427, (1, 7): 9.698, (1, 8): 1.427, (1, 11): 9.931, (1, 13): 9.698, (1, 14): 9.931,
    (4, 2): 1.427, (4, 7): 9.698, (4, 8): 1.427, (4, 11): 9.931, (4, 13): 9.698, (4, 14): 9.931,
    (2, 7): 8.271, (2, 11): 8.504, (2, 13): 8.271, (2, 14): 8.504,
    (7, 8): -8.271, (7, 11): 0.233, (7, 14): 0.233,
    (8, 11): 8.504, (8, 13): 8.271, (8, 14): 8.504,
    (11, 13): -0.233,
    (13, 14): 0.233,
}
# Published C_{5,a,b} for a quadratic, b non-quadratic.
PUBLISHED_C5 = 0.7309


@dataclass(frozen=True)
class BiasConstant:
    q: int
    a: int
    b: int
    kind: str  # "two_squares" or "omega"
    value: float
    per_character_terms: tuple[tuple[int, float], ...] = field(default=())
    primitive_l_values: bool = False

    def as_dict(self) -> dict:
        return {
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "kind": self.kind,
            "value": self.value,
            "primitive_l_values": self.primitive_l_values,
            "per_character_terms": [{"char_index": i, "term": t} for i, t in self.per_character_terms],
        }


@lru_cache(maxsize=64)
def landau_ramanujan(k_max: int = DEFAULT_K_MAX) -> float:
    """Truncation at k_max of the zeta / L(., chi_-4) product for K."""
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    principal = chargroup.principal(1)
    chi4 = chi_minus4()
    log_k = -0.5 * math.log(2)
    for k in range(1, k_max + 1):
        s = float(2**k)
        z = l_value(principal, s).value
        L = l_value(chi4, s).value
        log_k += 2.0 ** (-k - 1) * (math.log(z) + math.log1p(-(2.0**-s)) - math.log(L))
    return math.exp(log_k)


@lru_cache(maxsize=1)
def gamma_quarter() -> float:
    """Gamma(1/4) from Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(1, sqrt 2)."""
    a, b = 1.0, math.sqrt(2.0)
    while abs(a - b) > 1e-16 * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.sqrt((2 * math.pi) ** 1.5 / a)


def _product_3mod4_quarter() -> float:
    """prod_{p = 3 mod 4} (1 - p^-2)^(-1/4)."""
    return math.sqrt(math.sqrt(2.0) * landau_ramanujan())


def _primes_dividing(q: int) -> list[int]:
    return [p for p, _ in factorize(q)]


def c_q(q: int) -> float:
    if q < 1:
        raise DomainError("modulus must be positive")
    finite = math.prod((1 - 1 / p) ** 0.5 for p in _primes_dividing(q) if p % 4 == 3)
    return 2 * math.pi**-0.25 / gamma_quarter() * _product_3mod4_quarter() * finite


def g_half(chi: Character) -> float:
    """G(1/2, chi) for real chi."""
    if not chi.is_real:
        raise DomainError("g_half needs a real character")
    q = chi.modulus
    two_adic = (1 - chi(2) / math.sqrt(2)) ** -0.5
    odd = 0.5**0.25 if q % 2 else 1.0
    # the infinite product runs over p not dividing q
    removed = math.prod((1 - p**-2.0) ** 0.25 for p in _primes_dividing(q) if p % 4 == 3)
    return two_adic * odd * _product_3mod4_quarter() * removed


def _check_pair(q: int, a: int, b: int, mod4: bool) -> tuple[int, int]:
    if q < 1:
        raise DomainError("modulus must be positive")
    a, b = a % q, b % q
    for r in (a, b):
        if math.gcd(r, q) != 1:
            raise DomainError(f"residue {r} is not coprime to {q}")
        if mod4 and r % math.gcd(4, q) != 1 % math.gcd(4, q):
            raise DomainError(f"residue {r} is not 1 mod gcd(4, {q}); S avoids 3 mod 4")
    return a, b


def two_adic_factor(chi: Character) -> float:
    return (1 - chi(2) / math.sqrt(2)) ** -0.5


def _half_product(chi: Character, primitive: bool) -> float:
    if not primitive:
        return l_half_product(chi)
    twist = chargroup.twist_by_chi_minus4(chi)
    a = l_value(chargroup.primitive(chi), 0.5).value
    b = l_value(chargroup.primitive(twist), 0.5).value
    return math.sqrt(max(a * b, 0.0))


def c_qab(q: int, a: int, b: int, primitive: bool = False) -> BiasConstant:
    """C_{q,a,b}: sum over real chi mod q of (chi(a)-chi(b)) (1-chi(2)/sqrt2)^(-1/2) sqrt(L L).

    Characters with chi(a) = chi(b) (the principal one and, for 4 | q, the
    lift of chi_-4 among them) contribute zero and their L-values are never
    evaluated.  With ``primitive`` the L-values are taken for the primitive
    characters inducing chi and chi chi_-4 instead of at modulus q.
    """
    a, b = _check_pair(q, a, b, mod4=True)
    terms = []
    for chi in real_characters(q):
        weight = chi(a) - chi(b)
        if weight == 0:
            terms.append((chi.index, 0.0))
            continue
        terms.append((chi.index, weight * two_adic_factor(chi) * _half_product(chi, primitive)))
    return BiasConstant(q, a, b, "two_squares", math.fsum(t for _, t in terms), tuple(terms), primitive)


def d_qab(q: int, a: int, b: int) -> BiasConstant:
    """D_{q,a,b}: sum over real chi mod q of (chi(a)-chi(b)) L(1/2, chi)."""
    a, b = _check_pair(q, a, b, mod4=False)
    terms = []
    for chi in real_characters(q):
        weight = chi(a) - chi(b)
        terms.append((chi.index, 0.0 if weight == 0 else weight * l_value(chi, 0.5).value))
    return BiasConstant(q, a, b, "omega", math.fsum(t for _, t in terms), tuple(terms))


def _log_euler(chi: Character, p: int, s: float) -> complex:
    return -cmath.log(1 - chi(p) * p ** (-s))


def verify_local_identity(p: int, s: float, chi: Character) -> float:
    """|local factor of F(s, chi) - local factor of the chi-twisted product identity| at p.

    The right side is

        sqrt(L(s,chi) L(s,chi chi_-4) (1 - chi(2) 2^-s)^-1)
          * prod_{k>=1} ((1 - chi^(2^k)(2) 2^(-2^k s)) L(2^k s, chi^(2^k)) / L(2^k s, chi^(2^k) chi_-4))^(2^(-k-1)),

    assembled in logarithms so every root is the branch that is 1 at s = infinity.
    """
    if not s > 1:
        raise DomainError("the Euler products need s > 1")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    lhs = complex(euler_factor(chi, p, s, f_local=True))

    twist = chargroup.twist_by_chi_minus4(chi)
    log_rhs = 0.5 * (_log_euler(chi, p, s) + _log_euler(twist, p, s))
    if p == 2:
        log_rhs += 0.5 * _log_euler(chi, 2, s)
    k = 1
    while p ** (-(2**k) * s) > 1e-17:
        psi = chargroup.power(chi, 2**k)
        sk = 2**k * s
        inner = _log_euler(psi, p, sk) - _log_euler(chargroup.twist_by_chi_minus4(psi), p, sk)
        if p == 2:
            inner -= _log_euler(psi, 2, sk)
        log_rhs += 2.0 ** (-k - 1) * inner
        k += 1
    return abs(cmath.exp(log_rhs) - lhs)


def main_term_coefficient(q: int, chi: Character) -> tuple[float, float]:
    """Per-character coefficient of sqrt(x) (log x)^(-3/4) in sum_{n<=x, n in S} chi(n).

    Route A assembles C_q (1 - chi(2)/sqrt2)^(-1/2) sqrt(L L).  Route B goes
    through M(1/2, chi) = 2 sqrt(L L) prod_{p|q}(1-1/p)^(1/4) L(1, chi_0 chi_-4)^(-1/4) G(1/2, chi)
    and the Hankel integral 2^(-1/4) M / Gamma(1/4).  Returns (A, |A - B|).
    """
    if not chi.is_real or chi.is_principal:
        raise DomainError("main-term coefficient needs a real non-principal character")
    if chi.modulus != q:
        raise DomainError(f"character has modulus {chi.modulus}, expected {q}")
    ll = l_half_product(chi)
    route_a = c_q(q) * two_adic_factor(chi) * ll

    chi0_twist = chargroup.twist_by_chi_minus4(chargroup.principal(q))
    l_one = l_value(chi0_twist, 1.0).value
    finite = math.prod((1 - 1 / p) ** 0.25 for p in _primes_dividing(q))
    m_half = 2 * ll * finite * l_one**-0.25 * g_half(chi)
    route_b = 2**-0.25 * m_half / gamma_quarter()
    return route_a, abs(route_a - route_b)


def predicted_coefficient(q: int, a: int, b: int) -> float:
    """phi(q)^-1 C_q C_{q,a,b}: coefficient of sqrt(x)/(log x)^(3/4) in S(x;q,a) - S(x;q,b)."""
    return c_q(q) * c_qab(q, a, b).value / chargroup.euler_phi(q)


def omega_coefficient(q: int, a: int, b: int) -> float:
    """phi(q)^-1 D_{q,a,b}: the omega race difference is about -this * sqrt(x)/log x."""
    return d_qab(q, a, b).value / chargroup.euler_phi(q)


def table1(primitive: bool = False) -> dict[tuple[int, int], BiasConstant]:
    return {pair: c_qab(15, *pair, primitive=primitive) for pair in PUBLISHED_TABLE1}


def constants_report(q: int, pair: tuple[int, int] | None = None, omega: bool = False) -> dict:
    """JSON-ready summary used by the ``constants`` subcommand."""
    out = {
        "q": q,
        "K": landau_ramanujan(),
        "gamma_quarter": gamma_quarter(),
        "C_q": c_q(q),
        "characters": [],
    }
    for chi in real_characters(q):
        row = {"char_index": chi.index, "is_principal": chi.is_principal}
        if not chi.is_principal:
            row["L_half"] = l_value(chi, 0.5).value
            twist = chargroup.twist_by_chi_minus4(chi)
            if not twist.is_principal:
                row["L_half_twist"] = l_value(twist, 0.5).value
                a, resid = main_term_coefficient(q, chi)
                row["main_term_coefficient"] = a
                row["two_routes_residual"] = resid
        out["characters"].append(row)
    if pair is not None:
        a, b = pair
        if omega:
            out["D_qab"] = d_qab(q, a, b).as_dict()
        else:
            out["C_qab"] = c_qab(q, a, b).as_dict()
            out["C_qab_primitive"] = c_qab(q, a, b, primitive=True).as_dict()
            out["predicted_coefficient"] = predicted_coefficient(q, a, b)
    return out
