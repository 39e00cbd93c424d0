import math
from fractions import Fraction

import mpmath
import pytest

from sosbias import chargroup, lfunc
from sosbias.chargroup import build_group
from sosbias.errors import DomainError, PoleError, PrecisionError
from sosbias.sieve import base_primes


def akiyama_tanigawa(n):
    """B_0..B_n (with B_1 = +1/2) by the Akiyama-Tanigawa algorithm."""
    out = []
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


def alternating_zeta(s, n=60):
    """zeta(s) from the alternating series, accelerated by Borwein's algorithm (no mpmath)."""
    d = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(n * math.factorial(n + i - 1) * 4**i, math.factorial(n - i) * math.factorial(2 * i))
        d.append(acc)
    total = math.fsum((-1) ** k * float(d[n] - d[k]) / (k + 1) ** s for k in range(n))
    return total / (float(d[n]) * (1 - 2 ** (1 - s)))


def test_bernoulli_table_matches_akiyama_tanigawa():
    ref = akiyama_tanigawa(32)
    assert lfunc.BERNOULLI_EVEN[0] == Fraction(1, 6)
    assert lfunc.BERNOULLI_EVEN[1] == Fraction(-1, 30)
    for k, b in enumerate(lfunc.BERNOULLI_EVEN, start=1):
        assert b == ref[2 * k]


@pytest.mark.parametrize(
    "s,a,expected",
    [(2.0, 1.0, math.pi**2 / 6), (2.0, 0.5, math.pi**2 / 2), (4.0, 1.0, math.pi**4 / 90)],
)
def test_hurwitz_closed_forms(s, a, expected):
    r = lfunc.hurwitz_zeta(s, a)
    assert abs(r.value - expected) <= r.error_bound + 1e-15
    assert r.error_bound <= lfunc.DEFAULT_TOL


def test_zeta_half_against_alternating_series():
    oracle = alternating_zeta(0.5)
    assert abs(oracle - (-1.4603545088095868)) < 1e-12
    r = lfunc.hurwitz_zeta(0.5, 1.0)
    assert abs(r.value - oracle) <= r.error_bound + 1e-13


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 1.5, 3.0, 10.0])
@pytest.mark.parametrize("a", [0.1, 0.5, 1.0])
def test_hurwitz_against_mpmath(s, a):
    ref = float(mpmath.zeta(s, a))
    # the tolerance is absolute, so scale it for values as large as 0.1^-10
    r = lfunc.hurwitz_zeta(s, a, tol=max(1e-12, 1e-14 * abs(ref)))
    assert abs(r.value - ref) <= r.error_bound + 1e-14 * max(1.0, abs(ref))


def test_hurwitz_errors():
    with pytest.raises(PoleError):
        lfunc.hurwitz_zeta(1.0, 0.5)
    with pytest.raises(DomainError):
        lfunc.hurwitz_zeta(-1.0, 0.5)
    with pytest.raises(DomainError):
        lfunc.hurwitz_zeta(2.0, 1.5)
    with pytest.raises(PrecisionError):
        lfunc.hurwitz_zeta(2.0, 0.5, tol=1e-16)


@pytest.mark.parametrize(
    "q,idx,twist,expected",
    [(3, 1, False, 0.480), (3, 1, True, 0.498), (5, 2, False, 0.231), (5, 2, True, 1.679)],
)
def test_published_half_values(q, idx, twist, expected):
    chi = build_group(q)[idx]
    assert chi.is_real and not chi.is_principal
    if twist:
        chi = chargroup.twist_by_chi_minus4(chi)
    assert abs(lfunc.l_value(chi, 0.5).value - expected) <= 0.001


def _mpmath_l(chi, s):
    q = chi.modulus
    if s == 1:
        # L(1, chi) = -(1/q) sum chi(a) psi(a/q) for non-principal chi
        return float(-sum(chi(a) * mpmath.digamma(mpmath.mpf(a) / q) for a in range(1, q) if chi(a)) / q)
    return float(sum(chi(a) * mpmath.zeta(s, mpmath.mpf(a) / q) for a in range(1, q + 1) if chi(a)) / mpmath.mpf(q) ** s)


@pytest.mark.parametrize("q", [3, 4, 5, 8, 12, 15, 20])
@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_real_l_values_against_mpmath(q, s):
    for chi in chargroup.real_characters(q):
        if chi.is_principal:
            continue
        r = lfunc.l_value(chi, s)
        assert isinstance(r.value, float)
        assert abs(r.value - _mpmath_l(chi, s)) <= r.error_bound + 1e-13


def test_complex_character_value():
    chi = next(c for c in build_group(5) if not c.is_real)
    r = lfunc.l_value(chi, 0.5)
    ref = complex(sum(complex(chi(a)) * complex(mpmath.zeta(0.5, a / 5)) for a in range(1, 5)) / 5**0.5)
    assert abs(r.value - ref) < 1e-9


def test_l_one_chi_minus4():
    r = lfunc.l_value(chargroup.chi_minus4(), 1.0)
    assert abs(r.value - math.pi / 4) <= r.error_bound + 1e-15


def test_principal_pole():
    with pytest.raises(PoleError):
        lfunc.l_value(chargroup.principal(5), 1.0)


@pytest.mark.parametrize("s", [0.5, 2.0, 4.0, 8.0])
def test_hurwitz_equals_principal_mod1(s):
    a = lfunc.hurwitz_zeta(s, 1.0).value
    b = lfunc.l_value(chargroup.principal(1), s).value
    assert abs(a - b) < 1e-12


@pytest.mark.parametrize("s", [0.5, 2.0])
def test_lift_relation(s):
    chi = build_group(3)[1]
    lifted = chargroup.lift(chi, 15)
    expected = lfunc.l_value(chi, s).value * (1 - chi(5) * 5**-s)
    assert abs(lfunc.l_value(lifted, s).value - expected) < 1e-10


def test_large_power_of_two_stays_finite():
    chi = chargroup.chi_minus4()
    for k in range(1, 13):
        v = lfunc.l_value(chi, 2.0**k).value
        assert math.isfinite(v) and abs(v - 1) <= 3.0 ** -(2**k) * 1.01 + 1e-15


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 12, 15, 20])
def test_euler_product_consistency(q):
    primes = base_primes(10**5).tolist()
    tail = 1.0 / 10**5  # sum_{n > 10^5} n^-2 < 1/10^5
    for chi in chargroup.real_characters(q):
        prod = 1.0
        for p in primes:
            prod *= lfunc.euler_factor(chi, p, 2.0)
        assert abs(prod - lfunc.l_value(chi, 2.0).value) <= 2 * tail


def test_l_half_product_values():
    assert abs(lfunc.l_half_product(build_group(3)[1]) - math.sqrt(0.480 * 0.498)) < 0.002
    assert abs(lfunc.l_half_product(build_group(5)[2]) - math.sqrt(0.231 * 1.679)) < 0.003
    with pytest.raises(DomainError):
        lfunc.l_half_product(chargroup.principal(1))


def test_euler_factor_examples():
    one = chargroup.principal(1)
    assert lfunc.euler_factor(one, 2, 2.0) == pytest.approx(4 / 3, abs=1e-15)
    assert lfunc.euler_factor(one, 3, 2.0, f_local=True) == pytest.approx(81 / 80, abs=1e-15)
    assert lfunc.euler_factor(chargroup.chi_minus4(), 3, 1.0) == pytest.approx(3 / 4, abs=1e-15)
    with pytest.raises(DomainError):
        lfunc.euler_factor(one, 9, 2.0)
