"""Dirichlet characters modulo q, stored exactly.

A character is a table over residues 0..q-1.  Each entry is either ``None``
(gcd(n, q) > 1) or an integer exponent e, meaning the value exp(2*pi*i*e/m)
for the character's own order m.  Tables are normalised so that m is the
true order of the character, which makes structural equality meaningful
across constructions (group enumeration, twists, lifts, products).

Groups are built by CRT over prime-power factors: primitive roots for odd
prime powers, <-1> x <5> for 2^e with e >= 3.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidModulusError

ZERO = None


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorisation, ascending primes."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    phi = n
    for p, _ in factorize(n):
        phi -= phi // p
    return phi


def _lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def _normalise(values: Sequence[Fraction | None]) -> tuple[int, tuple[int | None, ...]]:
    """Turn a table of rotations (fractions of a full turn) into (order, exponents)."""
    order = 1
    for v in values:
        if v is not None:
            order = _lcm(order, (v % 1).denominator)
    exps = tuple(None if v is None else int((v % 1) * order) for v in values)
    return order, exps


@dataclass(frozen=True)
class Character:
    modulus: int
    order: int
    values: tuple[int | None, ...]
    index: int = field(default=-1, compare=False)

    @property
    def group_order(self) -> int:
        return euler_phi(self.modulus)

    @property
    def is_principal(self) -> bool:
        return self.order == 1

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    @property
    def id(self) -> tuple[int, int]:
        return (self.modulus, self.index)

    def rotation(self, n: int) -> Fraction | None:
        """Value at n as a fraction of a full turn, or None."""
        e = self.values[n % self.modulus]
        return None if e is None else Fraction(e, self.order)

    def __call__(self, n: int):
        e = self.values[n % self.modulus]
        if e is None:
            return 0
        if self.order <= 2:
            return 1 if e == 0 else -1
        return cmath.exp(2j * math.pi * e / self.order)

    @cached_property
    def real_table(self) -> np.ndarray:
        """int8 table of +1/-1/0 over residues; only for real characters."""
        if not self.is_real:
            raise DomainError("real_table requested for a non-real character")
        return np.array([0 if e is None else (1 if e == 0 else -1) for e in self.values], dtype=np.int8)

    @cached_property
    def complex_table(self) -> np.ndarray:
        return np.array([self(n) for n in range(self.modulus)], dtype=complex)

    def __repr__(self) -> str:
        kind = "principal" if self.is_principal else ("real" if self.is_real else f"order {self.order}")
        return f"Character(mod {self.modulus}, #{self.index}, {kind})"


def evaluate(chi: Character, n: int):
    return chi(n)


def character_from_rotations(modulus: int, rotations: Sequence[Fraction | None]) -> Character:
    order, exps = _normalise(rotations)
    chi = Character(modulus, order, exps)
    return _with_index(chi)


def _with_index(chi: Character) -> Character:
    grp = build_group(chi.modulus)
    idx = grp.index_of(chi)
    return Character(chi.modulus, chi.order, chi.values, idx)


@dataclass(frozen=True)
class CharacterGroup:
    modulus: int
    characters: tuple[Character, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i: int) -> Character:
        return self.characters[i]

    @cached_property
    def _lookup(self) -> dict:
        return {(c.order, c.values): c.index for c in self.characters}

    def index_of(self, chi: Character) -> int:
        try:
            return self._lookup[(chi.order, chi.values)]
        except KeyError:
            raise DomainError(f"{chi!r} is not a character mod {self.modulus}") from None

    @property
    def principal(self) -> Character:
        return self.characters[0]


def _unit_group_components(q: int) -> list[tuple[int, dict[int, int], int]]:
    """Cyclic factors of (Z/qZ)^* as (prime-power modulus, discrete-log table, cyclic order)."""
    comps = []
    for p, e in factorize(q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                comps.append((4, {1: 0, 3: 1}, 2))
                continue
            half = 2 ** (e - 2)
            log_minus, log_five = {}, {}
            for i in range(2):
                for j in range(half):
                    u = (pow(-1, i) * pow(5, j, pe)) % pe
                    log_minus[u] = i
                    log_five[u] = j
            comps.append((pe, log_minus, 2))
            comps.append((pe, log_five, half))
        else:
            g = primitive_root(pe)
            phi = pe - pe // p
            log = {}
            x = 1
            for k in range(phi):
                log[x] = k
                x = x * g % pe
            comps.append((pe, log, phi))
    return comps


def primitive_root(pe: int) -> int:
    """Smallest primitive root modulo an odd prime power."""
    p = factorize(pe)[0][0]
    phi = pe - pe // p
    qs = [r for r, _ in factorize(phi)]
    for g in range(2, pe):
        if math.gcd(g, pe) == 1 and all(pow(g, phi // r, pe) != 1 for r in qs):
            return g
    raise DomainError(f"no primitive root mod {pe}")


@lru_cache(maxsize=256)
def build_group(q: int) -> CharacterGroup:
    """All phi(q) Dirichlet characters mod q, canonically ordered."""
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise InvalidModulusError(f"modulus must be a positive integer, got {q!r}")
    q = int(q)
    comps = _unit_group_components(q)
    units = [n for n in range(q) if math.gcd(n, q) == 1]
    # logs[n] = tuple of discrete logs of n in each cyclic component
    logs = {n: tuple(log[n % m] for m, log, _ in comps) for n in units}

    tables = []
    for ks in itertools.product(*(range(s) for _, _, s in comps)):
        rot = [None] * q
        for n in units:
            rot[n] = sum((Fraction(k * l, s) for k, l, (_, _, s) in zip(ks, logs[n], comps)), Fraction(0))
        tables.append(rot)

    tables.sort(key=lambda rot: tuple(r % 1 for r in rot if r is not None))
    chars = []
    for i, rot in enumerate(tables):
        order, exps = _normalise(rot)
        chars.append(Character(q, order, exps, i))
    return CharacterGroup(q, tuple(chars))


def real_characters(q: int) -> list[Character]:
    return [c for c in build_group(q) if c.is_real]


def chi_minus4() -> Character:
    return build_group(4)[1]


def principal(q: int) -> Character:
    return build_group(q).principal


def lift(chi: Character, modulus: int) -> Character:
    """The character mod ``modulus`` (a multiple of chi.modulus) induced by chi."""
    if modulus % chi.modulus:
        raise DomainError(f"cannot lift mod {chi.modulus} to mod {modulus}")
    rot = [None if math.gcd(n, modulus) > 1 else chi.rotation(n) for n in range(modulus)]
    return character_from_rotations(modulus, rot)


def multiply(chi: Character, psi: Character) -> Character:
    """Pointwise product, as a character mod lcm of the two moduli."""
    L = _lcm(chi.modulus, psi.modulus)
    rot = []
    for n in range(L):
        a, b = chi.rotation(n), psi.rotation(n)
        rot.append(None if a is None or b is None or math.gcd(n, L) > 1 else a + b)
    return character_from_rotations(L, rot)


def power(chi: Character, k: int) -> Character:
    rot = [None if e is None else Fraction(k * e, chi.order) for e in chi.values]
    return character_from_rotations(chi.modulus, rot)


def twist_by_chi_minus4(chi: Character) -> Character:
    return multiply(chi, chi_minus4())


def conductor(chi: Character) -> int:
    q = chi.modulus
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(chi.values[n] == 0 for n in range(1, q, d) if math.gcd(n, q) == 1):
            return d
    return q


def primitive(chi: Character) -> Character:
    """The primitive character inducing chi."""
    q = chi.modulus
    f = conductor(chi)
    rot = []
    for r in range(f):
        if math.gcd(r, f) > 1:
            rot.append(None)
            continue
        n = next(n for n in range(r, q + f, f) if math.gcd(n, q) == 1)
        rot.append(chi.rotation(n))
    return character_from_rotations(f, rot)


def is_quadratic_residue(a: int, q: int) -> bool:
    """True iff a is a square unit mod q (every real character is 1 at a)."""
    if q < 1:
        raise InvalidModulusError(f"modulus must be positive, got {q}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"gcd({a}, {q}) > 1")
    return all(chi(a) == 1 for chi in real_characters(q))


def orthogonality_counts(chi: Character, psi: Character) -> dict[Fraction, int]:
    """Multiset of rotations of chi * conj(psi) over the units mod q (exact)."""
    counts: dict[Fraction, int] = {}
    for n in range(chi.modulus):
        a, b = chi.rotation(n), psi.rotation(n)
        if a is None:
            continue
        r = (a - b) % 1
        counts[r] = counts.get(r, 0) + 1
    return counts


def character_table_rows(q: int) -> Iterable[tuple]:
    """Rows (char_index, residue, value_re, value_im, is_real, is_principal)."""
    for chi in build_group(q):
        for n in range(q):
            v = complex(chi(n))
            yield (chi.index, n, v.real, v.imag, chi.is_real, chi.is_principal)
