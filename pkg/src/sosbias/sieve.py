"""Segmented sieves for membership in S and for omega / Omega.

S is the set of n >= 1 with n = a^2 + b^2, a, b >= 0 (0^2 allowed, so
perfect squares are in S).  Two independent routes produce the indicator:

* lattice marking of a^2 + b^2 over the window (production path);
* the multiplicative test: every prime p = 3 mod 4 divides n to an even
  power (validation oracle).

omega and Omega come from a pass over base primes up to sqrt(hi): each
prime power p^k adds 1 to Omega on its multiples, p itself adds 1 to omega,
and whatever cofactor remains after removing small primes is a single
large prime.

Blocks are cached on disk in a small checksummed binary format.
"""

from __future__ import annotations

import logging
import math
import os
import struct
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import CacheChecksumError, CacheError, CacheTruncatedError, CacheVersionError, DomainError, ResourceError

log = logging.getLogger(__name__)

DEFAULT_SEGMENT = 1 << 24
MAX_BLOCK = 1 << 28
CACHE_ENV = "SOSBIAS_CACHE_DIR"

KIND_S = 1
KIND_OMEGA = 2
KIND_BIG_OMEGA = 4
KIND_ALL = KIND_S | KIND_OMEGA | KIND_BIG_OMEGA

MAGIC = b"S2SQ"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sBBHQQ")
_TRAILER = struct.Struct("<I")

WEIGHTS = ("indicator_S", "omega", "big_omega")


@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """Primes <= limit (simple sieve)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _check_range(lo: int, hi: int) -> None:
    if not 1 <= lo < hi:
        raise DomainError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > MAX_BLOCK:
        raise ResourceError(f"window of {hi - lo} exceeds the block budget {MAX_BLOCK}")


def sieve_two_squares_lattice(lo: int, hi: int) -> np.ndarray:
    """Boolean flags over [lo, hi): n = a^2 + b^2 with 0 <= a <= b."""
    _check_range(lo, hi)
    out = np.zeros(hi - lo, dtype=bool)
    top = hi - 1
    a = 0
    while 2 * a * a <= top:
        a2 = a * a
        b_lo = a
        if lo > a2 + a * a:
            r = math.isqrt(lo - a2 - 1) + 1  # ceil(sqrt(lo - a2))
            b_lo = max(a, r)
        b_hi = math.isqrt(top - a2)
        if b_lo <= b_hi:
            b = np.arange(b_lo, b_hi + 1, dtype=np.int64)
            out[a2 + b * b - lo] = True
        a += 1
    return out


def _prime_power_pass(lo: int, hi: int, want_s: bool, want_additive: bool):
    """One sweep over base primes; returns (in_s, omega, big_omega) as requested."""
    size = hi - lo
    n = np.arange(lo, hi, dtype=np.int64)
    smooth = np.ones(size, dtype=np.int64)
    # number of primes p = 3 mod 4 with odd exponent: +1 on p^k multiples for odd k, -1 for even k
    odd3 = np.zeros(size, dtype=np.int8) if want_s else None
    omega = np.zeros(size, dtype=np.uint8) if want_additive else None
    big = np.zeros(size, dtype=np.uint8) if want_additive else None
    for p in base_primes(math.isqrt(hi - 1)).tolist():
        pk, k = p, 1
        while pk < hi:
            st = (-lo) % pk
            if st < size:
                smooth[st::pk] *= p
                if odd3 is not None and p % 4 == 3:
                    odd3[st::pk] += 1 if k % 2 else -1
                if want_additive:
                    big[st::pk] += 1
                    if pk == p:
                        omega[st::pk] += 1
            pk *= p
            k += 1
    large = n // smooth  # 1 or a prime above sqrt(hi - 1)
    in_s = None
    if want_s:
        in_s = (odd3 == 0) & (large % 4 != 3)
    if want_additive:
        has_large = large > 1
        omega += has_large
        big += has_large
    return in_s, omega, big


def sieve_two_squares_multiplicative(lo: int, hi: int) -> np.ndarray:
    """Boolean flags over [lo, hi): no prime = 3 mod 4 divides n to an odd power."""
    _check_range(lo, hi)
    return _prime_power_pass(lo, hi, True, False)[0]


def sieve_additive(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """(omega, Omega) over [lo, hi) as uint8 tables."""
    _check_range(lo, hi)
    _, omega, big = _prime_power_pass(lo, hi, False, True)
    return omega, big


@dataclass
class SieveBlock:
    lo: int
    hi: int
    in_s: np.ndarray | None = None  # packed little-endian bits
    omega: np.ndarray | None = None
    big_omega: np.ndarray | None = None
    source: str = field(default="computed", compare=False)

    def __len__(self) -> int:
        return self.hi - self.lo

    @property
    def kinds(self) -> int:
        return (
            (KIND_S if self.in_s is not None else 0)
            | (KIND_OMEGA if self.omega is not None else 0)
            | (KIND_BIG_OMEGA if self.big_omega is not None else 0)
        )

    def s_mask(self) -> np.ndarray:
        if self.in_s is None:
            raise ResourceError(f"block [{self.lo}, {self.hi}) has no S data")
        return np.unpackbits(self.in_s, count=len(self), bitorder="little").view(bool)

    def weight(self, kind: str) -> np.ndarray:
        if kind == "indicator_S":
            return self.s_mask()
        table = {"omega": self.omega, "big_omega": self.big_omega}.get(kind, ...)
        if table is ...:
            raise DomainError(f"unknown weight {kind!r}")
        if table is None:
            raise ResourceError(f"block [{self.lo}, {self.hi}) has no {kind} data")
        return table

    def equals(self, other: "SieveBlock") -> bool:
        def same(x, y):
            return (x is None and y is None) or (x is not None and y is not None and np.array_equal(x, y))

        return (
            self.lo == other.lo
            and self.hi == other.hi
            and same(self.in_s, other.in_s)
            and same(self.omega, other.omega)
            and same(self.big_omega, other.big_omega)
        )


def make_block(lo: int, hi: int, kinds: int = KIND_ALL) -> SieveBlock:
    _check_range(lo, hi)
    block = SieveBlock(lo, hi)
    if kinds & KIND_S:
        block.in_s = np.packbits(sieve_two_squares_lattice(lo, hi), bitorder="little")
    if kinds & (KIND_OMEGA | KIND_BIG_OMEGA):
        omega, big = sieve_additive(lo, hi)
        if kinds & KIND_OMEGA:
            block.omega = omega
        if kinds & KIND_BIG_OMEGA:
            block.big_omega = big
    return block


def count_by_residue(block: SieveBlock, q: int, weight: str = "indicator_S") -> np.ndarray:
    """Totals of the weight over each residue class mod q, as int64 of length q."""
    w = block.weight(weight)
    r = (np.arange(len(block), dtype=np.int64) + block.lo % q) % q
    if weight == "indicator_S":
        return np.bincount(r[w], minlength=q).astype(np.int64)
    return np.bincount(r, weights=w, minlength=q).astype(np.int64)


# --- disk cache ---------------------------------------------------------------


def cache_store(block: SieveBlock, path: str | os.PathLike) -> None:
    path = Path(path)
    parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, block.kinds, 0, block.lo, block.hi)]
    if block.in_s is not None:
        parts.append(block.in_s.astype(np.uint8).tobytes())
    if block.omega is not None:
        parts.append(block.omega.astype(np.uint8).tobytes())
    if block.big_omega is not None:
        parts.append(block.big_omega.astype(np.uint8).tobytes())
    body = b"".join(parts)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(body)
            fh.write(_TRAILER.pack(zlib.crc32(body)))
        os.replace(tmp, path)
    except OSError as exc:
        raise ResourceError(f"cannot write cache file {path}: {exc}") from exc


def cache_load(path: str | os.PathLike) -> SieveBlock:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CacheTruncatedError(f"{path}: file shorter than header")
    magic, version, kinds, _, lo, hi = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CacheVersionError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    size = hi - lo
    lengths = []
    if kinds & KIND_S:
        lengths.append(("in_s", (size + 7) // 8))
    if kinds & KIND_OMEGA:
        lengths.append(("omega", size))
    if kinds & KIND_BIG_OMEGA:
        lengths.append(("big_omega", size))
    body_len = _HEADER.size + sum(n for _, n in lengths)
    if len(data) < body_len + _TRAILER.size:
        raise CacheTruncatedError(f"{path}: expected {body_len + _TRAILER.size} bytes, found {len(data)}")
    (crc,) = _TRAILER.unpack_from(data, body_len)
    if zlib.crc32(data[:body_len]) != crc:
        raise CacheChecksumError(f"{path}: checksum mismatch")
    block = SieveBlock(lo, hi, source="cache")
    off = _HEADER.size
    for name, n in lengths:
        setattr(block, name, np.frombuffer(data, dtype=np.uint8, count=n, offset=off).copy())
        off += n
    return block


def default_cache_dir() -> Path | None:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def _cache_path(cache_dir: Path, lo: int, hi: int) -> Path:
    return cache_dir / f"s2sq_{lo}_{hi}.bin"


def _build(args: tuple[int, int, int]) -> SieveBlock:
    return make_block(*args)


@dataclass
class SieveStats:
    computed: int = 0
    loaded: int = 0
    seconds: float = 0.0


def segments(limit: int, segment: int = DEFAULT_SEGMENT) -> list[tuple[int, int]]:
    """Half-open windows covering 1..limit inclusive."""
    if limit < 1 or segment < 1:
        raise DomainError("limit and segment must be positive")
    return [(lo, min(lo + segment, limit + 1)) for lo in range(1, limit + 1, segment)]


def iter_blocks(
    limit: int,
    kinds: int = KIND_S,
    segment: int = DEFAULT_SEGMENT,
    workers: int | None = None,
    cache_dir: str | os.PathLike | None = None,
    stats: SieveStats | None = None,
) -> Iterator[SieveBlock]:
    """Yield populated blocks covering [1, limit] in ascending order.

    Cached blocks are reused when they carry every requested kind; missing
    blocks are computed (by a process pool when workers > 1) and stored.
    """
    stats = stats if stats is not None else SieveStats()
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    if cache is not None:
        try:
            cache.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ResourceError(f"cannot create cache directory {cache}: {exc}") from exc
    windows = segments(limit, segment)
    ready: dict[int, SieveBlock] = {}
    todo = []
    for lo, hi in windows:
        block = None
        if cache is not None and _cache_path(cache, lo, hi).exists():
            try:
                block = cache_load(_cache_path(cache, lo, hi))
            except CacheError as exc:
                log.warning("discarding cache file: %s", exc)
            if block is not None and block.kinds & kinds != kinds:
                kinds_needed = kinds | block.kinds
                todo.append((lo, hi, kinds_needed))
                block = None
        if block is not None:
            ready[lo] = block
        elif not any(t[0] == lo for t in todo):
            todo.append((lo, hi, kinds))

    workers = workers or os.cpu_count() or 1
    t0 = time.perf_counter()
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            built = iter(pool.map(_build, todo))
            yield from _emit(windows, ready, todo, built, cache, stats, t0)
    else:
        built = (_build(t) for t in todo)
        yield from _emit(windows, ready, todo, built, cache, stats, t0)


def _emit(windows, ready, todo, built, cache, stats, t0):
    pending = {t[0] for t in todo}
    for lo, hi in windows:
        if lo in pending:
            block = next(built)
            stats.computed += 1
            stats.seconds = time.perf_counter() - t0
            if cache is not None:
                cache_store(block, _cache_path(cache, lo, hi))
        else:
            block = ready.pop(lo)
            stats.loaded += 1
        yield block


def sieve(limit: int, kinds: int = KIND_S, **kwargs) -> list[SieveBlock]:
    return list(iter_blocks(limit, kinds, **kwargs))


def verify_dual(lo: int, hi: int) -> bool:
    """Lattice and multiplicative indicators agree on [lo, hi)."""
    return bool(np.array_equal(sieve_two_squares_lattice(lo, hi), sieve_two_squares_multiplicative(lo, hi)))
