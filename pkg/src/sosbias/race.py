"""Prime-number-race style counts over arithmetic progressions.

For a weight w (the indicator of S, omega or Omega) the race between
residues a and b mod q tracks

    W(x; q, a) - W(x; q, b),   W(x; q, r) = sum_{n <= x, n = r mod q} w(n),

for every integer x in [1, N].  Several pairs over one modulus share a
single pass over the sieve blocks: per-residue running sums are built chunk
by chunk with a carry, and each pair's lead/tie/trail tallies are updated
from the chunk's difference array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import chargroup, constants
from .errors import DomainError
from .sieve import KIND_BIG_OMEGA, KIND_OMEGA, KIND_S, WEIGHTS, SieveBlock, iter_blocks

CHUNK = 1 << 21
DEFAULT_POINTS = 10_000

# Percentage of x <= 10^7 at which the first residue leads, modulus 15.
PUBLISHED_TABLE2 = {
    (1, 2): 93.99, (1, 7): 99.99, (1, 8): 86.12, (1, 11): 99.98, (1, 13): 99.99, (1, 14): 99.99,
    (4, 2): 96.28, (4, 7): 99.97, (4, 8): 90.72, (4, 11): 99.99, (4, 13): 99.99, (4, 14): 99.96,
    (2, 7): 99.90, (2, 11): 99.85, (2, 13): 99.93, (2, 14): 99.90,
    (7, 8): 0.03, (7, 11): 57.99, (7, 14): 57.99,
    (8, 11): 99.52, (8, 13): 99.96, (8, 14): 99.99,
    (11, 13): 40.19,
    (13, 14): 59.23,
}
TABLE2_N = 10**7
# Published lead densities for q = 5 at 10^7 (quadratic a vs non-quadratic b).
PUBLISHED_Q5 = {(1, 2): 0.961, (1, 3): 0.952, (4, 2): 0.953, (4, 3): 0.946}
# Published lead density of S(x;3,1) over S(x;3,2) up to 10^8.
PUBLISHED_Q3 = 0.968

_KIND_OF = {"indicator_S": KIND_S, "omega": KIND_OMEGA, "big_omega": KIND_BIG_OMEGA}


@dataclass
class RaceSeries:
    """One race sampled at checkpoints, with exact tallies over all x in [1, N]."""

    q: int
    a: int
    b: int
    weight: str
    N: int
    checkpoints: np.ndarray
    count_a: np.ndarray
    count_b: np.ndarray
    lead_count: int = 0
    tie_count: int = 0
    trail_count: int = 0

    @property
    def diff(self) -> np.ndarray:
        return self.count_a - self.count_b

    @property
    def lead_density(self) -> float:
        return self.lead_count / self.N

    @property
    def tie_density(self) -> float:
        return self.tie_count / self.N

    def summary(self) -> dict:
        return {
            "q": self.q,
            "a": self.a,
            "b": self.b,
            "weight": self.weight,
            "N": self.N,
            "lead_count": self.lead_count,
            "tie_count": self.tie_count,
            "trail_count": self.trail_count,
            "lead_density": self.lead_density,
            "tie_density": self.tie_density,
            "final_count_a": int(self.count_a[-1]),
            "final_count_b": int(self.count_b[-1]),
        }


def leads_when_larger(weight: str) -> bool:
    """S and Omega races favour a when W(x;q,a) > W(x;q,b); omega races the opposite way."""
    if weight not in WEIGHTS:
        raise DomainError(f"unknown weight {weight!r}; expected one of {WEIGHTS}")
    return weight != "omega"


def validate_pair(q: int, a: int, b: int, weight: str) -> tuple[int, int]:
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise DomainError(f"modulus must be a positive integer, got {q!r}")
    a, b = int(a) % q, int(b) % q
    for r in (a, b):
        if math.gcd(r, q) != 1:
            raise DomainError(f"residue {r} is not coprime to {q}")
    if weight == "indicator_S" and q % 4 == 0:
        for r in (a, b):
            if r % 4 != 1:
                raise DomainError(f"residue {r} mod {q} is 3 mod 4, which S never meets")
    return a, b


def checkpoint_grid(N: int, stride: int | None = None, points: int = DEFAULT_POINTS) -> np.ndarray:
    """Multiples of the stride up to N, always ending at N."""
    if N < 1:
        raise DomainError("N must be positive")
    if stride is None:
        stride = max(1, N // points)
    if stride < 1:
        raise DomainError("stride must be positive")
    grid = np.arange(stride, N + 1, stride, dtype=np.int64)
    if grid.size == 0 or grid[-1] != N:
        grid = np.append(grid, np.int64(N))
    return grid


def run_races(
    q: int,
    pairs: Sequence[tuple[int, int]],
    N: int,
    weight: str = "indicator_S",
    checkpoints: np.ndarray | None = None,
    stride: int | None = None,
    blocks: Iterable[SieveBlock] | None = None,
    **sieve_kwargs,
) -> list[RaceSeries]:
    """Run every pair mod q over x in [1, N] in one pass over the sieve output."""
    larger = leads_when_larger(weight)
    pairs = [validate_pair(q, a, b, weight) for a, b in pairs]
    if not pairs:
        raise DomainError("no pairs to race")
    if N < 1:
        raise DomainError("N must be positive")
    grid = checkpoint_grid(N, stride) if checkpoints is None else np.asarray(checkpoints, dtype=np.int64)
    if grid.size and (grid.min() < 1 or grid.max() > N):
        raise DomainError("checkpoints must lie in [1, N]")

    residues = sorted({r for p in pairs for r in p})
    carry = {r: 0 for r in residues}
    sampled = {r: np.zeros(grid.size, dtype=np.int64) for r in residues}
    tallies = [[0, 0, 0] for _ in pairs]  # lead, tie, trail

    if blocks is None:
        blocks = iter_blocks(N, _KIND_OF[weight], **sieve_kwargs)
    covered = 0
    for block in blocks:
        if block.lo > N:
            break
        if block.lo != covered + 1:
            raise DomainError(f"sieve blocks are not contiguous at {block.lo}")
        hi = min(block.hi, N + 1)
        values = block.weight(weight)[: hi - block.lo]
        for start in range(0, hi - block.lo, CHUNK):
            w = values[start : start + CHUNK].astype(np.int64)
            n0 = block.lo + start
            r = np.arange(n0 % q, n0 % q + w.size, dtype=np.int64) % q
            cums = {}
            for c in residues:
                run = np.cumsum(np.where(r == c, w, 0))
                run += carry[c]
                cums[c] = run
                carry[c] = int(run[-1])
            lo_i, hi_i = np.searchsorted(grid, [n0, n0 + w.size])
            if hi_i > lo_i:
                idx = grid[lo_i:hi_i] - n0
                for c in residues:
                    sampled[c][lo_i:hi_i] = cums[c][idx]
            for t, (a, b) in zip(tallies, pairs):
                d = cums[a] - cums[b]
                pos = int(np.count_nonzero(d > 0))
                neg = int(np.count_nonzero(d < 0))
                t[0] += pos if larger else neg
                t[2] += neg if larger else pos
                t[1] += d.size - pos - neg
        covered = hi - 1
        if covered >= N:
            break
    if covered < N:
        raise DomainError(f"sieve blocks end at {covered}, short of N = {N}")

    return [
        RaceSeries(q, a, b, weight, N, grid, sampled[a], sampled[b], *t)
        for (a, b), t in zip(pairs, tallies)
    ]


def run_race(q: int, a: int, b: int, N: int, weight: str = "indicator_S", **kwargs) -> RaceSeries:
    return run_races(q, [(a, b)], N, weight, **kwargs)[0]


def table2_pairs() -> list[tuple[int, int]]:
    """The 24 printed pairs: units mod 15 in the printed order, skipping pairs whose ratio is a square."""
    order = (1, 4, 2, 7, 8, 11, 13, 14)
    out = []
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            ratio = a * pow(b, -1, 15) % 15
            if not chargroup.is_quadratic_residue(ratio, 15):
                out.append((a, b))
    return out


def table2(N: int = TABLE2_N, **kwargs) -> dict[tuple[int, int], float]:
    """Lead percentage of each printed mod-15 pair over x <= N."""
    pairs = table2_pairs()
    series = run_races(15, pairs, N, "indicator_S", checkpoints=np.array([N]), **kwargs)
    return {(s.a, s.b): 100.0 * s.lead_density for s in series}


def figure3_series(N: int = 10**8, stride: int | None = None, **kwargs) -> RaceSeries:
    """S(x;3,1) - S(x;3,2) sampled on a regular grid."""
    return run_race(3, 1, 2, N, "indicator_S", stride=stride, **kwargs)


# ---------------------------------------------------------------- main term


def main_term_shape(weight: str, x: np.ndarray) -> np.ndarray:
    """sqrt(x)/(log x)^(3/4) for S, sqrt(x)/log x for omega and Omega (x > 1)."""
    x = np.asarray(x, dtype=float)
    logx = np.log(x)
    if weight == "indicator_S":
        return np.sqrt(x) / logx**0.75
    return np.sqrt(x) / logx


def predicted_coefficient(q: int, a: int, b: int, weight: str) -> float:
    """Coefficient kappa with W(x;q,a) - W(x;q,b) ~ kappa * main_term_shape(x)."""
    if weight == "indicator_S":
        return constants.predicted_coefficient(q, a, b)
    coef = constants.omega_coefficient(q, a, b)
    return -coef if weight == "omega" else coef


@dataclass
class BiasReport:
    summary: dict
    predicted_coefficient: float
    fitted_coefficient: float
    normalized_final_diff: float
    windows: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            **self.summary,
            "predicted_coefficient": self.predicted_coefficient,
            "fitted_coefficient": self.fitted_coefficient,
            "normalized_final_diff": self.normalized_final_diff,
            "windows": self.windows,
        }


def predicted_main_term(series: RaceSeries, coefficient: float | None = None) -> np.ndarray:
    if coefficient is None:
        coefficient = predicted_coefficient(series.q, series.a, series.b, series.weight)
    x = series.checkpoints
    out = np.zeros(x.size)
    big = x > 1
    out[big] = coefficient * main_term_shape(series.weight, x[big])
    return out


def main_term_fit(series: RaceSeries, n_windows: int = 6) -> BiasReport:
    """Compare a sampled race with its predicted main term.

    Windows are dyadic, [N/2^(j+1), N/2^j] for j = 0..n_windows-1.  Inside
    each, e(x) = (diff - main) / shape is averaged in absolute value and in
    square, and the mean of E(x)^2 = (diff - main)^2 (an estimate of
    (1/X) int_X^{2X} |E|^2 on the regular grid) is divided by X/(log X)^(5/2).
    The fitted coefficient is a least-squares fit of diff against the shape
    over the top six windows, reported only as a diagnostic.
    """
    kappa = predicted_coefficient(series.q, series.a, series.b, series.weight)
    x = series.checkpoints.astype(float)
    diff = series.diff.astype(float)
    keep = x > 1
    x, diff = x[keep], diff[keep]
    shape = main_term_shape(series.weight, x)
    err = diff - kappa * shape
    e = err / shape

    windows = []
    N = series.N
    for j in range(n_windows):
        lo, hi = N / 2 ** (j + 1), N / 2**j
        sel = (x >= lo) & (x <= hi)
        if not sel.any():
            continue
        X = max(lo, 2.0)
        windows.append(
            {
                "j": j,
                "lo": lo,
                "hi": hi,
                "points": int(sel.sum()),
                "mean_abs_e": float(np.mean(np.abs(e[sel]))),
                "mean_sq_e": float(np.mean(e[sel] ** 2)),
                "mean_sq_E_over_scale": float(np.mean(err[sel] ** 2) / (X / math.log(X) ** 2.5)),
            }
        )

    fit = x >= N / 2**n_windows
    fitted = float(np.dot(diff[fit], shape[fit]) / np.dot(shape[fit], shape[fit])) if fit.any() else float("nan")
    final = float(diff[-1] / shape[-1]) if x.size and x[-1] == N else float("nan")
    return BiasReport(series.summary(), kappa, fitted, final, windows)


def series_rows(series: RaceSeries, coefficient: float | None = None):
    """CSV rows (x, count_a, count_b, diff, predicted_main_term, residual)."""
    main = predicted_main_term(series, coefficient)
    for x, ca, cb, m in zip(series.checkpoints.tolist(), series.count_a.tolist(), series.count_b.tolist(), main.tolist()):
        d = ca - cb
        yield (x, ca, cb, d, f"{m:.6f}", f"{d - m:.6f}")


def brute_force_counts(q: int, a: int, b: int, N: int, weight: str = "indicator_S") -> tuple[int, int, int, np.ndarray]:
    """Pure-Python reference for small N: (lead, tie, trail, diff at every x)."""
    larger = leads_when_larger(weight)
    a, b = validate_pair(q, a, b, weight)
    squares = set()
    if weight == "indicator_S":
        r = 0
        while r * r <= N:
            s = r
            while r * r + s * s <= N:
                squares.add(r * r + s * s)
                s += 1
            r += 1

    def w(n: int) -> int:
        if weight == "indicator_S":
            return int(n in squares)
        fac = chargroup.factorize(n)
        return len(fac) if weight == "omega" else sum(e for _, e in fac)

    ca = cb = 0
    lead = tie = trail = 0
    diffs = np.zeros(N + 1, dtype=np.int64)
    for n in range(1, N + 1):
        if n % q == a:
            ca += w(n)
        elif n % q == b:
            cb += w(n)
        d = ca - cb
        diffs[n] = d
        if d == 0:
            tie += 1
        elif (d > 0) == larger:
            lead += 1
        else:
            trail += 1
    return lead, tie, trail, diffs
