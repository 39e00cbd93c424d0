"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting.  Run just this module with ``pytest tests/test_acceptance.py -v``;
add ``--run-long`` for the N = 10^8 check.
"""

import itertools
import math
import random
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from sosbias import chargroup, constants, lfunc, race, sieve
from sosbias.chargroup import build_group

N = 10**7


def record(tag, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _clear_caches():
    lfunc._l_value_cached.cache_clear()
    constants.landau_ramanujan.cache_clear()
    constants.gamma_quarter.cache_clear()


def test_ac01_l_values():
    _clear_caches()
    t0 = time.perf_counter()
    chi3, chi5 = build_group(3)[1], build_group(5)[2]
    got = {
        "L(1/2,chi3)": (lfunc.l_value(chi3, 0.5).value, 0.480),
        "L(1/2,chi3 chi-4)": (lfunc.l_value(chargroup.twist_by_chi_minus4(chi3), 0.5).value, 0.498),
        "L(1/2,chi5)": (lfunc.l_value(chi5, 0.5).value, 0.231),
        "L(1/2,chi5 chi-4)": (lfunc.l_value(chargroup.twist_by_chi_minus4(chi5), 0.5).value, 1.679),
    }
    dt = time.perf_counter() - t0
    ok = all(abs(v - e) <= 0.001 for v, e in got.values()) and dt < 1
    record("AC1 L-values", ok, ", ".join(f"{k}={v:.5f}" for k, (v, _) in got.items()) + f"; {dt:.2f}s")


def test_ac02_landau_ramanujan():
    _clear_caches()
    t0 = time.perf_counter()
    k = constants.landau_ramanujan(12)
    p = sieve.base_primes(10**6)
    p = p[p % 4 == 3].astype(float)
    oracle = math.exp(-0.5 * math.log(2) - 0.5 * float(np.sum(np.log1p(-(p**-2.0)))) + 1 / (4e6 * math.log(1e6)))
    dt = time.perf_counter() - t0
    ok = abs(k - 0.764) <= 0.001 and abs(k - oracle) < 1e-6 and dt < 5
    record("AC2 Landau-Ramanujan", ok, f"K={k:.12f}, prime-product oracle={oracle:.12f}, |diff|={abs(k - oracle):.1e}; {dt:.2f}s")


def test_ac03_table2():
    t0 = time.perf_counter()
    got = race.table2(N, cache_dir=None)
    dt = time.perf_counter() - t0
    worst = max(abs(got[p] - v) for p, v in race.PUBLISHED_TABLE2.items())
    rounded = sum(round(got[p], 2) == v for p, v in race.PUBLISHED_TABLE2.items())
    truncated = sum(math.floor(100 * got[p] + 1e-9) == round(100 * v) for p, v in race.PUBLISHED_TABLE2.items())
    ok = worst <= 0.05 and dt < 120
    record("AC3 Table 2", ok, f"{len(got)} entries, max |diff|={worst:.4f} pp; printed value equals truncation for "
                              f"{truncated}/24, rounding for {rounded}/24; {dt:.1f}s incl. sieving")


def test_ac04_q5_percentages(desk_blocks):
    series = race.run_races(5, list(race.PUBLISHED_Q5), N, checkpoints=[N], blocks=desk_blocks)
    diffs = {(s.a, s.b): 100 * s.lead_density - 100 * race.PUBLISHED_Q5[(s.a, s.b)] for s in series}
    ok = all(abs(d) <= 0.05 for d in diffs.values())
    detail = ", ".join(f"({s.a},{s.b}) {100 * s.lead_density:.3f}% vs {100 * race.PUBLISHED_Q5[(s.a, s.b)]:.1f}%"
                       for s in series)
    record("AC4 q=5 percentages", ok, detail)


def test_ac05_q3_desk_scale(desk_blocks):
    s = race.run_race(3, 1, 2, N, checkpoints=[N], blocks=desk_blocks)
    record("AC5 q=3 at 10^7", 0.90 <= s.lead_density < 1.0, f"lead density {s.lead_density:.6f}")


@pytest.mark.long
def test_ac05_q3_long_run():
    s = race.run_race(3, 1, 2, 10**8, checkpoints=[10**8], cache_dir=None)
    pct = 100 * s.lead_density
    record("AC5 q=3 at 10^8", abs(pct - 96.8) <= 0.1, f"lead {pct:.4f}% vs 96.8%")


def test_ac06_euler_identity():
    t0 = time.perf_counter()
    chars = [chargroup.principal(1), chargroup.chi_minus4(), build_group(3)[1]]
    worst = max(constants.verify_local_identity(p, 2.0, chi) for chi in chars for p in sieve.base_primes(100).tolist())
    dt = time.perf_counter() - t0
    record("AC6 Euler identity", worst < 1e-12 and dt < 1, f"max residual {worst:.2e} over p<=100; {dt:.3f}s")


def test_ac07_main_term_routes():
    res = {}
    for q in (3, 5):
        chi = next(c for c in chargroup.real_characters(q) if not c.is_principal)
        res[q] = constants.main_term_coefficient(q, chi)
    ok = all(r < 1e-6 for _, r in res.values())
    record("AC7 main-term routes", ok, ", ".join(f"q={q}: A={a:.10f} |A-B|={r:.1e}" for q, (a, r) in res.items()))


def test_ac08_dual_sieve():
    full = sieve.verify_dual(1, 10**6 + 1)
    rng = random.Random(8)
    windows = [rng.randrange(1, 10**8 - 10**4) for _ in range(100)]
    agree = sum(sieve.verify_dual(lo, lo + 10**4) for lo in windows)
    record("AC8 dual sieve", full and agree == 100, f"[1,10^6] {'identical' if full else 'DIFFER'}; {agree}/100 windows identical")


def test_ac09_sign_correlation(desk_blocks):
    tab1 = constants.table1()
    series = race.run_races(15, race.table2_pairs(), N, checkpoints=[N], blocks=desk_blocks)
    sign_ok = density_ok = checked = 0
    for s in series:
        c = tab1[(s.a, s.b)].value
        density_ok += (s.lead_density > 0.5) == (c > 0)
        if abs(c) > 1:
            checked += 1
            sign_ok += np.sign(s.diff[-1]) == np.sign(c)
    ok = sign_ok == checked and density_ok == len(series)
    record("AC9 sign correlation", ok,
           f"sign(diff(N))=sign(C) for {sign_ok}/{checked} pairs with |C|>1; density>50% iff C>0 for {density_ok}/{len(series)}")


def test_ac10_martin(desk_blocks):
    dens = {w: race.run_race(4, 1, 3, N, w, checkpoints=[N], blocks=desk_blocks).lead_density for w in ("omega", "big_omega")}
    d = constants.d_qab(4, 1, 3).value
    ok = d > 0 and all(v > 0.95 for v in dens.values())
    record("AC10 Martin races", ok,
           f"D_4,1,3={d:.5f}; omega (a-sum < b-sum) {dens['omega']:.6f}; Omega (a-sum > b-sum) {dens['big_omega']:.6f}")


def test_ac11_residual(desk_blocks):
    s = race.run_race(3, 1, 2, N, stride=N // 100, blocks=desk_blocks)
    rep = race.main_term_fit(s)
    top = rep.windows[0]
    ok = top["mean_abs_e"] < rep.predicted_coefficient
    record("AC11 residual", ok, f"mean |e| on [N/2,N] = {top['mean_abs_e']:.5f} < coefficient {rep.predicted_coefficient:.5f}")


def test_ac12_table1():
    units = [a for a in range(1, 15) if math.gcd(a, 15) == 1]
    worst = max(
        abs(constants.c_qab(15, a, b).value + constants.c_qab(15, b, c).value - constants.c_qab(15, a, c).value)
        for a, b, c in itertools.product(units, repeat=3)
    )
    zeros = all(
        (constants.c_qab(15, a, b).value == 0) == chargroup.is_quadratic_residue(a * pow(b, -1, 15) % 15, 15)
        for a, b in itertools.product(units, repeat=2)
    )
    tab = constants.table1()
    signs = all(np.sign(tab[p].value) == np.sign(v) for p, v in constants.PUBLISHED_TABLE1.items())
    ratios = sorted({round(v / tab[p].value, 4) for p, v in constants.PUBLISHED_TABLE1.items()})
    ok = worst < 1e-10 and zeros and signs
    record("AC12 Table 1", ok,
           f"linearity max err {worst:.1e}; zero pattern {'ok' if zeros else 'WRONG'}; signs {'ok' if signs else 'WRONG'}; "
           f"published/computed ratios {ratios} (reported, not asserted)")
