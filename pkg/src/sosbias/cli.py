"""Command-line entry point: ``sosbias <subcommand> [options]``.

Options may also come from a flat ``key=value`` config file (``--config``),
one setting per line, ``#`` starting a comment.  Keys are option names with
or without the leading dashes (``limit``, ``--limit`` and ``cache_dir`` /
``cache-dir`` all work).  Flags given on the command line win.

Exit codes: 0 ok, 2 usage, 3 resource, 4 precision, 5 consistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, chargroup, constants, lfunc, race, sieve
from .errors import ConsistencyError, DomainError, ResourceError, SosBiasError

log = logging.getLogger("sosbias")

SUBCOMMANDS = ("chars", "lvalue", "constants", "sieve", "race", "table2", "martin", "figure3", "verify-identity", "report")
TRUE_WORDS = {"1", "true", "yes", "on"}
LVALUE_CACHE_FILE = "lvalues.json"
IDENTITY_TOL = 1e-12

# Defaults applied after merging flags and config; None means "not given".
DEFAULTS = {
    "limit": None,
    "modulus": None,
    "pair": None,
    "weight": "indicator_S",
    "segment": sieve.DEFAULT_SEGMENT,
    "segments": None,
    "workers": None,
    "cache_dir": None,
    "out_dir": "sosbias-out",
    "tol": lfunc.DEFAULT_TOL,
    "stride": None,
    "residual_stride": None,
    "char_index": None,
    "s": None,
    "omega": False,
    "plot": False,
    "primitive": False,
}
LIMIT_DEFAULTS = {"table2": race.TABLE2_N, "martin": 10**7, "figure3": 10**7, "race": 10**7, "sieve": 10**7,
                  "report": 10**7, "verify-identity": 100}


class UsageError(SosBiasError):
    exit_code = 2


@dataclass
class RunConfig:
    command: str
    limit: int | None = None
    modulus: int | None = None
    pairs: list[tuple[int, int]] = field(default_factory=list)
    weight: str = "indicator_S"
    segment: int = sieve.DEFAULT_SEGMENT
    workers: int | None = None
    cache_dir: str | None = None
    out_dir: str = "sosbias-out"
    tol: float = lfunc.DEFAULT_TOL
    stride: int | None = None
    residual_stride: int | None = None
    char_index: int | None = None
    s: float | None = None
    omega: bool = False
    plot: bool = False
    primitive: bool = False

    def echo(self) -> dict:
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        return d

    def sieve_kwargs(self, stats: sieve.SieveStats | None = None) -> dict:
        return {"segment": self.segment, "workers": self.workers, "cache_dir": self.cache_dir, "stats": stats}


# ---------------------------------------------------------------- parsing


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b got {text!r}") from None
    return a, b


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="key=value file; flags override it")
    g.add_argument("--limit", "-N", type=_positive_int, help="upper end N of the range 1..N")
    g.add_argument("--modulus", "-q", type=_positive_int, help="modulus q")
    g.add_argument("--pair", action="append", type=_pair, help="residue pair a,b (repeatable)")
    g.add_argument("--weight", choices=sieve.WEIGHTS, help="race weight")
    g.add_argument("--segment", type=_positive_int, help="sieve segment length")
    g.add_argument("--segments", type=_positive_int, help="split 1..N into this many segments")
    g.add_argument("--workers", type=_positive_int, help="sieve worker processes (default: all cores)")
    g.add_argument("--cache", dest="cache_dir", help=f"cache directory (default ${sieve.CACHE_ENV})")
    g.add_argument("--out", dest="out_dir", help="output directory for CSV/JSON/SVG and the manifest")
    g.add_argument("--tol", type=_positive_float, help="L-value tolerance")
    g.add_argument("--stride", type=_positive_int, help="checkpoint stride (default N/10^4)")
    g.add_argument("--residual-stride", type=_positive_int, help="checkpoint stride for residual statistics (default N/100)")
    g.add_argument("--char-index", type=_nonneg_int, help="character index in the canonical ordering")
    g.add_argument("--s", type=_positive_float, help="real argument s > 0")
    g.add_argument("--omega", action="store_true", default=None, help="constants: report D_{q,a,b}")
    g.add_argument("--plot", action="store_true", default=None, help="also write an SVG plot")
    g.add_argument("--primitive", action="store_true", default=None, help="constants: use primitive L-values")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="sosbias", description="Chebyshev bias for sums of two squares.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "chars": "character table mod q as CSV",
        "lvalue": "L(s, chi) with an error bound, as CSV",
        "constants": "K, Gamma(1/4), C_q and C_{q,a,b} / D_{q,a,b} as JSON",
        "sieve": "sieve S, omega, Omega up to N (fills the cache)",
        "race": "race residue pairs mod q up to N",
        "table2": "lead percentages for the printed mod-15 pairs",
        "martin": "omega and Omega races",
        "figure3": "S(x;3,1) - S(x;3,2) series with CSV and SVG",
        "verify-identity": "local Euler-factor check of the twisted product identity",
        "report": "run the desk-scale experiments and summarise",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def read_config(path: str) -> list[tuple[str, str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        items.append((key.lstrip("-").replace("_", "-"), value))
    return items


_CONFIG_ALIASES = {"cache-dir": "cache", "out-dir": "out", "pairs": "pair"}
_FLAG_KEYS = {"omega", "plot", "primitive", "verbose"}


def _config_tokens(items: list[tuple[str, str]]) -> list[str]:
    tokens = []
    for key, value in items:
        key = _CONFIG_ALIASES.get(key, key)
        if key == "config":
            raise UsageError("config files cannot include other config files")
        if key in _FLAG_KEYS:
            if value.lower() in TRUE_WORDS:
                tokens.append(f"--{key}")
            continue
        if key == "pair":
            for p in value.split(";"):
                tokens += ["--pair", p.strip()]
            continue
        tokens += [f"--{key}", value]
    return tokens


def parse_args(argv: list[str] | None = None) -> tuple[RunConfig, argparse.Namespace]:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            cfg = parser.parse_args([ns.command, *_config_tokens(read_config(ns.config))])
        except UsageError as exc:
            parser.error(str(exc))
        for key in DEFAULTS:
            if getattr(ns, key, None) is None and getattr(cfg, key, None) is not None:
                setattr(ns, key, getattr(cfg, key))
        ns.verbose = ns.verbose or cfg.verbose
    merged = {k: (DEFAULTS[k] if getattr(ns, k, None) is None else getattr(ns, k)) for k in DEFAULTS}
    if merged["limit"] is None:
        merged["limit"] = LIMIT_DEFAULTS.get(ns.command)
    if merged["cache_dir"] is None:
        merged["cache_dir"] = os.environ.get(sieve.CACHE_ENV) or None
    if merged["segments"] and merged["limit"]:
        merged["segment"] = -(-merged["limit"] // merged["segments"])
    cfg = RunConfig(
        command=ns.command,
        limit=merged["limit"],
        modulus=merged["modulus"],
        pairs=list(merged["pair"] or []),
        weight=merged["weight"],
        segment=merged["segment"],
        workers=merged["workers"],
        cache_dir=merged["cache_dir"],
        out_dir=merged["out_dir"],
        tol=merged["tol"],
        stride=merged["stride"],
        residual_stride=merged["residual_stride"],
        char_index=merged["char_index"],
        s=merged["s"],
        omega=bool(merged["omega"]),
        plot=bool(merged["plot"]),
        primitive=bool(merged["primitive"]),
    )
    try:
        validate(cfg)
    except UsageError as exc:
        parser.error(str(exc))
    return cfg, ns


def validate(cfg: RunConfig) -> None:
    cmd = cfg.command
    if cmd == "table2":
        if cfg.modulus not in (None, 15):
            raise UsageError("table2 is fixed to modulus 15")
        cfg.modulus = 15
    if cmd == "figure3":
        cfg.modulus, cfg.pairs = 3, [(1, 2)]
    if cmd == "martin":
        cfg.modulus = cfg.modulus or 4
        cfg.pairs = cfg.pairs or [(1, 3)]
    needs_q = {"chars", "lvalue", "constants", "race"}
    if cmd in needs_q and cfg.modulus is None:
        raise UsageError(f"{cmd} needs --modulus")
    if cmd == "race" and not cfg.pairs:
        raise UsageError("race needs at least one --pair a,b")
    if cmd == "lvalue" and (cfg.char_index is None or cfg.s is None):
        raise UsageError("lvalue needs --char-index and --s")
    if cmd == "constants" and len(cfg.pairs) > 1:
        raise UsageError("constants takes at most one --pair")
    if cfg.modulus is not None:
        for a, b in cfg.pairs:
            for r in (a, b):
                if math.gcd(r, cfg.modulus) != 1:
                    raise UsageError(f"residue {r} is not coprime to modulus {cfg.modulus}")
        if cmd == "race" and cfg.weight == "indicator_S" and cfg.modulus % 4 == 0:
            for a, b in cfg.pairs:
                if a % 4 != 1 or b % 4 != 1:
                    raise UsageError("with 4 | q both residues must be 1 mod 4 for the S race")
        if cmd == "constants" and cfg.pairs and not cfg.omega and cfg.modulus % 4 == 0:
            a, b = cfg.pairs[0]
            if a % 4 != 1 or b % 4 != 1:
                raise UsageError("with 4 | q both residues must be 1 mod 4 for C_{q,a,b}")
        if cmd == "lvalue" and cfg.char_index is not None and cfg.char_index >= chargroup.euler_phi(cfg.modulus):
            raise UsageError(f"char index {cfg.char_index} out of range for modulus {cfg.modulus}")
    if cmd in {"race", "martin"} and cfg.limit is not None and cfg.modulus is not None and cfg.limit < cfg.modulus:
        raise UsageError("the limit must be at least the modulus")
    if cfg.tol < lfunc.MIN_TOL:
        raise UsageError(f"--tol below the supported minimum {lfunc.MIN_TOL:g}")


# ---------------------------------------------------------------- output


class Output:
    """Collects files for the output directory and writes the manifest last."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out_dir)
        self.files: list[str] = []
        self.stats = sieve.SieveStats()
        self.t0 = time.perf_counter()

    def _ensure(self) -> None:
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ResourceError(f"cannot create output directory {self.dir}: {exc}") from exc
        if not os.access(self.dir, os.W_OK):
            raise ResourceError(f"output directory {self.dir} is not writable")

    def write(self, name: str, text: str) -> Path:
        self._ensure()
        path = self.dir / name
        try:
            path.write_text(text, newline="") if name.endswith(".csv") else path.write_text(text)
        except OSError as exc:
            raise ResourceError(f"cannot write {path}: {exc}") from exc
        self.files.append(name)
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write(name, json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return self.write(name, buf.getvalue())

    def manifest(self) -> dict:
        m = {
            "tool": "sosbias",
            "version": __version__,
            "command": self.cfg.command,
            "config": self.cfg.echo(),
            "wall_seconds": time.perf_counter() - self.t0,
            "sieve": {
                "blocks_computed": self.stats.computed,
                "cache_hits": self.stats.loaded,
                "sieve_seconds": self.stats.seconds,
            },
            "files": sorted(self.files),
            "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        self.write_json("manifest.json", m)
        return m


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))


# ---------------------------------------------------------------- L-value cache


class LValueCache:
    """JSON file mapping "q:char_index:s" to [re, im, error_bound]."""

    def __init__(self, cache_dir: str | None):
        self.path = Path(cache_dir) / LVALUE_CACHE_FILE if cache_dir else None
        self.data: dict[str, list[float]] = {}
        if self.path is not None and self.path.exists():
            try:
                self.data = json.loads(self.path.read_text())
            except (OSError, ValueError):
                log.warning("ignoring unreadable L-value cache %s", self.path)
                self.data = {}

    @staticmethod
    def key(q: int, idx: int, s: float) -> str:
        return f"{q}:{idx}:{s!r}"

    def get(self, q: int, idx: int, s: float, tol: float):
        hit = self.data.get(self.key(q, idx, s))
        if hit is not None and hit[2] <= tol:
            return hit
        return None

    def put(self, q: int, idx: int, s: float, value: complex, err: float) -> None:
        if self.path is None:
            return
        self.data[self.key(q, idx, s)] = [value.real, value.imag, err]
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(json.dumps(self.data, sort_keys=True))
            os.replace(tmp, self.path)
        except OSError as exc:
            raise ResourceError(f"cannot write L-value cache {self.path}: {exc}") from exc


# ---------------------------------------------------------------- commands


def cmd_chars(cfg: RunConfig, out: Output) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["char_index", "residue", "value_re", "value_im", "is_real", "is_principal"])
    for idx, n, re, im, is_real, is_principal in chargroup.character_table_rows(cfg.modulus):
        w.writerow([idx, n, f"{re:.17g}", f"{im:.17g}", int(is_real), int(is_principal)])
    return 0


def cmd_lvalue(cfg: RunConfig, out: Output) -> int:
    chi = chargroup.build_group(cfg.modulus)[cfg.char_index]
    cache = LValueCache(cfg.cache_dir)
    hit = cache.get(cfg.modulus, cfg.char_index, cfg.s, cfg.tol)
    if hit is not None:
        value, err = complex(hit[0], hit[1]), hit[2]
    else:
        res = lfunc.l_value(chi, cfg.s, cfg.tol)
        value, err = complex(res.value), res.error_bound
        cache.put(cfg.modulus, cfg.char_index, cfg.s, value, err)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["modulus", "char_index", "s", "value_re", "value_im", "error_bound"])
    w.writerow([cfg.modulus, cfg.char_index, repr(cfg.s), f"{value.real:.17g}", f"{value.imag:.17g}", f"{err:.3e}"])
    return 0


def cmd_constants(cfg: RunConfig, out: Output) -> int:
    pair = cfg.pairs[0] if cfg.pairs else None
    report = constants.constants_report(cfg.modulus, pair, omega=cfg.omega)
    if cfg.primitive and pair is not None and not cfg.omega:
        report["C_qab_selected"] = report["C_qab_primitive"]
    _emit_json(report)
    return 0


def cmd_sieve(cfg: RunConfig, out: Output) -> int:
    count = 0
    omega_sum = big_omega_sum = 0
    for block in sieve.iter_blocks(cfg.limit, sieve.KIND_ALL, **cfg.sieve_kwargs(out.stats)):
        count += int(block.s_mask().sum())
        omega_sum += int(block.omega.sum(dtype=np.int64))
        big_omega_sum += int(block.big_omega.sum(dtype=np.int64))
    summary = {
        "limit": cfg.limit,
        "count_S": count,
        "landau_ratio": count * math.sqrt(math.log(cfg.limit)) / (constants.landau_ramanujan() * cfg.limit)
        if cfg.limit > 1 else None,
        "sum_omega": omega_sum,
        "sum_big_omega": big_omega_sum,
    }
    out.write_json("sieve.json", summary)
    _emit_json(summary)
    return 0


def _race_files(out: Output, cfg: RunConfig, series: race.RaceSeries, tag: str) -> dict:
    out.write_csv(
        f"{tag}.csv",
        ["x", "count_a", "count_b", "diff", "predicted_main_term", "residual"],
        race.series_rows(series),
    )
    if cfg.plot:
        _plot(out, series, f"{tag}.svg")
    return {"csv": f"{tag}.csv"}


def _plot(out: Output, series: race.RaceSeries, name: str) -> None:
    from . import svg

    xs = series.checkpoints.tolist()
    main = race.predicted_main_term(series).tolist()
    title = f"W(x;{series.q},{series.a}) - W(x;{series.q},{series.b}), weight {series.weight}"
    doc = svg.line_plot(
        [("difference", xs, series.diff.tolist()), ("predicted main term", xs, main)],
        title=title,
        xlabel="x",
        ylabel="difference",
    )
    out.write(name, doc)


def _residual_report(cfg: RunConfig, q: int, pairs, weight: str, stats) -> list[dict]:
    stride = cfg.residual_stride or max(1, cfg.limit // 100)
    series = race.run_races(q, pairs, cfg.limit, weight, stride=stride, **cfg.sieve_kwargs(stats))
    return [race.main_term_fit(s).as_dict() for s in series]


def cmd_race(cfg: RunConfig, out: Output) -> int:
    q = cfg.modulus
    series = race.run_races(q, cfg.pairs, cfg.limit, cfg.weight, stride=cfg.stride, **cfg.sieve_kwargs(out.stats))
    reports = []
    for s in series:
        tag = f"race_q{q}_{s.a}_{s.b}_{s.weight}"
        _race_files(out, cfg, s, tag)
        rep = race.main_term_fit(s).as_dict()
        rep["csv"] = f"{tag}.csv"
        reports.append(rep)
    out.write_json("race_report.json", reports)
    for r in reports:
        print(f"q={q} a={r['a']} b={r['b']} weight={r['weight']} N={r['N']} "
              f"lead={100 * r['lead_density']:.2f}% tie={100 * r['tie_density']:.4f}%")
    return 0


def cmd_table2(cfg: RunConfig, out: Output) -> int:
    computed = race.table2(cfg.limit, **cfg.sieve_kwargs(out.stats))
    tab1 = constants.table1()
    rows = []
    for (a, b), pct in computed.items():
        pub = race.PUBLISHED_TABLE2[(a, b)]
        rows.append({"a": a, "b": b, "lead_percent": pct, "published_percent": pub,
                     "abs_diff": abs(pct - pub), "C_15ab": tab1[(a, b)].value})
    out.write_csv("table2.csv", ["a", "b", "lead_percent", "published_percent", "C_15ab"],
                  [[r["a"], r["b"], f"{r['lead_percent']:.4f}", f"{r['published_percent']:.2f}", f"{r['C_15ab']:.6f}"]
                   for r in rows])
    out.write_json("table2.json", {"N": cfg.limit, "q": 15, "entries": rows})
    for r in rows:
        print(f"({r['a']:2d},{r['b']:2d})  {r['lead_percent']:6.2f}%  published {r['published_percent']:6.2f}%")
    return 0


def cmd_martin(cfg: RunConfig, out: Output) -> int:
    q = cfg.modulus
    reports = []
    for weight in ("omega", "big_omega"):
        series = race.run_races(q, cfg.pairs, cfg.limit, weight, stride=cfg.stride, **cfg.sieve_kwargs(out.stats))
        for s in series:
            tag = f"martin_q{q}_{s.a}_{s.b}_{weight}"
            _race_files(out, cfg, s, tag)
            rep = race.main_term_fit(s).as_dict()
            rep["D_qab"] = constants.d_qab(q, s.a, s.b).value
            reports.append(rep)
            print(f"{weight:9s} q={q} a={s.a} b={s.b} N={s.N} lead={100 * s.lead_density:.2f}%")
    out.write_json("martin_report.json", reports)
    return 0


def cmd_figure3(cfg: RunConfig, out: Output) -> int:
    series = race.figure3_series(cfg.limit, cfg.stride, **cfg.sieve_kwargs(out.stats))
    out.write_csv("figure3.csv", ["x", "count_a", "count_b", "diff", "predicted_main_term", "residual"],
                  race.series_rows(series))
    _plot(out, series, "figure3.svg")
    rep = race.main_term_fit(series).as_dict()
    out.write_json("figure3_report.json", rep)
    print(f"S(x;3,1)-S(x;3,2) at x={series.N}: {int(series.diff[-1])}; lead {100 * series.lead_density:.2f}%")
    return 0


def identity_residuals(max_p: int, s: float) -> list[dict]:
    chars = {
        "principal_mod_1": chargroup.principal(1),
        "chi_minus4": chargroup.chi_minus4(),
        "quadratic_mod_3": chargroup.build_group(3)[1],
    }
    rows = []
    for name, chi in chars.items():
        for p in range(2, max_p + 1):
            if lfunc.is_prime(p):
                rows.append({"character": name, "p": p, "s": s, "residual": constants.verify_local_identity(p, s, chi)})
    return rows


def cmd_verify_identity(cfg: RunConfig, out: Output) -> int:
    s = cfg.s if cfg.s is not None else 2.0
    if not s > 1:
        raise DomainError("the local identity check needs s > 1")
    rows = identity_residuals(cfg.limit, s)
    worst = max(r["residual"] for r in rows)
    _emit_json({"max_residual": worst, "tolerance": IDENTITY_TOL, "checks": len(rows)})
    if worst >= IDENTITY_TOL:
        raise ConsistencyError(f"local identity residual {worst:.3e} exceeds {IDENTITY_TOL:g}")
    return 0


def cmd_report(cfg: RunConfig, out: Output) -> int:
    N = cfg.limit
    kw = cfg.sieve_kwargs(out.stats)
    rep: dict = {"N": N}
    rep["K"] = constants.landau_ramanujan()
    rep["gamma_quarter"] = constants.gamma_quarter()
    rep["table1"] = [
        {"a": a, "b": b, "C": c.value, "C_primitive": constants.c_qab(15, a, b, primitive=True).value,
         "published": pub, "ratio_to_published": pub / c.value if c.value else None}
        for (a, b), c, pub in ((k, v, constants.PUBLISHED_TABLE1[k]) for k, v in constants.table1().items())
    ]
    t2 = race.table2(N, **kw)
    rep["table2"] = [{"a": a, "b": b, "lead_percent": v, "published": race.PUBLISHED_TABLE2[(a, b)]}
                     for (a, b), v in t2.items()]
    q5 = race.run_races(5, list(race.PUBLISHED_Q5), N, checkpoints=np.array([N]), **kw)
    rep["q5"] = [{"a": s.a, "b": s.b, "lead_density": s.lead_density, "published": race.PUBLISHED_Q5[(s.a, s.b)]}
                 for s in q5]
    rep["q3"] = _residual_report(cfg, 3, [(1, 2)], "indicator_S", out.stats)[0]
    rep["martin"] = [
        {"weight": w, "lead_density": s.lead_density}
        for w in ("omega", "big_omega")
        for s in race.run_races(4, [(1, 3)], N, w, checkpoints=np.array([N]), **kw)
    ]
    out.write_json("report.json", rep)
    print(f"K = {rep['K']:.12f}; report written to {out.dir / 'report.json'}")
    return 0


COMMANDS = {
    "chars": cmd_chars,
    "lvalue": cmd_lvalue,
    "constants": cmd_constants,
    "sieve": cmd_sieve,
    "race": cmd_race,
    "table2": cmd_table2,
    "martin": cmd_martin,
    "figure3": cmd_figure3,
    "verify-identity": cmd_verify_identity,
    "report": cmd_report,
}
WRITES_FILES = {"sieve", "race", "table2", "martin", "figure3", "report"}


def main(argv: list[str] | None = None) -> int:
    cfg, ns = parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = Output(cfg)
    try:
        code = COMMANDS[cfg.command](cfg, out)
        if cfg.command in WRITES_FILES:
            out.manifest()
    except SosBiasError as exc:
        print(f"sosbias: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError as exc:
        print(f"sosbias: error: out of memory: {exc}", file=sys.stderr)
        return ResourceError.exit_code
    return code


if __name__ == "__main__":
    sys.exit(main())
