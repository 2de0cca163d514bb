"""Experiment runner.

Subcommands: point-error, topk, tailcurve, concentration, compare-cm.
Every run is reproducible from its flags; each CSV starts with
'#'-prefixed metadata lines carrying the full configuration and seed.

Flags may also come from a config file (--config, one key=value per
line, '#' comments); command-line flags win.  Exit codes: 0 success,
1 usage error, 2 experiment-level failure, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .concentration import (SymmetricSumSpec, median_cubed_check,
                            median_tail_probability, small_ball_probability,
                            triangle_filter_expectation, vector_median_check)
from .hashing import derive_seed
from .metrics import (countmin_comparison, m_value, point_error_experiment,
                      tail_curve_experiment, topk_experiment)
from .signals import PARETO, SignalSpec
from .sketch import COUNT_SKETCH, SketchConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EXPERIMENT = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class ExperimentError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _parse_int_list(text: str, flag: str) -> list[int]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError(f"{flag} must be a nonempty comma-separated list")
    try:
        return [int(s) for s in items]
    except ValueError as exc:
        raise UsageError(f"bad integer in {flag}: {exc}") from None


def _parse_float_list(text: str, flag: str) -> list[float]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError(f"{flag} must be a nonempty comma-separated list")
    try:
        return [float(s) for s in items]
    except ValueError as exc:
        raise UsageError(f"bad number in {flag}: {exc}") from None


def _load_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                out[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchlab")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--rows", type=int, default=None)
        p.add_argument("--cols", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("point-error", help="point-error histograms per (R, C)")
    common(p)
    p.add_argument("--pairs", default=None,
                   help="RxC pairs, e.g. 13x100,26x100 (default rows x cols)")
    p.add_argument("--coords", type=int, default=None,
                   help="coordinates sampled per trial")

    p = sub.add_parser("topk", help="top-k error distribution and sweeps")
    common(p)
    p.add_argument("--r-sweep", default=None)
    p.add_argument("--c-sweep", default=None)
    p.add_argument("--k-sweep", default=None)

    p = sub.add_parser("tailcurve", help="tail probability vs t with slope fit")
    common(p)
    p.add_argument("--t-grid", default=None)
    p.add_argument("--coords", type=int, default=None)

    p = sub.add_parser("concentration", help="probability-lemma check suite")
    common(p)
    p.add_argument("--force-fail", action="store_true",
                   help=argparse.SUPPRESS)  # test hook

    p = sub.add_parser("compare-cm", help="Count-Sketch vs Count-Min errors")
    common(p)
    p.add_argument("--coords", type=int, default=None)

    return parser


_DEFAULTS = {
    "n": 10_000, "k": 25, "rows": 26, "cols": 100, "alpha": 1.25,
    "trials": 100, "seed": 0, "out": None, "format": "csv", "threads": 1,
    "pairs": None, "coords": 100, "t_grid": "1,2,3,4,5,6,7,8,9,10,11,12",
    "r_sweep": "13,26", "c_sweep": "50,100,200", "k_sweep": "10,25,50,100",
}

_COERCE = {
    "n": int, "k": int, "rows": int, "cols": int, "alpha": float,
    "trials": int, "seed": int, "threads": int, "coords": int,
}


def _resolve(args: argparse.Namespace) -> dict:
    """Merge command-line flags over config-file values over defaults."""
    file_vals = _load_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, default in _DEFAULTS.items():
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
        elif key in file_vals:
            raw = file_vals[key]
            try:
                merged[key] = _COERCE.get(key, str)(raw)
            except ValueError:
                raise UsageError(f"bad value for {key} in config file: {raw!r}")
        else:
            merged[key] = default
    if merged["trials"] < 1:
        raise UsageError(f"trials must be >= 1, got {merged['trials']}")
    if merged["threads"] < 1:
        raise UsageError(f"threads must be >= 1, got {merged['threads']}")
    return merged


def _meta_lines(command: str, cfg: dict, extra: dict | None = None) -> list[str]:
    pairs = dict(cfg)
    if extra:
        pairs.update(extra)
    lines = [f"# sketchlab {__version__} {command}"]
    lines += [f"# {k}={_fmt(v)}" for k, v in sorted(pairs.items()) if v is not None]
    return lines


def _emit(path, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _hist_rows(hist) -> list[str]:
    rows = ["bin_left,bin_right,density"]
    for i in range(len(hist.density)):
        rows.append(f"{_fmt(hist.bin_edges[i])},{_fmt(hist.bin_edges[i + 1])},"
                    f"{_fmt(hist.density[i])}")
    return rows


def _suffixed(path: str | None, suffix: str) -> str | None:
    if path is None:
        return None
    if "." in path.rsplit("/", 1)[-1]:
        stem, ext = path.rsplit(".", 1)
        return f"{stem}{suffix}.{ext}"
    return f"{path}{suffix}"


def _signal(cfg: dict) -> SignalSpec:
    return SignalSpec(PARETO, cfg["n"], alpha=cfg["alpha"], seed=cfg["seed"])


def _cmd_point_error(args) -> int:
    cfg = _resolve(args)
    if cfg["pairs"] is None:
        pairs = [(cfg["rows"], cfg["cols"])]
    else:
        try:
            pairs = [tuple(int(v) for v in p.split("x")) for p in cfg["pairs"].split(",")]
            if not pairs or any(len(p) != 2 for p in pairs):
                raise ValueError("expected RxC items")
        except ValueError as exc:
            raise UsageError(f"bad --pairs: {exc}") from None
    signal = _signal(cfg)
    for rows, cols in pairs:
        sk = SketchConfig(rows, cols, derive_seed(cfg["seed"], rows, cols))
        result = point_error_experiment(signal, sk, cfg["trials"],
                                        cfg["coords"], threads=cfg["threads"])
        extra = {"R": rows, "C": cols, "m": result.m}
        out = _suffixed(cfg["out"], f"_R{rows}C{cols}") if len(pairs) > 1 else cfg["out"]
        if cfg["format"] == "json":
            payload = {"meta": {**cfg, **extra},
                       "bin_edges": result.histogram.bin_edges.tolist(),
                       "density": result.histogram.density.tolist(),
                       "mean_Ep_over_m": result.histogram.mean,
                       "stddev": result.histogram.stddev}
            _emit(out, [json.dumps(payload, sort_keys=True)])
        else:
            lines = _meta_lines("point-error", cfg, extra)
            lines += _hist_rows(result.histogram)
            lines.append(f"mean_Ep_over_m,{_fmt(result.histogram.mean)}")
            lines.append(f"stddev,{_fmt(result.histogram.stddev)}")
            _emit(out, lines)
    return EXIT_OK


def _cmd_topk(args) -> int:
    cfg = _resolve(args)
    r_sweep = _parse_int_list(cfg["r_sweep"], "--r-sweep")
    c_sweep = _parse_int_list(cfg["c_sweep"], "--c-sweep")
    k_sweep = _parse_int_list(cfg["k_sweep"], "--k-sweep")
    signal = _signal(cfg)
    base = SketchConfig(cfg["rows"], cfg["cols"], cfg["seed"])

    def run(rows, cols, k):
        sk = SketchConfig(rows, cols, derive_seed(cfg["seed"], rows, cols, k))
        return topk_experiment(signal, sk, k, cfg["trials"], threads=cfg["threads"])

    main_result = run(base.rows, base.columns, cfg["k"])
    tables = {
        "_dist": _hist_rows_from_samples(main_result.samples),
        "_mean_vs_R": ["R,mean_Ek_normalized"] + [
            f"{r},{_fmt(run(r, base.columns, cfg['k']).mean_normalized)}"
            for r in r_sweep],
        "_mean_vs_C": ["C,mean_Ek_normalized"] + [
            f"{c},{_fmt(run(base.rows, c, cfg['k']).mean_normalized)}"
            for c in c_sweep],
        "_var_vs_k": ["k,variance_ratio"] + [
            f"{k},{_fmt(run(base.rows, base.columns, k).variance_ratio)}"
            for k in k_sweep],
    }
    extra = {"mean_Ek_normalized": main_result.mean_normalized,
             "variance_ratio": main_result.variance_ratio, "m": main_result.m}
    for suffix, rows_ in tables.items():
        lines = _meta_lines("topk", cfg, extra) + rows_
        _emit(_suffixed(cfg["out"], suffix), lines)
    return EXIT_OK


def _hist_rows_from_samples(samples) -> list[str]:
    from .metrics import make_histogram

    return _hist_rows(make_histogram(np.asarray(samples)))


def _cmd_tailcurve(args) -> int:
    cfg = _resolve(args)
    t_grid = _parse_float_list(cfg["t_grid"], "--t-grid")
    signal = _signal(cfg)
    sk = SketchConfig(cfg["rows"], cfg["cols"], cfg["seed"])
    curve = tail_curve_experiment(signal, sk, cfg["k"], t_grid, cfg["trials"],
                                  cfg["coords"], threads=cfg["threads"])
    if curve.degenerate:
        raise ExperimentError("tail curve has no usable probability window")
    extra = {"slope": curve.slope, "intercept": curve.intercept,
             "r_squared": curve.r_squared, "samples": curve.samples}
    lines = _meta_lines("tailcurve", cfg, extra)
    lines.append("t,prob,ci_halfwidth")
    for t, p, h in zip(curve.t_grid, curve.probs, curve.halfwidths):
        lines.append(f"{_fmt(float(t))},{_fmt(float(p))},{_fmt(float(h))}")
    _emit(cfg["out"], lines)
    return EXIT_OK


def _cmd_compare_cm(args) -> int:
    cfg = _resolve(args)
    signal = _signal(cfg)
    sk = SketchConfig(cfg["rows"], cfg["cols"], cfg["seed"])
    try:
        result = countmin_comparison(signal, sk, cfg["trials"], cfg["coords"],
                                     threads=cfg["threads"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    lines = _meta_lines("compare-cm", cfg, {"mean_ratio": result.mean_ratio})
    lines.append("sketch_kind,bin_left,bin_right,density")
    for kind, hist in (("count_sketch", result.cs_histogram),
                       ("count_min", result.cm_histogram)):
        for i in range(len(hist.density)):
            lines.append(f"{kind},{_fmt(hist.bin_edges[i])},"
                         f"{_fmt(hist.bin_edges[i + 1])},{_fmt(hist.density[i])}")
    lines.append(f"mean_ratio,{_fmt(result.mean_ratio)}")
    _emit(cfg["out"], lines)
    return EXIT_OK


def _cmd_concentration(args) -> int:
    cfg = _resolve(args)
    seed = cfg["seed"]
    trials = max(cfg["trials"], 1) * 200  # MC sample count per check
    checks: list[tuple[str, bool, str]] = []

    # small-ball lower bound and triangle-filter domination
    specs = [SymmetricSumSpec.iid(8, 1.0, 0.5),
             SymmetricSumSpec.iid(12, 2.5, 0.75),
             SymmetricSumSpec(tuple((m, 0.5) for m in (1, 1, 2, 3, 5, 8)))]
    for si, spec in enumerate(specs):
        ok = True
        for eps in np.linspace(0.1, 1.0, 10):
            sb = small_ball_probability(spec, float(eps), trials,
                                        derive_seed(seed, si, 1))
            tf = triangle_filter_expectation(spec, float(eps), trials,
                                             derive_seed(seed, si, 2))
            if sb.value < eps / 7 or tf.value > sb.value + 3 * (sb.halfwidth + tf.halfwidth):
                ok = False
        checks.append((f"small_ball spec{si}", ok, "eps grid 0.1..1.0"))

    for p, t in ((0.3, 25), (0.5, 49)):
        res = median_tail_probability(p, t, trials, derive_seed(seed, t))
        checks.append((f"median_tail t={t} p={p}",
                       res.frequency <= res.bound + 3 * res.stderr,
                       f"freq={res.frequency:.3g} bound={res.bound:.3g}"))

    rng = np.random.default_rng(derive_seed(seed, 99))
    violations = 0
    ensembles = min(2000, trials)
    for _ in range(ensembles):
        r = int(rng.integers(1, 10))
        dim = int(rng.integers(1, 9))
        vecs = rng.standard_normal((r, dim))
        need = -(-3 * r // 4)
        norms = np.linalg.norm(vecs, axis=1)
        bound = float(np.sort(norms)[need - 1]) * 1.0001  # premise by construction
        res = vector_median_check(vecs, bound)
        if res.premise_met and not res.within_bound:
            violations += 1
    checks.append((f"vector_median ensembles={ensembles}", violations == 0,
                   f"violations={violations}"))

    lists = 20
    all_equal = True
    partitions = 0
    for i in range(lists):
        vals = np.random.default_rng(derive_seed(seed, 7, i)).permutation(9) + \
            np.random.default_rng(derive_seed(seed, 8, i)).random(9)
        res = median_cubed_check(vals, 3, 3)
        partitions = res.partitions
        all_equal = all_equal and res.equal
    checks.append((f"median_cubed k=3 l=3 partitions={partitions}",
                   all_equal, f"lists={lists}"))

    if args.force_fail:
        checks.append(("forced_failure", False, "test hook"))

    lines = _meta_lines("concentration", cfg)
    failed = [name for name, ok, _ in checks if not ok]
    for name, ok, detail in checks:
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'} ({detail})")
    _emit(cfg["out"], lines)
    if failed:
        raise ExperimentError("failing checks: " + ", ".join(failed))
    return EXIT_OK


_COMMANDS = {
    "point-error": _cmd_point_error,
    "topk": _cmd_topk,
    "tailcurve": _cmd_tailcurve,
    "concentration": _cmd_concentration,
    "compare-cm": _cmd_compare_cm,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExperimentError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return EXIT_EXPERIMENT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - internal errors
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
