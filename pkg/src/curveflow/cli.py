"""Command-line driver.

    curveflow list-presets
    curveflow preset <name> [--alpha X] [--N K] [--t-end T] [--out DIR] [--kind ap|lp]
    curveflow run --config FILE

Exit codes: 0 verdict matched the expectation (or the scenario is
exploratory), 1 error, 2 verdict mismatch, 3 an invariant monitor failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .curves import (
    ABRESCH_LANGER,
    AP,
    LP,
    CosinePerturbed,
    FlowParams,
    FromSamples,
    MFoldCircle,
    classify,
    generate_support,
    load_support,
)
from .diagnostics import check_monotonicity, spreading_check
from .errors import ConfigError, CurveFlowError
from .flow import StepControl, run
from .presets import (
    DEFAULT_N,
    DEFAULT_TOL_CONV,
    PRESETS,
    ScenarioConfig,
    list_presets,
    preset_scenario,
)
from .reporting import render_svg, write_snapshots, write_timeseries

_EXPECTED_KINDS = ("converged", "blowup", "timelimit", "explore")


def run_scenario(cfg: ScenarioConfig) -> int:
    """Execute one scenario and write its artifacts; returns the process exit code."""
    out_dir = Path(cfg.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        s0 = generate_support(cfg.curve, cfg.N)
        report = classify(s0)
        al_n = report.n if report.label == ABRESCH_LANGER else None
        outcome = run(s0, cfg.params, cfg.ctl, tol_conv=cfg.tol_conv, al_n=al_n)
        monitors = check_monotonicity(
            outcome.series, cfg.params, verdict_kind=outcome.verdict.kind
        )
        spreading = spreading_check(outcome.states, cfg.params)

        write_timeseries(outcome.series, out_dir / "timeseries.csv")
        write_snapshots(outcome.states, cfg.params, out_dir / "snapshots.jsonl")
        times = [s.t for s in outcome.states]
        rendered = set()
        for t_req in (*cfg.render_times, times[-1]):
            idx = min(range(len(times)), key=lambda i: abs(times[i] - t_req))
            stamp = f"{times[idx]:.6g}"
            if stamp not in rendered:
                rendered.add(stamp)
                render_svg(outcome.states[idx], out_dir / f"curve_t{stamp}.svg")

        matched = cfg.expected == "explore" or outcome.verdict.kind == cfg.expected
        if not monitors.all_pass:
            code = 3
        elif not matched:
            code = 2
        else:
            code = 0
        _write_report(out_dir / "report.txt", cfg, s0, outcome, monitors, spreading, code)
        print(
            f"{cfg.label or 'scenario'}: verdict={outcome.verdict.kind} "
            f"expected={cfg.expected} monitors={'ok' if monitors.all_pass else 'FAIL'} "
            f"-> exit {code}  [{out_dir}]"
        )
        return code
    except CurveFlowError as exc:
        print(f"{cfg.label or 'scenario'}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"{cfg.label or 'scenario'}: i/o error: {exc}", file=sys.stderr)
        return 1


def _write_report(path, cfg, s0, outcome, monitors, spreading, code) -> None:
    from .diagnostics import snapshot  # local to keep module load light

    d0 = outcome.series[0]
    verdict = outcome.verdict
    lines = [
        f"scenario: {cfg.label or 'unnamed'}",
        f"flow: kind={cfg.params.kind} alpha={cfg.params.alpha:g} m={cfg.params.m} N={cfg.N}",
    ]
    if cfg.claim:
        lines.append(f"claim: {cfg.claim}")
    rep = classify(s0)
    lines += [
        f"initial curve: class={rep.label} n={rep.n} L0={d0.L:.9g} A0={d0.A:.9g} "
        f"E0={d0.E:.9g} isop_gap0={d0.isop_gap:.9g} margin0={d0.convexity_margin:.9g}",
        f"expected verdict: {cfg.expected}",
        f"verdict: {verdict.kind} {verdict}",
        f"samples: {len(outcome.series)}  final t = {outcome.series[-1].t:.9g}",
    ]
    for note in outcome.notes:
        lines.append(f"note: {note}")
    lines.append("monitors:")
    lines += ["  " + ln for ln in monitors.lines()]
    lines.append("optional monitors (not gating the exit code):")
    lines += ["  " + ln for ln in spreading.lines()]
    lines.append(f"exit code: {code}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# config files: flat "key = value" lines with dotted keys

_KNOWN_KEYS = {
    "preset",
    "curve.kind", "curve.m", "curve.n", "curve.a", "curve.b", "curve.r", "curve.file",
    "flow.kind", "flow.alpha",
    "N", "tol_conv", "expected", "out_dir", "render_times",
    "ctl.t_end", "ctl.cfl", "ctl.dt_max", "ctl.dt_min", "ctl.kappa_blowup",
    "ctl.sample_interval",
}


def _parse_lines(path: Path) -> dict[str, tuple[str, int]]:
    table: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        table[key] = (value, lineno)
    return table


def _take(table, key, conv, path, default=None):
    if key not in table:
        return default
    value, lineno = table.pop(key)
    try:
        return conv(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r} ({exc})") from exc


def parse_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario file; every error carries its line number."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    table = _parse_lines(path)

    base: ScenarioConfig | None = None
    preset_name = _take(table, "preset", str, path)
    alpha = _take(table, "flow.alpha", float, path)
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"{path}: unknown preset {preset_name!r}; known: {', '.join(PRESETS)}"
            )
        base = preset_scenario(preset_name, alpha if alpha is not None else 1.0)

    kind = _take(table, "flow.kind", str, path, default=base.params.kind if base else None)
    if kind is not None:
        kind = kind.lower()
    if kind not in (AP, LP):
        raise ConfigError(f"{path}: flow.kind must be 'ap' or 'lp', got {kind!r}")
    if alpha is None:
        alpha = base.params.alpha if base else 1.0

    curve_kind = _take(
        table, "curve.kind", str, path,
        default=None if base is None else "preset",
    )
    if curve_kind is None:
        raise ConfigError(f"{path}: curve.kind is required when no preset is named")
    m = _take(table, "curve.m", int, path, default=base.params.m if base else None)
    n = _take(table, "curve.n", int, path)
    a = _take(table, "curve.a", float, path)
    b = _take(table, "curve.b", float, path)
    r = _take(table, "curve.r", float, path)
    cfile = _take(table, "curve.file", str, path)

    if curve_kind == "preset":
        curve = base.curve
    elif curve_kind == "circle":
        if m is None or r is None:
            raise ConfigError(f"{path}: circle needs curve.m and curve.r")
        curve = MFoldCircle(r=r, m=m)
    elif curve_kind == "cosine":
        if None in (m, n, a, b):
            raise ConfigError(f"{path}: cosine needs curve.m, curve.n, curve.a, curve.b")
        curve = CosinePerturbed(a=a, b=b, n=n, m=m)
    elif curve_kind == "samples":
        if cfile is None:
            raise ConfigError(f"{path}: samples needs curve.file")
        state = load_support((path.parent / cfile) if not Path(cfile).is_absolute() else cfile)
        curve = FromSamples(state.h.values, state.grid.m)
        m = state.grid.m
    else:
        raise ConfigError(f"{path}: unknown curve.kind {curve_kind!r}")

    if m is None:
        m = curve.m
    n_explicit = "N" in table
    N = _take(table, "N", int, path, default=base.N if base else DEFAULT_N)
    if isinstance(curve, FromSamples):
        if n_explicit and curve.values.size != N:
            raise ConfigError(
                f"{path}: N={N} does not match the {curve.values.size} samples in "
                f"{cfile!r}; resampling is not supported"
            )
        N = curve.values.size
    tol_conv = _take(
        table, "tol_conv", float, path, default=base.tol_conv if base else DEFAULT_TOL_CONV
    )
    expected = _take(table, "expected", str, path, default=base.expected if base else "explore")
    if expected not in _EXPECTED_KINDS:
        raise ConfigError(
            f"{path}: expected must be one of {', '.join(_EXPECTED_KINDS)}, got {expected!r}"
        )
    out_dir = _take(
        table, "out_dir", str, path,
        default=str(base.out_dir) if base else f"out/{path.stem}",
    )

    def parse_times(text: str) -> tuple[float, ...]:
        return tuple(float(tok) for tok in text.replace(",", " ").split())

    t_end = _take(table, "ctl.t_end", float, path, default=base.ctl.t_end if base else None)
    if t_end is None:
        raise ConfigError(f"{path}: ctl.t_end is required when no preset is named")
    ctl = StepControl(
        t_end=t_end,
        cfl=_take(table, "ctl.cfl", float, path, default=base.ctl.cfl if base else 0.25),
        dt_max=_take(table, "ctl.dt_max", float, path, default=base.ctl.dt_max if base else None),
        dt_min=_take(table, "ctl.dt_min", float, path, default=base.ctl.dt_min if base else None),
        kappa_blowup=_take(
            table, "ctl.kappa_blowup", float, path,
            default=base.ctl.kappa_blowup if base else 1e6,
        ),
        sample_interval=_take(
            table, "ctl.sample_interval", float, path,
            default=base.ctl.sample_interval if base else None,
        ),
    )
    render_times = _take(
        table, "render_times", parse_times, path,
        default=base.render_times if base else (0.0, t_end),
    )

    if table:
        key, (_, lineno) = next(iter(table.items()))
        raise ConfigError(f"{path}:{lineno}: key {key!r} is not applicable here")

    return ScenarioConfig(
        curve=curve,
        params=FlowParams(alpha=alpha, m=m, kind=kind),
        ctl=ctl,
        N=N,
        tol_conv=tol_conv,
        expected=expected,
        out_dir=Path(out_dir),
        render_times=render_times,
        label=preset_name or path.stem,
        claim=base.claim if base else "",
    )


# ---------------------------------------------------------------------------
# argument parsing

def _cmd_list_presets(args) -> int:
    for p in list_presets():
        alphas = ", ".join(f"{a:g}" for a in p.alphas)
        print(f"{p.name:16s} kind={p.flow_kind} N={p.N:<5d} expect={p.expected:<10s} "
              f"alphas=[{alphas}]")
        print(f"{'':16s} {p.claim}")
    return 0


def _cmd_preset(args) -> int:
    if args.name not in PRESETS:
        print(f"error: unknown preset {args.name!r}; try 'curveflow list-presets'",
              file=sys.stderr)
        return 1
    preset = PRESETS[args.name]
    alphas = [args.alpha] if args.alpha is not None else list(preset.alphas)
    codes = []
    for alpha in alphas:
        out = Path(args.out) / args.name / f"alpha_{alpha:g}" if args.out else None
        cfg = preset_scenario(
            args.name, alpha, N=args.N, t_end=args.t_end, out_dir=out, flow_kind=args.kind
        )
        codes.append(run_scenario(cfg))
    for severity in (1, 3, 2):
        if severity in codes:
            return severity
    return 0


def _cmd_run(args) -> int:
    cfg = parse_config(args.config)
    return run_scenario(cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curveflow",
        description="Area- and length-preserving curvature-power flows of "
        "locally convex closed plane curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list-presets", help="show the scenario catalog")
    p_list.set_defaults(func=_cmd_list_presets)

    p_preset = sub.add_parser("preset", help="run a catalog scenario")
    p_preset.add_argument("name")
    p_preset.add_argument("--alpha", type=float, default=None,
                          help="run a single exponent instead of the preset's defaults")
    p_preset.add_argument("--N", type=int, default=None, help="override the grid size")
    p_preset.add_argument("--t-end", dest="t_end", type=float, default=None,
                          help="override the time horizon")
    p_preset.add_argument("--out", type=str, default=None, help="output root directory")
    p_preset.add_argument("--kind", choices=(AP, LP), default=None,
                          help="override the flow kind")
    p_preset.set_defaults(func=_cmd_preset)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("--config", required=True)
    p_run.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CurveFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
