"""Artifact emitters: CSV time series, JSONL state snapshots, SVG renders, reports."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .curves import FlowParams, SupportState, geometry, reconstruct_points
from .grid import PeriodicField, build_grid

__all__ = [
    "CSV_HEADER",
    "write_timeseries",
    "write_snapshots",
    "load_snapshots",
    "render_svg",
]

CSV_HEADER = (
    "t,dt,L,A,lambda,kappa_min,kappa_max,E,F_int,psi_max,"
    "h_min,h_max,h_ratio,isop_gap,rado_gap,convexity_margin"
)

_CSV_FIELDS = (
    "t", "dt", "L", "A", "lam", "kappa_min", "kappa_max", "E", "F_int",
    "psi_max", "h_min", "h_max", "h_ratio", "isop_gap", "rado_gap",
    "convexity_margin",
)


def write_timeseries(series, path: str | Path) -> None:
    """One CSV row per sample, full double precision (17 significant digits)."""
    lines = [CSV_HEADER]
    for d in series:
        lines.append(",".join(f"{getattr(d, name):.17g}" for name in _CSV_FIELDS))
    Path(path).write_text("\n".join(lines) + "\n")


def write_snapshots(states, params: FlowParams, path: str | Path) -> None:
    """One JSON object per sampled state: t, m, N, alpha, kind and the h samples."""
    with open(path, "w") as fh:
        for s in states:
            fh.write(
                json.dumps(
                    {
                        "t": s.t,
                        "m": s.grid.m,
                        "N": s.grid.N,
                        "alpha": params.alpha,
                        "kind": params.kind,
                        "h": s.h.values.tolist(),
                    }
                )
                + "\n"
            )


def load_snapshots(path: str | Path) -> list[tuple[SupportState, FlowParams]]:
    """Parse snapshots.jsonl back into states (exact float round trip)."""
    out: list[tuple[SupportState, FlowParams]] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        grid = build_grid(int(obj["m"]), int(obj["N"]))
        state = SupportState(grid, PeriodicField(grid, np.array(obj["h"])), float(obj["t"]))
        out.append((state, FlowParams(alpha=float(obj["alpha"]), m=grid.m, kind=obj["kind"])))
    return out


def render_svg(s: SupportState, path: str | Path, *, px: int = 640) -> None:
    """Stroke-only closed-path render of one state.

    Multi-winding curves self-overlap, so there is no fill; the viewBox is the
    curve's bounding box with a 5 percent margin, and the y axis is flipped to
    keep the mathematical orientation.
    """
    pts = reconstruct_points(s)
    xs, ys = pts[:, 0], -pts[:, 1]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-300)
    pad = 0.05 * span
    vb = (x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    g = geometry(s)
    d = "M " + " L ".join(f"{x:.6g} {y:.6g}" for x, y in zip(xs, ys)) + " Z"
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{px}" height="{px}" '
        f'viewBox="{vb[0]:.6g} {vb[1]:.6g} {vb[2]:.6g} {vb[3]:.6g}">\n'
        f"  <title>t={s.t:.9g}, L={g.L:.9g}, A={g.A:.9g}, "
        f"kappa in [{g.kappa_min:.6g}, {g.kappa_max:.6g}]</title>\n"
        f'  <path d="{d}" fill="none" stroke="black" stroke-width="{span / 300:.6g}"/>\n'
        "</svg>\n"
    )
    Path(path).write_text(svg)
