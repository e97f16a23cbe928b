"""Command-line front end: thresholds, design, sweep and cuts subcommands.

All file artifacts are deterministic: identical configs and inputs produce
byte-identical outputs (no timestamps inside data files).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analysis, ems
from .aperture import export_layout, scenario_fingerprint
from .errors import FresnelValidityWarning, SkinlinkError
from .field_engine import FieldCut, field_cut_map
from .pcs import PcsPanel, pcs_currents, pcs_tpa
from .scenario import LinkScenario, db, load_scenario

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY_INTERVAL = 2

_NEAR_GRAZING = math.radians(85.0)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", required=True, help="scenario config file")
    parser.add_argument("--table", default="synthetic",
                        help="reflection table CSV path, or 'synthetic' (default)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--strict-fresnel", action="store_true",
                        help="reject Fresnel-invalid geometry instead of warning")
    parser.add_argument("--centered-cells", action="store_true",
                        help="shift cell barycenters by half a pitch into the cells")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skinlink",
        description="NLOS specular link analysis with passive reflective screens")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="closed-form panel sizing interval")
    _add_common(p)

    p = sub.add_parser("design", help="synthesize a skin layout")
    _add_common(p)
    p.add_argument("--side-l", type=float, required=True, help="panel side [m]")

    p = sub.add_parser("sweep", help="sweep a scenario variable and tabulate TPA")
    _add_common(p)
    p.add_argument("--variable", default="side_l",
                   help=f"one of {', '.join(analysis.SWEEP_VARIABLES)}")
    p.add_argument("--values", required=True,
                   help="comma list or start:stop:count (SI units; degrees for theta0)")
    p.add_argument("--side-l", type=float, default=None,
                   help="fixed panel side [m] (required unless sweeping side_l)")

    p = sub.add_parser("cuts", help="field-magnitude maps around the receiver")
    _add_common(p)
    p.add_argument("--side-l", type=float, required=True, help="panel side [m]")
    p.add_argument("--plane", default="both",
                   help="transversal, longitudinal or both")
    p.add_argument("--extent", type=float, default=3.0,
                   help="half extent of the cut around the receiver [m]")
    p.add_argument("--points", type=int, default=61, help="samples per cut axis")
    return parser


def _parse_values(spec: str, variable: str) -> list[float]:
    spec = spec.strip()
    if not spec:
        raise SkinlinkError("empty sweep values")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise SkinlinkError("range values must look like start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise SkinlinkError("range count must be at least 1")
        values = list(np.linspace(start, stop, count))
    else:
        values = [float(v) for v in spec.split(",") if v.strip()]
    if not values:
        raise SkinlinkError("empty sweep values")
    if variable == "theta0":
        values = [math.radians(v) for v in values]
    return values


def _load_table(arg: str) -> ems.ReflectionLookupTable:
    if arg == "synthetic":
        return ems.synthetic_table()
    return ems.load_reflection_table(arg)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_markers(path: Path, interval, marker_set=None) -> None:
    doc = {
        "l_th_m": interval.l_th,
        "l_fr_m": interval.l_fr,
        "nonempty": interval.nonempty,
        "l_th_ems_m": marker_set.l_th_ems if marker_set else None,
        "l_th_ems_present": bool(marker_set and marker_set.l_th_ems_present),
        "l_pcs_ems_m": marker_set.l_pcs_ems if marker_set else None,
        "l_pcs_ems_present": bool(marker_set and marker_set.l_pcs_ems_present),
    }
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="ascii")


def cmd_thresholds(args) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.theta0 > _NEAR_GRAZING:
        print("warning: near-grazing incidence, the threshold side grows without bound",
              file=sys.stderr)
    interval = analysis.optimality_interval(scenario)
    print(f"L_TH = {interval.l_th:.6f} m")
    print(f"L_FR = {interval.l_fr:.6f} m")
    print(f"interval {'nonempty' if interval.nonempty else 'empty'}")
    _write_markers(_outdir(args) / "markers.json", interval)
    return EXIT_OK if interval.nonempty else EXIT_EMPTY_INTERVAL


def _ring_count(matrix: np.ndarray, g_lo: float, g_hi: float) -> int:
    """Concentric-band count: 1 + geometry resets along the center-to-corner diagonal."""
    p, q = matrix.shape
    half = min(p, q) - min(p, q) // 2
    diag = np.array([matrix[p // 2 + i, q // 2 + i] for i in range(half)])
    if diag.size < 2:
        return 1
    jumps = np.abs(np.diff(diag)) > 0.5 * (g_hi - g_lo)
    return 1 + int(jumps.sum())


def cmd_design(args) -> int:
    scenario = load_scenario(args.scenario)
    table = _load_table(args.table)
    fresnel = "strict" if args.strict_fresnel else "warn"
    panel, targets = ems.design_panel(scenario, args.side_l, table,
                                      centered=args.centered_cells)
    phi = ems.synthesis_mismatch(panel.grid, table, panel.d, targets, scenario)
    a_ems = ems.ems_tpa(scenario, panel, fresnel=fresnel)
    a_opt = ems.ems_upper_bound_tpa(scenario, panel.grid.side_l)
    a_pcs = pcs_tpa(scenario, args.side_l, centered=args.centered_cells, fresnel="off")
    rings = _ring_count(panel.d.as_matrix(), *table.g_range)

    out = _outdir(args)
    layout = export_layout(panel.d, panel.grid, scenario.f,
                           scenario_hash=scenario_fingerprint(scenario))
    (out / "layout.json").write_text(layout, encoding="ascii")
    report = {
        "cell_count": panel.grid.cell_count,
        "side_l_m": panel.grid.side_l,
        "pitch_m": panel.grid.pitch,
        "phi_total_rad2": phi,
        "ring_count": rings,
        "a_ems_db": db(a_ems),
        "a_opt_db": db(a_opt),
        "a_pcs_db": db(a_pcs),
    }
    (out / "design_report.json").write_text(
        json.dumps(report, indent=1, sort_keys=True) + "\n", encoding="ascii")
    print(f"cells: {panel.grid.p_count} x {panel.grid.q_count}")
    print(f"residual phase mismatch: {phi:.6g} rad^2")
    print(f"ring count: {rings}")
    print(f"TPA achieved {db(a_ems):.2f} dB vs ideal {db(a_opt):.2f} dB")
    return EXIT_OK


def _fmt(value: float) -> str:
    return repr(float(value))


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    table = _load_table(args.table)
    values = _parse_values(args.values, args.variable)
    rows = analysis.sweep(scenario, args.variable, values, table,
                          side_l=args.side_l, centered=args.centered_cells)
    out = _outdir(args)
    lines = ["var,value,a_pcs_db,a_ems_db,a_opt_db,a_inf_db,fresnel_ok"]
    for row in rows:
        if row.error is None:
            cols = [row.variable, _fmt(row.value), _fmt(row.a_pcs_db),
                    _fmt(row.a_ems_db), _fmt(row.a_opt_db), _fmt(row.a_inf_db),
                    str(row.fresnel_ok).lower()]
        else:
            cols = [row.variable, _fmt(row.value), "nan", "nan", "nan", "nan", "false"]
        lines.append(",".join(cols))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="ascii")

    interval = analysis.optimality_interval(scenario)
    marker_set = None
    good = [r for r in rows if r.error is None]
    if args.variable == "side_l" and len(good) >= 3:
        marker_set = analysis.markers(good, scenario, table,
                                      centered=args.centered_cells)
    _write_markers(out / "markers.json", interval, marker_set)
    for row in rows:
        if row.error is not None:
            print(f"row {row.value}: {row.error}", file=sys.stderr)
    print(f"wrote {len(rows)} sweep rows")
    return EXIT_OK if good else EXIT_ERROR


def _write_cut(out: Path, name: str, cut_map, cut: FieldCut, scenario) -> None:
    lines = ["u_m,v_m,e_phi_abs_v_per_m,e_total_abs_v_per_m"]
    for i, u in enumerate(cut_map.u):
        for j, v in enumerate(cut_map.v):
            lines.append(",".join([_fmt(u), _fmt(v),
                                   _fmt(cut_map.e_phi_abs[i, j]),
                                   _fmt(cut_map.e_total_abs[i, j])]))
    (out / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="ascii")
    sidecar = {
        "plane": cut.plane,
        "half_extent_m": cut.half_extent,
        "points": int(cut_map.u.size),
        "receiver_r_m": scenario.r_rx,
        "theta0_rad": scenario.theta0,
        "scenario_hash": scenario_fingerprint(scenario),
    }
    (out / f"{name}.meta.json").write_text(
        json.dumps(sidecar, indent=1, sort_keys=True) + "\n", encoding="ascii")


def cmd_cuts(args) -> int:
    if args.plane not in ("transversal", "longitudinal", "both"):
        raise SkinlinkError(f"unknown cut plane {args.plane!r}")
    scenario = load_scenario(args.scenario)
    table = _load_table(args.table)
    fresnel = "strict" if args.strict_fresnel else "warn"
    panel, _ = ems.design_panel(scenario, args.side_l, table,
                                centered=args.centered_cells)
    screens = {
        "pcs": pcs_currents(PcsPanel(grid=panel.grid), scenario),
        "ems": ems.gstc_currents(panel, scenario),
    }
    planes = ["transversal", "longitudinal"] if args.plane == "both" else [args.plane]
    out = _outdir(args)
    with warnings.catch_warnings():
        if fresnel == "warn":
            warnings.simplefilter("once", FresnelValidityWarning)
        for plane in planes:
            cut = FieldCut(plane=plane, half_extent=args.extent, points=args.points)
            for screen, currents in screens.items():
                cut_map = field_cut_map(currents, cut, scenario, fresnel=fresnel)
                _write_cut(out, f"cuts_{screen}_{plane}", cut_map, cut, scenario)
    print(f"wrote {len(planes) * len(screens)} cut maps")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "thresholds": cmd_thresholds,
        "design": cmd_design,
        "sweep": cmd_sweep,
        "cuts": cmd_cuts,
    }
    try:
        return handlers[args.command](args)
    except SkinlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
