"""Command-line front end: simulate | optimize | scale | export.

Configs are JSON; lengths in millimetres, currents in amperes.  Outputs are
CSV field maps (SI columns plus a gauss magnitude column), JSON reports, and
an OBJ-style polyline export.  All files are written via temp-then-rename so
a failing run leaves no partial output.

Exit codes: 0 ok, 2 usage/config error, 3 infeasible start, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .analysis import find_field_zero, fit_gradients, mot_suitability
from .errors import (InfeasibleStart, InvalidGeometry, InvalidInput,
                     MotKitError, ZeroNotBracketed)
from .field import field_map_csv, sample_line, sample_plane
from .geometry import (COPPER, MATERIALS, GeometrySpec, Material, SegmentList,
                       build, make_free_path)
from .optimize import ObjectiveSpec, optimize_geometry, trace_csv
from .power import power_report
from .scaling import scaling_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# config parsing


def _require_keys(doc: dict, allowed: set, context: str):
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")


def _parse_material(doc) -> Material:
    if doc is None:
        return COPPER
    if isinstance(doc, str):
        if doc not in MATERIALS:
            raise ConfigError(f"unknown material {doc!r}")
        return MATERIALS[doc]
    _require_keys(doc, {"name", "resistivity_ohm_m"}, "material")
    try:
        return Material(doc.get("name", "custom"),
                        float(doc["resistivity_ohm_m"]))
    except (KeyError, ValueError, InvalidInput) as exc:
        raise ConfigError(f"bad material section: {exc}") from exc


def _parse_analysis(doc) -> dict:
    doc = doc or {}
    _require_keys(doc, {"window_mm", "samples", "scan_halfrange_mm",
                        "scan_points", "plane_points", "search_radius_mm"},
                  "analysis")
    return {
        "window": float(doc.get("window_mm", 2.0)) * 1e-3,
        "samples": int(doc.get("samples", 41)),
        "scan_halfrange": float(doc.get("scan_halfrange_mm", 5.0)) * 1e-3,
        "scan_points": int(doc.get("scan_points", 101)),
        "plane_points": int(doc.get("plane_points", 21)),
        "search_radius": float(doc.get("search_radius_mm", 3.0)) * 1e-3,
    }


def _parse_objective(doc) -> ObjectiveSpec:
    _require_keys(doc, {"target_gradient_Gcm", "target_ratio", "weights",
                        "beam_diameter_mm", "max_power_W", "bounds_mm",
                        "power_ref_W"}, "objective")
    weights = doc.get("weights", {})
    _require_keys(weights, {"w_mag", "w_ratio", "w_power"}, "objective.weights")
    bounds = {}
    for name, pair in doc.get("bounds_mm", {}).items():
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ConfigError(f"bounds for {name!r} must be [lo, hi]")
        bounds[name] = (float(pair[0]) * 1e-3, float(pair[1]) * 1e-3)
    try:
        return ObjectiveSpec(
            target_gradient=float(doc.get("target_gradient_Gcm", 15.0)),
            target_ratio=tuple(doc.get("target_ratio", (1.0, 1.0, -2.0))),
            w_mag=float(weights.get("w_mag", 1.0)),
            w_ratio=float(weights.get("w_ratio", 1.0)),
            w_power=float(weights.get("w_power", 0.1)),
            power_ref=float(doc.get("power_ref_W", 1.0)),
            beam_diameter=float(doc.get("beam_diameter_mm", 15.0)) * 1e-3,
            max_power=(float(doc["max_power_W"])
                       if doc.get("max_power_W") is not None else None),
            bounds=bounds,
        )
    except (ValueError, InvalidInput) as exc:
        raise ConfigError(f"bad objective section: {exc}") from exc


def resolve_config_path(name: str) -> str:
    """Accept either a config file path or the name of a bundled preset.

    Preset names resolve against the package presets/ directory; an explicit
    path always wins.
    """
    if os.path.exists(name):
        return name
    base = name if name.endswith(".json") else name + ".json"
    candidate = os.path.join(os.path.dirname(__file__), "presets", base)
    if os.path.basename(base) == base and os.path.exists(candidate):
        return candidate
    raise ConfigError(f"config {name!r} is neither a file nor a bundled preset")


def load_config(path: str) -> dict:
    path = resolve_config_path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(doc, {"geometry", "analysis", "material", "objective"},
                  "config")
    if "geometry" not in doc:
        raise ConfigError("config is missing the 'geometry' section")
    try:
        geometry = GeometrySpec.from_json_dict(doc["geometry"])
    except (InvalidInput, InvalidGeometry, TypeError, ValueError) as exc:
        raise ConfigError(f"bad geometry section: {exc}") from exc
    return {
        "geometry": geometry,
        "analysis": _parse_analysis(doc.get("analysis")),
        "material": _parse_material(doc.get("material")),
        "objective": (_parse_objective(doc["objective"])
                      if "objective" in doc else None),
    }


# ---------------------------------------------------------------------------
# output helpers


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".motkit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_outdir(out: str):
    if not os.path.isdir(out):
        try:
            os.makedirs(out, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    _check_outdir(args.out)
    threads = args.threads if args.threads and args.threads > 0 else 1
    ana = cfg["analysis"]
    segs = build(cfg["geometry"])
    zero = find_field_zero(segs, search_radius=ana["search_radius"])
    greport = fit_gradients(segs, zero, window=ana["window"], n=ana["samples"])
    preport = power_report(cfg["geometry"], cfg["material"])
    verdict = mot_suitability(greport)

    outputs = {}
    axes = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    for name, direction in axes.items():
        fmap = sample_line(segs, zero, direction, ana["scan_halfrange"],
                           ana["scan_points"], threads=threads)
        outputs[f"scan_{name}.csv"] = field_map_csv(fmap)
    planes = {"xy": ((1, 0, 0), (0, 1, 0)), "xz": ((1, 0, 0), (0, 0, 1)),
              "zy": ((0, 0, 1), (0, 1, 0))}
    for name, (a1, a2) in planes.items():
        fmap = sample_plane(segs, zero, a1, a2, ana["scan_halfrange"],
                            ana["plane_points"], ana["plane_points"],
                            threads=threads)
        outputs[f"plane_{name}.csv"] = field_map_csv(fmap)
    outputs["report.json"] = _json_text({
        "gradient_report": greport.to_json_dict(),
        "power_report": preport.to_json_dict(),
        "suitability": verdict.to_json_dict(),
    })
    for name, text in outputs.items():
        _atomic_write(os.path.join(args.out, name), text)
    g = greport.g
    print(f"zero at {np.array2string(zero * 1e3, precision=4)} mm")
    print(f"gradients: {g[0]:.3f}, {g[1]:.3f}, {g[2]:.3f} G/cm "
          f"(ratio 1 : {greport.ratio[1]:.3f} : {greport.ratio[2]:.3f})")
    print(f"total power: {preport.total_power:.4f} W ({preport.material.name})")
    print(f"MOT suitability: {'pass' if verdict.passed else 'fail'}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if cfg["objective"] is None:
        raise ConfigError("config is missing the 'objective' section")
    _check_outdir(args.out)
    result = optimize_geometry(cfg["geometry"], cfg["objective"],
                               budget=args.budget, material=cfg["material"])
    _atomic_write(os.path.join(args.out, "opt_result.json"),
                  _json_text(result.to_json_dict()))
    _atomic_write(os.path.join(args.out, "opt_trace.csv"), trace_csv(result))
    print("best parameters:")
    for name, value in sorted(result.best_parameters.items()):
        print(f"  {name} = {value * 1e3:.4f} mm")
    print(f"objective {result.best_objective:.6g} after "
          f"{result.evaluations} evaluations "
          f"({'converged' if result.converged else 'budget exhausted'})")
    return EXIT_OK


def cmd_scale(args) -> int:
    if args.k <= 0:
        raise ConfigError("scale factor must be positive")
    report = scaling_report(args.k)
    print(f"linear scale factor k = {report.k:g}")
    print(f"{'quantity':<12}{'ratio':>12}")
    for name, value in report.ratios.items():
        print(f"{name:<12}{value:>12.6g}")
    if args.out:
        _check_outdir(args.out)
        _atomic_write(os.path.join(args.out, "scaling.json"),
                      _json_text(report.to_json_dict()))
    else:
        print(json.dumps(report.to_json_dict(), sort_keys=True))
    return EXIT_OK


def export_obj(segments: SegmentList) -> str:
    """OBJ-style polylines: `v` vertices in millimetres, `l` elements,
    one object per conductor group."""
    lines = []
    offset = 0
    for gid in segments.groups():
        part = segments.group(gid)
        lines.append(f"o {gid}")
        index = {}
        order = []
        for p in np.vstack([part.starts, part.ends]):
            key = tuple(np.round(p * 1e3, 6))
            if key not in index:
                index[key] = len(order) + 1 + offset
                order.append(key)
        for key in order:
            lines.append("v " + " ".join(f"{c:.6f}" for c in key))
        for s, e in zip(part.starts, part.ends):
            i = index[tuple(np.round(s * 1e3, 6))]
            j = index[tuple(np.round(e * 1e3, 6))]
            lines.append(f"l {i} {j}")
        offset += len(order)
    return "\n".join(lines) + "\n"


def import_obj(text: str, currents: dict | None = None) -> SegmentList:
    """Rebuild a SegmentList from an exported OBJ.

    `currents` maps group name to the current each segment in that group
    carries (default 1 A); the export format itself is geometry-only.
    """
    vertices = []
    out = None
    group = "default"
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "o":
            group = parts[1]
        elif parts[0] == "v":
            vertices.append([float(c) * 1e-3 for c in parts[1:4]])
        elif parts[0] == "l":
            i, j = int(parts[1]), int(parts[2])
            cur = (currents or {}).get(group, 1.0)
            seg = make_free_path([vertices[i - 1], vertices[j - 1]], cur,
                                 group_id=group)
            out = seg if out is None else out + seg
    if out is None:
        raise ConfigError("no line elements in OBJ input")
    return out


def cmd_export(args) -> int:
    cfg = load_config(args.config)
    _check_outdir(args.out)
    segs = build(cfg["geometry"])
    _atomic_write(os.path.join(args.out, "geometry.obj"), export_obj(segs))
    print(f"wrote {len(segs)} segments in {len(segs.groups())} groups")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motkit",
        description="Magnetostatic design toolkit for compact printed traps")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="field maps, gradients, power budget")
    sim.add_argument("--config", required=True,
                     help="config file or bundled preset name")
    sim.add_argument("--out", required=True)
    sim.add_argument("--threads", type=int, default=0,
                     help="field-sampling threads (0 = serial)")
    sim.add_argument("--seed", type=int, default=0,
                     help="reserved; no stochastic components currently")
    sim.set_defaults(func=cmd_simulate)

    opt = sub.add_parser("optimize", help="search geometry parameters")
    opt.add_argument("--config", required=True,
                     help="config file or bundled preset name")
    opt.add_argument("--out", required=True)
    opt.add_argument("--budget", type=int, default=200)
    opt.add_argument("--threads", type=int, default=0)
    opt.add_argument("--seed", type=int, default=0,
                     help="reserved; no stochastic components currently")
    opt.set_defaults(func=cmd_optimize)

    sca = sub.add_parser("scale", help="print miniaturisation ratios")
    sca.add_argument("k", type=float)
    sca.add_argument("--out", default=None)
    sca.set_defaults(func=cmd_scale)

    exp = sub.add_parser("export", help="write geometry as OBJ polylines")
    exp.add_argument("--config", required=True)
    exp.add_argument("--out", required=True)
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidInput, InvalidGeometry) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleStart as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ZeroNotBracketed, MotKitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
