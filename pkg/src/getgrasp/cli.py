"""
Command-line interface.

::

    getgrasp analyze SUITE.yaml [--out DIR] [--format json|csv|both] [--strict] [--render]
    getgrasp render  SUITE.yaml [--out DIR]
    getgrasp sweep   SUITE.yaml --param mu --values 0.25,0.5,1.0 [--out DIR]

Exit codes: 0 success, 2 usage or schema error, 3 row failures with ``--strict``.
Set ``GETGRASP_LOG`` (e.g. ``INFO`` or ``DEBUG``) for log output on stderr.
"""
import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import re
import sys
import tempfile

import numpy as np

from . import __version__, analysis, contact, render
from .errors import GraspError
from .geometry import lever_arm
from .scenario_file import ScenarioFileError, load_scenario_file

log = logging.getLogger("getgrasp")

EXIT_OK, EXIT_USAGE, EXIT_ROWS = 0, 2, 3
SWEEP_PARAMS = ("w", "L", "mu", "f_max", "v_half_angle", "site_s")
CSV_FIELDS = (
    "scenario", "gripper", "object", "status", "site_s", "f_max", "kinds", "tau_x_max", "tau_y_max",
    "tau_z_max", "force_min", "epsilon", "weight_capacity", "weight_held", "secure", "hash", "error",
)


class UsageError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("GETGRASP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_jsonl(rows):
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in rows)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        out = {k: r.get(k) for k in CSV_FIELDS}
        out["kinds"] = "+".join(c["kind"] for c in r.get("contacts", []))
        w.writerow({k: "" if v is None else v for k, v in out.items()})
    return buf.getvalue()


def _safe(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "unnamed"


def _load(path, args):
    return load_scenario_file(path, seed=args.seed, cone_edges=args.cone_edges)


def render_suite(sf, rows, out_dir):
    """Write one cross-section SVG per successful row plus an envelope chart.

    Returns the list of per-file render errors; rendering never raises.
    """
    errors = []
    svg_dir = os.path.join(out_dir, "svg")
    ng = len(sf.grippers)
    for i, scn in enumerate(sf.scenarios):
        for j, g in enumerate(sf.grippers):
            row = rows[i * ng + j]
            fname = os.path.join(svg_dir, f"{_safe(scn.name)}__{_safe(g.name)}.svg")
            if row["status"] != "ok":
                continue
            try:
                f_max = g.f_max if scn.f_max is None else scn.f_max
                cs = contact.close_jaws(g, scn.object, row["site_s"], sf.config.contact_config(), f_max)
                mu = scn.object.mu if sf.config.mu is None else sf.config.mu
                write_atomic(fname, render.cross_section_svg(g, scn.object, cs, mu, f"{scn.name} / {g.name}"))
            except (GraspError, OSError, ValueError) as e:
                errors.append(f"{fname}: {e}")
    try:
        write_atomic(os.path.join(svg_dir, "envelope.svg"), render.envelope_bars_svg(rows))
    except (OSError, ValueError) as e:
        errors.append(f"envelope.svg: {e}")
    for e in errors:
        print(f"render error: {e}", file=sys.stderr)
    return errors


def cmd_analyze(args):
    sf = _load(args.path, args)
    report = analysis.compare_grippers(sf.scenarios, sf.grippers, sf.config)
    rows = report.rows
    out = args.out
    if args.format in ("json", "both"):
        write_atomic(os.path.join(out, "report.jsonl"), rows_to_jsonl(rows))
        summary = report.as_dict()
        summary["config"] = dataclasses.asdict(sf.config)
        summary["rows"] = len(rows)
        write_atomic(os.path.join(out, "summary.json"), json.dumps(summary, sort_keys=True, indent=2) + "\n")
    if args.format in ("csv", "both"):
        write_atomic(os.path.join(out, "report.csv"), rows_to_csv(rows))
    if args.render:
        render_suite(sf, rows, out)
    failed = [r for r in rows if r["status"] != "ok"]
    for r in failed:
        print(f"row failed: {r['scenario']}/{r['gripper']}: {r['status']}: {r['error']}", file=sys.stderr)
    print(f"{len(rows)} rows, {len(failed)} failed; secure fraction {report.secure_fraction}")
    return EXIT_ROWS if failed and args.strict else EXIT_OK


def cmd_render(args):
    sf = _load(args.path, args)
    rows = analysis.run_batch(sf.scenarios, sf.grippers, sf.config)
    errors = render_suite(sf, rows, args.out)
    return EXIT_ROWS if errors and args.strict else EXIT_OK


def parse_values(values, rng):
    if values:
        try:
            vals = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"cannot parse --values '{values}'") from None
    elif rng:
        try:
            a, b, n = rng.split(":")
            vals = list(np.linspace(float(a), float(b), int(n)))
        except ValueError:
            raise UsageError(f"--range must be START:STOP:COUNT, got '{rng}'") from None
    else:
        vals = []
    if not vals:
        raise UsageError("empty sweep range")
    return vals


def _with_param(param, value, scn, g, cfg):
    """Scenario, gripper and config with one parameter replaced."""
    rep = dataclasses.replace
    if param == "w":
        fingers = [rep(f, width_base=value, width_tip=value * f.taper_ratio) for f in g.fingers]
        g = rep(g, fingers=fingers)
    elif param == "L":
        site = analysis.resolve_site(g, scn.object, scn.site)
        lever_arm(g, site)  # raises for flat pairs
        tan_a = np.tan(np.radians(g.v_half_angle))
        g = rep(g, base_separation=value + 2.0 * site * tan_a)
        scn = rep(scn, site=site)
    elif param == "mu":
        cfg = rep(cfg, mu=value)
    elif param == "f_max":
        scn = rep(scn, f_max=value)
    elif param == "v_half_angle":
        if not g.is_v:
            lever_arm(g, 0.0)
        g = rep(g, v_half_angle=value)
    elif param == "site_s":
        scn = rep(scn, site=value)
    return scn, g, cfg


def cmd_sweep(args):
    if args.param not in SWEEP_PARAMS:
        raise UsageError(f"unknown sweep parameter '{args.param}' (choose from {', '.join(SWEEP_PARAMS)})")
    values = parse_values(args.values, args.range)
    sf = _load(args.path, args)
    scns = [s for s in sf.scenarios if not args.scenario or s.name == args.scenario]
    grips = [g for g in sf.grippers if not args.gripper or g.name == args.gripper]
    if not scns or not grips:
        raise UsageError("no scenario or gripper matches the selection")
    buf = io.StringIO()
    fields = ("parameter", "value", "scenario", "gripper", "status", "tau_x_max", "tau_y_max", "tau_z_max",
              "force_min", "epsilon")
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    failed = 0
    for v in values:
        for i, s in enumerate(scns):
            for j, g in enumerate(grips):
                try:
                    s2, g2, cfg = _with_param(args.param, v, s, g, sf.config)
                    row = analysis.run_scenario(s2, g2, cfg, row_index=i * len(grips) + j)
                except GraspError as e:
                    row = {"status": e.code, "error": str(e)}
                failed += row["status"] != "ok"
                w.writerow({
                    "parameter": args.param, "value": f"{v:.10g}", "scenario": s.name, "gripper": g.name,
                    "status": row["status"],
                    **{k: "" if row.get(k) is None else row.get(k)
                       for k in ("tau_x_max", "tau_y_max", "tau_z_max", "force_min", "epsilon")},
                })
    write_atomic(os.path.join(args.out, f"sweep_{args.param}.csv"), buf.getvalue())
    print(f"sweep {args.param}: {len(values)} values, {failed} failed rows")
    return EXIT_ROWS if failed and args.strict else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="getgrasp", description="Grasp mechanics analysis for V-pair and flat grippers.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("path", help="scenario file (YAML)")
        sp.add_argument("--out", default="getgrasp_out", help="output directory")
        sp.add_argument("--strict", action="store_true", help="exit 3 if any row fails")
        sp.add_argument("--seed", type=int, default=None, help="override the pose-jitter seed")
        sp.add_argument("--cone-edges", type=int, default=None, help="override friction cone edges")

    a = sub.add_parser("analyze", help="analyse every scenario x gripper pair")
    common(a)
    a.add_argument("--format", choices=("json", "csv", "both"), default="both")
    a.add_argument("--render", action="store_true", help="also write SVG diagrams")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("render", help="write cross-section and envelope SVGs")
    common(r)
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("sweep", help="sweep one parameter and write a CSV")
    common(s)
    s.add_argument("--param", required=True, help=f"one of {', '.join(SWEEP_PARAMS)}")
    s.add_argument("--values", help="comma-separated values")
    s.add_argument("--range", help="START:STOP:COUNT (inclusive linspace)")
    s.add_argument("--scenario", help="restrict to one scenario name")
    s.add_argument("--gripper", help="restrict to one gripper name")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if args.cone_edges is not None and args.cone_edges < 3:
        print("error: --cone-edges must be >= 3", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ScenarioFileError as e:
        for msg in e.errors:
            print(f"{args.path}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
