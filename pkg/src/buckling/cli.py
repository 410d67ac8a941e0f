"""Command-line front end: ``python3 -m buckling <solve|audit|bound|probe|oracle>``.

Exit codes: 0 success (audit: every inequality holds), 1 audit violation,
2 input or configuration error, 3 numerical failure.

Every option can also come from a JSON file given with ``--config``; keys
are the option names with dashes replaced by underscores. Options on the
command line override the file. The effective configuration is printed as
one JSON line on stdout before anything else, and that line can be fed back
through ``--config`` to repeat the run. Output files hold no timestamps or
timings (those go to stderr), so repeated runs give identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import defaults
from .bounds import (LOW_FORMS, BoundForm, as_form, audit_all, compatible_forms,
                     envelope, low_order_bounds, next_upper_bound)
from .discretize import DomainSpec
from .errors import BucklingError
from .oracle import (disk_buckling_spectrum, disk_membrane_spectrum,
                     rectangle_membrane_spectrum)
from .probe import probe, refinement_ratios
from .solve import compute_spectrum
from .spectrum import dumps_spectrum, read_spectrum_file

log = logging.getLogger("buckling.cli")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

COMMAND_DEFAULTS = {
    "solve": {"domain": None, "resolution": None, "a": 1.0, "b": 1.0,
              "aperture": None, "modes": defaults.MODES, "count": defaults.COUNT,
              "problem": "buckling", "tol": defaults.TOL, "seed": defaults.SEED,
              "output": "spectrum.json", "format": None, "meta": None,
              "plot_dir": None},
    "audit": {"spectrum": None, "forms": None, "rtol": defaults.AUDIT_RTOL,
              "output": "audit.json", "format": None, "plot_dir": None},
    "bound": {"spectrum": None, "forms": None, "k": None, "envelope": None,
              "dimension": 2, "K": 5, "output": "bounds.json", "format": None,
              "plot_dir": None},
    "probe": {"domain": None, "resolution": None, "a": 1.0, "b": 1.0,
              "count": defaults.PROBE_COUNT, "refine": False, "tol": defaults.TOL,
              "seed": defaults.SEED, "output": "probe.json", "plot_dir": None},
    "oracle": {"kind": "disk-buckling", "count": 10, "a": 1.0, "b": 1.0,
               "output": "oracle.json", "format": None},
}
REQUIRED = {"solve": ("domain",), "probe": ("domain",), "audit": ("spectrum",)}


class UsageError(Exception):
    """Bad or missing options; reported with exit code 2."""


# ---------------------------------------------------------------------------
# argument parsing


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _int_list(text):
    try:
        return [int(t) for t in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _domain_options(p, cap=True):
    p.add_argument("--domain", choices=("rectangle", "disk", "lshape", "cap"))
    p.add_argument("--resolution", type=int,
                   help="grid points per unit length (planar) or radial points")
    p.add_argument("--a", type=float, help="rectangle width")
    p.add_argument("--b", type=float, help="rectangle height")
    if cap:
        p.add_argument("--aperture", type=float, help="cap aperture in radians")
        p.add_argument("--modes", type=int, help="azimuthal modes 0..M (disk, cap)")


def _solver_options(p):
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python3 -m buckling", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--output", help="report file")
    common.add_argument("--plot-dir", dest="plot_dir",
                        help="directory for two-column series and a manifest")

    p = sub.add_parser("solve", parents=[common], argument_default=argparse.SUPPRESS,
                       help="compute the lowest eigenvalues of a domain")
    _domain_options(p)
    _solver_options(p)
    p.add_argument("--count", type=int)
    p.add_argument("--problem", choices=("buckling", "membrane"))
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--meta", help="metadata JSON (default: <output>.meta.json)")

    p = sub.add_parser("audit", parents=[common], argument_default=argparse.SUPPRESS,
                       help="check a spectrum against the inequalities")
    p.add_argument("--spectrum")
    p.add_argument("--forms", type=_csv_list)
    p.add_argument("--rtol", type=float)
    p.add_argument("--format", choices=("json", "csv"))

    p = sub.add_parser("bound", parents=[common], argument_default=argparse.SUPPRESS,
                       help="upper bounds on the next eigenvalue")
    p.add_argument("--spectrum")
    p.add_argument("--forms", type=_csv_list)
    p.add_argument("--k", type=_int_list, help="prefix lengths, comma separated")
    p.add_argument("--envelope", type=float, metavar="LAMBDA1",
                   help="iterate bounds from Lambda_1 alone")
    p.add_argument("--dimension", type=int, help="n for --envelope")
    p.add_argument("--K", type=int, help="envelope length")
    p.add_argument("--format", choices=("json", "csv"))

    p = sub.add_parser("probe", parents=[common], argument_default=argparse.SUPPRESS,
                       help="lemma residuals on a planar grid")
    _domain_options(p, cap=False)
    _solver_options(p)
    p.add_argument("--count", type=int)
    p.add_argument("--refine", action="store_true", help="also run at h/2 and report ratios")

    p = sub.add_parser("oracle", parents=[common], argument_default=argparse.SUPPRESS,
                       help="analytic reference spectra")
    p.add_argument("--kind", choices=("disk-buckling", "disk-membrane", "rectangle-membrane"))
    p.add_argument("--count", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--format", choices=("json", "csv"))
    return parser


def resolve_config(command: str, given: dict) -> dict:
    """defaults < config file < command-line flags."""
    config = dict(COMMAND_DEFAULTS[command])
    path = given.pop("config", None)
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path} is not valid JSON: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise UsageError("config file must hold a JSON object")
        doc = dict(doc)
        if doc.pop("command", command) != command:
            raise UsageError(f"config file is for another subcommand")
        unknown = sorted(set(doc) - set(config))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        config.update(doc)
    config.update(given)
    for key in REQUIRED.get(command, ()):
        if config.get(key) is None:
            raise UsageError(f"--{key.replace('_', '-')} is required")
    if command in ("solve", "probe") and config["resolution"] is None:
        config["resolution"] = defaults.resolution_for(config["domain"])
    if command == "solve" and config["meta"] is None:
        out = Path(config["output"])
        config["meta"] = str(out.with_name(out.stem + ".meta.json"))
    return config


# ---------------------------------------------------------------------------
# output helpers


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(config) -> str:
    if config.get("format"):
        return config["format"]
    return "csv" if str(config["output"]).lower().endswith(".csv") else "json"


def _csv_text(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row.get(c)
            if isinstance(v, float):
                v = repr(v)
            elif isinstance(v, (list, tuple)):
                v = ";".join(repr(float(x)) for x in v)
            elif v is None:
                v = ""
            out.append(v)
        w.writerow(out)
    return buf.getvalue()


def emit_plot(directory, series) -> None:
    """Write ``<name>.txt`` two-column files and ``manifest.json``.

    ``series`` holds (name, x_label, y_label, xs, ys) tuples.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = []
    for name, xl, yl, xs, ys in series:
        fname = f"{name}.txt"
        lines = [f"# {xl} {yl}"]
        lines += [f"{x!r} {float(y)!r}" for x, y in zip(xs, ys)]
        (directory / fname).write_text("\n".join(lines) + "\n")
        manifest.append({"name": name, "file": fname, "x": xl, "y": yl,
                         "points": len(xs)})
    (directory / "manifest.json").write_text(_json({"series": manifest}))


def _spec_from(config, planar_only=False) -> DomainSpec:
    shape = config["domain"]
    if planar_only and shape not in ("rectangle", "lshape"):
        raise UsageError(f"the probe needs a Cartesian grid; {shape} is radial only")
    return DomainSpec(shape=shape, resolution=int(config["resolution"]),
                      a=float(config["a"]), b=float(config["b"]),
                      aperture=config.get("aperture"),
                      mode_count=int(config.get("modes", defaults.MODES)))


def _forms(config):
    if config.get("forms") is None:
        return None
    names = config["forms"]
    if isinstance(names, str):
        names = _csv_list(names)
    try:
        return [as_form(f) for f in names]
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(config, out) -> int:
    spec = _spec_from(config)
    spectrum, meta = compute_spectrum(spec, int(config["count"]), problem=config["problem"],
                                      tol=float(config["tol"]), seed=int(config["seed"]))
    meta["config"] = config
    _write(config["output"], dumps_spectrum(spectrum, _fmt(config)))
    _write(config["meta"], _json(meta))
    if config.get("plot_dir"):
        emit_plot(config["plot_dir"], [("eigenvalues", "index", "value",
                                        list(range(1, len(spectrum) + 1)),
                                        spectrum.values)])
    print(f"{len(spectrum)} {config['problem']} eigenvalues on {spec.shape}: "
          + " ".join(f"{v:.6g}" for v in spectrum.values), file=out)
    print(f"max relative residual {meta['max_residual']:.2e}", file=out)
    return EXIT_OK


def cmd_audit(config, out) -> int:
    spectrum = read_spectrum_file(config["spectrum"])
    forms = compatible_forms(spectrum, _forms(config))
    if not forms:
        raise UsageError("no selected form applies to this spectrum")
    entries = audit_all(spectrum, forms, rtol=float(config["rtol"]))
    rows = [e.to_dict() for e in entries]
    if _fmt(config) == "csv":
        text = _csv_text(rows, ("form", "k", "lhs", "rhs", "residual", "satisfied", "delta"))
    else:
        text = _json(rows)
    _write(config["output"], text)
    ok = True
    series = []
    for form in forms:
        mine = [e for e in entries if e.form is form]
        if not mine:
            continue
        worst = min(mine, key=lambda e: e.residual)
        good = all(e.satisfied for e in mine)
        ok &= good
        print(f"{form.value:14s} min residual {worst.residual: .6e} at k={worst.k}"
              f"  {'ok' if good else 'VIOLATED'}", file=out)
        series.append((f"residual_{form.value}", "k", "residual",
                       [e.k for e in mine], [e.residual for e in mine]))
    if config.get("plot_dir"):
        emit_plot(config["plot_dir"], series)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_bound(config, out) -> int:
    forms = _forms(config)
    doc = {}
    series = []
    if config.get("envelope") is not None:
        lam1 = float(config["envelope"])
        n = int(config["dimension"])
        K = int(config["K"])
        doc["envelope"] = []
        for form in forms or [BoundForm.EUCLID_CY, BoundForm.EUCLID_THIS,
                              BoundForm.EUCLID_CONJ]:
            vals = envelope(lam1, n, form, K)
            doc["envelope"].append({"form": form.value, "values": vals})
            series.append((f"envelope_{form.value}", "k", "bound",
                           list(range(1, K + 1)), vals))
            print(f"envelope {form.value}: " + " ".join(f"{v:.6g}" for v in vals), file=out)
        doc["low_order"] = low_order_bounds(lam1, n).to_dict()
    if config.get("spectrum") is not None:
        spectrum = read_spectrum_file(config["spectrum"])
        ks = config.get("k") or list(range(1, len(spectrum) + 1))
        if isinstance(ks, int):
            ks = [ks]
        for k in ks:
            if not 1 <= int(k) <= len(spectrum):
                raise UsageError(f"k={k} outside 1..{len(spectrum)}")
        chosen = compatible_forms(spectrum, forms)
        if not chosen:
            raise UsageError("no selected form applies to this spectrum")
        rows = []
        for k in ks:
            prefix = spectrum.prefix(int(k))
            for form in chosen:
                if form in LOW_FORMS:
                    need = spectrum.dimension if form is BoundForm.LOW_ASHBAUGH else 1
                    if k != need:
                        continue
                row = next_upper_bound(prefix, form).to_dict()
                row["actual_next"] = prefix.next_value
                rows.append(row)
        doc["bounds"] = rows
        for form in chosen:
            mine = [r for r in rows if r["form"] == form.value]
            if mine:
                series.append((f"bound_{form.value}", "k", "upper_bound",
                               [r["k"] for r in mine], [r["upper_bound"] for r in mine]))
                last = mine[-1]
                print(f"{form.value:14s} k={last['k']} Lambda_k+1 <= {last['upper_bound']:.6g}",
                      file=out)
        if spectrum.problem == "buckling" and spectrum.geometry == "euclidean":
            doc["low_order"] = low_order_bounds(spectrum.values[0], spectrum.dimension).to_dict()
    if not doc:
        raise UsageError("give --spectrum or --envelope")
    if _fmt(config) == "csv":
        rows = list(doc.get("bounds", []))
        for env in doc.get("envelope", []):
            rows += [{"k": i + 1, "form": env["form"], "upper_bound": v, "method": "envelope"}
                     for i, v in enumerate(env["values"])]
        text = _csv_text(rows, ("k", "form", "lambda_k", "upper_bound", "gap_bound",
                                "method", "certificate_residual", "actual_next"))
    else:
        text = _json(doc)
    _write(config["output"], text)
    if config.get("plot_dir"):
        emit_plot(config["plot_dir"], series)
    return EXIT_OK


def cmd_probe(config, out) -> int:
    spec = _spec_from(config, planar_only=True)
    count = int(config["count"])
    kw = dict(tol=float(config["tol"]), seed=int(config["seed"]))
    report = probe(spec, count, **kw)
    doc = report.to_dict()
    if config.get("refine"):
        fine_spec = DomainSpec(shape=spec.shape, resolution=2 * spec.resolution,
                               a=spec.a, b=spec.b)
        fine = probe(fine_spec, count, **kw)
        doc["refined"] = fine.to_dict()
        doc["ratios"] = refinement_ratios(report, fine)
        for row in doc["ratios"]["entries"]:
            print(f"i={row['i']} p={row['p']} ratios L21 {row['L21']:.3f} "
                  f"L22 {row['L22']:.3f} norm split {row['norm_split_defect']:.3f}", file=out)
        print(f"c antisymmetry ratio {doc['ratios']['c_defect']:.3f}", file=out)
    for row in report.per_i:
        print(f"i={row['i']} Lambda={row['lambda']:.6g} L23={row['L23']:.4f} "
              f"statistic={row['conjecture_statistic']:.4f} "
              f"(proved floor 5/3, conjectured 3)", file=out)
    _write(config["output"], _json(doc))
    if config.get("plot_dir"):
        emit_plot(config["plot_dir"], [(
            "conjecture_statistic", "i", "statistic",
            [r["i"] for r in report.per_i],
            [r["conjecture_statistic"] for r in report.per_i])])
    return EXIT_OK


def cmd_oracle(config, out) -> int:
    kind, count = config["kind"], int(config["count"])
    if kind == "disk-buckling":
        spectrum = disk_buckling_spectrum(count)
    elif kind == "disk-membrane":
        spectrum = disk_membrane_spectrum(count)
    elif kind == "rectangle-membrane":
        spectrum = rectangle_membrane_spectrum(float(config["a"]), float(config["b"]), count)
    else:
        raise UsageError(f"unknown oracle kind {kind!r}")
    _write(config["output"], dumps_spectrum(spectrum, _fmt(config)))
    print(f"{kind}: " + " ".join(f"{v:.10g}" for v in spectrum.values), file=out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "audit": cmd_audit, "bound": cmd_bound,
            "probe": cmd_probe, "oracle": cmd_oracle}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    given = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
    start = time.perf_counter()
    try:
        config = resolve_config(args.command, given)
        print(json.dumps({"command": args.command, **config}, sort_keys=True), file=out)
        code = COMMANDS[args.command](config, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BucklingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC if isinstance(exc, ArithmeticError) else EXIT_INPUT
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, MemoryError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - start
    print(f"{args.command} finished in {elapsed:.2f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
