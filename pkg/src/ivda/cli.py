"""Command-line front end.

Subcommands orchestrate ingestion, latent fitting, distances, barycentres,
covariance/correlation matrices, and plot-data emission. All numbers come
from the library modules; this file only parses, wires, and writes. Outputs
are deterministic: identical inputs and configuration produce byte-identical
files.

Exit codes: 0 success, 2 validation failure, 3 numeric failure. Failures
emit a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .errors import DataValidationError, DomainError, NumericFailure
from .estimation import fit_beta_mom, fit_kde, fit_triangular_pearson
from .ingest import (
    aggregate,
    load_interval_csv,
    read_microdata_csv,
    read_scaled_csv,
    read_summary_csv,
    write_interval_csv,
    write_scaled_csv,
)
from .interval import Interval
from .latent import Degenerate, latent_from_dict, latent_to_dict
from .mallows import distance_matrix, iso_distance_set
from .moments import (
    correlation_from_cov,
    correlation_matrix,
    cov_model7,
    frobenius_diff,
    jacobi_eigenvalues,
    sample_barycentre,
    symbolic_covariance,
)

_SHORTHAND_FAMILIES = {
    "uniform": ("uniform", ()),
    "triangular": ("triangular", ("mode",)),
    "invtriangular": ("inverted_triangular", ()),
    "inverted_triangular": ("inverted_triangular", ()),
    "truncnormal": ("truncated_normal", ("sigma2",)),
    "truncated_normal": ("truncated_normal", ("sigma2",)),
    "beta": ("shifted_beta", ("alpha", "beta")),
    "shifted_beta": ("shifted_beta", ("alpha", "beta")),
    "degenerate": ("degenerate", ()),
}


def _parse_latent_shorthand(text):
    """Parse 'triangular:0', 'beta:0.44,2.15', 'uniform', ... into a dict."""
    name, _, params = text.partition(":")
    name = name.strip().lower()
    if name not in _SHORTHAND_FAMILIES:
        raise DomainError(f"unknown latent family shorthand {name!r}")
    family, fields = _SHORTHAND_FAMILIES[name]
    spec = {"family": family}
    if params:
        values = [v for v in params.split(",") if v.strip()]
        if len(values) > len(fields):
            raise DomainError(f"too many parameters for latent family {name!r}")
        for key, value in zip(fields, values):
            spec[key] = float(value)
    return spec


def _resolve_latents(frame, latents_arg, base_dir="."):
    """Attach latents to a frame from a shorthand or a JSON mapping file.

    Variables whose ranges are all zero receive the degenerate latent
    automatically, matching the zero-range convention.
    """
    if latents_arg is None:
        raise DataValidationError("no latent specification given (use --latents)")
    path = Path(latents_arg)
    if path.suffix == ".json" and path.exists():
        mapping = json.loads(path.read_text(encoding="utf-8"))
        resolved = {name: latent_from_dict(spec, base_dir=path.parent)
                    for name, spec in mapping.items()}
    else:
        spec = _parse_latent_shorthand(latents_arg)
        resolved = {name: latent_from_dict(spec, base_dir=base_dir)
                    for name in frame.names}
    ranges = frame.ranges
    for j, name in enumerate(frame.names):
        if np.all(ranges[:, j] == 0.0):
            resolved[name] = Degenerate()
    return frame.with_latents(resolved)


def _load_valid_frame(path, latents_arg=None):
    frame = load_interval_csv(path)
    violations = frame.validate()
    if violations:
        raise DataValidationError(
            f"{path}: {len(violations)} validation violation(s)",
            violations=[v.__dict__ for v in violations])
    if latents_arg is not None:
        frame = _resolve_latents(frame, latents_arg)
    return frame


def _write_matrix_csv(matrix, names, path):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["", *names])
        for name, row in zip(names, np.asarray(matrix)):
            writer.writerow([name, *[repr(float(v)) for v in row]])


def _read_matrix_csv(path):
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataValidationError(f"{path}: empty file")
        names = header[1:]
        rows = [[float(v) for v in row[1:]] for row in reader if row]
    return np.array(rows), names


def _emit(obj):
    print(json.dumps(obj, sort_keys=True))


def _require(args, *names):
    # required values may come from the config file, so the parser cannot
    # enforce them; check after defaults are merged
    missing = [name for name in names if getattr(args, name, None) is None]
    if missing:
        raise DataValidationError(
            "missing required argument(s): " + ", ".join(f"--{m}" for m in missing))


# --- subcommands ----------------------------------------------------------

def _cmd_aggregate(args):
    _require(args, "microdata", "out")
    records = read_microdata_csv(args.microdata)
    result = aggregate(records, trim=args.trim, keep_degenerate=args.keep_degenerate)
    write_interval_csv(result.frame, args.out)
    if args.scaled_out:
        write_scaled_csv(result.scaled, args.scaled_out)
    if args.report_out:
        report = {
            "rows_kept": result.frame.n,
            "dropped_rows": [{"row": label, "reasons": reasons}
                             for label, reasons in result.report.dropped_rows],
            "trim": args.trim,
        }
        Path(args.report_out).write_text(json.dumps(report, sort_keys=True, indent=2),
                                         encoding="utf-8")
    _emit({"rows": result.frame.n, "variables": list(result.frame.names),
           "dropped": len(result.report.dropped_rows)})
    return 0


def _cmd_fit(args):
    _require(args, "method", "out")
    out = {}
    out_path = Path(args.out)
    if args.method in ("beta", "kde"):
        if not args.scaled:
            raise DataValidationError("fit beta/kde requires --scaled")
        samples = read_scaled_csv(args.scaled)
        for name in sorted(samples):
            sample = samples[name]
            if args.method == "beta":
                dist = fit_beta_mom(sample.values)
                spec = latent_to_dict(dist)
            else:
                dist = fit_kde(sample.values, bandwidth=args.bandwidth)
                sample_path = out_path.with_name(f"{out_path.stem}_{name}_sample.txt")
                np.savetxt(sample_path, dist.sample)
                spec = latent_to_dict(dist, sample_path=sample_path.name)
            spec["n_used"] = int(sample.values.size)
            spec["diagnostics"] = {"mean": float(dist.mean),
                                   "second_moment": float(dist.second_moment)}
            out[name] = spec
    elif args.method == "triangular-pearson":
        if not args.summaries:
            raise DataValidationError("fit triangular-pearson requires --summaries")
        summaries = read_summary_csv(args.summaries)
        n_tests = len(summaries)
        for name in sorted(summaries):
            rows = summaries[name]
            means = [m for _, m, _, _ in rows]
            medians = [md for _, _, md, _ in rows]
            intervals = [iv for _, _, _, iv in rows]
            dist, estimates = fit_triangular_pearson(
                means, medians, intervals, alpha=args.alpha, n_tests=n_tests)
            spec = latent_to_dict(dist)
            spec["n_used"] = len(rows)
            spec["diagnostics"] = {"m_hat": estimates.m_hat,
                                   "symmetric": estimates.symmetric}
            out[name] = spec
    else:
        raise DomainError(f"unknown fit method {args.method!r}")
    out_path.write_text(json.dumps(out, sort_keys=True, indent=2), encoding="utf-8")
    _emit({"fitted": sorted(out)})
    return 0


def _cmd_distance(args):
    _require(args, "intervals", "latents", "out")
    frame = _load_valid_frame(args.intervals, args.latents)
    matrix = distance_matrix(frame, threads=args.threads)
    labels = [frame.row_label(i) for i in range(frame.n)]
    _write_matrix_csv(matrix, labels, args.out)
    _emit({"rows": frame.n, "out": str(args.out)})
    return 0


def _cmd_barycentre(args):
    _require(args, "intervals", "latents")
    frame = _load_valid_frame(args.intervals, args.latents)
    bary = sample_barycentre(frame)
    if args.out:
        bary_frame = type(frame)(
            [[iv.lower for iv in bary.box.intervals]],
            [[iv.upper for iv in bary.box.intervals]],
            frame.names, latents=frame.latents, labels=["barycentre"])
        write_interval_csv(bary_frame, args.out)
    _emit({"centres": [float(v) for v in bary.centres],
           "ranges": [float(v) for v in bary.ranges],
           "frechet_variance": bary.frechet_variance})
    return 0


def _cmd_covariance(args, correlation=False):
    _require(args, "intervals", "latents", "out")
    frame = _load_valid_frame(args.intervals, args.latents)
    ddof = 1 if args.ddof1 else 0
    if args.estimator == "barycentre":
        cov = symbolic_covariance(frame, ddof=ddof)
        matrix = correlation_from_cov(cov) if correlation else cov.sigma_b
    else:
        sigma7 = cov_model7(frame, ddof=ddof)
        matrix = correlation_matrix(sigma7, frame.names) if correlation else sigma7
    _write_matrix_csv(matrix, frame.names, args.out)
    if args.report_out and args.estimator == "barycentre":
        cov = symbolic_covariance(frame, ddof=ddof)
        report = {
            "divisor": cov.divisor,
            "names": list(cov.names),
            "sigma_b": cov.sigma_b.tolist(),
            "sigma_cc": cov.sigma_cc.tolist(),
            "sigma_rr": cov.sigma_rr.tolist(),
            "sigma_cr": cov.sigma_cr.tolist(),
            "psi": cov.summary.psi.tolist(),
            "delta": cov.summary.delta.tolist(),
            "euu": cov.summary.euu.tolist(),
            "min_eigenvalue": float(jacobi_eigenvalues(cov.sigma_b)[0]),
        }
        Path(args.report_out).write_text(json.dumps(report, sort_keys=True, indent=2),
                                         encoding="utf-8")
    _emit({"variables": list(frame.names), "out": str(args.out),
           "estimator": args.estimator, "divisor": "n-1" if ddof else "n"})
    return 0


def _cmd_compare(args):
    _require(args, "a", "b")
    m1, _ = _read_matrix_csv(args.a)
    m2, _ = _read_matrix_csv(args.b)
    value = frobenius_diff(m1, m2)
    _emit({"frobenius": value})
    return 0


def _cmd_ellipse(args):
    _require(args, "x0", "delta", "out")
    lo, hi = (float(v) for v in args.x0.split(","))
    points = iso_distance_set(Interval(lo, hi), args.delta, args.radius,
                              n_points=args.n_points)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "r"])
        for c, r in points:
            writer.writerow([repr(float(c)), repr(float(r))])
    _emit({"points": len(points), "out": str(args.out)})
    return 0


def _cmd_pairs_data(args):
    _require(args, "intervals", "latents", "out")
    frame = _load_valid_frame(args.intervals, args.latents)
    bary = sample_barycentre(frame)
    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_var", "y_var", "label", "kind",
                         "x_lo", "x_hi", "y_lo", "y_hi"])
        for jx in range(frame.p):
            for jy in range(jx + 1, frame.p):
                for i in range(frame.n):
                    writer.writerow([
                        frame.names[jx], frame.names[jy], frame.row_label(i),
                        "observation",
                        repr(float(frame.lower[i, jx])), repr(float(frame.upper[i, jx])),
                        repr(float(frame.lower[i, jy])), repr(float(frame.upper[i, jy])),
                    ])
                bx = bary.box.intervals[jx]
                by = bary.box.intervals[jy]
                writer.writerow([frame.names[jx], frame.names[jy], "barycentre",
                                 "barycentre",
                                 repr(bx.lower), repr(bx.upper),
                                 repr(by.lower), repr(by.upper)])
    _emit({"out": str(args.out), "pairs": frame.p * (frame.p - 1) // 2})
    return 0


# --- parser ---------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ivda",
        description="Interval-valued data analysis: distances, barycentres, "
                    "and symbolic covariance under latent microdata models.")
    parser.add_argument("--config", help="JSON file with default argument values; "
                                         "command-line flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("aggregate", help="aggregate microdata into intervals")
    p.add_argument("--microdata", help="CSV: group...,variable,value")
    p.add_argument("--trim", type=float,
                   help="fraction trimmed from each tail of every cell (default 0)")
    p.add_argument("--keep-degenerate", action="store_true",
                   help="keep zero-range cells when trim is 0")
    p.add_argument("--out", help="interval CSV output")
    p.add_argument("--scaled-out", help="long-form scaled microdata CSV output")
    p.add_argument("--report-out", help="JSON aggregation report output")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("fit", help="fit latent distributions")
    p.add_argument("--method", choices=["beta", "kde", "triangular-pearson"])
    p.add_argument("--scaled", help="scaled microdata CSV (beta/kde)")
    p.add_argument("--summaries", help="summary statistics CSV (triangular-pearson)")
    p.add_argument("--bandwidth", type=float, help="kde bandwidth override")
    p.add_argument("--alpha", type=float,
                   help="symmetry test level before Bonferroni correction (default 0.05)")
    p.add_argument("--out", help="JSON fit report output")
    p.set_defaults(func=_cmd_fit)

    def add_frame_args(p):
        p.add_argument("--intervals", help="interval CSV input")
        p.add_argument("--latents",
                       help="latent spec: JSON mapping file or shorthand like "
                            "'triangular:0', 'uniform', 'beta:0.44,2.15'")

    p = sub.add_parser("distance", help="pairwise distance matrix")
    add_frame_args(p)
    p.add_argument("--threads", type=int, help="worker thread cap (default 1)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("barycentre", help="barycentre and Frechet variance")
    add_frame_args(p)
    p.add_argument("--out", help="single-row interval CSV output")
    p.set_defaults(func=_cmd_barycentre)

    for name, correlation in (("covariance", False), ("correlation", True)):
        p = sub.add_parser(name, help=f"symbolic {name} matrix")
        add_frame_args(p)
        p.add_argument("--estimator", choices=["barycentre", "model7"],
                       help="barycentre (default) or the diagonal comparison estimator")
        p.add_argument("--ddof1", action="store_true",
                       help="use the n-1 divisor instead of n")
        p.add_argument("--out")
        p.add_argument("--report-out", help="JSON audit report (barycentre only)")
        p.set_defaults(func=lambda a, c=correlation: _cmd_covariance(a, correlation=c))

    p = sub.add_parser("compare", help="Frobenius norm of a matrix difference")
    p.add_argument("--a")
    p.add_argument("--b")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("ellipse", help="iso-distance ellipse points")
    p.add_argument("--x0", help="reference interval as 'lo,hi' (use --x0=-3,5 "
                               "for negative bounds)")
    p.add_argument("--delta", type=float)
    p.add_argument("--radius", type=float, help="default 1.0")
    p.add_argument("--n-points", type=int, help="default 256")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ellipse)

    p = sub.add_parser("pairs-data",
                       help="rectangle and barycentre coordinates per variable pair")
    add_frame_args(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pairs_data)

    return parser


# hard defaults applied after config merging; the parser leaves these unset
# so that a config file value can be told apart from a flag the user passed
_FALLBACKS = {
    "trim": 0.0,
    "threads": 1,
    "alpha": 0.05,
    "estimator": "barycentre",
    "radius": 1.0,
    "n_points": 256,
}


def _merge_config(args):
    if getattr(args, "config", None):
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise DataValidationError("config file must hold a JSON object")
        for key, value in config.items():
            attr = key.replace("-", "_")
            current = getattr(args, attr, None)
            if current is None or current is False:
                setattr(args, attr, value)
    for attr, value in _FALLBACKS.items():
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)
    return args


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = _merge_config(parser.parse_args(argv))
        return args.func(args)
    except NumericFailure as exc:
        json.dump({"error": {"type": "numeric", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except DataValidationError as exc:
        payload = {"type": "validation", "message": str(exc)}
        if exc.violations:
            payload["violations"] = exc.violations
        json.dump({"error": payload}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        json.dump({"error": {"type": "validation", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
