"""Command-line front end.

Subcommands: compute (single indicator values to stdout), validate
(cross-check registry), sweep (per-k CSV / json-lines files),
enumerate (dump extreme points), version.

Exit codes: 0 success, 1 usage error, 2 validation failure,
3 enumeration refused by the resource guard.

Output files start with '#' metadata lines echoing the tool version
and the parsed configuration, so repeated runs with the same config
are byte-identical.  Wall-clock stamping is opt-in (--wallclock)
because it would break that.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from . import analysis
from . import closedforms as cf
from . import enumeration as en
from . import validation
from .exactnum import LogScalar, RootExpr, exact_to_float, log_ratio
from .geometry import ResourceGuardError, hull_distance

USAGE_ERROR = 1
VALIDATION_ERROR = 2
GUARD_ERROR = 3

FAMILY_NAMES = {"tsp": "TSP", "stgp": "STGP", "sthgp": "STHGP"}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the contract reserves 2 for
    # validation failures and wants 1 here
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(USAGE_ERROR)


@dataclass
class RunConfig:
    """Parsed command line, echoed verbatim into output metadata."""

    command: str
    family: str = None
    n: int = None
    facet: str = None
    k: int = None
    angle: tuple = None
    measures: tuple = ()
    out: str = None
    format: str = None
    threshold: int = None
    accept_cost: bool = False
    threads: int = None
    max_n: int = None
    mode: str = None
    angles: bool = False
    disagreement: bool = False
    oracle: bool = False
    wallclock: bool = False

    def echo(self):
        parts = ["command=%s" % self.command]
        for name in ("family", "n", "facet", "k", "angle", "measures",
                     "out", "format", "threshold", "accept_cost",
                     "threads", "max_n", "mode", "angles",
                     "disagreement", "oracle"):
            value = getattr(self, name)
            if value in (None, (), False):
                continue
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            parts.append("%s=%s" % (name, value))
        return " ".join(parts)


def _metadata_lines(config):
    lines = ["# facetgauge %s" % __version__,
             "# config: %s" % config.echo()]
    if config.wallclock:
        stamp = datetime.datetime.now(datetime.timezone.utc)
        lines.append("# wallclock: %s" % stamp.isoformat())
    return lines


def _exact_str(value):
    """Serialize an exact value: p/q, or sqrt(p/q) for roots."""
    if isinstance(value, RootExpr):
        ratio, radicand = value
        if ratio == 1:
            return "sqrt(%s)" % radicand
        squared = ratio * ratio * radicand
        return "sqrt(%s)" % squared
    return str(value)


def _float_of(value):
    if isinstance(value, RootExpr):
        return float(value)
    if isinstance(value, LogScalar):
        return value.to_float()
    return exact_to_float(value)


def _log10_of(value):
    if isinstance(value, LogScalar):
        return value.log10()
    if isinstance(value, RootExpr):
        ratio, radicand = value
        if ratio == 0 or radicand == 0:
            return -math.inf
        squared = ratio * ratio * radicand
        return 0.5 * log_ratio(squared.numerator, squared.denominator)
    value = Fraction(value)
    if value == 0:
        return -math.inf
    return log_ratio(value.numerator, value.denominator)


# ---------------------------------------------------------------------------
# compute


def _compute_closed(family, n, facet, k, measure):
    if facet == "subtour":
        return analysis.subtour_value(family, n, k, measure)
    if facet == "nonneg":
        if family == "TSP":
            if measure == "EPR":
                return cf.tsp_nonneg_epr(n)
            cd2 = cf.tsp_nonneg_cd2(n)
            return cd2 if measure == "CD2" else RootExpr.sqrt(cd2)
        if family == "STHGP":
            if measure == "EPR":
                return cf.sthgp_nonneg_epr(n, k)
            root = cf.sthgp_nonneg_cd(n, k)
            return root if measure == "CD" else root.squared()
        raise ValueError("no non-negativity closed forms for STGP")
    raise ValueError("unknown facet %r" % (facet,))


def _compute_oracle(family, n, facet, k, measure, accept_cost):
    points = en.enumerate_extreme_points(family, n, accept_cost=accept_cost)
    if facet == "subtour":
        spec = {"TSP": cf.TspSubtour, "STGP": cf.StgpSubtour,
                "STHGP": cf.SthgpSubtour}[family](n=n, k=k)
    elif facet == "nonneg":
        spec = (cf.TspNonNeg(n=n) if family == "TSP"
                else cf.SthgpNonNeg(n=n, k=k))
    else:
        raise ValueError("unknown facet %r" % (facet,))
    h = en.build_facet(points.indexer, spec)
    if measure == "EPR":
        return Fraction(en.count_incident(points, h), len(points))
    inc = en.incident_points(points, h)
    centroid = [float(x) for x in points.centroid()]
    d2 = hull_distance(inc.float_chunks(), centroid,
                       bounds=False).distance_squared
    return d2 if measure == "CD2" else math.sqrt(d2)


def _compute_header(config, writer):
    for line in _metadata_lines(config):
        print(line)
    writer.writerow(["family", "n", "facet", "k", "measure", "exact",
                     "float", "provenance"])


def cmd_compute(config):
    family = config.family
    measures = tuple(m.upper() for m in config.measures)
    for m in measures:
        if m not in ("EPR", "CD2", "CD"):
            raise ValueError("unknown measure %r" % (m.lower(),))
    writer = csv.writer(sys.stdout, lineterminator="\n")
    if config.angle is not None:
        if family != "STHGP":
            raise ValueError("--angle applies to the sthgp family")
        p, q, r = config.angle
        (num, den_sq), theta = cf.sthgp_subtour_angle(config.n, p, q, r)
        try:
            cos_f = num / math.sqrt(den_sq)
        except OverflowError:
            cos_f = 0.0 if num == 0 else math.copysign(
                math.exp(math.log(abs(num)) - 0.5 * math.log(den_sq)), num)
        label = "angle(%d,%d,%d)" % (p, q, r)
        _compute_header(config, writer)
        writer.writerow([family, config.n, label, "", "cos_phi",
                         "%d/sqrt(%d)" % (num, den_sq), repr(cos_f),
                         "closed-form"])
        writer.writerow([family, config.n, label, "", "theta", "",
                         repr(theta), "closed-form"])
        return 0
    if not measures:
        raise ValueError("compute needs --measure or --angle")
    if config.k is None and not (config.facet == "nonneg"
                                 and family == "TSP"):
        raise ValueError("this facet needs --k")
    _compute_header(config, writer)
    for measure in measures:
        if config.oracle:
            value = _compute_oracle(family, config.n, config.facet,
                                    config.k, measure, config.accept_cost)
            provenance = "oracle"
        else:
            value = _compute_closed(family, config.n, config.facet,
                                    config.k, measure)
            provenance = "closed-form"
        exact = "" if isinstance(value, float) else _exact_str(value)
        writer.writerow([family, config.n, config.facet,
                         "" if config.k is None else config.k,
                         measure.lower(), exact, repr(_float_of(value)),
                         provenance])
    return 0


# ---------------------------------------------------------------------------
# validate


_CATEGORY_FOR_MEASURE = {"epr": "epr", "cd": "cd", "cd2": "cd",
                         "counts": "counts", "centroid": "centroid"}


def cmd_validate(config):
    categories = None
    if config.angles:
        categories = {"angles"}
    elif config.measures:
        categories = set()
        for m in config.measures:
            try:
                categories.add(_CATEGORY_FOR_MEASURE[m.lower()])
            except KeyError:
                raise ValueError("unknown validation measure %r" % (m,))
    checks = validation.select_checks(family=config.family,
                                      categories=categories)
    if config.mode == "qp":
        checks = [c for c in checks if "qp" in c.tags]
    if not checks:
        raise ValueError("no validation checks match this selection")
    for line in _metadata_lines(config):
        print(line)
    results = validation.run_checks(checks, max_n=config.max_n)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print("%d/%d checks passed" % (len(results) - len(failed), len(results)))
    return 0 if not failed else VALIDATION_ERROR


# ---------------------------------------------------------------------------
# sweep


def _sweep_rows(config):
    """(header, rows) for the requested sweep."""
    family = config.family
    if config.disagreement:
        matrix = analysis.disagreement_matrix(config.n,
                                              threshold=config.threshold,
                                              threads=config.threads)
        rows = []
        for i, k1 in enumerate(matrix.ks):
            for j, k2 in enumerate(matrix.ks):
                flag = "disagree" if matrix.disagree[i, j] else "agree"
                rows.append([k1, k2, flag])
        return ["k1", "k2", "flag"], rows
    measure = config.measures[0]
    if measure.lower() == "dx":
        if family != "STGP":
            raise ValueError("--measure dx applies to the stgp family")
        rows = []
        for k in analysis.subtour_range(family, config.n):
            dx_in, dx_out, _, _ = cf.stgp_delta_components(config.n, k)
            for name, value in [("dx_in", dx_in), ("dx_out", dx_out)]:
                rows.append([family, config.n, k, name, _exact_str(value),
                             repr(exact_to_float(value)),
                             repr(_log10_of(abs(value)))])
        return ["family", "n", "k", "measure", "exact", "float",
                "log10"], rows
    result = analysis.sweep(family, config.n, measure,
                            threshold=config.threshold,
                            threads=config.threads)
    rows = []
    for k, value, fl in result.rows:
        exact = "" if result.mode == "log" else _exact_str(value)
        rows.append([family, config.n, k, result.measure.lower(), exact,
                     repr(fl), repr(_log10_of(value))])
    return ["family", "n", "k", "measure", "exact", "float", "log10"], rows


def cmd_sweep(config):
    if not config.disagreement and not config.measures:
        raise ValueError("sweep needs --measure or --disagreement")
    header, rows = _sweep_rows(config)
    out = open(config.out, "w") if config.out else sys.stdout
    try:
        if config.format == "json-lines":
            meta = {"meta": {"tool": "facetgauge %s" % __version__,
                             "config": config.echo()}}
            out.write(json.dumps(meta, sort_keys=True) + "\n")
            for row in rows:
                out.write(json.dumps(dict(zip(header, row)),
                                     sort_keys=True) + "\n")
        else:
            for line in _metadata_lines(config):
                out.write(line + "\n")
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    finally:
        if config.out:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# enumerate


def cmd_enumerate(config):
    points = en.enumerate_extreme_points(config.family, config.n,
                                         accept_cost=config.accept_cost)
    fmt = "text" if config.format == "text" else "binary"
    en.dump_points(points, config.out, fmt=fmt)
    print("%s(%d): %d extreme points -> %s"
          % (config.family, config.n, len(points), config.out))
    return 0


# ---------------------------------------------------------------------------
# parsing


def _family(value):
    try:
        return FAMILY_NAMES[value.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError("unknown family %r" % (value,))


def _angle(value):
    parts = value.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--angle wants p,q,r")
    return tuple(int(p) for p in parts)


def _measures(value):
    return tuple(m.strip() for m in value.split(",") if m.strip())


def build_parser():
    parser = _Parser(prog="facetgauge",
                     description="Polyhedral strength indicators for "
                                 "TSP, STGP and STHGP facets.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    def common(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: FACETGAUGE_THREADS"
                            " or 1)")
        p.add_argument("--wallclock", action="store_true",
                       help="stamp outputs with the current time")

    p = sub.add_parser("compute", help="single indicator values")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--facet", choices=["subtour", "nonneg"],
                   default="subtour")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--angle", type=_angle, default=None,
                   help="p,q,r for the subtour angle")
    p.add_argument("--measure", type=_measures, default=(),
                   dest="measures", help="comma list: epr,cd2,cd")
    p.add_argument("--oracle", action="store_true",
                   help="compute from enumerated extreme points")
    p.add_argument("--accept-cost", action="store_true")
    common(p)

    p = sub.add_parser("validate", help="run the cross-check registry")
    p.add_argument("--family", type=str, default=None,
                   choices=["tsp", "stgp", "sthgp"])
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--measure", type=_measures, default=(),
                   dest="measures")
    p.add_argument("--mode", choices=["qp"], default=None)
    p.add_argument("--angles", action="store_true",
                   help="only the angle checks")
    common(p)

    p = sub.add_parser("sweep", help="per-k indicator table")
    p.add_argument("--family", type=_family, default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--measure", type=_measures, default=(),
                   dest="measures", help="epr, cd2, cd or dx")
    p.add_argument("--disagreement", action="store_true",
                   help="EPR-vs-CD disagreement grid instead")
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=["csv", "json-lines"],
                   default="csv")
    p.add_argument("--threshold", type=int, default=None,
                   help="largest n evaluated exactly")
    common(p)

    p = sub.add_parser("enumerate", help="dump extreme points")
    p.add_argument("--family", type=_family, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--format", choices=["binary", "text"],
                   default="binary")
    p.add_argument("--accept-cost", action="store_true")
    common(p)

    sub.add_parser("version", help="print the tool version")
    return parser


def _config_from_args(args):
    fields = ("family", "n", "facet", "k", "angle", "measures", "out",
              "format", "threshold", "accept_cost", "threads", "max_n",
              "mode", "angles", "disagreement", "oracle", "wallclock")
    kwargs = {}
    for name in fields:
        if hasattr(args, name):
            kwargs[name] = getattr(args, name)
    return RunConfig(command=args.command, **kwargs)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "version":
        print("facetgauge %s" % __version__)
        return 0
    config = _config_from_args(args)
    try:
        if args.command == "compute":
            return cmd_compute(config)
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "enumerate":
            return cmd_enumerate(config)
    except ResourceGuardError as exc:
        sys.stderr.write("resource guard: %s\n" % exc)
        return GUARD_ERROR
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return USAGE_ERROR
    raise AssertionError("unhandled command %r" % (args.command,))


if __name__ == "__main__":
    sys.exit(main())
