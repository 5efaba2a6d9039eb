"""Command-line front end.

Arrangements come in as JSON documents whose rationals are "p/q" strings.
Every subcommand prints a report (JSON, text, or DOT where a diagram is
involved).  Exit status: 0 success, 1 a check failed or a domain error
occurred, 2 bad input or usage.
"""

import argparse
import hashlib
import json
import re
import sys
from fractions import Fraction

from . import __version__
from .errors import InvalidInput, IsoparamError, ParseError
from .exact_geometry import ParallelFamily, RationalVector, euclid_scan
from .gamma_model import build_model, restricted_decomposition, verify_suite
from .root_system import canonical, restrict, validate, with_lengths
from .slice_engine import (
    BLOCKS,
    EXCEPTION_NAMES,
    DiagramContext,
    HyperplaneFamily,
    component_support,
    exception_set,
    normal_sum,
)
from .weyl_group import (
    ArrangementWindow,
    classify,
    dynkin,
    find_alcove,
    model_arrangement,
    vertex_orbits,
    wall_conjugacy_classes,
)

FORMATS = ("json", "text", "dot")


# Rationals -----------------------------------------------------------------

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text):
    """Exact rational from "p/q" or "p" (also accepts a JSON integer)."""
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError("rationals must be written as \"p/q\" strings, got %s" % type(text).__name__)
    m = _RATIONAL.match(text)
    if not m:
        raise ValueError("%r is not a rational of the form p/q" % text)
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError("%r has zero denominator" % text)
    return Fraction(int(m.group(1)), den)


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def _parse_vector_arg(text):
    try:
        return [parse_rational(t) for t in text.split(",")]
    except ValueError as e:
        raise ParseError("bad vector %r: %s" % (text, e))


# Documents -----------------------------------------------------------------

_STRING = re.compile(r'"(?:[^"\\]|\\.)*"')


class _Located:
    """Maps the n-th string literal of a JSON text back to its line/column."""

    def __init__(self, text):
        self.text = text
        self.starts = [m.start() for m in _STRING.finditer(text)]

    def where(self, n):
        if n >= len(self.starts):
            return None, None
        pos = self.starts[n]
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col


def _no_duplicates(pairs):
    keys = [k for k, _ in pairs]
    dup = {k for k in keys if keys.count(k) > 1}
    if dup:
        raise ValueError("duplicate key %r" % sorted(dup)[0])
    return dict(pairs)


def _string_paths(obj, path=(), out=None):
    """Path of every string literal, in document order (a key's path ends in None)."""
    out = [] if out is None else out
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.append(path + (k, None))
            _string_paths(v, path + (k,), out)
    elif isinstance(obj, list):
        for n, v in enumerate(obj):
            _string_paths(v, path + (n,), out)
    elif isinstance(obj, str):
        out.append(path)
    return out


class ArrangementDocument:
    """Parsed arrangement document.

    ``families`` are ParallelFamily objects; ``length2`` holds the optional
    per-family squared root lengths (all or none).
    """

    def __init__(self, dim, families, length2=None, basepoint=None, window_radius=None):
        self.dim = dim
        self.families = families
        self.length2 = length2
        self.basepoint = basepoint
        self.window_radius = window_radius

    def as_dict(self):
        fams = []
        for f in self.families:
            d = {
                "label": f.label,
                "direction": [format_rational(c) for c in f.normal],
                "spacing": format_rational(f.spacing),
                "phase": format_rational(f.phase),
                "reducible": f.reducible,
            }
            if self.length2 is not None:
                d["length2"] = format_rational(self.length2[f.label])
            fams.append(d)
        out = {"dim": self.dim, "families": fams}
        if self.basepoint is not None:
            out["basepoint"] = [format_rational(c) for c in self.basepoint]
        if self.window_radius is not None:
            out["window_radius"] = format_rational(self.window_radius)
        return out

    def dumps(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def window(self, radius=None):
        r = radius if radius is not None else self.window_radius
        return ArrangementWindow(self.families, self.basepoint, r)


_DOC_KEYS = ("dim", "families", "basepoint", "window_radius")
_FAMILY_KEYS = ("label", "direction", "spacing", "phase", "reducible", "length2")


def loads_document(text):
    """Parse an ArrangementDocument; errors carry line and column."""
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno)
    except ValueError as e:
        raise ParseError(str(e), 1, 1)
    loc = _Located(text)
    index = {p: n for n, p in enumerate(_string_paths(raw))}

    def fail(msg, path=()):
        # point at the value itself when it is a string, else at its key
        n = index.get(tuple(path), index.get(tuple(path) + (None,)))
        line, col = loc.where(n) if n is not None else (None, None)
        raise ParseError(msg, line, col)

    def rational(v, path):
        try:
            return parse_rational(v)
        except ValueError as e:
            fail("%s: %s" % (_path_text(path), e), path)

    if not isinstance(raw, dict):
        raise ParseError("document must be a JSON object", 1, 1)
    for k in raw:
        if k not in _DOC_KEYS:
            fail("unknown field %r" % k, (k,))
    if "dim" not in raw or "families" not in raw:
        raise ParseError("document needs \"dim\" and \"families\"", 1, 1)
    dim = raw["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        fail("dim must be a positive integer", ("dim",))
    fams_raw = raw["families"]
    if not isinstance(fams_raw, list) or not fams_raw:
        fail("families must be a non-empty list", ("families",))
    families, lengths = [], {}
    for n, fr in enumerate(fams_raw):
        at = ("families", n)
        if not isinstance(fr, dict):
            fail("%s must be an object" % _path_text(at), ("families",))
        for k in fr:
            if k not in _FAMILY_KEYS:
                fail("%s: unknown field %r" % (_path_text(at), k), at + (k,))
        for k in ("label", "direction", "spacing"):
            if k not in fr:
                fail("%s: missing %r" % (_path_text(at), k), ("families",))
        label = fr["label"]
        if not isinstance(label, str):
            fail("%s must be a string" % _path_text(at + ("label",)), at + ("label",))
        direction = fr["direction"]
        if not isinstance(direction, list) or len(direction) != dim:
            fail("%s must list %d rationals" % (_path_text(at + ("direction",)), dim), at + ("direction",))
        normal = [rational(c, at + ("direction", m)) for m, c in enumerate(direction)]
        spacing = rational(fr["spacing"], at + ("spacing",))
        phase = rational(fr["phase"], at + ("phase",)) if "phase" in fr else Fraction(0)
        reducible = fr.get("reducible", False)
        if not isinstance(reducible, bool):
            fail("%s must be true or false" % _path_text(at + ("reducible",)), at + ("reducible",))
        if spacing <= 0:
            fail("%s must be positive" % _path_text(at + ("spacing",)), at + ("spacing",))
        try:
            families.append(ParallelFamily(label, normal, spacing, phase, reducible))
        except InvalidInput as e:
            fail("%s: %s" % (_path_text(at), e), at + ("label",))
        if "length2" in fr:
            lengths[label] = rational(fr["length2"], at + ("length2",))
            if lengths[label] <= 0:
                fail("%s must be positive" % _path_text(at + ("length2",)), at + ("length2",))
    if lengths and len(lengths) != len(families):
        fail("length2 must be given for every family or for none", ("families",))
    basepoint = None
    if "basepoint" in raw:
        bp = raw["basepoint"]
        if not isinstance(bp, list) or len(bp) != dim:
            fail("basepoint must list %d rationals" % dim, ("basepoint",))
        basepoint = [rational(c, ("basepoint", m)) for m, c in enumerate(bp)]
    radius = None
    if "window_radius" in raw:
        radius = rational(raw["window_radius"], ("window_radius",))
        if radius <= 0:
            fail("window_radius must be positive", ("window_radius",))
    return ArrangementDocument(dim, families, lengths or None, basepoint, radius)


def _path_text(path):
    out = ""
    for p in path:
        out += "[%d]" % p if isinstance(p, int) else ("." if out else "") + str(p)
    return out


def load_document(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError("cannot read %s: %s" % (path, e.strerror))
    return loads_document(text)


def model_document(symbol, with_length=False):
    """ArrangementDocument realizing a table symbol (circled families reducible)."""
    m = model_arrangement(symbol)
    fams = [ParallelFamily(f.label, f.normal, f.spacing, f.phase, f.label in m.circles) for f in m.families]
    return ArrangementDocument(len(fams[0].normal), fams, dict(m.length2) if with_length else None)


# Reports -------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, RationalVector):
        return [format_rational(c) for c in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


def inputs_digest(inputs):
    blob = json.dumps(_jsonable(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def make_report(command, inputs, results, seed=None, **extra):
    rep = {
        "command": command,
        "version": __version__,
        "inputs": _jsonable(inputs),
        "inputs_digest": inputs_digest({"command": command, "inputs": inputs}),
        "seed": seed,
        "ok": all(r["passed"] for r in results),
        "results": [_jsonable(r) for r in results],
    }
    rep.update({k: _jsonable(v) for k, v in extra.items()})
    return rep


def check(name, passed, value=None, **extra):
    out = {"name": name, "passed": bool(passed), "exact": True}
    if value is not None:
        out["value"] = value
    out.update(extra)
    return out


def dump_json(report):
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _text_results(report):
    lines = ["%s  digest %s" % (report["command"], report["inputs_digest"][:16])]
    for r in report["results"]:
        mark = "ok  " if r["passed"] else "FAIL"
        val = r.get("approx", r.get("value"))
        shown = "" if val is None else "  " + (val if isinstance(val, str) else json.dumps(val, ensure_ascii=False))
        lines.append("  [%s] %s%s" % (mark, r["name"], shown))
        if r.get("witness"):
            lines.append("         witness: %s" % (r["witness"],))
        if r.get("note"):
            lines.append("         note: %s" % (r["note"],))
    return "\n".join(lines) + "\n"


# Subcommands ---------------------------------------------------------------


def _orbit_labels(D, orbits):
    return [[D.labels[i] for i in orb] for orb in orbits]


def _classify_results(D, A):
    orbits = vertex_orbits(D)
    classes = wall_conjugacy_classes(A)
    return [
        check("symbol", D.symbol is not None, D.symbol),
        check("vertex-orbits", True, len(orbits), orbits=orbits, orbit_labels=_orbit_labels(D, orbits)),
        check("wall-conjugacy-cross-check", classes == orbits, classes),
    ]


def _diagram_of(doc, radius):
    W = doc.window(radius)
    if doc.length2 is not None:
        D = dynkin(W, doc.length2)
    else:
        D = classify(W)
    return W, D


def _emit_diagram(args, report, D):
    if args.format == "dot":
        return D.to_dot()
    if args.format == "text":
        return _text_results(report) + D.to_text()
    return dump_json(report)


def _write_figure(args, D, W=None, A=None):
    if getattr(args, "figure", None):
        from .figures import render_report

        render_report(args.figure, D, W, A)


def cmd_classify(args):
    doc = load_document(args.document)
    W, D = _diagram_of(doc, args.window_radius)
    A = find_alcove(W)
    results = _classify_results(D, A)
    inputs = {"document": doc.as_dict(), "window_radius": args.window_radius}
    report = make_report("classify", inputs, results, diagram=D.as_dict())
    _write_figure(args, D, W, A)
    return report, _emit_diagram(args, report, D)


def cmd_orbits(args):
    doc = load_document(args.document)
    W, D = _diagram_of(doc, args.window_radius)
    A = find_alcove(W)
    results = _classify_results(D, A)[1:]
    report = make_report("orbits", {"document": doc.as_dict(), "window_radius": args.window_radius}, results)
    return report, None


def _root_system(doc, radius):
    W = doc.window(radius)
    center = W.center
    if doc.length2 is not None:
        return with_lengths(doc.families, doc.length2, center, W.radius)
    return canonical(doc.families, center, W.radius)


def _axiom_results(R):
    rep = validate(R)
    return [check("axiom-" + k, r.passed, checked=r.checked, witness=r.witness) for k, r in rep.results.items()]


def cmd_axioms(args):
    doc = load_document(args.document)
    R = _root_system(doc, args.window_radius)
    results = [check("roots-in-window", True, len(R.roots))] + _axiom_results(R)
    report = make_report("axioms", {"document": doc.as_dict(), "window_radius": args.window_radius}, results)
    return report, None


def cmd_restrict(args):
    doc = load_document(args.document)
    R = _root_system(doc, args.window_radius)
    dirs = [_parse_vector_arg(d) for d in args.direction]
    if any(len(d) != doc.dim for d in dirs):
        raise ParseError("directions must have %d coordinates" % doc.dim)
    bp = _parse_vector_arg(args.basepoint) if args.basepoint else list(R.center)
    if len(bp) != doc.dim:
        raise ParseError("basepoint must have %d coordinates" % doc.dim)
    S = restrict(R, bp, dirs)
    fams = sorted({rf.family.label for rf in S.root_families or ()})
    results = [
        check("rank", True, S.rank),
        check("roots-in-window", True, len(S.roots)),
        check("families", True, fams),
    ] + _axiom_results(S)
    inputs = {
        "document": doc.as_dict(),
        "window_radius": args.window_radius,
        "basepoint": bp,
        "directions": dirs,
    }
    return make_report("restrict", inputs, results), None


def cmd_support(args):
    if args.block is not None and (args.block_x is not None or args.block_y is not None):
        raise ParseError("--block cannot be combined with --block-x/--block-y")
    bx = args.block or args.block_x or "full"
    by = args.block or args.block_y or "full"
    ctx = DiagramContext(args.symbol, args.family, args.right_parity)
    sup = component_support(ctx, args.i, args.j, bx, by, True if args.reducible else None)
    exc = exception_set(args.i, args.j)
    allowed = sup.render()
    results = [
        check("allowed", True, allowed, rule=sup.rule, exceptional=sup.exceptional),
        check(
            "exception-set",
            True,
            [format_rational(v) for v in exc.values],
            names=list(EXCEPTION_NAMES),
            integers=sorted(exc.integers()),
        ),
    ]
    inputs = {
        "symbol": args.symbol,
        "i": args.i,
        "j": args.j,
        "block_x": bx,
        "block_y": by,
        "reducible": bool(args.reducible),
        "family": args.family,
        "right_parity": args.right_parity,
    }
    report = make_report("support", inputs, results)
    text = None
    if args.format == "text":
        text = "{%s}\nexceptions: %s\n" % (
            ", ".join(allowed),
            ", ".join("%s=%s" % (n, format_rational(v)) for n, v in zip(EXCEPTION_NAMES, exc.values)),
        )
    return report, text


def cmd_verify(args):
    m = build_model(args.model)
    restricted_decomposition(m)
    rep = verify_suite(m, trials=args.trials, seed=args.seed)
    results = [r.as_dict() for r in rep.results]
    inputs = {"model": m.kind, "trials": args.trials}
    datum = m.datum
    extra = {
        "model": {
            "name": m.kind,
            "dim_p": m.dim_p,
            "dim_k": m.dim_k,
            "rank": m.rank,
            "multiplicities": datum.multiplicities,
        }
    }
    return make_report("verify", inputs, results, seed=args.seed, **extra), None


def cmd_euclid_scan(args):
    regimes = ("pi4", "pi6") if args.regime == "both" else (args.regime,)
    results = []
    for reg in regimes:
        s = euclid_scan(reg)
        results.append(
            check(
                "dichotomy-" + reg,
                s.ok,
                len(s.violations),
                configurations=s.configurations,
                hypothesis_met=s.hypothesis_met,
                verdicts=s.verdicts,
                witness=[list(map(str, v[0])) + list(map(str, v[1])) for v in s.violations[:5]],
            )
        )
    return make_report("euclid-scan", {"regime": args.regime}, results), None


def cmd_normal_sum(args):
    d0 = _rational_arg(args.d0, "d0")
    d = _rational_arg(args.d, "d")
    w = _parse_vector_arg(args.w)
    prec = _rational_arg(args.precision, "precision")
    f = HyperplaneFamily("family", w, d0, d)
    lo, hi = normal_sum(f, prec)
    results = [
        check(
            "enclosure",
            hi - lo <= prec,
            [format_rational(lo), format_rational(hi)],
            width=format_rational(hi - lo),
            approx=[float(lo), float(hi)],
        )
    ]
    inputs = {"d0": d0, "d": d, "w": w, "precision": prec}
    return make_report("normal-sum", inputs, results), None


def cmd_diagram(args):
    if args.document:
        doc = model_document(args.symbol, with_length=True)
        return None, doc.dumps()
    model = model_arrangement(args.symbol)
    W = model.window(args.window_radius)
    D = dynkin(W, model.length2, model.circles)
    if args.dual:
        sym = D.symbol
        D = D.dual()
        D.symbol = "dual of %s" % sym
    A = find_alcove(W)
    orbits = vertex_orbits(D)
    results = [
        check("symbol-round-trip", args.dual or D.symbol == args.symbol, D.symbol),
        check("vertex-orbits", True, len(orbits), orbits=orbits),
    ]
    inputs = {"symbol": args.symbol, "dual": args.dual, "window_radius": args.window_radius}
    report = make_report("diagram", inputs, results, diagram=D.as_dict())
    _write_figure(args, D, W, A)
    return report, _emit_diagram(args, report, D)


def _rational_arg(text, what):
    try:
        return parse_rational(text)
    except ValueError as e:
        raise ParseError("%s: %s" % (what, e))


def _window_radius(text):
    try:
        q = parse_rational(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if q <= 0:
        raise argparse.ArgumentTypeError("window radius must be positive")
    return q


# Parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(2)


def build_parser():
    p = _Parser(prog="isoparam", description="Affine root systems, Dynkin diagrams and homogeneous-structure checks.")
    p.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, formats=("json", "text")):
        sp.add_argument("--format", choices=formats, default="json")
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")

    def windowed(sp):
        sp.add_argument("--window-radius", type=_window_radius, default=None, help="rational, overrides the document")

    sp = sub.add_parser("classify", help="classify an arrangement document")
    sp.add_argument("document")
    common(sp, FORMATS)
    windowed(sp)
    sp.add_argument("--figure", metavar="PATH", help="render the diagram (and the arrangement in dim 2)")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("axioms", help="check the root-system axioms of the canonical system")
    sp.add_argument("document")
    common(sp)
    windowed(sp)
    sp.set_defaults(func=cmd_axioms)

    sp = sub.add_parser("restrict", help="restrict the canonical system to an affine subspace")
    sp.add_argument("document")
    sp.add_argument("--direction", action="append", required=True, help="comma separated rationals; repeat")
    sp.add_argument("--basepoint", help="comma separated rationals (default: the window centre)")
    common(sp)
    windowed(sp)
    sp.set_defaults(func=cmd_restrict)

    sp = sub.add_parser("orbits", help="vertex orbits with a wall-conjugacy cross-check")
    sp.add_argument("document")
    common(sp)
    windowed(sp)
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("support", help="allowed components of Gamma_{E_i}E_j on a rank-one slice")
    sp.add_argument("symbol")
    sp.add_argument("i", type=int)
    sp.add_argument("j", type=int)
    sp.add_argument("--reducible", action="store_true")
    sp.add_argument("--block", choices=BLOCKS)
    sp.add_argument("--block-x", choices=BLOCKS)
    sp.add_argument("--block-y", choices=BLOCKS)
    sp.add_argument("--family", choices=("extremal", "middle", "short", "long"), default="extremal")
    sp.add_argument("--right-parity", type=int, choices=(0, 1), default=0)
    common(sp)
    sp.set_defaults(func=cmd_support)

    sp = sub.add_parser("verify", help="run the homogeneous-structure identity suite on a model")
    sp.add_argument("--model", required=True, type=str.upper, metavar="{a2,b2,bc2}")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("euclid-scan", help="exhaustive three-line dichotomy scan")
    sp.add_argument("--regime", choices=("pi4", "pi6", "both"), default="both")
    common(sp)
    sp.set_defaults(func=cmd_euclid_scan)

    sp = sub.add_parser("normal-sum", help="enclose sum_k |w|^2/(d0+k d)^2")
    sp.add_argument("d0")
    sp.add_argument("d")
    sp.add_argument("--w", default="1", help="direction, comma separated rationals")
    sp.add_argument("--precision", default="1/1000000")
    common(sp)
    sp.set_defaults(func=cmd_normal_sum)

    sp = sub.add_parser("diagram", help="synthesize the model arrangement of a symbol and draw its diagram")
    sp.add_argument("symbol")
    sp.add_argument("--dual", action="store_true")
    sp.add_argument("--document", action="store_true", help="print the model arrangement document instead")
    common(sp, FORMATS)
    windowed(sp)
    sp.add_argument("--figure", metavar="PATH")
    sp.set_defaults(func=cmd_diagram)
    return p


def _error_report(command, exc):
    return {
        "command": command,
        "error": {
            "code": getattr(exc, "code", "error"),
            "message": str(exc),
            "line": getattr(exc, "line", None),
            "column": getattr(exc, "column", None),
        },
    }


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, text = args.func(args)
    except IsoparamError as e:
        sys.stderr.write("isoparam %s: %s: %s\n" % (args.command, e.code, e))
        if getattr(args, "format", "json") == "json":
            sys.stdout.write(dump_json(_error_report(args.command, e)))
        return 2 if isinstance(e, InvalidInput) else 1
    if text is None:
        text = _text_results(report) if args.format == "text" else dump_json(report)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report is None:
        return 0
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
