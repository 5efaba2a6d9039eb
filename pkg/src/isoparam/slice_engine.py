"""Index calculus on the rank-one slices of an arrangement.

Each direction alpha carries a family of parallel hyperplanes at directed
distances lambda_k = d0 + k*d from the basepoint, and an eigenspace
E_{alpha,k} per hyperplane.  This module turns that indexing into
concrete answers: curvature normals, which eigenspaces a bracket of two
eigenspaces on the same line can reach, and a few bound formulas.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DivergentSum,
    FocalBasepoint,
    FocalTranslation,
    InvalidInput,
    InvalidPair,
    UnclassifiedDiagram,
    UndefinedRatio,
    Unsupported,
)
from .exact_geometry import AffineHyperplane, RationalVector
from .linalg import to_fraction
from .weyl_group import parse_symbol, template, vertex_orbits

__all__ = [
    "HyperplaneFamily",
    "curvature_normals",
    "codazzi_ratio",
    "ExceptionSet",
    "exception_set",
    "DiagramContext",
    "ComponentSupport",
    "component_support",
    "general_support",
    "rank_one_envelope",
    "refl_spacing",
    "parallel_translate",
    "normal_sum",
    "gamma_norm_bound",
    "bound_exponent",
    "BLOCKS",
]

BLOCKS = ("full", "primed", "double_primed")


@dataclass(frozen=True)
class HyperplaneFamily:
    """Hyperplanes {<eta, w> = d0 + k*d}, k in Z, seen from the basepoint.

    ``w`` is a rational direction; distances are measured in units of the
    functional <., w>, so the curvature normal of index k is w/(d0 + k*d).
    """

    label: str
    w: RationalVector
    d0: Fraction
    d: Fraction

    def __init__(self, label, w, d0, d):
        w = w if isinstance(w, RationalVector) else RationalVector(w)
        d0, d = to_fraction(d0), to_fraction(d)
        if w.is_zero():
            raise InvalidInput("family direction must be nonzero")
        if d <= 0:
            raise InvalidInput("consecutive distances must increase (d > 0)")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d0", d0)
        object.__setattr__(self, "d", d)

    def distance(self, k):
        return self.d0 + k * self.d

    def focal_index(self):
        """k with distance(k) == 0, or None."""
        t = -self.d0 / self.d
        return int(t) if t.denominator == 1 else None

    def normal(self, k):
        lam = self.distance(k)
        if lam == 0:
            raise FocalBasepoint("basepoint lies on the hyperplane of index %d of family %s" % (k, self.label))
        return self.w / lam

    def hyperplane(self, k):
        return AffineHyperplane(self.w, self.distance(k))


def curvature_normals(f, ks):
    """{k: w/lambda_k} for every k in ``ks``."""
    return {k: f.normal(k) for k in ks}


def codazzi_ratio(vi, vj, vk):
    """lambda with v_j - v_k = lambda (v_i - v_k), and 0 when there is none."""
    vi, vj, vk = (v if isinstance(v, RationalVector) else RationalVector(v) for v in (vi, vj, vk))
    base = vi - vk
    if base.is_zero():
        raise UndefinedRatio("v_i equals v_k")
    diff = vj - vk
    if diff.is_zero():
        return Fraction(0)
    lam = base.parallel_factor(diff)
    return lam if lam is not None else Fraction(0)


@dataclass(frozen=True)
class ExceptionSet:
    values: tuple
    integral: tuple

    def integers(self):
        return {int(v) for v, ok in zip(self.values, self.integral) if ok}

    def __contains__(self, x):
        return to_fraction(x) in self.values


_EXCEPTION_FORMULAS = (
    ("4j-3i", lambda i, j: 4 * j - 3 * i),
    ("2j-i", lambda i, j: 2 * j - i),
    ("j", lambda i, j: j),
    ("(i+j)/2", lambda i, j: (i + j) / 2),
    ("(3i+j)/4", lambda i, j: (3 * i + j) / 4),
    ("(3i-j)/2", lambda i, j: (3 * i - j) / 2),
    ("2i-j", lambda i, j: 2 * i - j),
    ("3i-2j", lambda i, j: 3 * i - 2 * j),
)

EXCEPTION_NAMES = tuple(name for name, _ in _EXCEPTION_FORMULAS)


def exception_set(i, j):
    """The eight indices k for which Gamma_{E_i}E_j and Gamma_{E_i}E_k may fail to be orthogonal."""
    i, j = int(i), int(j)
    if i == j:
        raise InvalidPair("i and j must differ")
    fi, fj = Fraction(i), Fraction(j)
    vals = tuple(f(fi, fj) for _, f in _EXCEPTION_FORMULAS)
    return ExceptionSet(vals, tuple(v.denominator == 1 for v in vals))


# Component support ----------------------------------------------------------


@dataclass(frozen=True)
class DiagramContext:
    """Where the family alpha sits in a classified diagram.

    ``family``: for C types, ``"extremal"`` (hyperplanes alternate between
    the two end vertices) or ``"middle"``; for B types ``"short"`` or
    ``"long"``.  ``right_parity``: parity of the indices conjugate to the
    right end vertex of the C template.
    """

    symbol: str
    family: str = "extremal"
    right_parity: int = 0

    def info(self):
        try:
            return parse_symbol(self.symbol)
        except Unsupported:
            raise
        except InvalidInput as e:
            fin = _finite(self.symbol)
            if fin is not None:
                return fin
            raise UnclassifiedDiagram("%r is not a classified diagram symbol (%s)" % (self.symbol, e))

    def vertex_class(self, k):
        info = self.info()
        if info.letter == "C":
            if self.family == "middle":
                return "middle"
            return "right" if (k - self.right_parity) % 2 == 0 else "left"
        if info.letter == "B":
            return "short" if self.family == "short" else "long"
        return "other"

    def reducible(self, k):
        info = self.info()
        circled = {
            "short": {"short"},
            "left": {"left"},
            "right": {"right"},
            "both": {"left", "right"},
            "middle": {"middle"},
        }.get(info.circles, set())
        return self.vertex_class(k) in circled


@dataclass(frozen=True)
class _Finite:
    text: str
    letter: str
    n: int
    variant: str = ""
    circles: str = ""


def _finite(sym):
    s = sym.strip().upper()
    for letter in ("BC", "A", "B", "C", "D", "E", "F", "G"):
        if s.startswith(letter) and s[len(letter):].isdigit():
            return _Finite(s, "C" if letter == "BC" else letter, int(s[len(letter):]), "finite")
    return None


@dataclass(frozen=True)
class ComponentSupport:
    """Allowed components of Gamma_{E_{alpha,i}} E_{alpha,j}.

    Items are ``"zero"`` or ``(k, block)`` with block one of
    full/primed/double_primed.
    """

    allowed: frozenset
    exceptional: bool = False
    rule: str = ""

    def indices(self):
        return {it[0] for it in self.allowed if it != "zero"}

    def render(self):
        def fmt(it):
            if it == "zero":
                return "zero"
            k, b = it
            mark = {"full": "", "primed": "'", "double_primed": "''"}[b]
            return "(a,%d)%s" % (k, mark)

        return sorted((fmt(it) for it in self.allowed), key=_render_key)


def _render_key(s):
    if s == "zero":
        return (0, 0, "")
    body = s[3 : s.index(")")]
    return (1, int(body), s)


def general_support(i, j):
    """Largest possible set: zero, 2i-j, 2j-i and (i+j)/2 when integral."""
    out = {"zero", (2 * i - j, "full"), (2 * j - i, "full")}
    if (i + j) % 2 == 0:
        out.add(((i + j) // 2, "full"))
    return out


def _check_block(b):
    if b not in BLOCKS:
        raise InvalidInput("block must be one of %s" % ", ".join(BLOCKS))


def _reducible_even(i, j, bx, by):
    d = i - j
    mid = (i + j) // 2
    if bx == "double_primed" and by == "double_primed":
        return {"zero"}, "double-primed pair"
    if bx == "double_primed":
        return {"zero", (2 * i - j, "primed")}, "double-primed first argument"
    if by == "double_primed":
        return {"zero", (2 * j - i, "primed")}, "double-primed second argument"
    if bx == "primed" and by == "primed":
        if d % 4 == 0:
            return {"zero", (mid, "double_primed")}, "primed pair, difference divisible by 4"
        return general_support(i, j), "primed pair, difference 2 mod 4"
    # a full block splits into its primed and double-primed parts
    out, rules = set(), []
    for x in (("primed", "double_primed") if bx == "full" else (bx,)):
        for y in (("primed", "double_primed") if by == "full" else (by,)):
            s, r = _reducible_even(i, j, x, y)
            out |= s
            rules.append(r)
    return out, "union: " + "; ".join(rules)


def component_support(ctx, i, j, block_x="full", block_y="full", reducible=None):
    """Allowed components of Gamma_{E_{alpha,i}} E_{alpha,j} in the context ``ctx``.

    ``ctx`` is a DiagramContext or a symbol string.  ``reducible`` overrides
    the reducibility read off the diagram's circles; the symbol then only
    supplies the Weyl type.
    """
    if isinstance(ctx, str):
        ctx = DiagramContext(ctx)
    i, j = int(i), int(j)
    if i == j:
        raise InvalidPair("i and j must differ")
    _check_block(block_x)
    _check_block(block_y)
    info = ctx.info()
    letter = info.letter
    d = i - j
    if reducible is None:
        reducible = ctx.reducible(i)
    elif reducible and letter not in ("B", "C"):
        raise InvalidInput("type %s has no reducible eigenspaces on a rank-one slice" % info.text)
    if letter in ("A", "D", "E", "F", "G"):
        return ComponentSupport(frozenset({"zero"}), False, "Weyl type %s~" % letter)
    if (block_x != "full" or block_y != "full") and not reducible:
        raise InvalidInput("primed blocks need a reducible eigenspace")
    if reducible:
        if d % 2:
            return ComponentSupport(frozenset(general_support(i, j)), False, "odd difference")
        out, rule = _reducible_even(i, j, block_x, block_y)
        return ComponentSupport(frozenset(out), False, "reducible, even difference: " + rule)
    if d % 4 == 0:
        return ComponentSupport(frozenset({"zero"}), False, "difference divisible by 4")
    if letter == "B":
        return ComponentSupport(frozenset({"zero"}), False, "irreducible, Weyl type B~")
    if d % 2 == 0:
        mid = (i + j) // 2
        exceptional = (
            info.variant == "'" or (info.circles == "left" and info.variant == "^v")
        ) and ctx.vertex_class(i) == "right" and ctx.vertex_class(mid) == "left"
        return ComponentSupport(frozenset({"zero", (mid, "full")}), exceptional, "even difference")
    return ComponentSupport(frozenset({"zero", (2 * i - j, "full"), (2 * j - i, "full")}), False, "odd difference")


# Rank-one envelopes -----------------------------------------------------------


def rank_one_envelope(symbol, vertex):
    """Type of the smallest rank-2 slice containing the rank-one slice of a vertex.

    ``vertex`` indexes the template diagram of ``symbol``.
    """
    info = parse_symbol(symbol)
    D = template(info)
    if not 0 <= vertex < len(D):
        raise InvalidInput("vertex %d out of range for %s" % (vertex, symbol))
    for cls in vertex_orbits(D):
        if vertex in cls and len(cls) >= 2:
            return "A~2"
    return _to_rank_two(info)


def _to_rank_two(info):
    def one(s):
        t = parse_symbol(s)
        letter = "C" if t.letter == "B" else t.letter
        return "%s~2%s" % (letter, t.variant)

    if info.pair:
        return "(%s,%s)" % (one(info.pair[0]), one(info.pair[1]))
    return one(info.text)


# C~2 intersection spacing -------------------------------------------------------


def refl_spacing(W, H, Hp):
    """Whether lines parallel to ``Hp`` pass through every, or only every second,
    intersection point on ``H`` (exact enumeration inside the window)."""
    from .weyl_group import classify

    if H.normal == Hp.normal:
        raise InvalidPair("H and H' are parallel")
    if not (W.contains(H) and W.contains(Hp)):
        raise InvalidInput("H and H' must belong to the arrangement")
    sym = classify(W).symbol
    if parse_symbol(sym).letter != "C" or parse_symbol(sym).n != 2:
        raise InvalidInput("refl_spacing needs a C~2-type arrangement, got %s" % sym)
    # parametrize H: p(t) = p0 + t*u, u spanning H inside the plane
    basis = [e for e in W.basis]
    n = H.normal
    u = None
    for e in basis:
        cand = e - n * (n.dot(e) / n.norm2())
        if not cand.is_zero():
            u = cand
            break
    p0 = W.center - n * (H.value(W.center) / n.norm2())
    ts = set()
    for m in W.merged.values():
        if m.normal == n:
            continue
        nu = m.normal.dot(u)
        base = m.normal.dot(p0)
        for k in m.indices_in_ball(W.center, W.radius):
            t = (m.offset(k) - base) / nu
            if W.in_ball(p0 + u * t):
                ts.add(t)
    ts = sorted(ts)
    if len(ts) < 4:
        raise InvalidInput("window too small to see the spacing along H")
    par = W.merged[Hp.normal]
    hits = [par.level(p0 + u * t).denominator == 1 for t in ts]
    if all(hits):
        return "every"
    if all(a != b for a, b in zip(hits, hits[1:])):
        return "every_second"
    raise InvalidInput("no regular pattern of parallels along H")


# Parallel manifolds -----------------------------------------------------------


def parallel_translate(families, xi):
    """Families seen from basepoint + xi: every lambda_k drops by <xi, w>."""
    xi = xi if isinstance(xi, RationalVector) else RationalVector(xi)
    out = []
    for f in families:
        shift = xi.dot(f.w)
        g = HyperplaneFamily(f.label, f.w, f.d0 - shift, f.d)
        k = g.focal_index()
        if k is not None:
            raise FocalTranslation(
                "translation by %s lands on the hyperplane of index %d of family %s" % (xi, k, f.label)
            )
        out.append(g)
    return out


# Sums and bounds --------------------------------------------------------------


def _half_sum(a, K):
    """sum_{k>=0} 1/(a+k)^2 as an exact partial sum plus tail bounds."""
    s = Fraction(0)
    for k in range(K):
        s += 1 / (a + k) ** 2
    t = a + K
    lo = s + 1 / t + 1 / (2 * t * t)
    hi = s + 1 / (t - Fraction(1, 2))
    return lo, hi


def normal_sum(f, precision=Fraction(1, 10**6)):
    """Enclosure [lo, hi] of sum_k |v_k|^2 = |w|^2 sum_k 1/(d0+k d)^2 with hi - lo <= precision.

    Uses exact partial sums and tail bounds from comparing the convex summand
    with its integral (trapezoid below, midpoint above).
    """
    precision = to_fraction(precision)
    if precision <= 0:
        raise InvalidInput("precision must be positive")
    if f.focal_index() is not None:
        raise DivergentSum("a hyperplane passes through the basepoint; the sum diverges")
    u = (f.d0 / f.d) - math.floor(f.d0 / f.d)
    scale = f.w.norm2() / (f.d * f.d)
    K = 8
    while True:
        lo1, hi1 = _half_sum(u, K)
        lo2, hi2 = _half_sum(1 - u, K)
        lo, hi = scale * (lo1 + lo2), scale * (hi1 + hi2)
        if hi - lo <= precision:
            return lo, hi
        K *= 2


def gamma_norm_bound(i, j, v2, x2, y2):
    """Upper bound for |Gamma_X Y|^2: 4^(k-1) |v|^2 |X|^2 |Y|^2, k minimal with 2^k not dividing i-j."""
    i, j = int(i), int(j)
    if i == j:
        raise InvalidPair("i and j must differ")
    k = bound_exponent(i - j)
    return Fraction(4) ** (k - 1) * to_fraction(v2) * to_fraction(x2) * to_fraction(y2)


def bound_exponent(diff):
    """Smallest k >= 1 with 2^k not dividing diff (diff != 0)."""
    d = abs(int(diff))
    k = 1
    while d % (2**k) == 0:
        k += 1
    return k
