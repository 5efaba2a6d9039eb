"""Exact rational points, hyperplanes, reflections and angle classes.

Everything is decided in the rationals.  Angles are never computed; two
directions are compared through the squared cosine
``r = <u,w>^2 / (<u,u><w,w>)``, which is rational for rational input.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

from .errors import (
    DegenerateConfiguration,
    InvalidFamily,
    InvalidHyperplane,
    PreconditionError,
)
from .linalg import rank, to_fraction

__all__ = [
    "RationalVector",
    "AffineHyperplane",
    "AffineIsometry",
    "ParallelFamily",
    "AngleClass",
    "EuclidVerdict",
    "ScanReport",
    "reflect",
    "angle_ratio",
    "angle_class",
    "angle_class_of_vectors",
    "colinear",
    "euclid_check",
    "euclid_scan",
    "grid_values",
]


class RationalVector:
    """Immutable vector of Fractions with exact arithmetic."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(to_fraction(c) for c in coords))

    def __setattr__(self, name, value):
        raise AttributeError("RationalVector is immutable")

    @classmethod
    def zero(cls, dim):
        return cls([0] * dim)

    @classmethod
    def unit(cls, dim, i):
        return cls([int(j == i) for j in range(dim)])

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        if isinstance(other, RationalVector):
            return self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def __lt__(self, other):
        return self.coords < other.coords

    def __repr__(self):
        return "RationalVector(%s)" % ", ".join(str(c) for c in self.coords)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def _check(self, other):
        if len(other) != len(self.coords):
            raise ValueError("dimension mismatch: %d vs %d" % (len(self.coords), len(other)))

    def __add__(self, other):
        self._check(other)
        return RationalVector(a + b for a, b in zip(self.coords, other))

    def __sub__(self, other):
        self._check(other)
        return RationalVector(a - b for a, b in zip(self.coords, other))

    def __neg__(self):
        return RationalVector(-a for a in self.coords)

    def __mul__(self, c):
        c = to_fraction(c)
        return RationalVector(c * a for a in self.coords)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = to_fraction(c)
        return RationalVector(a / c for a in self.coords)

    def dot(self, other):
        self._check(other)
        s = Fraction(0)
        for a, b in zip(self.coords, other):
            if a and b:
                s += a * b
        return s

    def norm2(self):
        return self.dot(self.coords)

    def is_zero(self):
        return not any(self.coords)

    def primitive(self):
        """Positive multiple with coprime integer entries (same direction)."""
        if self.is_zero():
            raise ValueError("zero vector has no primitive form")
        den = lcm(*[c.denominator for c in self.coords])
        ints = [int(c * den) for c in self.coords]
        g = 0
        for v in ints:
            g = gcd(g, v)
        return RationalVector(v // g for v in ints)

    def parallel_factor(self, other):
        """lam with other == lam*self, or None."""
        lam = None
        for a, b in zip(self.coords, other):
            if a == 0:
                if b != 0:
                    return None
                continue
            q = b / a
            if lam is None:
                lam = q
            elif q != lam:
                return None
        return lam


def _vec(x):
    return x if isinstance(x, RationalVector) else RationalVector(x)


class AffineHyperplane:
    """{x : <normal, x> = offset}, stored in a canonical scaling.

    The stored normal is a primitive integer vector whose first nonzero
    coordinate is positive, so equal hyperplanes compare and hash equal.
    """

    __slots__ = ("normal", "offset")

    def __init__(self, normal, offset):
        normal = _vec(normal)
        offset = to_fraction(offset)
        if normal.is_zero():
            raise InvalidHyperplane("hyperplane normal must be nonzero")
        prim = normal.primitive()
        q = prim.parallel_factor(normal)  # normal = q * prim
        lead = next(c for c in prim.coords if c != 0)
        if lead < 0:
            prim = -prim
            q = -q
        object.__setattr__(self, "normal", prim)
        object.__setattr__(self, "offset", offset / q)

    def __setattr__(self, name, value):
        raise AttributeError("AffineHyperplane is immutable")

    @property
    def dim(self):
        return len(self.normal)

    def value(self, x):
        return self.normal.dot(x) - self.offset

    def contains(self, x):
        return self.value(x) == 0

    def side(self, x):
        v = self.value(x)
        return (v > 0) - (v < 0)

    def distance2(self, x):
        v = self.value(x)
        return v * v / self.normal.norm2()

    def is_parallel(self, other):
        return self.normal == other.normal

    def __eq__(self, other):
        if isinstance(other, AffineHyperplane):
            return self.normal == other.normal and self.offset == other.offset
        return NotImplemented

    def __hash__(self):
        return hash((self.normal, self.offset))

    def __lt__(self, other):
        return (self.normal.coords, self.offset) < (other.normal.coords, other.offset)

    def __repr__(self):
        return "AffineHyperplane(%s, %s)" % (self.normal, self.offset)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.normal):
            if c == 0:
                continue
            coef = "" if c == 1 else "-" if c == -1 else str(c)
            terms.append("%sx%d" % (coef, i + 1))
        return "%s = %s" % (" + ".join(terms).replace("+ -", "- "), self.offset)


def reflect(h, x):
    """Orthogonal reflection of the point ``x`` in the hyperplane ``h``."""
    if not isinstance(h, AffineHyperplane):
        raise InvalidHyperplane("expected an AffineHyperplane")
    x = _vec(x)
    v = h.normal
    t = 2 * (x.dot(v) - h.offset) / v.norm2()
    if t == 0:
        return x
    return x - v * t


class AffineIsometry:
    """x -> matrix·x + translation, with an exact rational orthogonal matrix."""

    __slots__ = ("matrix", "translation")

    def __init__(self, matrix, translation):
        self.matrix = tuple(tuple(to_fraction(a) for a in row) for row in matrix)
        self.translation = _vec(translation)

    @classmethod
    def identity(cls, dim):
        return cls([[int(i == j) for j in range(dim)] for i in range(dim)], [0] * dim)

    @classmethod
    def reflection(cls, h):
        v = h.normal
        n2 = v.norm2()
        dim = len(v)
        m = [[int(i == j) - 2 * v[i] * v[j] / n2 for j in range(dim)] for i in range(dim)]
        return cls(m, v * (2 * h.offset / n2))

    def apply(self, x):
        x = _vec(x)
        return RationalVector(
            sum((a * b for a, b in zip(row, x) if a and b), Fraction(0)) + t
            for row, t in zip(self.matrix, self.translation)
        )

    def linear(self, x):
        return RationalVector(sum((a * b for a, b in zip(row, x) if a and b), Fraction(0)) for row in self.matrix)

    def compose(self, other):
        """self ∘ other."""
        cols = list(zip(*other.matrix))
        m = [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in cols] for row in self.matrix]
        return AffineIsometry(m, self.apply(other.translation))

    def image_hyperplane(self, h):
        n = self.linear(h.normal)
        return AffineHyperplane(n, h.offset + n.dot(self.translation))

    def __eq__(self, other):
        return self.matrix == other.matrix and self.translation == other.translation

    def __hash__(self):
        return hash((self.matrix, self.translation))


class AngleClass(str, Enum):
    PARALLEL = "parallel"
    RIGHT = "right"
    PI3 = "pi3"
    PI4 = "pi4"
    PI6 = "pi6"
    OTHER = "other"

    @property
    def link(self):
        """Coxeter link multiplicity: pi/2 -> 0, pi/3 -> 1, pi/4 -> 2, pi/6 -> 3."""
        return _LINKS.get(self)


_RATIO_CLASS = {
    Fraction(1): AngleClass.PARALLEL,
    Fraction(0): AngleClass.RIGHT,
    Fraction(1, 4): AngleClass.PI3,
    Fraction(1, 2): AngleClass.PI4,
    Fraction(3, 4): AngleClass.PI6,
}
_LINKS = {AngleClass.RIGHT: 0, AngleClass.PI3: 1, AngleClass.PI4: 2, AngleClass.PI6: 3}


def angle_ratio(u, w):
    u, w = _vec(u), _vec(w)
    uu, ww = u.norm2(), w.norm2()
    if uu == 0 or ww == 0:
        raise InvalidHyperplane("zero direction")
    uw = u.dot(w)
    return uw * uw / (uu * ww)


def angle_class_of_vectors(u, w):
    return _RATIO_CLASS.get(angle_ratio(u, w), AngleClass.OTHER)


def angle_class(h1, h2):
    """Angle class between two hyperplanes, read off their normals."""
    n1 = h1.normal if isinstance(h1, AffineHyperplane) else _vec(h1)
    n2 = h2.normal if isinstance(h2, AffineHyperplane) else _vec(h2)
    return angle_class_of_vectors(n1, n2)


def colinear(points):
    pts = [_vec(p) for p in points]
    if len(pts) < 3:
        return True
    base = pts[0]
    diffs = [list(p - base) for p in pts[1:]]
    return rank(diffs) <= 1


class ParallelFamily:
    """Equidistant parallel hyperplanes {<normal,x> = phase + k*spacing : k in Z}.

    The normal is normalised to a primitive integer vector with positive
    leading coordinate; spacing > 0 and 0 <= phase < spacing after
    normalisation, so the index k of a given hyperplane is well defined.
    """

    __slots__ = ("label", "normal", "spacing", "phase", "reducible")

    def __init__(self, label, normal, spacing, phase=0, reducible=False):
        normal = _vec(normal)
        spacing = to_fraction(spacing)
        phase = to_fraction(phase)
        if normal.is_zero():
            raise InvalidFamily("family %r has zero direction" % (label,))
        if spacing == 0:
            raise InvalidFamily("family %r is not equidistant (zero spacing)" % (label,))
        prim = normal.primitive()
        q = prim.parallel_factor(normal)
        lead = next(c for c in prim.coords if c != 0)
        if lead < 0:
            prim, q = -prim, -q
        phase, spacing = phase / q, abs(spacing / q)
        phase = phase - spacing * ((phase / spacing).__floor__())
        self.label = label
        self.normal = prim
        self.spacing = spacing
        self.phase = phase
        self.reducible = bool(reducible)

    def __repr__(self):
        return "ParallelFamily(%r, %s, spacing=%s, phase=%s)" % (self.label, self.normal, self.spacing, self.phase)

    def key(self):
        return (self.normal, self.spacing, self.phase)

    def same_hyperplanes(self, other):
        return self.key() == other.key()

    def offset(self, k):
        return self.phase + k * self.spacing

    def hyperplane(self, k):
        return AffineHyperplane(self.normal, self.offset(k))

    def level(self, x):
        """Fractional index of the point x: (<n,x> - phase)/spacing."""
        return (self.normal.dot(x) - self.phase) / self.spacing

    def index_of(self, h):
        if h.normal != self.normal:
            return None
        t = (h.offset - self.phase) / self.spacing
        return int(t) if t.denominator == 1 else None

    def contains_value(self, c):
        t = (c - self.phase) / self.spacing
        return t.denominator == 1

    def spacing2(self):
        """Squared Euclidean distance between consecutive hyperplanes."""
        return self.spacing * self.spacing / self.normal.norm2()

    def indices_in_ball(self, center, radius):
        """All k whose hyperplane meets the closed ball (exact test)."""
        center = _vec(center)
        radius = to_fraction(radius)
        c0 = self.normal.dot(center)
        n2 = self.normal.norm2()
        bound2 = radius * radius * n2
        mid = (c0 - self.phase) / self.spacing
        approx = float(radius) * float(n2) ** 0.5 / float(self.spacing)
        lo = int(float(mid) - approx) - 2
        hi = int(float(mid) + approx) + 2
        out = []
        for k in range(lo, hi + 1):
            d = self.offset(k) - c0
            if d * d <= bound2:
                out.append(k)
        return out

    def image(self, iso):
        """Image family under an affine isometry."""
        h0 = iso.image_hyperplane(self.hyperplane(0))
        h1 = iso.image_hyperplane(self.hyperplane(1))
        step = h1.offset - h0.offset
        return ParallelFamily(self.label, h0.normal, abs(step), h0.offset, self.reducible)


@dataclass(frozen=True)
class _Lines:
    normal: RationalVector
    direction: RationalVector
    offsets: tuple


class EuclidVerdict(str, Enum):
    COLINEAR = "colinear"
    MIDLINE_ORTHOGONAL = "midline_orthogonal"
    CONSTRAINTS_NOT_SATISFIED = "constraints_not_satisfied"
    # reported only if the plane-geometry dichotomy itself failed
    VIOLATION = "violation"


_PI6_RATIOS = frozenset([Fraction(1), Fraction(3, 4), Fraction(1, 4)])
_PI4_RATIOS = frozenset([Fraction(1), Fraction(1, 2), Fraction(0)])


def _line_data(lines, plane):
    if len(lines) != 3:
        raise PreconditionError("euclid_check needs exactly three lines")
    n0 = lines[0].normal
    offsets = []
    for h in lines:
        if h.normal != n0:
            raise PreconditionError("the three lines must be parallel")
        offsets.append(h.offset)
    if len(set(offsets)) != 3:
        raise PreconditionError("the three lines must be pairwise distinct")
    if plane is None:
        if len(n0) != 2:
            raise PreconditionError("lines outside the plane need an explicit plane basis")
        b1, b2 = RationalVector([1, 0]), RationalVector([0, 1])
    else:
        b1, b2 = (_vec(b) for b in plane)
    direction = b1 * n0.dot(b2) - b2 * n0.dot(b1)
    if direction.is_zero() or rank([list(b1), list(b2), list(n0)]) != 2:
        raise PreconditionError("line normals must lie in the plane")
    return _Lines(n0, direction, tuple(offsets))


def euclid_check(lines, points, plane=None):
    """Classify three points on three parallel lines by the six-line angle test.

    ``plane`` is an optional basis of a rational 2-plane through 0 that
    contains the configuration; it defaults to Q^2.  When the angle
    hypotheses hold, the verdict is computed from the geometry itself
    (colinearity, halfway position, orthogonality) rather than assumed.
    """
    data = _line_data(lines, plane)
    pts = [_vec(p) for p in points]
    if len(pts) != 3:
        raise PreconditionError("euclid_check needs exactly three points")
    for h, p in zip(lines, pts):
        if not h.contains(p):
            raise PreconditionError("point %s is not on line %s" % (p, h))
    if plane is not None:
        b = [list(_vec(v)) for v in plane]
        for p in pts:
            if rank(b + [list(p)]) != 2:
                raise PreconditionError("point %s is not in the plane" % (p,))
    if len(set(pts)) < 3:
        raise DegenerateConfiguration("coincident points leave a connecting line undefined")

    chords = {(i, j): pts[j] - pts[i] for i, j in combinations(range(3), 2)}
    directions = [data.direction] * 3 + list(chords.values())
    ratios = set()
    for u, w in combinations(directions, 2):
        ratios.add(angle_ratio(u, w))

    is_col = colinear(pts)
    if ratios <= _PI6_RATIOS:
        return EuclidVerdict.COLINEAR if is_col else EuclidVerdict.VIOLATION
    if ratios <= _PI4_RATIOS:
        if is_col:
            return EuclidVerdict.COLINEAR
        order = sorted(range(3), key=lambda i: data.offsets[i])
        lo, mid, hi = order
        halfway = 2 * data.offsets[mid] == data.offsets[lo] + data.offsets[hi]
        a, b = min(lo, hi), max(lo, hi)
        perpendicular = angle_ratio(chords[(a, b)], data.direction) == 0
        if halfway and perpendicular:
            return EuclidVerdict.MIDLINE_ORTHOGONAL
        return EuclidVerdict.VIOLATION
    return EuclidVerdict.CONSTRAINTS_NOT_SATISFIED


def grid_values(lo, hi, max_den):
    """Sorted rationals in [lo, hi] with denominator <= max_den."""
    vals = set()
    for q in range(1, max_den + 1):
        for p in range(lo * q, hi * q + 1):
            vals.add(Fraction(p, q))
    return sorted(vals)


@dataclass
class ScanReport:
    regime: str
    configurations: int
    hypothesis_met: int
    verdicts: dict
    violations: list

    @property
    def ok(self):
        return not self.violations


# Embeddings used by the scan.  "pi4" lives in Q^2 with vertical lines.
# "pi6" lives in the plane {x1+x2+x3=0} of Q^3, where the hexagonal
# directions have rational coordinates.
_EMBEDDINGS = {
    "pi4": dict(
        normal=(1, 0),
        across=(1, 0),
        along=(0, 1),
        plane=None,
    ),
    "pi6": dict(
        normal=(1, -1, 0),
        across=(Fraction(1, 2), Fraction(-1, 2), 0),
        along=(Fraction(1, 6), Fraction(1, 6), Fraction(-1, 3)),
        plane=((1, -1, 0), (1, 1, -2)),
    ),
}


def _quarter_ratio(uw, uu, ww):
    # r = uw^2/(uu*ww) lies in [0, 1]; it is in {0, 1/4, 1/2, 3/4, 1} iff 4*uw^2 is a multiple of uu*ww
    return (4 * uw * uw) % (uu * ww) == 0


def euclid_scan(regime, offsets=range(7), span=(0, 6), max_den=4):
    """Exhaustive check of the three-line dichotomy on a rational grid.

    Lines sit at integer offsets ``c`` (``<normal,x> = c``); on each line
    the points are ``c*across + s*along`` with ``s`` in the grid of
    rationals in ``span`` with denominator at most ``max_den``.

    Every configuration whose six lines pairwise make angles in the
    union of both hypotheses is handed to :func:`euclid_check`.  The
    others are counted as ``constraints_not_satisfied`` directly, using
    the same squared-cosine test in scaled integer coordinates.
    """
    emb = _EMBEDDINGS[regime]
    normal = RationalVector(emb["normal"])
    across = RationalVector(emb["across"])
    along = RationalVector(emb["along"])
    plane = emb["plane"]
    if across.dot(along) != 0:
        raise ValueError("embedding coordinates must be orthogonal")
    g_c, g_s = across.norm2(), along.norm2()
    scale = lcm(g_c.denominator, g_s.denominator)
    wc, ws = int(g_c * scale), int(g_s * scale)
    grid = grid_values(span[0], span[1], max_den)
    den = lcm(*[g.denominator for g in grid])
    igrid = [int(g * den) for g in grid]

    def vs_lines(dc, ds):
        return _quarter_ratio(ws * ds, ws, wc * dc * dc + ws * ds * ds) if (dc or ds) else False

    def chords(u, w):
        uw = wc * u[0] * w[0] + ws * u[1] * w[1]
        uu = wc * u[0] * u[0] + ws * u[1] * u[1]
        ww = wc * w[0] * w[0] + ws * w[1] * w[1]
        return _quarter_ratio(uw, uu, ww)

    verdicts = {v.value: 0 for v in EuclidVerdict}
    violations = []
    total = 0
    met = 0
    rejected = EuclidVerdict.CONSTRAINTS_NOT_SATISFIED.value
    n = len(grid)
    for c1, c2, c3 in combinations(list(offsets), 3):
        lines = [AffineHyperplane(normal, c) for c in (c1, c2, c3)]
        k1, k2, k3 = c1 * den, c2 * den, c3 * den
        for a1, s1 in zip(igrid, grid):
            for a2, s2 in zip(igrid, grid):
                u12 = (k2 - k1, a2 - a1)
                if not vs_lines(*u12):
                    total += n
                    verdicts[rejected] += n
                    continue
                for a3, s3 in zip(igrid, grid):
                    total += 1
                    u13 = (k3 - k1, a3 - a1)
                    u23 = (k3 - k2, a3 - a2)
                    if not (vs_lines(*u13) and vs_lines(*u23) and chords(u12, u13)
                            and chords(u12, u23) and chords(u13, u23)):
                        verdicts[rejected] += 1
                        continue
                    pts = [across * c + along * s for c, s in ((c1, s1), (c2, s2), (c3, s3))]
                    v = euclid_check(lines, pts, plane=plane)
                    verdicts[v.value] += 1
                    if v is not EuclidVerdict.CONSTRAINTS_NOT_SATISFIED:
                        met += 1
                    if v is EuclidVerdict.VIOLATION:
                        violations.append(((c1, c2, c3), (s1, s2, s3)))
    return ScanReport(regime, total, met, verdicts, violations)
