"""Affine root systems attached to arrangements of parallel hyperplane families.

An affine root system is infinite, so a system here is a *window*: every
root whose hyperplane meets a closed ball.  Systems built from families
also keep the generating data (a family plus the positive root vectors on
it), so any other window can be regenerated exactly.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt, lcm

from .errors import InvalidFamily, InvalidInput, InvalidRoot, NotSpanned
from .exact_geometry import (
    AffineHyperplane,
    AffineIsometry,
    ParallelFamily,
    RationalVector,
)
from .linalg import in_span, rank, to_fraction

__all__ = [
    "AffineRoot",
    "RootFamily",
    "AffineRootSystem",
    "AxiomResult",
    "AxiomReport",
    "FiniteRealization",
    "realization",
    "validate",
    "canonical",
    "with_lengths",
    "reduce",
    "co_reduce",
    "dual",
    "restrict",
    "strongly_orthogonal",
    "merge_parallel",
    "rational_sqrt",
    "PARALLEL_MULTIPLES",
]

PARALLEL_MULTIPLES = frozenset(Fraction(x) for x in (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)))


def rational_sqrt(q):
    q = to_fraction(q)
    if q < 0:
        return None
    n, d = isqrt(q.numerator), isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class AffineRoot:
    """A pair (gradient vector, zero hyperplane)."""

    vector: RationalVector
    hyperplane: AffineHyperplane

    @property
    def length2(self):
        return self.vector.norm2()

    def __str__(self):
        return "(%s, %s)" % (self.vector, self.hyperplane)


@dataclass(frozen=True)
class RootFamily:
    """Roots ±v for every v in ``vectors`` on every hyperplane of ``family``."""

    family: ParallelFamily
    vectors: tuple

    def roots_on(self, h):
        out = []
        for v in self.vectors:
            out.append(AffineRoot(v, h))
            out.append(AffineRoot(-v, h))
        return out


class AffineRootSystem:
    """Finite window of an affine root system.

    ``roots``: frozenset of AffineRoot.  ``center``/``radius``: the window
    ball.  ``root_families`` (optional) regenerates the system in any
    window.  ``space`` is a pair (origin, direction basis) of the affine
    subspace the system lives in; by default the span of the root vectors
    through ``center``.
    """

    def __init__(self, roots, center, radius, root_families=None, space=None, hyperplanes=None):
        self.roots = frozenset(roots)
        self.center = RationalVector(center)
        self.radius = to_fraction(radius)
        self.root_families = tuple(root_families) if root_families is not None else None
        self._hyperplanes = frozenset(hyperplanes) if hyperplanes is not None else None
        if space is None:
            vecs = _basis([list(r.vector) for r in self.roots])
            space = (self.center, tuple(RationalVector(v) for v in vecs))
        self.space = space

    @property
    def dim(self):
        return len(self.center)

    @property
    def rank(self):
        return len(self.space[1])

    @classmethod
    def from_families(cls, root_families, center, radius, space=None):
        center = RationalVector(center)
        radius = to_fraction(radius)
        roots = []
        hyps = []
        for rf in root_families:
            for k in rf.family.indices_in_ball(center, radius):
                h = rf.family.hyperplane(k)
                hyps.append(h)
                roots.extend(rf.roots_on(h))
        return cls(roots, center, radius, root_families, space, hyps)

    def hyperplanes(self):
        """The covered arrangement inside the window."""
        if self._hyperplanes is not None:
            return self._hyperplanes
        return frozenset(r.hyperplane for r in self.roots)

    def meets_window(self, h):
        return h.distance2(self.center) <= self.radius * self.radius

    def lengths2(self):
        return sorted({r.length2 for r in self.roots})

    def with_roots(self, roots, root_families=None):
        return AffineRootSystem(roots, self.center, self.radius, root_families, self.space, self._hyperplanes)

    def __len__(self):
        return len(self.roots)

    def __eq__(self, other):
        return isinstance(other, AffineRootSystem) and self.roots == other.roots

    def __hash__(self):
        return hash(self.roots)


def _basis(rows):
    rows = [r for r in rows if any(r)]
    basis = []
    for r in rows:
        if rank(basis + [r]) > len(basis):
            basis.append(r)
    return basis


@dataclass
class AxiomResult:
    passed: bool
    checked: int
    witness: str = ""


@dataclass
class AxiomReport:
    results: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(r.passed for r in self.results.values())

    def failed(self):
        return [k for k, r in self.results.items() if not r.passed]

    def as_dict(self):
        return {k: {"passed": r.passed, "checked": r.checked, "witness": r.witness} for k, r in self.results.items()}


def validate(R):
    """Check axioms (i)-(iv) and the parallel-multiple rule exactly on the window."""
    if not R.roots:
        raise InvalidInput("empty root system")
    report = AxiomReport()

    # (i) nonzero gradient orthogonal to its hyperplane
    res = AxiomResult(True, 0)
    for r in sorted(R.roots, key=_root_key):
        res.checked += 1
        if r.vector.is_zero() or r.hyperplane.normal.parallel_factor(r.vector) is None:
            res.passed = False
            res.witness = "root %s: vector not a nonzero normal of its hyperplane" % (r,)
            break
    report.results["i"] = res

    # (ii) integrality, and the parallel multiples allowed by it
    vectors = sorted({r.vector for r in R.roots})
    res = AxiomResult(True, 0)
    par = AxiomResult(True, 0)
    for v in vectors:
        vv = v.norm2()
        if vv == 0:
            continue
        for w in vectors:
            res.checked += 1
            c = 2 * v.dot(w) / vv
            if c.denominator != 1 and res.passed:
                res.passed = False
                res.witness = "2<v,w>/<v,v> = 2*%s/%s = %s not an integer for v=%s, w=%s" % (v.dot(w), vv, c, v, w)
            lam = v.parallel_factor(w)
            if lam is not None:
                par.checked += 1
                if lam not in PARALLEL_MULTIPLES and par.passed:
                    par.passed = False
                    par.witness = "w = %s * v for v=%s, w=%s" % (lam, v, w)
    report.results["ii"] = res
    report.results["parallel"] = par

    # (iii) every covered hyperplane carries a root
    carried = {r.hyperplane for r in R.roots}
    res = AxiomResult(True, 0)
    for h in sorted(R.hyperplanes()):
        res.checked += 1
        if h not in carried:
            res.passed = False
            res.witness = "hyperplane %s carries no root" % (h,)
            break
    report.results["iii"] = res

    # (iv) closure under reflections that keep the image in the window
    res = AxiomResult(True, 0)
    roots = R.roots
    ordered = sorted(roots, key=_root_key)
    for h in sorted(carried):
        s = AffineIsometry.reflection(h)
        for r in ordered:
            img_h = s.image_hyperplane(r.hyperplane)
            if not R.meets_window(img_h):
                continue
            res.checked += 1
            img = AffineRoot(s.linear(r.vector), img_h)
            if img not in roots:
                res.passed = False
                res.witness = "reflection in %s maps %s to %s, which is missing" % (h, r, img)
                break
        if not res.passed:
            break
    report.results["iv"] = res
    return report


def _root_key(r):
    return (r.hyperplane.normal.coords, r.hyperplane.offset, r.vector.coords)


def merge_parallel(families):
    """Group families by direction; each group must form one equidistant family.

    Returns a dict: primitive normal -> merged ParallelFamily.
    """
    groups = {}
    for f in families:
        groups.setdefault(f.normal, []).append(f)
    merged = {}
    for n, fs in groups.items():
        den = lcm(*[f.spacing.denominator for f in fs])
        period = Fraction(lcm(*[(f.spacing * den).numerator for f in fs]), den)
        values = set()
        for f in fs:
            m = int(period / f.spacing)
            for k in range(m):
                values.add((f.phase + k * f.spacing) % period)
        vals = sorted(values)
        gaps = {b - a for a, b in zip(vals, vals[1:])}
        gaps.add(vals[0] + period - vals[-1])
        if len(gaps) != 1:
            raise InvalidFamily("parallel families with normal %s do not form an equidistant family" % (n,))
        spacing = gaps.pop()
        merged[n] = ParallelFamily(fs[0].label if len(fs) == 1 else "+".join(str(f.label) for f in fs), n, spacing, vals[0])
    return merged


def _vector_with_length(normal, length2):
    s = rational_sqrt(to_fraction(length2) / normal.norm2())
    if s is None:
        raise InvalidFamily("length^2 %s is not realisable by a rational multiple of %s" % (length2, normal))
    return normal * s


def canonical(families, center, radius):
    """Reduced system with |v| = 1/d_H on each hyperplane (d_H: spacing of its parallel class)."""
    families = list(families)
    if not families:
        raise InvalidInput("no families")
    merged = merge_parallel(families)
    rfs = []
    for f in families:
        m = merged[f.normal]
        length2 = 1 / m.spacing2()
        rfs.append(RootFamily(f, (_vector_with_length(f.normal, length2),)))
    return AffineRootSystem.from_families(rfs, center, radius)


def with_lengths(families, length2, center, radius, doubled=()):
    """System with prescribed length^2 per family label; ``doubled`` labels also carry 2v."""
    rfs = []
    doubled = set(doubled)
    for f in families:
        v = _vector_with_length(f.normal, length2[f.label])
        vecs = (v, v * 2) if f.label in doubled else (v,)
        rfs.append(RootFamily(f, vecs))
    return AffineRootSystem.from_families(rfs, center, radius)


def _map_families(R, fn):
    if R.root_families is None:
        return None
    out = []
    for rf in R.root_families:
        vecs = tuple(fn(rf.vectors))
        if vecs:
            out.append(RootFamily(rf.family, vecs))
    return out


def reduce(R):
    """Keep (v,H) unless (v/2, H) is also a root."""
    roots = R.roots
    keep = [r for r in roots if AffineRoot(r.vector / 2, r.hyperplane) not in roots]
    return R.with_roots(keep, _map_families(R, lambda vs: [v for v in vs if v / 2 not in vs]))


def co_reduce(R):
    """Keep (v,H) unless (2v, H) is also a root."""
    roots = R.roots
    keep = [r for r in roots if AffineRoot(r.vector * 2, r.hyperplane) not in roots]
    return R.with_roots(keep, _map_families(R, lambda vs: [v for v in vs if v * 2 not in vs]))


def _check(v):
    return v * (Fraction(2) / v.norm2())


def dual(R):
    """Replace every gradient v by 2v/|v|^2."""
    roots = [AffineRoot(_check(r.vector), r.hyperplane) for r in R.roots]
    return R.with_roots(roots, _map_families(R, lambda vs: [_check(v) for v in vs]))


def restrict(R, basepoint, directions, radius=None):
    """Restriction to the affine subspace basepoint + span(directions).

    Keeps the roots whose gradient lies in the translation space; their
    hyperplanes then meet the subspace in hyperplanes of it.  The result's
    window is centred at ``basepoint``.
    """
    basepoint = RationalVector(basepoint)
    dirs = [RationalVector(d) for d in directions]
    tb = _basis([list(d) for d in dirs])
    if not tb:
        raise NotSpanned("empty subspace")
    radius = R.radius if radius is None else to_fraction(radius)
    space = (basepoint, tuple(RationalVector(v) for v in tb))

    def inside(v):
        return in_span(tb, list(v))

    if R.root_families is not None:
        rfs = []
        for rf in R.root_families:
            vecs = tuple(v for v in rf.vectors if inside(v))
            if vecs:
                rfs.append(RootFamily(rf.family, vecs))
        out = AffineRootSystem.from_families(rfs, basepoint, radius, space=space)
    else:
        roots = [r for r in R.roots if inside(r.vector)]
        out = AffineRootSystem(roots, basepoint, radius, space=space)
        out = AffineRootSystem([r for r in roots if out.meets_window(r.hyperplane)], basepoint, radius, space=space)
    if rank([list(r.vector) for r in out.roots]) != len(tb):
        raise NotSpanned("root vectors in the subspace do not span its translation space")
    return out


# Finite realizations -----------------------------------------------------


@dataclass(frozen=True)
class FiniteRealization:
    """A finite crystallographic root system in rational coordinates."""

    symbol: str
    dim: int
    positive: tuple

    @property
    def roots(self):
        return self.positive + tuple(-v for v in self.positive)

    def __contains__(self, v):
        return RationalVector(v) in set(self.roots)

    def hyperplane_families(self):
        """L_{a,k} = {x : <a,x> = k}, one family per positive root."""
        return [ParallelFamily(_label(a), a, 1, 0) for a in self.positive]


def _label(v):
    return "(" + ",".join(str(c) for c in v) + ")"


def _e(n, *pairs):
    v = [Fraction(0)] * n
    for i, c in pairs:
        v[i] += c
    return RationalVector(v)


def realization(symbol):
    """Standard realization of a finite root system: A_n, B_n, C_n, D_n, BC_n, G2, F4, E6, E7, E8."""
    s = symbol.strip().upper()
    if s == "G2":
        l1 = RationalVector([1, -1, 0])
        l2 = RationalVector([-2, 1, 1])
        pos = (l1, l2, l1 + l2, l1 * 2 + l2, l1 * 3 + l2, l1 * 3 + l2 * 2)
        return FiniteRealization("G2", 3, pos)
    if s == "F4":
        n = 4
        pos = [_e(n, (i, 1)) for i in range(n)]
        pos += [_e(n, (i, 1), (j, sg)) for i, j in combinations(range(n), 2) for sg in (1, -1)]
        half = Fraction(1, 2)
        for s2 in (1, -1):
            for s3 in (1, -1):
                for s4 in (1, -1):
                    pos.append(RationalVector([half, half * s2, half * s3, half * s4]))
        return FiniteRealization("F4", 4, tuple(pos))
    if s in ("E6", "E7", "E8"):
        return _e_series(s)
    if s.startswith("BC"):
        typ, n = "BC", int(s[2:])
    else:
        typ, n = s[0], int(s[1:])
    if typ == "A":
        if n < 1:
            raise InvalidInput("A_n needs n >= 1")
        pos = [_e(n + 1, (i, 1), (j, -1)) for i, j in combinations(range(n + 1), 2)]
        return FiniteRealization("A%d" % n, n + 1, tuple(pos))
    pm = [_e(n, (i, 1), (j, sg)) for i, j in combinations(range(n), 2) for sg in (-1, 1)]
    if typ == "B":
        return FiniteRealization("B%d" % n, n, tuple([_e(n, (i, 1)) for i in range(n)] + pm))
    if typ == "C":
        return FiniteRealization("C%d" % n, n, tuple([_e(n, (i, 2)) for i in range(n)] + pm))
    if typ == "D":
        if n < 2:
            raise InvalidInput("D_n needs n >= 2")
        return FiniteRealization("D%d" % n, n, tuple(pm))
    if typ == "BC":
        singles = [_e(n, (i, 1)) for i in range(n)] + [_e(n, (i, 2)) for i in range(n)]
        return FiniteRealization("BC%d" % n, n, tuple(singles + pm))
    raise InvalidInput("unknown finite type %r" % symbol)


def _e_series(s):
    half = Fraction(1, 2)
    pos8 = [_e(8, (i, 1), (j, sg)) for i, j in combinations(range(8), 2) for sg in (-1, 1)]
    for mask in range(128):
        signs = [1 if not (mask >> i) & 1 else -1 for i in range(7)]
        if signs.count(-1) % 2:
            continue
        pos8.append(RationalVector([half * sg for sg in signs] + [half]))
    pos8 = [v if _positive(v) else -v for v in pos8]
    if s == "E8":
        return FiniteRealization("E8", 8, tuple(pos8))
    # E7: roots orthogonal to a fixed root; E6: orthogonal to an A2 pair
    a = RationalVector([0, 0, 0, 0, 0, 0, 1, 1])
    b = RationalVector([0, 0, 0, 0, 0, 1, -1, 0])
    if s == "E7":
        return FiniteRealization("E7", 8, tuple(v for v in pos8 if v.dot(a) == 0))
    return FiniteRealization("E6", 8, tuple(v for v in pos8 if v.dot(a) == 0 and v.dot(b) == 0))


def _positive(v):
    for c in reversed(v.coords):
        if c != 0:
            return c > 0
    return False


def strongly_orthogonal(delta, lam, mu):
    """True iff <lam,mu> = 0 and neither lam+mu nor lam-mu is a root."""
    lam, mu = RationalVector(lam), RationalVector(mu)
    roots = set(delta.roots)
    for r in (lam, mu):
        if r not in roots:
            raise InvalidRoot("%s is not a root of %s" % (r, delta.symbol))
    if lam.dot(mu) != 0:
        return False
    return (lam + mu) not in roots and (lam - mu) not in roots
