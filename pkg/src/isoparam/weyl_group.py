"""Affine Weyl groups of hyperplane arrangements.

Alcoves are found by exact ray shooting, Dynkin diagrams are read off the
walls of one alcove and matched against stored templates, and group
elements are plain affine isometries.
"""

import random
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt, lcm

from .errors import (
    CircleRuleError,
    InvalidInput,
    InvarianceError,
    OnWall,
    PreconditionError,
    UnclassifiedDiagram,
    Unsupported,
    WindowExhausted,
)
from .exact_geometry import (
    AffineHyperplane,
    AffineIsometry,
    ParallelFamily,
    RationalVector,
    angle_class,
)
from .linalg import nullspace, rank, solve, to_fraction
from .root_system import merge_parallel, rational_sqrt, realization

__all__ = [
    "ArrangementWindow",
    "Alcove",
    "DynkinDiagram",
    "ModelArrangement",
    "find_alcove",
    "canonical_lengths",
    "dynkin",
    "classify",
    "system_diagram",
    "vertex_orbits",
    "wall_conjugacy_classes",
    "fold_hyperplane",
    "special_points",
    "alcove_transitivity_check",
    "template",
    "templates_for_rank",
    "parse_symbol",
    "model_arrangement",
    "table_symbols",
    "match_symbol",
]


def _upper_sqrt(q, den=1000):
    """A rational >= sqrt(q), exact when q is a rational square."""
    s = rational_sqrt(q)
    if s is not None:
        return s
    n = isqrt(int(q * den * den)) + 1
    return Fraction(n, den)


def _independent(rows):
    basis = []
    for r in rows:
        if rank(basis + [r]) > len(basis):
            basis.append(r)
    return basis


class ArrangementWindow:
    """Finitely many equidistant parallel families, seen through a closed ball.

    ``families`` is a list of ParallelFamily with distinct labels.  Parallel
    families are merged into one equidistant class each; the union must be
    invariant under every reflection in one of its hyperplanes.
    """

    def __init__(self, families, center=None, radius=None, check=True):
        families = list(families)
        if not families:
            raise InvalidInput("an arrangement needs at least one family")
        labels = [f.label for f in families]
        if len(set(labels)) != len(labels):
            raise InvalidInput("family labels must be distinct")
        dim = len(families[0].normal)
        if any(len(f.normal) != dim for f in families):
            raise InvalidInput("families live in different dimensions")
        self.families = tuple(families)
        self.dim = dim
        self.center = RationalVector(center) if center is not None else RationalVector.zero(dim)
        self.merged = merge_parallel(families)
        if radius is None:
            widest = max(m.spacing2() for m in self.merged.values())
            radius = 4 * _upper_sqrt(widest)
        self.radius = to_fraction(radius)
        if self.radius <= 0:
            raise InvalidInput("window radius must be positive")
        self.basis = tuple(RationalVector(v) for v in _independent([list(n) for n in self.merged]))
        self.rank = len(self.basis)
        self._images = None
        self._by_normal = {}
        for f in families:
            self._by_normal.setdefault(f.normal, []).append(f)
        if check:
            self.check_closure()

    def family(self, label):
        for f in self.families:
            if f.label == label:
                return f
        raise KeyError(label)

    def family_of(self, h):
        """First input family containing the hyperplane h."""
        for f in self._by_normal.get(h.normal, ()):
            if f.index_of(h) is not None:
                return f
        return None

    def contains(self, h):
        m = self.merged.get(h.normal)
        return m is not None and m.index_of(h) is not None

    def generators(self):
        """Reflections in the hyperplanes of index 0 and 1 of every class; they generate W."""
        gens = []
        for n, m in sorted(self.merged.items()):
            gens.append(AffineIsometry.reflection(m.hyperplane(0)))
            gens.append(AffineIsometry.reflection(m.hyperplane(1)))
        return gens

    def _covered(self, fam):
        m = self.merged.get(fam.normal)
        if m is None:
            return False
        return (fam.spacing / m.spacing).denominator == 1 and ((fam.phase - m.phase) / m.spacing).denominator == 1

    def reflected_families(self):
        """(family, reflecting hyperplane, image family) for every input family
        and every generator reflection; computed from the normals directly."""
        if self._images is not None:
            return self._images
        out = []
        for mn, mg in sorted(self.merged.items()):
            m2 = mn.norm2()
            for f in self.families:
                nm = f.normal.dot(mn)
                n_img = f.normal - mn * (2 * nm / m2) if nm else f.normal
                for k in (0, 1):
                    c = mg.offset(k)
                    shift = 2 * c * nm / m2
                    out.append((f, mg.hyperplane(k), ParallelFamily(f.label, n_img, f.spacing, f.phase - shift)))
        self._images = out
        return out

    def check_closure(self):
        for f, h, img in self.reflected_families():
            if not self._covered(img):
                raise InvarianceError(
                    "arrangement is not closed under reflection in %s: image of family %s is missing" % (h, f.label)
                )

    def hyperplanes(self):
        out = []
        for m in self.merged.values():
            out.extend(m.hyperplane(k) for k in m.indices_in_ball(self.center, self.radius))
        return sorted(out)

    def in_ball(self, x):
        d = RationalVector(x) - self.center
        return d.norm2() <= self.radius * self.radius

    def on_some_wall(self, x):
        return any(m.level(x).denominator == 1 for m in self.merged.values())

    def walls_through(self, x):
        return [m.hyperplane(int(m.level(x))) for m in self.merged.values() if m.level(x).denominator == 1]

    def alcove_key(self, x):
        """Integer parts of the family levels; identifies the open alcove of a generic point."""
        return tuple(m.level(x).__floor__() for _, m in sorted(self.merged.items()))

    def generic_point(self):
        """Deterministic point on no hyperplane: center + sum delta^(i+1) e_i for the first working delta."""
        q = 3
        while True:
            delta = Fraction(1, q)
            x = self.center
            for i, e in enumerate(self.basis):
                x = x + e * delta ** (i + 1)
            if not self.on_some_wall(x):
                return x
            q += 2

    def components(self):
        """Merged classes grouped into irreducible components (non-orthogonality)."""
        normals = sorted(self.merged)
        parent = list(range(len(normals)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(normals)):
            for j in range(i + 1, len(normals)):
                if normals[i].dot(normals[j]) != 0:
                    parent[find(i)] = find(j)
        groups = {}
        for i, n in enumerate(normals):
            groups.setdefault(find(i), []).append(n)
        return sorted(groups.values())


@dataclass(frozen=True)
class Alcove:
    walls: tuple
    signs: tuple
    vertices: tuple
    interior: RationalVector
    components: tuple = ()

    @property
    def barycenter(self):
        # product of simplices: sum of component offsets
        b = self.interior
        out = b
        for comp in self.components:
            s = RationalVector.zero(len(b))
            for v in comp:
                s = s + v
            out = out + (s / len(comp) - b)
        return out

    def contains_closed(self, x):
        return all(sg * h.value(x) >= 0 for h, sg in zip(self.walls, self.signs))

    def violated(self, x):
        for i, (h, sg) in enumerate(zip(self.walls, self.signs)):
            if sg * h.value(x) < 0:
                return i
        return None


def find_alcove(W, basepoint=None, seed=0, max_rays=200, check_window=True):
    """Walls of the alcove containing ``basepoint``, certified exactly."""
    b = W.generic_point() if basepoint is None else RationalVector(basepoint)
    if len(b) != W.dim:
        raise InvalidInput("basepoint has dimension %d, arrangement %d" % (len(b), W.dim))
    for m in W.merged.values():
        if m.level(b).denominator == 1:
            raise OnWall("basepoint %s lies on %s" % (b, m.hyperplane(int(m.level(b)))))
    rng = random.Random(seed)
    walls, signs, comps = [], [], []
    for normals in W.components():
        cand = []
        for n in normals:
            m = W.merged[n]
            k = m.level(b).__floor__()
            cand.append((m.hyperplane(k), 1))
            cand.append((m.hyperplane(k + 1), -1))
        basis = _independent([list(n) for n in normals])
        r = len(basis)
        found = []
        rays = 0
        while len(found) < r + 1:
            rays += 1
            if rays > max_rays:
                raise InvalidInput("could not certify an alcove; is the arrangement an affine reflection arrangement?")
            u = _escape_direction(found, basis, rng)
            if u is None:
                continue
            hit = _first_hit(b, u, cand)
            if hit is not None and hit not in found:
                found.append(hit)
        verts = _simplex_vertices(b, found, basis)
        if verts is None:
            raise InvalidInput("alcove walls do not bound a simplex")
        for v in verts:
            for h, sg in cand:
                if sg * h.value(v) < 0:
                    raise InvalidInput("alcove certification failed at vertex %s against %s" % (v, h))
            if check_window and not W.in_ball(v):
                raise WindowExhausted("alcove vertex %s lies outside the window radius %s" % (v, W.radius))
        for h, sg in found:
            walls.append(h)
            signs.append(sg)
        comps.append(tuple(verts))
    order = sorted(range(len(walls)), key=lambda i: walls[i])
    walls = tuple(walls[i] for i in order)
    signs = tuple(signs[i] for i in order)
    verts = comps[0] if len(comps) == 1 else ()
    return Alcove(walls, signs, verts, b, tuple(comps))


def _escape_direction(found, basis, rng):
    # u in span(basis) moving strictly away from every wall found so far
    if not found:
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in basis]
        if not any(coeffs):
            return None
    else:
        rows = [[sg * h.normal.dot(RationalVector(e)) for e in basis] for h, sg in found]
        rhs = [Fraction(rng.randint(1, 20)) for _ in found]
        coeffs = solve(rows, rhs)
        if coeffs is None:
            return None
        null = nullspace(rows, len(basis)) if len(found) < len(basis) else []
        for v in null:
            c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
            coeffs = [a + c * x for a, x in zip(coeffs, v)]
    u = RationalVector.zero(len(basis[0]))
    for c, e in zip(coeffs, basis):
        u = u + RationalVector(e) * c
    return u


def _first_hit(b, u, cand):
    best, best_t, tie = None, None, False
    for h, sg in cand:
        nu = h.normal.dot(u)
        if nu == 0:
            continue
        t = -h.value(b) / nu
        if t <= 0:
            continue
        if best_t is None or t < best_t:
            best, best_t, tie = (h, sg), t, False
        elif t == best_t:
            tie = True
    return None if tie else best


def _simplex_vertices(b, walls, basis):
    verts = []
    for skip in range(len(walls)):
        rows, rhs = [], []
        for i, (h, _) in enumerate(walls):
            if i == skip:
                continue
            rows.append([h.normal.dot(RationalVector(e)) for e in basis])
            rhs.append(-h.value(b))
        if rank(rows) != len(basis):
            return None
        t = solve(rows, rhs)
        x = b
        for c, e in zip(t, basis):
            x = x + RationalVector(e) * c
        verts.append(x)
    return verts


# Dynkin diagrams ----------------------------------------------------------


@dataclass
class DynkinDiagram:
    """Coxeter graph of an alcove with length data and circles.

    ``links[a][b]`` is the number of edges; arrows are derived from
    ``lengths2`` and point to the shorter root.
    """

    labels: tuple
    links: tuple
    lengths2: tuple
    circles: frozenset = frozenset()
    walls: tuple = ()
    symbol: str = None

    def __len__(self):
        return len(self.labels)

    def edges(self):
        n = len(self.labels)
        return [(a, b, self.links[a][b]) for a in range(n) for b in range(a + 1, n) if self.links[a][b]]

    def arrows(self):
        """(long, short) vertex pairs for every multiple link with unequal lengths."""
        out = []
        for a, b, m in self.edges():
            if m >= 2 and self.lengths2[a] != self.lengths2[b]:
                out.append((a, b) if self.lengths2[a] > self.lengths2[b] else (b, a))
        return out

    def dual(self):
        lengths = tuple(4 / L for L in self.lengths2)
        return DynkinDiagram(self.labels, self.links, lengths, self.circles, self.walls)

    def reduced_part(self):
        return DynkinDiagram(self.labels, self.links, self.lengths2, frozenset(), self.walls)

    def coreduced_part(self):
        lengths = tuple(L * 4 if i in self.circles else L for i, L in enumerate(self.lengths2))
        return DynkinDiagram(self.labels, self.links, lengths, frozenset(), self.walls)

    def as_dict(self):
        return {
            "symbol": self.symbol,
            "vertices": [
                {
                    "index": i,
                    "label": str(lab),
                    "wall": str(self.walls[i]) if self.walls else None,
                    "length2": str(self.lengths2[i]),
                    "circle": i in self.circles,
                }
                for i, lab in enumerate(self.labels)
            ],
            "links": [{"a": a, "b": b, "multiplicity": m} for a, b, m in self.edges()],
            "arrows": [{"from": a, "to": b} for a, b in self.arrows()],
        }

    def to_dot(self):
        name = self.symbol or "diagram"
        lines = ['digraph "%s" {' % name.replace('"', "'")]
        for i, lab in enumerate(self.labels):
            attrs = ['label="%s\\n|v|^2=%s"' % (lab, self.lengths2[i])]
            if i in self.circles:
                attrs.append("peripheries=2")
            lines.append("  v%d [%s];" % (i, ", ".join(attrs)))
        arrows = set(self.arrows())
        for a, b, m in self.edges():
            if (a, b) in arrows:
                lines.append("  v%d -> v%d [multiplicity=%d];" % (a, b, m))
            elif (b, a) in arrows:
                lines.append("  v%d -> v%d [multiplicity=%d];" % (b, a, m))
            else:
                lines.append("  v%d -> v%d [multiplicity=%d, dir=none];" % (a, b, m))
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self):
        out = ["symbol: %s" % (self.symbol or "?")]
        for i, lab in enumerate(self.labels):
            ring = " (circled)" if i in self.circles else ""
            wall = "  wall %s" % self.walls[i] if self.walls else ""
            out.append("  v%d %s  |v|^2=%s%s%s" % (i, lab, self.lengths2[i], ring, wall))
        arrows = set(self.arrows())
        sym = {1: "-", 2: "=", 3: "≡"}
        for a, b, m in self.edges():
            if (a, b) in arrows:
                out.append("  v%d %s> v%d" % (a, sym[m], b))
            elif (b, a) in arrows:
                out.append("  v%d <%s v%d" % (a, sym[m], b))
            else:
                out.append("  v%d %s v%d" % (a, sym[m], b))
        return "\n".join(out) + "\n"


def canonical_lengths(W):
    """label -> 1/d_H^2 with d_H the spacing of the hyperplane's parallel class."""
    return {f.label: 1 / W.merged[f.normal].spacing2() for f in W.families}


def _check_invariant(W, values, what):
    for f, h, img in W.reflected_families():
        same = W._by_normal.get(img.normal, ())
        m = W.merged.get(img.normal)
        period = lcm(*[int(g.spacing / m.spacing) for g in same]) if m else 1
        want = values[f.label]
        for k in range(period):
            off = img.offset(k)
            g = next((x for x in same if x.contains_value(off)), None)
            if g is None or values[g.label] != want:
                raise InvarianceError(
                    "%s is not W-invariant: reflection in %s maps family %s onto %s in family %s"
                    % (what, h, f.label, img.hyperplane(k), g.label if g else None)
                )


_RATIOS = {1: {Fraction(1)}, 2: {Fraction(2), Fraction(1, 2)}, 3: {Fraction(3), Fraction(1, 3)}}


def _check_ratios(D):
    for a, b, m in D.edges():
        r = D.lengths2[a] / D.lengths2[b]
        if r not in _RATIOS[m]:
            raise PreconditionError(
                "length^2 ratio %s between vertices %d and %d is impossible for a %d-fold link" % (r, a, b, m)
            )


def circle_rule_ok(D, v):
    n = len(D)
    neigh = [b for b in range(n) if b != v and D.links[v][b]]
    if not neigh:
        return False
    return all(D.links[v][b] == 2 and D.lengths2[b] > D.lengths2[v] for b in neigh)


def _check_circles(D):
    for v in sorted(D.circles):
        if not circle_rule_ok(D, v):
            raise CircleRuleError(
                "vertex %d (%s) cannot carry a circle: it must be only doubly linked with arrows pointing to it"
                % (v, D.labels[v])
            )


def dynkin(W, length2=None, circles=None, alcove=None, classify_symbol=True):
    """Dynkin diagram of the alcove walls with the given per-family data."""
    if W.rank < 2:
        raise Unsupported("rank one arrangements are not classified")
    if length2 is None:
        length2 = canonical_lengths(W)
    length2 = {k: to_fraction(v) for k, v in length2.items()}
    if circles is None:
        circles = {f.label for f in W.families if f.reducible}
    circles = set(circles)
    for f in W.families:
        if f.label not in length2:
            raise InvalidInput("no length given for family %s" % (f.label,))
        if length2[f.label] <= 0:
            raise InvalidInput("lengths must be positive")
    _check_invariant(W, length2, "length function")
    _check_invariant(W, {f.label: f.label in circles for f in W.families}, "circle set")
    A = alcove if alcove is not None else find_alcove(W)
    labels, lengths, circ = [], [], set()
    for i, h in enumerate(A.walls):
        f = W.family_of(h)
        labels.append(f.label)
        lengths.append(length2[f.label])
        if f.label in circles:
            circ.add(i)
    n = len(A.walls)
    links = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            link = angle_class(A.walls[a], A.walls[b]).link
            if link is None:
                raise InvalidInput("walls %s and %s meet at a non-crystallographic angle" % (A.walls[a], A.walls[b]))
            links[a][b] = links[b][a] = link
    D = DynkinDiagram(tuple(labels), tuple(tuple(r) for r in links), tuple(lengths), frozenset(circ), A.walls)
    _check_ratios(D)
    _check_circles(D)
    if classify_symbol:
        D.symbol = match_symbol(D)
    return D


def _nonreduced_lengths(W, length2, circles):
    # canonical lengths on a circled family are read as the longer root when the rule needs it
    return {k: (v / 4 if k in circles else v) for k, v in length2.items()}


def classify(W, length2=None, circles=None):
    """dynkin() with canonical lengths; for circled families whose canonical
    length violates the circle rule, the canonical root is taken as 2v."""
    try:
        return dynkin(W, length2, circles)
    except CircleRuleError:
        if length2 is not None:
            raise
        circ = set(circles) if circles is not None else {f.label for f in W.families if f.reducible}
        return dynkin(W, _nonreduced_lengths(W, canonical_lengths(W), circ), circ)


def system_diagram(R, radius=None):
    """Dynkin diagram of an AffineRootSystem built from families.

    Each family gets the squared length of its shortest root and a circle
    when the double of that root is present as well.
    """
    if R.root_families is None:
        raise InvalidInput("the root system carries no family data")
    length2, circles = {}, set()
    for rf in R.root_families:
        vecs = set(rf.vectors) | {-v for v in rf.vectors}
        short = min(vecs, key=lambda v: v.norm2())
        length2[rf.family.label] = short.norm2()
        if short * 2 in vecs:
            circles.add(rf.family.label)
    W = ArrangementWindow([rf.family for rf in R.root_families], R.center, radius or R.radius)
    return dynkin(W, length2, circles)


def vertex_orbits(D):
    """Vertex classes joined by paths of single links."""
    n = len(D)
    seen, out = set(), []
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in range(n):
                if b not in seen and D.links[a][b] == 1:
                    seen.add(b)
                    stack.append(b)
        out.append(sorted(comp))
    return sorted(out)


def wall_conjugacy_classes(A):
    """Wall classes under W computed geometrically: for each pair of walls,
    run through the dihedral group they generate and record which walls map
    onto which.  Simple reflections are conjugate iff linked through rank-2
    parabolics, so this gives the full classes."""
    n = len(A.walls)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    refl = [AffineIsometry.reflection(h) for h in A.walls]
    dim = len(A.interior)
    for a in range(n):
        for b in range(a + 1, n):
            elems = {AffineIsometry.identity(dim)}
            frontier = list(elems)
            while frontier and len(elems) <= 24:
                nxt = []
                for g in frontier:
                    for s in (refl[a], refl[b]):
                        h = g.compose(s)
                        if h not in elems:
                            elems.add(h)
                            nxt.append(h)
                frontier = nxt
            for g in elems:
                if g.image_hyperplane(A.walls[a]) == A.walls[b]:
                    parent[find(a)] = find(b)
    classes = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return sorted(classes.values())


def fold_hyperplane(W, A, h, max_steps=10000):
    """Index of the base wall W-conjugate to the arrangement hyperplane h,
    found by folding a generic point of h into the closed base alcove."""
    if not W.contains(h):
        raise InvalidInput("%s is not a hyperplane of the arrangement" % (h,))
    p = _generic_on(W, h)
    cur = h
    for _ in range(max_steps):
        i = A.violated(p)
        if i is None:
            break
        s = AffineIsometry.reflection(A.walls[i])
        p = s.apply(p)
        cur = s.image_hyperplane(cur)
    else:
        raise InvalidInput("folding did not terminate")
    for i, w in enumerate(A.walls):
        if w == cur:
            return i
    raise InvalidInput("folded hyperplane %s is not a wall of the base alcove" % (cur,))


def _generic_on(W, h):
    n2 = h.normal.norm2()
    foot = W.center - h.normal * (h.value(W.center) / n2)
    dirs = []
    for e in W.basis:
        d = e - h.normal * (h.normal.dot(e) / n2)
        if not d.is_zero() and rank([list(x) for x in dirs] + [list(d)]) > len(dirs):
            dirs.append(d)
    q = 3
    while True:
        delta = Fraction(1, q)
        p = foot
        for i, d in enumerate(dirs):
            p = p + d * delta ** (i + 1)
        if len(W.walls_through(p)) == 1:
            return p
        q += 2


def special_points(W):
    """Window points lying on one hyperplane of every parallel class."""
    if W.rank < 2:
        raise InvalidInput("rank one arrangements are not supported")
    normals = sorted(W.merged)
    pick = []
    for n in normals:
        if rank([list(x) for x in pick] + [list(n)]) > len(pick):
            pick.append(n)
    fams = [W.merged[n] for n in pick]
    ranges = [f.indices_in_ball(W.center, W.radius) for f in fams]
    basis = [list(e) for e in W.basis]
    pts = set()
    for ks in product(*ranges):
        rows = [[f.normal.dot(RationalVector(e)) for e in basis] for f in fams]
        rhs = [f.offset(k) - f.normal.dot(W.center) for f, k in zip(fams, ks)]
        t = solve(rows, rhs)
        x = W.center
        for c, e in zip(t, basis):
            x = x + RationalVector(e) * c
        if not W.in_ball(x):
            continue
        if all(m.level(x).denominator == 1 for m in W.merged.values()):
            pts.add(x)
    if not pts:
        raise WindowExhausted("no special point inside the window")
    return sorted(pts)


@dataclass
class TransitivityReport:
    ok: bool
    alcoves: int
    witness: str = ""


def alcove_transitivity_check(W, A=None, samples=200, seed=0):
    """BFS over alcoves with barycenter in the window, comparing isometries
    whenever an alcove is reached twice; then probe random window points."""
    if W.rank < 2:
        raise InvalidInput("rank one arrangements are not supported")
    if len(W.components()) != 1:
        raise InvalidInput("arrangement is reducible")
    A = A if A is not None else find_alcove(W)
    c0 = A.barycenter
    refl = [AffineIsometry.reflection(h) for h in A.walls]
    ident = AffineIsometry.identity(W.dim)
    if not W.in_ball(c0):
        raise WindowExhausted("base alcove barycenter outside the window")
    seen = {W.alcove_key(c0): ident}
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in refl:
            h = g.compose(s)
            c = h.apply(c0)
            if not W.in_ball(c):
                continue
            key = W.alcove_key(c)
            old = seen.get(key)
            if old is None:
                seen[key] = h
                queue.append(h)
            elif old != h:
                return TransitivityReport(False, len(seen), "alcove %s reached by two different isometries" % (key,))
    if len(seen) < 2:
        raise WindowExhausted("window holds fewer than two alcoves")
    rng = random.Random(seed)
    for _ in range(samples):
        x = W.center
        for e in W.basis:
            x = x + e * Fraction(rng.randint(-1000, 1000), 1000) * W.radius / _upper_sqrt(e.norm2() * W.rank)
        if not W.in_ball(x) or W.on_some_wall(x):
            continue
        key = W.alcove_key(x)
        if key in seen:
            continue
        other = find_alcove(W, x, check_window=False)
        if W.in_ball(other.barycenter):
            return TransitivityReport(False, len(seen), "alcove around %s not reached" % (x,))
    return TransitivityReport(True, len(seen))


# Templates ---------------------------------------------------------------

_SYM_RE = re.compile(r"^([A-G])~(\d+)(\^v|')?$")


@dataclass(frozen=True)
class SymbolInfo:
    text: str
    letter: str
    n: int
    variant: str = ""
    circles: str = ""  # which template vertices carry circles
    pair: tuple = ()


_PAIR_RULES = {
    ("B", "", "B", "^v"): ("B", "", "short"),
    ("C", "^v", "C", "'"): ("C", "^v", "left"),
    ("C", "'", "C", ""): ("C", "'", "right"),
    ("C", "^v", "C", ""): ("C", "^v", "both"),
    ("C", "", "C", "^v"): ("C", "", "middle"),
}


def parse_symbol(text):
    s = text.strip().replace("ᵛ", "^v").replace("̃", "~").replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        parts = s[1:-1].split(",")
        if len(parts) != 2:
            raise InvalidInput("bad diagram symbol %r" % text)
        a, b = (_parse_single(p) for p in parts)
        rule = _PAIR_RULES.get((a.letter, a.variant, b.letter, b.variant))
        if rule is None or a.n != b.n or (rule[2] == "middle" and a.n != 2):
            raise InvalidInput("%r is not a nonreduced type" % text)
        return SymbolInfo(s, rule[0], a.n, rule[1], rule[2], (a.text, b.text))
    return _parse_single(s)


def _parse_single(s):
    m = _SYM_RE.match(s)
    if not m:
        raise InvalidInput("bad diagram symbol %r" % s)
    letter, n, var = m.group(1), int(m.group(2)), m.group(3) or ""
    ok = {
        "A": n >= 2 and not var,
        "B": n >= 3 and var in ("", "^v"),
        "C": n >= 2,
        "D": n >= 4 and not var,
        "E": n in (6, 7, 8) and not var,
        "F": n == 4 and var in ("", "^v"),
        "G": n == 2 and var in ("", "^v"),
    }[letter]
    if not ok:
        if letter == "A" and n == 1:
            raise Unsupported("A~1 has rank one and is not supported")
        raise InvalidInput("%r is not in the tables" % s)
    return SymbolInfo(s, letter, n, var)


def _chain(k):
    links = [[0] * k for _ in range(k)]
    for a in range(k - 1):
        links[a][a + 1] = links[a + 1][a] = 1
    return links


def template(symbol):
    """Template diagram for a table symbol (vertex order is the template's own)."""
    info = parse_symbol(symbol) if isinstance(symbol, str) else symbol
    L, n, var = info.letter, info.n, info.variant
    N = n + 1
    if L == "A":
        links = _chain(N)
        links[0][n] = links[n][0] = 1
        lengths = [1] * N
    elif L == "B":
        links = [[0] * N for _ in range(N)]

        def link(a, b, m=1):
            links[a][b] = links[b][a] = m

        link(0, 2)
        link(1, 2)
        for a in range(2, n - 1):
            link(a, a + 1)
        link(n - 1, n, 2)
        lengths = [2] * n + [1] if var == "" else [1] * n + [2]
    elif L == "C":
        links = _chain(N)
        links[0][1] = links[1][0] = 2
        links[n - 1][n] = links[n][n - 1] = 2
        ends = {"": (4, 4), "^v": (1, 1), "'": (4, 1)}[var]
        lengths = [ends[0]] + [2] * (n - 1) + [ends[1]]
    elif L == "D":
        links = [[0] * N for _ in range(N)]

        def link(a, b):
            links[a][b] = links[b][a] = 1

        link(0, 2)
        link(1, 2)
        for a in range(2, n - 2):
            link(a, a + 1)
        link(n - 2, n - 1)
        link(n - 2, n)
        lengths = [1] * N
    elif L == "E":
        links = [[0] * N for _ in range(N)]

        def link(a, b):
            links[a][b] = links[b][a] = 1

        if n == 6:
            for a, b in ((0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)):
                link(a, b)
        elif n == 7:
            for a in range(6):
                link(a, a + 1)
            link(3, 7)
        else:
            for a in range(7):
                link(a, a + 1)
            link(5, 8)
        lengths = [1] * N
    elif L == "F":
        links = _chain(5)
        links[2][3] = links[3][2] = 2
        lengths = [2, 2, 2, 1, 1] if var == "" else [1, 1, 1, 2, 2]
    else:
        links = _chain(3)
        links[1][2] = links[2][1] = 3
        lengths = [3, 3, 1] if var == "" else [1, 1, 3]
    circles = {
        "": set(),
        "short": {n},
        "left": {0},
        "right": {n},
        "both": {0, n},
        "middle": {1},
    }[info.circles]
    labels = tuple("t%d" % i for i in range(N))
    return DynkinDiagram(
        labels,
        tuple(tuple(r) for r in links),
        tuple(Fraction(x) for x in lengths),
        frozenset(circles),
        (),
        info.text,
    )


def table_symbols(rank):
    """All symbols of the given rank in the classification tables."""
    n = rank
    out = []
    if n >= 2:
        out.append("A~%d" % n)
    if n >= 3:
        out += ["B~%d" % n, "B~%d^v" % n]
    if n >= 2:
        out += ["C~%d" % n, "C~%d^v" % n, "C~%d'" % n]
    if n >= 4:
        out.append("D~%d" % n)
    if n in (6, 7, 8):
        out.append("E~%d" % n)
    if n == 4:
        out += ["F~4", "F~4^v"]
    if n == 2:
        out += ["G~2", "G~2^v"]
    if n >= 3:
        out.append("(B~%d,B~%d^v)" % (n, n))
    if n >= 2:
        out += ["(C~%d^v,C~%d')" % (n, n), "(C~%d',C~%d)" % (n, n), "(C~%d^v,C~%d)" % (n, n)]
    if n == 2:
        out.append("(C~2,C~2^v)")
    return out


def templates_for_rank(rank):
    return [template(s) for s in table_symbols(rank)]


def _direction(D, a, b):
    la, lb = D.lengths2[a], D.lengths2[b]
    return (la > lb) - (la < lb)


def isomorphic(D1, D2):
    """Decorated-graph isomorphism: links, arrow directions and circles."""
    n = len(D1)
    if n != len(D2):
        return None
    if len(D1.circles) != len(D2.circles):
        return None

    def sig(D, v):
        return (sorted(D.links[v][b] for b in range(len(D)) if D.links[v][b]), v in D.circles)

    s1 = [sig(D1, v) for v in range(n)]
    s2 = [sig(D2, v) for v in range(n)]
    if sorted(s1) != sorted(s2):
        return None
    order = sorted(range(n), key=lambda v: -sum(1 for b in range(n) if D1.links[v][b]))
    perm = {}
    used = set()

    def ok(v, w):
        if s1[v] != s2[w]:
            return False
        for u, x in perm.items():
            if D1.links[v][u] != D2.links[w][x]:
                return False
            if D1.links[v][u] >= 2 and _direction(D1, v, u) != _direction(D2, w, x):
                return False
        return True

    def rec(i):
        if i == n:
            return True
        v = order[i]
        for w in range(n):
            if w not in used and ok(v, w):
                perm[v] = w
                used.add(w)
                if rec(i + 1):
                    return True
                del perm[v]
                used.discard(w)
        return False

    return dict(perm) if rec(0) else None


def match_symbol(D):
    hits = [T.symbol for T in templates_for_rank(len(D) - 1) if isomorphic(D, T) is not None]
    if len(hits) != 1:
        raise UnclassifiedDiagram(
            "diagram matches %s" % (", ".join(hits) if hits else "no table entry")
        )
    return hits[0]


# Model arrangements --------------------------------------------------------


@dataclass
class ModelArrangement:
    symbol: str
    families: list
    length2: dict
    circles: set = field(default_factory=set)

    def window(self, radius=None, center=None):
        return ArrangementWindow(self.families, center, radius)

    def diagram(self, radius=None):
        return dynkin(self.window(radius), self.length2, self.circles)


def _label(v):
    return "(" + ",".join(str(c) for c in v) + ")"


def model_arrangement(symbol):
    """Arrangement, length function and circles realizing a table symbol.

    Families are the level sets {<a,x> = k} of the positive roots of the
    finite Weyl type.  For C types the families of the long roots 2e_a are
    split into integer levels (even) and half-integer levels (odd), which
    are separate W-orbits.
    """
    info = parse_symbol(symbol)
    L, n, var = info.letter, info.n, info.variant
    weyl = {"A": "A%d", "B": "B%d", "C": "C%d", "D": "D%d", "E": "E%d", "F": "F%d", "G": "G%d"}[L] % n
    delta = realization(weyl)
    families, length2, kinds = [], {}, {}
    for a in delta.positive:
        a2 = a.norm2()
        if L == "C" and a2 == 4:
            e = a / 2
            for parity, phase in (("even", 0), ("odd", Fraction(1, 2))):
                lab = "%s%s" % (parity, _label(e))
                families.append(ParallelFamily(lab, e, 1, phase))
                length2[lab] = a2
                kinds[lab] = parity
        else:
            lab = _label(a)
            families.append(ParallelFamily(lab, a, 1, 0))
            length2[lab] = a2
            kinds[lab] = "long" if a2 == max(v.norm2() for v in delta.positive) else "short"
    if var == "^v":
        length2 = {k: 4 / v for k, v in length2.items()}
    elif var == "'":
        length2 = {k: (Fraction(1) if kinds[k] == "even" else v) for k, v in length2.items()}
    circles = set()
    if info.circles == "short":
        circles = {k for k in length2 if kinds[k] == "short"}
    elif info.circles == "left":
        circles = {k for k in length2 if kinds[k] == "odd"}
    elif info.circles == "right":
        circles = {k for k in length2 if kinds[k] == "even"}
    elif info.circles == "both":
        circles = {k for k in length2 if kinds[k] in ("odd", "even")}
    elif info.circles == "middle":
        circles = {k for k in length2 if kinds[k] not in ("odd", "even")}
    return ModelArrangement(info.text, families, length2, circles)
