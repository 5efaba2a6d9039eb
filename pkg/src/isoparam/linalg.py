"""Exact linear algebra over the rationals.

Matrices are lists of rows, vectors are lists; every entry is a
``fractions.Fraction``.  Nothing here ever rounds.
"""

from fractions import Fraction

__all__ = [
    "to_fraction",
    "frac_vector",
    "frac_matrix",
    "dot",
    "vadd",
    "vsub",
    "vscale",
    "is_zero",
    "matmul",
    "matvec",
    "transpose",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "inverse",
    "in_span",
    "lcm_denominators",
]


def to_fraction(x):
    """Coerce ints, Fractions and ``"p/q"`` strings to Fraction.

    Floats are refused on purpose: they would smuggle rounding in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals: %r" % x)
    return Fraction(x)


def frac_vector(xs):
    return [to_fraction(x) for x in xs]


def frac_matrix(rows):
    return [frac_vector(r) for r in rows]


def dot(u, v):
    s = Fraction(0)
    for a, b in zip(u, v):
        if a and b:
            s += a * b
    return s


def vadd(u, v):
    return [a + b for a, b in zip(u, v)]


def vsub(u, v):
    return [a - b for a, b in zip(u, v)]


def vscale(c, u):
    return [c * a for a in u]


def is_zero(u):
    return all(a == 0 for a in u)


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def matvec(a, v):
    return [dot(row, v) for row in a]


def rref(rows):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = None
        for i in range(r, n_rows):
            if m[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        if inv != 1:
            m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        for i in range(n_rows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row = m[i]
                    m[i] = [x - f * y if y else x for x, y in zip(row, pivot_row)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows):
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows, n_cols=None):
    """Basis of {x : rows·x = 0}, one basis vector per free column."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols needed for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    n_cols = len(rows[0])
    m, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][f]
        basis.append(v)
    return basis


def solve(a, b):
    """One solution of a·x = b, or None when inconsistent."""
    if not a:
        return None
    n_cols = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    m, pivots = rref(aug)
    if n_cols in pivots:
        return None
    x = [Fraction(0)] * n_cols
    for i, pc in enumerate(pivots):
        x[pc] = m[i][n_cols]
    return x


def inverse(a):
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


def in_span(vectors, v):
    if not vectors:
        return is_zero(v)
    return solve(transpose(vectors), list(v)) is not None


def lcm_denominators(xs):
    from math import lcm

    d = 1
    for x in xs:
        d = lcm(d, Fraction(x).denominator)
    return d
