"""Matplotlib rendering of Dynkin diagrams and planar arrangements.

Only the report path of the CLI uses this module; it selects the Agg
backend so nothing needs a display.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _layout(D):
    """Vertex positions: a path is laid on a line, anything else on a circle."""
    n = len(D)
    deg = [sum(1 for b in range(n) if D.links[a][b]) for a in range(n)]
    edges = D.edges()
    if n > 1 and len(edges) == n - 1 and max(deg) <= 2:
        start = next(a for a in range(n) if deg[a] <= 1)
        order, prev, cur = [start], None, start
        while len(order) < n:
            nxt = next(b for b in range(n) if D.links[cur][b] and b != prev)
            order.append(nxt)
            prev, cur = cur, nxt
        return {v: (float(k), 0.0) for k, v in enumerate(order)}
    if n > 1 and len(edges) == n - 1:
        # tree with a branch vertex: breadth-first layers from the branch point
        root = max(range(n), key=lambda a: deg[a])
        pos, frontier, seen = {root: (0.0, 0.0)}, [root], {root}
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for a in frontier:
                kids = [b for b in range(n) if D.links[a][b] and b not in seen]
                for b in kids:
                    seen.add(b)
                    nxt.append(b)
            for k, b in enumerate(nxt):
                ang = 2 * math.pi * k / max(len(nxt), 1) if depth == 1 else None
                if ang is None:
                    parent = next(a for a in frontier if D.links[a][b])
                    px, py = pos[parent]
                    r = math.hypot(px, py) or 1.0
                    pos[b] = (px + px / r, py + py / r)
                else:
                    pos[b] = (math.cos(ang), math.sin(ang))
            frontier = nxt
        return pos
    return {a: (math.cos(2 * math.pi * a / n), math.sin(2 * math.pi * a / n)) for a in range(n)}


def draw_diagram(ax, D):
    pos = _layout(D)
    arrows = set(D.arrows())
    for a, b, m in D.edges():
        (x0, y0), (x1, y1) = pos[a], pos[b]
        dx, dy = x1 - x0, y1 - y0
        L = math.hypot(dx, dy) or 1.0
        nx, ny = -dy / L, dx / L
        for k in range(m):
            off = (k - (m - 1) / 2) * 0.06
            ax.plot([x0 + off * nx, x1 + off * nx], [y0 + off * ny, y1 + off * ny], color="black", lw=1.2, zorder=1)
        if (a, b) in arrows or (b, a) in arrows:
            src, dst = ((a, b) if (a, b) in arrows else (b, a))
            (sx, sy), (tx, ty) = pos[src], pos[dst]
            mx, my = (sx + tx) / 2, (sy + ty) / 2
            ux, uy = (tx - sx) / L, (ty - sy) / L
            ax.annotate(
                "",
                xy=(mx + 0.12 * ux, my + 0.12 * uy),
                xytext=(mx - 0.12 * ux, my - 0.12 * uy),
                arrowprops=dict(arrowstyle="-|>", color="black", lw=1.0),
                zorder=3,
            )
    for v, (x, y) in pos.items():
        ax.scatter([x], [y], s=120, facecolor="white", edgecolor="black", zorder=4)
        if v in D.circles:
            ax.scatter([x], [y], s=300, facecolor="none", edgecolor="black", zorder=4)
        ax.annotate(
            "v%d\n%s" % (v, D.lengths2[v]),
            (x, y),
            textcoords="offset points",
            xytext=(0, -10),
            ha="center",
            va="top",
            fontsize=7,
        )
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    ax.set_xlim(min(xs) - 0.6, max(xs) + 0.6)
    ax.set_ylim(min(ys) - 0.9, max(ys) + 0.6)
    ax.set_title(D.symbol or "diagram")
    ax.set_aspect("equal")
    ax.axis("off")
    key = "\n".join("v%d  %s" % (v, lab) for v, lab in enumerate(D.labels))
    ax.text(0.0, -0.02, "$|v|^2$ under each vertex\n" + key, transform=ax.transAxes, fontsize=6, va="top", family="monospace")


def _plane_basis(W):
    """Orthonormal float basis of the span of the normals (rank two)."""
    rows = np.array([[float(c) for c in v] for v in W.basis])
    q, _ = np.linalg.qr(rows.T)
    return q[:, :2]


def draw_arrangement(ax, W, A=None):
    """Lines of a rank-two arrangement inside its window, alcove shaded."""
    Q = _plane_basis(W)
    c = np.array([float(x) for x in W.center])
    r = float(W.radius)
    c2 = Q.T @ c
    t = np.linspace(-1.5 * r, 1.5 * r, 2)
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    labels = sorted({f.label for f in W.families})
    for h in W.hyperplanes():
        f = W.family_of(h)
        n = Q.T @ np.array([float(x) for x in h.normal])
        nn = float(n @ n)
        # hyperplane <normal, x> = offset meets the plane in {<n, y> = offset - <normal, c - Q Q^T c>}
        off = float(h.offset) - float(np.array([float(x) for x in h.normal]) @ (c - Q @ c2))
        p0 = n * off / nn
        d = np.array([-n[1], n[0]]) / math.sqrt(nn)
        pts = p0[None, :] + t[:, None] * d[None, :]
        col = colors[labels.index(f.label) % len(colors)]
        ax.plot(pts[:, 0], pts[:, 1], color=col, lw=0.8)
    if A is not None and A.vertices:
        verts = np.array([Q.T @ np.array([float(x) for x in v]) for v in A.vertices])
        ctr = verts.mean(axis=0)
        order = np.argsort(np.arctan2(verts[:, 1] - ctr[1], verts[:, 0] - ctr[0]))
        ax.fill(verts[order, 0], verts[order, 1], color="tab:orange", alpha=0.45, zorder=0)
    ax.set_xlim(c2[0] - r, c2[0] + r)
    ax.set_ylim(c2[1] - r, c2[1] + r)
    ax.set_aspect("equal")
    ax.set_title("arrangement and alcove")


def render_report(path, D, W=None, A=None):
    """Write the diagram, plus the arrangement when it is planar, to ``path``."""
    planar = W is not None and W.rank == 2
    fig, axes = plt.subplots(1, 2 if planar else 1, figsize=(9 if planar else 5, 4.5))
    axes = np.atleast_1d(axes)
    draw_diagram(axes[0], D)
    if planar:
        draw_arrangement(axes[1], W, A)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
