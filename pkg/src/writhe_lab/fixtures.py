"""Built-in geometric fixtures: reconnectable pairs, framed squares, the
shrinking-common-edge family, the trefoil pathway curve and the traced
reconnection frames."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .curves import (
    CurveSystem,
    FluxTube,
    PolygonalCurve,
    Ribbon,
    make_random_closed_polygon,
    parallel_transport_frame,
    translate,
)
from ._kernels import min_distance, self_min_distance
from .errors import WritheLabError
from .reconnection import ReconnectionSite, ThetaCurve, \
    align_for_reconnection, cut


def find_edge(curve, p, q):
    """Index of the edge running exactly from point ``p`` to point ``q``."""
    v = curve.vertices
    nxt = np.roll(v, -1, axis=0)
    hit = np.flatnonzero(np.all(v == np.asarray(p), axis=1) &
                         np.all(nxt == np.asarray(q), axis=1))
    if len(hit) != 1:
        raise KeyError(f"no unique edge {tuple(p)} -> {tuple(q)}")
    return int(hit[0])


# ---------------------------------------------------------------------------
# Reconnectable pairs by cutting


@dataclass(frozen=True)
class CutPair:
    """Disjoint pair ``a``, ``b`` ready for reconnection at ``site``.

    ``theta`` is the configuration the pair was cut from, before ``b`` was
    pushed off by ``offset``.
    """

    a: PolygonalCurve
    b: PolygonalCurve
    site: ReconnectionSite
    theta: ThetaCurve
    offset: np.ndarray


def _self_clearance(curve):
    s = np.ascontiguousarray(curve.vertices)
    e = np.ascontiguousarray(np.roll(s, -1, axis=0))
    return self_min_distance(s, e, True)[0]


def _junction_clearance(a, b):
    """Distance between the two halves of a cut, ignoring edge pairs that
    both touch a junction vertex."""
    sa = np.ascontiguousarray(a.vertices)
    ea = np.ascontiguousarray(np.roll(sa, -1, axis=0))
    sb = np.ascontiguousarray(b.vertices)
    eb = np.ascontiguousarray(np.roll(sb, -1, axis=0))
    far_a = slice(1, a.n - 2)
    far_b = slice(1, b.n - 2)
    near_a = [0, a.n - 2, a.n - 1]
    d1 = min_distance(sa[far_a], ea[far_a], sb, eb)[0]
    d2 = min_distance(sa[near_a], ea[near_a], sb[far_b], eb[far_b])[0]
    return min(d1, d2)


def cut_pair(n, m, seed, push=1e-3, flat_junction=True, max_tries=50):
    """Reconnectable pair with ``n`` and ``m`` vertices built by cutting a
    random closed polygon along a chord.

    With ``flat_junction`` the four edges next to the chord are laid in one
    plane through the chord, ``a``'s on one side and ``b``'s on the other,
    and ``b`` is pushed off within that plane by ``push`` diameters, or by
    a quarter of the clearance between the halves if that is smaller.
    Otherwise the polygon is left as drawn and ``b`` is pushed off in a
    random direction.
    """
    if n < 4 or m < 4:
        raise ValueError("each side needs at least 4 vertices")
    total = n + m - 2
    i, j = 1, n
    for attempt in range(max_tries):
        rng = np.random.default_rng([seed, attempt])
        c = make_random_closed_polygon(total, [seed, attempt, 1])
        v = np.array(c.vertices)
        u, w = v[i], v[j]
        chord = (w - u) / np.linalg.norm(w - u)
        side = rng.normal(size=3)
        side -= (side @ chord) * chord
        side /= np.linalg.norm(side)
        if flat_junction:
            def place(k, anchor, sign):
                rel = v[k] - anchor
                along = rel @ chord
                off = max(np.linalg.norm(rel - along * chord), 0.3)
                v[k] = anchor + along * chord + sign * off * side
            place(i + 1, u, 1.0)
            place(j - 1, w, 1.0)
            place(i - 1, u, -1.0)
            place((j + 1) % total, w, -1.0)
            direction = -side
        else:
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
        try:
            th = cut(PolygonalCurve(v), i, j)
            if min(_self_clearance(th.a), _self_clearance(th.b)) < \
                    1e-6 * th.split().diameter():
                continue
            step = min(push * th.split().diameter(),
                       0.25 * _junction_clearance(th.a, th.b))
            shift = step * direction
            b = translate(th.b, shift)
            CurveSystem((th.a, b))
            align_for_reconnection(th.a, b, th.site)
        except WritheLabError:
            continue
        return CutPair(th.a, b, th.site, th, shift)
    raise RuntimeError("no reconnectable pair found")


def random_pair(seed, n=None, m=None, spread=0.6):
    """Two random polygons with overlapping hulls, often linked."""
    rng = np.random.default_rng([seed, 7])
    n = n or int(rng.integers(8, 40))
    m = m or int(rng.integers(8, 40))
    a = make_random_closed_polygon(n, [seed, 1])
    b = make_random_closed_polygon(m, [seed, 2])
    for attempt in range(100):
        shift = a.vertices.mean(axis=0) - b.vertices.mean(axis=0) + \
            spread * rng.normal(size=3)
        bt = translate(b, shift)
        try:
            return CurveSystem((a, bt))
        except WritheLabError:
            continue
    raise RuntimeError("no disjoint placement found")


# ---------------------------------------------------------------------------
# Framed squares


def coplanar_squares(k_turns=0, flux=1.0):
    """Two unit squares in the xy-plane, half a unit apart, with
    anti-parallel facing edges.

    The framing is the constant normal ``+z``. ``k_turns`` full turns of
    twist sit on the facing edge of the first square, which reconnection
    deletes.

    Returns
    -------
    a, b : FluxTube
    site : ReconnectionSite
    """
    sa = PolygonalCurve([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0],
                         [0.0, 1.0, 0.0]])
    sb = PolygonalCurve([[1.5, 0.0, 0.0], [2.5, 0.0, 0.0], [2.5, 1.0, 0.0],
                         [1.5, 1.0, 0.0]])
    up = np.tile([0.0, 0.0, 1.0], (4, 1))
    turns = np.zeros(4, dtype=np.int64)
    turns[1] = k_turns
    ra = Ribbon(sa, up, turns)
    rb = parallel_transport_frame(sb, np.array([0.0, 0.0, 1.0]))
    return FluxTube(ra, flux), FluxTube(rb, flux), ReconnectionSite(1, 3)


# ---------------------------------------------------------------------------
# Shrinking common edge


def _graded_angles(delta, n_uniform):
    """Angles on ``[delta, 2 pi - delta]`` refined geometrically towards both
    ends, plus the site endpoints."""
    h = 2.0 * math.pi / n_uniform
    near = [delta]
    s = 2.0 * delta
    while s < h:
        near.append(s)
        s *= 2.0
    far = np.arange(1, n_uniform) * h
    far = far[(far > near[-1] + 0.5 * h) & (far < 2 * math.pi - near[-1] -
                                                0.5 * h)]
    near = np.array(near)
    return np.concatenate([near, far, 2.0 * math.pi - near[::-1]])


def torsion_family_member(delta, c=0.2, e=0.3, radius=1.0, n_uniform=64):
    """Theta configuration whose common edge spans the parameter interval
    ``[-delta, delta]``.

    ``a`` is the space curve
    ``(R sin s, R (1 - cos s), c sin^3 s + e (1 - cos s)^2)`` and ``b`` is
    its image under the half-turn about the axis through the midpoint of
    the site edge that is perpendicular to both the edge and the y-axis.
    That rotation reverses the site edge and puts ``b`` on the far side of
    it. Both curves are sampled more finely towards the common edge.

    Returns
    -------
    ThetaCurve
    """
    s = _graded_angles(delta, n_uniform)

    def point(t):
        return [radius * math.sin(t), radius * (1.0 - math.cos(t)),
                c * math.sin(t) ** 3 + e * (1.0 - math.cos(t)) ** 2]

    a = np.column_stack([radius * np.sin(s), radius * (1.0 - np.cos(s)),
                         c * np.sin(s) ** 3 + e * (1.0 - np.cos(s)) ** 2])
    # Vertex 0 is A(delta) and the last vertex A(-delta): the last edge is
    # the site edge. Exact values keep the two copies bit-identical.
    a[0] = point(delta)
    a[-1] = point(-delta)
    mid = 0.5 * (a[0] + a[-1])
    d = a[0] - a[-1]
    axis = np.cross(d, [0.0, 1.0, 0.0])
    axis /= np.linalg.norm(axis)
    rel = a - mid
    b = mid + 2.0 * np.outer(rel @ axis, axis) - rel
    b[-1] = a[0]
    b[0] = a[-1]
    ca = PolygonalCurve(a)
    cb = PolygonalCurve(b)
    return ThetaCurve(ca, cb, ReconnectionSite(ca.n - 1, cb.n - 1))


# ---------------------------------------------------------------------------
# Trefoil pathway


@dataclass(frozen=True)
class Gadget:
    """Coordinates of one juxtaposable site: the first strand runs
    ``u -> v`` and the second ``v2 -> u2`` a distance ``gap`` below it."""

    u: tuple
    v: tuple
    u2: tuple
    v2: tuple


def _gadget(y0, gap, h):
    ym = y0 + 2.0
    s1 = [(-1.0, y0, 0.0), (-1.5, ym + 0.5, h), (-0.9, ym + 0.05, 0.0),
          (-0.5, ym, 0.0), (0.5, ym, 0.0)]
    s2 = [(1.0, y0, 0.0), (0.5, ym - gap, 0.0), (-0.5, ym - gap, 0.0),
          (-0.9, ym - gap - 0.05, 0.0), (-0.95, ym + 0.5, -h)]
    g = Gadget(u=s1[3], v=s1[4], u2=s2[2], v2=s2[1])
    return s1, s2, g


def trefoil_pathway_curve(gap=0.2, h=0.5):
    """Closed two-strand braid with three positive crossings (a trefoil).

    Each crossing block carries a site where the two strands run
    anti-parallel, ``gap`` apart, with every edge next to the site in the
    plane ``z = 0``.

    Returns
    -------
    curve : PolygonalCurve
    gadgets : list of Gadget
        Bottom to top.
    """
    blocks = [_gadget(4.0 * k, gap, h) for k in range(3)]
    pts = []
    # Strand path: block0 s1, block1 s2, block2 s1, inner closure,
    # block0 s2, block1 s1, block2 s2, outer closure.
    pts += blocks[0][0] + blocks[1][1] + blocks[2][0]
    pts += [(1.0, 12.0, 0.0), (1.0, 13.0, 0.0), (3.0, 13.0, 0.0),
            (3.0, -1.0, 0.0), (1.0, -1.0, 0.0)]
    pts += blocks[0][1] + blocks[1][0] + blocks[2][1]
    pts += [(-1.0, 12.0, 0.0), (-1.0, 14.0, 0.0), (5.0, 14.0, 0.0),
            (5.0, -2.0, 0.0), (-1.0, -2.0, 0.0)]
    return PolygonalCurve(np.array(pts)), [b[2] for b in blocks]


# ---------------------------------------------------------------------------
# Random ribbons


def random_ribbon(seed, n=None, max_turn=0.8):
    """Ribbon on a random closed polygon; framing from parallel transport
    with a random rotation of at most ``max_turn`` radians at each vertex."""
    rng = np.random.default_rng([seed, 11])
    n = n or int(rng.integers(12, 40))
    c = make_random_closed_polygon(n, [seed, 12])
    T = c.vertex_tangents()
    v0 = np.cross(T[0], rng.normal(size=3))
    v0 /= np.linalg.norm(v0)
    base = parallel_transport_frame(c, v0)
    ang = rng.uniform(-max_turn, max_turn, size=n)
    V = base.framing
    W = np.cross(T, V)
    V = V * np.cos(ang)[:, None] + W * np.sin(ang)[:, None]
    return Ribbon.from_vectors(c, V)


# ---------------------------------------------------------------------------
# Traced frames


def traced_frames():
    """The four traced reconnection frames shipped with the package.

    Returns
    -------
    list of (str, CurveSystem)
    """
    from .io import load_curves

    root = resources.files("writhe_lab") / "data" / "fig2c"
    out = []
    for name in ("t0", "t1", "t2", "t3"):
        text = (root / f"{name}.json").read_text(encoding="utf-8")
        system, _ = load_curves(text)
        out.append((name, system))
    return out
