"""Closed polygonal curves, ribbons and flux tubes, plus the standard
generators and rigid motions used throughout the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DegenerateEdgeError,
    DisjointnessError,
    GenerationFailureError,
    InvalidParameterError,
    TransportError,
)

UNIT_TOL = 1e-9
FRAME_UNIT_TOL = 1e-12
FRAME_ORTHO_TOL = 1e-9


def _as_points(vertices):
    arr = np.array(vertices, dtype=np.float64, copy=True)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidParameterError(
            f"vertices must have shape (n, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("vertex coordinates must be finite")
    arr.setflags(write=False)
    return arr


def _unit(v, name="vector"):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidParameterError(f"{name} must be a finite 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise InvalidParameterError(f"{name} must be a unit vector")
    return v


@dataclass(frozen=True, eq=False)
class PolygonalCurve:
    """Oriented polygon; edge ``i`` runs from vertex ``i`` to vertex
    ``i + 1`` (mod ``n`` when closed). The closing vertex is not repeated.

    Open chains (``closed=False``) exist only so that traced figure data can
    be projected and have its crossings counted.
    """

    vertices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        pts = _as_points(self.vertices)
        object.__setattr__(self, "vertices", pts)
        n = pts.shape[0]
        if n < (3 if self.closed else 2):
            raise InvalidParameterError(
                f"a polygon needs at least 3 vertices, got {n}")
        lengths = np.linalg.norm(self._ends() - self._starts(), axis=1)
        if np.any(lengths == 0.0):
            k = int(np.flatnonzero(lengths == 0.0)[0])
            raise DegenerateEdgeError(f"edge {k} has zero length")

    def _starts(self):
        return self.vertices if self.closed else self.vertices[:-1]

    def _ends(self):
        if self.closed:
            return np.roll(self.vertices, -1, axis=0)
        return self.vertices[1:]

    @property
    def n(self):
        return self.vertices.shape[0]

    @property
    def n_edges(self):
        return self.n if self.closed else self.n - 1

    def edges(self):
        """Return ``(starts, ends)`` as contiguous ``(n_edges, 3)`` arrays."""
        return (np.ascontiguousarray(self._starts()),
                np.ascontiguousarray(self._ends()))

    @property
    def edge_vectors(self):
        s, e = self.edges()
        return e - s

    @property
    def edge_lengths(self):
        return np.linalg.norm(self.edge_vectors, axis=1)

    @property
    def length(self):
        return math.fsum(self.edge_lengths)

    def unit_tangents(self):
        d = self.edge_vectors
        return d / np.linalg.norm(d, axis=1)[:, None]

    def vertex_tangents(self):
        """Unit bisectors of the two edge directions meeting at each vertex.

        Raises
        ------
        TransportError
            If two consecutive edges are anti-parallel.
        """
        if not self.closed:
            raise InvalidParameterError("vertex tangents need a closed curve")
        t = self.unit_tangents()
        b = np.roll(t, 1, axis=0) + t
        nb = np.linalg.norm(b, axis=1)
        if np.any(nb < 1e-12):
            k = int(np.argmin(nb))
            raise TransportError(f"edges meeting at vertex {k} are "
                                 "anti-parallel")
        return b / nb[:, None]

    def diameter(self):
        c = self.vertices - self.vertices.mean(axis=0)
        return 2.0 * float(np.max(np.linalg.norm(c, axis=1)))

    def reversed(self):
        if self.closed:
            return PolygonalCurve(self.vertices[::-1].copy())
        return PolygonalCurve(self.vertices[::-1].copy(), closed=False)

    def mirrored(self, normal=(0.0, 0.0, 1.0)):
        """Reflection through the plane through the origin with ``normal``."""
        nrm = _unit(normal, "normal")
        v = self.vertices
        return PolygonalCurve(v - 2.0 * np.outer(v @ nrm, nrm), self.closed)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PolygonalCurve):
            return NotImplemented
        return (self.closed == other.closed
                and np.array_equal(self.vertices, other.vertices))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CurveSystem:
    """Pairwise-disjoint collection of oriented closed curves."""

    components: tuple
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidParameterError("a curve system needs a component")
        for c in comps:
            if not isinstance(c, PolygonalCurve):
                raise InvalidParameterError("components must be "
                                            "PolygonalCurve instances")
        object.__setattr__(self, "components", comps)
        if self.check:
            for k in range(len(comps)):
                for l in range(k + 1, len(comps)):
                    d = component_distance(comps[k], comps[l])
                    if not d > 0.0:
                        raise DisjointnessError(
                            f"components {k} and {l} intersect "
                            f"(minimum distance {d:.3e})", (k, l), d)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, k):
        return self.components[k]

    def edge_arrays(self):
        """Concatenated edges with component ids and local edge indices."""
        starts, ends, comp, local = [], [], [], []
        for k, c in enumerate(self.components):
            s, e = c.edges()
            starts.append(s)
            ends.append(e)
            comp.append(np.full(len(s), k, dtype=np.int64))
            local.append(np.arange(len(s), dtype=np.int64))
        return (np.ascontiguousarray(np.concatenate(starts)),
                np.ascontiguousarray(np.concatenate(ends)),
                np.concatenate(comp), np.concatenate(local))

    def diameter(self):
        v = np.concatenate([c.vertices for c in self.components])
        c = v - v.mean(axis=0)
        return 2.0 * float(np.max(np.linalg.norm(c, axis=1)))


def component_distance(a, b):
    """Minimum distance between the edges of two curves."""
    sa, ea = a.edges()
    sb, eb = b.edges()
    d, _, _ = _kernels.min_distance(sa, ea, sb, eb)
    return float(d)


# ---------------------------------------------------------------------------
# Ribbons and flux tubes


def _rotate_onto(a, b, v):
    """Apply the minimal rotation taking unit ``a`` to unit ``b`` to ``v``."""
    c = float(a @ b)
    if 1.0 + c < 1e-12:
        raise TransportError("rotation between anti-parallel tangents is "
                             "undefined")
    w = np.cross(a, b)
    return v * c + np.cross(w, v) + w * (w @ v) / (1.0 + c)


def _signed_angle(u, v, axis):
    return math.atan2(float(np.cross(u, v) @ axis), float(u @ v))


@dataclass(frozen=True, eq=False)
class Ribbon:
    """Closed curve with a unit framing vector at every vertex.

    ``framing[i]`` is orthogonal to the bisector tangent at vertex ``i``.
    ``turns[k]`` counts extra full turns of the framing along edge ``k``
    beyond the in-range increment seen between its two vertex samples; it
    lets a single edge carry several turns of twist. ``holonomy`` is the
    closure angle recorded by :func:`parallel_transport_frame` (``None`` for
    framings supplied directly).
    """

    curve: PolygonalCurve
    framing: np.ndarray
    turns: np.ndarray = None
    holonomy: float = None

    def __post_init__(self):
        if not self.curve.closed:
            raise InvalidParameterError("ribbons need a closed centerline")
        V = np.array(self.framing, dtype=np.float64, copy=True)
        n = self.curve.n
        if V.shape != (n, 3) or not np.all(np.isfinite(V)):
            raise InvalidParameterError(
                f"framing must have shape ({n}, 3) and be finite")
        norms = np.linalg.norm(V, axis=1)
        if np.any(np.abs(norms - 1.0) > FRAME_UNIT_TOL):
            raise InvalidParameterError("framing vectors must be unit length")
        T = self.curve.vertex_tangents()
        dots = np.abs(np.einsum("ij,ij->i", V, T))
        if np.any(dots > FRAME_ORTHO_TOL):
            k = int(np.argmax(dots))
            raise InvalidParameterError(
                f"framing vector {k} is not orthogonal to the vertex tangent "
                f"(|V.T| = {dots[k]:.2e})")
        V.setflags(write=False)
        object.__setattr__(self, "framing", V)
        turns = np.zeros(n, dtype=np.int64) if self.turns is None else \
            np.array(self.turns, dtype=np.int64, copy=True)
        if turns.shape != (n,):
            raise InvalidParameterError("turns needs one entry per edge")
        turns.setflags(write=False)
        object.__setattr__(self, "turns", turns)

    @classmethod
    def from_vectors(cls, curve, vectors, turns=None):
        """Project ``vectors`` onto the normal planes and normalise them."""
        T = curve.vertex_tangents()
        V = np.asarray(vectors, dtype=np.float64)
        V = V - np.einsum("ij,ij->i", V, T)[:, None] * T
        nv = np.linalg.norm(V, axis=1)
        if np.any(nv < 1e-12):
            raise InvalidParameterError("a framing vector is tangent to the "
                                        "curve")
        V = V / nv[:, None]
        # One more pass removes the rounding left by the first projection.
        V = V - np.einsum("ij,ij->i", V, T)[:, None] * T
        V = V / np.linalg.norm(V, axis=1)[:, None]
        return cls(curve, V, turns)

    def edge_increments(self):
        """Framing rotation along each edge, in radians.

        Both endpoint vectors are carried into the plane normal to the edge
        by the minimal rotation from their vertex tangent; the increment is
        the signed angle between them about the edge direction, plus
        ``2 pi * turns``.
        """
        from .errors import AmbiguousTwistError

        T = self.curve.vertex_tangents()
        t = self.curve.unit_tangents()
        V = self.framing
        n = self.curve.n
        out = np.empty(n)
        for k in range(n):
            k1 = (k + 1) % n
            w0 = _rotate_onto(T[k], t[k], V[k])
            w1 = _rotate_onto(T[k1], t[k], V[k1])
            ang = _signed_angle(w0, w1, t[k])
            if abs(ang) > math.pi - 1e-9:
                raise AmbiguousTwistError(
                    f"framing turns by half a revolution along edge {k}; "
                    "sample the framing more finely")
            out[k] = ang + 2.0 * math.pi * self.turns[k]
        return out

    def translated(self, v):
        return Ribbon(translate(self.curve, v), self.framing, self.turns,
                      self.holonomy)

    def rotated(self, R):
        R = np.asarray(R, dtype=np.float64)
        return Ribbon.from_vectors(rotate(self.curve, R), self.framing @ R.T,
                                   self.turns)

    def pushoff(self, eps):
        """Vertices displaced by ``eps`` along the framing."""
        return PolygonalCurve(self.curve.vertices + eps * self.framing)

    def subdivided(self, pieces):
        """Split every edge into ``pieces[k]`` straight sub-edges (an
        integer applies to every edge).

        The framing on an edge is interpolated by rotating uniformly about the
        edge direction, so the total twist (including ``turns``) is kept and
        the result has ``turns`` equal to zero.
        """
        pieces = np.broadcast_to(np.asarray(pieces, dtype=np.int64),
                                 (self.curve.n,))
        if np.any(pieces < 1):
            raise InvalidParameterError("pieces must be >= 1")
        inc = self.edge_increments()
        T = self.curve.vertex_tangents()
        t = self.curve.unit_tangents()
        X = self.curve.vertices
        n = self.curve.n
        pts, frames = [], []
        for k in range(n):
            k1 = (k + 1) % n
            m = int(pieces[k])
            pts.append(X[k])
            frames.append(self.framing[k])
            w0 = _rotate_onto(T[k], t[k], self.framing[k])
            for s in range(1, m):
                a = inc[k] * s / m
                w = (w0 * math.cos(a) + np.cross(t[k], w0) * math.sin(a))
                pts.append(X[k] + (X[k1] - X[k]) * (s / m))
                frames.append(w)
        curve = PolygonalCurve(np.array(pts))
        return Ribbon.from_vectors(curve, np.array(frames))


@dataclass(frozen=True, eq=False)
class FluxTube:
    ribbon: Ribbon
    flux: float = 1.0

    def __post_init__(self):
        f = float(self.flux)
        if not math.isfinite(f) or f <= 0.0:
            raise InvalidParameterError("flux must be finite and positive")
        object.__setattr__(self, "flux", f)

    @property
    def curve(self):
        return self.ribbon.curve


# ---------------------------------------------------------------------------
# Generators


def _plane_basis(normal):
    a = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else \
        np.array([0.0, 1.0, 0.0])
    u = a - (a @ normal) * normal
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    return u, w


def make_circle(center, normal, radius, n):
    """Regular ``n``-gon inscribed in a circle, counterclockwise seen from
    the tip of ``normal``."""
    nrm = _unit(normal, "normal")
    if not radius > 0.0:
        raise InvalidParameterError("radius must be positive")
    if int(n) != n or n < 3:
        raise InvalidParameterError("n must be an integer >= 3")
    n = int(n)
    c = np.asarray(center, dtype=np.float64)
    u, w = _plane_basis(nrm)
    th = 2.0 * np.pi * np.arange(n) / n
    pts = c + radius * (np.cos(th)[:, None] * u + np.sin(th)[:, None] * w)
    return PolygonalCurve(pts)


def make_torus_knot(p, q, R, r, n):
    """``n`` samples of the (p, q) torus knot on the torus of radii R > r."""
    if int(p) != p or int(q) != q or p == 0 or q == 0 or \
            math.gcd(int(p), int(q)) != 1:
        raise InvalidParameterError("p and q must be nonzero coprime integers")
    if not (R > r > 0.0):
        raise InvalidParameterError("need R > r > 0")
    if int(n) != n or n < 3:
        raise InvalidParameterError("n must be an integer >= 3")
    th = 2.0 * np.pi * np.arange(int(n)) / int(n)
    rho = R + r * np.cos(q * th)
    pts = np.column_stack([rho * np.cos(p * th), rho * np.sin(p * th),
                           r * np.sin(q * th)])
    try:
        return PolygonalCurve(pts)
    except DegenerateEdgeError as exc:
        raise DegenerateEdgeError(f"sampling too coarse: {exc}") from None


def make_torus_link(p, q, R, r, n):
    """The (p, q) torus link: ``gcd(p, q)`` parallel copies of the
    (p/g, q/g) torus knot, each sampled with ``n`` vertices.

    Copy ``k`` is the base knot turned about the z-axis by ``2 pi k / q``.
    The base knot meets every circle of constant height on the torus at
    ``q' = q / g`` points spaced ``2 pi / q'`` apart, so these turns
    interleave the copies evenly.

    Returns
    -------
    CurveSystem
    """
    if int(p) != p or int(q) != q or p == 0 or q == 0:
        raise InvalidParameterError("p and q must be nonzero integers")
    g = math.gcd(int(p), int(q))
    base = make_torus_knot(int(p) // g, int(q) // g, R, r, n)
    comps = [rotate(base, _z_rotation(2.0 * np.pi * k / int(q)))
             for k in range(g)]
    return CurveSystem(tuple(comps))


def _z_rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def make_hopf_link(separation, radius, n):
    """Two circles in orthogonal planes, oriented so that linked circles
    have linking number +1.

    The first circle lies in the xy-plane about the origin; the second lies
    in the xz-plane about ``(separation, 0, 0)``.
    """
    if not radius > 0.0:
        raise InvalidParameterError("radius must be positive")
    a = make_circle((0.0, 0.0, 0.0), (0.0, 0.0, 1.0), radius, n)
    th = 2.0 * np.pi * np.arange(int(n)) / int(n)
    # Passing the xy-plane at x = separation - radius while moving along +z.
    b = np.column_stack([separation + radius * np.cos(th), np.zeros_like(th),
                         -radius * np.sin(th)])
    return CurveSystem((a, PolygonalCurve(b)))


def make_random_closed_polygon(n, seed, min_edge=1e-3, max_tries=100):
    """Reproducible closed polygon of roughly unit edges.

    ``n`` Gaussian directions are normalised, the mean step is removed to
    force closure, and the draw is rejected if any edge is shorter than
    ``min_edge``.
    """
    if int(n) != n or n < 3:
        raise InvalidParameterError("n must be an integer >= 3")
    n = int(n)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        steps = rng.normal(size=(n, 3))
        steps /= np.linalg.norm(steps, axis=1)[:, None]
        steps -= steps.mean(axis=0)
        if np.min(np.linalg.norm(steps, axis=1)) < min_edge:
            continue
        pts = np.vstack([np.zeros(3), np.cumsum(steps[:-1], axis=0)])
        lengths = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.min(lengths) < min_edge:
            continue
        return PolygonalCurve(pts)
    raise GenerationFailureError(
        f"no acceptable polygon after {max_tries} draws")


def make_random_planar_polygon(n, seed, plane_normal=(0.0, 0.0, 1.0)):
    """Simple star-shaped polygon with ``n`` vertices in a plane through the
    origin."""
    if int(n) != n or n < 3:
        raise InvalidParameterError("n must be an integer >= 3")
    n = int(n)
    nrm = _unit(plane_normal, "plane_normal")
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(0.2, 1.0, size=n)
    th = 2.0 * np.pi * np.cumsum(gaps) / gaps.sum()
    rad = rng.uniform(0.5, 1.5, size=n)
    if np.array_equal(nrm, [0.0, 0.0, 1.0]):
        pts = np.column_stack([rad * np.cos(th), rad * np.sin(th),
                               np.zeros(n)])
    else:
        u, w = _plane_basis(nrm)
        pts = (rad * np.cos(th))[:, None] * u + (rad * np.sin(th))[:, None] * w
    return PolygonalCurve(pts)


def random_rotation(seed):
    """Uniformly distributed proper rotation matrix."""
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a, b, c, d = q
    return np.array([
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d),
         2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d,
         2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b),
         a * a - b * b - c * c + d * d],
    ])


# ---------------------------------------------------------------------------
# Rigid motions and resampling


def translate(curve, v):
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (3,):
        raise InvalidParameterError("displacement must be a 3-vector")
    return PolygonalCurve(curve.vertices + v, curve.closed)


def rotate(curve, R, about=(0.0, 0.0, 0.0)):
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-12) \
            or np.linalg.det(R) < 0:
        raise InvalidParameterError("R must be a proper rotation matrix")
    c = np.asarray(about, dtype=np.float64)
    return PolygonalCurve((curve.vertices - c) @ R.T + c, curve.closed)


def resample(curve, m):
    """Arc-length uniform resampling with ``m`` vertices, starting at
    vertex 0."""
    if int(m) != m or m < 3:
        raise InvalidParameterError("m must be an integer >= 3")
    m = int(m)
    s, e = curve.edges()
    lens = np.linalg.norm(e - s, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    total = cum[-1]
    targets = total * np.arange(m) / m
    k = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0,
                len(lens) - 1)
    frac = (targets - cum[k]) / lens[k]
    pts = s[k] + frac[:, None] * (e[k] - s[k])
    return PolygonalCurve(pts)


def parallel_transport_frame(curve, V0):
    """Ribbon whose framing is carried vertex to vertex by the minimal
    rotations of the tangent.

    Between vertices ``i`` and ``i + 1`` the vector is first rotated from the
    bisector at ``i`` onto edge ``i`` and then onto the bisector at
    ``i + 1``; the two rotations compose to the minimal rotation between
    consecutive edge tangents. The frame generally fails to close; the
    closure angle is stored as ``Ribbon.holonomy`` in ``(-pi, pi]``.
    """
    V0 = _unit(V0, "V0")
    T = curve.vertex_tangents()
    t = curve.unit_tangents()
    if abs(V0 @ T[0]) > FRAME_ORTHO_TOL:
        raise InvalidParameterError("V0 must be orthogonal to the tangent at "
                                    "vertex 0")
    n = curve.n
    V = np.empty((n, 3))
    V[0] = V0
    v = V0.copy()
    for i in range(n - 1):
        v = _rotate_onto(T[i], t[i], v)
        v = _rotate_onto(t[i], T[i + 1], v)
        v = v - (v @ T[i + 1]) * T[i + 1]
        v /= np.linalg.norm(v)
        V[i + 1] = v
    w0 = _rotate_onto(T[n - 1], t[n - 1], V[n - 1])
    w1 = _rotate_onto(T[0], t[n - 1], V[0])
    hol = _signed_angle(w0, w1, t[n - 1])
    if hol == -math.pi:
        hol = math.pi
    return Ribbon(curve, V, holonomy=hol)


def frenet_ribbon(curve):
    """Framing by the discrete principal normal ``B_i x T_i`` with
    ``B_i`` the unit binormal of the edges meeting at vertex ``i``."""
    d = curve.edge_vectors
    B = np.cross(np.roll(d, 1, axis=0), d)
    nb = np.linalg.norm(B, axis=1)
    if np.any(nb < 1e-12 * np.max(nb)):
        raise InvalidParameterError("Frenet framing needs non-collinear "
                                    "consecutive edges")
    B /= nb[:, None]
    N = np.cross(B, curve.vertex_tangents())
    return Ribbon.from_vectors(curve, N)


def uniform_twist_ribbon(curve, V0, k):
    """Parallel-transport framing with ``k`` extra full turns spread
    uniformly by arc length.

    The twist is ``k + holonomy / 2 pi``. A closed framing cannot shed the
    holonomy, whose fractional part is fixed by the curve; on a planar
    curve the twist is exactly ``k``.
    """
    base = parallel_transport_frame(curve, V0)
    T = curve.vertex_tangents()
    lens = curve.edge_lengths
    cum = np.concatenate([[0.0], np.cumsum(lens)[:-1]]) / lens.sum()
    ang = 2.0 * math.pi * k * cum
    V = base.framing
    W = np.cross(T, V)
    rotated = V * np.cos(ang)[:, None] + W * np.sin(ang)[:, None]
    return Ribbon.from_vectors(curve, rotated)
