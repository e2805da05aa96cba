"""Reconnection of polygonal curves and flux tubes along anti-parallel
edges, with a ledger of the invariants before and after."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .curves import CurveSystem, FluxTube, PolygonalCurve, Ribbon
from .errors import (
    AmbiguousTwistError,
    DegenerateSplitError,
    InvalidParameterError,
    InvalidStateError,
    NotAntiParallelError,
    NotJuxtaposedError,
    PathObstructionError,
    UnequalFluxError,
)
from .invariants import (
    DegenerateTorsionWarning,
    linking_number_gauss,
    total_torsion,
    twist,
    writhe,
    writhe_system,
)

SWEEP_STEPS = 64
SWEEP_REL_CLEARANCE = 1e-9
ANGLE_TOL = 1e-6
LENGTH_REL_TOL = 1e-2


@dataclass(frozen=True)
class ReconnectionSite:
    """Edge ``edge_a`` of the first curve and ``edge_b`` of the second (or of
    the same curve for self-reconnection)."""

    edge_a: int
    edge_b: int
    snap_tolerance: float = 1e-9

    def __post_init__(self):
        if self.edge_a < 0 or self.edge_b < 0:
            raise InvalidParameterError("edge indices must be non-negative")
        if not self.snap_tolerance >= 0.0:
            raise InvalidParameterError("snap tolerance must be >= 0")


class Alignment(NamedTuple):
    """Result of :func:`align_for_reconnection`.

    ``a`` is the first curve, with its site edge split when the two edge
    lengths differed slightly; ``site`` refers to the edges of ``a`` and
    ``b``.
    """

    b: PolygonalCurve
    translation: np.ndarray
    a: PolygonalCurve
    site: ReconnectionSite


def _split_edge(curve, k, length):
    """Insert a vertex on edge ``k`` at distance ``length`` from its start."""
    v = curve.vertices
    p = v[k]
    q = v[(k + 1) % curve.n]
    new = p + (q - p) * (length / np.linalg.norm(q - p))
    return PolygonalCurve(np.insert(v, k + 1, new, axis=0))


def _check_index(curve, k, name):
    if k >= curve.n:
        raise InvalidParameterError(f"{name} = {k} is out of range for a "
                                    f"curve with {curve.n} edges")


def align_for_reconnection(a, b, site, steps=SWEEP_STEPS,
                           angle_tol=ANGLE_TOL):
    """Translate ``b`` rigidly so that its site edge lies on the site edge of
    ``a`` with opposite orientation.

    The straight translation path is sampled at ``steps`` points (the final,
    coincident position excluded); at each sample the two curves must stay
    more than ``1e-9`` diameters apart. Edge lengths that differ by less than
    one percent are equalised by splitting the longer edge.

    Raises
    ------
    NotAntiParallelError
        If the site edges are not anti-parallel within ``angle_tol`` radians
        or their lengths differ by one percent or more.
    PathObstructionError
        If the translation path passes through ``a``.
    """
    i, j = site.edge_a, site.edge_b
    _check_index(a, i, "edge_a")
    _check_index(b, j, "edge_b")
    da = a.vertices[(i + 1) % a.n] - a.vertices[i]
    db = b.vertices[(j + 1) % b.n] - b.vertices[j]
    la, lb = np.linalg.norm(da), np.linalg.norm(db)
    cosang = float(-(da @ db) / (la * lb))
    ang = math.acos(min(1.0, max(-1.0, cosang)))
    if ang > angle_tol:
        raise NotAntiParallelError(
            f"site edges are {ang:.3e} rad from anti-parallel")
    if abs(la - lb) > site.snap_tolerance:
        if abs(la - lb) >= LENGTH_REL_TOL * max(la, lb):
            raise NotAntiParallelError(
                f"site edge lengths {la!r} and {lb!r} differ by 1% or more")
        if la > lb:
            a = _split_edge(a, i, lb)
        else:
            # Keep the piece that ends at b[j + 1]; the site moves up one.
            b = _split_edge(b, j, lb - la)
            j += 1
    vb = b.vertices
    v = a.vertices[(i + 1) % a.n] - vb[j]
    sa, ea = a.edges()
    sb, eb = b.edges()
    diam = CurveSystem((a, b), check=False).diameter()
    if np.linalg.norm(v) <= site.snap_tolerance:
        # Already in place: there is no path to check.
        d, ei, ej, k = np.inf, -1, -1, -1
    else:
        d, ei, ej, k = K.sweep_min_distance(sa, ea, sb, eb, v, steps)
    if not d > SWEEP_REL_CLEARANCE * diam:
        raise PathObstructionError(
            f"translation path brings edge {ej} of the second curve within "
            f"{d:.3e} of edge {ei} of the first at step {k} of {steps}")
    moved = vb + v
    moved[j] = a.vertices[(i + 1) % a.n]
    moved[(j + 1) % b.n] = a.vertices[i]
    d = _final_clearance(sa, ea, *PolygonalCurve(moved).edges(), i, j)
    if not d > SWEEP_REL_CLEARANCE * diam:
        raise PathObstructionError(
            f"in place the curves meet away from the site ({d:.3e} apart); "
            "only a single common edge can be reconnected")
    return Alignment(PolygonalCurve(moved), v, a,
                     ReconnectionSite(i, j, site.snap_tolerance))


def _final_clearance(sa, ea, sb, eb, i, j):
    # Edges next to the site meet at the junction vertices by design, so
    # the 3 x 3 block around (i, j) is left out.
    near_a = np.zeros(len(sa), dtype=bool)
    near_a[[(i - 1) % len(sa), i, (i + 1) % len(sa)]] = True
    near_b = np.zeros(len(sb), dtype=bool)
    near_b[[(j - 1) % len(sb), j, (j + 1) % len(sb)]] = True
    d = np.inf
    if (~near_a).any():
        d = K.min_distance(sa[~near_a], ea[~near_a], sb, eb)[0]
    if (~near_b).any():
        d = min(d, K.min_distance(sa[near_a], ea[near_a], sb[~near_b],
                                  eb[~near_b])[0])
    return float(d)


def _coincident(a, b, i, j):
    return (np.array_equal(b.vertices[j], a.vertices[(i + 1) % a.n]) and
            np.array_equal(b.vertices[(j + 1) % b.n], a.vertices[i]))


@dataclass(frozen=True, eq=False)
class ThetaCurve:
    """Two closed polygons sharing one edge traversed in opposite
    directions.

    ``a`` traverses the shared edge as its edge ``site.edge_a``; ``b``
    traverses it backwards as its edge ``site.edge_b``.
    """

    a: PolygonalCurve
    b: PolygonalCurve
    site: ReconnectionSite

    def __post_init__(self):
        _check_index(self.a, self.site.edge_a, "edge_a")
        _check_index(self.b, self.site.edge_b, "edge_b")
        if not _coincident(self.a, self.b, self.site.edge_a,
                           self.site.edge_b):
            raise InvalidStateError("site edges do not coincide exactly")

    def writhe(self, parallel=False):
        """Writhe of the union; the shared edge pair contributes nothing."""
        return writhe_system(CurveSystem((self.a, self.b), check=False),
                             parallel)

    def joined(self):
        """The single curve obtained by deleting the shared edge."""
        verts, _ = _splice_indices(self.a.n, self.b.n, self.site.edge_a,
                                   self.site.edge_b)
        pts = np.concatenate([self.a.vertices, self.b.vertices])[verts]
        return PolygonalCurve(pts)

    def split(self):
        return CurveSystem((self.a, self.b), check=False)

    def cancellation_terms(self):
        """Solid angles of each copy of the shared edge with every other
        edge of the union.

        Returns ``(from_a, from_b)``; ``from_a + from_b`` vanishes edge by
        edge because the copies are reverses of one another.
        """
        s, e, _, _ = self.split().edge_arrays()
        ka = self.site.edge_a
        kb = self.a.n + self.site.edge_b
        out = np.zeros((2, len(s)))
        for r, k in enumerate((ka, kb)):
            for m in range(len(s)):
                if m in (ka, kb):
                    continue
                out[r, m] = K.omega(s[k], e[k], s[m], e[m], K.GL_NODES,
                                    K.GL_WEIGHTS)
        return out[0], out[1]


def theta_intermediate(a, b_aligned, site):
    """Theta-curve of ``a`` and an aligned ``b``."""
    return ThetaCurve(a, b_aligned, site)


def cut(curve, i, j):
    """Split a closed curve along the chord between vertices ``i < j``.

    The two loops share the chord with opposite orientations: the first is
    ``curve[i..j]`` closed by ``j -> i`` and the second is
    ``curve[j..i]`` (wrapping) closed by ``i -> j``. This undoes
    :func:`reconnect`.
    """
    n = curve.n
    if not (0 <= i < j < n):
        raise InvalidParameterError("need 0 <= i < j < n")
    if j - i < 2 or n - (j - i) < 2:
        raise DegenerateSplitError("each loop needs at least 3 vertices")
    v = curve.vertices
    a = PolygonalCurve(v[i:j + 1])
    b = PolygonalCurve(np.concatenate([v[j:], v[:i + 1]]))
    return ThetaCurve(a, b, ReconnectionSite(a.n - 1, b.n - 1))


def _splice_indices(n, m, i, j):
    """Vertex indices of A#B into the stacked array ``[A; B]`` and the edge
    provenance (curve 0 or 1, edge index) of each new edge."""
    ia = [(i + 1 + k) % n for k in range(n)]
    ib = [n + (j + 2 + k) % m for k in range(m - 2)]
    edges = [(0, (i + 1 + k) % n) for k in range(n - 1)]
    edges += [(1, (j + 1 + k) % m) for k in range(m - 1)]
    return ia + ib, edges


def _splice(a, b, i, j, frames=None, turns=None):
    verts, prov = _splice_indices(a.n, b.n, i, j)
    pts = np.concatenate([a.vertices, b.vertices])[verts]
    merges = []
    keep = [0]
    for k in range(1, len(pts)):
        if np.array_equal(pts[k], pts[keep[-1]]):
            merges.append({"position": len(keep), "vertex": pts[k].tolist()})
        else:
            keep.append(k)
    if len(keep) > 1 and np.array_equal(pts[keep[-1]], pts[keep[0]]):
        merges.append({"position": 0, "vertex": pts[0].tolist()})
        keep.pop()
    curve = PolygonalCurve(pts[keep])
    out_frames = None if frames is None else frames[verts][keep]
    out_turns = None
    if turns is not None:
        t = np.array([turns[c][e] for c, e in prov], dtype=np.int64)
        out_turns = t[keep]
    return curve, out_frames, out_turns, merges


def reconnect(a, b, site):
    """Reconnect two disjoint curves along anti-parallel site edges.

    ``b`` is translated onto ``a`` (see :func:`align_for_reconnection`) and
    the shared edge is deleted. The result lists ``a`` from vertex
    ``edge_a + 1`` round to ``edge_a``, then ``b`` from ``edge_b + 2`` round
    to ``edge_b - 1``.
    """
    al = align_for_reconnection(a, b, site)
    curve, _, _, _ = _splice(al.a, al.b, al.site.edge_a, al.site.edge_b)
    return curve


def self_reconnect(curve, site):
    """Split a curve whose edges ``edge_a`` and ``edge_b`` coincide with
    opposite orientation into two loops.

    Endpoints within ``site.snap_tolerance`` are snapped together first.
    Returns a :class:`CurveSystem` ``(X, Y)`` where ``X`` starts at the head
    of ``edge_a`` and ``Y`` at the head of ``edge_b``.

    Raises
    ------
    NotJuxtaposedError
        If the site edges are not coincident within tolerance.
    DegenerateSplitError
        If a loop would have fewer than three vertices.
    """
    a, b = site.edge_a, site.edge_b
    n = curve.n
    _check_index(curve, a, "edge_a")
    _check_index(curve, b, "edge_b")
    if a > b:
        a, b = b, a
    if b - a < 2 or n - (b - a) < 2:
        raise NotJuxtaposedError("site edges are equal or adjacent")
    v = curve.vertices
    gap1 = np.linalg.norm(v[b] - v[(a + 1) % n])
    gap2 = np.linalg.norm(v[(b + 1) % n] - v[a])
    tol = site.snap_tolerance
    if gap1 > tol or gap2 > tol:
        raise NotJuxtaposedError(
            f"site edges are {max(gap1, gap2):.3e} from coincident")
    idx_x = list(range(a + 1, b))
    idx_y = [(b + 1 + k) % n for k in range(n - (b - a) - 1)]
    if len(idx_x) < 3 or len(idx_y) < 3:
        raise DegenerateSplitError(
            f"loops would have {len(idx_x)} and {len(idx_y)} vertices")
    x = PolygonalCurve(v[idx_x])
    y = PolygonalCurve(v[idx_y])
    return CurveSystem((x, y))


def juxtapose(curve, site, fraction):
    """Move the endpoints of ``edge_b`` so that its offset from the reversed
    ``edge_a`` shrinks to ``fraction`` of its current value.

    ``fraction = 0`` makes the two edges coincide exactly.
    """
    a, b = site.edge_a, site.edge_b
    n = curve.n
    v = np.array(curve.vertices)
    b1 = (b + 1) % n
    v[b] = v[(a + 1) % n] + fraction * (v[b] - v[(a + 1) % n])
    v[b1] = v[a] + fraction * (v[b1] - v[a])
    return PolygonalCurve(v)


# ---------------------------------------------------------------------------
# Flux tubes


@dataclass(frozen=True)
class ReconnectionLedger:
    """Invariants before and after a reconnection.

    ``delta_tw`` and ``delta_n`` are before minus after; ``delta_h`` is
    after minus before, so that helicity conservation of the writhe part
    reads ``delta_h = -flux**2 * delta_tw``.
    """

    wr_before: float
    wr_after: float
    lk_before: float
    tw_before_a: float
    tw_before_b: float
    tw_after: float
    t_before: float
    t_after: float
    n_before: float
    n_after: float
    delta_tw: float
    delta_n: float
    delta_h: float
    h_before: float
    h_after: float
    merges: list = field(default_factory=list)

    @property
    def delta_wr(self):
        return self.wr_after - self.wr_before

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _torsion(curve):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateTorsionWarning)
        return total_torsion(curve)


def _reframe_junctions(curve, frames, positions):
    """Project framing vectors at junction vertices onto the new normal
    planes."""
    T = curve.vertex_tangents()
    V = np.array(frames)
    for k in positions:
        w = V[k] - (V[k] @ T[k]) * T[k]
        nw = np.linalg.norm(w)
        if nw < 1e-6:
            raise AmbiguousTwistError(
                f"framing at junction vertex {k} is tangent to the joined "
                "curve")
        V[k] = w / nw
    return Ribbon.from_vectors(curve, V)


def _check_flux(fa, fb):
    if abs(fa - fb) > 1e-12 * max(fa, fb):
        raise UnequalFluxError(f"fluxes differ: {fa!r} and {fb!r}")


def _ledger(wr0, wr1, lk0, twa, twb, tw1, t0, t1, flux, merges):
    wr0, wr1, lk0, twa, twb, tw1, t0, t1, flux = (
        float(x) for x in (wr0, wr1, lk0, twa, twb, tw1, t0, t1, flux))
    n0 = twa + twb - t0
    n1 = tw1 - t1
    h0 = flux ** 2 * (wr0 + twa + twb)
    h1 = flux ** 2 * (wr1 + tw1)
    return ReconnectionLedger(
        wr_before=wr0, wr_after=wr1, lk_before=lk0, tw_before_a=twa,
        tw_before_b=twb, tw_after=tw1, t_before=t0, t_after=t1, n_before=n0,
        n_after=n1, delta_tw=(twa + twb) - tw1, delta_n=n0 - n1,
        delta_h=h1 - h0, h_before=h0, h_after=h1, merges=merges)


def reconnect_tubes(a, b, site, parallel=False):
    """Reconnect two flux tubes of equal flux.

    Returns
    -------
    tube : FluxTube
        The joined tube. Framing vectors are inherited from the parent
        tubes, re-projected at the two junction vertices.
    ledger : ReconnectionLedger
    """
    _check_flux(a.flux, b.flux)
    ra, rb = a.ribbon, b.ribbon
    al = align_for_reconnection(ra.curve, rb.curve, site)
    if al.a.n != ra.curve.n or al.b.n != rb.curve.n:
        raise InvalidParameterError(
            "site edge lengths must agree within the snap tolerance for "
            "framed tubes")
    i, j = al.site.edge_a, al.site.edge_b
    frames = np.concatenate([ra.framing, rb.framing])
    curve, V, turns, merges = _splice(al.a, al.b, i, j, frames,
                                      (ra.turns, rb.turns))
    if merges:
        raise InvalidStateError("junction vertices merged; framing cannot "
                                "be inherited")
    joined = _reframe_junctions(curve, V, (0, ra.curve.n - 1))
    joined = Ribbon(curve, joined.framing, turns)

    # Before-values use the pair as given; writhe, linking and torsion are
    # all unchanged along the clear translation path.
    before = CurveSystem((ra.curve, rb.curve))
    wr0 = writhe_system(before, parallel)
    lk0 = linking_number_gauss(ra.curve, rb.curve)
    wr1 = writhe(curve, parallel)
    twa, twb, tw1 = twist(ra), twist(rb), twist(joined)
    t0 = _torsion(ra.curve) + _torsion(rb.curve)
    t1 = _torsion(curve)
    led = _ledger(wr0, wr1, lk0, twa, twb, tw1, t0, t1, a.flux, merges)
    return FluxTube(joined, a.flux), led


def self_reconnect_tubes(tube, site, parallel=False):
    """Self-reconnection of a framed tube at coincident anti-parallel edges.

    The ledger reads the single tube as "a" (``tw_before_b = 0``) and the
    two resulting loops as one system; ``lk_before`` is zero.

    Returns
    -------
    tubes : tuple of FluxTube
    ledger : ReconnectionLedger
    """
    rib = tube.ribbon
    sys_ = self_reconnect(rib.curve, site)
    a, b = sorted((site.edge_a, site.edge_b))
    n = rib.curve.n
    idx_x = list(range(a + 1, b))
    idx_y = [(b + 1 + k) % n for k in range(n - (b - a) - 1)]
    ribbons = []
    for comp, idx in zip(sys_, (idx_x, idx_y)):
        t = rib.turns[idx].copy()
        t[-1] = 0  # the closing edge is new
        r = _reframe_junctions(comp, rib.framing[idx], (0, len(idx) - 1))
        ribbons.append(Ribbon(comp, r.framing, t))
    wr0 = writhe(rib.curve, parallel)
    wr1 = writhe_system(sys_, parallel)
    tw0 = twist(rib)
    tw1 = twist(ribbons[0]) + twist(ribbons[1])
    t0 = _torsion(rib.curve)
    t1 = _torsion(sys_[0]) + _torsion(sys_[1])
    led = _ledger(wr0, wr1, 0.0, tw0, 0.0, tw1, t0, t1, tube.flux, [])
    return tuple(FluxTube(r, tube.flux) for r in ribbons), led
