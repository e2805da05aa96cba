"""Writhe, linking, twist, torsion and helicity of polygonal curves."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .curves import CurveSystem, PolygonalCurve, Ribbon, _rotate_onto, _unit
from .errors import (
    DegenerateDirectionError,
    DisjointnessError,
    GeometricDegeneracyError,
    InvalidParameterError,
)

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

#: Relative tolerances of the projection genericity test.
PROJECTION_REL_TOL = 1e-9
PROJECTION_PARAM_TOL = 1e-9

_FEATURES = {
    K.DEG_EDGE: "edge projects to a point",
    K.DEG_ENDPOINT: "crossing at an edge endpoint",
    K.DEG_COINCIDENT: "two crossings project to the same point",
    K.DEG_OVERLAP: "collinear overlap in projection",
    K.DEG_INTERSECT: "edges intersect in space",
}


class DegenerateTorsionWarning(UserWarning):
    """Collinear consecutive edges were skipped in the torsion sum."""


def _system(obj):
    if isinstance(obj, CurveSystem):
        return obj
    if isinstance(obj, PolygonalCurve):
        return CurveSystem((obj,), check=False)
    raise InvalidParameterError("expected a PolygonalCurve or CurveSystem")


def edge_pair_solid_angle(p1, p2, p3, p4):
    """Signed solid angle of the quadrilateral spanned by edges
    ``p1 -> p2`` and ``p3 -> p4``.

    Equals the Gauss double integral of
    ``(x - y) . (dx x dy) / |x - y|^3`` over the two edges. Edges that share
    an endpoint contribute zero.

    Raises
    ------
    GeometricDegeneracyError
        If the edges intersect.
    """
    pts = [np.asarray(p, dtype=np.float64) for p in (p1, p2, p3, p4)]
    w = K.omega(*pts, K.GL_NODES, K.GL_WEIGHTS)
    if math.isnan(w):
        raise GeometricDegeneracyError("edges intersect")
    return float(w)


def _raise_bad(system, bad, starts, ends):
    i, j = bad
    d = K.segment_distance(starts[i], ends[i], starts[j], ends[j])
    raise GeometricDegeneracyError(
        f"edges {i} and {j} intersect (distance {d:.3e})")


def writhe(curve, parallel=False):
    """Writhe of a closed polygon as a sum over unordered edge pairs.

    The pair sum is accumulated with compensated summation in a fixed
    order, so ``parallel=True`` returns the bit-identical value.
    """
    if not curve.closed:
        raise InvalidParameterError("writhe needs a closed curve")
    s, e = curve.edges()
    total, _, bad = K.pair_sums(s, e, np.zeros(len(s), dtype=np.int64), 1,
                                parallel=parallel)
    if bad is not None:
        _raise_bad(curve, bad, s, e)
    return float(total / TWO_PI)


class SystemWrithe(NamedTuple):
    total: float
    self_writhe: tuple
    linking: np.ndarray


def writhe_system_terms(system, parallel=False):
    """Total writhe with its decomposition from a single pass.

    ``linking[k, l]`` is the Gauss linking integral of components ``k`` and
    ``l`` built from the same pair sums as ``total``.
    """
    system = _system(system)
    s, e, comp, _ = system.edge_arrays()
    nc = len(system)
    total, blocks, bad = K.pair_sums(s, e, comp, nc, parallel=parallel)
    if bad is not None:
        _raise_bad(system, bad, s, e)
    selfw = tuple(float(blocks[k, k] / TWO_PI) for k in range(nc))
    lk = np.zeros((nc, nc))
    for k in range(nc):
        for l in range(k + 1, nc):
            lk[k, l] = lk[l, k] = (blocks[k, l] + blocks[l, k]) / FOUR_PI
    return SystemWrithe(float(total / TWO_PI), selfw, lk)


def writhe_system(system, parallel=False):
    """Writhe of a union of disjoint curves, pairs across components
    included."""
    return writhe_system_terms(system, parallel).total


def linking_number_gauss(a, b):
    """Gauss linking integral of two disjoint closed polygons (a float that
    is an integer up to rounding)."""
    sa, ea = a.edges()
    sb, eb = b.edges()
    d, i, j = K.min_distance(sa, ea, sb, eb)
    if not d > 0.0:
        raise DisjointnessError(
            f"edge {i} of the first curve meets edge {j} of the second",
            (i, j), float(d))
    total, i, j = K.cross_sum(sa, ea, sb, eb, K.GL_NODES, K.GL_WEIGHTS)
    if math.isnan(total):
        raise DisjointnessError("curves intersect", (i, j), 0.0)
    return float(total / FOUR_PI)


def round_linking(value, tol=1e-6):
    """Round a Gauss linking value, refusing values far from an integer."""
    r = round(value)
    if abs(value - r) > tol:
        raise GeometricDegeneracyError(
            f"linking value {value!r} is not within {tol} of an integer")
    return int(r)


# ---------------------------------------------------------------------------
# Projections


@dataclass(frozen=True)
class Crossing:
    """One transversal crossing of a projection.

    ``edge_a`` precedes ``edge_b`` in the concatenated edge order; ``over``
    names which of the two passes nearer the viewer.
    """

    component_a: int
    edge_a: int
    component_b: int
    edge_b: int
    param_a: float
    param_b: float
    sign: int
    over: str


@dataclass(frozen=True)
class ProjectionReport:
    """Crossings seen from ``+direction``.

    ``degenerate`` is True when the requested direction was not generic and
    the report describes the perturbed direction stored in ``direction``.
    """

    direction: tuple
    crossings: tuple
    directional_writhe: int
    degenerate: bool = False

    def to_dict(self):
        d = asdict(self)
        d["crossings"] = [asdict(c) for c in self.crossings]
        return d


def _edge_bundle(system):
    s, e, comp, local = system.edge_arrays()
    sizes = np.array([c.n_edges for c in system], dtype=np.int64)
    closed = np.array([c.closed for c in system], dtype=np.bool_)
    return s, e, comp, local, sizes, closed


def _crossings(bundle, nu, diam):
    s, e, comp, local, sizes, closed = bundle
    cap = max(64, 4 * len(s))
    while True:
        buf = [np.empty(cap, dtype=np.int64), np.empty(cap, dtype=np.int64),
               np.empty(cap), np.empty(cap), np.empty(cap, dtype=np.int64),
               np.empty(cap, dtype=np.int64), np.empty(cap), np.empty(cap)]
        count, status, fa, fb = K.crossings_kernel(
            s, e, comp, local, sizes, closed, nu, diam, PROJECTION_REL_TOL,
            PROJECTION_PARAM_TOL, *buf)
        if status != K.DEG_CAPACITY:
            break
        cap *= 4
    if status != K.OK:
        raise DegenerateDirectionError(
            f"direction {tuple(nu)} is not generic: {_FEATURES[status]}",
            _FEATURES[status], (int(fa), int(fb)))
    return count, buf


def perturb_direction(nu, attempt, scale=None):
    """Deterministic small perturbation of a unit vector.

    The default scale starts at 1e-6 and doubles with every attempt, capped
    at 1e-2, so that thin degenerate bands around a direction (two crossings
    sliding together near a projected cusp, say) are eventually left.
    """
    if scale is None:
        scale = min(1e-6 * 2.0 ** (min(int(attempt), 64) - 1), 1e-2)
    rng = np.random.default_rng([int(attempt), 0x5EED])
    v = np.asarray(nu, dtype=np.float64) + scale * rng.normal(size=3)
    return v / np.linalg.norm(v)


def directional_writhe(system, nu, retry=False, max_retries=32):
    """Signed crossing count of the projection of ``system`` seen from
    ``+nu``.

    Parameters
    ----------
    system : CurveSystem or PolygonalCurve
    nu : array_like
        Unit viewing direction.
    retry : bool
        Perturb a non-generic direction deterministically instead of
        raising.

    Raises
    ------
    DegenerateDirectionError
        If ``nu`` is not generic and ``retry`` is False.
    """
    system = _system(system)
    nu0 = _unit(nu, "nu")
    bundle = _edge_bundle(system)
    diam = system.diameter()
    direction = nu0
    degenerate = False
    for attempt in range(max_retries + 1):
        try:
            count, buf = _crossings(bundle, direction, diam)
            break
        except DegenerateDirectionError:
            if not retry or attempt == max_retries:
                raise
            degenerate = True
            direction = perturb_direction(nu0, attempt + 1)
    oi, oj, os_, ot, osg, oov = buf[:6]
    _, _, comp, local, _, _ = bundle
    out = []
    for c in range(count):
        i, j = int(oi[c]), int(oj[c])
        s, t, sg, ov = float(os_[c]), float(ot[c]), int(osg[c]), int(oov[c])
        if i > j:
            i, j, s, t, ov = j, i, t, s, 1 - ov
        out.append(Crossing(int(comp[i]), int(local[i]), int(comp[j]),
                            int(local[j]), s, t, sg, "ab"[ov]))
    out.sort(key=lambda c: (c.component_a, c.edge_a, c.component_b,
                            c.edge_b))
    total = sum(c.sign for c in out)
    return ProjectionReport(tuple(float(x) for x in direction), tuple(out),
                            int(total), degenerate)


def linking_number_projection(a, b, nu):
    """Half the signed count of crossings between ``a`` and ``b`` seen from
    ``+nu``."""
    rep = directional_writhe(CurveSystem((a, b)), nu)
    s = sum(c.sign for c in rep.crossings if c.component_a != c.component_b)
    if s % 2:
        raise GeometricDegeneracyError("odd inter-component crossing count")
    return s // 2


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float
    retried: int = 0


def sphere_directions(samples, seed):
    """Uniform unit vectors from normalised Gaussian triples."""
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(int(samples), 3))
    return d / np.linalg.norm(d, axis=1)[:, None]


def directional_writhe_samples(curve, samples, seed, batch=65536,
                               max_retries=32):
    """Directional writhe along ``samples`` random directions.

    Non-generic directions are replaced by deterministic perturbations.

    Returns
    -------
    values : ndarray of int64
    retried : int
        Number of directions that needed a perturbation.
    """
    if samples < 1:
        raise InvalidParameterError("need at least one sample")
    system = _system(curve)
    s, e, comp, local, sizes, closed = _edge_bundle(system)
    diam = system.diameter()
    dirs = sphere_directions(samples, seed)
    cap = max(64, 4 * len(s))
    values = np.empty(len(dirs), dtype=np.int64)
    bad = []
    for b0 in range(0, len(dirs), batch):
        blk = np.ascontiguousarray(dirs[b0:b0 + batch])
        v, st = K.directional_writhe_batch(s, e, comp, local, sizes, closed,
                                           blk, diam, PROJECTION_REL_TOL,
                                           PROJECTION_PARAM_TOL, cap)
        values[b0:b0 + len(blk)] = v
        if np.any(st == K.DEG_CAPACITY):
            raise GeometricDegeneracyError("crossing buffer overflow")
        bad.extend((b0 + np.flatnonzero(st != K.OK)).tolist())
    retried = 0
    for k in bad:
        retried += 1
        for attempt in range(1, max_retries + 1):
            d = perturb_direction(dirs[k], (int(seed) * 1000003 + int(k)) *
                                  64 + attempt,
                                  min(1e-6 * 2.0 ** (attempt - 1), 1e-2))
            v, st = K.directional_writhe_batch(
                s, e, comp, local, sizes, closed, d[None, :], diam,
                PROJECTION_REL_TOL, PROJECTION_PARAM_TOL, cap)
            if st[0] == K.OK:
                values[k] = v[0]
                break
        else:
            raise GeometricDegeneracyError(
                f"direction {k} stayed degenerate after {max_retries} "
                "perturbations")
    return values, retried


def writhe_monte_carlo(curve, samples, seed):
    """Average directional writhe over random directions with its standard
    error."""
    values, retried = directional_writhe_samples(curve, samples, seed)
    x = values.astype(np.float64)
    mean = float(x.mean())
    # One direction gives no spread to measure.
    se = float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else math.nan
    return MonteCarloEstimate(mean, se, int(retried))


# ---------------------------------------------------------------------------
# Torsion, twist, self-linking


def torsion_profile(curve):
    """Signed binormal rotation about each edge.

    The angle on edge ``k`` is measured between the binormals of the
    vertices at its two ends, as an angle between osculating planes in
    ``(-pi/2, pi/2]``.

    Returns
    -------
    angles : ndarray
    degenerate : ndarray of bool
        Edges whose neighbouring edges are collinear; their angle is zero.
    """
    d = curve.edge_vectors
    t = curve.unit_tangents()
    b = np.cross(np.roll(d, 1, axis=0), d)
    lens = np.linalg.norm(d, axis=1)
    nb = np.linalg.norm(b, axis=1)
    flat = nb <= 1e-12 * lens * np.roll(lens, 1)
    b1 = np.roll(b, -1, axis=0)
    y = np.einsum("ij,ij->i", np.cross(b, b1), t)
    x = np.einsum("ij,ij->i", b, b1)
    ang = np.arctan2(y, x)
    ang = np.where(ang > 0.5 * np.pi, ang - np.pi, ang)
    ang = np.where(ang <= -0.5 * np.pi, ang + np.pi, ang)
    deg = flat | np.roll(flat, -1)
    ang = np.where(deg, 0.0, ang)
    return ang, deg


def total_torsion(curve):
    """Total torsion divided by ``2 pi``.

    Emits :class:`DegenerateTorsionWarning` when collinear triples were
    skipped.
    """
    ang, deg = torsion_profile(curve)
    if np.any(deg):
        warnings.warn(f"{int(deg.sum())} torsion samples skipped at "
                      "collinear vertices", DegenerateTorsionWarning,
                      stacklevel=2)
    return math.fsum(ang) / TWO_PI


def twist(ribbon):
    """Total rotation of the framing about the centerline, in turns."""
    return math.fsum(ribbon.edge_increments()) / TWO_PI


def intrinsic_twist(ribbon):
    """Twist minus total torsion."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateTorsionWarning)
        return twist(ribbon) - total_torsion(ribbon.curve)


def self_linking(ribbon, parallel=False):
    """``Wr + Tw`` of a ribbon."""
    return writhe(ribbon.curve, parallel) + twist(ribbon)


def pushoff_linking(ribbon, eps=None, max_halvings=20):
    """Gauss linking number of the centerline with its push-off along the
    framing.

    The ribbon is first subdivided so that no edge turns by more than a
    tenth of a revolution. ``eps`` defaults to ``1e-3`` times the shortest
    edge and is halved while the push-off comes too close to the
    centerline.
    """
    inc = ribbon.edge_increments()
    pieces = np.maximum(1, np.ceil(np.abs(inc) / (0.2 * math.pi))).astype(int)
    rib = ribbon.subdivided(pieces) if np.any(pieces > 1) else ribbon
    if eps is None:
        eps = 1e-3 * float(np.min(ribbon.curve.edge_lengths))
    c = rib.curve
    for _ in range(max_halvings):
        p = rib.pushoff(eps)
        if _push_clear(c, p, eps):
            return linking_number_gauss(c, p)
        eps *= 0.5
    raise GeometricDegeneracyError("push-off keeps meeting the centerline")


def _push_clear(c, p, eps):
    # Each push-off point lies within eps of its centerline point, so only
    # edges that are not neighbours can be reached, and only if eps is
    # comparable to their separation. Neighbouring edges stay apart unless
    # the curve folds back on itself, which the framing already rejects.
    sa, ea = c.edges()
    far, _, _ = K.self_min_distance(sa, ea, True)
    if not eps < 0.25 * far:
        return False
    sb, eb = p.edges()
    d, _, _ = K.min_distance(sa, ea, sb, eb)
    return d > 0.0


# ---------------------------------------------------------------------------
# Helicity


@dataclass(frozen=True)
class HelicityReport:
    """Helicity of one flux tube split into its geometric parts.

    ``twist = total_torsion + intrinsic_twist``,
    ``self_linking = writhe + twist`` and
    ``helicity = centerline_helicity + intrinsic_twist_helicity``, where the
    centerline part is ``flux**2 (writhe + total_torsion)``.
    """

    writhe: float
    total_torsion: float
    intrinsic_twist: float
    twist: float
    self_linking: float
    flux: float
    centerline_helicity: float
    intrinsic_twist_helicity: float
    helicity: float

    def to_dict(self):
        return asdict(self)


def helicity_single(tube, parallel=False):
    """Helicity ``flux^2 (Wr + Tw)`` of one flux tube with its parts."""
    wr = writhe(tube.curve, parallel)
    tw = twist(tube.ribbon)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateTorsionWarning)
        tt = total_torsion(tube.curve)
    f2 = tube.flux ** 2
    return HelicityReport(
        writhe=wr, total_torsion=tt, intrinsic_twist=tw - tt, twist=tw,
        self_linking=wr + tw, flux=tube.flux,
        centerline_helicity=f2 * (wr + tt),
        intrinsic_twist_helicity=f2 * (tw - tt), helicity=f2 * (wr + tw))


def helicity_pair(a, b, parallel=False):
    """Helicity of two disjoint flux tubes, including twice the mutual
    linking term."""
    lk = linking_number_gauss(a.curve, b.curve)
    ha = helicity_single(a, parallel).helicity
    hb = helicity_single(b, parallel).helicity
    return ha + hb + 2.0 * a.flux * b.flux * lk
