"""Trefoil -> Hopf link -> unknot -> unlinked pair by three anti-parallel
reconnections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CurveSystem, FluxTube, PolygonalCurve, \
    parallel_transport_frame
from .fixtures import find_edge, traced_frames, trefoil_pathway_curve
from .invariants import directional_writhe, linking_number_gauss, writhe, \
    writhe_system
from .reconnection import (
    ReconnectionSite,
    align_for_reconnection,
    juxtapose,
    reconnect,
    reconnect_tubes,
    self_reconnect,
    self_reconnect_tubes,
)


def default_tube(curve, flux=1.0):
    """Flux tube with a parallel-transport framing started from the
    direction closest to +z (or +x for a vertical first tangent)."""
    t0 = curve.vertex_tangents()[0]
    ref = np.array([0.0, 0.0, 1.0])
    if abs(t0 @ ref) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    v0 = ref - (ref @ t0) * t0
    v0 /= np.linalg.norm(v0)
    return FluxTube(parallel_transport_frame(curve, v0), flux)


@dataclass
class PathwayStep:
    """One reconnection of the pathway.

    ``wr_deformed`` is the writhe just before reconnection, after the
    juxtaposing deformation (equal to ``wr_start`` for pair reconnection,
    which only translates a component rigidly).
    """

    step: int
    operation: str
    components_before: int
    components_after: int
    wr_start: float
    wr_deformed: float
    wr_after: float
    linking_after: list
    ledger: dict
    state: CurveSystem = field(repr=False)

    @property
    def delta_wr(self):
        return self.wr_after - self.wr_deformed


def _site_in(curve, gadget):
    return (find_edge(curve, gadget.u, gadget.v),
            find_edge(curve, gadget.v2, gadget.u2))


def _lk_table(system):
    k = len(system)
    out = [[0.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            out[i][j] = out[j][i] = linking_number_gauss(system[i], system[j])
    return out


def _self_step(number, curve, gadget):
    ia, ib = _site_in(curve, gadget)
    site = ReconnectionSite(ia, ib)
    deformed = juxtapose(curve, site, 0.0)
    wr_start = writhe(curve)
    wr_def = writhe(deformed)
    result = self_reconnect(deformed, site)
    _, led = self_reconnect_tubes(default_tube(deformed), site)
    return PathwayStep(number, "self", 1, 2, wr_start, wr_def,
                       writhe_system(result), _lk_table(result),
                       led.to_dict(), result)


def _pair_step(number, system, gadget):
    owner_a = owner_b = None
    for k, c in enumerate(system):
        try:
            find_edge(c, gadget.u, gadget.v)
            owner_a = k
        except KeyError:
            pass
        try:
            find_edge(c, gadget.v2, gadget.u2)
            owner_b = k
        except KeyError:
            pass
    a, b = system[owner_a], system[owner_b]
    site = ReconnectionSite(find_edge(a, gadget.u, gadget.v),
                            find_edge(b, gadget.v2, gadget.u2))
    wr_start = writhe_system(system)
    joined = reconnect(a, b, site)
    _, led = reconnect_tubes(default_tube(a), default_tube(b), site)
    shift = align_for_reconnection(a, b, site).translation
    after = CurveSystem((joined,))
    return PathwayStep(number, "pair", 2, 1, wr_start, wr_start,
                       writhe(joined), [[0.0]], led.to_dict(), after), shift


def _shifted(gadget, shift, which):
    """Gadget coordinates after the strand ``which`` moved by ``shift``."""
    def mv(p):
        return tuple(float(x) for x in np.asarray(p) + shift)
    if which == "first":
        return type(gadget)(mv(gadget.u), mv(gadget.v), gadget.u2, gadget.v2)
    return type(gadget)(gadget.u, gadget.v, mv(gadget.u2), mv(gadget.v2))


def run_pathway(gap=0.2):
    """Run the three reconnections.

    Returns
    -------
    initial : PolygonalCurve
    steps : list of PathwayStep
    """
    curve, gadgets = trefoil_pathway_curve(gap)
    s1 = _self_step(1, curve, gadgets[0])
    s2, shift = _pair_step(2, s1.state, gadgets[1])
    # The component moved in step 2 carries the upper strand of the last
    # block when that strand sits in the second curve of the pair.
    g2 = gadgets[2]
    joined = s2.state[0]
    for cand in (g2, _shifted(g2, shift, "first"),
                 _shifted(g2, shift, "second")):
        try:
            _site_in(joined, cand)
            g2 = cand
            break
        except KeyError:
            continue
    s3 = _self_step(3, joined, g2)
    return curve, [s1, s2, s3]


def traced_frame_writhes(nu=(0.0, 0.0, 1.0)):
    """Directional writhe of each traced frame seen from ``+nu``."""
    return [(name, directional_writhe(system, nu).directional_writhe)
            for name, system in traced_frames()]
