"""Writhe, twist and helicity bookkeeping for polygonal flux tubes under
reconnection."""

from .curves import (
    CurveSystem,
    FluxTube,
    PolygonalCurve,
    Ribbon,
    frenet_ribbon,
    make_circle,
    make_hopf_link,
    make_random_closed_polygon,
    make_random_planar_polygon,
    make_torus_knot,
    make_torus_link,
    parallel_transport_frame,
    resample,
    rotate,
    translate,
    uniform_twist_ribbon,
)
from .errors import *  # noqa: F401,F403
from .invariants import (
    directional_writhe,
    edge_pair_solid_angle,
    helicity_pair,
    helicity_single,
    intrinsic_twist,
    linking_number_gauss,
    linking_number_projection,
    self_linking,
    total_torsion,
    twist,
    writhe,
    writhe_monte_carlo,
    writhe_system,
)

__version__ = "0.1.0"
