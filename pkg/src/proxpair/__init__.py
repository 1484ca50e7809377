"""proxpair: certified metric computations for convex pairs.

Distances, diameters, restricted Chebyshev radii, proximal cores,
normal-structure estimates and best-proximity-pair solves for pairs of
convex bodies in finite-dimensional weighted p-norm spaces.  Every reported
quantity carries a certificate (an optimality gap or an exact method tag);
suprema over infinite families are reported as certified sampled lower
bounds, never as claimed exact values.
"""

from .norms import (
    DimensionMismatch,
    NormSpec,
    StrictConvexityVerdict,
    dual_maximizer,
    dual_norm,
    is_strictly_convex,
    norm,
)
from .bodies import (
    Ball,
    Body,
    BodyPair,
    Polytope,
    Translate,
    TranslateOffset,
    UnsupportedBody,
    contains,
    convex_hull,
    dist_to_body,
    sample,
    support,
    translate_offset,
)
from .metrics import (
    DiameterResult,
    DistanceResult,
    PairMetrics,
    ProximalCore,
    RadiusResult,
    SemisharpVerdict,
    UCWitness,
    UnresolvableMate,
    analyze_pair,
    pair_diameter,
    pair_distance,
    point_radius,
    property_uc_falsify,
    proximal_core,
    pythagorean_residual,
    restricted_radius,
    semisharp_check,
)
from ._opt import Certificate, SolverBudgetExceeded

__version__ = "0.1.0"
