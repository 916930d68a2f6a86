"""Pose-aware beamwidth adaptation for 2-D planar receive arrays.

Shapes the receive beam of a planar array by deactivating elements so the
beam footprint matches the confidence ellipse of the direction-of-arrival
estimate, and evaluates the resulting misalignment outage probability over
distance, error correlation, and ellipse orientation.
"""

__version__ = "0.1.0"

from .adaptation import (
    BASELINE,
    GENERALIZED,
    AdaptationPolicy,
    AntennaEllipse,
    MaskFamily,
    activation_mask,
    baseline_ellipse,
    feasible_antenna_range,
    generalized_ellipse,
    optimal_antenna_count,
    policy_family,
    required_counts,
)
from .array import (
    ActivationMask,
    DegenerateMaskError,
    Direction,
    ElementPattern,
    PlanarArrayGeometry,
    array_factor,
    element_gain,
    receive_gain,
    steering_weights,
)
from .linkbudget import (
    LinkBudget,
    distance_for_gain_threshold,
    noise_power,
    received_power,
    required_gain_threshold,
)
from .outage import (
    IntegrationGrid,
    ellipse_region_outage,
    indicator,
    outage_probability,
    outage_probability_mc,
    uniform_gain_approx,
)
from .uncertainty import (
    AngularCovariance,
    ConfidenceEllipse,
    confidence_ellipse,
    eigendecompose,
    gaussian_pdf,
    mahalanobis_scale,
)

__all__ = [
    "__version__",
    "ActivationMask",
    "AdaptationPolicy",
    "AngularCovariance",
    "AntennaEllipse",
    "BASELINE",
    "ConfidenceEllipse",
    "DegenerateMaskError",
    "Direction",
    "ElementPattern",
    "GENERALIZED",
    "IntegrationGrid",
    "LinkBudget",
    "MaskFamily",
    "PlanarArrayGeometry",
    "activation_mask",
    "array_factor",
    "baseline_ellipse",
    "confidence_ellipse",
    "distance_for_gain_threshold",
    "eigendecompose",
    "element_gain",
    "ellipse_region_outage",
    "feasible_antenna_range",
    "gaussian_pdf",
    "generalized_ellipse",
    "indicator",
    "mahalanobis_scale",
    "noise_power",
    "optimal_antenna_count",
    "outage_probability",
    "outage_probability_mc",
    "policy_family",
    "received_power",
    "receive_gain",
    "required_counts",
    "required_gain_threshold",
    "steering_weights",
    "uniform_gain_approx",
]
