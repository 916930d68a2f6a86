"""Beamwidth adaptation by selective element deactivation.

The confidence ellipse of the DoA error is converted into an activation
ellipse over the element lattice.  The 3 dB beamwidth along a lattice axis
is 0.886 / (N s cos beta) radians for an aperture of N elements at pitch s,
so a confidence full width w maps to the per-axis semi-count

    0.886 / (2 * w_rad * s * cos beta).

Diffraction swaps the roles of the axes: a wide aperture axis produces a
narrow beam axis.  The activation ellipse is therefore oriented with its
long axis perpendicular (in index space) to the confidence major axis, so
that the resulting beam footprint overlaps the confidence ellipse; the wide
confidence axis gets the small element count.

Feasible and optimal active-antenna counts are searched over the nested
one-parameter family of masks obtained by scaling the activation ellipse at
fixed orientation and aspect ratio, from the smallest symmetric mask up to
the full grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .array import (
    AF_POWER_FLOOR,
    ActivationMask,
    Direction,
    ElementPattern,
    PlanarArrayGeometry,
    _phase_rows,
    element_gain_db,
    steering_factors,
)
from .linkbudget import LinkBudget, required_gain_threshold
from .outage import IntegrationGrid, g0_linear, probability_weights
from .uncertainty import AngularCovariance, ConfidenceEllipse, confidence_ellipse, mahalanobis_scale

GENERALIZED = "generalized"
BASELINE = "axis_aligned_baseline"

BEAMWIDTH_FACTOR = 0.886  # 3 dB width of a uniform aperture, in lambda/(N d)


@dataclass(frozen=True)
class AdaptationPolicy:
    """Which activation-ellipse construction to use, and at what confidence."""

    kind: str = GENERALIZED
    confidence_level: float = 0.95
    steer_offset_beta: float = 0.0  # beam elevation from boresight, degrees

    def __post_init__(self):
        if self.kind not in (GENERALIZED, BASELINE):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence_level must lie in (0, 1)")
        if not abs(self.steer_offset_beta) < 90.0:
            raise ValueError("steer offset must satisfy |beta| < 90 degrees")


@dataclass(frozen=True)
class AntennaEllipse:
    """Activation ellipse over centered element indices.

    ``m_a`` and ``n_a`` are the semi-axes in element counts along the ellipse
    major and minor directions, ``phi`` the major-axis angle from the first
    (row) index axis, ``scale`` a uniform shrink factor.
    """

    m_a: float
    n_a: float
    phi: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.m_a >= self.n_a > 0:
            raise ValueError("semi-axes must satisfy m_a >= n_a > 0")
        if not 0.0 < self.scale <= 1.0:
            raise ValueError("scale must lie in (0, 1]")
        if not -90.0 < self.phi <= 90.0:
            raise ValueError("phi must lie in (-90, 90]")


def _fold_angle(phi: float) -> float:
    """Fold an axis angle into (-90, 90] degrees."""
    out = phi - 180.0 * np.floor((phi + 90.0) / 180.0)
    return 90.0 if out == -90.0 else float(out)


def _semi_count(full_width_deg: float, geom: PlanarArrayGeometry, beta_deg: float) -> float:
    """Per-axis aperture semi-extent (element counts) for a beam full width."""
    w = np.radians(full_width_deg)
    return BEAMWIDTH_FACTOR / (2.0 * w * geom.spacing * np.cos(np.radians(beta_deg)))


def required_counts(
    ellipse: ConfidenceEllipse, geom: PlanarArrayGeometry, beta_deg: float = 0.0
) -> tuple[int, int]:
    """Semi-axis element counts (m_a, n_a) matching a confidence ellipse.

    The wider confidence axis maps to the smaller count; both are clamped to
    [1, floor(dimension / 2)] so the result always fits the lattice.
    """
    upper = max(1, max(geom.rows, geom.cols) // 2)
    m_a = int(np.floor(_semi_count(2.0 * ellipse.semi_minor, geom, beta_deg)))
    n_a = int(np.floor(_semi_count(2.0 * ellipse.semi_major, geom, beta_deg)))
    return min(max(m_a, 1), upper), min(max(n_a, 1), upper)


def _aperture_axes(
    width_major_deg: float,
    width_minor_deg: float,
    major_angle_deg: float,
    geom: PlanarArrayGeometry,
    beta_deg: float,
) -> tuple[float, float, float]:
    """Unclamped activation-ellipse axes for given confidence widths.

    Returns (m_ref, n_ref, phi): the long index-space semi-count, the short
    one, and the long axis angle, rotated 90 degrees from the confidence
    major axis so the beam footprint matches the confidence ellipse.
    """
    m_ref = _semi_count(width_minor_deg, geom, beta_deg)
    n_ref = _semi_count(width_major_deg, geom, beta_deg)
    if np.isclose(m_ref, n_ref, rtol=1e-12):
        return m_ref, n_ref, 0.0
    return m_ref, n_ref, _fold_angle(major_angle_deg + 90.0)


def generalized_ellipse(
    cov: AngularCovariance,
    confidence_level: float,
    geom: PlanarArrayGeometry,
    beta_deg: float = 0.0,
) -> AntennaEllipse:
    """Correlation-aware activation ellipse from the full covariance."""
    ce = confidence_ellipse(cov, confidence_level)
    _, _, phi = _aperture_axes(
        2.0 * ce.semi_major, 2.0 * ce.semi_minor, ce.orientation_phi, geom, beta_deg
    )
    m_a, n_a = required_counts(ce, geom, beta_deg)
    return AntennaEllipse(m_a=m_a, n_a=n_a, phi=phi if m_a > n_a else 0.0)


def baseline_ellipse(
    cov: AngularCovariance,
    confidence_level: float,
    geom: PlanarArrayGeometry,
    beta_deg: float = 0.0,
) -> AntennaEllipse:
    """Axis-aligned activation ellipse from the marginal deviations only.

    Ignores the correlation entirely: the confidence widths are k sigma per
    axis, which coincides with the generalized construction when rho = 0.
    """
    m_ref, n_ref, phi = _baseline_axes(cov, confidence_level, geom, beta_deg)
    upper = max(1, max(geom.rows, geom.cols) // 2)
    m_a = min(max(int(np.floor(m_ref)), 1), upper)
    n_a = min(max(int(np.floor(n_ref)), 1), upper)
    return AntennaEllipse(m_a=m_a, n_a=n_a, phi=phi if m_a > n_a else 0.0)


def _baseline_axes(cov, confidence_level, geom, beta_deg):
    k = mahalanobis_scale(confidence_level)
    w_theta = 2.0 * k * cov.sigma_theta  # confidence width along the theta axis (angle 90)
    w_psi = 2.0 * k * cov.sigma_psi  # along the psi axis (angle 0)
    if w_psi >= w_theta:
        return _aperture_axes(w_psi, w_theta, 0.0, geom, beta_deg)
    return _aperture_axes(w_theta, w_psi, 90.0, geom, beta_deg)


def _ellipse_radii(geom: PlanarArrayGeometry, m_ref: float, n_ref: float, phi_deg: float) -> np.ndarray:
    """Normalized elliptical radius of every element; active means radius <= 1."""
    cm = (np.arange(geom.rows) - (geom.rows - 1) / 2.0)[:, None]
    cn = (np.arange(geom.cols) - (geom.cols - 1) / 2.0)[None, :]
    phi = np.radians(phi_deg)
    along = (cm * np.cos(phi) + cn * np.sin(phi)) / m_ref
    across = (cm * np.sin(phi) - cn * np.cos(phi)) / n_ref
    return np.sqrt(along**2 + across**2)


def activation_mask(geom: PlanarArrayGeometry, ae: AntennaEllipse) -> ActivationMask:
    """Elements whose centered indices fall inside the (scaled) ellipse.

    Emitted masks are symmetric under 180-degree rotation.  An ellipse too
    small to contain any lattice point falls back to the innermost symmetric
    element group (flagged with a warning).
    """
    r = _ellipse_radii(geom, ae.scale * ae.m_a, ae.scale * ae.n_a, ae.phi)
    grid = r <= 1.0
    if not grid.any():
        warnings.warn("activation ellipse contains no elements; using innermost element pair")
        grid = r <= r.min()
    return ActivationMask(grid)


@dataclass(frozen=True)
class MaskFamily:
    """Nested masks from scaling one activation ellipse across the lattice."""

    geom: PlanarArrayGeometry
    m_ref: float
    n_ref: float
    phi: float

    def nested_order(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat element indices sorted by elliptical radius, plus the active
        count at every distinct mask (tie groups are activated together,
        which keeps every mask 180-degree symmetric)."""
        r = _ellipse_radii(self.geom, self.m_ref, self.n_ref, self.phi).ravel()
        order = np.argsort(r, kind="stable")
        sorted_r = r[order]
        group_ends = np.nonzero(np.diff(sorted_r))[0]
        counts = np.append(group_ends + 1, r.size)
        return order, counts

    def mask_for_count(self, count: int) -> ActivationMask:
        order, counts = self.nested_order()
        if count not in counts:
            raise ValueError(f"no mask with exactly {count} active elements in this family")
        grid = np.zeros(self.geom.size, dtype=bool)
        grid[order[:count]] = True
        return ActivationMask(grid.reshape(self.geom.rows, self.geom.cols))


def policy_family(
    geom: PlanarArrayGeometry, cov: AngularCovariance, policy: AdaptationPolicy
) -> MaskFamily:
    """The search family for a policy: fixed orientation and aspect ratio.

    Axes come from the unfloored beamwidth inversion so the family aspect is
    not quantized by the integer clamp in required_counts.
    """
    beta = policy.steer_offset_beta
    if policy.kind == GENERALIZED:
        ce = confidence_ellipse(cov, policy.confidence_level)
        m_ref, n_ref, phi = _aperture_axes(
            2.0 * ce.semi_major, 2.0 * ce.semi_minor, ce.orientation_phi, geom, beta
        )
    else:
        m_ref, n_ref, phi = _baseline_axes(cov, policy.confidence_level, geom, beta)
    return MaskFamily(geom=geom, m_ref=m_ref, n_ref=n_ref, phi=phi)


def family_outage_table(
    geom: PlanarArrayGeometry,
    pattern: ElementPattern,
    cov: AngularCovariance,
    family: MaskFamily,
    mean: Direction,
    grid: IntegrationGrid,
    g0_db: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Outage of every mask in the family at every gain threshold.

    Returns (counts, outage) with outage[i, j] the outage probability of the
    i-th nested mask at threshold g0_db[j].  The beam is steered at the mean
    DoA.  Masks are accumulated incrementally, so the whole family costs
    little more than one full-array evaluation.  Cells carrying less than
    1e-9 of the peak cell mass are treated as uncovered outright, which
    biases results by under 1e-7 and trims most of the square window.
    """
    g0_db = np.atleast_1d(np.asarray(g0_db, dtype=float))
    g0_lin = np.atleast_1d(g0_linear(g0_db))
    theta, psi, w = probability_weights(cov, mean, grid)
    w_flat = w.ravel()
    keep = np.nonzero(w_flat >= 1e-9 * w_flat.max())[0]
    w_kept = w_flat[keep]
    covered_max = float(w_kept.sum())
    i_idx, j_idx = np.divmod(keep, psi.size)

    k0 = 2.0 * np.pi / geom.wavelength
    ux = (np.cos(np.radians(theta))[:, None] * np.sin(np.radians(psi))[None, :]).ravel()[keep]
    vy = np.sin(np.radians(theta))[i_idx]
    tx = _phase_rows(k0 * ux, geom.row_offsets())  # (rows, n_kept)
    ty = _phase_rows(k0 * vy, geom.col_offsets())  # (cols, n_kept)
    wx, wy = steering_factors(geom, mean)
    eg = 10.0 ** (element_gain_db(pattern, theta[i_idx], psi[j_idx]) / 10.0)

    order, counts = family.nested_order()
    af = np.zeros(keep.size, dtype=np.complex128)
    outage = np.empty((counts.size, g0_lin.size))

    # Binning the gain field against the threshold lattice pays off only
    # when many thresholds are queried.
    use_bins = g0_lin.size > 16
    if use_bins:
        uniq, positions = np.unique(g0_lin, return_inverse=True)
        edges = np.concatenate(([-np.inf], uniq, [np.inf]))
    done = 0
    for i, count in enumerate(counts):
        for flat in order[done:count]:
            m, n = divmod(int(flat), geom.cols)
            af += (wx[m] * wy[n]) * tx[m] * ty[n]
        done = int(count)
        s = np.maximum((np.abs(af) ** 2) / count, AF_POWER_FLOOR) * eg
        if use_bins:
            mass, _ = np.histogram(s, bins=edges, weights=w_kept)
            below = np.cumsum(mass)  # mass strictly under each threshold
            outage[i] = 1.0 - covered_max + below[positions]
        else:
            for j, t in enumerate(g0_lin):
                outage[i, j] = 1.0 - float(np.sum(w_kept, where=s >= t))
    return counts, np.clip(outage, 0.0, 1.0)


def feasible_antenna_range(
    geom: PlanarArrayGeometry,
    pattern: ElementPattern,
    lb: LinkBudget,
    cov: AngularCovariance,
    policy: AdaptationPolicy,
    distance: float,
    outage_threshold: float,
    grid: IntegrationGrid,
) -> tuple[int, int] | None:
    """Minimum and maximum active counts meeting the outage threshold at
    ``distance``, or None when no mask in the family qualifies."""
    if not 0.0 < outage_threshold <= 1.0:
        raise ValueError("outage_threshold must lie in (0, 1]")
    g0 = required_gain_threshold(lb, distance)
    family = policy_family(geom, cov, policy)
    counts, outage = family_outage_table(geom, pattern, cov, family, grid.center, grid, g0)
    ok = counts[outage[:, 0] <= outage_threshold]
    if ok.size == 0:
        return None
    return int(ok.min()), int(ok.max())


def optimal_antenna_count(
    geom: PlanarArrayGeometry,
    pattern: ElementPattern,
    lb: LinkBudget,
    cov: AngularCovariance,
    policy: AdaptationPolicy,
    distance: float,
    grid: IntegrationGrid,
) -> tuple[int, float]:
    """Active count minimizing outage at ``distance`` and the outage achieved.

    Ties break toward fewer active antennas (power saving).  If no mask
    covers anything (threshold above every gain peak) the full array is
    returned with outage 1.
    """
    g0 = required_gain_threshold(lb, distance)
    family = policy_family(geom, cov, policy)
    counts, outage = family_outage_table(geom, pattern, cov, family, grid.center, grid, g0)
    return select_optimum(counts, outage[:, 0], geom.size)


def select_optimum(counts: np.ndarray, outage: np.ndarray, full_size: int) -> tuple[int, float]:
    """Argmin over a family outage column, ties toward fewer antennas."""
    best = int(np.argmin(outage))  # first minimum in ascending-count order
    if outage[best] >= 1.0:
        return full_size, 1.0  # saturated: nothing is covered, fall back to full array
    return int(counts[best]), float(outage[best])
