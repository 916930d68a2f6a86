"""Bivariate Gaussian model of the direction-of-arrival estimation error.

The error lives in the (theta, psi) angle plane in degrees; its 2x2
covariance is parameterized by the marginal standard deviations and the
correlation.  The eigendecomposition of the covariance yields the
confidence ellipse that drives the beamwidth adaptation: semi-axes are
k * sqrt(eigenvalue) with k = sqrt(-2 ln(1 - p)) at confidence level p,
and the orientation is the angle of the major eigenvector measured from
the azimuth axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AngularCovariance:
    """DoA error covariance: sigmas in degrees, correlation in (-1, 1)."""

    sigma_theta: float
    sigma_psi: float
    rho: float = 0.0

    def __post_init__(self):
        if self.sigma_theta <= 0 or self.sigma_psi <= 0:
            raise ValueError("standard deviations must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly inside (-1, 1)")

    @property
    def matrix(self) -> np.ndarray:
        """2x2 covariance in degrees^2, ordered [theta, psi]."""
        c = self.rho * self.sigma_theta * self.sigma_psi
        return np.array(
            [[self.sigma_theta**2, c], [c, self.sigma_psi**2]]
        )

    @classmethod
    def from_matrix(cls, matrix) -> "AngularCovariance":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (2, 2) or abs(m[0, 1] - m[1, 0]) > 1e-12 * max(1.0, abs(m[0, 1])):
            raise ValueError("covariance must be a symmetric 2x2 matrix")
        st, sp = np.sqrt(m[0, 0]), np.sqrt(m[1, 1])
        return cls(float(st), float(sp), float(m[0, 1] / (st * sp)))

    @classmethod
    def from_eigen(cls, lam_major: float, lam_minor: float, orientation_deg: float) -> "AngularCovariance":
        """Covariance with given eigenvalues (deg^2) and major-axis angle
        from the azimuth axis (degrees)."""
        if lam_major < lam_minor or lam_minor <= 0:
            raise ValueError("eigenvalues must satisfy lam_major >= lam_minor > 0")
        phi = np.radians(orientation_deg)
        s, c = np.sin(phi), np.cos(phi)
        # major eigenvector in (theta, psi) coordinates is (sin phi, cos phi)
        m = np.array(
            [
                [lam_major * s * s + lam_minor * c * c, (lam_major - lam_minor) * s * c],
                [(lam_major - lam_minor) * s * c, lam_major * c * c + lam_minor * s * s],
            ]
        )
        return cls.from_matrix(m)


@dataclass(frozen=True)
class ConfidenceEllipse:
    """Level set of the error distribution holding ``confidence_level`` mass."""

    orientation_phi: float  # degrees in (-90, 90], major axis from the azimuth axis
    semi_major: float  # degrees
    semi_minor: float  # degrees
    confidence_level: float

    def __post_init__(self):
        if not self.semi_major >= self.semi_minor > 0:
            raise ValueError("semi axes must satisfy semi_major >= semi_minor > 0")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence_level must lie in (0, 1)")
        if not -90.0 < self.orientation_phi <= 90.0:
            raise ValueError("orientation must lie in (-90, 90]")


def _check_positive_definite(matrix: np.ndarray) -> None:
    if matrix[0, 0] <= 0 or np.linalg.det(matrix) <= 0:
        raise ValueError("covariance matrix is not positive definite")


def eigendecompose(cov: AngularCovariance):
    """Eigenvalues (descending) and orthonormal eigenvectors (as columns)."""
    m = cov.matrix
    _check_positive_definite(m)
    vals, vecs = np.linalg.eigh(m)  # ascending
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def orientation_from_eigenvector(vec: np.ndarray) -> float:
    """Angle of an axis direction from the azimuth axis, folded to (-90, 90]."""
    phi = np.degrees(np.arctan2(vec[0], vec[1]))  # components are (theta, psi)
    phi = phi - 180.0 * np.floor((phi + 90.0) / 180.0)
    if phi == -90.0:
        phi = 90.0
    return float(phi)


def mahalanobis_scale(confidence_level: float) -> float:
    """k such that the level-k ellipse of a bivariate normal holds mass p."""
    if not 0.0 < confidence_level < 1.0:
        raise ValueError("confidence_level must lie in (0, 1)")
    return float(np.sqrt(-2.0 * np.log(1.0 - confidence_level)))


def confidence_ellipse(cov: AngularCovariance, confidence_level: float = 0.95) -> ConfidenceEllipse:
    """Confidence ellipse of the error distribution at the given level."""
    vals, vecs = eigendecompose(cov)
    k = mahalanobis_scale(confidence_level)
    if np.isclose(vals[0], vals[1], rtol=1e-12, atol=0.0):
        phi = 0.0  # circular case: orientation is arbitrary
    else:
        phi = orientation_from_eigenvector(vecs[:, 0])
    return ConfidenceEllipse(
        orientation_phi=phi,
        semi_major=float(k * np.sqrt(vals[0])),
        semi_minor=float(k * np.sqrt(vals[1])),
        confidence_level=confidence_level,
    )


def gaussian_pdf(cov: AngularCovariance, mean, x) -> float:
    """Bivariate normal density (per degree^2) at direction ``x``.

    ``mean`` and ``x`` provide .theta/.psi attributes (e.g. Direction).
    """
    m = cov.matrix
    _check_positive_definite(m)
    det = np.linalg.det(m)
    dt = x.theta - mean.theta
    dp = x.psi - mean.psi
    q = (m[1, 1] * dt * dt - 2.0 * m[0, 1] * dt * dp + m[0, 0] * dp * dp) / det
    return float(np.exp(-0.5 * q) / (2.0 * np.pi * np.sqrt(det)))


def pdf_grid(cov: AngularCovariance, mean_theta: float, mean_psi: float,
             theta_deg: np.ndarray, psi_deg: np.ndarray) -> np.ndarray:
    """Density on the product grid theta x psi, shape (len(theta), len(psi))."""
    m = cov.matrix
    _check_positive_definite(m)
    det = np.linalg.det(m)
    dt = (np.asarray(theta_deg, dtype=float) - mean_theta)[:, None]
    dp = (np.asarray(psi_deg, dtype=float) - mean_psi)[None, :]
    q = (m[1, 1] * dt * dt - 2.0 * m[0, 1] * dt * dp + m[0, 0] * dp * dp) / det
    return np.exp(-0.5 * q) / (2.0 * np.pi * np.sqrt(det))
