"""Planar receive array: lattice geometry, 3GPP element pattern, activation
masks, steering weights, and array-factor evaluation.

Conventions
-----------
A direction is an (elevation, azimuth) pair ``(theta, psi)`` in degrees with
theta in [-90, 90] and psi in [-180, 180).  The unit propagation vector is

    v(theta, psi) = [cos(theta) sin(psi), sin(theta), cos(theta) cos(psi)]

so boresight (0, 0) points along +z, azimuth tilts the direction toward the
first lattice axis (x) and elevation toward the second (y).  The wave vector
is k = (2 pi / lambda) v.  Elements sit on a centered rectangular lattice in
the z = 0 plane: element (m, n) is at

    ((m - (rows-1)/2) s lambda, (n - (cols-1)/2) s lambda, 0)

for a pitch of s wavelengths.  Angles cross this API in degrees and are
converted to radians internally; dB values are power gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Exact pattern nulls would give -inf dB; clamp the normalized array power
# at 1e-25 (-250 dB) so downstream arithmetic stays total.
AF_POWER_FLOOR = 1e-25


class DegenerateMaskError(ValueError):
    """Raised when a gain evaluation is attempted with no active elements."""


@dataclass(frozen=True)
class Direction:
    """Arrival/steering direction: elevation and azimuth in degrees."""

    theta: float
    psi: float

    def __post_init__(self):
        if not -90.0 <= self.theta <= 90.0:
            raise ValueError(f"theta must be in [-90, 90], got {self.theta}")
        if not -180.0 <= self.psi < 180.0:
            raise ValueError(f"psi must be in [-180, 180), got {self.psi}")


@dataclass(frozen=True)
class PlanarArrayGeometry:
    """Centered rectangular lattice of antenna elements in the z = 0 plane."""

    rows: int
    cols: int
    spacing: float = 0.5  # element pitch in carrier wavelengths
    carrier_frequency: float = 28e9  # Hz

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    def row_offsets(self) -> np.ndarray:
        """x coordinates (meters) of the lattice rows, centered on the origin."""
        pitch = self.spacing * self.wavelength
        return (np.arange(self.rows) - (self.rows - 1) / 2.0) * pitch

    def col_offsets(self) -> np.ndarray:
        """y coordinates (meters) of the lattice columns."""
        pitch = self.spacing * self.wavelength
        return (np.arange(self.cols) - (self.cols - 1) / 2.0) * pitch

    def element_positions(self) -> np.ndarray:
        """(rows*cols, 3) element positions; centroid is the origin."""
        x, y = np.meshgrid(self.row_offsets(), self.col_offsets(), indexing="ij")
        return np.column_stack([x.ravel(), y.ravel(), np.zeros(self.size)])


@dataclass(frozen=True)
class ElementPattern:
    """3GPP single-element gain pattern parameters (dB / dBi / degrees)."""

    theta_3db: float = 65.0  # total vertical 3 dB beamwidth
    psi_3db: float = 65.0  # total horizontal 3 dB beamwidth
    sl_v: float = 30.0  # vertical side-lobe limit
    a_m: float = 30.0  # front-back ratio
    g_max: float = 8.0  # peak gain, dBi

    def __post_init__(self):
        if self.theta_3db <= 0 or self.psi_3db <= 0:
            raise ValueError("3 dB beamwidths must be positive")
        if self.sl_v <= 0 or self.a_m <= 0:
            raise ValueError("sl_v and a_m must be positive")


class ActivationMask:
    """Boolean on/off grid over the array elements.

    The grid is frozen after construction; masks are safe to share.
    """

    def __init__(self, grid):
        arr = np.ascontiguousarray(grid, dtype=bool)
        if arr.ndim != 2:
            raise ValueError("mask grid must be 2-D")
        arr.setflags(write=False)
        self._grid = arr

    @classmethod
    def full(cls, rows: int, cols: int) -> "ActivationMask":
        return cls(np.ones((rows, cols), dtype=bool))

    @property
    def grid(self) -> np.ndarray:
        return self._grid

    @property
    def shape(self) -> tuple[int, int]:
        return self._grid.shape

    @property
    def active_count(self) -> int:
        return int(self._grid.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, ActivationMask):
            return NotImplemented
        return bool(np.array_equal(self._grid, other._grid))

    def __repr__(self) -> str:
        return f"ActivationMask({self.shape[0]}x{self.shape[1]}, active={self.active_count})"

    def ascii_art(self) -> str:
        """Render the mask as a '#'/'.' grid, one text row per lattice row."""
        return "\n".join("".join("#" if v else "." for v in row) for row in self._grid)


def direction_cosines(theta_deg, psi_deg):
    """In-plane components (v_x, v_y) of the unit propagation vector."""
    t = np.radians(theta_deg)
    p = np.radians(psi_deg)
    return np.cos(t) * np.sin(p), np.sin(t)


def element_gain_db(pattern: ElementPattern, theta_deg, psi_deg):
    """3GPP element power gain in dB, vectorized over angle arrays."""
    att_v = np.minimum(12.0 * (np.asarray(theta_deg) / pattern.theta_3db) ** 2, pattern.sl_v)
    att_h = np.minimum(12.0 * (np.asarray(psi_deg) / pattern.psi_3db) ** 2, pattern.a_m)
    return pattern.g_max - np.minimum(att_v + att_h, pattern.a_m)


def element_gain(pattern: ElementPattern, direction: Direction) -> float:
    """Per-element power gain (dB) toward ``direction``."""
    return float(element_gain_db(pattern, direction.theta, direction.psi))


def _check_mask(geom: PlanarArrayGeometry, mask: ActivationMask) -> None:
    if mask.shape != (geom.rows, geom.cols):
        raise ValueError(f"mask shape {mask.shape} does not match array {geom.rows}x{geom.cols}")
    if mask.active_count < 1:
        raise DegenerateMaskError("activation mask has no active elements (degenerate beam)")


def steering_factors(geom: PlanarArrayGeometry, steer: Direction):
    """Separable steering phase factors (exp(+j k . d) split per lattice axis)."""
    k0 = 2.0 * np.pi / geom.wavelength
    vx, vy = direction_cosines(steer.theta, steer.psi)
    wx = np.exp(1j * k0 * vx * geom.row_offsets())
    wy = np.exp(1j * k0 * vy * geom.col_offsets())
    return wx, wy


def steering_weights(geom: PlanarArrayGeometry, steer: Direction) -> np.ndarray:
    """Unit-magnitude conjugate-phase weights, shape (rows, cols).

    With these weights the array factor at the steer direction is real,
    positive, and equal to the number of active elements.
    """
    wx, wy = steering_factors(geom, steer)
    return np.outer(wx, wy)


def array_factor(
    geom: PlanarArrayGeometry,
    mask: ActivationMask,
    steer: Direction,
    eval_dir: Direction,
) -> complex:
    """Complex array factor of the masked, steered array toward ``eval_dir``."""
    _check_mask(geom, mask)
    k0 = 2.0 * np.pi / geom.wavelength
    vx, vy = direction_cosines(eval_dir.theta, eval_dir.psi)
    ex = np.exp(-1j * k0 * vx * geom.row_offsets())
    ey = np.exp(-1j * k0 * vy * geom.col_offsets())
    wx, wy = steering_factors(geom, steer)
    return complex((wx * ex) @ mask.grid @ (wy * ey))


def receive_gain(
    geom: PlanarArrayGeometry,
    pattern: ElementPattern,
    mask: ActivationMask,
    steer: Direction,
    eval_dir: Direction,
) -> float:
    """Receive power gain in dB: normalized array gain plus element gain.

    The array term is |AF|^2 / N_active so the peak power gain equals the
    active element count; exact nulls return the -250 dB floor instead of
    -inf.
    """
    af = array_factor(geom, mask, steer, eval_dir)
    norm = max(abs(af) ** 2 / mask.active_count, AF_POWER_FLOOR)
    return 10.0 * np.log10(norm) + element_gain(pattern, eval_dir)


def _phase_table(u: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """exp(-1j * u[:, None] * offsets[None, :]) for a uniform offset lattice.

    Uses one exponential per sample plus cumulative products across columns,
    which is substantially cheaper than a full outer exp.
    """
    k = offsets.size
    out = np.empty((u.size, k), dtype=np.complex128)
    out[:, 0] = np.exp(-1j * (u * offsets[0]))
    if k > 1:
        step = np.exp(-1j * (u * (offsets[1] - offsets[0])))
        for m in range(1, k):
            np.multiply(out[:, m - 1], step, out=out[:, m])
    return out


def _phase_rows(u: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Transpose layout of _phase_table: one contiguous row per offset."""
    k = offsets.size
    out = np.empty((k, u.size), dtype=np.complex128)
    np.exp(-1j * (u * offsets[0]), out=out[0])
    if k > 1:
        step = np.exp(-1j * (u * (offsets[1] - offsets[0])))
        for m in range(1, k):
            np.multiply(out[m - 1], step, out=out[m])
    return out


def af_power_points(
    geom: PlanarArrayGeometry,
    mask: ActivationMask,
    steer: Direction,
    theta_deg: np.ndarray,
    psi_deg: np.ndarray,
) -> np.ndarray:
    """|AF|^2 at arbitrary (theta, psi) pairs (flat arrays, degrees)."""
    _check_mask(geom, mask)
    k0 = 2.0 * np.pi / geom.wavelength
    vx, vy = direction_cosines(theta_deg, psi_deg)
    tx = _phase_table(k0 * np.atleast_1d(vx), geom.row_offsets())
    ty = _phase_table(k0 * np.atleast_1d(vy), geom.col_offsets())
    wx, wy = steering_factors(geom, steer)
    weighted = mask.grid * np.outer(wx, wy)
    af = np.einsum("sm,mn,sn->s", tx, weighted, ty, optimize=True)
    return np.abs(af) ** 2


def af_power_map(
    geom: PlanarArrayGeometry,
    mask: ActivationMask,
    steer: Direction,
    theta_deg: np.ndarray,
    psi_deg: np.ndarray,
) -> np.ndarray:
    """|AF|^2 on the product grid theta x psi, shape (len(theta), len(psi))."""
    _check_mask(geom, mask)
    tables = GridPhaseTables(geom, steer, np.asarray(theta_deg, float), np.asarray(psi_deg, float))
    return np.abs(tables.af_for_mask(mask.grid)) ** 2


class GridPhaseTables:
    """Precomputed per-element phase factors on a theta x psi product grid.

    Supports incremental accumulation of the array factor one element at a
    time, which makes nested mask families cheap to evaluate.  Tables are
    laid out with one contiguous grid-sized row per lattice row/column.
    """

    def __init__(self, geom: PlanarArrayGeometry, steer: Direction, theta_deg, psi_deg):
        theta_deg = np.asarray(theta_deg, dtype=float)
        psi_deg = np.asarray(psi_deg, dtype=float)
        k0 = 2.0 * np.pi / geom.wavelength
        ct = np.cos(np.radians(theta_deg))
        st = np.sin(np.radians(theta_deg))
        sp = np.sin(np.radians(psi_deg))
        ux = np.multiply.outer(ct, sp).ravel()  # v_x over the grid, rank-1 in (i, j)
        self.shape = (theta_deg.size, psi_deg.size)
        self._tx = _phase_rows(k0 * ux, geom.row_offsets())  # (rows, n_cells)
        self._ty = _phase_rows(k0 * st, geom.col_offsets())  # (cols, n_theta)
        wx, wy = steering_factors(geom, steer)
        self._wx = wx
        self._wy = wy

    def add_element(self, af_grid: np.ndarray, m: int, n: int) -> None:
        """Accumulate the contribution of element (m, n) into ``af_grid`` in place."""
        af_grid += (
            (self._wx[m] * self._wy[n])
            * self._tx[m].reshape(self.shape)
            * self._ty[n][:, None]
        )

    def af_for_mask(self, grid: np.ndarray) -> np.ndarray:
        """Array factor of a whole mask over the grid in one pass."""
        weighted = grid * np.outer(self._wx, self._wy)
        per_row = weighted @ self._ty  # (rows, n_theta)
        af = np.zeros(self.shape, dtype=np.complex128)
        for m in range(weighted.shape[0]):
            af += self._tx[m].reshape(self.shape) * per_row[m][:, None]
        return af
