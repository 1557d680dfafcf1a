"""Transverse-wavevector mode implementation for the spin-wave memory simulator.

Spin waves and the photons they are read out into are labelled by transverse
wavevectors K = (kx, ky). Every mode used by the beamsplitter-network model is a
normalised Gaussian in wavevector space,

    u(k) = exp(-|k - K|^2 / (4 sigma^2)) / (sqrt(2 pi) sigma),

so that two modes of equal width displaced by dK overlap with the real, positive
amplitude tau = exp(-|dK|^2 / (8 sigma^2)). A displaced mode splits into its
projection on the proper mode and a unit-norm orthogonal complement, which is how
the network model builds the rb_perp / ra_perp modes.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.config import GRID_HALF_WIDTH_SIGMA, GRID_POINTS
from utils.errors import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransverseWavevector:
    """A transverse wavevector in rad/mm."""
    kx: float = 0.0
    ky: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.kx) and math.isfinite(self.ky)):
            raise DomainError(f"wavevector components must be finite, got ({self.kx}, {self.ky})")

    def __add__(self, other: 'TransverseWavevector') -> 'TransverseWavevector':
        return TransverseWavevector(self.kx + other.kx, self.ky + other.ky)

    def __sub__(self, other: 'TransverseWavevector') -> 'TransverseWavevector':
        return TransverseWavevector(self.kx - other.kx, self.ky - other.ky)

    def __neg__(self) -> 'TransverseWavevector':
        return TransverseWavevector(-self.kx, -self.ky)

    def norm(self) -> float:
        return math.hypot(self.kx, self.ky)


@dataclass(frozen=True)
class GaussianMode:
    """
    Normalised Gaussian transverse mode.

    Attributes:
        center: Mode centre in wavevector space
        sigma: Mode field radius in rad/mm
    """
    center: TransverseWavevector
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"mode field radius must be positive, got sigma={self.sigma}")

    def shifted(self, shift: TransverseWavevector) -> 'GaussianMode':
        return GaussianMode(self.center + shift, self.sigma)

    def amplitude(self, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
        """Evaluate the normalised mode function on (broadcastable) wavevector arrays."""
        r2 = (kx - self.center.kx) ** 2 + (ky - self.center.ky) ** 2
        return np.exp(-r2 / (4 * self.sigma ** 2)) / (math.sqrt(2 * math.pi) * self.sigma)


@dataclass(frozen=True)
class WavevectorGrid:
    """Uniform rectangular sampling grid used to validate the analytic overlaps."""
    kx: np.ndarray
    ky: np.ndarray

    @classmethod
    def around(cls, a: GaussianMode, b: GaussianMode, points: int = GRID_POINTS,
               half_width_sigma: float = GRID_HALF_WIDTH_SIGMA) -> 'WavevectorGrid':
        """
        Build a square grid centred between two modes.

        The half width is half_width_sigma * sigma plus half the centre separation,
        so both modes are covered to the same depth of their tails.
        """
        sigma = max(a.sigma, b.sigma)
        mid_x = 0.5 * (a.center.kx + b.center.kx)
        mid_y = 0.5 * (a.center.ky + b.center.ky)
        half = half_width_sigma * sigma + 0.5 * (a.center - b.center).norm()
        kx = np.linspace(mid_x - half, mid_x + half, points)
        ky = np.linspace(mid_y - half, mid_y + half, points)
        return cls(kx, ky)

    @property
    def cell_area(self) -> float:
        return float((self.kx[1] - self.kx[0]) * (self.ky[1] - self.ky[0]))

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.kx, self.ky, indexing='xy')

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Discrete <f|g> over the grid."""
        return complex(np.vdot(f, g) * self.cell_area)


def _require_same_sigma(a: GaussianMode, b: GaussianMode):
    if not math.isclose(a.sigma, b.sigma, rel_tol=1e-12):
        raise DomainError(f"overlaps need equal mode radii, got {a.sigma} and {b.sigma}")


def overlap(a: GaussianMode, b: GaussianMode) -> complex:
    """
    Analytic overlap <a|b> of two equal-width Gaussian modes.

    Args:
        a: First mode
        b: Second mode

    Returns:
        tau as a complex number with zero imaginary part

    Raises:
        DomainError: if the mode radii differ
    """
    _require_same_sigma(a, b)
    dk2 = (a.center.kx - b.center.kx) ** 2 + (a.center.ky - b.center.ky) ** 2
    return complex(math.exp(-dk2 / (8 * a.sigma ** 2)), 0.0)


def overlap_quadrature(a: GaussianMode, b: GaussianMode, grid: WavevectorGrid = None) -> complex:
    """Overlap <a|b> by summation on a sampled grid."""
    _require_same_sigma(a, b)
    if grid is None:
        grid = WavevectorGrid.around(a, b)
    kx, ky = grid.mesh()
    return grid.inner(a.amplitude(kx, ky), b.amplitude(kx, ky))


@dataclass(frozen=True)
class SampledModePair:
    proper: np.ndarray
    orthogonal: np.ndarray
    shifted: np.ndarray
    tau: complex


@dataclass(frozen=True)
class ModePair:
    """
    A mode and its displaced copy written in the basis (proper, orthogonal).

    shifted = tau * proper + sqrt(1 - tau^2) * orthogonal

    Attributes:
        proper: The reference mode
        shift: Displacement of the second mode
        tau: Real overlap of proper and shifted mode
        axis: Unit vector of the Hermite-Gauss convention used for a zero shift
    """
    proper: GaussianMode
    shift: TransverseWavevector
    tau: float
    axis: Tuple[float, float] = (1.0, 0.0)

    @property
    def shifted(self) -> GaussianMode:
        return self.proper.shifted(self.shift)

    @property
    def orthogonal_weight(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.tau ** 2))

    def orthogonal(self, kx: np.ndarray, ky: np.ndarray) -> np.ndarray:
        """Evaluate the unit-norm complement of the proper mode spanning the shifted mode."""
        u_p = self.proper.amplitude(kx, ky)
        if self.tau >= 1.0:
            ax, ay = self.axis
            proj = ((kx - self.proper.center.kx) * ax + (ky - self.proper.center.ky) * ay) / self.proper.sigma
            return proj * u_p
        u_s = self.shifted.amplitude(kx, ky)
        return (u_s - self.tau * u_p) / self.orthogonal_weight

    def sample(self, grid: WavevectorGrid = None) -> SampledModePair:
        """
        Sample the pair and build the orthogonal mode by Gram-Schmidt on the grid.

        Args:
            grid: Sampling grid, built around both modes when omitted

        Returns:
            SampledModePair with the numerical overlap
        """
        if grid is None:
            grid = WavevectorGrid.around(self.proper, self.shifted)
        kx, ky = grid.mesh()
        u_p = self.proper.amplitude(kx, ky)
        u_s = self.shifted.amplitude(kx, ky)
        tau = grid.inner(u_p, u_s)
        rest = u_s - tau * u_p
        norm = math.sqrt(abs(grid.inner(rest, rest)))
        if norm < 1e-12:
            orth = self.orthogonal(kx, ky)
            orth = orth / math.sqrt(abs(grid.inner(orth, orth)))
        else:
            orth = rest / norm
        logger.debug("sampled mode pair on %dx%d grid, tau=%.12f", len(grid.kx), len(grid.ky), tau.real)
        return SampledModePair(u_p, orth, u_s, tau)


def make_mode_pair(m: GaussianMode, shift: TransverseWavevector) -> ModePair:
    """
    Decompose the displaced copy of m into proper and orthogonal parts.

    Args:
        m: Proper mode
        shift: Displacement of the second mode

    Returns:
        ModePair with tau = overlap(m, shifted). A zero shift uses the first
        Hermite-Gauss mode along x as the orthogonal mode.
    """
    tau = overlap(m, m.shifted(shift)).real
    norm = shift.norm()
    axis = (shift.kx / norm, shift.ky / norm) if norm > 0 else (1.0, 0.0)
    return ModePair(m, shift, tau, axis)
