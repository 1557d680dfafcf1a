"""Atomic-physics model implementation for the spin-wave memory simulator.

Covers the analytic far-detuned ac Stark shifts of the two rubidium clock
states used to store spin waves, the accumulated phase of a Stark pulse, and
the longitudinal phase matching that limits the read-out of spin waves carrying
a transverse wavevector.

Units: angular frequencies in rad/s, wavevectors in rad/mm, lengths in mm,
intensities in mW/cm^2 (converted to W/m^2 internally).
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT, epsilon_0, hbar
from scipy.integrate import quad

from components.grating import DiffractionSpectrum
from utils.config import (A_HALF_RAD_PER_S, A_THREE_HALF_RAD_PER_S, DIPOLE_CM, FIELD_CONVENTION,
                          K_READ_RAD_PER_MM, POLE_GUARD_RAD_PER_S, SIGMA_PERP_MM, SIGMA_Z_MM,
                          STARK_TIME_S, WAVELENGTH_NM)
from utils.errors import DomainError, EvanescentError, PoleProximityError

logger = logging.getLogger(__name__)

# (coefficient, A_{0,1/2} multiplier, A_{1,3/2} multiplier): term c / (delta + x A0 + y A1)
_G_TERMS = ((5 / 24, 5 / 4, -11 / 4), (1 / 8, 5 / 4, -3 / 4))
_H_TERMS = ((1 / 40, -3 / 4, -1 / 4), (1 / 24, -3 / 4, -3 / 4), (4 / 15, -3 / 4, 9 / 4))


def hz_to_rad_per_s(f_hz: float) -> float:
    return 2 * math.pi * f_hz


def rad_per_s_to_hz(w: float) -> float:
    return w / (2 * math.pi)


def mw_per_cm2_to_w_per_m2(intensity: float) -> float:
    return intensity * 10.0


@dataclass(frozen=True)
class StarkParams:
    """
    ac Stark beam and atomic constants.

    Attributes:
        detuning: delta_S from the F=2 -> 5P3/2 centroid in rad/s
        intensity: Beam intensity in mW/cm^2
        time: Interaction time T in s
        dipole: Transition dipole matrix element in C m
        a_half: A_{0,1/2} in rad/s
        a_three_half: A_{1,3/2} in rad/s
        field_convention: 'rms' (E^2 = I/(eps0 c), the default) or 'peak' (E^2 = 2I/(eps0 c))
    """
    detuning: float
    intensity: float
    time: float = STARK_TIME_S
    dipole: float = DIPOLE_CM
    a_half: float = A_HALF_RAD_PER_S
    a_three_half: float = A_THREE_HALF_RAD_PER_S
    field_convention: str = FIELD_CONVENTION

    def __post_init__(self):
        if self.intensity < 0:
            raise DomainError(f"intensity must be non-negative, got {self.intensity}")
        if self.time < 0:
            raise DomainError(f"interaction time must be non-negative, got {self.time}")
        if self.field_convention not in ('rms', 'peak'):
            raise DomainError(f"field convention must be 'rms' or 'peak', got '{self.field_convention}'")

    def with_detuning(self, detuning: float) -> 'StarkParams':
        return StarkParams(detuning, self.intensity, self.time, self.dipole, self.a_half,
                           self.a_three_half, self.field_convention)

    def with_intensity(self, intensity: float) -> 'StarkParams':
        return StarkParams(self.detuning, intensity, self.time, self.dipole, self.a_half,
                           self.a_three_half, self.field_convention)


@dataclass(frozen=True)
class EnsembleGeometry:
    """Atomic cloud and read-out geometry (lengths in mm, wavevector in rad/mm)."""
    sigma_z: float = SIGMA_Z_MM
    sigma_perp: float = SIGMA_PERP_MM
    k_r: float = K_READ_RAD_PER_MM
    wavelength_nm: float = WAVELENGTH_NM

    def __post_init__(self):
        if min(self.sigma_z, self.sigma_perp, self.k_r, self.wavelength_nm) <= 0:
            raise DomainError("ensemble geometry parameters must all be positive")


def field_amplitude(s: StarkParams) -> float:
    """
    Electric field amplitude in V/m for the chosen convention.

    The default 'rms' convention gives E = sqrt(I/(eps0 c)), which is NOT the peak
    amplitude E = sqrt(2I/(eps0 c)); that literal form is selected with
    field_convention='peak' and doubles every light shift.
    """
    intensity = mw_per_cm2_to_w_per_m2(s.intensity)
    factor = 1.0 if s.field_convention == 'rms' else 2.0
    return math.sqrt(factor * intensity / (epsilon_0 * SPEED_OF_LIGHT))


def rabi_frequency(s: StarkParams) -> float:
    """Omega = E d / hbar in rad/s."""
    return field_amplitude(s) * s.dipole / hbar


def _poles(s: StarkParams, terms) -> List[float]:
    return [-(x * s.a_half + y * s.a_three_half) for _, x, y in terms]


def pole_detunings(s: StarkParams) -> List[float]:
    """Detunings (rad/s) at which one of the shift denominators vanishes."""
    return sorted(_poles(s, _G_TERMS) + _poles(s, _H_TERMS))


def _shift(s: StarkParams, terms) -> float:
    for pole in _poles(s, terms):
        if abs(s.detuning - pole) < POLE_GUARD_RAD_PER_S:
            raise PoleProximityError(f"detuning {rad_per_s_to_hz(s.detuning) / 1e9:.6f} GHz is within "
                                     f"{rad_per_s_to_hz(POLE_GUARD_RAD_PER_S) / 1e6:.1f} MHz of the pole at "
                                     f"{rad_per_s_to_hz(pole) / 1e9:.6f} GHz")
    omega = rabi_frequency(s)
    total = sum(coeff / (s.detuning + x * s.a_half + y * s.a_three_half) for coeff, x, y in terms)
    return omega ** 2 / 4 * total


def stark_shift_g(s: StarkParams) -> float:
    """Light shift of the |g> clock state in rad/s."""
    return _shift(s, _G_TERMS)


def stark_shift_h(s: StarkParams) -> float:
    """Light shift of the |h> clock state in rad/s."""
    return _shift(s, _H_TERMS)


def differential_shift(s: StarkParams) -> float:
    """Delta_S = shift_h - shift_g in rad/s."""
    return stark_shift_h(s) - stark_shift_g(s)


def stark_phase(s: StarkParams) -> float:
    """Phase Delta_S * T imprinted by the pulse, in rad."""
    return differential_shift(s) * s.time


def stark_sweep(detunings: Sequence[float], s: StarkParams) -> List[Tuple[float, float, float, float]]:
    """
    Rows (delta_S, shift_g, shift_h, Delta_S), all in rad/s; detunings inside a pole guard are skipped.
    """
    rows = []
    skipped = 0
    for delta in detunings:
        p = s.with_detuning(delta)
        try:
            g = stark_shift_g(p)
            h = stark_shift_h(p)
        except PoleProximityError:
            skipped += 1
            continue
        rows.append((delta, g, h, h - g))
    if skipped:
        logger.debug("stark sweep skipped %d detunings near poles", skipped)
    return rows


def _check_propagating(k_y: float, g: EnsembleGeometry):
    if abs(k_y) >= g.k_r:
        raise EvanescentError(f"|K_y|={abs(k_y)} rad/mm is not below k_r={g.k_r} rad/mm")


def phase_mismatch(k_y: float, g: EnsembleGeometry) -> float:
    """Longitudinal mismatch sqrt(k_r^2 - K_y^2) - k_r in rad/mm."""
    _check_propagating(k_y, g)
    return -k_y ** 2 / (math.sqrt(g.k_r ** 2 - k_y ** 2) + g.k_r)


def paraxial_mismatch(k_y: float, k_r: float) -> float:
    return -k_y ** 2 / (2 * k_r)


def phasematch_efficiency(k_y: float, g: EnsembleGeometry) -> float:
    """
    Read-out efficiency of a spin wave with transverse wavevector K_y.

    Args:
        k_y: Transverse wavevector in rad/mm
        g: Ensemble geometry

    Returns:
        exp(-Delta^2 sigma_z^2 / 2), equal to 1 at K_y = 0

    Raises:
        EvanescentError: for |K_y| >= k_r
    """
    delta = phase_mismatch(k_y, g)
    return math.exp(-(delta * g.sigma_z) ** 2 / 2)


def phasematch_quadrature(k_y: float, g: EnsembleGeometry) -> float:
    """Same efficiency from numerical integration of the Gaussian longitudinal profile."""
    delta = phase_mismatch(k_y, g)
    value, _ = quad(lambda z: math.exp(-(z / g.sigma_z) ** 2) * math.cos(delta * z), -np.inf, np.inf,
                    epsabs=1e-14, epsrel=1e-13, limit=200)
    return (value / (math.sqrt(math.pi) * g.sigma_z)) ** 2


def efficiency_map(k_w: np.ndarray, k_r: np.ndarray, spectrum: DiffractionSpectrum, k_g: float,
                   sigma: float, g: EnsembleGeometry) -> np.ndarray:
    """
    Relative read-out efficiency over (k_y^w, k_y^r).

    A pair written at (k_w, -k_w) is diffracted by m k_g with weight |c_m|^2; the
    mode overlap with the detected read wavevector is exp(-(k_r + k_w - m k_g)^2 / (4 sigma^2))
    and the read-out is weighted by the phase matching at k_r.

    Returns:
        Array of shape (len(k_r), len(k_w)) normalised to a maximum of 1
    """
    k_w = np.asarray(k_w, dtype=float)
    k_r = np.asarray(k_r, dtype=float)
    matching = np.array([phasematch_efficiency(k, g) for k in k_r])
    total = np.zeros((len(k_r), len(k_w)))
    s = k_r[:, None] + k_w[None, :]
    for m in spectrum.significant_orders():
        total += spectrum.power(m) * np.exp(-(s - m * k_g) ** 2 / (4 * sigma ** 2))
    total *= matching[:, None]
    peak = total.max()
    return total / peak if peak > 0 else total


@dataclass(frozen=True)
class NoiseEstimate:
    modes: float
    probability_per_mode: float


def noise_mode_estimate(g: EnsembleGeometry, n_atoms: float, gamma_n: float,
                        time: float = STARK_TIME_S) -> NoiseEstimate:
    """
    Spontaneous-noise photons spread over all far-field modes.

    Args:
        g: Ensemble geometry
        n_atoms: Atom number
        gamma_n: Noise generation rate per atom in 1/s
        time: Stark interaction time in s

    Returns:
        NoiseEstimate with the mode count sigma_z sigma_perp^2 / lambda^3 and the per-mode probability
    """
    if n_atoms < 0 or gamma_n < 0 or time < 0:
        raise DomainError("atom number, noise rate and time must be non-negative")
    wavelength_mm = g.wavelength_nm * 1e-6
    modes = g.sigma_z * g.sigma_perp ** 2 / wavelength_mm ** 3
    return NoiseEstimate(modes, n_atoms * gamma_n * time / modes)
