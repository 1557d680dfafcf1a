"""ac Stark phase grating implementation for the spin-wave memory simulator.

A spatially periodic light shift imprints the phase phi_S(y) on a stored spin
wave. Writing exp(i phi_S) as a Fourier series in the grating wavevector k_g,
the coefficient c_m is the amplitude transferred from K_y to K_y + m k_g
(diffraction order m). Sine patterns are expanded in closed form with Bessel
functions; every other pattern is decomposed numerically.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from utils.config import BLAZED_INTENSITY_NOISE, FOURIER_SAMPLES, MIN_SAMPLED_POINTS, N_MAX
from utils.errors import DomainError

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


class PhasePattern:
    """
    Base class for all periodic phase patterns.
    """
    kind = 'base'

    def __init__(self, k_g: float, offset: float = 0.0):
        """
        Initialize a phase pattern.

        Args:
            k_g: Grating wavevector in rad/mm
            offset: Constant phase component phi_0 in rad
        """
        if not k_g > 0:
            raise DomainError(f"grating wavevector must be positive, got k_g={k_g}")
        self.k_g = float(k_g)
        self.offset = float(offset)

    def phase_of_angle(self, angle: np.ndarray) -> np.ndarray:
        """Phase as a function of the grating angle k_g*y (without the offset)."""
        raise NotImplementedError

    def phase(self, y: np.ndarray) -> np.ndarray:
        """Phase in rad at transverse positions y (mm), offset included."""
        return self.phase_of_angle(self.k_g * np.asarray(y, dtype=float)) + self.offset

    def period_samples(self, samples: int = FOURIER_SAMPLES) -> np.ndarray:
        angle = TWO_PI * np.arange(samples) / samples
        return self.phase_of_angle(angle) + self.offset

    def parameters(self) -> Dict[str, float]:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'parameters': self.parameters(),
            'k_g_rad_per_mm': self.k_g,
            'offset_rad': self.offset,
        }

    def __repr__(self):
        params = ', '.join(f'{k}={v}' for k, v in self.parameters().items())
        return f"{type(self).__name__}({params}, k_g={self.k_g}, offset={self.offset})"


class SinePattern(PhasePattern):
    """phi_S(y) = chi * sin(k_g y + theta)."""
    kind = 'sine'

    def __init__(self, chi: float, theta: float = 0.0, k_g: float = 1.0, offset: float = 0.0):
        super().__init__(k_g, offset)
        self.chi = float(chi)
        self.theta = float(theta)

    def phase_of_angle(self, angle):
        return self.chi * np.sin(angle + self.theta)

    def parameters(self):
        return {'chi_rad': self.chi, 'theta_rad': self.theta}


class TwoTonePattern(PhasePattern):
    """Fundamental plus second harmonic: chi1 sin(k_g y + theta1) + chi2 sin(2 k_g y + theta2)."""
    kind = 'two_tone'

    def __init__(self, chi1: float, theta1: float, chi2: float, theta2: float,
                 k_g: float = 1.0, offset: float = 0.0):
        super().__init__(k_g, offset)
        self.chi1 = float(chi1)
        self.theta1 = float(theta1)
        self.chi2 = float(chi2)
        self.theta2 = float(theta2)

    def phase_of_angle(self, angle):
        return self.chi1 * np.sin(angle + self.theta1) + self.chi2 * np.sin(2 * angle + self.theta2)

    def parameters(self):
        return {'chi1_rad': self.chi1, 'theta1_rad': self.theta1,
                'chi2_rad': self.chi2, 'theta2_rad': self.theta2}


class BlazedRamp(PhasePattern):
    """
    Linear phase ramp alpha*y wrapped every `wrap` radians.

    The grating wavevector follows from the slope: k_g = 2 pi alpha / wrap. `depth`
    is the phase actually reached at the top of each ramp; an ideal blaze has
    depth == wrap == 2 pi and sends everything into order +1.
    """
    kind = 'blazed'

    def __init__(self, alpha: float, wrap: float = TWO_PI, depth: float = None, offset: float = 0.0):
        if not wrap > 0:
            raise DomainError(f"ramp wrap must be positive, got {wrap}")
        super().__init__(TWO_PI * alpha / wrap, offset)
        self.alpha = float(alpha)
        self.wrap = float(wrap)
        self.depth = float(wrap if depth is None else depth)

    def phase_of_angle(self, angle):
        return self.depth * np.mod(angle, TWO_PI) / TWO_PI

    def parameters(self):
        return {'alpha_rad_per_mm': self.alpha, 'wrap_rad': self.wrap, 'depth_rad': self.depth}


class SampledPattern(PhasePattern):
    """Arbitrary periodic pattern given by equally spaced samples over one period."""
    kind = 'sampled'

    def __init__(self, values, k_g: float = 1.0, offset: float = 0.0):
        super().__init__(k_g, offset)
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < MIN_SAMPLED_POINTS:
            raise DomainError(f"sampled patterns need at least {MIN_SAMPLED_POINTS} points per period, "
                              f"got {values.size}")
        self.values = values

    def phase_of_angle(self, angle):
        n = self.values.size
        nodes = TWO_PI * np.arange(n + 1) / n
        closed = np.append(self.values, self.values[0])
        return np.interp(np.mod(angle, TWO_PI), nodes, closed)

    def parameters(self):
        return {'values_rad': [float(v) for v in self.values]}


def pattern_from_dict(data: dict) -> PhasePattern:
    """Restore a pattern written by PhasePattern.to_dict()."""
    kind = data.get('kind')
    params = data.get('parameters', {})
    k_g = data.get('k_g_rad_per_mm', 1.0)
    offset = data.get('offset_rad', 0.0)
    if kind == 'sine':
        return SinePattern(params['chi_rad'], params.get('theta_rad', 0.0), k_g, offset)
    if kind == 'two_tone':
        return TwoTonePattern(params['chi1_rad'], params['theta1_rad'],
                              params['chi2_rad'], params['theta2_rad'], k_g, offset)
    if kind == 'blazed':
        return BlazedRamp(params['alpha_rad_per_mm'], params.get('wrap_rad', TWO_PI),
                          params.get('depth_rad'), offset)
    if kind == 'sampled':
        return SampledPattern(params['values_rad'], k_g, offset)
    raise DomainError(f"unknown phase pattern kind '{kind}'")


@dataclass
class DiffractionSpectrum:
    """
    Diffraction-order amplitudes c_m for |m| <= n_max.
    """
    orders: Dict[int, complex]
    n_max: int

    def amplitude(self, m: int) -> complex:
        return self.orders.get(m, 0j)

    def power(self, m: int) -> float:
        return abs(self.amplitude(m)) ** 2

    def total_power(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.orders.values()))

    def positive_power(self) -> float:
        return float(sum(abs(c) ** 2 for m, c in self.orders.items() if m > 0))

    def negative_power(self) -> float:
        return float(sum(abs(c) ** 2 for m, c in self.orders.items() if m < 0))

    def significant_orders(self, threshold: float = 1e-6) -> Tuple[int, ...]:
        return tuple(m for m in sorted(self.orders) if abs(self.orders[m]) ** 2 > threshold)

    def to_rows(self):
        """CSV rows (m, Re c_m, Im c_m, |c_m|^2)."""
        return [(m, c.real, c.imag, abs(c) ** 2) for m, c in sorted(self.orders.items())]


def fourier_coefficients(p: PhasePattern, n_max: int, samples: int = FOURIER_SAMPLES) -> DiffractionSpectrum:
    """
    Numerical Fourier coefficients of exp(i phi_S) over one period.

    Args:
        p: Phase pattern
        n_max: Largest |m| kept
        samples: Uniform samples per period (trapezoidal rule)

    Returns:
        DiffractionSpectrum
    """
    field_values = np.exp(1j * p.period_samples(samples))
    coeffs = np.fft.fft(field_values) / samples
    orders = {m: complex(coeffs[m % samples]) for m in range(-n_max, n_max + 1)}
    return DiffractionSpectrum(orders, n_max)


def decompose(p: PhasePattern, n_max: int = N_MAX) -> DiffractionSpectrum:
    """
    Decompose a phase pattern into diffraction-order amplitudes.

    Sine patterns use the Jacobi-Anger expansion
    c_m = J_m(chi) exp(i m theta) exp(i phi_0); all others are integrated numerically.

    Args:
        p: Phase pattern
        n_max: Largest |m| kept, at least 1

    Returns:
        DiffractionSpectrum
    """
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    if isinstance(p, SinePattern):
        m = np.arange(-n_max, n_max + 1)
        c = jv(m, p.chi) * np.exp(1j * m * p.theta) * np.exp(1j * p.offset)
        return DiffractionSpectrum({int(k): complex(v) for k, v in zip(m, c)}, n_max)
    return fourier_coefficients(p, n_max)


def rms(p: PhasePattern) -> float:
    """Root mean square of the phase modulation about its mean over one period."""
    if isinstance(p, SinePattern):
        return abs(p.chi) / math.sqrt(2)
    values = p.period_samples()
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


def mean_square(p: PhasePattern) -> float:
    """<phi_S^2> over one period (offset excluded)."""
    values = p.period_samples() - p.offset
    return float(np.mean(values ** 2))


def design_asymmetric(ratio: float, delta_theta: float, total_rms: float, k_g: float,
                      offset: float = 0.0) -> TwoTonePattern:
    """
    Two-tone pattern that steers the diffracted power to one side.

    The relative phase is measured from the configuration that favours the
    positive orders: delta_theta = 0 concentrates power in m > 0 and
    delta_theta = pi in m < 0.

    Args:
        ratio: chi1 / chi2
        delta_theta: Relative phase of the second harmonic in rad
        total_rms: RMS of the full pattern in rad
        k_g: Grating wavevector in rad/mm
        offset: Constant phase component

    Returns:
        TwoTonePattern
    """
    if not ratio > 0:
        raise DomainError(f"tone ratio must be positive, got {ratio}")
    if total_rms < 0:
        raise DomainError(f"total RMS must be non-negative, got {total_rms}")
    chi2 = math.sqrt(2 * total_rms ** 2 / (1 + ratio ** 2))
    chi1 = ratio * chi2
    return TwoTonePattern(chi1, 0.0, chi2, math.pi + delta_theta, k_g, offset)


@dataclass
class EfficiencyModel:
    """
    Retrieval-efficiency penalty of a modulated spin wave.

    Attributes:
        gamma: Phenomenological decay constant in 1/rad
        var_z: Variance of the phase along the propagation axis in rad^2
    """
    gamma: float = 0.0
    var_z: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.var_z < 0:
            raise DomainError(f"efficiency model needs gamma >= 0 and var_z >= 0, got {self.gamma}, {self.var_z}")

    @classmethod
    def with_noise(cls, gamma: float, pattern: PhasePattern, rms_fraction: float) -> 'EfficiencyModel':
        """Model whose phase variance comes from a relative intensity deviation of the Stark beam."""
        return cls(gamma, (rms_fraction ** 2) * mean_square(pattern))


def retrieval_penalty(e: EfficiencyModel, chi: float) -> float:
    """
    Efficiency factor exp(-gamma chi) * exp(-Var_z / 2).

    Args:
        e: Efficiency model
        chi: Modulation amplitude in rad

    Returns:
        Factor in (0, 1]
    """
    if chi < 0:
        raise DomainError(f"modulation amplitude must be non-negative, got chi={chi}")
    return math.exp(-e.gamma * chi) * math.exp(-e.var_z / 2)


def balanced_chi() -> float:
    """Smallest positive chi with J0(chi) = J1(chi): the equal three-way split."""
    return brentq(lambda x: jv(0, x) - jv(1, x), 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass
class BlazedEfficiency:
    ideal: float
    noisy: float
    depth: float
    noise_rms_fraction: float
    spectrum: DiffractionSpectrum = field(repr=False, default=None)


def blazed_efficiency(k_g: float, depth: float = TWO_PI,
                      noise_rms_fraction: float = BLAZED_INTENSITY_NOISE,
                      n_max: int = N_MAX) -> BlazedEfficiency:
    """
    First-order transfer of a blazed ramp.

    Args:
        k_g: Grating wavevector in rad/mm (wrap at 2 pi)
        depth: Phase reached at the top of the ramp
        noise_rms_fraction: Relative RMS intensity deviation of the Stark beam
        n_max: Truncation order

    Returns:
        BlazedEfficiency with the ideal |c_1|^2 and the value after the noise penalty
    """
    ramp = BlazedRamp(k_g, TWO_PI, depth)
    spectrum = decompose(ramp, n_max)
    ideal = spectrum.power(1)
    penalty = retrieval_penalty(EfficiencyModel.with_noise(0.0, ramp, noise_rms_fraction), 0.0)
    logger.debug("blazed ramp depth=%.4f ideal=%.6f penalty=%.6f", depth, ideal, penalty)
    return BlazedEfficiency(ideal, ideal * penalty, depth, noise_rms_fraction, spectrum)


@dataclass(frozen=True)
class SteeringSummary:
    positive: float
    negative: float
    zero: float

    @property
    def contrast(self) -> float:
        """(P+ - P-) / (P+ + P-), +1 when all diffracted power goes to m > 0."""
        total = self.positive + self.negative
        return (self.positive - self.negative) / total if total > 0 else 0.0


def steer(p: PhasePattern, n_max: int = N_MAX) -> SteeringSummary:
    """Diffracted power on each side of the zeroth order."""
    spectrum = decompose(p, n_max)
    return SteeringSummary(spectrum.positive_power(), spectrum.negative_power(), spectrum.power(0))
