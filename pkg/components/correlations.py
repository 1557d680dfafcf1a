"""Second-order correlation implementation for the spin-wave memory simulator.

Heralded correlation functions are assembled from normally ordered moments of the
network outputs. With X the product of herald photon numbers and d = p_dark/eta
the dark-count ratio of the read-out detectors,

    g2_{c,d|X} = (<n_c n_d X> + d<n_c X> + d<n_d X> + d^2<X>) <X>
                 / ((<n_c X> + d<X>) (<n_d X> + d<X>))

which reduces to g2_hom_closed on the two-excitation interference
network. The same expression with c == d gives conditional auto-correlations.
The module also holds the fit forms of the cross-correlations, the visibility
and Cauchy-Schwarz witnesses, and the Monte Carlo emulation of the camera
coincidence map.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.special import jv

from components import fockoracle, gaussnet
from components.grating import DiffractionSpectrum
from components.networks import SpinWaveNetwork, classical_network
from components.wavespace import GaussianMode, TransverseWavevector, overlap
from utils.config import (CAMERA_CHUNK, FIT_ALPHA, FIT_GAMMA_PER_RAD, FOCK_CUTOFF,
                          MISALIGNMENT_SLOPE)
from utils.errors import DomainError, NumericalError, UndefinedResultError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountingModel:
    """
    Read-out detection model.

    Attributes:
        eta: Net detection efficiency in (0, 1]
        p_dark: Dark-count probability per gate
    """
    eta: float = 1.0
    p_dark: float = 0.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise DomainError(f"detection efficiency must lie in (0, 1], got eta={self.eta}")
        if self.p_dark < 0:
            raise DomainError(f"dark-count probability must be non-negative, got {self.p_dark}")

    @property
    def d(self) -> float:
        return self.p_dark / self.eta

    @classmethod
    def from_ratio(cls, d: float) -> 'CountingModel':
        return cls(1.0, d)

    def scaled(self, coupling: float) -> 'CountingModel':
        """Same detector behind an extra coupling efficiency."""
        return CountingModel(self.eta * coupling, self.p_dark)


@dataclass
class G2Result:
    """
    A second-order correlation value.

    kind is 'cross' for write/read or read/read cross-correlations and 'auto' for
    (conditional) auto-correlations.
    """
    value: float
    sigma: float = 0.0
    kind: str = 'cross'
    heralded: bool = False

    def __post_init__(self):
        if self.value < 0:
            if self.value < -1e-9:
                raise NumericalError(f"negative g2 value {self.value}")
            self.value = 0.0

    @property
    def nonclassical(self) -> bool:
        return self.kind == 'cross' and self.value > 2

    @property
    def sub_poissonian(self) -> bool:
        return self.kind == 'auto' and self.value < 1


@dataclass(frozen=True)
class FitForm:
    alpha: float = FIT_ALPHA
    gamma: float = FIT_GAMMA_PER_RAD

    def __post_init__(self):
        if self.alpha < 0 or self.gamma < 0:
            raise DomainError(f"fit form needs alpha >= 0 and gamma >= 0, got {self.alpha}, {self.gamma}")


def _hom_closed_raw(p: float, tau: float, eta: float, p_dark: float) -> float:
    d = p_dark / eta
    t2 = tau ** 2
    num = (9 * p ** 2 + 6 * p * (t2 + 1) + (t2 - 1) ** 2
           - 6 * d * (3 * p ** 2 + p * (t2 - 2) - t2 - 1)
           + 9 * (p - 1) ** 2 * d ** 2)
    den = (3 * p + t2 + 1 - 3 * (p - 1) * d) ** 2
    return num / den


def g2_hom_closed(p: float, tau: float, d=0.0) -> G2Result:
    """
    Closed-form g2_{rc,rd|wa,wb} of the two-excitation interference.

    Args:
        p: Pair probability, 0 <= p < 1
        tau: Mode overlap, 0 <= tau <= 1
        d: Dark-count ratio p_dark/eta, or a CountingModel

    Returns:
        G2Result
    """
    if not 0 <= p < 1:
        raise DomainError(f"pair probability must lie in [0, 1), got p={p}")
    if not 0 <= tau <= 1:
        raise DomainError(f"overlap must lie in [0, 1], got tau={tau}")
    counting = d if isinstance(d, CountingModel) else CountingModel(1.0, d)
    return G2Result(_hom_closed_raw(p, tau, counting.eta, counting.p_dark), kind='cross', heralded=True)


def assemble_g2(m_cdx: float, m_cx: float, m_dx: float, m_x: float, d: float) -> float:
    """Combine heralded moments and the dark-count ratio into a g2 value."""
    den = (m_cx + d * m_x) * (m_dx + d * m_x)
    if den <= 0 or m_x <= 0:
        raise UndefinedResultError("no herald or signal flux: g2 denominator is zero")
    return (m_cdx + d * m_cx + d * m_dx + d * d * m_x) * m_x / den


def _moment_function(network: SpinWaveNetwork, backend: str, cutoff: int,
                     phase_samples: Optional[int] = None, seed: Optional[int] = None) -> Callable:
    if backend == 'wick':
        transform = network.transform()
        return lambda idx: gaussnet.moments(transform, network.inputs, idx,
                                            phase_samples=phase_samples, seed=seed) if idx else 1.0
    if backend == 'fock':
        completed = network.completed() if network.truncated else network
        return lambda idx: fockoracle.network_moment(completed, idx, cutoff) if idx else 1.0
    raise DomainError(f"unknown moment backend '{backend}'")


def g2_from_moments(network: SpinWaveNetwork, counting: CountingModel, heralds: Sequence[str],
                    signals: Tuple[str, str], backend: str = 'wick', cutoff: int = FOCK_CUTOFF,
                    phase_samples: Optional[int] = None, seed: Optional[int] = None) -> G2Result:
    """
    Heralded g2 of two read-out detectors from network moments.

    Args:
        network: Spin-wave network
        counting: Read-out detection model (enters through d)
        heralds: Herald mode names (may be empty)
        signals: The two detected modes; equal names give an auto-correlation
        backend: 'wick' (Gaussian moments) or 'fock' (Fock-mixture oracle)
        cutoff: Oracle cutoff
        phase_samples: Monte Carlo phase samples for phase-averaged inputs (wick only)
        seed: Seed of the phase samples

    Returns:
        G2Result

    Raises:
        UndefinedResultError: when the herald or signal flux vanishes
    """
    moment = _moment_function(network, backend, cutoff, phase_samples, seed)
    x = network.indices(heralds)
    c, dd = network.indices(signals)
    m_x = moment(x)
    m_cx = moment([c] + x)
    m_dx = moment([dd] + x)
    m_cdx = moment([c, dd] + x)
    value = assemble_g2(m_cdx, m_cx, m_dx, m_x, counting.d)
    return G2Result(value, kind='auto' if c == dd else 'cross', heralded=bool(x))


def g2_cross(network: SpinWaveNetwork, counting: CountingModel, herald: str, signal: str,
             coupling: float = 1.0, backend: str = 'wick', cutoff: int = FOCK_CUTOFF) -> G2Result:
    """
    Unconditional write/read cross-correlation with dark counts on the read side.

    Args:
        network: Spin-wave network
        counting: Read-out detection model
        herald: Write-out mode
        signal: Read-out mode
        coupling: Extra coupling efficiency of the read detector
        backend: 'wick' or 'fock'
        cutoff: Oracle cutoff

    Returns:
        G2Result
    """
    moment = _moment_function(network, backend, cutoff)
    w = network.index(herald)
    r = network.index(signal)
    d = counting.scaled(coupling).d
    m_w = moment([w])
    m_r = moment([r])
    if m_w <= 0 or m_r + d <= 0:
        raise UndefinedResultError(f"no flux in {herald} or {signal}")
    return G2Result((moment([w, r]) + d * m_w) / (m_w * (m_r + d)), kind='cross')


def g2_auto(network: SpinWaveNetwork, counting: CountingModel, heralds: Sequence[str], signal: str,
            backend: str = 'wick', cutoff: int = FOCK_CUTOFF) -> G2Result:
    """Conditional auto-correlation g2_{s,s|heralds} of one read-out mode."""
    return g2_from_moments(network, counting, heralds, (signal, signal), backend, cutoff)


def misalignment_coupling(delta_kx: float, sigma: float, slope: float = MISALIGNMENT_SLOPE) -> float:
    """Power coupling left after a residual mode offset of slope * delta_kx."""
    mode = GaussianMode(TransverseWavevector(), sigma)
    return abs(overlap(mode, mode.shifted(TransverseWavevector(slope * delta_kx, 0.0)))) ** 2


def classical_hom(tau: float, nbar: float, theta: float = 0.0, phase_samples: Optional[int] = None,
                  seed: Optional[int] = None) -> G2Result:
    """g2_{rc,rd} of two phase-averaged coherent inputs (no heralding, no dark counts)."""
    network = classical_network(tau, nbar, theta)
    return g2_from_moments(network, CountingModel(), (), ('rc', 'rd'),
                           phase_samples=phase_samples, seed=seed)


def g2_fit_forms(f: FitForm, chi: float) -> Tuple[float, float]:
    """
    Heuristic cross-correlations (g2_{wa,rc}, g2_{wa,rd}) versus modulation amplitude.
    """
    if chi < 0:
        raise DomainError(f"modulation amplitude must be non-negative, got chi={chi}")
    decay = math.exp(-f.gamma * chi)
    return 1 + f.alpha * jv(0, chi) ** 2 * decay, 1 + f.alpha * jv(1, chi) ** 2 * decay


@dataclass(frozen=True)
class Visibility:
    value: float

    @property
    def nonclassical(self) -> bool:
        return self.value > 0.5


def visibility(g2_dip: G2Result) -> Visibility:
    return Visibility(1 - g2_dip.value)


@dataclass(frozen=True)
class CauchySchwarzVerdict:
    lhs: float
    rhs: float

    @property
    def nonclassical(self) -> bool:
        return self.lhs > self.rhs


def cauchy_schwarz(g_rw: float, g_rr: float, g_ww: float) -> CauchySchwarzVerdict:
    """Witness [g_rw]^2 <= g_rr g_ww; a violation certifies nonclassical correlations."""
    if min(g_rw, g_rr, g_ww) < 0:
        raise DomainError("correlation values must be non-negative")
    return CauchySchwarzVerdict(g_rw ** 2, g_rr * g_ww)


@dataclass(frozen=True)
class CameraGrid:
    """
    Pixel grid of the write and read cameras in wavevector space.

    Attributes:
        nx: Pixels along k_x (odd)
        ny: Pixels along k_y (odd)
        spacing: Pixel pitch in rad/mm
    """
    nx: int
    ny: int
    spacing: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.nx % 2 == 0 or self.ny % 2 == 0:
            raise DomainError(f"camera grid needs odd positive sizes, got {self.nx}x{self.ny}")
        if not self.spacing > 0:
            raise DomainError(f"pixel pitch must be positive, got {self.spacing}")

    @property
    def half(self) -> Tuple[int, int]:
        return (self.nx - 1) // 2, (self.ny - 1) // 2

    @property
    def pixels(self) -> int:
        return self.nx * self.ny

    def pixel_index(self, ix: np.ndarray, iy: np.ndarray) -> np.ndarray:
        hx, hy = self.half
        return (iy + hy) * self.nx + (ix + hx)

    def inside(self, ix: np.ndarray, iy: np.ndarray) -> np.ndarray:
        hx, hy = self.half
        return (np.abs(ix) <= hx) & (np.abs(iy) <= hy)

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        hx, hy = self.half
        iy, ix = np.divmod(np.arange(self.pixels), self.nx)
        return ix - hx, iy - hy


@dataclass
class CoincidenceMap:
    """
    Averaged g2 over pixel pairs sharing the same sum wavevector.

    Attributes:
        sum_kx, sum_ky: Bin centres in rad/mm
        g2, sigma: Arrays of shape (len(sum_ky), len(sum_kx)); NaN where no accidentals exist
        coincidences, accidentals: Raw and expected uncorrelated counts per bin
        shots: Number of simulated shots
    """
    sum_kx: np.ndarray
    sum_ky: np.ndarray
    g2: np.ndarray
    sigma: np.ndarray
    coincidences: np.ndarray
    accidentals: np.ndarray
    shots: int

    def at(self, kx: float, ky: float) -> G2Result:
        i = int(np.argmin(np.abs(self.sum_ky - ky)))
        j = int(np.argmin(np.abs(self.sum_kx - kx)))
        return G2Result(float(self.g2[i, j]), float(self.sigma[i, j]), kind='cross')

    def to_rows(self):
        rows = []
        for i, ky in enumerate(self.sum_ky):
            for j, kx in enumerate(self.sum_kx):
                rows.append((kx, ky, self.g2[i, j], self.sigma[i, j]))
        return rows


def _click_matrix(shot: np.ndarray, pixel: np.ndarray, shots: int, pixels: int) -> sparse.csr_matrix:
    m = sparse.csr_matrix((np.ones(len(shot)), (shot, pixel)), shape=(shots, pixels))
    m.sum_duplicates()
    m.data[:] = 1.0
    return m


def coincidence_map(grid: CameraGrid, spectrum: DiffractionSpectrum, k_g: float, p: float,
                    counting: CountingModel, shots: int, seed: int,
                    chunk: int = CAMERA_CHUNK) -> CoincidenceMap:
    """
    Monte Carlo of the write/read camera coincidences for independent mode pairs.

    Each write pixel k_w is paired with the read wavevector -k_w; the read
    excitation is displaced by m k_g with probability |c_m|^2. Pairs outside the
    write camera are simulated as well (as far as significant orders reach) so
    that every read pixel sees the same diffracted flux.

    Args:
        grid: Camera grid; its pitch must divide k_g and be at most k_g/4
        spectrum: Diffraction orders applied to the read excitation
        k_g: Grating wavevector in rad/mm
        p: Pair probability per mode pair and shot
        counting: Detection efficiency (both cameras) and dark clicks per pixel
        shots: Number of shots
        seed: Random seed
        chunk: Shots per vectorised block

    Returns:
        CoincidenceMap
    """
    if shots < 1:
        raise DomainError(f"need at least one shot, got {shots}")
    if not 0 <= p < 1:
        raise DomainError(f"pair probability must lie in [0, 1), got p={p}")
    steps = k_g / grid.spacing
    if steps < 4 - 1e-9 or abs(steps - round(steps)) > 1e-9:
        raise DomainError(f"pixel pitch {grid.spacing} must divide k_g={k_g} at least four times")
    steps = int(round(steps))

    orders = np.array(spectrum.significant_orders(), dtype=int)
    weights = np.array([spectrum.power(m) for m in orders])
    lost = max(0.0, 1 - weights.sum())
    choice_p = np.append(weights, lost)
    choice_p = choice_p / choice_p.sum()
    margin = int(np.max(np.abs(orders))) * steps if len(orders) else 0

    hx, hy = grid.half
    pair_ix, pair_iy = np.meshgrid(np.arange(-hx, hx + 1), np.arange(-hy - margin, hy + margin + 1))
    pair_ix = pair_ix.ravel()
    pair_iy = pair_iy.ravel()
    n_pairs = len(pair_ix)
    pixels = grid.pixels
    eta = counting.eta

    coinc = np.zeros((pixels, pixels))
    singles_w = np.zeros(pixels)
    singles_r = np.zeros(pixels)
    children = np.random.SeedSequence(seed).spawn((shots + chunk - 1) // chunk)
    done = 0
    for child in children:
        rng = np.random.default_rng(child)
        n_shots = min(chunk, shots - done)
        done += n_shots
        shot_idx, pair_idx = np.nonzero(rng.random((n_shots, n_pairs)) < p)
        photons = rng.geometric(1 - p, size=len(shot_idx)) if p > 0 else np.zeros(0, dtype=int)

        # write clicks
        wx, wy = pair_ix[pair_idx], pair_iy[pair_idx]
        w_seen = grid.inside(wx, wy) & (rng.binomial(photons, eta) > 0)
        w_shot = shot_idx[w_seen]
        w_pix = grid.pixel_index(wx[w_seen], wy[w_seen])

        # read photons, one entry per excitation
        r_shot = np.repeat(shot_idx, photons)
        r_pair = np.repeat(pair_idx, photons)
        order_pick = rng.choice(len(choice_p), size=len(r_shot), p=choice_p)
        kept = (order_pick < len(orders)) & (rng.random(len(r_shot)) < eta)
        rx = -pair_ix[r_pair[kept]]
        ry = -pair_iy[r_pair[kept]] + orders[order_pick[kept]] * steps
        inside = grid.inside(rx, ry)
        r_shot = r_shot[kept][inside]
        r_pix = grid.pixel_index(rx[inside], ry[inside])

        # dark clicks
        if counting.p_dark > 0:
            for target in ('w', 'r'):
                n_dark = rng.binomial(n_shots * pixels, counting.p_dark)
                flat = rng.integers(0, n_shots * pixels, size=n_dark)
                d_shot, d_pix = np.divmod(flat, pixels)
                if target == 'w':
                    w_shot = np.concatenate([w_shot, d_shot])
                    w_pix = np.concatenate([w_pix, d_pix])
                else:
                    r_shot = np.concatenate([r_shot, d_shot])
                    r_pix = np.concatenate([r_pix, d_pix])

        W = _click_matrix(w_shot, w_pix, n_shots, pixels)
        R = _click_matrix(r_shot, r_pix, n_shots, pixels)
        coinc += (W.T @ R).toarray()
        singles_w += np.asarray(W.sum(axis=0)).ravel()
        singles_r += np.asarray(R.sum(axis=0)).ravel()

    accidental = np.outer(singles_w, singles_r) / shots
    ix, iy = grid.coordinates()
    sx = (ix[:, None] + ix[None, :]).ravel() + 2 * hx
    sy = (iy[:, None] + iy[None, :]).ravel() + 2 * hy
    shape = (4 * hy + 1, 4 * hx + 1)
    c_bins = np.zeros(shape)
    a_bins = np.zeros(shape)
    np.add.at(c_bins, (sy, sx), coinc.ravel())
    np.add.at(a_bins, (sy, sx), accidental.ravel())
    with np.errstate(divide='ignore', invalid='ignore'):
        g2 = np.where(a_bins > 0, c_bins / a_bins, np.nan)
        sigma = np.where(a_bins > 0, np.sqrt(c_bins) / a_bins, np.nan)
    sum_kx = (np.arange(shape[1]) - 2 * hx) * grid.spacing
    sum_ky = (np.arange(shape[0]) - 2 * hy) * grid.spacing
    logger.debug("coincidence map: %d shots, %d pair modes, %d significant orders", shots, n_pairs, len(orders))
    return CoincidenceMap(sum_kx, sum_ky, g2, sigma, c_bins, a_bins, shots)
