"""Spin-wave network builders for the spin-wave memory simulator.

The two-excitation interference model uses eight read-out modes and their
write-out partners:

    r modes: vb, rb, ra, va and their orthogonal complements vb_perp ... va_perp
    w modes: w_vb, wb, wa, w_va, w_vb_perp, w_rb_perp, w_ra_perp, w_va_perp

Every pair (r, w) is squeezed, rb is rotated into its displaced basis by a
beamsplitter of transmission tau, the three-way splitter acts on (vb, rb, ra, va)
and on the orthogonal quadruple, and the basis change is undone:

    M = Bs^T (Tws + Tws_perp) Bs Sq

Detection happens in rc (the ra output) and rd (the rb output), heralded by wa
and wb.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from components.gaussnet import (BogoliubovTransform, Coherent, InputSpec, Thermal, Vacuum,
                                 beamsplitter, passive, squeezer, threeway_splitter,
                                 unitary_completion)
from components.wavespace import GaussianMode, TransverseWavevector, make_mode_pair
from utils.errors import DomainError

logger = logging.getLogger(__name__)

R_MODES = ('vb', 'rb', 'ra', 'va', 'vb_perp', 'rb_perp', 'ra_perp', 'va_perp')
W_MODES = ('w_vb', 'wb', 'wa', 'w_va', 'w_vb_perp', 'w_rb_perp', 'w_ra_perp', 'w_va_perp')
LABELS = R_MODES + W_MODES
DETECTOR_ALIASES = {'rc': 'ra', 'rd': 'rb'}


@dataclass
class SpinWaveNetwork:
    """
    A network given as stages in application order plus its inputs.

    Attributes:
        labels: Mode names
        stages: Bogoliubov transforms, the first one applied first
        inputs: Per-mode initial conditions
        aliases: Extra names for modes (detector names)
    """
    labels: Tuple[str, ...]
    stages: Tuple[BogoliubovTransform, ...]
    inputs: InputSpec
    aliases: Dict[str, str] = field(default_factory=lambda: dict(DETECTOR_ALIASES))

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def index(self, name: str) -> int:
        name = self.aliases.get(name, name)
        try:
            return self.labels.index(name)
        except ValueError:
            raise DomainError(f"network has no mode named '{name}'") from None

    def indices(self, names: Sequence[str]) -> List[int]:
        return [self.index(n) for n in names]

    def transform(self) -> BogoliubovTransform:
        total = BogoliubovTransform.identity(self.n_modes, self.labels)
        for stage in self.stages:
            total = stage @ total
        return total.relabel(self.labels)

    @property
    def truncated(self) -> bool:
        return any(s.truncated for s in self.stages)

    def completed(self) -> 'SpinWaveNetwork':
        """Replace truncated stages by their unitary completions; new auxiliary modes start in vacuum."""
        labels = list(self.labels)
        stages = []
        for stage in self.stages:
            stage = stage.extend(len(labels), labels)
            if stage.truncated:
                done = unitary_completion(stage)
                extra = done.n_modes - len(labels)
                new = [f'aux{len(labels) - self.n_modes + k}' for k in range(extra)]
                labels = labels + new
                stage = done.relabel(labels)
            stages.append(stage)
        stages = [s.extend(len(labels), labels) for s in stages]
        return SpinWaveNetwork(tuple(labels), tuple(stages), self.inputs.extended(len(labels)), dict(self.aliases))

    def squeezed_pairs(self) -> List[Tuple[int, int, float]]:
        """(r, w, amplitude) for the pairs coupled by the first stage, when it is active."""
        if not self.stages:
            return []
        M = self.stages[0].matrix
        pairs = []
        for i in range(self.n_modes):
            for j in range(i + 1, self.n_modes):
                q = M[2 * i, 2 * j + 1]
                if abs(q) > 0:
                    pairs.append((i, j, float(abs(q / M[2 * i, 2 * i]))))
        return pairs


def tau_from_shift(delta_kx: float, sigma: float) -> float:
    """Beamsplitter transmission between a mode and its copy displaced by delta_kx."""
    pair = make_mode_pair(GaussianMode(TransverseWavevector(), sigma), TransverseWavevector(delta_kx, 0.0))
    return pair.tau


def _squeezing_stage(amplitudes: Dict[str, float]) -> BogoliubovTransform:
    n = len(LABELS)
    total = BogoliubovTransform.identity(n)
    for r_name, x in amplitudes.items():
        r = R_MODES.index(r_name)
        total = squeezer(x, (r + len(R_MODES), r), n) @ total
    return total


def _mixing_stages(tau: float, theta: float) -> Tuple[BogoliubovTransform, ...]:
    n = len(LABELS)
    idx = {name: i for i, name in enumerate(LABELS)}
    bs = beamsplitter(tau, (idx['rb'], idx['rb_perp']), n)
    tws = threeway_splitter(theta, (idx['vb'], idx['rb'], idx['ra'], idx['va']), n)
    tws_perp = threeway_splitter(theta, (idx['vb_perp'], idx['rb_perp'], idx['ra_perp'], idx['va_perp']), n)
    s = math.sqrt(1 - tau ** 2)
    bs_t = passive(np.array([[tau, -s], [s, tau]]), (idx['rb'], idx['rb_perp']), n)
    return bs, tws_perp @ tws, bs_t


def hom_network(p: float, tau: float, theta: float = 0.0) -> SpinWaveNetwork:
    """
    Two-excitation interference network.

    Args:
        p: Pair probability per mode; every pair is squeezed with amplitude sqrt(p)
        tau: Overlap of the displaced rb mode with its reference position
        theta: Grating phase

    Returns:
        SpinWaveNetwork with vacuum inputs
    """
    if not 0 <= p < 1:
        raise DomainError(f"pair probability must lie in [0, 1), got p={p}")
    x = math.sqrt(p)
    stages = (_squeezing_stage({r: x for r in R_MODES}),) + _mixing_stages(tau, theta)
    return SpinWaveNetwork(LABELS, tuple(s.relabel(LABELS) for s in stages), InputSpec.vacuum(len(LABELS)))


def hbt_network(p: float, tau: float, thermal_nbar: float, background_nbar: float,
                theta: float = 0.0) -> SpinWaveNetwork:
    """
    Intensity-correlation network: only (ra, wa) is squeezed, rb holds a thermal state.

    Args:
        p: Pair probability of the heralded pair
        tau: Overlap of the displaced rb mode
        thermal_nbar: Occupation of rb
        background_nbar: Thermal occupation of the other unheralded read-out modes
        theta: Grating phase

    Returns:
        SpinWaveNetwork
    """
    if not 0 <= p < 1:
        raise DomainError(f"pair probability must lie in [0, 1), got p={p}")
    stages = (_squeezing_stage({'ra': math.sqrt(p)}),) + _mixing_stages(tau, theta)
    states = [Vacuum()] * len(LABELS)
    for name in R_MODES:
        if name == 'rb':
            states[LABELS.index(name)] = Thermal(thermal_nbar)
        elif name != 'ra':
            states[LABELS.index(name)] = Thermal(background_nbar)
    return SpinWaveNetwork(LABELS, tuple(s.relabel(LABELS) for s in stages), InputSpec(states))


def classical_network(tau: float, nbar: float, theta: float = 0.0) -> SpinWaveNetwork:
    """
    Interference of two phase-averaged coherent inputs in ra and rb (no squeezing).
    """
    if nbar < 0:
        raise DomainError(f"coherent occupation must be non-negative, got {nbar}")
    amp = math.sqrt(nbar)
    states = [Vacuum()] * len(LABELS)
    states[LABELS.index('ra')] = Coherent(amp, phase_averaged=True)
    states[LABELS.index('rb')] = Coherent(amp, phase_averaged=True)
    stages = _mixing_stages(tau, theta)
    return SpinWaveNetwork(LABELS, tuple(s.relabel(LABELS) for s in stages), InputSpec(states))
