"""Multiplexed photon source and repeater implementation for the spin-wave memory simulator.

A memory holding M wavevector modes, each excited with pair probability p,
heralds at least l excitations with the binomial upper tail
I_{p eta_w}(l, M - l + 1); the heralded spin waves are then switched into l
fixed output modes. The repeater part chains entanglement generation (ENG),
connection (ENC) and purification over wavevector-encoded qubits; the ENC and
purification heralds are evaluated on the truncated Fock-space oracle.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import betainc, logsumexp
from scipy.stats import binom

from components.fockoracle import (ExactlyOne, FockState, HeraldOutcome, HeraldPattern, NoClick,
                                   evolve, heralded_state)
from components.gaussnet import BogoliubovTransform, beamsplitter
from utils.config import (MC_BLOCK_TRIALS, MC_WORKERS, RATE_REP_HZ, REPEATER_ETA_CAM, REPEATER_L0_KM,
                          REPEATER_L_ATT_KM, REPEATER_MODES, REPEATER_P)
from utils.errors import DomainError
from utils.metrics import MonteCarloTally

logger = logging.getLogger(__name__)

ENC_LABELS = ('a_K', 'a_Kp', 'b_K', 'b_Kp', 'bp_K', 'bp_Kp', 'c_K', 'c_Kp')
# detector -> output slot of the ENC circuit (see _enc_circuit)
ENC_DETECTORS = {'D1': 2, 'D2': 3, 'D3': 5, 'D4': 4}
ENC_PATTERNS = (('D1', 'D2'), ('D1', 'D3'), ('D4', 'D2'), ('D4', 'D3'))
PURIFICATION_LABELS = ('A_K1', 'A_K2', 'A_K3', 'A_K4', 'C_K1', 'C_K2', 'C_K3', 'C_K4')
REPEATER_STAGES = ('eng', 'enc', 'purification')


def _unit_interval(name: str, value: float):
    if not 0 <= value <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SourceParams:
    """
    Multiplexed source parameters.

    Attributes:
        p: Pair probability per mode
        eta_w: Write-photon (herald) detection efficiency
        eta_r: Effective read-out efficiency including the switch
        modes: Number of memory modes M
        rep_rate: Repetition rate in Hz
    """
    p: float
    eta_w: float
    eta_r: float
    modes: int
    rep_rate: float = RATE_REP_HZ

    def __post_init__(self):
        _unit_interval('p', self.p)
        _unit_interval('eta_w', self.eta_w)
        _unit_interval('eta_r', self.eta_r)
        if self.modes < 1:
            raise DomainError(f"mode count must be at least 1, got {self.modes}")
        if self.rep_rate < 0:
            raise DomainError(f"repetition rate must be non-negative, got {self.rep_rate}")

    @property
    def herald_probability(self) -> float:
        """p eta_w, the probability that a given mode heralds."""
        return self.p * self.eta_w

    def with_modes(self, modes: int) -> 'SourceParams':
        return SourceParams(self.p, self.eta_w, self.eta_r, modes, self.rep_rate)


@dataclass(frozen=True)
class RepeaterParams:
    """
    Elementary repeater link parameters.

    Attributes:
        l0_km: Channel length between neighbouring nodes
        l_att_km: Channel attenuation length
        eta_cam: Camera detection efficiency
        modes: Number of memory modes M
        p: Pair probability per mode
        eta_r: Read-out efficiency of each retrieved spin wave (1 for lossless)
    """
    l0_km: float = REPEATER_L0_KM
    l_att_km: float = REPEATER_L_ATT_KM
    eta_cam: float = REPEATER_ETA_CAM
    modes: int = REPEATER_MODES
    p: float = REPEATER_P
    eta_r: float = 1.0

    def __post_init__(self):
        if self.l0_km < 0 or self.l_att_km <= 0:
            raise DomainError(f"lengths must be positive, got L0={self.l0_km} km, L_att={self.l_att_km} km")
        _unit_interval('eta_cam', self.eta_cam)
        _unit_interval('p', self.p)
        _unit_interval('eta_r', self.eta_r)
        if self.modes < 2:
            raise DomainError(f"entanglement generation needs at least 2 modes, got {self.modes}")

    @property
    def eta_w(self) -> float:
        """exp(-L0 / L_att) eta_cam."""
        return math.exp(-self.l0_km / self.l_att_km) * self.eta_cam


def g2_heralded_single(p: float) -> float:
    """Heralded auto-correlation 2p(2+p)/(1+p)^2 of one arm of a two-mode squeezed state."""
    if not 0 <= p <= 1:
        raise DomainError(f"pair probability must lie in [0, 1], got p={p}")
    return 2 * p * (2 + p) / (1 + p) ** 2


def _check_l(s: SourceParams, l: int):
    if l < 0:
        raise DomainError(f"photon number must be non-negative, got l={l}")
    if l > s.modes:
        raise DomainError(f"cannot herald l={l} photons from M={s.modes} modes")


def p_exactly_l(s: SourceParams, l: int) -> float:
    """Binomial probability that exactly l of the M modes herald."""
    _check_l(s, l)
    return float(binom.pmf(l, s.modes, s.herald_probability))


def p_at_least_l(s: SourceParams, l: int) -> float:
    """
    Probability that at least l modes herald.

    Args:
        s: Source parameters
        l: Required number of heralds

    Returns:
        The regularized incomplete Beta function I_{p eta_w}(l, M - l + 1); 1 for l = 0
    """
    _check_l(s, l)
    if l == 0:
        return 1.0
    return float(betainc(l, s.modes - l + 1, s.herald_probability))


def p_at_least_l_logsum(s: SourceParams, l: int) -> float:
    """Same tail as p_at_least_l, summed in log space over the binomial masses."""
    _check_l(s, l)
    if l == 0:
        return 1.0
    x = s.herald_probability
    if x == 0:
        return 0.0
    if x == 1:
        return 1.0
    k = np.arange(l, s.modes + 1)
    return float(min(1.0, math.exp(logsumexp(binom.logpmf(k, s.modes, x)))))


@dataclass(frozen=True)
class RateResult:
    l: int
    p_us: float
    p_qm: float
    r_us: float
    r_qm: float

    @property
    def ratio(self) -> float:
        return self.r_qm / self.r_us if self.r_us > 0 else math.inf

    def to_row(self) -> Tuple[int, float, float, float, float, float]:
        return self.l, self.p_us, self.p_qm, self.r_us, self.r_qm, self.ratio


def rates(s: SourceParams, l: int, splitter_switch: bool = False) -> RateResult:
    """
    l-photon probabilities and rates of the unsynchronised and memory-based sources.

    Args:
        s: Source parameters
        l: Number of photons
        splitter_switch: Apply the l^-l penalty of a switch built as an inverse l-way splitter

    Returns:
        RateResult with P_us = (p eta_w eta_r)^l and P_qm = I_{p eta_w}(l, M-l+1) eta_r^l
    """
    _check_l(s, l)
    p_us = (s.herald_probability * s.eta_r) ** l
    p_qm = p_at_least_l(s, l) * s.eta_r ** l
    if splitter_switch and l > 0:
        p_qm *= float(l) ** (-l)
    return RateResult(l, p_us, p_qm, p_us * s.rep_rate, p_qm * s.rep_rate)


def rate_table(s: SourceParams, l_max: int, splitter_switch: bool = False) -> List[RateResult]:
    """Rates for l = 1 .. l_max (capped at M)."""
    if l_max < 1:
        raise DomainError(f"l_max must be at least 1, got {l_max}")
    return [rates(s, l, splitter_switch) for l in range(1, min(l_max, s.modes) + 1)]


def mode_guideline(l: int, p: float, eta_w: float) -> int:
    """
    Number of modes M* = ceil(l (1 + 3/sqrt(l)) / (p eta_w)) that makes the l-photon
    tail exceed 0.98.
    """
    if l < 1:
        raise DomainError(f"l must be at least 1, got {l}")
    if p * eta_w <= 0:
        raise DomainError("p * eta_w must be positive")
    #rounding keeps exact products such as 2000.0000000000002 from stepping up
    return int(math.ceil(round(l * (1 + 3 / math.sqrt(l)) / (p * eta_w), 9)))


# ---------------------------------------------------------------- repeater oracle

def entangled_fraction(outcome: HeraldOutcome, basis: Sequence[Sequence[int]]) -> float:
    """
    Fidelity with a maximally entangled two-qubit state, maximised over local unitaries.

    Args:
        outcome: Heralded state of the kept modes
        basis: Occupations of the kept modes encoding |00>, |01>, |10>, |11>

    Returns:
        Largest eigenvalue of Re(rho) written in the magic basis; population outside the
        qubit subspace counts as infidelity
    """
    if outcome.empty:
        return 0.0
    flat = [outcome.flat_index(occ) for occ in basis]
    rho = outcome.density[np.ix_(flat, flat)]
    s = 1 / math.sqrt(2)
    # magic basis vectors as columns
    magic = np.array([[s, 1j * s, 0, 0],
                      [0, 0, 1j * s, s],
                      [0, 0, 1j * s, -s],
                      [s, -1j * s, 0, 0]], dtype=complex)
    rho_m = magic.conj().T @ rho @ magic
    return float(np.linalg.eigvalsh(rho_m.real).max())


def _eng_amplitudes(phi: float) -> Dict[Tuple[int, int, int, int], complex]:
    """ENG state over (first_K, first_K', second_K, second_K')."""
    e1 = np.exp(1j * phi)
    return {
        (1, 0, 0, 1): e1 / 2,
        (0, 1, 1, 0): e1 / 2,
        (1, 1, 0, 0): 0.5,
        (0, 0, 1, 1): e1 ** 2 / 2,
    }


def eng_pair_state(phi: float = 0.0, cutoff: int = 2) -> FockState:
    """|psi>_AB (x) |psi>_B'C on the eight ENC modes."""
    single = _eng_amplitudes(phi)
    product = {}
    for occ_ab, amp_ab in single.items():
        for occ_bc, amp_bc in single.items():
            occ = (occ_ab[0], occ_ab[1], occ_ab[2], occ_ab[3], occ_bc[0], occ_bc[1], occ_bc[2], occ_bc[3])
            product[occ] = amp_ab * amp_bc
    return FockState.from_amplitudes(ENC_LABELS, cutoff, product)


def _enc_circuit() -> BogoliubovTransform:
    """Mode beamsplitters at B and B' followed by the physical 50:50 beamsplitter between the nodes."""
    n = len(ENC_LABELS)
    t = 1 / math.sqrt(2)
    local = beamsplitter(t, (2, 3), n) @ beamsplitter(t, (4, 5), n)
    joint = beamsplitter(t, (2, 4), n) @ beamsplitter(t, (3, 5), n)
    return (joint @ local).relabel(ENC_LABELS)


@dataclass
class PatternOutcome:
    """Herald probability and conditional fidelity of one coincidence pattern."""
    name: str
    probability: float
    fidelity: float


@dataclass
class HeraldReport:
    patterns: List[PatternOutcome] = field(default_factory=list)

    @property
    def total_probability(self) -> float:
        return sum(o.probability for o in self.patterns)

    @property
    def min_fidelity(self) -> float:
        return min((o.fidelity for o in self.patterns), default=float('nan'))

    def to_dict(self) -> Dict[str, object]:
        return {
            'patterns': {o.name: {'probability': o.probability, 'fidelity': o.fidelity} for o in self.patterns},
            'total_probability': self.total_probability,
            'min_fidelity': self.min_fidelity,
        }


def enc_outcomes(phi: float = 0.0, cutoff: int = 2) -> HeraldReport:
    """
    Entanglement connection of two ideal ENG pairs, evaluated on the Fock oracle.

    Each of the coincidences D1&D2, D1&D3, D4&D2 and D4&D3 (exactly one photon in each
    of the two detectors, none in the other two) projects A and C on
    (|K>|K'> + |K'>|K>)/sqrt(2) up to local qubit operations.

    Args:
        phi: Channel phase of the ENG states
        cutoff: Fock cutoff per mode (2 suffices for two excitations per mode)

    Returns:
        HeraldReport with one entry per coincidence pattern
    """
    state = evolve(eng_pair_state(phi, cutoff), _enc_circuit())
    keep = (0, 1, 6, 7)
    # qubit 0 <-> K, qubit 1 <-> K' at both nodes
    basis = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    report = HeraldReport()
    for first, second in ENC_PATTERNS:
        conditions = {slot: NoClick for slot in ENC_DETECTORS.values()}
        conditions[ENC_DETECTORS[first]] = ExactlyOne
        conditions[ENC_DETECTORS[second]] = ExactlyOne
        outcome = heralded_state(state, HeraldPattern(conditions), keep)
        report.patterns.append(PatternOutcome(f'{first}{second}', outcome.probability,
                                              entangled_fraction(outcome, basis)))
    logger.debug("ENC herald probability %.6f at phi=%.3f", report.total_probability, phi)
    return report


def connected_pairs_state(cutoff: int = 2) -> FockState:
    """Two connected pairs {K1,K2} and {K3,K4} between nodes A and C."""
    s = 1 / math.sqrt(2)
    first = {((1, 0), (0, 1)): s, ((0, 1), (1, 0)): s}    # (A K1,K2), (C K1,K2)
    second = {((1, 0), (0, 1)): s, ((0, 1), (1, 0)): s}   # (A K3,K4), (C K3,K4)
    amplitudes = {}
    for (a12, c12), amp1 in first.items():
        for (a34, c34), amp2 in second.items():
            amplitudes[a12 + a34 + c12 + c34] = amp1 * amp2
    return FockState.from_amplitudes(PURIFICATION_LABELS, cutoff, amplitudes)


def purification_outcomes(cutoff: int = 2) -> HeraldReport:
    """
    Purification of two connected pairs into {K2, K3}.

    At each node a mode beamsplitter combines K1 and K4; exactly one photon in one of
    the two outputs at both nodes heralds success.

    Returns:
        HeraldReport with one entry per herald pattern
    """
    n = len(PURIFICATION_LABELS)
    t = 1 / math.sqrt(2)
    circuit = (beamsplitter(t, (0, 3), n) @ beamsplitter(t, (4, 7), n)).relabel(PURIFICATION_LABELS)
    state = evolve(connected_pairs_state(cutoff), circuit)
    keep = (1, 2, 5, 6)
    # qubit 0 <-> K2, qubit 1 <-> K3
    basis = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    report = HeraldReport()
    for a_click in (0, 3):
        for c_click in (4, 7):
            conditions = {0: NoClick, 3: NoClick, 4: NoClick, 7: NoClick}
            conditions[a_click] = ExactlyOne
            conditions[c_click] = ExactlyOne
            outcome = heralded_state(state, HeraldPattern(conditions), keep)
            name = f'{PURIFICATION_LABELS[a_click]}&{PURIFICATION_LABELS[c_click]}'
            report.patterns.append(PatternOutcome(name, outcome.probability, entangled_fraction(outcome, basis)))
    logger.debug("purification herald probability %.6f", report.total_probability)
    return report


# ------------------------------------------------------------ repeater Monte Carlo

def _select_mode_pairs(rng: np.random.Generator, successes: int, modes: int) -> np.ndarray:
    """
    Two distinct fired modes per successful ENG, chosen uniformly.

    The fired set is a uniform random subset, so a uniform pair inside it is a uniform
    pair of distinct modes.
    """
    first = rng.integers(0, modes, size=successes)
    second = rng.integers(0, modes - 1, size=successes)
    second = second + (second >= first)
    return np.stack([first, second], axis=1)


def _run_block(r: RepeaterParams, trials: int, seed: np.random.SeedSequence, p_enc: float,
               p_pur: float) -> Tuple[MonteCarloTally, np.ndarray]:
    rng = np.random.default_rng(seed)
    tally = MonteCarloTally(REPEATER_STAGES)
    tally.trials = trials
    x = r.p * r.eta_w
    counts_ab = rng.binomial(r.modes, x, size=trials)
    counts_bc = rng.binomial(r.modes, x, size=trials)
    ok_ab = counts_ab >= 2
    ok_bc = counts_bc >= 2
    tally.record('eng', 2 * trials, int(ok_ab.sum() + ok_bc.sum()))
    # (K, K') of every heralded A-B link; ENC and purification do not depend on the choice
    pairs = _select_mode_pairs(rng, int(ok_ab.sum()), r.modes)

    both = int(np.count_nonzero(ok_ab & ok_bc))
    enc_success = int(rng.binomial(both, p_enc * r.eta_r ** 2)) if both else 0
    tally.record('enc', both, enc_success)

    attempts = enc_success // 2
    pur_success = int(rng.binomial(attempts, p_pur * r.eta_r ** 2)) if attempts else 0
    tally.record('purification', attempts, pur_success)
    return tally, pairs


@dataclass
class RepeaterReport:
    """
    Merged Monte Carlo counts plus the oracle figures they were driven by.

    mode_pairs holds the (K, K') mode indices chosen for every heralded A-B link,
    in block order.
    """
    params: RepeaterParams
    tally: MonteCarloTally
    enc: HeraldReport
    purification: HeraldReport
    p_at_least_two: float
    mode_pairs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=int))

    def to_dict(self) -> Dict[str, object]:
        return {
            'params': dict(self.params.__dict__, eta_w=self.params.eta_w),
            'monte_carlo': self.tally.to_dict(),
            'enc': self.enc.to_dict(),
            'purification': self.purification.to_dict(),
            'p_at_least_two': self.p_at_least_two,
            'heralded_links': len(self.mode_pairs),
            'first_mode_pairs': self.mode_pairs[:10].tolist(),
        }


def repeater_monte_carlo(r: RepeaterParams, trials: int, seed: int, workers: int = MC_WORKERS,
                         block_trials: int = MC_BLOCK_TRIALS, phi: float = 0.0) -> RepeaterReport:
    """
    Monte Carlo of ENG, ENC and purification.

    Args:
        r: Link parameters
        trials: Number of protocol rounds
        seed: Root seed; block i uses the i-th spawned child
        workers: Threads used to run blocks
        block_trials: Trials per block
        phi: ENG channel phase used by the ENC oracle

    Returns:
        RepeaterReport whose counts do not depend on the worker count
    """
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    if block_trials < 1 or workers < 1:
        raise DomainError("block size and worker count must be positive")
    enc = enc_outcomes(phi)
    purification = purification_outcomes()
    n_blocks = math.ceil(trials / block_trials)
    sizes = [min(block_trials, trials - i * block_trials) for i in range(n_blocks)]
    seeds = np.random.SeedSequence(seed).spawn(n_blocks)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        blocks = list(executor.map(lambda args: _run_block(r, args[0], args[1], enc.total_probability,
                                                           purification.total_probability),
                                   zip(sizes, seeds)))
    tally = MonteCarloTally(REPEATER_STAGES)
    for block, _ in blocks:
        tally.merge(block)
    mode_pairs = np.concatenate([pairs for _, pairs in blocks])

    source = SourceParams(r.p, r.eta_w, 1.0, r.modes)
    p2 = p_at_least_l(source, 2)
    tally.set_expected('eng', p2)
    tally.set_expected('enc', enc.total_probability * r.eta_r ** 2)
    tally.set_expected('purification', purification.total_probability * r.eta_r ** 2)
    tally.extras['enc_fidelity'] = enc.min_fidelity
    tally.extras['purification_fidelity'] = purification.min_fidelity
    logger.debug("repeater Monte Carlo: %d trials in %d blocks on %d workers", trials, n_blocks, workers)
    return RepeaterReport(r, tally, enc, purification, p2, mode_pairs)
