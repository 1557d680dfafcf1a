"""Truncated Fock-space oracle for the spin-wave memory simulator.

Two independent evaluation paths check the Gaussian-network results:

Dense path (`prepare`, `evolve`, `heralded_state`, `moment`)
    Builds the full amplitude tensor over the truncated product basis. Thermal
    and phase-averaged inputs become a mixture of pure branches, two-mode
    squeezers act on vacuum through their Schmidt kernel, and passive blocks map
    every occupied input occupation through the linear creation-operator forms of
    the mode unitary. Probability mixed past the cutoff is counted in the deficit.
    Suitable for up to about a dozen modes at small cutoff.

Product path (`network_moment`)
    For the full interference networks. Every input unit (squeezed pair,
    thermal, Fock or phase-averaged coherent mode) is expanded in its Fock-number
    mixture, and the normally ordered moment of the passive outputs is summed
    over input multisets with permanent-like amplitudes.
"""
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from components.gaussnet import (BogoliubovTransform, Coherent, Fock, InputSpec, Thermal, Vacuum,
                                 squeezer)
from utils.config import FOCK_CUTOFF, FOCK_DENSE_LIMIT
from utils.errors import DomainError, UnsupportedOrderError

logger = logging.getLogger(__name__)


class HeraldCondition(Enum):
    EXACTLY_ONE = 'exactly_one'
    AT_LEAST_ONE = 'at_least_one'
    NO_CLICK = 'no_click'
    UNCONDITIONED = 'unconditioned'


ExactlyOne = HeraldCondition.EXACTLY_ONE
AtLeastOne = HeraldCondition.AT_LEAST_ONE
NoClick = HeraldCondition.NO_CLICK
Unconditioned = HeraldCondition.UNCONDITIONED


@dataclass(frozen=True)
class HeraldPattern:
    """Per-mode herald conditions; modes not listed are unconditioned."""
    conditions: Dict[int, HeraldCondition]

    def conditioned(self) -> List[int]:
        return [m for m, c in self.conditions.items() if c is not Unconditioned]


@dataclass
class FockState:
    """
    Mixture of pure states on a truncated product basis.

    Attributes:
        n_modes: Number of modes
        cutoff: Largest photon number per mode
        branches: (weight, amplitude tensor of shape (cutoff+1,)*n_modes)
        norm_deficit: Probability lost to truncation
        labels: Mode names
    """
    n_modes: int
    cutoff: int
    branches: List[Tuple[float, np.ndarray]]
    norm_deficit: float = 0.0
    labels: Tuple[str, ...] = ()

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.cutoff + 1,) * self.n_modes

    def norm(self) -> float:
        return float(sum(w * np.vdot(t, t).real for w, t in self.branches))

    def probabilities(self) -> np.ndarray:
        """Photon-number distribution over the truncated basis."""
        total = np.zeros(self.shape)
        for w, t in self.branches:
            total += w * np.abs(t) ** 2
        return total

    @classmethod
    def from_amplitudes(cls, labels: Sequence[str], cutoff: int,
                        amplitudes: Dict[Tuple[int, ...], complex]) -> 'FockState':
        """
        Pure state given by its nonzero amplitudes on occupation tuples.

        Args:
            labels: Mode names
            cutoff: Largest photon number per mode
            amplitudes: Map from occupation tuple to amplitude (normalised by the caller)

        Returns:
            FockState with one branch
        """
        n = len(labels)
        _check_dense_size(n, cutoff)
        tensor = np.zeros((cutoff + 1,) * n, dtype=complex)
        for occ, amp in amplitudes.items():
            if len(occ) != n or max(occ) > cutoff or min(occ) < 0:
                raise DomainError(f"occupation {occ} does not fit {n} modes at cutoff {cutoff}")
            tensor[tuple(occ)] += amp
        return cls(n, cutoff, [(1.0, tensor)], 0.0, tuple(labels))


def _check_dense_size(n_modes: int, cutoff: int):
    size = (cutoff + 1) ** n_modes
    if size > FOCK_DENSE_LIMIT:
        raise DomainError(f"dense Fock tensor of {size} amplitudes ({n_modes} modes, cutoff {cutoff}) "
                          f"exceeds the limit of {FOCK_DENSE_LIMIT}")


def _number_distribution(state, cutoff: int) -> Tuple[np.ndarray, float]:
    """Truncated photon-number distribution of a diagonal single-mode input and its deficit."""
    n = np.arange(cutoff + 1)
    if isinstance(state, Vacuum):
        probs = (n == 0).astype(float)
    elif isinstance(state, Thermal):
        nbar = state.nbar
        probs = np.exp(n * math.log(nbar) - (n + 1) * math.log1p(nbar)) if nbar > 0 else (n == 0).astype(float)
    elif isinstance(state, Fock):
        if state.n > cutoff:
            raise DomainError(f"Fock input n={state.n} above cutoff {cutoff}")
        probs = (n == state.n).astype(float)
    elif isinstance(state, Coherent):
        if not state.phase_averaged:
            raise DomainError("a coherent input with a fixed phase is not diagonal in the Fock basis")
        mean = abs(state.amplitude) ** 2
        probs = np.exp(n * math.log(mean) - mean - gammaln(n + 1)) if mean > 0 else (n == 0).astype(float)
    else:
        raise DomainError(f"unsupported input {state!r}")
    return probs, max(0.0, 1.0 - float(probs.sum()))


def _pair_distribution(x: float, cutoff: int) -> Tuple[np.ndarray, float]:
    n = np.arange(cutoff + 1)
    probs = (1 - x ** 2) * x ** (2 * n)
    return probs, max(0.0, 1.0 - float(probs.sum()))


def _parse_squeezers(stage: BogoliubovTransform) -> List[Tuple[int, int, float]]:
    """Decompose an active stage into two-mode squeezers on disjoint pairs."""
    M = stage.matrix
    n = stage.n_modes
    pairs = []
    rebuilt = BogoliubovTransform.identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            q = M[2 * i, 2 * j + 1]
            if abs(q) > 1e-15:
                x = float((q / M[2 * i, 2 * i]).real)
                pairs.append((i, j, x))
                rebuilt = squeezer(x, (i, j), n) @ rebuilt
    if not np.allclose(rebuilt.matrix, M, atol=1e-12):
        raise DomainError("active stage is not a product of real two-mode squeezers on disjoint pairs")
    return pairs


def _split_stages(stages: Sequence[BogoliubovTransform]):
    """Active stages must come first; returns the squeezed pairs and the combined passive unitary."""
    if not stages:
        raise DomainError("empty network")
    n = stages[0].n_modes
    pairs: List[Tuple[int, int, float]] = []
    U = np.eye(n, dtype=complex)
    seen_passive = False
    for stage in stages:
        if stage.truncated:
            raise DomainError("truncated transform rejected; complete it with unitary_completion first")
        if stage.n_modes != n:
            raise DomainError("all stages must act on the same modes")
        if stage.is_passive():
            seen_passive = True
            U = stage.passive_block @ U
        else:
            if seen_passive:
                raise DomainError("squeezers after passive elements are not supported by the oracle")
            pairs.extend(_parse_squeezers(stage))
    used = [m for p in pairs for m in p[:2]]
    if len(used) != len(set(used)):
        raise DomainError("squeezed pairs must be disjoint")
    return pairs, U


def _create(tensor: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    """
    Apply sum_k c_k a_k^dag to an amplitude tensor.

    Occupations pushed past the cutoff are dropped. Creation operators never lower an
    occupation, so every amplitude that stays inside the box is exact.
    """
    cutoff = tensor.shape[0] - 1
    out = np.zeros_like(tensor)
    for k, c in enumerate(coefficients):
        if c == 0:
            continue
        src = [slice(None)] * tensor.ndim
        dst = [slice(None)] * tensor.ndim
        src[k] = slice(0, cutoff)
        dst[k] = slice(1, None)
        scale = np.sqrt(np.arange(1, cutoff + 1)).reshape([-1 if i == k else 1 for i in range(tensor.ndim)])
        out[tuple(dst)] += c * scale * tensor[tuple(src)]
    return out


def _passive_image(occupations: Tuple[int, ...], U: np.ndarray, cutoff: int) -> np.ndarray:
    """U|n> = prod_l (sum_k U_kl a_k^dag)^n_l / sqrt(n_l!) |0>, restricted to the cutoff box."""
    tensor = np.zeros((cutoff + 1,) * len(occupations), dtype=complex)
    tensor[(0,) * len(occupations)] = 1
    for l, n_l in enumerate(occupations):
        for _ in range(n_l):
            tensor = _create(tensor, U[:, l])
        if n_l > 1:
            tensor /= math.sqrt(math.factorial(n_l))
    return tensor


def evolve(state: FockState, transform: Union[BogoliubovTransform, np.ndarray]) -> FockState:
    """
    Apply a passive mode unitary to every branch.

    The mixing conserves the total photon number and is evaluated exactly, one input
    occupation at a time. Probability carried past the cutoff is added to norm_deficit,
    so norm() + norm_deficit stays 1.

    Args:
        state: Input state
        transform: Passive, non-truncated BogoliubovTransform or its unitary block

    Returns:
        New FockState
    """
    if isinstance(transform, BogoliubovTransform):
        if transform.truncated:
            raise DomainError("truncated transform rejected; complete it with unitary_completion first")
        if not transform.is_passive():
            raise DomainError("evolve only applies passive transforms")
        U = transform.passive_block
    else:
        U = np.asarray(transform, dtype=complex)
    if U.shape != (state.n_modes, state.n_modes):
        raise DomainError(f"unitary of shape {U.shape} for a {state.n_modes}-mode state")
    if np.allclose(U, np.eye(state.n_modes)):
        return state
    images: Dict[Tuple[int, ...], np.ndarray] = {}
    branches = []
    leaked = 0.0
    for w, t in state.branches:
        out = np.zeros(state.shape, dtype=complex)
        for occ in zip(*np.nonzero(t)):
            occ = tuple(int(n) for n in occ)
            if occ not in images:
                images[occ] = _passive_image(occ, U, state.cutoff)
            out += t[occ] * images[occ]
        leaked += w * max(0.0, float(np.vdot(t, t).real - np.vdot(out, out).real))
        branches.append((w, out))
    logger.debug("evolved %d branches through %d occupations, leaked %.3e",
                 len(branches), len(images), leaked)
    return FockState(state.n_modes, state.cutoff, branches, state.norm_deficit + leaked, state.labels)


def prepare(network: Sequence[BogoliubovTransform], inputs: InputSpec, cutoff: int = FOCK_CUTOFF,
            labels: Optional[Sequence[str]] = None) -> FockState:
    """
    Build the output state of a network on the truncated basis.

    Args:
        network: Stages in application order; squeezers first, then passive elements
        inputs: Per-mode inputs; squeezed modes must start in vacuum
        cutoff: Largest photon number per mode
        labels: Mode names

    Returns:
        FockState

    Raises:
        DomainError: for truncated stages, oversized tensors or unsupported inputs
    """
    pairs, U = _split_stages(network)
    n = inputs.n_modes
    _check_dense_size(n, cutoff)
    paired = {}
    for i, j, x in pairs:
        for m in (i, j):
            if not isinstance(inputs[m], Vacuum):
                raise DomainError(f"squeezed mode {m} must start in vacuum")
        paired[i] = (i, j, x)
        paired[j] = (i, j, x)

    # units: (modes, options) with options a list of (weight, tensor over the unit's modes)
    units = []
    deficit_keep = 1.0
    done = set()
    for m in range(n):
        if m in done:
            continue
        if m in paired:
            i, j, x = paired[m]
            k = np.arange(cutoff + 1)
            kernel = np.diag(math.sqrt(1 - x ** 2) * x ** k).astype(complex)
            _, d = _pair_distribution(x, cutoff)
            deficit_keep *= 1 - d
            units.append(((i, j), [(1.0, kernel)]))
            done.update((i, j))
            continue
        state = inputs[m]
        if isinstance(state, Coherent) and not state.phase_averaged:
            k = np.arange(cutoff + 1)
            alpha = complex(state.amplitude)
            vec = np.zeros(cutoff + 1, dtype=complex)
            if alpha == 0:
                vec[0] = 1
            else:
                vec = np.exp(-abs(alpha) ** 2 / 2 + k * np.log(alpha) - 0.5 * gammaln(k + 1))
            deficit_keep *= float(np.vdot(vec, vec).real)
            units.append(((m,), [(1.0, vec)]))
        else:
            probs, d = _number_distribution(state, cutoff)
            deficit_keep *= 1 - d
            options = []
            for k_, w in enumerate(probs):
                if w > 0:
                    vec = np.zeros(cutoff + 1, dtype=complex)
                    vec[k_] = 1
                    options.append((float(w), vec))
            units.append(((m,), options))
        done.add(m)

    order = [m for modes, _ in units for m in modes]
    perm = np.argsort(order)
    branches = []
    for choice in itertools.product(*[opts for _, opts in units]):
        weight = 1.0
        tensor = np.ones((), dtype=complex)
        for w, t in choice:
            weight *= w
            tensor = np.multiply.outer(tensor, t)
        branches.append((weight, np.transpose(tensor, perm)))
    state = FockState(n, cutoff, branches, max(0.0, 1 - deficit_keep),
                      tuple(labels) if labels is not None else tuple(f'm{i}' for i in range(n)))
    logger.debug("prepared %d-mode state with %d branches, cutoff %d", n, len(branches), cutoff)
    return evolve(state, U)


@dataclass
class HeraldOutcome:
    """
    Conditional state of the kept modes.

    Attributes:
        probability: Herald probability
        density: Normalised density matrix over the kept modes (None when empty)
        keep: Kept mode indices, in density-matrix order
        cutoff: Largest photon number per mode
    """
    probability: float
    density: Optional[np.ndarray]
    keep: Tuple[int, ...]
    cutoff: int

    @property
    def empty(self) -> bool:
        return self.density is None

    def flat_index(self, occupations: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(occupations), (self.cutoff + 1,) * len(self.keep)))

    def population(self, occupations: Sequence[int]) -> float:
        if self.empty:
            return 0.0
        i = self.flat_index(occupations)
        return float(self.density[i, i].real)

    def coherence(self, bra: Sequence[int], ket: Sequence[int]) -> complex:
        """Element <bra| rho |ket>."""
        if self.empty:
            return 0j
        return complex(self.density[self.flat_index(bra), self.flat_index(ket)])

    def probabilities(self) -> np.ndarray:
        shape = (self.cutoff + 1,) * len(self.keep)
        if self.empty:
            return np.zeros(shape)
        return np.diag(self.density).real.reshape(shape)


def heralded_state(s: FockState, pattern: HeraldPattern, keep: Sequence[int]) -> HeraldOutcome:
    """
    Project on the herald pattern, trace out the rest and normalise.

    Args:
        s: State
        pattern: Conditions on herald modes
        keep: Modes whose conditional state is returned (disjoint from the conditioned modes)

    Returns:
        HeraldOutcome; an outcome with zero probability has density None
    """
    keep = tuple(keep)
    conditioned = set(pattern.conditioned())
    if conditioned & set(keep):
        raise DomainError(f"kept modes {keep} overlap the conditioned modes {sorted(conditioned)}")
    c = s.cutoff
    keep_dim = (c + 1) ** len(keep)
    rho = np.zeros((keep_dim, keep_dim), dtype=complex)
    for w, t in s.branches:
        index = []
        for m in range(s.n_modes):
            cond = pattern.conditions.get(m, Unconditioned)
            if cond is ExactlyOne:
                index.append(1)
            elif cond is NoClick:
                index.append(0)
            elif cond is AtLeastOne:
                index.append(slice(1, None))
            else:
                index.append(slice(None))
        sliced = t[tuple(index)]
        remaining = [m for m in range(s.n_modes) if not isinstance(index[m], int)]
        axes = [remaining.index(m) for m in keep] + [k for k, m in enumerate(remaining) if m not in keep]
        psi = np.transpose(sliced, axes).reshape(keep_dim, -1)
        rho += w * (psi @ psi.conj().T)
    probability = float(np.trace(rho).real)
    if probability <= 1e-300:
        return HeraldOutcome(0.0, None, keep, c)
    return HeraldOutcome(probability, rho / probability, keep, c)


def _factor(n: np.ndarray, power: int, normal_order: bool) -> np.ndarray:
    if normal_order:
        out = np.ones_like(n, dtype=float)
        for k in range(power):
            out = out * (n - k)
        return out
    return n.astype(float) ** power


def moment(target: Union[FockState, HeraldOutcome], modes: Sequence[int], normal_order: bool = True) -> float:
    """
    Expectation of a product of photon numbers on a state or a heralded outcome.

    Args:
        target: FockState, or HeraldOutcome (modes then index the original network)
        modes: Mode indices, repeats allowed, at most four
        normal_order: :prod n_i: (default) or the literal product

    Returns:
        Real expectation value
    """
    modes = list(modes)
    if len(modes) > 4:
        raise UnsupportedOrderError(f"moments support at most 4 number operators, got {len(modes)}")
    if isinstance(target, HeraldOutcome):
        probs = target.probabilities()
        try:
            axes = [target.keep.index(m) for m in modes]
        except ValueError:
            raise DomainError(f"modes {modes} are not all kept in {target.keep}") from None
    else:
        probs = target.probabilities()
        axes = modes
        for m in modes:
            if not 0 <= m < target.n_modes:
                raise DomainError(f"mode index {m} outside a {target.n_modes}-mode state")
    grids = np.indices(probs.shape)
    weight = np.ones(probs.shape)
    for axis in set(axes):
        weight = weight * _factor(grids[axis], axes.count(axis), normal_order)
    return float(np.sum(probs * weight))


@dataclass
class _Unit:
    modes: Tuple[int, ...]
    probs: np.ndarray


def _units_for(pairs, inputs: InputSpec, cutoff: int) -> Tuple[List[_Unit], float]:
    units = []
    keep = 1.0
    paired = set()
    for i, j, x in pairs:
        for m in (i, j):
            if not isinstance(inputs[m], Vacuum):
                raise DomainError(f"squeezed mode {m} must start in vacuum")
        probs, d = _pair_distribution(x, cutoff)
        units.append(_Unit((i, j), probs))
        keep *= 1 - d
        paired.update((i, j))
    for m, state in enumerate(inputs):
        if m in paired or isinstance(state, Vacuum):
            continue
        probs, d = _number_distribution(state, cutoff)
        units.append(_Unit((m,), probs))
        keep *= 1 - d
    return units, max(0.0, 1 - keep)


def _unit_expectation(unit: _Unit, counts: Dict[int, int]) -> float:
    n = np.arange(len(unit.probs))
    weight = np.ones(len(n))
    for m in unit.modes:
        weight = weight * _factor(n, counts.get(m, 0), True)
    return float(np.dot(unit.probs, weight))


def network_moment(network, modes: Sequence[Union[int, str]], cutoff: int = FOCK_CUTOFF,
                   with_deficit: bool = False):
    """
    Normally ordered moment :prod n_i: of a full network by Fock-mixture summation.

    Args:
        network: SpinWaveNetwork (completed automatically when truncated)
        modes: Output modes (indices or names), repeats allowed, at most four
        cutoff: Largest photon number per input mode
        with_deficit: Also return the truncation deficit of the input mixture

    Returns:
        The moment, or (moment, deficit)

    Raises:
        DomainError: when a squeezed pair has both partners mixed by the passive block
    """
    if network.truncated:
        network = network.completed()
    idx = [m if isinstance(m, int) else network.index(m) for m in modes]
    if len(idx) > 4:
        raise UnsupportedOrderError(f"moments support at most 4 number operators, got {len(idx)}")
    pairs, U = _split_stages(network.stages)
    n = U.shape[0]
    for i, j, _ in pairs:
        untouched = [m for m in (i, j)
                     if np.allclose(U[m], np.eye(n)[m]) and np.allclose(U[:, m], np.eye(n)[:, m])]
        if not untouched:
            raise DomainError(f"pair ({i}, {j}) is mixed on both sides; its Fock mixture is not exact")
    units, deficit = _units_for(pairs, network.inputs, cutoff)
    populated = sorted(m for u in units for m in u.modes)
    columns = [[l for l in populated if abs(U[o, l]) > 1e-15] for o in idx]

    amplitudes = defaultdict(complex)
    for cols in itertools.product(*columns):
        amp = 1 + 0j
        for o, l in zip(idx, cols):
            amp *= U[o, l]
        amplitudes[tuple(sorted(cols))] += amp

    unit_of = {m: u for u in units for m in u.modes}
    total = 0.0
    for multiset, amp in amplitudes.items():
        weight = abs(amp) ** 2
        if weight == 0:
            continue
        counts: Dict[int, int] = defaultdict(int)
        for l in multiset:
            counts[l] += 1
        expectation = 1.0
        for u in {id(unit_of[l]): unit_of[l] for l in counts}.values():
            expectation *= _unit_expectation(u, counts)
        total += weight * expectation
    logger.debug("network moment over %d multisets, deficit %.3e", len(amplitudes), deficit)
    return (total, deficit) if with_deficit else total
