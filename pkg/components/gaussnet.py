"""Gaussian bosonic network implementation for the spin-wave memory simulator.

Mode operators are ordered interleaved, (a1, a1^dag, a2, a2^dag, ...), and a
network is a 2N x 2N Bogoliubov matrix M acting in the Heisenberg picture:
the output operator vector is M times the input operator vector. Two-mode
squeezers model the write process, beamsplitters the change between displaced
and orthogonal modes, and the three-way splitter the ac Stark grating.

Photon-number moments of the output are evaluated with Wick's theorem over the
ordered two-point functions <o_k o_l> = (M C_in M^T)_{kl} and the output means
M mu_in, which is exact for the Gaussian inputs used here.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from utils.errors import CompletionError, DomainError, UnsupportedOrderError

logger = logging.getLogger(__name__)

MAX_ORDER = 4


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Thermal:
    nbar: float

    def __post_init__(self):
        if self.nbar < 0:
            raise DomainError(f"thermal occupation must be non-negative, got nbar={self.nbar}")


@dataclass(frozen=True)
class Coherent:
    """Coherent input; with phase_averaged the displacement phase is uniformly random."""
    amplitude: complex
    phase_averaged: bool = False


@dataclass(frozen=True)
class Fock:
    """Number state input (only the Fock oracle can evaluate it)."""
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"Fock input needs n >= 0, got {self.n}")


ModeInput = Union[Vacuum, Thermal, Coherent, Fock]


class InputSpec:
    """
    Per-mode initial conditions of a network.
    """
    def __init__(self, states: Sequence[ModeInput]):
        self.states: Tuple[ModeInput, ...] = tuple(states)

    @classmethod
    def vacuum(cls, n_modes: int) -> 'InputSpec':
        return cls([Vacuum()] * n_modes)

    def with_mode(self, index: int, state: ModeInput) -> 'InputSpec':
        states = list(self.states)
        states[index] = state
        return InputSpec(states)

    def extended(self, n_modes: int) -> 'InputSpec':
        """Pad with vacuum inputs up to n_modes (auxiliary modes of a completion)."""
        return InputSpec(list(self.states) + [Vacuum()] * (n_modes - len(self.states)))

    @property
    def n_modes(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, index):
        return self.states[index]

    def __len__(self):
        return len(self.states)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Canonical antisymmetric form in the interleaved ordering, [a, a^dag] = 1."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class BogoliubovTransform:
    """
    Linear transformation of the mode operators.

    Attributes:
        matrix: 2N x 2N complex matrix in interleaved ordering
        truncated: True for knowingly non-symplectic transforms (bare three-way splitter)
        labels: Optional mode names
    """
    def __init__(self, matrix, truncated: bool = False, labels: Optional[Sequence[str]] = None):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise DomainError(f"Bogoliubov matrix must be 2N x 2N, got shape {matrix.shape}")
        self.matrix = matrix
        self.truncated = bool(truncated)
        self.labels = tuple(labels) if labels is not None else tuple(f'm{i}' for i in range(matrix.shape[0] // 2))
        if len(self.labels) != self.n_modes:
            raise DomainError(f"{len(self.labels)} labels for {self.n_modes} modes")

    @classmethod
    def identity(cls, n_modes: int, labels: Optional[Sequence[str]] = None) -> 'BogoliubovTransform':
        return cls(np.eye(2 * n_modes), labels=labels)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def compose(self, other: 'BogoliubovTransform') -> 'BogoliubovTransform':
        """Transform that applies `other` first and then `self`."""
        if other.n_modes != self.n_modes:
            raise DomainError(f"cannot compose {self.n_modes}-mode and {other.n_modes}-mode transforms")
        return BogoliubovTransform(self.matrix @ other.matrix, self.truncated or other.truncated, self.labels)

    def __matmul__(self, other: 'BogoliubovTransform') -> 'BogoliubovTransform':
        return self.compose(other)

    def is_symplectic(self, tol: float = 1e-10) -> bool:
        omega = symplectic_form(self.n_modes)
        return bool(np.allclose(self.matrix @ omega @ self.matrix.T, omega, atol=tol, rtol=0))

    def is_passive(self, tol: float = 1e-14) -> bool:
        """No mixing of annihilation and creation operators."""
        return bool(np.all(np.abs(self.matrix[0::2, 1::2]) <= tol) and np.all(np.abs(self.matrix[1::2, 0::2]) <= tol))

    @property
    def passive_block(self) -> np.ndarray:
        """Annihilation-operator block U with o_k = sum_l U_kl a_l."""
        return self.matrix[0::2, 0::2]

    def extend(self, n_modes: int, labels: Optional[Sequence[str]] = None) -> 'BogoliubovTransform':
        """Act as identity on additional modes appended at the end."""
        if n_modes < self.n_modes:
            raise DomainError(f"cannot shrink a {self.n_modes}-mode transform to {n_modes} modes")
        matrix = np.eye(2 * n_modes, dtype=complex)
        matrix[:2 * self.n_modes, :2 * self.n_modes] = self.matrix
        if labels is None:
            labels = list(self.labels) + [f'aux{i}' for i in range(n_modes - self.n_modes)]
        return BogoliubovTransform(matrix, self.truncated, labels)

    def relabel(self, labels: Sequence[str]) -> 'BogoliubovTransform':
        return BogoliubovTransform(self.matrix, self.truncated, labels)

    def to_csv_rows(self):
        """Row-major (row, column, Re, Im) entries."""
        return [(i, j, v.real, v.imag) for (i, j), v in np.ndenumerate(self.matrix)]


def _check_modes(modes: Sequence[int], n_modes: int):
    if len(set(modes)) != len(modes):
        raise DomainError(f"mode indices must be distinct, got {tuple(modes)}")
    for m in modes:
        if not 0 <= m < n_modes:
            raise DomainError(f"mode index {m} outside a {n_modes}-mode network")


def embed(block: np.ndarray, modes: Sequence[int], n_modes: int, truncated: bool = False) -> BogoliubovTransform:
    """
    Place a 2k x 2k block acting on `modes` into the N-mode identity.
    """
    _check_modes(modes, n_modes)
    idx = [2 * m + s for m in modes for s in (0, 1)]
    matrix = np.eye(2 * n_modes, dtype=complex)
    matrix[np.ix_(idx, idx)] = block
    return BogoliubovTransform(matrix, truncated)


def passive(U: np.ndarray, modes: Optional[Sequence[int]] = None, n_modes: Optional[int] = None,
            truncated: bool = False) -> BogoliubovTransform:
    """
    Bogoliubov form of the mode mixing o_k = sum_l U_kl a_l.
    """
    U = np.asarray(U, dtype=complex)
    k = U.shape[0]
    block = np.zeros((2 * k, 2 * k), dtype=complex)
    block[0::2, 0::2] = U
    block[1::2, 1::2] = U.conj()
    modes = list(range(k)) if modes is None else list(modes)
    return embed(block, modes, k if n_modes is None else n_modes, truncated)


def squeezer(p: float, modes: Tuple[int, int] = (0, 1), n_modes: int = 2) -> BogoliubovTransform:
    """
    Two-mode squeezer of the write process.

    Args:
        p: Pair amplitude (tanh of the squeezing parameter), 0 <= p < 1; the mean
           occupation of each mode on vacuum is p^2 / (1 - p^2)
        modes: (w, r) mode indices
        n_modes: Size of the network

    Returns:
        BogoliubovTransform

    Raises:
        DomainError: if p is outside [0, 1)
    """
    if not 0 <= p < 1:
        raise DomainError(f"squeezer amplitude must lie in [0, 1), got p={p}")
    c = 1 / math.sqrt(1 - p ** 2)
    q = p * c
    block = np.array([[c, 0, 0, q],
                      [0, c, q, 0],
                      [0, q, c, 0],
                      [q, 0, 0, c]], dtype=complex)
    return embed(block, modes, n_modes)


def beamsplitter(tau: float, modes: Tuple[int, int] = (0, 1), n_modes: int = 2) -> BogoliubovTransform:
    """
    Real beamsplitter x' = tau x + s y, y' = -s x + tau y with s = sqrt(1 - tau^2).
    """
    if not 0 <= tau <= 1:
        raise DomainError(f"beamsplitter transmission must lie in [0, 1], got tau={tau}")
    s = math.sqrt(1 - tau ** 2)
    return passive(np.array([[tau, s], [-s, tau]]), modes, n_modes)


def phase_shift(phi: float, mode: int, n_modes: int) -> BogoliubovTransform:
    return passive(np.array([[np.exp(1j * phi)]]), [mode], n_modes)


def threeway_splitter_block(theta: float) -> np.ndarray:
    """Annihilation block of the three-way splitter in (vb, rb, ra, va) order."""
    block = np.eye(4, dtype=complex)
    for j in range(4):
        if j - 1 >= 0:
            block[j - 1, j] = np.exp(1j * theta)
        if j + 1 < 4:
            block[j + 1, j] = -np.exp(-1j * theta)
    return block / math.sqrt(3)


def threeway_splitter(theta: float, quadruple: Tuple[int, int, int, int] = (0, 1, 2, 3),
                      n_modes: int = 4) -> BogoliubovTransform:
    """
    Three-way splitter of the balanced sine grating on modes (vb, rb, ra, va).

    The edge rows (vb, va) only see two of the three orders and have norm sqrt(2/3);
    the transform is flagged truncated and is not symplectic.

    Args:
        theta: Grating phase in rad
        quadruple: Mode indices of (vb, rb, ra, va)
        n_modes: Size of the network

    Returns:
        BogoliubovTransform with truncated=True
    """
    return passive(threeway_splitter_block(theta), quadruple, n_modes, truncated=True)


def unitary_completion(t: BogoliubovTransform, tol: float = 1e-12) -> BogoliubovTransform:
    """
    Embed a truncated passive transform into a unitary one on extra vacuum modes.

    Rows that already have unit norm and are mutually orthogonal are kept exactly.
    Every other row is orthogonalised against the accepted rows and topped up to
    unit norm with its own auxiliary mode; the remaining rows of the square
    matrix span the orthogonal complement.

    Args:
        t: Truncated passive transform
        tol: Tolerance of the unit-norm and orthogonality tests

    Returns:
        Symplectic BogoliubovTransform on N + (number of deficient rows) modes;
        the auxiliary modes are appended and labelled aux0, aux1, ...

    Raises:
        DomainError: if t is not flagged truncated
        CompletionError: if t is active or a row cannot be completed
    """
    if not t.truncated:
        raise DomainError("unitary_completion expects a transform flagged truncated")
    if not t.is_passive():
        raise CompletionError("only passive truncated transforms can be completed")
    U = t.passive_block
    n = U.shape[0]
    kept: List[int] = []
    for i in range(n):
        row = U[i]
        if abs(np.linalg.norm(row) - 1) <= tol and all(abs(np.vdot(U[k], row)) <= tol for k in kept):
            kept.append(i)
    deficient = [i for i in range(n) if i not in kept]
    total = n + len(deficient)

    rows = np.zeros((n, total), dtype=complex)
    basis = []
    for i in kept:
        rows[i, :n] = U[i]
        basis.append(rows[i])
    for aux, i in enumerate(deficient):
        v = np.zeros(total, dtype=complex)
        v[:n] = U[i]
        for b in basis:
            v = v - np.vdot(b, v) * b
        r2 = float(np.vdot(v, v).real)
        if r2 > 1 + tol:
            raise CompletionError(f"row {i} has norm {math.sqrt(r2):.6f} > 1 after orthogonalisation")
        v[n + aux] = math.sqrt(max(0.0, 1 - r2))
        rows[i] = v
        basis.append(v)

    complement = null_space(rows)
    if complement.shape[1] != total - n:
        raise CompletionError(f"rank defect while completing: expected {total - n} free rows, "
                              f"found {complement.shape[1]}")
    full = np.vstack([rows, complement.conj().T])
    if not np.allclose(full @ full.conj().T, np.eye(total), atol=1e-10):
        raise CompletionError("completed matrix is not unitary")
    logger.debug("completed %d-mode transform with %d auxiliary modes", n, len(deficient))
    labels = list(t.labels) + [f'aux{k}' for k in range(len(deficient))]
    return passive(full).relabel(labels)


@dataclass
class SecondMoments:
    """
    Output moments of a Gaussian network.

    Attributes:
        A: <a_i a_j>
        B: <a_i^dag a_j>
        mean: <a_i>
    """
    A: np.ndarray
    B: np.ndarray
    mean: np.ndarray


def _input_statistics(inputs: InputSpec, phases: Optional[Sequence[float]] = None):
    n = inputs.n_modes
    mu = np.zeros(2 * n, dtype=complex)
    cov = np.zeros((2 * n, 2 * n), dtype=complex)
    averaged = iter(phases if phases is not None else ())
    for i, state in enumerate(inputs):
        nbar = 0.0
        if isinstance(state, Thermal):
            nbar = state.nbar
        elif isinstance(state, Coherent):
            alpha = complex(state.amplitude)
            if state.phase_averaged and phases is not None:
                alpha *= np.exp(1j * next(averaged))
            mu[2 * i] = alpha
            mu[2 * i + 1] = alpha.conjugate()
        elif isinstance(state, Fock):
            raise DomainError(f"mode {i} has a Fock input; Gaussian moments need Vacuum, Thermal or Coherent")
        cov[2 * i, 2 * i + 1] = nbar + 1
        cov[2 * i + 1, 2 * i] = nbar
    return mu, cov


def _output_statistics(t: BogoliubovTransform, inputs: InputSpec, phases=None):
    if inputs.n_modes != t.n_modes:
        raise DomainError(f"{inputs.n_modes} inputs for a {t.n_modes}-mode network")
    mu, cov = _input_statistics(inputs, phases)
    M = t.matrix
    return M @ mu, M @ cov @ M.T


def second_moments(t: BogoliubovTransform, inputs: InputSpec) -> SecondMoments:
    """
    Output A, B blocks and mean vector (displacements of averaged coherent inputs kept at phase 0).
    """
    mu, cov = _output_statistics(t, inputs)
    a_mean = mu[0::2]
    A = cov[0::2, 0::2] + np.outer(a_mean, a_mean)
    B = cov[1::2, 0::2] + np.outer(a_mean.conj(), a_mean)
    return SecondMoments(A, B, a_mean)


def _wick(ops: Tuple[int, ...], mu: np.ndarray, cov: np.ndarray) -> complex:
    """Ordered Wick expansion with means: first operator is either its mean or contracted with a later one."""
    if not ops:
        return 1.0
    first, rest = ops[0], ops[1:]
    total = mu[first] * _wick(rest, mu, cov) if mu[first] != 0 else 0.0
    for k, other in enumerate(rest):
        c = cov[first, other]
        if c != 0:
            total += c * _wick(rest[:k] + rest[k + 1:], mu, cov)
    return total


def operator_sequence(modes: Sequence[int], normal_order: bool = True) -> Tuple[int, ...]:
    """Indices into the interleaved operator vector for prod n_i (normal ordered or literal)."""
    if normal_order:
        return tuple(2 * m + 1 for m in modes) + tuple(2 * m for m in reversed(modes))
    return tuple(idx for m in modes for idx in (2 * m + 1, 2 * m))


def _phase_grid(inputs: InputSpec, order: int, phase_samples: Optional[int], seed: Optional[int]):
    averaged = sum(1 for s in inputs if isinstance(s, Coherent) and s.phase_averaged)
    if averaged == 0:
        return [None]
    if phase_samples:
        rng = np.random.default_rng(seed)
        return list(rng.uniform(0, 2 * math.pi, size=(phase_samples, averaged)))
    k = 2 * order + 1
    nodes = 2 * math.pi * np.arange(k) / k
    return list(itertools.product(nodes, repeat=averaged))


def moments(t: BogoliubovTransform, inputs: InputSpec, modes: Sequence[int], normal_order: bool = True,
            phase_samples: Optional[int] = None, seed: Optional[int] = None) -> float:
    """
    Expectation of a product of output photon numbers.

    Args:
        t: Network
        inputs: Per-mode inputs (Vacuum, Thermal, Coherent)
        modes: Output mode indices, repeats allowed, at most four
        normal_order: Evaluate :prod n_i: (default) or the literal product
        phase_samples: Monte Carlo phase samples for phase-averaged coherent inputs;
                       by default the average is an exact uniform quadrature
        seed: Seed of the Monte Carlo phase samples

    Returns:
        Real expectation value

    Raises:
        UnsupportedOrderError: for more than four number operators
        DomainError: for invalid modes or Fock inputs
    """
    modes = list(modes)
    if len(modes) > MAX_ORDER:
        raise UnsupportedOrderError(f"moments support at most {MAX_ORDER} number operators, got {len(modes)}")
    for m in modes:
        if not 0 <= m < t.n_modes:
            raise DomainError(f"mode index {m} outside a {t.n_modes}-mode network")
    ops = operator_sequence(modes, normal_order)
    grid = _phase_grid(inputs, len(modes), phase_samples, seed)
    total = 0j
    for phases in grid:
        mu, cov = _output_statistics(t, inputs, phases)
        total += _wick(ops, mu, cov)
    return float((total / len(grid)).real)
