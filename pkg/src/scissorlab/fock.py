"""Truncated multimode Fock spaces and exact linear-optical evolution.

States are dense complex amplitude vectors over a per-mode-truncated photon
number basis.  All operations are pure functions over immutable values, so
everything here is safe to call concurrently.  Beamsplitters are applied
block-by-block in total photon number using the exact matrix elements of the
untruncated two-mode rotation; amplitude that would land above a cutoff is
dropped and shows up as a norm deficit (leakage) rather than being reflected
back into the retained space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.linalg import expm

from .errors import (
    CutoffTooSmall,
    DegenerateCat,
    DimensionMismatch,
    ModeCollision,
    ModeOutOfRange,
    OccupationOutOfRange,
    ParameterOutOfRange,
)

DEFAULT_TRUNCATION_TOL = 1e-12

__all__ = [
    "FockSpace",
    "PureState",
    "DensityOperator",
    "Beamsplitter",
    "PhaseShift",
    "Loss",
    "Circuit",
    "fock_state",
    "coherent_state",
    "coherent_amplitudes",
    "cat2_state",
    "cat4_state",
    "epr_state",
    "apply_beamsplitter",
    "apply_phase",
    "tensor",
    "partial_trace",
    "to_density",
    "embed",
    "truncation_leakage",
    "number_expectation",
    "run_circuit",
    "transfer_matrix",
]


@dataclass(frozen=True)
class FockSpace:
    """A truncated multimode Fock space with an inclusive per-mode cutoff.

    ``FockSpace(5)`` is one mode holding 0..5 photons, ``FockSpace(5, 3)``
    three such modes, ``FockSpace((5, 2))`` two modes with different cutoffs.
    Zero-mode spaces (dimension 1, a bare scalar) arise when every mode of a
    state has been measured away and are permitted.
    """

    cutoffs: tuple[int, ...]

    def __init__(self, cutoffs: Union[int, Sequence[int]], num_modes: int | None = None):
        if isinstance(cutoffs, (int, np.integer)):
            cutoffs = (int(cutoffs),) * (1 if num_modes is None else num_modes)
        else:
            if num_modes is not None and num_modes != len(cutoffs):
                raise ValueError("num_modes disagrees with the cutoff sequence")
            cutoffs = tuple(int(c) for c in cutoffs)
        if any(c < 1 for c in cutoffs):
            raise ValueError("every cutoff must be >= 1")
        object.__setattr__(self, "cutoffs", cutoffs)

    @property
    def num_modes(self) -> int:
        return len(self.cutoffs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c + 1 for c in self.cutoffs)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.cutoffs else 1

    def index(self, occupation: Sequence[int]) -> int:
        """Flat basis index of the occupation tuple (C order)."""
        if len(occupation) != self.num_modes:
            raise ValueError("occupation length does not match mode count")
        for m, (n, c) in enumerate(zip(occupation, self.cutoffs)):
            if not 0 <= n <= c:
                raise OccupationOutOfRange(f"n={n} outside [0, {c}] on mode {m}")
        return int(np.ravel_multi_index(tuple(occupation), self.dims))

    def occupation(self, index: int) -> tuple[int, ...]:
        """Occupation tuple of a flat basis index."""
        return tuple(int(n) for n in np.unravel_index(index, self.dims))

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.num_modes:
            raise ModeOutOfRange(f"mode {mode} outside 0..{self.num_modes - 1}")

    def without(self, mode: int) -> "FockSpace":
        """The space with one mode removed (may have zero modes)."""
        self.check_mode(mode)
        rest = self.cutoffs[:mode] + self.cutoffs[mode + 1 :]
        space = object.__new__(FockSpace)
        object.__setattr__(space, "cutoffs", rest)
        return space


def _scalar_space() -> FockSpace:
    space = object.__new__(FockSpace)
    object.__setattr__(space, "cutoffs", ())
    return space


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PureState:
    """Amplitude vector over the Fock basis of ``space``.

    States may be unnormalized; heralded branches carry their weight in the
    norm.  The amplitude array is read-only.
    """

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.space.dim:
            raise DimensionMismatch(
                f"amplitude vector of length {amps.size} on a space of dimension {self.space.dim}"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def reshaped(self) -> np.ndarray:
        """Read-only view shaped (dim_0, ..., dim_{M-1})."""
        return self.amplitudes.reshape(self.space.dims)

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm_sq - 1.0) < tol

    def normalized(self) -> "PureState":
        n = math.sqrt(self.norm_sq)
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize a zero state")
        return PureState(self.space, self.amplitudes / n)

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        _require_same_space(self.space, other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian operator on a truncated Fock space; may be sub-normalized."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        d = self.space.dim
        if mat.shape != (d, d):
            raise DimensionMismatch(f"matrix shape {mat.shape} on a space of dimension {d}")
        if not np.allclose(mat, mat.conj().T, atol=1e-12):
            raise ValueError("density matrix is not hermitian within 1e-12")
        tr = float(np.trace(mat).real)
        if tr < -1e-12 or tr > 1.0 + 1e-12:
            raise ValueError(f"trace {tr} outside [0, 1]")
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityOperator":
        return DensityOperator(self.space, self.matrix / self.trace)

    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


def _require_same_space(a: FockSpace, b: FockSpace) -> None:
    if a.cutoffs != b.cutoffs:
        raise DimensionMismatch(f"spaces {a.cutoffs} and {b.cutoffs} differ")


def _canonical_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first nonzero amplitude is real positive."""
    nz = np.flatnonzero(np.abs(amps) > 1e-300)
    if nz.size == 0:
        return amps
    lead = amps[nz[0]]
    return amps * (abs(lead) / lead)


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

def fock_state(space: FockSpace, occupation: Union[int, Sequence[int]]) -> PureState:
    """Basis state |n_0, ..., n_{M-1}>."""
    if isinstance(occupation, (int, np.integer)):
        occupation = (int(occupation),)
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[space.index(occupation)] = 1.0
    return PureState(space, amps)


def coherent_amplitudes(gamma: complex, cutoff: int) -> np.ndarray:
    """Poissonian amplitudes e^{-|g|^2/2} g^n / sqrt(n!) for n = 0..cutoff."""
    n = np.arange(cutoff + 1)
    # log-domain to stay finite for large cutoff * amplitude combinations
    if gamma == 0:
        amps = np.zeros(cutoff + 1, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    mag = np.exp(-abs(gamma) ** 2 / 2 + n * math.log(abs(gamma)) - 0.5 * np.cumsum(np.log(np.maximum(n, 1))))
    phase = np.exp(1j * n * np.angle(gamma))
    return mag * phase


def coherent_state(
    space: FockSpace,
    mode: int,
    gamma: complex,
    tolerance: float = DEFAULT_TRUNCATION_TOL,
) -> PureState:
    """Coherent state |gamma> on one mode, vacuum elsewhere.

    The amplitudes are the analytic Poissonian ones, not renormalized after
    truncation.  If the truncated tail 1 - sum |c_n|^2 exceeds ``tolerance``
    the constructor raises ``CutoffTooSmall`` instead of renormalizing.
    """
    space.check_mode(mode)
    cut = space.cutoffs[mode]
    c = coherent_amplitudes(gamma, cut)
    leak = 1.0 - float(np.vdot(c, c).real)
    if leak > tolerance:
        raise CutoffTooSmall(leak)
    return _single_mode_product(space, mode, c)


def _single_mode_product(space: FockSpace, mode: int, mode_amps: np.ndarray) -> PureState:
    """State with the given amplitudes on one mode and vacuum on the others."""
    shape = [1] * space.num_modes
    shape[mode] = len(mode_amps)
    full = np.zeros(space.dims, dtype=np.complex128)
    index = [0] * space.num_modes
    index[mode] = slice(None)
    full[tuple(index)] = mode_amps
    return PureState(space, full.reshape(-1))


def cat2_state(
    space: FockSpace,
    mode: int,
    beta: complex,
    parity: str,
    tolerance: float = 1e-10,
) -> PureState:
    """Two-lobe cat state |beta> +/- |-beta>, normalized in the truncated space.

    ``parity`` is "even" (+, support on even photon numbers) or "odd" (-,
    support on odd ones).  The odd cat tends to |1> as beta -> 0 but is
    degenerate at exactly beta = 0.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    space.check_mode(mode)
    cut = space.cutoffs[mode]
    sign = 1.0 if parity == "even" else -1.0
    c = coherent_amplitudes(beta, cut) + sign * coherent_amplitudes(-beta, cut)
    norm_sq = float(np.vdot(c, c).real)
    # exact norm of the untruncated combination, for the leakage guard
    if parity == "even":
        exact = 2.0 * (1.0 + math.exp(-2.0 * abs(beta) ** 2))
    else:
        exact = -2.0 * math.expm1(-2.0 * abs(beta) ** 2)
    if norm_sq < 1e-280:
        raise DegenerateCat(f"{parity} cat with beta={beta}")
    if exact > 0 and (exact - norm_sq) / exact > tolerance:
        raise CutoffTooSmall((exact - norm_sq) / exact)
    c = _canonical_phase(c / math.sqrt(norm_sq))
    return _single_mode_product(space, mode, c)


def cat4_state(
    space: FockSpace,
    mode: int,
    beta: complex,
    residue: int,
    tolerance: float = 1e-10,
) -> PureState:
    """Four-lobe cat state sum_k i^{-rk} |beta i^k>, photon support n = r mod 4.

    The residue-3 class tends to |3> and the residue-2 class to |2> as
    beta -> 0; those limits are the resource states of the third- and
    second-order scissors.
    """
    if residue not in (0, 1, 2, 3):
        raise ValueError("residue must be in {0, 1, 2, 3}")
    space.check_mode(mode)
    cut = space.cutoffs[mode]
    c = np.zeros(cut + 1, dtype=np.complex128)
    for k in range(4):
        c += (1j ** (-residue * k)) * coherent_amplitudes(beta * 1j**k, cut)
    # the construction zeroes n != r (mod 4) analytically; enforce it exactly
    n = np.arange(cut + 1)
    c[n % 4 != residue] = 0.0
    norm_sq = float(np.vdot(c, c).real)
    if norm_sq < 1e-280:
        raise DegenerateCat(f"residue-{residue} cat with beta={beta}")
    exact = _cat4_exact_norm_sq(abs(beta), residue)
    if exact > 0 and (exact - norm_sq) / exact > tolerance:
        raise CutoffTooSmall((exact - norm_sq) / exact)
    c = _canonical_phase(c / math.sqrt(norm_sq))
    return _single_mode_product(space, mode, c)


def _cat4_exact_norm_sq(b: float, residue: int) -> float:
    """Norm^2 of the unnormalized four-lobe superposition at amplitude b.

    Equals 8 e^{-b^2} (sinh b^2 -/+ sin b^2) and so on per residue class, but
    is summed as the photon-number series 16 e^{-b^2} sum_{n=r mod 4} b^{2n}/n!
    to avoid the catastrophic cancellation the closed form suffers at small b.
    """
    x = b * b
    total = 0.0
    n = residue
    log_term = n * math.log(x) - math.lgamma(n + 1) if x > 0 else (0.0 if n == 0 else -math.inf)
    while True:
        term = math.exp(log_term)
        total += term
        if term < total * 1e-18 + 1e-300:
            break
        log_term += 4 * math.log(x) - sum(math.log(n + i) for i in range(1, 5))
        n += 4
    return 16.0 * math.exp(-x) * total


def epr_state(chi: float, cutoff: int, tolerance: float = DEFAULT_TRUNCATION_TOL) -> PureState:
    """Two-mode squeezed vacuum sqrt(1-chi^2) sum chi^n |nn> on a 2-mode space."""
    if not 0.0 <= chi < 1.0:
        raise ParameterOutOfRange(f"chi={chi} outside [0, 1)")
    tail = chi ** (2 * (cutoff + 1))  # geometric remainder of (1-chi^2) chi^{2n}
    if tail > tolerance:
        raise CutoffTooSmall(tail)
    space = FockSpace(cutoff, 2)
    amps = np.zeros(space.dims, dtype=np.complex128)
    n = np.arange(cutoff + 1)
    amps[n, n] = math.sqrt(1.0 - chi * chi) * chi ** n.astype(float)
    return PureState(space, amps.reshape(-1))


# ---------------------------------------------------------------------------
# linear-optical elements
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _bs_blocks(d1: int, d2: int, theta: float):
    """Exact rotation blocks of exp(theta (a1^dag a2 - a1 a2^dag)) per total n.

    Returns a list of (flat_two_mode_indices, block_matrix) pairs where the
    block is the full untruncated rotation restricted to the occupations that
    exist at cutoffs d1-1, d2-1.  Rows that would exceed a cutoff are absent,
    so applying the blocks loses exactly the amplitude pushed past the cutoff.
    """
    blocks = []
    for n in range((d1 - 1) + (d2 - 1) + 1):
        k_lo = max(0, n - (d2 - 1))
        k_hi = min(d1 - 1, n)
        if k_lo > k_hi:
            continue
        k_full = np.arange(n + 1)
        up = np.sqrt((k_full[:-1] + 1.0) * (n - k_full[:-1]))  # a1^dag a2 couplings
        gen = np.zeros((n + 1, n + 1))
        gen[k_full[:-1] + 1, k_full[:-1]] = up
        gen[k_full[:-1], k_full[:-1] + 1] = -up
        rot = expm(theta * gen)
        keep = np.arange(k_lo, k_hi + 1)
        sub = np.ascontiguousarray(rot[np.ix_(keep, keep)])
        flat = keep * d2 + (n - keep)
        blocks.append((flat, sub))
    return blocks


def _apply_two_mode_blocks(state: PureState, m1: int, m2: int, blocks) -> PureState:
    dims = state.space.dims
    order = [m1, m2] + [m for m in range(len(dims)) if m not in (m1, m2)]
    arr = state.reshaped.transpose(order)
    shape = arr.shape
    arr = arr.reshape(shape[0] * shape[1], -1)
    out = np.zeros_like(arr)
    for flat, sub in blocks:
        out[flat] = sub @ arr[flat]
    out = out.reshape(shape).transpose(np.argsort(order))
    return PureState(state.space, out.reshape(-1))


def apply_beamsplitter(state: PureState, m1: int, m2: int, transmissivity: float) -> PureState:
    """Mix modes m1 and m2 on a beamsplitter of the given power transmissivity.

    The convention is the real orthogonal one under which product coherent
    states map as (u, v) -> (sqrt(T) u + sqrt(1-T) v, sqrt(T) v - sqrt(1-T) u).
    Photon number is conserved; any amplitude pushed past a cutoff is dropped,
    which shows up as a norm deficit on the returned state.
    """
    space = state.space
    space.check_mode(m1)
    space.check_mode(m2)
    if m1 == m2:
        raise ModeCollision(f"beamsplitter needs two distinct modes, got {m1}")
    if not 0.0 <= transmissivity <= 1.0:
        raise ParameterOutOfRange(f"transmissivity {transmissivity} outside [0, 1]")
    theta = math.acos(min(1.0, math.sqrt(transmissivity)))
    blocks = _bs_blocks(space.dims[m1], space.dims[m2], theta)
    return _apply_two_mode_blocks(state, m1, m2, blocks)


def apply_phase(state: PureState, mode: int, phase: float) -> PureState:
    """Phase rotation |n> -> e^{i n phase} |n> on one mode."""
    state.space.check_mode(mode)
    d = state.space.dims[mode]
    factors = np.exp(1j * phase * np.arange(d))
    shape = [1] * state.space.num_modes
    shape[mode] = d
    out = state.reshaped * factors.reshape(shape)
    return PureState(state.space, out.reshape(-1))


# ---------------------------------------------------------------------------
# composition, reduction, bookkeeping
# ---------------------------------------------------------------------------

def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; mode order is a's modes followed by b's."""
    space = FockSpace(a.space.cutoffs + b.space.cutoffs)
    return PureState(space, np.kron(a.amplitudes, b.amplitudes))


def to_density(psi: PureState) -> DensityOperator:
    """|psi><psi| (unnormalized if psi is)."""
    return DensityOperator(psi.space, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def partial_trace(rho: DensityOperator, keep_modes: Iterable[int]) -> DensityOperator:
    """Trace out every mode not listed in ``keep_modes`` (result in mode order)."""
    keep = sorted(set(keep_modes))
    space = rho.space
    for m in keep:
        space.check_mode(m)
    dims = space.dims
    M = space.num_modes
    drop = [m for m in range(M) if m not in keep]
    tens = rho.matrix.reshape(dims + dims)
    for m in reversed(drop):
        # trace the m-th ket axis against the matching bra axis
        tens = np.trace(tens, axis1=m, axis2=m + tens.ndim // 2)
        # removing the ket axis shifts the bra block left by one
    new_space = FockSpace(tuple(space.cutoffs[m] for m in keep)) if keep else _scalar_space()
    d = new_space.dim
    return DensityOperator(new_space, tens.reshape(d, d))


def embed(state: PureState, space: FockSpace) -> PureState:
    """Pad a state into a larger space (same mode count, cutoffs >= old)."""
    old = state.space
    if old.num_modes != space.num_modes or any(
        a > b for a, b in zip(old.cutoffs, space.cutoffs)
    ):
        raise DimensionMismatch(f"cannot embed {old.cutoffs} into {space.cutoffs}")
    out = np.zeros(space.dims, dtype=np.complex128)
    out[tuple(slice(0, d) for d in old.dims)] = state.reshaped
    return PureState(space, out.reshape(-1))


def truncation_leakage(state: Union[PureState, DensityOperator]) -> float:
    """Population sitting in the top Fock level of each mode, summed over modes."""
    if isinstance(state, PureState):
        probs = np.abs(state.reshaped) ** 2
    else:
        probs = state.populations().reshape(state.space.dims)
    total = 0.0
    for m in range(state.space.num_modes):
        total += float(np.take(probs, -1, axis=m).sum())
    return total


def number_expectation(state: Union[PureState, DensityOperator], mode: int | None = None) -> float:
    """Expectation of the photon number on one mode (or the total if None)."""
    if isinstance(state, PureState):
        probs = np.abs(state.reshaped) ** 2
    else:
        probs = state.populations().reshape(state.space.dims)
    modes = range(state.space.num_modes) if mode is None else [mode]
    total = 0.0
    for m in modes:
        state.space.check_mode(m)
        n = np.arange(state.space.dims[m])
        axes = tuple(a for a in range(state.space.num_modes) if a != m)
        total += float(np.dot(probs.sum(axis=axes), n))
    return total


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Beamsplitter:
    m1: int
    m2: int
    transmissivity: float


@dataclass(frozen=True)
class PhaseShift:
    mode: int
    phase: float


@dataclass(frozen=True)
class Loss:
    """Pure-loss coupling of one mode to an unobserved vacuum environment."""

    mode: int
    transmissivity: float


CircuitElement = Union[Beamsplitter, PhaseShift, Loss]


@dataclass(frozen=True)
class Circuit:
    """An ordered list of linear-optical elements on a fixed space."""

    space: FockSpace
    elements: tuple[CircuitElement, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            if isinstance(el, Beamsplitter):
                self.space.check_mode(el.m1)
                self.space.check_mode(el.m2)
                if el.m1 == el.m2:
                    raise ModeCollision(f"beamsplitter on mode {el.m1} twice")
                if not 0.0 <= el.transmissivity <= 1.0:
                    raise ParameterOutOfRange(f"beamsplitter T={el.transmissivity}")
            elif isinstance(el, PhaseShift):
                self.space.check_mode(el.mode)
            elif isinstance(el, Loss):
                self.space.check_mode(el.mode)
                if not 0.0 <= el.transmissivity <= 1.0:
                    raise ParameterOutOfRange(f"loss tau={el.transmissivity}")
            else:
                raise TypeError(f"unknown circuit element {el!r}")

    @property
    def is_lossless(self) -> bool:
        return not any(isinstance(el, Loss) for el in self.elements)


def run_circuit(circuit: Circuit, state: PureState) -> PureState:
    """Evolve a pure state through a loss-free circuit."""
    _require_same_space(circuit.space, state.space)
    for el in circuit.elements:
        if isinstance(el, Beamsplitter):
            state = apply_beamsplitter(state, el.m1, el.m2, el.transmissivity)
        elif isinstance(el, PhaseShift):
            state = apply_phase(state, el.mode, el.phase)
        else:
            raise ValueError("circuit contains loss; use the heralded branch runner")
    return state


def transfer_matrix(elements: Sequence[CircuitElement], num_modes: int) -> np.ndarray:
    """Single-photon (coherent amplitude) transfer matrix of a loss-free network."""
    U = np.eye(num_modes, dtype=np.complex128)
    for el in elements:
        if isinstance(el, Beamsplitter):
            t = math.sqrt(el.transmissivity)
            r = math.sqrt(1.0 - el.transmissivity)
            block = np.eye(num_modes, dtype=np.complex128)
            block[el.m1, el.m1] = t
            block[el.m1, el.m2] = r
            block[el.m2, el.m1] = -r
            block[el.m2, el.m2] = t
            U = block @ U
        elif isinstance(el, PhaseShift):
            block = np.eye(num_modes, dtype=np.complex128)
            block[el.mode, el.mode] = np.exp(1j * el.phase)
            U = block @ U
        else:
            raise ValueError("transfer matrix undefined for lossy elements")
    return U
