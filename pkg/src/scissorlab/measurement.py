"""Heralded photon detection on truncated Fock states.

Detectors are photon-number-resolving (PNR) projectors or on-off POVMs
(vacuum versus anything else), optionally preceded by a loss channel of
transmissivity tau_d modelling the quantum efficiency.  Measured modes are
removed from the space of the heralded state, and heralded outputs are
returned unnormalized with the heralding probability alongside.

The key internal representation is a branch ensemble: a list of unnormalized
pure states whose outer-product sum is the (sub-normalized) output operator.
Detection with efficiency maps each branch to one branch per occupied source
level j of the measured mode, carrying the combined weight of every way the
detector could see the recorded outcome given j incident photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .channels import pure_loss
from .errors import OccupationOutOfRange, ParameterOutOfRange
from .fock import DensityOperator, FockSpace, PureState

__all__ = [
    "DetectorModel",
    "ClickPattern",
    "project_pnr",
    "measure_on_off",
    "detect",
]

PNR = "pnr"
ON_OFF = "onoff"


@dataclass(frozen=True)
class DetectorModel:
    """Detector kind ("pnr" or "onoff") with quantum efficiency in [0, 1]."""

    kind: str = PNR
    efficiency: float = 1.0

    def __post_init__(self):
        if self.kind not in (PNR, ON_OFF):
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ParameterOutOfRange(f"efficiency {self.efficiency} outside [0, 1]")


IDEAL_PNR = DetectorModel(PNR, 1.0)


@dataclass(frozen=True)
class ClickPattern:
    """Outcomes for a set of measured modes.

    Outcomes are photon counts for PNR detection or "on"/"off" flags for
    on-off detection; one entry per measured mode.
    """

    modes: tuple[int, ...]
    outcomes: tuple

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if len(self.modes) != len(self.outcomes):
            raise ValueError("pattern length does not match number of measured modes")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("duplicate measured mode")


def _slice_weights(outcome, dim: int, model: DetectorModel) -> np.ndarray:
    """Amplitude weight per source photon level j for one detection outcome.

    Level j of the measured mode contributes the heralded branch
    w_j * <j| state, where w_j^2 is the probability that a detector of the
    given kind and efficiency reports the outcome on j incident photons.
    """
    tau = model.efficiency
    j = np.arange(dim, dtype=float)
    if isinstance(outcome, (int, np.integer)):
        n = int(outcome)
        if not 0 <= n < dim:
            raise OccupationOutOfRange(f"count {n} outside 0..{dim - 1}")
        w2 = np.zeros(dim)
        for src in range(n, dim):
            w2[src] = math.comb(src, src - n) * tau**n * (1.0 - tau) ** (src - n)
        return np.sqrt(w2)
    if outcome == "off":
        return np.sqrt((1.0 - tau) ** j)
    if outcome == "on":
        return np.sqrt(1.0 - (1.0 - tau) ** j)
    raise ValueError(f"unknown outcome {outcome!r}")


def _pnr_outcome_weights(outcome, dim: int, model: DetectorModel) -> np.ndarray:
    # on-off outcomes need `kind == onoff`; integer counts work for either kind
    if isinstance(outcome, str) and model.kind != ON_OFF:
        raise ValueError("on/off outcome requires an on-off detector")
    return _slice_weights(outcome, dim, model)


def _measure_mode_branches(
    branches: Sequence[PureState],
    mode: int,
    outcome,
    model: DetectorModel,
) -> list[PureState]:
    """One detection on a branch ensemble; the measured mode is removed."""
    out: list[PureState] = []
    for psi in branches:
        space = psi.space
        d = space.dims[mode]
        weights = _pnr_outcome_weights(outcome, d, model)
        arr = np.moveaxis(psi.reshaped, mode, 0)
        small = space.without(mode)
        for j in np.flatnonzero(weights):
            amps = weights[j] * arr[j]
            branch = PureState(small, amps.reshape(-1))
            if branch.norm_sq > 0.0:
                out.append(branch)
    return out


def _branches_to_operator(branches: Sequence[PureState], space: FockSpace) -> DensityOperator:
    mat = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for b in branches:
        mat += np.outer(b.amplitudes, b.amplitudes.conj())
    return DensityOperator(space, mat)


def project_pnr(
    state: Union[PureState, DensityOperator],
    mode: int,
    n: int,
) -> tuple[Union[PureState, DensityOperator], float]:
    """Project one mode onto |n> with an ideal PNR detector.

    Returns the unnormalized heralded state on the remaining modes and the
    heralding probability <n|.|n> of the measured mode.
    """
    space = state.space
    space.check_mode(mode)
    if not 0 <= n <= space.cutoffs[mode]:
        raise OccupationOutOfRange(f"n={n} exceeds cutoff {space.cutoffs[mode]}")
    small = space.without(mode)
    if isinstance(state, PureState):
        arr = np.moveaxis(state.reshaped, mode, 0)
        heralded = PureState(small, arr[n].reshape(-1))
        return heralded, heralded.norm_sq
    dims = space.dims
    M = space.num_modes
    tens = state.matrix.reshape(dims + dims)
    tens = np.moveaxis(np.moveaxis(tens, mode, 0), M + mode, 1)
    block = tens[n, n]
    rho = DensityOperator(small, block.reshape(small.dim, small.dim))
    return rho, rho.trace


def measure_on_off(
    state: Union[PureState, DensityOperator],
    mode: int,
    outcome: str,
) -> tuple[DensityOperator, float]:
    """Apply the on-off POVM {|0><0|, 1 - |0><0|} to one mode.

    The "on" outcome mixes every n >= 1 projection branch, so the heralded
    state is a density operator even for pure input.
    """
    if outcome not in ("on", "off"):
        raise ValueError("outcome must be 'on' or 'off'")
    if isinstance(state, PureState):
        branches = _measure_mode_branches([state], mode, outcome, DetectorModel(ON_OFF, 1.0))
        small = state.space.without(mode)
        rho = _branches_to_operator(branches, small)
        return rho, rho.trace
    space = state.space
    space.check_mode(mode)
    small = space.without(mode)
    dims = space.dims
    M = space.num_modes
    tens = state.matrix.reshape(dims + dims)
    tens = np.moveaxis(np.moveaxis(tens, mode, 0), M + mode, 1)
    if outcome == "off":
        block = tens[0, 0]
    else:
        block = np.trace(tens, axis1=0, axis2=1) - tens[0, 0]
    rho = DensityOperator(small, block.reshape(small.dim, small.dim))
    return rho, rho.trace


def detect(
    state: Union[PureState, DensityOperator],
    modes: Sequence[int],
    pattern: Sequence,
    model: DetectorModel = IDEAL_PNR,
) -> tuple[DensityOperator, float]:
    """Measure several modes with a common detector model.

    Each measured mode passes through a loss channel of the detector
    efficiency and is then read out ideally; the joint heralding probability
    and the unnormalized heralded operator on the remaining modes are
    returned.  Modes are removed from the space in the process.
    """
    if isinstance(pattern, ClickPattern):
        modes, pattern = pattern.modes, pattern.outcomes
    modes = tuple(modes)
    pattern = tuple(pattern)
    if len(modes) != len(pattern):
        raise ValueError("pattern length does not match number of measured modes")
    if isinstance(state, DensityOperator):
        # loss then ideal readout, mode by mode; descending order keeps the
        # remaining indices valid as measured modes are removed
        rho = state
        for i in sorted(range(len(modes)), key=lambda i: -modes[i]):
            if model.efficiency < 1.0:
                rho = pure_loss(rho, modes[i], model.efficiency)
            if isinstance(pattern[i], str):
                rho, _ = measure_on_off(rho, modes[i], pattern[i])
            else:
                rho, _ = project_pnr(rho, modes[i], pattern[i])
        return rho, rho.trace
    branches = [state]
    order = sorted(range(len(modes)), key=lambda i: -modes[i])
    for i in order:
        branches = _measure_mode_branches(branches, modes[i], pattern[i], model)
    small = state.space
    for i in order:
        small = small.without(modes[i])
    rho = _branches_to_operator(branches, small)
    return rho, rho.trace
