"""Quantum scissor devices: analytic transforms and full circuit models.

A scissor of order m truncates an input state at photon number m and
multiplies each retained Fock coefficient by g^n, heralded on a pattern of
single-photon detections.  The analytic transforms below give the heralded
states in closed form; ``build_scissor_circuit`` produces the equivalent
linear-optical circuit (gain beamsplitter, balanced splitter network, phase
shifts, Fock resource) whose simulation must reproduce them, which is the
master correctness oracle of the package.

Probability conventions: the analytic transforms return the unnormalized
heralded state of the canonical click pattern, and the reported success
probability includes the multiplicity of equivalent patterns (2 for order 1,
4 for order 3) that feed-forward phase correction makes usable.  For the
parallel-scissor amplifier the reported probability is the bare squared norm
of the canonical-pattern output, without any per-scissor feed-forward
credit; see the package README for the full accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import loss_on_kraus_branches
from .errors import (
    CutoffTooSmall,
    DimensionMismatch,
    ParameterOutOfRange,
    UnsupportedOrder,
    ZeroProbability,
)
from .fock import (
    Beamsplitter,
    Circuit,
    DensityOperator,
    FockSpace,
    Loss,
    PhaseShift,
    PureState,
    _cat4_exact_norm_sq,
    apply_beamsplitter,
    apply_phase,
    coherent_amplitudes,
    epr_state,
    truncation_leakage,
)
from .measurement import (
    IDEAL_PNR,
    ON_OFF,
    ClickPattern,
    DetectorModel,
    _measure_mode_branches,
)

__all__ = [
    "ScissorSpec",
    "NlaSpec",
    "HeraldPattern",
    "ScissorCircuit",
    "ideal_nla",
    "t1_apply",
    "t3_apply",
    "t2_coherent",
    "tn_parallel",
    "build_scissor_circuit",
    "run_circuit_branches",
    "run_heralded",
    "apply_scissor",
    "scissor_channel",
    "scissor_on_epr_arm",
    "teleamp_amplitudes",
    "teleamp_2cat",
    "teleamp_4cat",
    "epr_scissor_state",
]


@dataclass(frozen=True)
class ScissorSpec:
    """Descriptor of a scissor device.

    ``gain`` fixes the gain beamsplitter transmissivity eta = g^2/(1+g^2).
    ``resource_photons`` defaults to the order; injecting fewer photons into
    the order-3 device yields the second-order truncation that works for
    coherent inputs only.
    """

    order: int
    gain: float
    resource_photons: int | None = None
    resource_efficiency: float = 1.0
    detector: DetectorModel = field(default_factory=lambda: IDEAL_PNR)

    def __post_init__(self):
        if self.order not in (1, 2, 3, 7):
            raise UnsupportedOrder(f"order {self.order}")
        if self.gain <= 0.0:
            raise ParameterOutOfRange(f"gain {self.gain} must be positive")
        if not 0.0 <= self.resource_efficiency <= 1.0:
            raise ParameterOutOfRange(f"resource efficiency {self.resource_efficiency}")
        if self.resource_photons is None:
            object.__setattr__(self, "resource_photons", self.order)
        if not 1 <= self.resource_photons <= self.order:
            raise ParameterOutOfRange(
                f"resource photons {self.resource_photons} outside 1..{self.order}"
            )

    @property
    def eta(self) -> float:
        g2 = self.gain * self.gain
        return g2 / (1.0 + g2)

    @classmethod
    def from_eta(cls, order: int, eta: float, **kwargs) -> "ScissorSpec":
        if not 0.0 < eta < 1.0:
            raise ParameterOutOfRange(f"eta {eta} outside (0, 1)")
        return cls(order, math.sqrt(eta / (1.0 - eta)), **kwargs)

    @property
    def coherent_input_only(self) -> bool:
        """Second-order truncation holds only for coherent-like inputs."""
        return self.order == 2 or self.resource_photons < self.order


@dataclass(frozen=True)
class NlaSpec:
    """Amplifier made of N single-photon scissors in parallel."""

    n_scissors: int
    gain: float

    def __post_init__(self):
        if self.n_scissors < 1:
            raise ParameterOutOfRange("need at least one scissor")
        if self.gain <= 0.0:
            raise ParameterOutOfRange(f"gain {self.gain} must be positive")


# ---------------------------------------------------------------------------
# analytic transforms
# ---------------------------------------------------------------------------

def _amplify_mode(psi: PureState, mode: int, coeffs: np.ndarray) -> PureState:
    """Multiply the amplitude at occupation n of one mode by coeffs[n]."""
    psi.space.check_mode(mode)
    d = psi.space.dims[mode]
    full = np.zeros(d, dtype=np.complex128)
    full[: min(d, len(coeffs))] = coeffs[:d]
    shape = [1] * psi.space.num_modes
    shape[mode] = d
    return PureState(psi.space, (psi.reshaped * full.reshape(shape)).reshape(-1))


def ideal_nla(psi: PureState, g: float, mode: int = 0, tolerance: float = 1e-12) -> PureState:
    """Noiseless amplification c_n -> g^n c_n on one mode (unnormalized).

    Raises ``CutoffTooSmall`` when the amplified state piles relative weight
    above ``tolerance`` into the top Fock level, since the g^n tail would
    then be visibly clipped by the cutoff.
    """
    if g <= 0.0:
        raise ParameterOutOfRange(f"gain {g} must be positive")
    d = psi.space.dims[mode]
    out = _amplify_mode(psi, mode, g ** np.arange(d, dtype=float))
    norm_sq = out.norm_sq
    if norm_sq > 0.0 and truncation_leakage(out) / norm_sq > max(tolerance, 1e-15):
        raise CutoffTooSmall(truncation_leakage(out) / norm_sq)
    return out


def t1_apply(
    psi: PureState, g: float, sign: int = +1, mode: int = 0
) -> tuple[PureState, float]:
    """First-order scissor: herald sqrt(1/(2(g^2+1))) (c_0 |0> +/- g c_1 |1>).

    The plus sign belongs to the canonical click pattern; the reverse pattern
    flips the one-photon component.  The returned probability counts both
    patterns, assuming the flip is corrected by feed-forward.
    """
    if sign not in (+1, -1):
        raise ParameterOutOfRange("sign must be +1 or -1")
    pref = math.sqrt(1.0 / (2.0 * (g * g + 1.0)))
    coeffs = np.zeros(psi.space.dims[mode])
    coeffs[0] = pref
    if len(coeffs) > 1:
        coeffs[1] = sign * pref * g
    out = _amplify_mode(psi, mode, coeffs)
    return out, 2.0 * out.norm_sq


def t3_apply(psi: PureState, g: float, mode: int = 0) -> tuple[PureState, float]:
    """Third-order scissor: undistorted g^n c_n for n <= 3, zero above.

    Heralded state carries the prefactor (sqrt(6)/8) (1/(g^2+1))^(3/2); the
    probability is 4x its squared norm, one factor per accepted click
    pattern.
    """
    pref = (math.sqrt(6.0) / 8.0) * (1.0 / (g * g + 1.0)) ** 1.5
    d = psi.space.dims[mode]
    coeffs = np.zeros(d)
    coeffs[: min(4, d)] = pref * g ** np.arange(min(4, d), dtype=float)
    out = _amplify_mode(psi, mode, coeffs)
    return out, 4.0 * out.norm_sq


def t2_coherent(gamma: complex, g: float, cutoff: int = 3) -> tuple[PureState, float]:
    """Second-order scissor acting on a coherent input |gamma>.

    Valid for coherent inputs only: the heralded state is
    gamma (sqrt(2)/8) (g^2+1)^{-1} e^{-|gamma|^2/2}
    (|0> + g gamma |1> + g^2 gamma^2 / sqrt(2) |2>), with support ending at
    |2> exactly.  Probability counts all four click patterns.
    """
    if cutoff < 2:
        raise CutoffTooSmall(1.0, "second-order output needs cutoff >= 2")
    pref = gamma * (math.sqrt(2.0) / 8.0) / (g * g + 1.0) * math.exp(-abs(gamma) ** 2 / 2.0)
    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    amps[0] = pref
    amps[1] = pref * g * gamma
    amps[2] = pref * g * g * gamma * gamma / math.sqrt(2.0)
    out = PureState(FockSpace(cutoff), amps)
    return out, 4.0 * out.norm_sq


def tn_parallel(
    psi: PureState, g: float, n_scissors: int, mode: int = 0
) -> tuple[PureState, float]:
    """Amplifier of N parallel first-order scissors (distorted amplification).

    Coefficient on |n>: N!/((N-n)! N^n) g^n c_n for n <= N, zero above, with
    the prefactor (1/(2(g^2+1)))^(N/2) so that N = 1 reproduces ``t1_apply``
    exactly.  The probability is the squared norm of the canonical-pattern
    output; no per-scissor feed-forward credit is applied.
    """
    if n_scissors < 1:
        raise ParameterOutOfRange("need at least one scissor")
    N = n_scissors
    pref = (1.0 / (2.0 * (g * g + 1.0))) ** (N / 2.0)
    d = psi.space.dims[mode]
    coeffs = np.zeros(d)
    for n in range(min(N, d - 1) + 1):
        distort = math.factorial(N) / (math.factorial(N - n) * float(N) ** n)
        coeffs[n] = pref * distort * g**n
    out = _amplify_mode(psi, mode, coeffs)
    return out, out.norm_sq


# ---------------------------------------------------------------------------
# circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeraldPattern:
    """An accepted click pattern with its feed-forward phase correction."""

    pattern: ClickPattern
    correction: float


@dataclass(frozen=True)
class ScissorCircuit:
    """A scissor realized as a circuit plus heralding bookkeeping.

    Mode 0 is the resource/output mode, mode 1 the signal input; the rest are
    detection ports.  ``resource_occupation`` is the initial Fock occupation
    of every mode (the signal slot holds 0 and is overwritten by callers).
    """

    spec: ScissorSpec
    circuit: Circuit
    input_mode: int
    output_mode: int
    resource_occupation: tuple[int, ...]
    patterns: tuple[HeraldPattern, ...]


def _port_outcomes(n_ports: int, vacuum_port: int, detector: DetectorModel) -> tuple:
    if detector.kind == ON_OFF:
        return tuple("off" if p == vacuum_port else "on" for p in range(n_ports))
    return tuple(0 if p == vacuum_port else 1 for p in range(n_ports))


def _dft_network(modes: Sequence[int]) -> tuple[list, list[int]]:
    """Balanced-splitter network performing an exact DFT on mode amplitudes.

    Returns circuit elements and the port map: entry p is the mode holding
    output amplitude X_p = sum_q exp(2 pi i p q / N) x_q / sqrt(N).  Built
    recursively from half-size transforms and twiddle-phase butterflies.
    """
    n = len(modes)
    if n == 1:
        return [], [modes[0]]
    els_even, map_even = _dft_network(modes[0::2])
    els_odd, map_odd = _dft_network(modes[1::2])
    els = els_even + els_odd
    ports = [0] * n
    half = n // 2
    for j in range(half):
        twiddle = 2.0 * math.pi * j / n
        if twiddle:
            els.append(PhaseShift(map_odd[j], twiddle))
        els.append(Beamsplitter(map_even[j], map_odd[j], 0.5))
        # the reflected output of the splitter convention carries an extra
        # minus sign; undo it so the network is the plain transform
        els.append(PhaseShift(map_odd[j], math.pi))
        ports[j] = map_even[j]
        ports[j + half] = map_odd[j]
    return els, ports


def build_scissor_circuit(
    spec: ScissorSpec,
    input_cutoff: int = 8,
    internal_cutoff: int | Sequence[int] | None = None,
) -> ScissorCircuit:
    """Construct the full linear-optical circuit of a scissor device.

    Supported orders are 1, 3 and 7.  The resource beamsplitter has
    transmissivity eta = g^2/(1+g^2); the detection network consists of
    balanced splitters (and the phase shifts that make its port amplitudes
    pick out the order+1 relative phases between signal and resource arms).
    Resource inefficiency enters as a loss element before the gain
    beamsplitter.  Detection ports default to a cutoff of
    input_cutoff + resource photons, which is exact; pass ``internal_cutoff``
    to trade exactness for memory on the large devices.
    """
    if spec.order not in (1, 3, 7):
        raise UnsupportedOrder(f"no circuit for order {spec.order}")
    n_ports = spec.order + 1
    num_modes = 1 + n_ports  # output plus the detection ports (input is port A)
    res = spec.resource_photons
    exact = input_cutoff + res
    if internal_cutoff is None:
        internal = [exact] * (n_ports - 1)
    elif isinstance(internal_cutoff, int):
        internal = [internal_cutoff] * (n_ports - 1)
    else:
        internal = list(internal_cutoff)
        if len(internal) != n_ports - 1:
            raise ValueError(f"need {n_ports - 1} internal cutoffs")
    cutoffs = (res, input_cutoff, *internal)
    space = FockSpace(cutoffs)

    elements: list = []
    if spec.resource_efficiency < 1.0:
        elements.append(Loss(0, spec.resource_efficiency))
    elements.append(Beamsplitter(0, 2, spec.eta))

    patterns: list[HeraldPattern] = []
    if spec.order == 1:
        # ports: signal+reflection interfere once; mode 1 = A, mode 2 = C
        elements.append(Beamsplitter(1, 2, 0.5))
        port_modes = (1, 2)
        corrections = {0: 0.0, 1: math.pi}
        vacuum_ports = {0: 0, 1: 1}  # canonical: vacuum at A, click at C
        for idx in range(2):
            outcomes = _port_outcomes(2, vacuum_ports[idx], spec.detector)
            patterns.append(
                HeraldPattern(ClickPattern(port_modes, outcomes), corrections[idx])
            )
    elif spec.order == 3:
        # mode 1 = A, 2 = C, 3 = A', 4 = C'; four balanced splitters and the
        # pi/2 shift give the four ports relative phases 1, -1, -i, +i
        elements += [
            Beamsplitter(1, 2, 0.5),
            Beamsplitter(1, 3, 0.5),
            Beamsplitter(2, 4, 0.5),
            PhaseShift(3, math.pi / 2.0),
            Beamsplitter(3, 4, 0.5),
        ]
        port_modes = (1, 2, 3, 4)
        # ports ordered by their relative-phase index p: A, C', C, A'
        port_by_phase = {0: 0, 1: 3, 2: 1, 3: 2}
        for p in range(4):
            outcomes = _port_outcomes(4, port_by_phase[p], spec.detector)
            patterns.append(
                HeraldPattern(ClickPattern(port_modes, outcomes), p * math.pi / 2.0)
            )
    else:  # order 7
        net_modes = list(range(1, 10))[: n_ports]  # modes 1..8
        els, ports = _dft_network(net_modes)
        elements += els
        port_modes = tuple(sorted(net_modes))
        for p in range(8):
            vac_idx = port_modes.index(ports[p])
            outcomes = _port_outcomes(8, vac_idx, spec.detector)
            patterns.append(
                HeraldPattern(ClickPattern(port_modes, outcomes), p * math.pi / 4.0)
            )

    occupation = (res,) + (0,) * (num_modes - 1)
    return ScissorCircuit(
        spec=spec,
        circuit=Circuit(space, tuple(elements)),
        input_mode=1,
        output_mode=0,
        resource_occupation=occupation,
        patterns=tuple(patterns),
    )


# ---------------------------------------------------------------------------
# heralded execution
# ---------------------------------------------------------------------------

def run_circuit_branches(circuit: Circuit, state: PureState) -> list[PureState]:
    """Evolve a pure state through a circuit, splitting on loss elements.

    Returns unnormalized pure branches whose outer-product sum is the output
    operator; for a loss-free circuit this is a single state.
    """
    if circuit.space.cutoffs != state.space.cutoffs:
        raise DimensionMismatch("state does not live on the circuit space")
    branches = [state]
    for el in circuit.elements:
        if isinstance(el, Beamsplitter):
            branches = [
                apply_beamsplitter(b, el.m1, el.m2, el.transmissivity) for b in branches
            ]
        elif isinstance(el, PhaseShift):
            branches = [apply_phase(b, el.mode, el.phase) for b in branches]
        else:
            branches = [
                kb
                for b in branches
                for kb in loss_on_kraus_branches(b, el.mode, el.transmissivity)
                if kb.norm_sq > 0.0
            ]
    return branches


def _herald_branches(
    branches: Sequence[PureState],
    patterns: Sequence[HeraldPattern],
    detector: DetectorModel,
    correction_mode: int,
) -> list[PureState]:
    """Measure every pattern on a branch ensemble and phase-correct the results."""
    collected: list[PureState] = []
    for hp in patterns:
        modes, outcomes = hp.pattern.modes, hp.pattern.outcomes
        order = sorted(range(len(modes)), key=lambda i: -modes[i])
        sub = list(branches)
        for i in order:
            sub = _measure_mode_branches(sub, modes[i], outcomes[i], detector)
        if hp.correction:
            shift = sum(1 for m in modes if m < correction_mode)
            sub = [apply_phase(b, correction_mode - shift, hp.correction) for b in sub]
        collected.extend(sub)
    return collected


def run_heralded(
    circuit: Circuit,
    state: PureState,
    patterns: Sequence[HeraldPattern],
    detector: DetectorModel = IDEAL_PNR,
    correction_mode: int = 0,
) -> tuple[DensityOperator, float]:
    """Run a circuit and herald on a set of click patterns.

    The per-pattern phase corrections are applied so that, for perfect
    detectors, every accepted pattern contributes the same pure state; the
    result is the normalized heralded operator on the unmeasured modes
    together with the total heralding probability.
    """
    branches = run_circuit_branches(circuit, state)
    collected = _herald_branches(branches, patterns, detector, correction_mode)
    total_p = sum(b.norm_sq for b in collected)
    if total_p < 1e-300:
        raise ZeroProbability("no pattern heralds with nonzero probability")
    small = collected[0].space
    mat = np.zeros((small.dim, small.dim), dtype=np.complex128)
    for b in collected:
        mat += np.outer(b.amplitudes, b.amplitudes.conj())
    return DensityOperator(small, mat / total_p), float(total_p)


def _initial_joint_state(sc: ScissorCircuit, input_amps: np.ndarray) -> PureState:
    space = sc.circuit.space
    amps = np.zeros(space.dims, dtype=np.complex128)
    index: list = list(sc.resource_occupation)
    index[sc.input_mode] = slice(None)
    amps[tuple(index)] = input_amps[: space.dims[sc.input_mode]]
    return PureState(space, amps.reshape(-1))


def apply_scissor(
    spec: ScissorSpec,
    psi_in: PureState,
    internal_cutoff: int | Sequence[int] | None = None,
) -> tuple[DensityOperator, float]:
    """Send a single-mode state through the full scissor circuit.

    Returns the normalized heralded state on the output mode (cutoff equal to
    the resource photon number, which the circuit topology cannot exceed) and
    the total heralding probability over all accepted patterns.
    """
    if psi_in.space.num_modes != 1:
        raise DimensionMismatch("scissor input must be a single-mode state")
    sc = build_scissor_circuit(spec, psi_in.space.cutoffs[0], internal_cutoff)
    joint = _initial_joint_state(sc, psi_in.amplitudes)
    return run_heralded(
        sc.circuit, joint, sc.patterns, spec.detector, correction_mode=sc.output_mode
    )


def scissor_channel(
    spec: ScissorSpec,
    input_cutoff: int,
    internal_cutoff: int | Sequence[int] | None = None,
) -> list[np.ndarray]:
    """Conditional Kraus family of the heralded scissor channel.

    Returns matrices M_j of shape (resource_photons+1, input_cutoff+1) such
    that an input rho maps to the unnormalized heralded output
    sum_j M_j rho M_j^dagger, whose trace is the success probability summed
    over accepted patterns.  Extracted from one circuit simulation with an
    entangled reference mode, so it is exact for any input supported below
    the cutoff.
    """
    sc = build_scissor_circuit(spec, input_cutoff, internal_cutoff)
    space = sc.circuit.space
    big = FockSpace((input_cutoff,) + space.cutoffs)
    elements = []
    for el in sc.circuit.elements:
        if isinstance(el, Beamsplitter):
            elements.append(Beamsplitter(el.m1 + 1, el.m2 + 1, el.transmissivity))
        elif isinstance(el, PhaseShift):
            elements.append(PhaseShift(el.mode + 1, el.phase))
        else:
            elements.append(Loss(el.mode + 1, el.transmissivity))
    patterns = tuple(
        HeraldPattern(
            ClickPattern(tuple(m + 1 for m in hp.pattern.modes), hp.pattern.outcomes),
            hp.correction,
        )
        for hp in sc.patterns
    )
    d_in = input_cutoff + 1
    amps = np.zeros(big.dims, dtype=np.complex128)
    index: list = [slice(None)] + list(sc.resource_occupation)
    index[1 + sc.input_mode] = slice(None)
    ref_in = np.eye(d_in)  # unnormalized sum_n |n>_ref |n>_in
    amps[tuple(index)] = ref_in
    choi = PureState(big, amps.reshape(-1))
    branches = run_circuit_branches(Circuit(big, tuple(elements)), choi)
    collected = _herald_branches(
        branches, patterns, spec.detector, correction_mode=1 + sc.output_mode
    )
    # remaining modes: reference then output; amplitude [n, m] is M[m, n]
    return [b.reshaped.T.copy() for b in collected]


def scissor_on_epr_arm(
    spec: ScissorSpec,
    chi: float,
    transmissivity: float,
    kept_cutoff: int = 14,
    arm_cutoff: int = 8,
) -> tuple[DensityOperator, float]:
    """Two-mode state after sending one EPR arm through loss and a scissor.

    Builds the channel's conditional Kraus family once and applies it to
    every loss branch of the transmitted arm.  The returned operator is
    normalized; the probability sums every accepted click pattern.
    """
    kraus = scissor_channel(spec, arm_cutoff)
    big = max(kept_cutoff, arm_cutoff)
    psi = epr_state(chi, big, tolerance=1.0)
    branches = loss_on_kraus_branches(psi, 1, transmissivity)
    d_a = kept_cutoff + 1
    d_b = kraus[0].shape[0]
    d_in = kraus[0].shape[1]
    mat = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for b in branches:
        arr = b.reshaped[:d_a, :d_in]
        for M in kraus:
            out = (arr @ M.T).reshape(-1)  # [n_A, m] = sum_j arr[n_A, j] M[m, j]
            mat += np.outer(out, out.conj())
    total_p = float(np.trace(mat).real)
    if total_p < 1e-300:
        raise ZeroProbability("heralding probability vanished")
    space = FockSpace((kept_cutoff, d_b - 1))
    return DensityOperator(space, mat / total_p), total_p


# ---------------------------------------------------------------------------
# tele-amplification closed forms
# ---------------------------------------------------------------------------

def _teleamp_params(beta: complex, t_a: float, t_b: float) -> tuple[complex, float]:
    if not 0.0 < t_a < 1.0 or not 0.0 < t_b < 1.0:
        raise ParameterOutOfRange("beamsplitter transmissivities must lie in (0, 1)")
    alpha = beta * math.sqrt((1.0 - t_a) * (1.0 - t_b) / t_a)
    gain = math.sqrt(t_a * t_b / ((1.0 - t_a) * (1.0 - t_b)))
    return alpha, gain


def teleamp_amplitudes(
    gamma: complex, alpha: complex, t_a: float = 0.5, t_b: float = 0.5
) -> np.ndarray:
    """Per-branch coherent amplitudes of the four-lobe tele-amplifier circuit.

    Row k (the resource lobe index) holds the product-coherent amplitudes of
    modes (B, A, C, A', C') after the circuit, before any measurement.  This
    closed form is the oracle that fixes the circuit wiring.
    """
    if not 0.0 < t_a < 1.0 or not 0.0 < t_b < 1.0:
        raise ParameterOutOfRange("beamsplitter transmissivities must lie in (0, 1)")
    gain = math.sqrt(t_a * t_b / ((1.0 - t_a) * (1.0 - t_b)))
    out = np.zeros((4, 5), dtype=np.complex128)
    for k in range(4):
        lobe = alpha * 1j**k
        a1 = math.sqrt(t_a) * (gamma - lobe)
        c1 = -math.sqrt(1.0 - t_a) * gamma - lobe * t_a / math.sqrt(1.0 - t_a)
        out[k, 0] = gain * lobe
        out[k, 1] = a1 / math.sqrt(2.0)
        out[k, 2] = c1 / math.sqrt(2.0)
        out[k, 3] = -(1j * a1 + c1) / 2.0
        out[k, 4] = (1j * a1 - c1) / 2.0
    return out


def teleamp_2cat(
    gamma: complex,
    beta: complex,
    t_a: float = 0.5,
    t_b: float = 0.5,
    cutoff: int = 12,
    sign: int = +1,
) -> tuple[PureState, float]:
    """Tele-amplification of |gamma> with a two-lobe (odd) cat resource.

    Heralds N ((alpha+gamma)|g alpha> + (alpha-gamma)|-g alpha>) on the
    canonical pattern (sign +1); the reverse pattern (sign -1) flips the
    roles of the two lobes, which at small alpha is a phase flip of the
    one-photon component.  The probability counts both patterns.
    """
    if sign not in (+1, -1):
        raise ParameterOutOfRange("sign must be +1 or -1")
    alpha, gain = _teleamp_params(beta, t_a, t_b)
    n_minus = 1.0 / math.sqrt(2.0 * -math.expm1(-2.0 * abs(beta) ** 2))
    norm = -n_minus * math.exp(-(abs(gamma) ** 2 + abs(alpha) ** 2) / 2.0) / math.sqrt(2.0)
    plus = coherent_amplitudes(gain * alpha, cutoff)
    minus = coherent_amplitudes(-gain * alpha, cutoff)
    if sign == +1:
        amps = norm * ((alpha + gamma) * plus + (alpha - gamma) * minus)
    else:
        amps = norm * ((alpha - gamma) * plus + (alpha + gamma) * minus)
    out = PureState(FockSpace(cutoff), amps)
    return out, 2.0 * out.norm_sq


def teleamp_4cat(
    gamma: complex,
    beta: complex,
    t_a: float = 0.5,
    t_b: float = 0.5,
    cutoff: int = 12,
) -> tuple[PureState, float]:
    """Tele-amplification of |gamma> with a four-lobe cat resource.

    Closed-form heralded state of the canonical pattern (vacuum at port A,
    single photons at C, A', C'): a four-term superposition of coherent
    states |g alpha i^k> weighted by the detected-port amplitudes.  Converges
    to the third-order scissor output as the lobe amplitude goes to zero.
    The probability counts all four patterns.
    """
    alpha, gain = _teleamp_params(beta, t_a, t_b)
    n_cat = 1.0 / math.sqrt(_cat4_exact_norm_sq(abs(beta), 3))
    amps4 = teleamp_amplitudes(gamma, alpha, t_a, t_b)
    total = np.zeros(cutoff + 1, dtype=np.complex128)
    for k in range(4):
        b_k, a_k, c_k, ap_k, cp_k = amps4[k]
        envelope = math.exp(
            -(abs(a_k) ** 2 + abs(c_k) ** 2 + abs(ap_k) ** 2 + abs(cp_k) ** 2) / 2.0
        )
        weight = (1j**k) * envelope * (c_k * ap_k * cp_k)
        total += n_cat * weight * coherent_amplitudes(b_k, cutoff)
    out = PureState(FockSpace(cutoff), total)
    return out, 4.0 * out.norm_sq


# ---------------------------------------------------------------------------
# EPR-arm closed forms
# ---------------------------------------------------------------------------

def epr_scissor_state(
    chi: float,
    transmissivity: float,
    g: float,
    order: int,
    k_max: int | None = None,
    kept_cutoff: int | None = None,
) -> DensityOperator:
    """Closed-form two-mode state of an EPR arm through loss and a scissor.

    Assembles rho_AB = sum_k |psi_k><psi_k| from the analytic loss-branch
    states for orders 1 and 3.  The trace equals the canonical-pattern
    heralding probability (no pattern multiplicity), matching a branch-wise
    application of the analytic transforms to the lossy EPR state.
    """
    if order not in (1, 3):
        raise UnsupportedOrder(f"closed form exists for orders 1 and 3, not {order}")
    if not 0.0 <= chi < 1.0:
        raise ParameterOutOfRange(f"chi={chi} outside [0, 1)")
    T = transmissivity
    if not 0.0 <= T <= 1.0:
        raise ParameterOutOfRange(f"transmissivity {T} outside [0, 1]")
    decay = (1.0 - T) * chi * chi
    if k_max is None:
        if kept_cutoff is not None:
            k_max = kept_cutoff - order
        elif decay == 0.0:
            k_max = 0
        else:
            k_max = max(4, int(math.log(1e-14) / math.log(decay)) + 1)
    if k_max < 0:
        raise CutoffTooSmall(1.0, "kept mode cannot hold even the first branch")
    if kept_cutoff is None:
        kept_cutoff = k_max + order
    if kept_cutoff < k_max + order:
        raise CutoffTooSmall(decay**k_max, "kept mode cannot hold the highest branch")
    d_a = kept_cutoff + 1
    d_b = order + 1
    space = FockSpace((kept_cutoff, order))
    mat = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for k in range(k_max + 1):
        psi = np.zeros((d_a, d_b), dtype=np.complex128)
        if order == 1:
            pref = math.sqrt((1.0 - chi * chi) / (2.0 * (g * g + 1.0)))
            pref *= (1.0 - T) ** (k / 2.0)
            psi[k, 0] = pref * (-chi) ** k
            psi[k + 1, 1] = pref * math.sqrt(T * (k + 1.0)) * (-chi) ** (k + 1) * g
        else:
            pref = (math.sqrt(6.0) / 8.0) * math.sqrt(
                (1.0 - chi * chi) / (g * g + 1.0) ** 3
            )
            for n in range(k, k + 4):
                psi[n, n - k] = (
                    pref
                    * chi**n
                    * g ** (n - k)
                    * math.sqrt(math.comb(n, k))
                    * (1.0 - T) ** (k / 2.0)
                    * T ** ((n - k) / 2.0)
                )
        flat = psi.reshape(-1)
        mat += np.outer(flat, flat.conj())
    return DensityOperator(space, mat)
