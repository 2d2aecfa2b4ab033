"""Entanglement and fidelity metrics for two-mode bosonic states.

Quadratures follow the vacuum-variance-1 convention x = a + a^dag,
p = -i(a - a^dag), so the vacuum covariance matrix is the identity and the
entropy function g of a symplectic eigenvalue vanishes exactly at 1.

The Gaussian entanglement of formation is computed from the covariance
matrix alone: reduce to standard form by local symplectics, then find the
least-squeezed pure two-mode-squeezed covariance that fits under the state
(a bounded search over the squeezing parameter with a two-parameter local
squeezing adjustment inside), and report the entropy of entanglement of that
pure state.  Deterministic multi-start keeps repeated runs byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.optimize import minimize

from .errors import (
    ConvergenceFailure,
    CutoffTooSmall,
    DimensionMismatch,
    NotNormalized,
    ParameterOutOfRange,
    UnphysicalCovariance,
)
from .fock import DensityOperator, FockSpace, PureState, partial_trace, to_density

__all__ = [
    "CovarianceMatrix",
    "EntanglementReport",
    "fidelity",
    "von_neumann_entropy",
    "rci",
    "covariance_matrix",
    "symplectic_eigenvalues",
    "gaussian_rci",
    "gaussian_eof",
    "deterministic_bound",
    "epr_loss_covariance",
    "entropy_of_tmsv",
]

_OMEGA = np.array(
    [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]]
)


@dataclass(frozen=True)
class CovarianceMatrix:
    """First and second quadrature moments of a two-mode state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (4,) or cov.shape != (4, 4):
            raise DimensionMismatch("two-mode covariance needs a length-4 mean and 4x4 cov")
        if not np.allclose(cov, cov.T, atol=1e-10):
            raise UnphysicalCovariance("covariance matrix is not symmetric within 1e-10")
        cov = 0.5 * (cov + cov.T)
        # uncertainty relation: cov + i Omega >= 0
        lam = np.linalg.eigvalsh(cov + 1j * _OMEGA)
        if lam.min() < -1e-8 * max(1.0, float(np.abs(cov).max())):
            raise UnphysicalCovariance(f"uncertainty violated by {lam.min():.3e}")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


@dataclass(frozen=True)
class EntanglementReport:
    """Bundle of the entanglement figures for one heralded state."""

    geof: float
    rci: float
    gaussian_rci: float
    probability: float

    def __post_init__(self):
        if self.geof < 0.0:
            raise ValueError("entanglement of formation cannot be negative")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


def fidelity(state: Union[PureState, DensityOperator], target: PureState) -> float:
    """Overlap <target| rho |target> with the state normalized first."""
    if state.space.cutoffs != target.space.cutoffs:
        raise DimensionMismatch("state and target live on different spaces")
    if abs(target.norm_sq - 1.0) > 1e-8:
        raise NotNormalized(f"target norm^2 = {target.norm_sq}")
    t = target.amplitudes
    if isinstance(state, PureState):
        n = state.norm_sq
        if n == 0.0:
            return 0.0
        return float(min(1.0, abs(np.vdot(t, state.amplitudes)) ** 2 / n))
    tr = state.trace
    if tr == 0.0:
        return 0.0
    val = float(np.real(t.conj() @ state.matrix @ t)) / tr
    return float(min(1.0, max(0.0, val)))


def von_neumann_entropy(rho: Union[DensityOperator, PureState]) -> float:
    """Entropy -Tr(rho log2 rho) in bits of a normalized state."""
    if isinstance(rho, PureState):
        if not rho.is_normalized(1e-8):
            raise NotNormalized(f"norm^2 = {rho.norm_sq}")
        return 0.0
    if abs(rho.trace - 1.0) > 1e-8:
        raise NotNormalized(f"trace = {rho.trace}")
    lam = np.linalg.eigvalsh(rho.matrix)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log2(lam)))


def rci(rho_ab: DensityOperator) -> float:
    """Reverse coherent information H(A) - H(AB) of a two-mode state."""
    if rho_ab.space.num_modes != 2:
        raise DimensionMismatch("reverse coherent information needs a two-mode state")
    h_ab = von_neumann_entropy(rho_ab)
    h_a = von_neumann_entropy(partial_trace(rho_ab, [0]))
    return h_a - h_ab


def _ladder(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=np.complex128)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def covariance_matrix(
    state: Union[PureState, DensityOperator],
    tolerance: float = 1e-6,
) -> CovarianceMatrix:
    """First and second symmetrized quadrature moments of a two-mode state.

    Raises ``CutoffTooSmall`` if either mode holds more than ``tolerance``
    population in its top Fock level, where the moments would be unreliable.
    """
    if isinstance(state, PureState):
        state = to_density(state)
    if state.space.num_modes != 2:
        raise DimensionMismatch("covariance matrix needs a two-mode state")
    if abs(state.trace - 1.0) > 1e-8:
        raise NotNormalized(f"trace = {state.trace}")
    pops = state.populations().reshape(state.space.dims)
    for m, edge in enumerate((pops[-1, :].sum(), pops[:, -1].sum())):
        if edge > tolerance:
            raise CutoffTooSmall(float(edge), f"top-level population on mode {m}")
    d0, d1 = state.space.dims
    a0 = np.kron(_ladder(d0), np.eye(d1))
    a1 = np.kron(np.eye(d0), _ladder(d1))
    quads = []
    for a in (a0, a1):
        quads.append(a + a.conj().T)
        quads.append(-1j * (a - a.conj().T))
    rho = state.matrix
    mean = np.array([float(np.trace(rho @ q).real) for q in quads])
    cov = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            sym = quads[i] @ quads[j] + quads[j] @ quads[i]
            cov[i, j] = cov[j, i] = 0.5 * float(np.trace(rho @ sym).real) - mean[i] * mean[j]
    return CovarianceMatrix(mean, cov)


def _as_cov(cov: Union[CovarianceMatrix, np.ndarray, DensityOperator, PureState]) -> np.ndarray:
    if isinstance(cov, (DensityOperator, PureState)):
        cov = covariance_matrix(cov)
    if isinstance(cov, CovarianceMatrix):
        return cov.cov
    return np.asarray(cov, dtype=float)


def symplectic_eigenvalues(cov) -> np.ndarray:
    """The two symplectic invariants of a two-mode covariance, ascending."""
    sigma = _as_cov(cov)
    lam = np.abs(np.linalg.eigvals(1j * _OMEGA @ sigma).real)
    lam.sort()
    nus = lam[[0, 2]]  # each invariant appears twice
    if nus[0] < 1.0 - 1e-8:
        raise UnphysicalCovariance(f"symplectic eigenvalue {nus[0]} below 1")
    return nus


def _entropy_g(x: float) -> float:
    """Thermal-state entropy as a function of a symplectic eigenvalue."""
    if x <= 1.0:
        return 0.0
    xp, xm = (x + 1.0) / 2.0, (x - 1.0) / 2.0
    return xp * math.log2(xp) - xm * math.log2(xm)


def gaussian_rci(state) -> float:
    """Reverse coherent information of the Gaussian state with the same covariance."""
    sigma = _as_cov(state)
    nus = symplectic_eigenvalues(sigma)
    nu_a = math.sqrt(max(1.0, float(np.linalg.det(sigma[:2, :2]))))
    return _entropy_g(nu_a) - sum(_entropy_g(float(v)) for v in nus)


# ---------------------------------------------------------------------------
# Gaussian entanglement of formation
# ---------------------------------------------------------------------------

def _local_symplectic_to_identity(block: np.ndarray) -> tuple[np.ndarray, float]:
    """Symplectic S with S block S^T = sqrt(det) I; returns (S, sqrt(det))."""
    lam, rot = np.linalg.eigh(block)
    if np.linalg.det(rot) < 0:
        rot = rot[:, ::-1]
        lam = lam[::-1]
    a = math.sqrt(float(lam[0] * lam[1]))
    S = np.diag(np.sqrt(a / lam)) @ rot.T
    return S, a


def _standard_form(sigma: np.ndarray) -> tuple[float, float, float, float]:
    """Local-symplectic invariants (a, b, c+, c-) of a two-mode covariance."""
    s_a, a = _local_symplectic_to_identity(sigma[:2, :2])
    s_b, b = _local_symplectic_to_identity(sigma[2:, 2:])
    c = s_a @ sigma[:2, 2:] @ s_b.T
    u, sv, vt = np.linalg.svd(c)
    c1, c2 = float(sv[0]), float(sv[1])
    if np.linalg.det(c) < 0:
        c2 = -c2
    return a, b, c1, c2


def _tmsv_cov(r: float) -> np.ndarray:
    ch, sh = math.cosh(2.0 * r), math.sinh(2.0 * r)
    sigma = np.diag([ch, ch, ch, ch])
    sigma[0, 2] = sigma[2, 0] = sh
    sigma[1, 3] = sigma[3, 1] = -sh
    return sigma


def _rot(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])


def _pure_candidate(r: float, x: np.ndarray) -> np.ndarray:
    """Pure two-mode Gaussian covariance L T(r) L^T with local symplectic L.

    ``x`` packs (phi_a, u_a, phi_b, u_b, psi): each local symplectic is a
    rotation, a squeezer, and an inner rotation, with the inner angles taken
    opposite on the two modes (the redundant common part leaves the
    two-mode-squeezed core invariant).
    """
    phi_a, u_a, phi_b, u_b, psi = x
    s_a = _rot(phi_a) @ np.diag([math.exp(u_a), math.exp(-u_a)]) @ _rot(psi)
    s_b = _rot(phi_b) @ np.diag([math.exp(u_b), math.exp(-u_b)]) @ _rot(-psi)
    core = _tmsv_cov(r)
    out = np.zeros((4, 4))
    out[:2, :2] = s_a @ core[:2, :2] @ s_a.T
    out[2:, 2:] = s_b @ core[2:, 2:] @ s_b.T
    out[:2, 2:] = s_a @ core[:2, 2:] @ s_b.T
    out[2:, :2] = out[:2, 2:].T
    return out


_GEOF_STARTS = (
    (0.0, 0.0, 0.0, 0.0, 0.0),
    (0.2, 0.1, -0.2, 0.1, 0.0),
    (-0.2, 0.1, 0.2, 0.1, 0.0),
    (0.0, 0.3, 0.0, -0.3, 0.0),
    (0.3, -0.2, -0.3, -0.2, 0.3),
)


def _fit_gap(sigma: np.ndarray, r: float, start) -> tuple[float, np.ndarray]:
    """Best achievable min-eigenvalue of sigma - L T(r) L^T near one start."""

    def neg_gap(x):
        return -float(np.linalg.eigvalsh(sigma - _pure_candidate(r, x))[0])

    res = minimize(
        neg_gap,
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 600},
    )
    return -float(res.fun), res.x


def _feasible(sigma: np.ndarray, r: float, warm, tol: float) -> tuple[bool, np.ndarray]:
    best_gap, best_x = -math.inf, np.asarray(warm[0], dtype=float)
    for start in warm:
        gap, x = _fit_gap(sigma, r, start)
        if gap > best_gap:
            best_gap, best_x = gap, x
        if best_gap >= tol:
            break
    return best_gap >= -abs(tol), best_x


def entropy_of_tmsv(r: float) -> float:
    """Entropy of entanglement cosh^2 r log2 cosh^2 r - sinh^2 r log2 sinh^2 r."""
    if r <= 0.0:
        return 0.0
    return _entropy_g(math.cosh(2.0 * r))


def gaussian_eof(cov, tolerance: float = 1e-8) -> float:
    """Gaussian entanglement of formation of a two-mode covariance (ebits).

    Zero for separable covariances; for a pure two-mode squeezed state it
    equals the entropy of entanglement.  The decomposition search is
    deterministic: fixed multi-starts plus warm starts along a bisection over
    the squeezing parameter.
    """
    sigma = _as_cov(cov)
    symplectic_eigenvalues(sigma)  # physicality gate
    a, b, c1, c2 = _standard_form(sigma)
    std = np.zeros((4, 4))
    std[0, 0] = std[1, 1] = a
    std[2, 2] = std[3, 3] = b
    std[0, 2] = std[2, 0] = c1
    std[1, 3] = std[3, 1] = c2
    # PPT criterion is exact for two-mode Gaussian states
    pt = np.diag([1.0, 1.0, 1.0, -1.0])
    nu_t = np.abs(np.linalg.eigvals(1j * _OMEGA @ (pt @ std @ pt)).real)
    if nu_t.min() >= 1.0 - 1e-9:
        return 0.0
    scale = max(1.0, float(np.abs(std).max()))
    tol = 1e-9 * scale
    r_hi = 0.5 * math.acosh(max(1.0, min(a, b)))
    if r_hi <= 0.0:
        return 0.0
    warm: tuple = _GEOF_STARTS
    grid = np.linspace(r_hi / 40.0, r_hi, 28)
    r_feas = None
    r_lo = 0.0
    for r in grid:
        ok, x = _feasible(std, float(r), warm, tol)
        if ok:
            r_feas = float(r)
            warm = (x,) + _GEOF_STARTS
            break
        r_lo = float(r)
        warm = (x,) + _GEOF_STARTS
    if r_feas is None:
        raise ConvergenceFailure("no feasible pure decomposition found below the bound")
    for _ in range(60):
        if r_feas - r_lo < 1e-9:
            break
        mid = 0.5 * (r_lo + r_feas)
        ok, x = _feasible(std, mid, warm, tol)
        warm = (x,) + _GEOF_STARTS
        if ok:
            r_feas = mid
        else:
            r_lo = mid
    return entropy_of_tmsv(r_feas)


def epr_loss_covariance(chi: float, transmissivity: float) -> CovarianceMatrix:
    """Covariance of a two-mode squeezed vacuum with one lossy arm."""
    if not 0.0 <= chi < 1.0:
        raise ParameterOutOfRange(f"chi={chi} outside [0, 1)")
    T = transmissivity
    if not 0.0 <= T <= 1.0:
        raise ParameterOutOfRange(f"transmissivity {T} outside [0, 1]")
    nu = (1.0 + chi * chi) / (1.0 - chi * chi)
    c = 2.0 * chi / (1.0 - chi * chi)
    cov = np.zeros((4, 4))
    cov[0, 0] = cov[1, 1] = nu
    cov[2, 2] = cov[3, 3] = T * nu + (1.0 - T)
    cov[0, 2] = cov[2, 0] = math.sqrt(T) * c
    cov[1, 3] = cov[3, 1] = -math.sqrt(T) * c
    return CovarianceMatrix(np.zeros(4), cov)


@lru_cache(maxsize=64)
def deterministic_bound(transmissivity: float) -> float:
    """Entanglement of the loss channel's output for an infinitely squeezed input.

    Evaluated by extrapolating the Gaussian entanglement of formation of the
    lossy two-mode squeezed vacuum towards chi -> 1; raises
    ``ConvergenceFailure`` when successive extrapolants disagree by more than
    1e-4 ebits.
    """
    T = transmissivity
    if not 0.0 < T < 1.0:
        raise ParameterOutOfRange(f"transmissivity {T} outside (0, 1)")
    eps = (1e-2, 1e-3, 1e-4)
    vals = [gaussian_eof(epr_loss_covariance(1.0 - e, T)) for e in eps]
    extr = [(10.0 * vals[i + 1] - vals[i]) / 9.0 for i in range(2)]
    if abs(extr[1] - extr[0]) >= 1e-4:
        raise ConvergenceFailure(
            f"bound extrapolants differ by {abs(extr[1] - extr[0]):.2e} at T={T}"
        )
    return extr[1]
