"""Pure-loss channels on truncated Fock states.

Loss with power transmissivity tau acts through Kraus operators
K_k |n> = sqrt(C(n, k) tau^(n-k) (1-tau)^k) |n-k>, one per number of photons
lost.  Loss only moves population downward, so no cutoff padding is needed:
the channel is exact on a truncated space.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import ParameterOutOfRange
from .fock import DensityOperator, FockSpace, PureState

__all__ = ["loss_kraus_weights", "loss_on_kraus_branches", "pure_loss"]


def loss_kraus_weights(k: int, tau: float, dim: int) -> np.ndarray:
    """Amplitude weights of the k-photon-loss Kraus operator.

    Entry j is the coefficient mapping |j+k> -> |j>, i.e. the operator in
    matrix form has these on its k-th upper diagonal.
    """
    j = np.arange(dim - k, dtype=float)
    n = j + k
    logw = np.zeros(dim - k)
    for i in range(1, k + 1):  # log C(n, k) accumulated stably
        logw += np.log(n - i + 1) - math.log(i)
    if tau > 0:
        logw += j * math.log(tau)
    else:
        logw[1:] = -np.inf
    if tau < 1:
        logw += k * math.log(1.0 - tau)
    elif k > 0:
        logw[:] = -np.inf
    return np.exp(0.5 * logw)


def loss_on_kraus_branches(
    psi: PureState,
    mode: int,
    tau: float,
    k_max: int | None = None,
) -> list[PureState]:
    """Unnormalized pure branches |psi_k> of a loss channel on one mode.

    The outer-product sum of the branches equals the channel output, and for
    the default exhaustive ``k_max`` the squared norms add up to the input
    norm exactly; with a smaller ``k_max`` the difference is the residual
    weight left in the discarded branches.
    """
    space = psi.space
    space.check_mode(mode)
    if not 0.0 <= tau <= 1.0:
        raise ParameterOutOfRange(f"transmissivity {tau} outside [0, 1]")
    d = space.dims[mode]
    if k_max is None:
        k_max = d - 1
    arr = np.moveaxis(psi.reshaped, mode, 0)
    branches = []
    for k in range(min(k_max, d - 1) + 1):
        w = loss_kraus_weights(k, tau, d)
        out = np.zeros_like(arr)
        out[: d - k] = w.reshape((-1,) + (1,) * (arr.ndim - 1)) * arr[k:]
        branch = PureState(space, np.moveaxis(out, 0, mode).reshape(-1))
        if branch.norm_sq > 0.0 or k == 0:
            branches.append(branch)
    return branches


def pure_loss(
    state: Union[PureState, DensityOperator],
    mode: int,
    tau: float,
) -> DensityOperator:
    """Send one mode of a state through a pure-loss channel of transmissivity tau."""
    if isinstance(state, PureState):
        branches = loss_on_kraus_branches(state, mode, tau)
        mat = np.zeros((state.space.dim, state.space.dim), dtype=np.complex128)
        for b in branches:
            mat += np.outer(b.amplitudes, b.amplitudes.conj())
        return DensityOperator(state.space, mat)
    space = state.space
    space.check_mode(mode)
    if not 0.0 <= tau <= 1.0:
        raise ParameterOutOfRange(f"transmissivity {tau} outside [0, 1]")
    d = space.dims[mode]
    dims = space.dims
    M = space.num_modes
    tens = state.matrix.reshape(dims + dims)
    tens = np.moveaxis(np.moveaxis(tens, mode, 0), M + mode, 1)
    out = np.zeros_like(tens)
    for k in range(d):
        w = loss_kraus_weights(k, tau, d)
        ww = w[:, None] * w[None, :].conj()
        out[: d - k, : d - k] += ww.reshape(ww.shape + (1,) * (tens.ndim - 2)) * tens[k:, k:]
    out = np.moveaxis(np.moveaxis(out, 1, M + mode), 0, mode)
    return DensityOperator(space, out.reshape(space.dim, space.dim))
