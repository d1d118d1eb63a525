"""Exact two-variable reduction of the N-particle pointer dynamics.

For a single rigid pointer the branch ratio and phase difference depend on
the pointer coordinates only through their sum, so the coupled system
closes in (X', Sigma_hat') with Sigma_hat' = (1/sqrt(N)) sum_n Z'_n and an
effective packet velocity Xi_hat = Xi sqrt(N).  The reduction is
implemented literally as that parameter substitution into the N = 1
velocity code path; no formulas are re-derived, so the two backends cannot
drift apart.

Individual pointer trajectories follow analytically: every dZ'_n/dt' is
alpha(t') Z'_n + beta_n-independent terms, with alpha the logarithmic
derivative of the packet width, so deviations from the mean obey the pure
spreading law

    Z'_n(t') = Sigma_hat'(t')/sqrt(N) + (Z'_n(0) - Sigma_hat'(0)/sqrt(N)) s(t')

with s(t') = sqrt(1 + 4 mu^2 R^4 t'^2 / (r^4 xi_y^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernel import GuidanceKernel
from .model import NODE_EPS, ModeError, ScenarioParams

__all__ = [
    "ReducedState",
    "reduced_params",
    "reduced_velocity",
    "spreading_factor",
    "reconstruct_pointers",
]


@dataclass(frozen=True)
class ReducedState:
    """The closed two-variable state (t', X', Sigma_hat')."""

    t_prime: float
    x: float
    sigma_hat: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t_prime, self.x, self.sigma_hat)):
            raise ValueError("reduced state entries must be finite")


def reduced_params(params: ScenarioParams) -> ScenarioParams:
    """Map an N-particle single-pointer scenario to its 1-particle twin.

    N and Xi enter the reduced dynamics only through Xi sqrt(N); the twin
    carries one particle with velocity pair (+Xi sqrt(N), -Xi sqrt(N)).
    """
    xi = params.single_pointer_xi
    if xi is None:
        raise ModeError("the reduction requires single-pointer mode (common +/-Xi)")
    xi_hat = xi * math.sqrt(params.n_particles)
    return ScenarioParams(
        xi_x=params.xi_x, xi_y=params.xi_y, r=params.r, R=params.R,
        mu=params.mu, d_prime=params.d_prime,
        pointer_velocities=((xi_hat, -xi_hat),),
    )


def reduced_velocity(state: ReducedState, params: ScenarioParams,
                     node_eps: float = NODE_EPS) -> tuple[float, float]:
    """(dX'/dt', dSigma_hat'/dt') of the reduced system.

    Evaluates the N = 1 velocity field at (X', Z'_1 = Sigma_hat') under
    ``reduced_params``; the longitudinal coordinate never couples, so any
    Y' gives the same answer.
    """
    kern = GuidanceKernel(reduced_params(params))
    vx, _, vz = kern.velocity(state.t_prime, state.x, 0.0,
                              np.array([state.sigma_hat]), node_floor=node_eps)
    return vx, float(vz[0])


def spreading_factor(t_prime, params: ScenarioParams):
    """Pointer packet width growth s(t'); vectorizes over t_prime."""
    return GuidanceKernel(params).spreading_factor(t_prime)


def reconstruct_pointers(t: np.ndarray, sigma_hat: np.ndarray, z0,
                         params: ScenarioParams, atol: float = 1e-12) -> np.ndarray:
    """Recover all N pointer trajectories from a reduced (t', Sigma_hat') run.

    ``z0`` are the N initial pointer positions; their scaled sum must match
    sigma_hat[0] to ``atol``.  Returns an (n_times, N) array whose scaled
    row sums reproduce sigma_hat exactly (the deviations from the mean are
    constructed sum-free).
    """
    t = np.asarray(t, dtype=float)
    sigma_hat = np.asarray(sigma_hat, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    n = z0.size
    if n != params.n_particles:
        raise ValueError(f"z0 has {n} entries, scenario has {params.n_particles}")
    if n == 0:
        return np.zeros((t.size, 0))
    sqrt_n = math.sqrt(n)
    sigma0 = float(z0.sum()) / sqrt_n
    if abs(sigma0 - sigma_hat[0]) > atol:
        raise ValueError(
            f"initial pointer sum {sigma0!r} does not match the reduced trajectory's "
            f"sigma_hat(0)={sigma_hat[0]!r}"
        )
    s = np.asarray(spreading_factor(t, params), dtype=float)
    mean = sigma_hat / sqrt_n
    dev0 = z0 - float(z0.mean())
    dev0 -= dev0.mean()  # re-center: keeps the scaled row sums exactly on sigma_hat
    return mean[:, None] + np.outer(s, dev0)
