"""Bohmian velocities: closed-form backend and finite-difference oracle.

``velocity_analytic`` uses the exact Gaussian gradient algebra of the
kernel.  ``velocity_numeric`` never touches that algebra: it reconstructs
the full complex wave function from branch log-amplitudes/phases and
applies the raw current formula Im(Psi* dPsi)/|Psi|^2 with central finite
differences, which makes it an independent cross-check of every term in
the analytic route.  The decoupled longitudinal motion has the closed form
``y_closed_form``, used as an integration oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._kernel import GuidanceKernel
from .model import NODE_EPS, Configuration, NodeError, ScenarioParams

__all__ = ["VelocityVector", "velocity_analytic", "velocity_numeric", "fd_velocity", "y_closed_form"]


@dataclass(frozen=True)
class VelocityVector:
    """(dX'/dt', dY'/dt', dZ'_n/dt') at one configuration."""

    dx: float
    dy: float
    dz: tuple[float, ...]

    def __post_init__(self):
        vals = (self.dx, self.dy, *self.dz)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("velocity entries must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy, *self.dz])


def _check_config(config: Configuration, params: ScenarioParams):
    if len(config.z) != params.n_particles:
        raise ValueError(
            f"configuration has {len(config.z)} pointer coordinates, scenario has {params.n_particles}"
        )


def velocity_analytic(config: Configuration, params: ScenarioParams,
                      node_eps: float = NODE_EPS) -> VelocityVector:
    """Exact dimensionless guidance velocity at a non-node configuration."""
    _check_config(config, params)
    kern = GuidanceKernel(params)
    vx, vy, vz = kern.velocity(config.t_prime, config.x, config.y, config.z_array(),
                               node_floor=node_eps)
    return VelocityVector(vx, vy, tuple(float(v) for v in vz))


def fd_velocity(kern: GuidanceKernel, t: float, x: float, y: float, z: np.ndarray,
                h: float = 1e-5, richardson: bool = True,
                node_eps: float = NODE_EPS) -> tuple[float, float, list[float]]:
    """Finite-difference velocity on raw coordinates with a prebuilt kernel."""
    lr1, lr2, s1, s2 = kern.branch_eval(t, x, y, z)
    scale = max(lr1, lr2)

    def psi(xp: float, yp: float, zp: np.ndarray) -> complex:
        a1, a2, p1, p2 = kern.branch_eval(t, xp, yp, zp)
        return cmath.exp(complex(a1 - scale, p1)) + cmath.exp(complex(a2 - scale, p2))

    psi_c = cmath.exp(complex(lr1 - scale, s1)) + cmath.exp(complex(lr2 - scale, s2))
    rho_hat = abs(psi_c) ** 2
    if rho_hat < node_eps:
        raise NodeError(rho_hat)

    def current(dpsi: complex) -> float:
        return (psi_c.conjugate() * dpsi).imag / rho_hat

    def fd(move):
        d1 = (psi(*move(h)) - psi(*move(-h))) / (2.0 * h)
        if not richardson:
            return d1
        d2 = (psi(*move(h / 2.0)) - psi(*move(-h / 2.0))) / h
        return (4.0 * d2 - d1) / 3.0

    dx = kern.px * current(fd(lambda s: (x + s, y, z)))
    dy = kern.py * current(fd(lambda s: (x, y + s, z)))
    dz = []
    for n in range(kern.n):
        e = np.zeros(kern.n)
        e[n] = 1.0
        dz.append(kern.pz * current(fd(lambda s: (x, y, z + s * e))))
    return dx, dy, dz


def velocity_numeric(config: Configuration, params: ScenarioParams,
                     h: float = 1e-5, richardson: bool = True,
                     node_eps: float = NODE_EPS) -> VelocityVector:
    """Finite-difference guidance velocity from the full complex Psi.

    Central differences are O(h^2); with ``richardson`` the h and h/2
    stencils are combined to O(h^4).  The wave function is rescaled by the
    larger branch amplitude at the stencil center, so the ratio
    Im(Psi* dPsi)/|Psi|^2 is immune to amplitude underflow.  Independent of
    the analytic route: only branch values enter, never their gradients.
    """
    if not 0.0 < h <= 1e-4:
        raise ValueError(f"finite-difference step must be in (0, 1e-4], got {h!r}")
    _check_config(config, params)
    kern = GuidanceKernel(params)
    dx, dy, dz = fd_velocity(kern, config.t_prime, config.x, config.y,
                             config.z_array(), h, richardson, node_eps)
    return VelocityVector(dx, dy, tuple(dz))


def y_closed_form(t_prime: float, y0_prime: float, xi_y: float) -> float:
    """Y'(t') = t' + Y'_0 sqrt(1 + 4 t'^2 / xi_y^2) (decoupled longitudinal motion)."""
    if xi_y <= 0:
        raise ValueError("xi_y must be > 0")
    return t_prime + y0_prime * math.sqrt(1.0 + 4.0 * t_prime * t_prime / (xi_y * xi_y))
