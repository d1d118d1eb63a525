"""Shared numerical core: branch evaluation and guidance velocities.

Every formula below is derived from the product-of-Gaussians branch

    Phi_+/- ~ exp{ -u_+/-^2/Dx - w^2/Dy - sum_n q_n^2/Dz }
              * exp{ i [ -/+ xi_x X' + xi_y Y' + sum_n Xi_n^{+/-} Z'_n
                         + (ax t/Dx) u^2 + (ay t/Dy) w^2 + (az t/Dz) sum q^2 ] }

with residuals u_+/- = X' -/+ (d' - beta t'), w = Y' - t',
q_n^{+/-} = Z'_n - gamma_n^{+/-} t', packet speeds
beta = xi_x/(r^2 xi_y), gamma_n = mu Xi_n R^2 / (r^2 xi_y), and spreading
denominators D = 1 + (a t')^2 where ax = 2/(r^2 xi_y), ay = 2/xi_y,
az = 2 mu R^2/(r^2 xi_y).

The guidance velocity of coordinate w with scale prefactor P_w is

    v_w = P_w [ grad_w S_bar
                + ((w1 - w2)/2) grad_w delta_S
                + wc sin(delta_S) (grad_w log R1 - grad_w log R2) ]

with S_bar = (S1+S2)/2, branch weights w1 = R1^2/rho, w2 = R2^2/rho,
wc = R1 R2/rho, rho = R1^2 + R2^2 + 2 R1 R2 cos(delta_S), and prefactors
P_x = 1/(r^2 xi_y), P_y = 1/xi_y, P_z = mu R^2/(r^2 xi_y).

Numerical care taken here:

* weights are computed after dividing by max(R1^2, R2^2), so nothing
  overflows no matter how lopsided the branches are;
* when |log Omega| exceeds DOMINANT_LOG_CUTOFF the empty branch is dropped
  entirely (its weight is below e^-80, far under any integration
  tolerance), which also avoids pointless trig on huge phases;
* the expression trees for the two branches are exact mirror images, so
  reflecting (X', Z') -> (-X', -Z') in single-pointer mode swaps the
  branches bitwise.  Ensemble mirror symmetry in the tests relies on this.
"""

from __future__ import annotations

import math

import numpy as np

from .model import NODE_EPS, NodeError, ScenarioParams

__all__ = ["GuidanceKernel", "DOMINANT_LOG_CUTOFF"]

# |log Omega| above which the weaker branch (weight < e^-80) is ignored.
DOMINANT_LOG_CUTOFF = 40.0


class GuidanceKernel:
    """Precomputed scales for one scenario; all methods are pure."""

    __slots__ = (
        "params", "n", "xi_x", "xi_y", "d", "beta",
        "px", "py", "pz", "ax", "ay", "az",
        "xi_p", "xi_m", "gam_p", "gam_m",
    )

    def __init__(self, params: ScenarioParams):
        self.params = params
        self.n = params.n_particles
        self.xi_x = params.xi_x
        self.xi_y = params.xi_y
        self.d = params.d_prime
        r2xy = params.r * params.r * params.xi_y
        self.px = 1.0 / r2xy
        self.py = 1.0 / params.xi_y
        self.pz = params.mu * params.R * params.R / r2xy
        self.beta = params.xi_x / r2xy
        self.ax = 2.0 / r2xy
        self.ay = 2.0 / params.xi_y
        self.az = 2.0 * self.pz
        self.xi_p = np.array([v[0] for v in params.pointer_velocities], dtype=float)
        self.xi_m = np.array([v[1] for v in params.pointer_velocities], dtype=float)
        self.gam_p = self.pz * self.xi_p
        self.gam_m = self.pz * self.xi_m

    # -- packet geometry -------------------------------------------------

    def denominators(self, t: float) -> tuple[float, float, float]:
        """Spreading denominators (Dx, Dy, Dz) at time t'."""
        return (
            1.0 + (self.ax * t) ** 2,
            1.0 + (self.ay * t) ** 2,
            1.0 + (self.az * t) ** 2,
        )

    def spreading_factor(self, t) -> float | np.ndarray:
        """Pointer packet width growth sqrt(Dz); vectorizes over t."""
        return np.sqrt(1.0 + (self.az * t) ** 2)

    def _residuals(self, t: float, x: float, y: float, z: np.ndarray):
        Dx, Dy, Dz = self.denominators(t)
        cx = self.d - self.beta * t
        up = x - cx
        um = x + cx
        w = y - t
        qp = z - self.gam_p * t
        qm = z - self.gam_m * t
        return Dx, Dy, Dz, up, um, w, qp, qm

    # -- branch evaluation -----------------------------------------------

    def branch_eval(self, t: float, x: float, y: float, z: np.ndarray):
        """(log_r1, log_r2, s1, s2) with common normalization dropped."""
        Dx, Dy, Dz, up, um, w, qp, qm = self._residuals(t, x, y, z)
        upq = up * up
        umq = um * um
        wq = w * w
        qpq = float(qp @ qp)
        qmq = float(qm @ qm)
        lr1 = -(upq / Dx + wq / Dy + qpq / Dz)
        lr2 = -(umq / Dx + wq / Dy + qmq / Dz)
        sx = self.xi_x * x
        pwy = self.xi_y * y
        pw1 = float(self.xi_p @ z)
        pw2 = float(self.xi_m @ z)
        gx = self.ax * t / Dx
        gy = self.ay * t / Dy
        gz = self.az * t / Dz
        s1 = (-sx + pw1) + pwy + gx * upq + gy * wq + gz * qpq
        s2 = (sx + pw2) + pwy + gx * umq + gy * wq + gz * qmq
        return lr1, lr2, s1, s2

    def log_omega_parts(self, t: float, x: float, z: np.ndarray):
        """(test-particle part, pointer part) of log Omega = log R1/R2.

        Closed forms 4 X'(d' - beta t')/Dx and
        [2 t' sum_n (gamma_n^+ - gamma_n^-) Z'_n - t'^2 sum_n ((gamma_n^+)^2
        - (gamma_n^-)^2)]/Dz, evaluated without the cancellation noise of
        subtracting the two total log-amplitudes.
        """
        Dx, _, Dz = self.denominators(t)
        cx = self.d - self.beta * t
        x_part = 4.0 * x * cx / Dx
        z_lin = 2.0 * t * float((self.gam_p - self.gam_m) @ z)
        z_quad = t * t * float(self.gam_p @ self.gam_p - self.gam_m @ self.gam_m)
        z_part = (z_lin - z_quad) / Dz
        return x_part, z_part

    # -- guidance velocity -----------------------------------------------

    def velocity(self, t: float, x: float, y: float, z: np.ndarray,
                 node_floor: float = NODE_EPS):
        """(vx, vy, vz_array) of the Bohmian flow at one configuration.

        Raises NodeError if the normalized density is below node_floor.
        """
        Dx, Dy, Dz, up, um, w, qp, qm = self._residuals(t, x, y, z)
        gx = self.ax * t / Dx
        gy = self.ay * t / Dy
        gz = self.az * t / Dz

        vy = self.py * (self.xi_y + 2.0 * gy * w)

        # gradients of phases and log-amplitudes per branch
        ds1x = -self.xi_x + 2.0 * gx * up
        ds2x = self.xi_x + 2.0 * gx * um

        upq = up * up
        umq = um * um
        qpq = float(qp @ qp)
        qmq = float(qm @ qm)
        l = -(upq / Dx + qpq / Dz) + (umq / Dx + qmq / Dz)  # log Omega (w-term cancels)

        if l > DOMINANT_LOG_CUTOFF:
            vx = self.px * ds1x
            vz = self.pz * (self.xi_p + (2.0 * gz) * qp)
            return vx, vy, vz
        if l < -DOMINANT_LOG_CUTOFF:
            vx = self.px * ds2x
            vz = self.pz * (self.xi_m + (2.0 * gz) * qm)
            return vx, vy, vz

        sx = self.xi_x * x
        pw1 = float(self.xi_p @ z)
        pw2 = float(self.xi_m @ z)
        pwy = self.xi_y * y
        wq = w * w
        s1 = (-sx + pw1) + pwy + gx * upq + gy * wq + gz * qpq
        s2 = (sx + pw2) + pwy + gx * umq + gy * wq + gz * qmq
        d = s1 - s2

        el = math.exp(-abs(l))
        e2 = el * el
        cosd = math.cos(d)
        rho_hat = 1.0 + e2 + 2.0 * el * cosd
        if rho_hat < node_floor:
            raise NodeError(rho_hat)
        if l >= 0:
            w1 = 1.0 / rho_hat
            w2 = e2 / rho_hat
        else:
            w1 = e2 / rho_hat
            w2 = 1.0 / rho_hat
        wc = el / rho_hat
        half_dw = 0.5 * (w1 - w2)
        wcs = wc * math.sin(d)

        dlr1x = -2.0 * up / Dx
        dlr2x = -2.0 * um / Dx
        vx = self.px * (0.5 * (ds1x + ds2x) + half_dw * (ds1x - ds2x) + wcs * (dlr1x - dlr2x))

        ds1z = self.xi_p + (2.0 * gz) * qp
        ds2z = self.xi_m + (2.0 * gz) * qm
        dlr1z = (-2.0 / Dz) * qp
        dlr2z = (-2.0 / Dz) * qm
        vz = self.pz * (0.5 * (ds1z + ds2z) + half_dw * (ds1z - ds2z) + wcs * (dlr1z - dlr2z))
        return vx, vy, vz
