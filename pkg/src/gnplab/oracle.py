"""Radial reference solution for the concentric-disc configuration.

Core disc of radius ``a`` centered at the origin, outer disc of radius
``R``, unit-density source on the core scaled by ``f0``.  The first field
has the closed form

    u(r) = (f0 a^2 / 2) log(R / r)                       a <= r <= R
    u(r) = (f0 a^2 / 2) log(R / a) + f0 (a^2 - r^2) / 4  0 <= r <= a

and the companion field v (with -lap v = u, v(R) = 0) is produced here by
one-dimensional quadrature on a dense radial grid, independent of any
two-dimensional machinery.  Everything in this module is meant to serve
as a frozen expectation for the finite-difference pipeline.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import jn_zeros


class RadialOracle:
    """Two-pass radial solution on concentric discs."""

    def __init__(self, a: float = 0.5, R: float = 1.0, f0: float = 1.0,
                 n_quad: int = 20001):
        if not (0.0 < a < R):
            raise ValueError("need 0 < a < R")
        self.a = float(a)
        self.R = float(R)
        self.f0 = float(f0)
        self._r = np.linspace(0.0, self.R, n_quad)
        # U(r) = int_0^r s u(s) ds drives both v and the flux of u.
        u_vals = self.u(self._r)
        self._U = cumulative_trapezoid(self._r * u_vals, self._r, initial=0.0)
        # v(r) = int_r^R U(rho)/rho drho; the integrand extends to 0 at rho=0.
        integrand = np.zeros_like(self._r)
        integrand[1:] = self._U[1:] / self._r[1:]
        W = cumulative_trapezoid(integrand, self._r, initial=0.0)
        self._v = W[-1] - W

    # ---- first field -------------------------------------------------

    def u(self, r):
        r = np.asarray(r, dtype=float)
        a, R, f0 = self.a, self.R, self.f0
        outer = 0.5 * f0 * a * a * np.log(R / np.maximum(r, 1e-300))
        inner = 0.5 * f0 * a * a * np.log(R / a) + 0.25 * f0 * (a * a - r * r)
        return np.where(r >= a, outer, inner)

    def du(self, r):
        """Signed radial derivative u'(r) (nonpositive)."""
        r = np.asarray(r, dtype=float)
        a, f0 = self.a, self.f0
        with np.errstate(divide="ignore"):
            outer = -0.5 * f0 * a * a / np.where(r > 0, r, np.inf)
        inner = -0.5 * f0 * r
        return np.where(r >= a, outer, inner)

    def grad_u(self, r):
        return np.abs(self.du(r))

    @property
    def max_u(self) -> float:
        return float(self.u(0.0))

    @property
    def u_core_boundary(self) -> float:
        return float(self.u(self.a))

    def level_radius(self, t):
        """Radius of the circle {u = t} for 0 <= t < max_u."""
        t = np.asarray(t, dtype=float)
        a, R, f0 = self.a, self.R, self.f0
        ua = self.u_core_boundary
        outer = R * np.exp(-2.0 * t / (f0 * a * a))
        arg = a * a - 4.0 * (t - ua) / f0
        inner = np.sqrt(np.maximum(arg, 0.0))
        return np.where(t <= ua, outer, inner)

    def thickness(self, t):
        """d_t on every ray: level radius minus the core radius."""
        return self.level_radius(t) - self.a

    def thickness_rate(self, t):
        """Exact d/dt of the thickness, equal to -1/|grad u| at the level."""
        return -1.0 / self.grad_u(self.level_radius(t))

    # ---- companion field ---------------------------------------------

    def v(self, r):
        return np.interp(np.asarray(r, dtype=float), self._r, self._v)

    def dv(self, r):
        """Signed radial derivative v'(r) = -U(r)/r (nonpositive)."""
        r = np.asarray(r, dtype=float)
        U = np.interp(r, self._r, self._U)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = -U / r
        return np.where(r > 0, out, 0.0)

    def grad_v(self, r):
        return np.abs(self.dv(r))

    @property
    def max_v(self) -> float:
        return float(self._v[0])

    def v_level_radius(self, s):
        """Radius of {v = s}; v decreases strictly in r."""
        s = np.asarray(s, dtype=float)
        return np.interp(-s, -self._v, self._r)

    # ---- integrals over the full disc --------------------------------

    def integral_u(self) -> float:
        """int_Omega u dx = 2 pi U(R)."""
        return float(2.0 * np.pi * self._U[-1])

    def integral_v(self) -> float:
        return float(2.0 * np.pi * np.trapezoid(self._r * self._v, self._r))

    def integral_grad_u(self) -> float:
        return float(2.0 * np.pi * np.trapezoid(self._r * self.grad_u(self._r), self._r))

    def source_mass(self) -> float:
        return float(np.pi * self.a * self.a * self.f0)


def lambda1_disc(radius: float = 1.0) -> float:
    """First Dirichlet eigenvalue of a disc: (j_{0,1} / radius)^2."""
    j01 = float(jn_zeros(0, 1)[0])
    return (j01 / radius) ** 2


def lambda1_rectangle(lx: float, ly: float) -> float:
    return float(np.pi ** 2 * (1.0 / (lx * lx) + 1.0 / (ly * ly)))
