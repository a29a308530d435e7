"""Interaction potentials: value, gradient and Hessian over difference stencils.

1D chain potentials act on stencils g indexed by rho in {-r_cut..-1, 1..r_cut}
(slot order ``STENCIL_1D``).  2D potentials act on the six nearest-neighbour
bond slots g_1..g_6 in cyclic order, a_1 = (1,0), a_j = rotation of a_1 by
2*pi*(j-1)/6.  Scalar potentials take real slots; the planar EAM potential
takes one 2-vector per slot.

All evaluators are pure and the parameter objects immutable, so instances may
be shared freely between workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STENCIL_1D = (-2, -1, 1, 2)


class ArityError(ValueError):
    """Stencil dimension does not match the potential."""


class SingularConfigurationError(ValueError):
    """A bond vector of zero length was passed to a radial potential."""


def direction(j):
    """Unit lattice direction a_j, a_1 = (1, 0), counterclockwise."""
    th = 2.0 * np.pi * ((j - 1) % 6) / 6.0
    return np.array([np.cos(th), np.sin(th)])


DIRECTIONS = tuple(direction(j) for j in range(1, 7))


# ---------------------------------------------------------------------------
# 1D chain potentials
# ---------------------------------------------------------------------------

class StencilPotential1D:
    """Base: many-body site energy over the stencil {-r_cut..r_cut}\\{0}."""

    r_cut = 2

    @property
    def stencil(self):
        return tuple(r for r in range(-self.r_cut, self.r_cut + 1) if r != 0)

    @property
    def arity(self):
        return 2 * self.r_cut

    def evaluate(self, g):
        raise NotImplementedError

    def homogeneous_stencil(self, strain):
        return np.array([strain * r for r in self.stencil], dtype=float)

    def hessian_at(self, strain):
        return self.evaluate(self.homogeneous_stencil(strain))[2]


@dataclass(frozen=True)
class SecondNeighborQuadratic(StencilPotential1D):
    """Quadratic site energy carrying prescribed second derivatives.

    The Hessian over slots (-2, -1, 1, 2) is constant:

        V_{1,1} = V_{-1,-1} = 1,      V_{1,-1} = alpha,
        V_{2,2} = V_{-2,-2} = beta,   V_{2,-2} = gamma,
        V_{1,2} = V_{-1,-2} = delta,  V_{-1,2} = V_{1,-2} = -delta,

    and the energy is the induced quadratic about the homogeneous stencil at
    ``ref_strain`` (so the gradient vanishes there).
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    ref_strain: float = 1.0

    def hessian_matrix(self):
        idx = {r: i for i, r in enumerate(STENCIL_1D)}
        H = np.zeros((4, 4))

        def put(r, s, v):
            H[idx[r], idx[s]] = v
            H[idx[s], idx[r]] = v

        put(1, 1, 1.0)
        put(-1, -1, 1.0)
        put(1, -1, self.alpha)
        put(2, 2, self.beta)
        put(-2, -2, self.beta)
        put(2, -2, self.gamma)
        put(1, 2, self.delta)
        put(-1, -2, self.delta)
        put(-1, 2, -self.delta)
        put(1, -2, -self.delta)
        return H

    def evaluate(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (4,):
            raise ArityError(f"expected 4 slots, got {g.shape}")
        H = self.hessian_matrix()
        dg = g - self.homogeneous_stencil(self.ref_strain)
        return 0.5 * float(dg @ H @ dg), H @ dg, H


@dataclass(frozen=True)
class EamChain1D(StencilPotential1D):
    """EAM-type chain potential with Morse pair part and quartic embedding.

        V(g) = sum_rho phi(|g_rho|) + G(sum_rho psi(|g_rho|)),
        phi(s) = exp(-2A(s-1)) - 2 exp(-A(s-1)),
        psi(s) = exp(-B s),
        G(s)   = C ((s - s0)^2 + (s - s0)^4).

    Defaults: A = B = 3, C = 5, s0 = 2 exp(-0.95 B) + 2 exp(-1.9 B).
    """

    A: float = 3.0
    B: float = 3.0
    C: float = 5.0
    s0: float = 2.0 * np.exp(-0.95 * 3.0) + 2.0 * np.exp(-1.9 * 3.0)

    def _phi(self, s):
        e1 = np.exp(-self.A * (s - 1.0))
        v = e1 * e1 - 2.0 * e1
        d1 = -2.0 * self.A * e1 * e1 + 2.0 * self.A * e1
        d2 = 4.0 * self.A**2 * e1 * e1 - 2.0 * self.A**2 * e1
        return v, d1, d2

    def _psi(self, s):
        e = np.exp(-self.B * s)
        return e, -self.B * e, self.B**2 * e

    def _G(self, s):
        d = s - self.s0
        return (self.C * (d * d + d**4),
                self.C * (2.0 * d + 4.0 * d**3),
                self.C * (2.0 + 12.0 * d * d))

    def evaluate(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (4,):
            raise ArityError(f"expected 4 slots, got {g.shape}")
        s = np.abs(g)
        sgn = np.sign(g)
        pv, p1, p2 = self._phi(s)
        qv, q1, q2 = self._psi(s)
        Gv, G1, G2 = self._G(float(np.sum(qv)))
        energy = float(np.sum(pv)) + Gv
        grad = (p1 + G1 * q1) * sgn
        hess = np.diag(p2 + G1 * q2) + G2 * np.outer(q1 * sgn, q1 * sgn)
        # the diagonal radial terms carry sgn^2 = 1
        return energy, grad, hess


# ---------------------------------------------------------------------------
# 2D potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HexQuadratic2D:
    """Hexagonally symmetric scalar 6-slot quadratic.

    The 6x6 Hessian is the circulant with row pattern
    (alpha0, alpha1, alpha2, alpha3, alpha2, alpha1); the energy is the
    quadratic (1/2) g^T H g about the zero stencil.
    """

    alpha0: float
    alpha1: float
    alpha2: float
    alpha3: float

    arity = 6
    vector_dim = 1

    @property
    def betas(self):
        b1 = self.alpha0 + self.alpha1 - self.alpha2 - self.alpha3
        b2 = self.alpha0 + self.alpha1 + self.alpha2 + self.alpha3
        b3 = 2.0 * self.alpha0 + 2.0 * self.alpha1 + 4.0 * self.alpha2 + self.alpha3
        return (b1, b2, b3)

    def hessian_matrix(self):
        pat = (self.alpha0, self.alpha1, self.alpha2, self.alpha3,
               self.alpha2, self.alpha1)
        H = np.empty((6, 6))
        for i in range(6):
            for j in range(6):
                H[i, j] = pat[(j - i) % 6]
        return H

    def evaluate(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (6,):
            raise ArityError(f"expected 6 slots, got {g.shape}")
        H = self.hessian_matrix()
        return 0.5 * float(g @ H @ g), H @ g, H


@dataclass(frozen=True)
class EamPlanar2D:
    """Vectorial modified EAM over six bond vectors g_1..g_6 in R^2.

        V(g) = sum_j phi(|g_j|) + G(sum_j psi(|g_j|))
               + D * sum_j (r_j . r_{j+1} - 1/2)^2,   r_j = g_j / |g_j|.

    phi, psi, G as in :class:`EamChain1D`; defaults A = B = 3,
    s0 = 6 exp(-0.95 B).  The bond-angle term vanishes at the reference
    hexagonal geometry where neighbouring bonds subtend 60 degrees.
    """

    A: float = 3.0
    B: float = 3.0
    C: float = 1.0
    D: float = 0.0
    s0: float = 6.0 * np.exp(-0.95 * 3.0)

    arity = 6
    vector_dim = 2

    def _phi(self, s):
        e1 = np.exp(-self.A * (s - 1.0))
        return (e1 * e1 - 2.0 * e1,
                -2.0 * self.A * e1 * e1 + 2.0 * self.A * e1,
                4.0 * self.A**2 * e1 * e1 - 2.0 * self.A**2 * e1)

    def _psi(self, s):
        e = np.exp(-self.B * s)
        return e, -self.B * e, self.B**2 * e

    def _G(self, s):
        d = s - self.s0
        return (self.C * (d * d + d**4),
                self.C * (2.0 * d + 4.0 * d**3),
                self.C * (2.0 + 12.0 * d * d))

    def evaluate(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (6, 2):
            raise ArityError(f"expected shape (6, 2), got {g.shape}")
        r = np.linalg.norm(g, axis=1)
        if np.any(r < 1e-12):
            raise SingularConfigurationError("zero-length bond")
        rhat = g / r[:, None]
        I2 = np.eye(2)
        P = [I2 - np.outer(rhat[j], rhat[j]) for j in range(6)]

        pv, p1, p2 = self._phi(r)
        qv, q1, q2 = self._psi(r)
        Gv, G1, G2 = self._G(float(np.sum(qv)))

        energy = float(np.sum(pv)) + Gv
        grad = np.zeros((6, 2))
        hess = np.zeros((6, 2, 6, 2))

        for j in range(6):
            grad[j] += (p1[j] + G1 * q1[j]) * rhat[j]
            radial2 = p2[j] + G1 * q2[j]
            radial1 = (p1[j] + G1 * q1[j]) / r[j]
            hess[j, :, j, :] += (radial2 * np.outer(rhat[j], rhat[j])
                                 + radial1 * P[j])
        for j in range(6):
            for k in range(6):
                hess[j, :, k, :] += G2 * q1[j] * q1[k] * np.outer(rhat[j], rhat[k])

        if self.D != 0.0:
            for j in range(6):
                k = (j + 1) % 6
                t = float(rhat[j] @ rhat[k]) - 0.5
                dj = P[j] @ rhat[k] / r[j]          # dt/dg_j
                dk = P[k] @ rhat[j] / r[k]          # dt/dg_k
                energy += self.D * t * t
                grad[j] += 2.0 * self.D * t * dj
                grad[k] += 2.0 * self.D * t * dk
                # second derivatives of t
                Ps_j = P[j] @ rhat[k]
                Ps_k = P[k] @ rhat[j]
                tjj = -(np.outer(rhat[j], Ps_j) + np.outer(Ps_j, rhat[j])
                        + float(rhat[j] @ rhat[k]) * P[j]) / r[j]**2
                tkk = -(np.outer(rhat[k], Ps_k) + np.outer(Ps_k, rhat[k])
                        + float(rhat[j] @ rhat[k]) * P[k]) / r[k]**2
                tjk = P[j] @ P[k] / (r[j] * r[k])
                hess[j, :, j, :] += 2.0 * self.D * (t * tjj + np.outer(dj, dj))
                hess[k, :, k, :] += 2.0 * self.D * (t * tkk + np.outer(dk, dk))
                hess[j, :, k, :] += 2.0 * self.D * (t * tjk + np.outer(dj, dk))
                hess[k, :, j, :] += 2.0 * self.D * (t * tjk.T + np.outer(dk, dj))
        return energy, grad, hess

    def hessian_at(self, F):
        """12x12 site Hessian at the homogeneous deformation y = F x."""
        F = np.asarray(F, dtype=float)
        g = np.array([F @ direction(j) for j in range(1, 7)])
        return self.evaluate(g)[2]


# ---------------------------------------------------------------------------
# Cauchy--Born energy density
# ---------------------------------------------------------------------------

def cauchy_born(potential, F):
    """Cauchy--Born density W(F) = V(F . stencil) with exact derivatives.

    1D: F > 0 scalar, returns (W, W', W'').
    2D scalar: F in R^2, returns (W, grad in R^2, hess 2x2).
    2D vectorial: F in R^{2x2}, returns (W, grad 2x2, hess shape (2,2,2,2)).
    """
    if isinstance(potential, StencilPotential1D):
        F = float(F)
        if F <= 0:
            raise ValueError("1D strain must be positive")
        rho = np.array(potential.stencil, dtype=float)
        e, g, h = potential.evaluate(F * rho)
        return e, float(g @ rho), float(rho @ h @ rho)

    F = np.asarray(F, dtype=float)
    if getattr(potential, "vector_dim", 1) == 1:
        if F.shape != (2,):
            raise ArityError("scalar 2D Cauchy-Born expects F in R^2")
        A = np.array([direction(j) for j in range(1, 7)])  # slots x 2
        e, g, h = potential.evaluate(A @ F)
        return e, A.T @ g, A.T @ h @ A
    if F.shape != (2, 2):
        raise ArityError("vectorial Cauchy-Born expects F in R^{2x2}")
    g = np.array([F @ direction(j) for j in range(1, 7)])
    e, gr, h = potential.evaluate(g)
    A = np.array([direction(j) for j in range(1, 7)])
    grad = np.einsum("ja,jb->ab", gr, A)
    hess = np.einsum("jakc,jb,kd->abcd", h, A, A)
    return e, grad, hess
