# Closed-form geometry of the unit ball in C^n: preferred geodesic discs
# through a boundary point, their dual maps, the inversion recovering
# (direction, disc parameter) from a point, Kobayashi distance, horospheres,
# the negative Poisson-type kernel with its exact complex Hessian, and the
# Busemann function.  Everything here is exact and serves as the oracle for
# the numerical solver modules.

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lempertkit.core import hermitian_inner, boundary_nodes, HardyMap

__all__ = [
    "BoundaryDirection",
    "Horosphere",
    "ball_geodesic",
    "ball_geodesic_maps",
    "ball_invert",
    "ball_kobayashi",
    "ball_horosphere_membership",
    "ball_horosphere_shape",
    "ball_poisson_kernel",
    "ball_poisson_hessian",
    "ball_poisson_hessian_matrix",
    "ball_busemann",
]


@dataclass(frozen=True)
class BoundaryDirection:
    """A unit direction v at a boundary point p of the ball with <v,p> > 0
    (for the ball the outward normal at p is p itself)."""

    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=complex)
        v = np.asarray(self.v, dtype=complex)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)
        if abs(np.linalg.norm(p) - 1.0) > 1e-9:
            raise ValueError("p must lie on the unit sphere")
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("v must be a unit vector")
        c = hermitian_inner(v, p)
        if abs(c.imag) > 1e-9 or c.real <= 0:
            raise ValueError("<v, nu_p> must be real and positive")

    @property
    def pairing(self):
        """<v, nu_p> = <v, p>, a positive real."""
        return float(np.real(hermitian_inner(self.v, self.p)))


@dataclass(frozen=True)
class Horosphere:
    """Horosphere data: boundary center p, interior pole z0, radius R > 0."""

    p: np.ndarray
    z0: np.ndarray
    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("radius R must be positive")


def ball_geodesic_maps(bd):
    """The preferred geodesic disc and its dual through (p, v), as HardyMaps.

    eta(zeta) = p + (zeta - 1) c v with c = <v,p>;
    eta*(zeta) = (zeta conj(p) + (1 - zeta) c conj(v)) / c^2.

    The pair satisfies eta(1) = p, eta'(1) = c v, the bilinear normalization
    sum_j eta'_j eta*_j = 1, and |eta*| = 1/c^2 identically on the circle (so
    the preferred condition d|eta*(e^{i theta})|/d theta = 0 holds).
    """
    p, v = bd.p, bd.v
    c = bd.pairing
    phi = HardyMap(np.stack([p - c * v, c * v], axis=1))
    dual = HardyMap(
        np.stack([np.conj(v) / c, (np.conj(p) - c * np.conj(v)) / c**2], axis=1)
    )
    return phi, dual


def ball_geodesic(bd, M=256):
    """GeodesicPair for the preferred ball geodesic through (p, v)."""
    from lempertkit.geodesics import GeodesicPair

    phi, dual = ball_geodesic_maps(bd)
    c = bd.pairing
    mu = np.full(M, 1.0 / c**2)
    pair = GeodesicPair(phi=phi, dual=dual, mu=mu, residuals={"closed_form": 0.0})
    return pair


def ball_invert(p, w):
    """Recover (v, zeta) with eta_v(zeta) = w for a point w of the closed
    ball, w != p.  Returns (BoundaryDirection, complex zeta)."""
    p = np.asarray(p, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dw = w - p
    ndw = np.linalg.norm(dw)
    if ndw < 1e-14:
        raise ValueError("w must differ from p")
    s = 1.0 - hermitian_inner(p, w)  # 1 - <nu_p, w>
    v = -(s / abs(s)) * (dw / ndw)
    t = 1.0 - np.conj(s)  # <w, p>
    zeta = 1.0 - (ndw**2 / abs(s) ** 2) * (1.0 - t)
    return BoundaryDirection(p=p, v=v), complex(zeta)


def _mobius_translate(a, z):
    """The ball automorphism T_a with T_a(a) = 0 (standard Mobius form)."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    na2 = float(np.real(hermitian_inner(a, a)))
    if na2 < 1e-28:
        return -z  # T_0(z) = -z
    s = np.sqrt(1.0 - na2)
    za = hermitian_inner(z, a)
    Pz = (za / na2) * a
    Qz = z - Pz
    return (a - Pz - s * Qz) / (1.0 - za)


def ball_kobayashi(z, w):
    """Kobayashi distance of the unit ball via Mobius translation to 0."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.linalg.norm(z) >= 1.0 or np.linalg.norm(w) >= 1.0:
        raise ValueError("arguments must be interior points of the ball")
    m = np.linalg.norm(_mobius_translate(z, w))
    return float(np.arctanh(min(m, 1.0 - 1e-16)))


def ball_horosphere_membership(p, R, z, z0=None):
    """Membership of z in the horosphere of center p, radius R.

    With pole 0 this is |1 - <z,p>|^2 / (1 - |z|^2) < R; a general pole z0
    shifts the level via the Busemann function."""
    p = np.asarray(p, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if z0 is None or np.linalg.norm(z0) < 1e-15:
        denom = 1.0 - float(np.real(hermitian_inner(z, z)))
        if denom <= 0.0:
            return False
        val = abs(1.0 - hermitian_inner(z, p)) ** 2 / denom
        return bool(val < R)
    return bool(ball_busemann(z, np.asarray(z0, dtype=complex), p) < 0.5 * np.log(R))


def ball_horosphere_shape(p, R):
    """Euclidean ellipsoid parameters of the pole-0 horosphere: center
    p/(1+R), radius R/(1+R) in the complex line of p, sqrt(R/(1+R))
    orthogonally."""
    p = np.asarray(p, dtype=complex)
    r = R / (1.0 + R)
    return p / (1.0 + R), r, float(np.sqrt(r))


def ball_poisson_kernel(z, p):
    """P(z, p) = -(1 - |z|^2) / |1 - <z,p>|^2: negative inside the ball,
    vanishing on the sphere away from p."""
    z = np.asarray(z, dtype=complex)
    p = np.asarray(p, dtype=complex)
    den = abs(1.0 - hermitian_inner(z, p)) ** 2
    if den < 1e-28:
        raise ValueError("kernel is singular at z = p")
    return float(-(1.0 - np.real(hermitian_inner(z, z))) / den)


def ball_poisson_hessian(z, p, v):
    """Exact value of the Hermitian complex-Hessian form of P(., p) at z on
    the direction v: |(1-<z,p>) v + <v,p> (z-p)|^2 / |1-<z,p>|^4.

    Nonnegative, and zero exactly when v is parallel to z - p."""
    z = np.asarray(z, dtype=complex)
    p = np.asarray(p, dtype=complex)
    v = np.asarray(v, dtype=complex)
    a = 1.0 - hermitian_inner(z, p)
    u = a * v + hermitian_inner(v, p) * (z - p)
    return float(np.real(hermitian_inner(u, u)) / abs(a) ** 4)


def ball_poisson_hessian_matrix(z, p):
    """Hermitian matrix H with v^H H v equal to the Hessian form above:
    H = M^H M / |a|^4 with M = a I + (z-p) conj(p)^T, a = 1 - <z,p>.

    det M = a^{n-1} (a + <z-p, p>) = 0, so H is singular with null
    direction z - p."""
    z = np.asarray(z, dtype=complex)
    p = np.asarray(p, dtype=complex)
    a = 1.0 - hermitian_inner(z, p)
    M = a * np.eye(len(z), dtype=complex) + np.outer(z - p, np.conj(p))
    return (np.conj(M).T @ M) / abs(a) ** 4


def ball_busemann(z, z0, p):
    """Busemann function of the ball at the boundary point p:
    B(z, z0) = (1/2) log(P(z0,p) / P(z,p))."""
    return 0.5 * float(
        np.log(ball_poisson_kernel(z0, p) / ball_poisson_kernel(z, p))
    )
