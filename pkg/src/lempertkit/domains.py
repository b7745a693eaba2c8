# Bounded strongly linearly convex domains given by defining functions with
# derivative oracles: built-in ball / linear-ball / perturbed-ball families
# plus a custom hook, outward unit normals, convexity margins, boundary
# projection and distance, and non-tangential approach regions.

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from lempertkit.core import hermitian_inner

__all__ = [
    "DomainSpec",
    "NontangentialRegion",
    "unit_normal",
    "strong_linear_convexity_check",
    "distance_to_boundary",
    "in_nontangential_region",
    "project_to_boundary",
    "hessian_fd",
]

_BOUNDARY_TOL = 1e-9


class DomainSpec:
    """A bounded domain {r < 0} in C^n with derivative oracles for r.

    The complex-vector gradient convention: component j of grad(z) is
    dr/dx_j + i dr/dy_j = 2 * conj(dr/dz_j), so that the outward normal is
    grad/|grad| and Re<v, nu> is the normalized directional derivative.

    kind is one of 'ball' (r = |z|^2 - 1), 'linear-ball'
    (r = |A^{-1}(z-b)|^2 - 1), 'perturbed-ball'
    (r = |z|^2 - 1 + eps Re(z_1^2)) or 'custom' with user callbacks.
    """

    def __init__(self, kind, n, A=None, b=None, eps=None, callbacks=None):
        self.kind = kind
        self.n = int(n)
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if kind == "ball":
            self.anchor = np.zeros(self.n, dtype=complex)
        elif kind == "linear-ball":
            self.A = np.asarray(A, dtype=complex)
            if self.A.shape != (self.n, self.n):
                raise ValueError("A must be n x n")
            self.b = (
                np.zeros(self.n, dtype=complex)
                if b is None
                else np.asarray(b, dtype=complex)
            )
            self.Ainv = np.linalg.inv(self.A)
            self.anchor = self.b.copy()
        elif kind == "perturbed-ball":
            self.eps = 0.1 if eps is None else float(eps)
            self.anchor = np.zeros(self.n, dtype=complex)
        elif kind == "custom":
            # callbacks: dict with r(z), grad(z) [complex vector convention],
            # optional hess_herm(z), hess_sym(z), anchor
            self.callbacks = dict(callbacks)
            self.anchor = np.asarray(
                self.callbacks.get("anchor", np.zeros(self.n)), dtype=complex
            )
        else:
            raise ValueError("unknown domain kind %r" % kind)

    # -- defining function and oracles -------------------------------------

    def r(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "ball":
            return float(np.sum(np.abs(z) ** 2) - 1.0)
        if self.kind == "linear-ball":
            u = self.Ainv @ (z - self.b)
            return float(np.sum(np.abs(u) ** 2) - 1.0)
        if self.kind == "perturbed-ball":
            return float(np.sum(np.abs(z) ** 2) - 1.0 + self.eps * np.real(z[0] ** 2))
        return float(self.callbacks["r"](z))

    def grad(self, z):
        """Complex-vector real gradient: component j is dr/dx_j + i dr/dy_j."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "ball":
            return 2.0 * z
        if self.kind == "linear-ball":
            u = self.Ainv @ (z - self.b)
            return 2.0 * (np.conj(self.Ainv).T @ u)
        if self.kind == "perturbed-ball":
            g = 2.0 * z.copy()
            g[0] += 2.0 * self.eps * np.conj(z[0])
            return g
        return np.asarray(self.callbacks["grad"](z), dtype=complex)

    def hess_herm(self, z):
        """Hermitian block H[j,k] = d^2 r / dz_j dzbar_k."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "ball" or self.kind == "perturbed-ball":
            return np.eye(self.n, dtype=complex)
        if self.kind == "linear-ball":
            B = self.Ainv
            return B.T @ np.conj(B)
        if "hess_herm" in self.callbacks:
            return np.asarray(self.callbacks["hess_herm"](z), dtype=complex)
        return hessian_fd(self, z)[0]

    def hess_sym(self, z):
        """Symmetric block H[j,k] = d^2 r / dz_j dz_k."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "ball" or self.kind == "linear-ball":
            return np.zeros((self.n, self.n), dtype=complex)
        if self.kind == "perturbed-ball":
            H = np.zeros((self.n, self.n), dtype=complex)
            H[0, 0] = self.eps
            return H
        if "hess_sym" in self.callbacks:
            return np.asarray(self.callbacks["hess_sym"](z), dtype=complex)
        return hessian_fd(self, z)[1]

    # -- basic geometry -----------------------------------------------------

    def contains(self, z):
        return self.r(z) < 0.0

    def on_boundary(self, z, tol=_BOUNDARY_TOL):
        return abs(self.r(z)) < tol

    # -- serialization -------------------------------------------------------

    def to_json(self):
        params = {}
        if self.kind == "linear-ball":
            params["A"] = [
                [[float(c.real), float(c.imag)] for c in row] for row in self.A
            ]
            params["b"] = [[float(c.real), float(c.imag)] for c in self.b]
        elif self.kind == "perturbed-ball":
            params["eps"] = self.eps
        return {"kind": self.kind, "n": self.n, "params": params}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj["kind"]
        n = obj["n"]
        params = obj.get("params", {}) or {}
        if kind == "custom":
            raise ValueError("custom domains require programmatic callbacks")
        A = b = None
        if "A" in params:
            A = np.array(
                [[complex(re, im) for re, im in row] for row in params["A"]]
            )
        if "b" in params:
            b = np.array([complex(re, im) for re, im in params["b"]])
        return cls(kind, n, A=A, b=b, eps=params.get("eps"))


@dataclass(frozen=True)
class NontangentialRegion:
    """Approach region at a boundary point: |z - p| < beta * dist(z, bOmega)."""

    domain: DomainSpec
    p: np.ndarray
    beta: float

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return bool(
            np.linalg.norm(z - self.p) < self.beta * distance_to_boundary(self.domain, z)
        )


def unit_normal(domain, p, tol=_BOUNDARY_TOL):
    """Outward unit normal at the boundary point p, as a complex vector."""
    p = np.asarray(p, dtype=complex)
    if abs(domain.r(p)) >= tol:
        raise ValueError("point is not on the boundary: r(p) = %.3e" % domain.r(p))
    g = domain.grad(p)
    ng = np.linalg.norm(g)
    if ng < 1e-8:
        raise ValueError("vanishing gradient at boundary point")
    return g / ng


def strong_linear_convexity_check(domain, p, num_directions=64, rng=None):
    """Minimum over sampled unit complex-tangent directions v at p of
    (Levi form) - |symmetric Hessian form|.  Positive certifies the strong
    linear convexity inequality at p."""
    p = np.asarray(p, dtype=complex)
    nu = unit_normal(domain, p)
    Hh = domain.hess_herm(p)
    Hs = domain.hess_sym(p)
    rng = np.random.default_rng(0) if rng is None else rng
    worst = np.inf
    found = 0
    while found < num_directions:
        v = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        v = v - hermitian_inner(v, nu) * nu
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            continue
        v /= nv
        levi = float(np.real(v @ Hh @ np.conj(v)))
        sym = abs(v @ Hs @ v)
        worst = min(worst, levi - sym)
        found += 1
    return worst


def project_to_boundary(domain, z, tol=1e-13, max_iter=100):
    """Move z to the boundary along the gradient direction (scalar Newton on
    t -> r(z + t * grad)); falls back to a ray from the anchor where the
    gradient degenerates (e.g. at the anchor itself)."""
    w = np.asarray(z, dtype=complex).copy()
    for _ in range(max_iter):
        rv = domain.r(w)
        if abs(rv) < tol:
            return w
        g = domain.grad(w)
        ng = np.linalg.norm(g)
        if ng < 1e-10:
            d = w - domain.anchor
            nd = np.linalg.norm(d)
            if nd < 1e-12:
                d = np.zeros(domain.n, dtype=complex)
                d[0] = 1.0
            else:
                d = d / nd
            w = w + 0.1 * d
            continue
        # directional derivative of r along the unit gradient direction
        slope = float(np.real(hermitian_inner(g, g))) / ng
        w = w - (rv / slope) * (g / ng)
    if abs(domain.r(w)) < 1e-9:
        return w
    raise RuntimeError("boundary projection did not converge")


def _ray_to_boundary(domain, z, d, t_max=100.0):
    """First boundary crossing along z + t d, t > 0, by bracketing and
    bisection."""
    t_lo, t_hi = 0.0, 0.05
    while domain.r(z + t_hi * d) < 0:
        t_lo = t_hi
        t_hi *= 2.0
        if t_hi > t_max:
            raise RuntimeError("ray did not leave the domain")
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        if domain.r(z + t_mid * d) < 0:
            t_lo = t_mid
        else:
            t_hi = t_mid
        if t_hi - t_lo < 1e-15 * max(1.0, t_hi):
            break
    return z + 0.5 * (t_lo + t_hi) * d


def distance_to_boundary(domain, z, tol=1e-12, max_iter=60):
    """Euclidean distance from an interior point to the boundary.

    Runs damped Newton on the first-order conditions (w - z parallel to the
    normal at w, r(w) = 0) from several boundary seeds and keeps the
    smallest converged critical value."""
    z = np.asarray(z, dtype=complex)
    if domain.r(z) >= 0:
        raise ValueError("point is not interior")
    if domain.kind == "ball":
        return float(1.0 - np.linalg.norm(z))
    n = domain.n
    seeds = []
    for j in range(n):
        for d0 in (1.0, -1.0, 1j, -1j):
            d = np.zeros(n, dtype=complex)
            d[j] = d0
            seeds.append(_ray_to_boundary(domain, z, d))
    g = domain.grad(z)
    if np.linalg.norm(g) > 1e-10:
        seeds.append(_ray_to_boundary(domain, z, g / np.linalg.norm(g)))
    best = np.inf
    for w0 in seeds:
        d = _distance_newton(domain, z, w0, tol, max_iter)
        if d is not None:
            best = min(best, d)
    if not np.isfinite(best):
        raise RuntimeError("distance Newton did not converge from any seed")
    # sanity lower bound: |r(z)| / sup |grad r| near the segment
    gmax = max(
        np.linalg.norm(domain.grad(z)), *(np.linalg.norm(domain.grad(w)) for w in seeds)
    )
    if gmax > 0 and best < abs(domain.r(z)) / gmax - 1e-8:
        raise RuntimeError("distance below the gradient lower bound")
    return best


def _distance_newton(domain, z, w0, tol, max_iter):
    n = domain.n
    w = w0
    lam = float(np.linalg.norm(w - z))

    def pack(w, lam):
        return np.concatenate([w.real, w.imag, [lam]])

    def unpack(x):
        return x[:n] + 1j * x[n : 2 * n], x[2 * n]

    def F(x):
        w, lam = unpack(x)
        g = domain.grad(w)
        nu = g / np.linalg.norm(g)
        res = w - z - lam * nu
        return np.concatenate([res.real, res.imag, [domain.r(w)]])

    x = pack(w, lam)
    fx = F(x)
    for _ in range(max_iter):
        if np.linalg.norm(fx, np.inf) < tol:
            break
        J = np.empty((2 * n + 1, 2 * n + 1))
        h = 1e-7
        for j in range(2 * n + 1):
            xp = x.copy()
            xp[j] += h
            J[:, j] = (F(xp) - fx) / h
        step, *_ = np.linalg.lstsq(J, -fx, rcond=None)
        t = 1.0
        for _ in range(30):
            xn = x + t * step
            fn = F(xn)
            if np.linalg.norm(fn) < np.linalg.norm(fx):
                x, fx = xn, fn
                break
            t *= 0.5
        else:
            break
    w, lam = unpack(x)
    if np.linalg.norm(F(x), np.inf) > 1e-8:
        return None
    return float(np.linalg.norm(w - z))


def in_nontangential_region(domain, p, beta, z):
    """Literal test |z - p| < beta * dist(z, bOmega)."""
    if beta <= 1.0:
        raise ValueError("aperture beta must exceed 1")
    return NontangentialRegion(domain, np.asarray(p, dtype=complex), beta).contains(z)


def hessian_fd(domain, z, h=1e-5):
    """Finite-difference complex Hessian blocks (Hermitian, symmetric) of r.

    Uses central differences of the Wirtinger gradient dr/dz = conj(grad)/2.
    """
    z = np.asarray(z, dtype=complex)
    n = domain.n

    def dz(w):
        return np.conj(domain.grad(w)) / 2.0  # dr/dz_j

    Hh = np.empty((n, n), dtype=complex)
    Hs = np.empty((n, n), dtype=complex)
    for k in range(n):
        ex = np.zeros(n, dtype=complex)
        ex[k] = h
        ey = np.zeros(n, dtype=complex)
        ey[k] = 1j * h
        dx = (dz(z + ex) - dz(z - ex)) / (2 * h)  # d/dx_k of dr/dz_j
        dy = (dz(z + ey) - dz(z - ey)) / (2 * h)  # d/dy_k of dr/dz_j
        # d/dz_k = (d/dx_k - i d/dy_k)/2 ; d/dzbar_k = (d/dx_k + i d/dy_k)/2
        Hs[:, k] = (dx - 1j * dy) / 2.0
        Hh[:, k] = (dx + 1j * dy) / 2.0
    return Hh, Hs
