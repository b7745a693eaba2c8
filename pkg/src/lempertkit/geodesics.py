# Numerical computation of complex geodesics (stationary discs) of a domain
# with prescribed interior or boundary data.  The solver discretizes
# stationarity spectrally: the unknowns are Fourier coefficients of the disc
# map phi and of lambda = log mu (a real trigonometric polynomial), and the
# residuals are r o phi at boundary nodes plus the negative Fourier modes of
# zeta e^lambda conj(nu o phi), plus side conditions fixing the data and the
# automorphism gauge.  Damped Gauss-Newton with a finite-difference Jacobian.
#
# Also: dual maps with the bilinear normalization sum_j phi'_j phi*_j = 1,
# the preferred (parabolic-gauge) normalization, the holomorphic left inverse
# and retraction with their certificate, and Kobayashi distance/metric.

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from lempertkit.core import (
    HardyMap,
    bilinear_inner,
    boundary_nodes,
    hermitian_inner,
    parabolic_automorphism,
    poincare_distance,
    winding_number,
)
from lempertkit.domains import DomainSpec, project_to_boundary, unit_normal

__all__ = [
    "SolverConfig",
    "StationaryProblem",
    "GeodesicPair",
    "LeftInverse",
    "solve_stationary",
    "dual_map",
    "preferred_normalize",
    "left_inverse_eval",
    "left_inverse_gradient",
    "retraction",
    "geodesic_certificate",
    "kobayashi_distance",
    "kobayashi_metric",
]

NEAR_TANGENTIAL_CUTOFF = 1e-3


@dataclass
class SolverConfig:
    """Discretization and iteration parameters for the stationary-disc solver."""

    degree: int = 64
    grid: int | None = None
    tol_residual: float = 1e-10
    max_iter: int = 40
    mu_degree: int | None = None
    continuation_step: float = 0.02

    @property
    def M(self):
        M = 4 * self.degree if self.grid is None else self.grid
        if M < 4 * self.degree:
            raise ValueError("grid must be at least 4 * degree")
        return M

    @property
    def lam_terms(self):
        d = self.degree // 2 if self.mu_degree is None else self.mu_degree
        return 2 * d + 1  # constant + cos/sin pairs


@dataclass
class StationaryProblem:
    """Data for a stationary-disc solve.

    variants:
      'boundary'            p on the boundary, v with Re<v, nu_p> > 0;
                            conditions phi(1) = p, phi'(1) = <v,nu_p> v.
      'interior-point'      distinct interior z, w; conditions phi(0) = z,
                            phi(t) = w for a solver-found t in (0,1).
      'interior-direction'  interior z, direction v != 0; conditions
                            phi(0) = z, phi'(0) a positive multiple of v.
      'boundary-through'    p on the boundary and interior z; conditions
                            phi(1) = p, phi'(1) = <v,nu_p> v for the
                            solver-found direction v, the preferred gauge,
                            and phi(zeta) = z for a solver-found zeta.
    """

    variant: str
    p: np.ndarray | None = None
    v: np.ndarray | None = None
    z: np.ndarray | None = None
    w: np.ndarray | None = None

    @classmethod
    def boundary(cls, p, v):
        return cls("boundary", p=np.asarray(p, complex), v=np.asarray(v, complex))

    @classmethod
    def interior_point(cls, z, w):
        return cls("interior-point", z=np.asarray(z, complex), w=np.asarray(w, complex))

    @classmethod
    def interior_direction(cls, z, v):
        return cls(
            "interior-direction", z=np.asarray(z, complex), v=np.asarray(v, complex)
        )

    @classmethod
    def boundary_through(cls, p, z):
        return cls(
            "boundary-through", p=np.asarray(p, complex), z=np.asarray(z, complex)
        )


class GeodesicPair:
    """A geodesic disc phi with its dual phi* and boundary weight mu.

    On the boundary grid: sum_j phi'_j phi*_j = 1, phi* = zeta mu conj(nu o
    phi) with mu > 0, and r o phi = 0, all within the recorded residuals.
    """

    def __init__(self, phi, dual, mu, residuals):
        self.phi = phi
        self.dual = dual
        self.mu = np.asarray(mu, dtype=float)
        self.residuals = dict(residuals)

    def to_json(self):
        return {
            "phi": self.phi.to_json(),
            "dual": self.dual.to_json(),
            "mu": [float(m) for m in self.mu],
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            HardyMap.from_json(obj["phi"]),
            HardyMap.from_json(obj["dual"]),
            np.asarray(obj["mu"], dtype=float),
            obj.get("residuals", {}),
        )


# ---------------------------------------------------------------------------
# vectorized domain oracles


def _r_many(domain, Z):
    """Defining function at an array of points, shape (..., n)."""
    Z = np.asarray(Z, dtype=complex)
    if domain.kind == "ball":
        return np.sum(np.abs(Z) ** 2, axis=-1) - 1.0
    if domain.kind == "linear-ball":
        U = (Z - domain.b) @ domain.Ainv.T
        return np.sum(np.abs(U) ** 2, axis=-1) - 1.0
    if domain.kind == "perturbed-ball":
        return (
            np.sum(np.abs(Z) ** 2, axis=-1)
            - 1.0
            + domain.eps * np.real(Z[..., 0] ** 2)
        )
    return np.array([domain.r(z) for z in Z.reshape(-1, Z.shape[-1])]).reshape(
        Z.shape[:-1]
    )


def _grad_many(domain, Z):
    Z = np.asarray(Z, dtype=complex)
    if domain.kind == "ball":
        return 2.0 * Z
    if domain.kind == "linear-ball":
        U = (Z - domain.b) @ domain.Ainv.T
        return 2.0 * (U @ np.conj(domain.Ainv))
    if domain.kind == "perturbed-ball":
        G = 2.0 * Z.copy()
        G[..., 0] += 2.0 * domain.eps * np.conj(Z[..., 0])
        return G
    flat = Z.reshape(-1, Z.shape[-1])
    return np.array([domain.grad(z) for z in flat]).reshape(Z.shape)


# ---------------------------------------------------------------------------
# residual assembly


class _System:
    """Packs/unpacks the unknown vector and evaluates the residual."""

    def __init__(self, domain, problem, config, data):
        self.domain = domain
        self.problem = problem
        self.config = config
        self.n = domain.n
        self.N = config.degree
        self.M = config.M
        self.L = config.lam_terms
        self.data = data  # precomputed target quantities (p, v, c1, nu_p, ...)
        self.nodes = boundary_nodes(self.M)
        # Vandermonde for boundary evaluation of phi
        self.V = self.nodes[:, None] ** np.arange(self.N + 1)
        theta = 2.0 * np.pi * np.arange(self.M) / self.M
        d = (self.L - 1) // 2
        cols = [np.ones(self.M)]
        for m in range(1, d + 1):
            cols.append(np.cos(m * theta))
            cols.append(np.sin(m * theta))
        self.Lam = np.stack(cols, axis=1)  # (M, L)
        # lambda'(0) row: d/dtheta at theta=0 of [1, cos m, sin m] = [0, 0, m]
        row = np.zeros(self.L)
        for m in range(1, d + 1):
            row[2 * m] = m
        self.lam_deriv0 = row
        self.n_extra = {
            "boundary": 0,
            "interior-point": 1,
            "interior-direction": 1,
            "boundary-through": 2,
        }[problem.variant]
        self.n_coeff = 2 * self.n * (self.N + 1)
        self.size = self.n_coeff + self.L + self.n_extra

    def pack(self, coeffs, lam, extra):
        return np.concatenate(
            [coeffs.real.ravel(), coeffs.imag.ravel(), lam, np.asarray(extra, float)]
        )

    def unpack(self, x):
        nc = self.n * (self.N + 1)
        coeffs = (x[:nc] + 1j * x[nc : 2 * nc]).reshape(self.n, self.N + 1)
        lam = x[2 * nc : 2 * nc + self.L]
        extra = x[2 * nc + self.L :]
        return coeffs, lam, extra

    def phi_eval(self, coeffs, zeta):
        out = np.zeros(self.n, dtype=complex)
        for k in range(self.N, -1, -1):
            out = out * zeta + coeffs[:, k]
        return out

    def residual(self, x):
        coeffs, lam, extra = self.unpack(x)
        phib = self.V @ coeffs.T  # (M, n)
        rvals = _r_many(self.domain, phib)
        grads = _grad_many(self.domain, phib)
        nu = grads / np.linalg.norm(grads, axis=-1, keepdims=True)
        lamb = self.Lam @ lam
        G = self.nodes[:, None] * np.exp(lamb)[:, None] * np.conj(nu)
        modes = np.fft.fft(G, axis=0) / self.M
        neg = modes[self.M // 2 + 1 :]
        parts = [rvals, neg.real.ravel(), neg.imag.ravel(), [lam[0]]]
        parts.extend(self._side(coeffs, lam, extra))
        return np.concatenate([np.asarray(p, float).ravel() for p in parts])

    def residual_batch(self, X):
        """Residuals for a batch of unknown vectors, shape (B, size) ->
        (B, n_res).  Used to form finite-difference Jacobians in one
        vectorized sweep."""
        X = np.asarray(X, dtype=float)
        B = X.shape[0]
        nc = self.n * (self.N + 1)
        coeffs = (X[:, :nc] + 1j * X[:, nc : 2 * nc]).reshape(B, self.n, self.N + 1)
        lam = X[:, 2 * nc : 2 * nc + self.L]
        extra = X[:, 2 * nc + self.L :]
        phib = np.einsum("mk,bnk->bmn", self.V, coeffs)
        rvals = _r_many(self.domain, phib)
        grads = _grad_many(self.domain, phib)
        nu = grads / np.linalg.norm(grads, axis=-1, keepdims=True)
        lamb = lam @ self.Lam.T
        G = self.nodes[None, :, None] * np.exp(lamb)[:, :, None] * np.conj(nu)
        modes = np.fft.fft(G, axis=1) / self.M
        neg = modes[:, self.M // 2 + 1 :, :]
        parts = [
            rvals,
            neg.real.reshape(B, -1),
            neg.imag.reshape(B, -1),
            lam[:, :1],
        ]
        parts.extend(self._side_batch(coeffs, lam, extra))
        return np.concatenate(
            [np.asarray(p, float).reshape(B, -1) for p in parts], axis=1
        )

    def _phi_eval_batch(self, coeffs, zeta):
        out = np.zeros(coeffs.shape[:2], dtype=complex)
        for k in range(self.N, -1, -1):
            out = out * zeta[:, None] + coeffs[:, :, k]
        return out

    def _side_batch(self, coeffs, lam, extra):
        pv = self.problem
        d = self.data
        ks = np.arange(self.N + 1)
        out = []

        def c2r(vec):
            vec = np.asarray(vec)
            if vec.ndim == 1:
                vec = vec[:, None]
            return [vec.real, vec.imag]

        if pv.variant == "boundary":
            phi1 = coeffs.sum(axis=2)
            dphi1 = (coeffs * ks).sum(axis=2)
            out += c2r(phi1 - d["p"])
            out += c2r(dphi1 - d["c1"] * d["v"])
            out += [(lam @ self.lam_deriv0)[:, None]]
        elif pv.variant == "interior-point":
            t = extra[:, 0]
            out += c2r(coeffs[:, :, 0] - pv.z)
            out += c2r(self._phi_eval_batch(coeffs, t.astype(complex)) - pv.w)
        elif pv.variant == "interior-direction":
            s = np.exp(extra[:, 0])
            out += c2r(coeffs[:, :, 0] - pv.z)
            out += c2r(coeffs[:, :, 1] - s[:, None] * d["vhat"])
        elif pv.variant == "boundary-through":
            zeta = extra[:, 0] + 1j * extra[:, 1]
            phi1 = coeffs.sum(axis=2)
            dphi1 = (coeffs * ks).sum(axis=2)
            pairv = hermitian_inner(dphi1, d["nu_p"])
            out += c2r(phi1 - d["p"])
            out += [pairv.imag[:, None]]
            out += [
                (np.sum(np.abs(dphi1) ** 2, axis=1) - pairv.real)[:, None]
            ]
            out += [(lam @ self.lam_deriv0)[:, None]]
            out += c2r(self._phi_eval_batch(coeffs, zeta) - pv.z)
        return out

    def _side(self, coeffs, lam, extra):
        pv = self.problem
        d = self.data
        ks = np.arange(self.N + 1)
        out = []

        def c2r(vec):
            vec = np.atleast_1d(vec)
            return [vec.real, vec.imag]

        if pv.variant == "boundary":
            phi1 = coeffs.sum(axis=1)
            dphi1 = (coeffs * ks).sum(axis=1)
            out += c2r(phi1 - d["p"])
            out += c2r(dphi1 - d["c1"] * d["v"])
            out += [[self.lam_deriv0 @ lam]]
        elif pv.variant == "interior-point":
            t = extra[0]
            out += c2r(coeffs[:, 0] - pv.z)
            out += c2r(self.phi_eval(coeffs, t) - pv.w)
        elif pv.variant == "interior-direction":
            s = np.exp(extra[0])
            out += c2r(coeffs[:, 0] - pv.z)
            out += c2r(coeffs[:, 1] - s * d["vhat"])
        elif pv.variant == "boundary-through":
            zeta = extra[0] + 1j * extra[1]
            phi1 = coeffs.sum(axis=1)
            dphi1 = (coeffs * ks).sum(axis=1)
            pair = hermitian_inner(dphi1, d["nu_p"])
            out += c2r(phi1 - d["p"])
            out += [[pair.imag]]
            out += [[float(np.real(hermitian_inner(dphi1, dphi1))) - pair.real]]
            out += [[self.lam_deriv0 @ lam]]
            out += c2r(self.phi_eval(coeffs, zeta) - pv.z)
        return out


class _Jacobian:
    """Finite-difference Jacobian with a cached pseudoinverse, reusable
    across warm-started solves of the same system shape (the unknown-to-
    residual map does not depend on the problem's constant targets)."""

    def __init__(self, J):
        self.J = J
        self.pinv = np.linalg.pinv(J, rcond=1e-12)

    def step(self, f):
        return self.pinv @ (-f)


def _fd_jacobian(resfun, resfun_batch, x, f):
    h = 1e-7
    if resfun_batch is not None:
        X = x[None, :] + h * np.eye(len(x))
        J = (resfun_batch(X) - f[None, :]).T / h
    else:
        J = np.empty((len(f), len(x)))
        for j in range(len(x)):
            xp = x.copy()
            xp[j] += h
            J[:, j] = (resfun(xp) - f) / h
    return _Jacobian(J)


def _gauss_newton(resfun, x0, tol, max_iter, resfun_batch=None, jac0=None):
    """Damped Gauss-Newton.  With jac0 given, iterations start as chord
    steps with the stale Jacobian and fall back to a fresh one when progress
    stalls.  Returns (x, f, converged, jacobian)."""
    x = np.asarray(x0, dtype=float).copy()
    f = resfun(x)
    nf = np.linalg.norm(f)
    jac = jac0 if jac0 is not None and jac0.J.shape == (len(f), len(x)) else None
    fresh = False
    it = 0
    while it < max_iter:
        if np.max(np.abs(f)) < tol:
            break
        if jac is None:
            jac = _fd_jacobian(resfun, resfun_batch, x, f)
            fresh = True
        step = jac.step(f)
        t = 1.0
        improved = False
        nf_prev = nf
        for _ in range(25):
            xn = x + t * step
            fn = resfun(xn)
            nfn = np.linalg.norm(fn)
            if nfn < (1.0 - 1e-4 * t) * nf or nfn < tol:
                x, f, nf = xn, fn, nfn
                improved = True
                break
            t *= 0.5
        if not improved:
            if fresh:
                break
            jac = None  # stale Jacobian exhausted; recompute
            continue
        fresh = False  # x moved; the Jacobian is now stale
        if t < 0.5 or nf > 0.25 * nf_prev:
            # chord progress is slow; refresh on the next iteration
            jac = None
        it += 1
    return x, f, bool(np.max(np.abs(f)) < tol), jac


# ---------------------------------------------------------------------------
# initial guesses


def _hardy_from_callable(fun, n, N, M):
    """Project a map analytic on the closed disc onto a degree-N HardyMap by
    boundary sampling."""
    nodes = boundary_nodes(M)
    vals = np.array([fun(z) for z in nodes]).reshape(M, n)
    modes = np.fft.fft(vals, axis=0) / M
    return HardyMap(modes[: N + 1].T)


def _pad(coeffs, n, N):
    out = np.zeros((n, N + 1), dtype=complex)
    c = np.atleast_2d(coeffs)
    out[:, : c.shape[1]] = c[:, : N + 1]
    return out


def _mobius_ball(a, z):
    """Ball automorphism T_a with T_a(a)=0, an involution."""
    a = np.asarray(a, complex)
    z = np.asarray(z, complex)
    na2 = float(np.real(hermitian_inner(a, a)))
    if na2 < 1e-28:
        return -z
    s = np.sqrt(1.0 - na2)
    za = hermitian_inner(z, a)
    Pz = (za / na2) * a
    return (a - Pz - s * (z - Pz)) / (1.0 - za)


def _hyperbolic(s):
    """Automorphism fixing 1 and -1 with derivative s > 0 at 1."""

    def tau(zeta):
        return ((1 + s) * zeta + (1 - s)) / ((1 - s) * zeta + (1 + s))

    return tau


def _ball_seed(problem, sys, p_ball=None):
    """Exact unit-ball solution of the problem, as (coeffs, lam, extra)."""
    from lempertkit.ball import ball_geodesic_maps, ball_invert, BoundaryDirection

    n, N, M = sys.n, sys.N, sys.M
    if problem.variant == "boundary":
        c1 = sys.data["c1"]
        v = sys.data["v"]
        p = sys.data["p"]
        bd = BoundaryDirection(p=p, v=v)
        phi, _ = ball_geodesic_maps(bd)
        lam = np.zeros(sys.L)
        return _pad(phi.coeffs, n, N), lam, []
    if problem.variant == "boundary-through":
        p = sys.data["p"]
        bd, zeta = ball_invert(p, problem.z)
        phi, _ = ball_geodesic_maps(bd)
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [zeta.real, zeta.imag]
    if problem.variant == "interior-point":
        z, w = problem.z, problem.w
        m = _mobius_ball(z, w)
        t = float(np.linalg.norm(m))
        u = m / t
        phi = _hardy_from_callable(lambda zz: _mobius_ball(z, zz * u), n, N, M)
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [t]
    if problem.variant == "interior-direction":
        z = problem.z
        vhat = sys.data["vhat"]
        # direction u with d(T_z)_0 u parallel to vhat, via finite differences
        h = 1e-6
        cols = []
        for j in range(n):
            e = np.zeros(n, complex)
            e[j] = h
            cols.append((_mobius_ball(z, e) - _mobius_ball(z, np.zeros(n))) / h)
        D = np.stack(cols, axis=1)  # d(T_z)_0
        u = np.linalg.solve(D, vhat)
        u = u / np.linalg.norm(u)
        phi = _hardy_from_callable(lambda zz: _mobius_ball(z, zz * u), n, N, M)
        s = np.linalg.norm(D @ u)
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [float(np.log(s))]
    raise ValueError(problem.variant)


def _initial_guess(domain, problem, sys):
    if domain.kind == "ball":
        return _ball_seed(problem, sys)
    if domain.kind == "linear-ball":
        return _linear_ball_seed(domain, problem, sys)
    if domain.kind == "perturbed-ball":
        # caller drives continuation; the seed here is the unit-ball solution
        # of the projected problem
        return _ball_seed(problem, sys)
    raise ValueError(
        "no initial guess available for custom domains; pass one explicitly"
    )


def _linear_ball_seed(domain, problem, sys):
    n, N, M = sys.n, sys.N, sys.M
    B = domain.Ainv
    A = domain.A
    b = domain.b
    from lempertkit.ball import ball_geodesic_maps, ball_invert, BoundaryDirection

    def image(phi_ball):
        return _hardy_from_callable(
            lambda zz: b + A @ phi_ball(zz), n, N, max(M, 4 * (N + 1))
        )

    if problem.variant in ("boundary", "boundary-through"):
        p = sys.data["p"]
        nu_p = sys.data["nu_p"]
        pp = B @ (p - b)
        if problem.variant == "boundary":
            v = sys.data["v"]
            vp = B @ v
            vp = vp / np.linalg.norm(vp)
            bd = BoundaryDirection(p=pp, v=vp)
            phi_ball, _ = ball_geodesic_maps(bd)
            target = sys.data["c1"]
        else:
            zp = B @ (problem.z - b)
            bd, zeta0 = ball_invert(pp, zp)
            phi_ball, _ = ball_geodesic_maps(bd)
            target = None
        u = A @ (bd.pairing * bd.v)  # image derivative at 1
        if target is None:
            # through variant: |phi'(1)|^2 = Re<phi'(1), nu_p>
            s = float(np.real(hermitian_inner(u, nu_p)) / np.real(hermitian_inner(u, u)))
        else:
            s = float(target / np.linalg.norm(u))
        tau = _hyperbolic(s)
        phi = _hardy_from_callable(
            lambda zz: b + A @ phi_ball(tau(zz)), n, N, max(M, 4 * (N + 1))
        )
        if problem.variant == "boundary":
            return _pad(phi.coeffs, n, N), np.zeros(sys.L), []
        taui = _hyperbolic(1.0 / s)
        zeta0 = complex(taui(zeta0))
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [zeta0.real, zeta0.imag]
    if problem.variant == "interior-point":
        zp, wp = B @ (problem.z - b), B @ (problem.w - b)
        m = _mobius_ball(zp, wp)
        t = float(np.linalg.norm(m))
        u = m / t
        phi = _hardy_from_callable(
            lambda zz: b + A @ _mobius_ball(zp, zz * u), n, N, max(M, 4 * (N + 1))
        )
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [t]
    if problem.variant == "interior-direction":
        zp = B @ (problem.z - b)
        vhat = sys.data["vhat"]
        vp = B @ vhat
        h = 1e-6
        cols = []
        for j in range(n):
            e = np.zeros(n, complex)
            e[j] = h
            cols.append((_mobius_ball(zp, e) - _mobius_ball(zp, np.zeros(n))) / h)
        D = np.stack(cols, axis=1)
        u = np.linalg.solve(D, vp)
        u = u / np.linalg.norm(u)
        phi = _hardy_from_callable(
            lambda zz: b + A @ _mobius_ball(zp, zz * u), n, N, max(M, 4 * (N + 1))
        )
        dphi0 = phi.deriv()(0.0)
        s = float(np.real(bilinear_inner(dphi0, np.conj(vhat))))
        s = max(s, 1e-6)
        return _pad(phi.coeffs, n, N), np.zeros(sys.L), [float(np.log(s))]
    raise ValueError(problem.variant)


# ---------------------------------------------------------------------------
# problem data precomputation


def _problem_data(domain, problem):
    data = {}
    if problem.variant in ("boundary", "boundary-through"):
        p = project_to_boundary(domain, problem.p)
        nu_p = unit_normal(domain, p)
        data["p"] = p
        data["nu_p"] = nu_p
        if problem.variant == "boundary":
            v = np.asarray(problem.v, complex)
            v = v / np.linalg.norm(v)
            c = hermitian_inner(v, nu_p)
            if c.real <= 0:
                raise ValueError("direction must satisfy Re<v, nu_p> > 0")
            # rotate the phase so that <v, nu_p> is a positive real
            v = v * (abs(c) / c)
            c1 = float(abs(c))
            if c1 < NEAR_TANGENTIAL_CUTOFF:
                raise ValueError(
                    "near-tangential direction: <v, nu_p> = %.3e below cutoff %g"
                    % (c1, NEAR_TANGENTIAL_CUTOFF)
                )
            data["v"] = v
            data["c1"] = c1
        else:
            if not domain.contains(problem.z):
                raise ValueError("z must be an interior point")
    elif problem.variant == "interior-point":
        if not (domain.contains(problem.z) and domain.contains(problem.w)):
            raise ValueError("z and w must be interior points")
        if np.linalg.norm(problem.z - problem.w) < 1e-14:
            raise ValueError("z and w must be distinct")
    elif problem.variant == "interior-direction":
        if not domain.contains(problem.z):
            raise ValueError("z must be an interior point")
        nv = np.linalg.norm(problem.v)
        if nv < 1e-14:
            raise ValueError("direction must be nonzero")
        data["vhat"] = np.asarray(problem.v, complex) / nv
    else:
        raise ValueError("unknown problem variant %r" % problem.variant)
    return data


# ---------------------------------------------------------------------------
# main entry points


def solve_stationary(domain, problem, config=None, initial=None, initial_jac=None):
    """Solve for a stationary (geodesic) disc of the domain with the given
    problem data.  Returns a GeodesicPair.

    initial: optional (coeffs, lam, extra) triple overriding the built-in
    seed (used for gauge-coherence tests and continuation).  initial_jac: a
    Jacobian from a previous nearby solve (pair.solver_jac), reused for
    cheap chord iterations on warm starts.
    """
    config = config or SolverConfig()
    if domain.kind == "perturbed-ball" and initial is None and domain.eps > 0:
        return _solve_continuation(domain, problem, config)
    data = _problem_data(domain, problem)
    sys = _System(domain, problem, config, data)
    if initial is None:
        coeffs0, lam0, extra0 = _initial_guess(domain, problem, sys)
    else:
        coeffs0, lam0, extra0 = initial
        coeffs0 = _pad(coeffs0, sys.n, sys.N)
    x0 = sys.pack(coeffs0, np.asarray(lam0, float), list(np.asarray(extra0, float).ravel()))
    x, f, ok, jac = _gauss_newton(
        sys.residual, x0, config.tol_residual, config.max_iter,
        sys.residual_batch, jac0=initial_jac,
    )
    if not ok:
        raise RuntimeError(
            "Gauss-Newton stagnation: residual %.3e above tolerance %.1e"
            % (np.max(np.abs(f)), config.tol_residual)
        )
    pair = _finalize(domain, problem, config, sys, x)
    pair.solver_jac = jac
    return pair


def _solve_continuation(domain, problem, config):
    """Continuation in the perturbation size from the unit ball.

    Interior data (z, w) are first pulled toward the anchor until they lie
    inside every domain of the continuation family (the perturbed boundary
    can bulge outside the unit ball, and intermediate domains need not
    contain points that hug the final boundary).  The perturbation is then
    walked up with warm starts, and finally the interior data are walked
    back out to their true values on the final domain.  The pull also keeps
    early solves away from the nearly degenerate regime where the disc
    parameter approaches the unit circle."""
    eps_final = domain.eps
    steps = max(1, int(np.ceil(eps_final / config.continuation_step)))
    eps_list = [eps_final * (k + 1) / steps for k in range(steps)]
    ball = DomainSpec("ball", domain.n)
    family = [ball] + [
        DomainSpec("perturbed-ball", domain.n, eps=eps) for eps in eps_list
    ]

    def pull_all(z, margin=1e-3):
        z = np.asarray(z, complex)
        for _ in range(2000):
            if all(dom.r(z) < -margin for dom in family):
                return z
            z = 0.995 * z
        raise RuntimeError("could not pull the point inside the family of domains")

    def pull_ray(p, z, margin=1e-3):
        # pull z deeper along the ray from p: the through-geodesic direction
        # stays nearly constant along this ray, so the subsequent halving
        # walk (which stays on the segment, hence on the ray) approaches the
        # degenerate corner zeta -> 1 with bounded relative steps
        p = np.asarray(p, complex)
        z = np.asarray(z, complex)
        alpha = 1.0
        best, best_r = None, -margin
        for _ in range(80):
            zz = p + alpha * (z - p)
            rr = max(dom.r(zz) for dom in family)
            if rr < best_r:
                best, best_r = zz, rr
            elif best is not None and rr > best_r:
                break  # past the deepest point of the ray
            alpha *= 1.25
        if best is not None:
            return best
        return pull_all(z, margin)

    pulled = {}
    if problem.variant == "boundary-through":
        pulled["z"] = pull_ray(problem.p, problem.z)
    elif problem.variant == "interior-point":
        pulled["z"] = pull_all(problem.z)
        pulled["w"] = pull_all(problem.w)
        if np.linalg.norm(pulled["z"] - pulled["w"]) < 1e-10:
            pulled["w"] = 0.5 * (pulled["w"] + np.asarray(problem.w, complex))
    elif problem.variant == "interior-direction":
        pulled["z"] = pull_all(problem.z)

    def make_problem(dom, data):
        if problem.variant == "boundary":
            return StationaryProblem.boundary(
                project_to_boundary(dom, problem.p), problem.v
            )
        if problem.variant == "boundary-through":
            return StationaryProblem.boundary_through(
                project_to_boundary(dom, problem.p), data["z"]
            )
        if problem.variant == "interior-point":
            return StationaryProblem.interior_point(data["z"], data["w"])
        return StationaryProblem.interior_direction(data["z"], problem.v)

    prev = None
    sol = None
    jac = None
    for dom in family:
        prob_d = make_problem(dom, pulled)
        sys = _System(dom, prob_d, config, _problem_data(dom, prob_d))
        if prev is None:
            coeffs0, lam0, extra0 = _ball_seed(prob_d, sys)
        else:
            coeffs0, lam0, extra0 = prev
        x0 = sys.pack(coeffs0, lam0, extra0)
        x, f, ok, jac = _gauss_newton(
            sys.residual, x0, config.tol_residual, config.max_iter,
            sys.residual_batch, jac0=jac,
        )
        if not ok:
            raise RuntimeError(
                "continuation failed at eps=%.3f (residual %.3e)"
                % (getattr(dom, "eps", 0.0) or 0.0, np.max(np.abs(f)))
            )
        coeffs, lam, extra = sys.unpack(x)
        prev = (coeffs, lam, list(extra))
        sol = (sys, x, prob_d)
    sys, x, prob_last = sol

    target = {}
    if "z" in pulled:
        target["z"] = np.asarray(problem.z, complex)
    if "w" in pulled:
        target["w"] = np.asarray(problem.w, complex)
    gap = max(
        (np.linalg.norm(pulled[k] - target[k]) for k in pulled), default=0.0
    )
    if gap > 1e-14:
        # walk the interior data back out by halving the remaining gap; each
        # solve warm-starts from the previous one
        cur = dict(pulled)
        for _ in range(120):
            done = True
            for k in cur:
                cur[k] = 0.5 * (cur[k] + target[k])
                if np.linalg.norm(cur[k] - target[k]) < 1e-13:
                    cur[k] = target[k]
                else:
                    done = False
            prob_d = make_problem(domain, cur)
            sys = _System(domain, prob_d, config, _problem_data(domain, prob_d))
            x0 = sys.pack(prev[0], prev[1], list(prev[2]))
            x, f, ok, jac = _gauss_newton(
                sys.residual, x0, config.tol_residual, config.max_iter,
                sys.residual_batch, jac0=jac,
            )
            if not ok:
                raise RuntimeError(
                    "interior-data continuation failed %.3e from the target "
                    "(residual %.3e)"
                    % (
                        max(np.linalg.norm(cur[k] - target[k]) for k in cur),
                        np.max(np.abs(f)),
                    )
                )
            coeffs, lam, extra = sys.unpack(x)
            prev = (coeffs, lam, list(extra))
            if done:
                break
        else:
            raise RuntimeError("interior-data continuation did not converge")
        prob_last = prob_d
    pair = _finalize(domain, prob_last, config, sys, x)
    pair.solver_jac = jac
    return pair


def _finalize(domain, problem, config, sys, x):
    coeffs, lam, extra = sys.unpack(x)
    phi = HardyMap(coeffs)
    lamb = sys.Lam @ lam
    mu = np.exp(lamb)
    dual, mu_n, info = dual_map(phi, mu, domain, M=sys.M, return_info=True)
    phib = sys.V @ coeffs.T
    rvals = _r_many(domain, phib)
    residuals = {
        "boundary_sup": float(np.max(np.abs(rvals))),
        "neg_modes": info["neg_modes"],
        "pairing": info["pairing"],
        "mu_min": float(np.min(mu_n)),
    }
    if problem.variant == "interior-point":
        residuals["t"] = float(extra[0])
    if problem.variant == "interior-direction":
        residuals["speed"] = float(np.exp(extra[0]))
    if problem.variant == "boundary-through":
        residuals["zeta_re"] = float(extra[0])
        residuals["zeta_im"] = float(extra[1])
    # Hopf-lemma sanity: positive normal derivative at the contact point
    if problem.variant in ("boundary", "boundary-through"):
        nu_p = sys.data["nu_p"]
        dphi1 = (coeffs * np.arange(sys.N + 1)).sum(axis=1)
        hopf = float(np.real(hermitian_inner(dphi1, nu_p)))
        residuals["hopf"] = hopf
        if hopf <= 0:
            raise RuntimeError("non-positive normal derivative at the boundary point")
    pair = GeodesicPair(phi=phi, dual=dual, mu=mu_n, residuals=residuals)
    pair.solver_state = (coeffs, lam, list(np.asarray(extra, float)))
    return pair


def dual_map(phi, mu, domain, M=None, tol_neg=1e-6, return_info=False):
    """Dual map of a stationary disc: project the boundary data
    zeta mu(zeta) conj(nu o phi(zeta)) onto nonnegative Fourier modes and
    rescale so that the bilinear pairing sum_j phi'_j phi*_j equals 1.

    mu may be positive samples at M equispaced boundary nodes or a scalar.
    """
    if M is None:
        M = max(4 * phi.degree, 64)
    nodes = boundary_nodes(M)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (M,))
    if np.any(mu <= 0):
        raise ValueError("mu must be positive")
    phib = phi(nodes)
    grads = _grad_many(domain, phib)
    nu = grads / np.linalg.norm(grads, axis=-1, keepdims=True)
    G = nodes[:, None] * mu[:, None] * np.conj(nu)
    modes = np.fft.fft(G, axis=0) / M
    neg = modes[M // 2 + 1 :]
    scale = max(np.max(np.abs(modes)), 1e-300)
    neg_energy = float(np.max(np.abs(neg)) / scale) if neg.size else 0.0
    if neg_energy > tol_neg:
        raise ValueError(
            "negative-mode energy %.3e: phi is not stationary for this mu"
            % neg_energy
        )
    dual = HardyMap(modes[: M // 2].T)
    # normalize the (constant) bilinear pairing with phi'
    s = complex(bilinear_inner(phi.deriv()(0.0), dual(0.0)))
    if abs(s) < 1e-14 or s.real <= 0:
        raise ValueError("degenerate pairing %r in dual normalization" % s)
    dual = HardyMap(dual.coeffs / s.real)
    mu_n = mu / s.real
    if return_info:
        dualb = dual(nodes)
        dphib = phi.deriv()(nodes)
        pairing = float(np.max(np.abs(bilinear_inner(dphib, dualb) - 1.0)))
        info = {"neg_modes": neg_energy, "pairing": pairing, "scale": s.real}
        return dual, mu_n, info
    return dual, mu_n


def _mu_phase_derivative(pair, t=0.0, h=1e-4):
    """d|phi_t*(e^{i theta})|/d theta at theta = 0, where phi_t = phi o
    sigma_t and the dual transforms as (phi* o sigma_t)/sigma_t'."""
    sig = parabolic_automorphism(t)

    def absdual(theta):
        zeta = np.exp(1j * theta)
        val = pair.dual(sig(zeta)) / sig.deriv(zeta)
        return float(np.linalg.norm(val))

    # five-point central difference (the integrand is smooth in theta)
    return (
        -absdual(2 * h) + 8 * absdual(h) - 8 * absdual(-h) + absdual(-2 * h)
    ) / (12 * h)


def preferred_normalize(pair, domain, tol=1e-8, max_iter=50):
    """Reparametrize a boundary-attached geodesic by the parabolic
    automorphism sigma_{t0} so that d|phi*(e^{i theta})|/d theta vanishes at
    theta = 0.  t0 is found by scalar Newton (secant) seeded at 0."""
    t = 0.0
    g = _mu_phase_derivative(pair, t)
    if abs(g) < tol:
        t0 = t
    else:
        dt = 1e-3
        t0 = None
        for _ in range(max_iter):
            g1 = _mu_phase_derivative(pair, t + dt)
            slope = (g1 - g) / dt
            if abs(slope) < 1e-14:
                raise RuntimeError("flat phase derivative: Newton cannot proceed")
            t_new = t - g / slope
            g_new = _mu_phase_derivative(pair, t_new)
            dt = max(abs(t_new - t) * 0.1, 1e-6)
            t, g = t_new, g_new
            if abs(g) < tol * 1e-2:
                break
        t0 = t
        if abs(g) > tol:
            raise RuntimeError("preferred-normalization Newton did not converge")
    if t0 == 0.0:
        return pair
    sig = parabolic_automorphism(t0)
    M = max(4 * pair.phi.degree, 64)
    nodes = boundary_nodes(M)
    phi_new = pair.phi.compose_boundary(sig, M)
    dual_vals = pair.dual(sig(nodes)) / sig.deriv(nodes)[:, None]
    dual_new = HardyMap.from_boundary_samples(dual_vals, tol=1e-5)
    # re-normalize the pairing and recover mu = |dual| on the boundary
    s = complex(bilinear_inner(phi_new.deriv()(0.0), dual_new(0.0)))
    dual_new = HardyMap(dual_new.coeffs / s.real)
    mu_new = np.linalg.norm(dual_new(nodes), axis=-1)
    res = dict(pair.residuals)
    res["t0"] = float(t0)
    return GeodesicPair(phi=phi_new, dual=dual_new, mu=mu_new, residuals=res)


# ---------------------------------------------------------------------------
# left inverse, retraction, certificate


class LeftInverse:
    """The holomorphic left inverse of a geodesic: solves
    <z - phi(zeta), conj(phi*(zeta))> = 0 by a Cauchy-integral formula."""

    def __init__(self, pair, M=None):
        self.pair = pair
        # the Cauchy integrand has its pole at rho(z); the trapezoid error
        # decays like |rho(z)|^M, so the grid must be fine enough for points
        # close to the disc boundary
        self.M = M or max(8 * pair.phi.degree, 512)
        nodes = boundary_nodes(self.M)
        self.nodes = nodes
        self.phib = pair.phi(nodes)
        self.dualb = pair.dual(nodes)
        self.ddualb = pair.dual.deriv()(nodes)


def left_inverse_eval(li, z, check=True):
    """Evaluate the left inverse at z.  Requires winding number 1 of
    zeta -> <z - phi(zeta), conj(phi*(zeta))> around the boundary grid."""
    z = np.asarray(z, dtype=complex)
    D = bilinear_inner(z - li.phib, li.dualb)
    w = winding_number(D, tol=1e-11)
    if w != 1:
        raise ValueError("winding number %d != 1: left inverse undefined here" % w)
    Nnum = bilinear_inner(z - li.phib, li.ddualb) - 1.0
    rho = np.sum(li.nodes**2 * Nnum / D) / li.M
    if check:
        resid = abs(bilinear_inner(z - li.pair.phi(rho), li.pair.dual(rho)))
        if resid > 1e-9:
            raise RuntimeError("left-inverse residual %.3e above 1e-9" % resid)
        if abs(rho) > 1.0 + 1e-9:
            raise RuntimeError("left inverse left the closed disc: |rho|=%f" % abs(rho))
    return complex(rho)


def left_inverse_gradient(li, z):
    """Gradient of the left inverse: component j is
    phi*_j(rho(z)) / (1 - <z - phi(rho(z)), conj((phi*)'(rho(z)))>)."""
    z = np.asarray(z, dtype=complex)
    rho = left_inverse_eval(li, z)
    dualr = li.pair.dual(rho)
    den = 1.0 - bilinear_inner(z - li.pair.phi(rho), li.pair.dual.deriv()(rho))
    if abs(den) < 1e-6:
        raise RuntimeError("left-inverse gradient denominator %.3e too small" % abs(den))
    return dualr / den


def retraction(li, z):
    """The holomorphic retraction rho = phi o (left inverse)."""
    return li.pair.phi(left_inverse_eval(li, z))


def geodesic_certificate(pair, domain, grid=32, probes=50, seed=0, tol=1e-7):
    """Certify that the pair is a complex geodesic, by (a) left-inverse
    round trip on a disc grid, (b) winding numbers at interior probes,
    (c) boundary residual of r o phi, (d) the bilinear dual normalization,
    (e) positivity of mu.  PASS iff (a), (c), (d) < tol, all windings are 1,
    and min mu > 0."""
    li = LeftInverse(pair)
    rr = np.linspace(0.05, 0.9, grid)
    th = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    zg = rr[:, None] * np.exp(1j * th)[None, :]
    worst_a = 0.0
    for zeta in zg.ravel():
        rho = left_inverse_eval(li, pair.phi(zeta), check=False)
        worst_a = max(worst_a, abs(rho - zeta))
    rng = np.random.default_rng(seed)
    windings_ok = True
    count = 0
    while count < probes:
        zeta = (rng.uniform(0.05, 0.9)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        zz = pair.phi(zeta)
        if not domain.contains(zz):
            continue
        D = bilinear_inner(zz - li.phib, li.dualb)
        try:
            if winding_number(D, tol=1e-11) != 1:
                windings_ok = False
        except ValueError:
            windings_ok = False
        count += 1
    nodes = li.nodes
    rb = float(np.max(np.abs(_r_many(domain, li.phib))))
    pairing = float(
        np.max(np.abs(bilinear_inner(pair.phi.deriv()(nodes), li.dualb) - 1.0))
    )
    mu_min = float(np.min(pair.mu))
    ok = worst_a < tol and rb < tol and pairing < tol and windings_ok and mu_min > 0
    return {
        "roundtrip_sup": worst_a,
        "windings_ok": windings_ok,
        "boundary_sup": rb,
        "pairing_sup": pairing,
        "mu_min": mu_min,
        "pass": bool(ok),
    }


# ---------------------------------------------------------------------------
# distances


def kobayashi_distance(domain, z, w, config=None, with_certificate=True):
    """Kobayashi distance via the interior-point geodesic: arctanh t."""
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    if np.linalg.norm(z - w) < 1e-15:
        return 0.0
    pair = solve_stationary(domain, StationaryProblem.interior_point(z, w), config)
    t = pair.residuals["t"]
    if with_certificate:
        cert = geodesic_certificate(pair, domain)
        if not cert["pass"]:
            raise RuntimeError("geodesic certificate FAIL: %r" % cert)
    return poincare_distance(0.0, t)


def kobayashi_metric(domain, z, v, config=None, with_certificate=True):
    """Kobayashi-Royden infinitesimal metric |v| / |phi'(0)| from the
    interior-direction geodesic."""
    v = np.asarray(v, complex)
    pair = solve_stationary(domain, StationaryProblem.interior_direction(z, v), config)
    s = pair.residuals["speed"]
    if with_certificate:
        cert = geodesic_certificate(pair, domain)
        if not cert["pass"]:
            raise RuntimeError("geodesic certificate FAIL: %r" % cert)
    return float(np.linalg.norm(v) / s)
