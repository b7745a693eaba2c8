# Boundary spherical representation: the map sending a point z of the
# closure of the domain to the point of the closed unit ball obtained by
# transporting the preferred geodesic disc through the boundary point p and
# z onto the corresponding explicit ball disc.  Plus its inverse, horosphere
# membership by preservation, Busemann functions, and the empirical
# non-tangential image bound.

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from lempertkit.ball import (
    BoundaryDirection,
    ball_busemann,
    ball_geodesic_maps,
    ball_invert,
    ball_kobayashi,
    ball_poisson_kernel,
)
from lempertkit.core import hermitian_inner
from lempertkit.domains import (
    distance_to_boundary,
    in_nontangential_region,
    project_to_boundary,
    unit_normal,
)
from lempertkit.geodesics import (
    SolverConfig,
    StationaryProblem,
    kobayashi_distance,
    solve_stationary,
)

__all__ = [
    "RepPoint",
    "RepSolver",
    "spherical_rep",
    "spherical_rep_inverse",
    "horosphere_membership",
    "busemann",
    "nontangential_image_bound",
]

_BASE_TOL = 1e-6  # z this close to p short-circuits to nu_p


@dataclass(frozen=True)
class RepPoint:
    """Output of the spherical representation at z: the geodesic data
    (v, zeta) with phi_v(zeta) = z and the ball image
    w = nu_p + (zeta - 1) <v, nu_p> v."""

    z: np.ndarray
    v: np.ndarray | None
    zeta: complex
    w: np.ndarray
    pair: object = None


class RepSolver:
    """Spherical representation engine for a fixed (domain, p).

    Caches certified geodesics keyed by the rounded direction v, and keeps
    the last solution as a warm start for nearby queries (finite-difference
    stencils, grids along a slice).  The cache behaves as a concurrent map;
    cached values are immutable.
    """

    def __init__(self, domain, p, config=None):
        self.domain = domain
        self.p = project_to_boundary(domain, np.asarray(p, dtype=complex))
        self.nu_p = unit_normal(domain, self.p)
        self.config = config or SolverConfig(degree=48, tol_residual=1e-10)
        self._cache = {}
        self._lock = threading.Lock()
        self._warm = None
        self._warm_jac = None

    # -- geodesics through p -------------------------------------------------

    def _vkey(self, v):
        return tuple(np.round(np.asarray(v, complex), 9).tolist())

    def boundary_geodesic(self, v):
        """Certified preferred geodesic with data (p, v), cached."""
        key = self._vkey(v)
        pair = self._cache.get(key)
        if pair is None:
            pair = solve_stationary(
                self.domain, StationaryProblem.boundary(self.p, v), self.config
            )
            with self._lock:
                pair = self._cache.setdefault(key, pair)
        return pair

    # -- forward map ----------------------------------------------------------

    def map_point(self, z):
        z = np.asarray(z, dtype=complex)
        if np.linalg.norm(z - self.p) < _BASE_TOL:
            return RepPoint(z=z, v=None, zeta=1.0 + 0j, w=self.nu_p.copy())
        if self.domain.kind == "ball":
            bd, zeta = ball_invert(self.p, z)
            w = self.p + (zeta - 1.0) * bd.pairing * bd.v
            return RepPoint(z=z, v=bd.v, zeta=zeta, w=w)
        rv = self.domain.r(z)
        if rv >= 1e-9:
            raise ValueError("z is outside the closure of the domain")
        problem = StationaryProblem.boundary_through(self.p, z)
        pair = None
        if self._warm is not None:
            try:
                pair = solve_stationary(
                    self.domain,
                    problem,
                    self.config,
                    initial=self._warm,
                    initial_jac=self._warm_jac,
                )
            except RuntimeError:
                pair = None
        if pair is None:
            pair = solve_stationary(self.domain, problem, self.config)
        self._warm = getattr(pair, "solver_state", None)
        self._warm_jac = getattr(pair, "solver_jac", None)
        dphi1 = pair.phi.deriv()(1.0)
        c = float(np.linalg.norm(dphi1))
        v = dphi1 / c
        zeta = complex(pair.residuals["zeta_re"], pair.residuals["zeta_im"])
        w = self.nu_p + (zeta - 1.0) * c * v
        return RepPoint(z=z, v=v, zeta=zeta, w=w, pair=pair)

    # -- inverse map ----------------------------------------------------------

    def invert_point(self, w):
        w = np.asarray(w, dtype=complex)
        if np.linalg.norm(w) > 1.0 + 1e-9:
            raise ValueError("w must lie in the closed unit ball")
        if np.linalg.norm(w - self.nu_p) < _BASE_TOL:
            return self.p.copy()
        bd, zeta = ball_invert(self.nu_p, w)
        if self.domain.kind == "ball":
            bd2 = BoundaryDirection(p=self.p, v=bd.v)
            phi, _ = ball_geodesic_maps(bd2)
            return phi(zeta)
        pair = self.boundary_geodesic(bd.v)
        return pair.phi(zeta)


_solvers = {}
_solvers_lock = threading.Lock()


def _get_solver(domain, p, config=None):
    key = (id(domain), np.asarray(p, complex).tobytes())
    s = _solvers.get(key)
    if s is None:
        with _solvers_lock:
            s = _solvers.setdefault(key, RepSolver(domain, p, config))
    return s


def spherical_rep(domain, p, z, solver=None):
    """The spherical representation of z with respect to the boundary point
    p, as a RepPoint."""
    solver = solver or _get_solver(domain, p)
    return solver.map_point(z)


def spherical_rep_inverse(domain, p, w, solver=None):
    """Inverse of the spherical representation at a point w of the closed
    unit ball."""
    solver = solver or _get_solver(domain, p)
    return solver.invert_point(w)


def horosphere_membership(domain, p, z0, R, z, solver=None):
    """Membership of z in the horosphere of center p, pole z0 and radius R,
    tested through the ball image."""
    if R <= 0:
        raise ValueError("R must be positive")
    solver = solver or _get_solver(domain, p)
    w = solver.map_point(z).w
    w0 = solver.map_point(z0).w
    nw = np.linalg.norm(w)
    if nw >= 1.0 - 1e-14:
        return False
    return bool(ball_busemann(w, w0, solver.nu_p) < 0.5 * np.log(R))


def busemann(domain, p, z, z0, solver=None, tol=1e-4, k_range=range(1, 8)):
    """Busemann function at the boundary point p: the limit of
    k(z, w) - k(z0, w) as w tends to p, computed two ways that must agree:
    (a) numerical limit along a geodesic ray into p, and (b) half the log
    ratio of the boundary kernels at z0 and z."""
    solver = solver or _get_solver(domain, p)
    z = np.asarray(z, complex)
    z0 = np.asarray(z0, complex)
    if np.linalg.norm(z - z0) < 1e-14:
        return 0.0
    # (b) kernel route
    Pz = ball_poisson_kernel(solver.map_point(z).w, solver.nu_p)
    Pz0 = ball_poisson_kernel(solver.map_point(z0).w, solver.nu_p)
    via_kernel = 0.5 * float(np.log(Pz0 / Pz))
    # (a) limit route along the normal-direction geodesic
    if domain.kind == "ball":

        def kdist(a, b):
            return ball_kobayashi(a, b)

        bd = BoundaryDirection(p=solver.p, v=solver.nu_p)
        ray, _ = ball_geodesic_maps(bd)
    else:

        def kdist(a, b):
            return kobayashi_distance(domain, a, b, solver.config, with_certificate=False)

        ray = solver.boundary_geodesic(solver.nu_p).phi
    xs, ys = [], []
    for k in k_range:
        t = 1.0 - 2.0 ** (-k)
        wk = ray(t)
        xs.append(2.0 ** (-k))
        ys.append(kdist(z, wk) - kdist(z0, wk))
    # Neville extrapolation to 0
    tab = [complex(y) for y in ys]
    best, best_err = tab[-1], np.inf
    for m in range(1, len(xs)):
        new = []
        for i in range(len(tab) - 1):
            new.append(
                (xs[i] * tab[i + 1] - xs[i + m] * tab[i]) / (xs[i] - xs[i + m])
            )
        err = abs(new[-1] - tab[-1])
        if err < best_err:
            best_err, best = err, new[-1]
        tab = new
    via_limit = float(np.real(best))
    if abs(via_limit - via_kernel) > tol * max(1.0, abs(via_kernel)):
        raise RuntimeError(
            "Busemann routes disagree: limit %.6f vs kernel %.6f"
            % (via_limit, via_kernel)
        )
    return via_kernel


def nontangential_image_bound(
    domain, p, beta, num_directions=8, num_depths=12, solver=None, rng=None
):
    """Empirical constant sup |w - nu_p| / (1 - |w|) over sampled points of
    the non-tangential region at p, where w is the spherical image."""
    if beta <= 1.0:
        raise ValueError("aperture beta must exceed 1")
    solver = solver or _get_solver(domain, p)
    rng = np.random.default_rng(0) if rng is None else rng
    nu = solver.nu_p
    sup = 0.0
    for _ in range(num_directions):
        u = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        u = u - hermitian_inner(u, nu) * nu
        nu_mix = rng.uniform(0.6, 1.0)
        d = nu_mix * nu + (1 - nu_mix) * u / max(np.linalg.norm(u), 1e-12)
        d = d / np.linalg.norm(d)
        if np.real(hermitian_inner(d, nu)) <= 0:
            continue
        for s in np.geomspace(1e-4, 0.5, num_depths):
            z = solver.p - s * d
            if not domain.contains(z):
                continue
            if not in_nontangential_region(domain, solver.p, beta, z):
                continue
            w = solver.map_point(z).w
            nw = np.linalg.norm(w)
            if nw >= 1.0:
                continue
            sup = max(sup, float(np.linalg.norm(w - nu) / (1.0 - nw)))
    return sup
