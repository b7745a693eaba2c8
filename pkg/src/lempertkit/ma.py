# The negative pluriharmonic-type boundary kernel of a strongly linearly
# convex domain: evaluation through the spherical representation,
# verification of the degenerate complex Monge-Ampere structure (positive
# semidefinite complex Hessian with vanishing determinant and null direction
# along the geodesic foliation), the disc-slice identity, boundary
# asymptotics, the Green function, and the normal-derivative relation
# between the Green function and the kernel.

from __future__ import annotations

import numpy as np

from lempertkit.ball import (
    ball_kobayashi,
    ball_poisson_kernel,
)
from lempertkit.core import hermitian_inner, poisson_kernel
from lempertkit.domains import distance_to_boundary, unit_normal, project_to_boundary
from lempertkit.geodesics import kobayashi_distance
from lempertkit.rep import RepSolver, _get_solver

__all__ = [
    "pluricomplex_poisson",
    "slice_check",
    "complex_hessian_fd",
    "ma_verify",
    "boundary_asymptotics",
    "green_function",
    "green_normal_derivative_relation",
]


def pluricomplex_poisson(domain, p, z, solver=None):
    """The boundary kernel at pole p evaluated at z: the ball kernel
    composed with the spherical representation.  Negative on the interior,
    tending to 0 at boundary points other than p."""
    solver = solver or _get_solver(domain, p)
    rp = solver.map_point(z)
    return ball_poisson_kernel(rp.w, solver.nu_p)


def slice_check(domain, p, v, radii=16, angles=64, solver=None, harmonicity_points=4):
    """Verify the slice identity: along the preferred geodesic phi_v through
    (p, v), the kernel equals -P(zeta)/<v, nu_p>^2 with P the classical disc
    Poisson kernel.  Reports the max deviation over a polar grid and a
    discrete-Laplacian harmonicity check of the slice."""
    solver = solver or _get_solver(domain, p)
    nu_p = solver.nu_p
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    c = hermitian_inner(v, nu_p)
    v = v * (abs(c) / c)
    c = abs(c)
    if domain.kind == "ball":
        from lempertkit.ball import BoundaryDirection, ball_geodesic_maps

        phi, _ = ball_geodesic_maps(BoundaryDirection(p=solver.p, v=v))
    else:
        phi = solver.boundary_geodesic(v).phi

    def slice_val(zeta):
        return pluricomplex_poisson(domain, p, phi(zeta), solver=solver)

    rr = np.linspace(0.05, 0.9, radii)
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    worst = 0.0
    for a in th:  # angle-major order keeps consecutive points close (warm starts)
        for r in rr:
            zeta = r * np.exp(1j * a)
            val = slice_val(zeta)
            target = -poisson_kernel(zeta) / c**2
            worst = max(worst, abs(val - target))
    # harmonicity of the slice in the disc variable: the 5-point Laplacian of
    # the slice must match the same stencil applied to the (exactly harmonic)
    # target, which cancels the O(h^2) stencil truncation
    h = 1e-2
    rng = np.random.default_rng(7)
    lap_worst = 0.0

    def stencil(fun, zeta):
        return (
            fun(zeta + h)
            + fun(zeta - h)
            + fun(zeta + 1j * h)
            + fun(zeta - 1j * h)
            - 4.0 * fun(zeta)
        ) / h**2

    for _ in range(harmonicity_points):
        zeta = rng.uniform(0.1, 0.6) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        lap = stencil(slice_val, zeta) - stencil(lambda q: -poisson_kernel(q) / c**2, zeta)
        lap_worst = max(lap_worst, abs(lap))
    # the stencil amplifies pointwise slice error by ~1/h^2
    lap_tol = max(1e-5, 10.0 * worst / h**2)
    return {
        "max_deviation": float(worst),
        "laplacian_max": float(lap_worst),
        "pass": bool(worst < 1e-6 and lap_worst < lap_tol),
    }


def _real_hessian_fd(u, x, h):
    """Symmetric real Hessian of a scalar function of m real variables by
    central differences."""
    m = len(x)
    S = np.empty((m, m))
    for a in range(m):
        for b in range(a, m):
            ea = np.zeros(m)
            ea[a] = h
            eb = np.zeros(m)
            eb[b] = h
            if a == b:
                S[a, a] = (u(x + ea) - 2.0 * u(x) + u(x - ea)) / h**2
            else:
                S[a, b] = S[b, a] = (
                    u(x + ea + eb) - u(x + ea - eb) - u(x - ea + eb) + u(x - ea - eb)
                ) / (4.0 * h**2)
    return S


def complex_hessian_fd(u, z, h=None, clearance=None, richardson=True, levels=None):
    """Finite-difference complex Hessian of a real-valued function u of
    z in C^n, returned as a Hermitian matrix H with the form value
    v^H H v = sum_{j,k} (d^2 u / dz_j dzbar_k) v_j vbar_k.

    levels grids (h, h/2, ...) are combined by Richardson extrapolation,
    eliminating the even error terms up to O(h^(2*levels)); levels=1 is the
    raw central-difference stencil.  The default is 2 (richardson=False
    selects 1)."""
    z = np.asarray(z, dtype=complex)
    n = len(z)
    if h is None:
        h = 1e-3 * (clearance if clearance else 1.0)
    if clearance is not None and clearance <= 4 * h:
        raise ValueError("insufficient clearance for the requested step")
    if levels is None:
        levels = 2 if richardson else 1

    def ur(x):
        return u(x[:n] + 1j * x[n:])

    x0 = np.concatenate([z.real, z.imag])

    def cplx(S):
        Sxx = S[:n, :n]
        Syy = S[n:, n:]
        Sxy = S[:n, n:]  # d/dx_j d/dy_k
        Hjk = 0.25 * (Sxx + Syy + 1j * (Sxy - Sxy.T))  # H[j,k] = d2u/dz_j dzbar_k
        return Hjk.T  # so that v^H H v is the Hermitian form value

    tab = [cplx(_real_hessian_fd(ur, x0, h / 2.0**k)) for k in range(levels)]
    for m in range(1, levels):
        fac = 4.0**m
        tab = [
            (fac * tab[i + 1] - tab[i]) / (fac - 1.0) for i in range(len(tab) - 1)
        ]
    H = tab[0]
    return 0.5 * (H + np.conj(H).T)


def ma_verify(
    domain,
    p,
    samples,
    tol_psd=1e-4,
    tol_det=1e-6,
    tol_angle=1e-2,
    h=None,
    levels=None,
    solver=None,
):
    """At each interior sample: check that the kernel's complex Hessian is
    positive semidefinite up to tol_psd, has determinant at most tol_det,
    and that its null direction aligns with the tangent of the geodesic
    through p and the sample; also check negativity of the kernel."""
    solver = solver or _get_solver(domain, p)

    def u(z):
        return pluricomplex_poisson(domain, p, z, solver=solver)

    report = {"points": [], "pass": True}
    for z in samples:
        z = np.asarray(z, dtype=complex)
        clear = min(distance_to_boundary(domain, z), float(np.linalg.norm(z - solver.p)))
        step = h if h is not None else max(1e-3 * clear, 1e-4)
        H = complex_hessian_fd(u, z, h=step, levels=levels)
        eigs, vecs = np.linalg.eigh(H)
        det = float(np.prod(eigs))
        null_vec = vecs[:, 0]
        rp = solver.map_point(z)
        if rp.pair is not None:
            tangent = rp.pair.phi.deriv()(rp.zeta)
        else:
            # ball: the geodesic through p and z has tangent parallel to z - p
            tangent = z - solver.p
        cosang = abs(hermitian_inner(null_vec, tangent)) / (
            np.linalg.norm(null_vec) * np.linalg.norm(tangent)
        )
        angle = float(np.arccos(min(1.0, cosang)))
        val = u(z)
        entry = {
            "eig_min": float(eigs[0]),
            "eig_max": float(eigs[-1]),
            "det": det,
            "null_angle": angle,
            "value": float(val),
        }
        ok = (
            eigs[0] >= -tol_psd
            and abs(det) <= tol_det
            and angle <= tol_angle
            and val < 0
        )
        entry["pass"] = bool(ok)
        report["points"].append(entry)
        report["pass"] = report["pass"] and ok
    report["det_max"] = max(abs(e["det"]) for e in report["points"])
    report["eig_min"] = min(e["eig_min"] for e in report["points"])
    report["angle_max"] = max(e["null_angle"] for e in report["points"])
    return report


def boundary_asymptotics(domain, p, gamma, gamma_prime_1, k_range=range(3, 11), solver=None):
    """Extrapolated limit of u(gamma(t)) (1 - t) as t -> 1 along a
    non-tangential curve with gamma(1) = p, compared with
    -Re(2 / <gamma'(1), nu_p>).  Returns (limit, target)."""
    solver = solver or _get_solver(domain, p)
    target = -float(np.real(2.0 / hermitian_inner(np.asarray(gamma_prime_1, complex), solver.nu_p)))
    xs, ys = [], []
    for k in k_range:
        t = 1.0 - 2.0 ** (-k)
        z = np.asarray(gamma(t), dtype=complex)
        if not domain.contains(z):
            raise ValueError("curve leaves the domain at t=%.6f" % t)
        ys.append(pluricomplex_poisson(domain, p, z, solver=solver) * (1.0 - t))
        xs.append(2.0 ** (-k))
    tab = list(map(float, ys))
    best, best_err = tab[-1], np.inf
    for m in range(1, len(xs)):
        new = []
        for i in range(len(tab) - 1):
            new.append((xs[i] * tab[i + 1] - xs[i + m] * tab[i]) / (xs[i] - xs[i + m]))
        err = abs(new[-1] - tab[-1])
        if err < best_err:
            best_err, best = err, new[-1]
        tab = new
    return float(best), target


def green_function(domain, w, z, config=None):
    """Pluricomplex Green function with pole w: log tanh of the Kobayashi
    distance."""
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    if domain.kind == "ball":
        k = ball_kobayashi(z, w)
    else:
        k = kobayashi_distance(domain, z, w, config, with_certificate=False)
    if k <= 0:
        raise ValueError("z must differ from the pole")
    return float(np.log(np.tanh(k)))


def green_normal_derivative_relation(domain, p, z, hs=None, config=None, solver=None):
    """Difference quotients g(z, p - h nu_p) / h, Richardson-extrapolated in
    h, compared with the kernel value at z.  Returns (quotient_limit,
    kernel_value)."""
    solver = solver or _get_solver(domain, p)
    nu_p = solver.nu_p
    pp = solver.p
    if hs is None:
        hs = [2.0 ** (-k) for k in range(4, 10)]
    xs, ys = [], []
    for h in hs:
        pole = pp - h * nu_p
        if not domain.contains(pole):
            continue
        g = green_function(domain, pole, z, config)
        xs.append(h)
        ys.append(g / h)
    if len(xs) < 3:
        raise RuntimeError("not enough valid quotient steps")
    tab = list(map(float, ys))
    best, best_err = tab[-1], np.inf
    for m in range(1, len(xs)):
        new = []
        for i in range(len(tab) - 1):
            new.append((xs[i] * tab[i + 1] - xs[i + m] * tab[i]) / (xs[i] - xs[i + m]))
        err = abs(new[-1] - tab[-1])
        if err < best_err:
            best_err, best = err, new[-1]
        tab = new
    kernel = pluricomplex_poisson(domain, p, z, solver=solver)
    return float(best), float(kernel)
