import numpy as np
import pytest

from lempertkit.ball import ball_poisson_hessian_matrix
from lempertkit.domains import project_to_boundary, unit_normal
from lempertkit.geodesics import SolverConfig
from lempertkit.ma import (
    boundary_asymptotics,
    complex_hessian_fd,
    green_function,
    green_normal_derivative_relation,
    ma_verify,
    pluricomplex_poisson,
    slice_check,
)
from lempertkit.rep import RepSolver

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)


@pytest.fixture(scope="module")
def psolver(pball):
    p = project_to_boundary(pball, np.array([1.0, 0.1], dtype=complex))
    return RepSolver(pball, p, SolverConfig(degree=48, tol_residual=1e-10))


# -- kernel values -----------------------------------------------------------


def test_kernel_center_value(ball2):
    assert abs(pluricomplex_poisson(ball2, E1, np.zeros(2)) + 1.0) < 1e-12


def test_kernel_negative_inside(psolver, pball):
    rng = np.random.default_rng(21)
    for _ in range(5):
        z = rng.standard_normal(2) * 0.3 + 1j * rng.standard_normal(2) * 0.2
        if not pball.contains(z):
            continue
        val = pluricomplex_poisson(pball, psolver.p, z, solver=psolver)
        assert val < 0


def test_kernel_small_away_from_pole(psolver, pball):
    # at boundary points away from the pole the kernel tends to 0
    b = project_to_boundary(pball, np.array([-0.3, 0.9], dtype=complex))
    nu = unit_normal(pball, b)
    v1 = pluricomplex_poisson(pball, psolver.p, b - 1e-2 * nu, solver=psolver)
    v2 = pluricomplex_poisson(pball, psolver.p, b - 1e-4 * nu, solver=psolver)
    assert abs(v2) < abs(v1) < 1.0


# -- slice identity ----------------------------------------------------------


def test_slice_identity_ball(ball2):
    v = (E1 + E2) / np.sqrt(2)
    rep = slice_check(ball2, E1, v, radii=8, angles=16)
    assert rep["max_deviation"] < 1e-12
    assert rep["pass"]


def test_slice_identity_perturbed(psolver, pball):
    v = (psolver.nu_p + 0.4 * E2) / np.linalg.norm(psolver.nu_p + 0.4 * E2)
    rep = slice_check(pball, psolver.p, v, radii=16, angles=64, solver=psolver)
    assert rep["max_deviation"] < 1e-6
    assert rep["pass"]


# -- complex Hessian FD ------------------------------------------------------


def test_hessian_fd_quadratic():
    H = complex_hessian_fd(lambda z: float(np.sum(np.abs(z) ** 2)), np.array([0.2, 0.1j]))
    assert np.max(np.abs(H - np.eye(2))) < 1e-8


def test_hessian_fd_pluriharmonic():
    # Re(z1^2) is pluriharmonic: complex Hessian identically zero
    H = complex_hessian_fd(lambda z: float(np.real(z[0] ** 2)), np.array([0.3, -0.2j]))
    assert np.max(np.abs(H)) < 1e-8


def test_hessian_fd_matches_ball_kernel_hessian(ball2):
    z = 0.2 * E2
    u = lambda zz: pluricomplex_poisson(ball2, E1, zz)
    H = complex_hessian_fd(u, z, h=1e-2, levels=3)
    assert np.max(np.abs(H - ball_poisson_hessian_matrix(z, E1))) < 1e-5


# -- Monge-Ampere degeneracy -------------------------------------------------


def test_ma_verify_ball(ball2):
    rng = np.random.default_rng(22)
    samples = []
    while len(samples) < 5:
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z = z / np.linalg.norm(z) * rng.uniform(0.45, 0.6)
        if np.linalg.norm(z - E1) > 0.45:
            samples.append(z)
    rep = ma_verify(ball2, E1, samples, tol_psd=1e-10, tol_det=1e-8, h=5e-2, levels=4)
    assert rep["pass"], rep


def test_ma_verify_perturbed(psolver, pball):
    solver = RepSolver(pball, psolver.p, SolverConfig(degree=64, tol_residual=1e-12))
    rng = np.random.default_rng(23)
    samples = []
    while len(samples) < 3:
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z = z / np.linalg.norm(z) * rng.uniform(0.3, 0.5)
        if pball.contains(z) and np.linalg.norm(z - solver.p) > 0.45:
            samples.append(z)
    rep = ma_verify(
        pball, solver.p, samples, tol_psd=1e-4, tol_det=1e-6, h=3e-3, levels=2,
        solver=solver,
    )
    assert rep["pass"], rep


# -- boundary asymptotics ----------------------------------------------------


def test_asymptotics_normal_ray(ball2):
    gamma = lambda t: t * E1
    limit, target = boundary_asymptotics(ball2, E1, gamma, E1)
    assert abs(target + 2.0) < 1e-14
    assert abs(limit - target) < 1e-6


def test_asymptotics_oblique_line(ball2):
    # gamma(t) = p + (t-1) v with <v, e1> = 1/2 stays in the ball:
    # |p + (t-1)v|^2 = 1 + (t-1)t < 1 for t in (0,1)
    v = 0.5 * E1 + (np.sqrt(3) / 2) * E2
    gamma = lambda t: E1 + (t - 1.0) * v
    limit, target = boundary_asymptotics(ball2, E1, gamma, v)
    assert abs(target + 4.0) < 1e-12
    assert abs(limit - target) < 1e-3


def test_asymptotics_rejects_exiting_curve(ball2):
    gamma = lambda t: np.array([t, 0.8], dtype=complex)
    with pytest.raises(ValueError):
        boundary_asymptotics(ball2, E1, gamma, E1)


# -- Green function ----------------------------------------------------------


def test_green_ball_pole_zero(ball2):
    for r in (0.2, 0.5, 0.9):
        g = green_function(ball2, np.zeros(2), r * E1)
        assert abs(g - np.log(r)) < 1e-12


def test_green_vanishes_at_boundary(ball2):
    g = green_function(ball2, np.zeros(2), 0.999 * E1)
    assert -1e-2 < g < 0


def test_green_rejects_pole(ball2):
    z = np.array([0.1, 0.2j])
    with pytest.raises(ValueError):
        green_function(ball2, z, z)


def test_green_normal_derivative_ball(ball2):
    z = np.array([0.3, 0.1j])
    quot, kernel = green_normal_derivative_relation(ball2, E1, z)
    assert abs(quot - kernel) < 1e-3 * abs(kernel)
