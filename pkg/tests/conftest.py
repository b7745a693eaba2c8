import numpy as np
import pytest

from lempertkit.core import hermitian_inner
from lempertkit.domains import DomainSpec, project_to_boundary, unit_normal


@pytest.fixture(scope="session")
def ball2():
    return DomainSpec("ball", 2)


@pytest.fixture(scope="session")
def ball3():
    return DomainSpec("ball", 3)


@pytest.fixture(scope="session")
def pball():
    return DomainSpec("perturbed-ball", 2, eps=0.1)


@pytest.fixture(scope="session")
def linear_ball():
    A = np.array([[2.0, 0.3 + 0.1j], [0.0, 1.0]], dtype=complex)
    return DomainSpec("linear-ball", 2, A=A, b=np.array([0.1, -0.2j]))


def random_boundary_point(domain, rng):
    z = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
    return project_to_boundary(domain, domain.anchor + z)


def random_admissible_direction(domain, p, rng, min_pairing=0.1):
    """Unit v with <v, nu_p> real and >= min_pairing."""
    nu = unit_normal(domain, p)
    while True:
        u = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        v = nu + 0.8 * u / np.linalg.norm(u)
        v = v / np.linalg.norm(v)
        c = hermitian_inner(v, nu)
        if abs(c) < min_pairing:
            continue
        v = v * (abs(c) / c)
        return v


def points_to_curve_distance(points, curve, M=4096):
    """Max over `points` of the distance to the closed curve theta ->
    curve(e^{i theta}).  A dense sample locates the nearest node per point;
    iterated parabolic refinement of the squared distance in theta then
    resolves the minimum far below the sample spacing (the curve speed can
    vary by orders of magnitude along the parameter)."""
    import numpy as np

    points = np.atleast_2d(points)
    th = np.linspace(0.0, 2.0 * np.pi, M, endpoint=False)
    samples = curve(np.exp(1j * th))
    d2 = np.sum(
        np.abs(samples[None, :, :] - points[:, None, :]) ** 2, axis=-1
    )
    th_best = th[np.argmin(d2, axis=1)]

    def g(theta):
        return np.sum(np.abs(curve(np.exp(1j * theta)) - points) ** 2, axis=-1)

    step = 2.0 * np.pi / M
    for _ in range(6):
        gm, g0, gp = g(th_best - step), g(th_best), g(th_best + step)
        denom = gm - 2.0 * g0 + gp
        off = np.where(np.abs(denom) > 1e-300, 0.5 * (gm - gp) / np.where(denom == 0, 1.0, denom), 0.0)
        th_best = th_best + np.clip(off, -1.0, 1.0) * step
        step /= 6.0
    return float(np.sqrt(np.max(g(th_best))))


def hausdorff_curve_distance(curve_a, curve_b, M_probe=512, M_dense=4096):
    """Symmetric Hausdorff distance between two closed boundary curves."""
    import numpy as np

    probes = np.exp(1j * np.linspace(0, 2 * np.pi, M_probe, endpoint=False))
    da = points_to_curve_distance(curve_a(probes), curve_b, M_dense)
    db = points_to_curve_distance(curve_b(probes), curve_a, M_dense)
    return max(da, db)


def random_interior_point(domain, rng, rmax=0.6, rmin=0.05):
    while True:
        z = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        z = domain.anchor + z / np.linalg.norm(z) * rng.uniform(rmin, rmax)
        if domain.contains(z):
            return z
