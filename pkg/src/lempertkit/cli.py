# Command-line front end: geodesic solves, distances and metrics, the
# boundary spherical representation, horospheres and Busemann functions,
# the boundary kernel and its field dumps, boundary rigidity checks, and
# seeded verification suites.
#
# Exit codes (stable contract): 0 success / all checks PASS; 1 input error
# (bad file, malformed JSON, invalid point); 2 solver failure; 3 a
# verification check ran and FAILed.  All randomness is driven by --seed,
# so reports are byte-identical across runs with the same seed.  Output
# files are written atomically (temp file + rename).  File formats are
# documented in docs/formats.md.

from __future__ import annotations

import json
import os
import sys
import tempfile

import click
import numpy as np

from lempertkit.ball import (
    BoundaryDirection,
    ball_geodesic_maps,
)
from lempertkit.core import HardyMap, hermitian_inner
from lempertkit.domains import DomainSpec, project_to_boundary, unit_normal
from lempertkit.geodesics import (
    GeodesicPair,
    SolverConfig,
    StationaryProblem,
    geodesic_certificate,
    kobayashi_distance,
    kobayashi_metric,
    preferred_normalize,
    solve_stationary,
)
from lempertkit.ma import (
    green_function,
    ma_verify,
    pluricomplex_poisson,
    slice_check,
)
from lempertkit.rep import (
    RepSolver,
    busemann as rep_busemann,
    horosphere_membership,
)
from lempertkit.rigidity import (
    SelfMap,
    random_contact_map,
    shoikhet_counterexample,
    third_derivative_at_one,
    verify_bk_inequalities,
)

# a boundary direction closer to tangential than this is rejected up front;
# the solve degenerates as <v, nu_p> -> 0
NEAR_TANGENTIAL_CUTOFF = 1e-3

# click reserves 2 for usage errors; our contract uses 1 for all input errors
click.UsageError.exit_code = 1

EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3


# ---------------------------------------------------------------------------
# plumbing


def _fail(code, msg):
    click.echo("error: %s" % msg, err=True)
    sys.exit(code)


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _np_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError("not JSON-serializable: %r" % type(o))


def _emit(obj, out):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_np_default) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        click.echo(text, nl=False)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as e:
        _fail(EXIT_INPUT, "cannot read JSON from %s: %s" % (path, e))


def _load_domain(path):
    obj = _load_json(path)
    try:
        return DomainSpec.from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        _fail(EXIT_INPUT, "invalid domain descriptor %s: %s" % (path, e))


def _parse_point(s, n=None, name="point"):
    try:
        vals = np.array([complex(part.strip()) for part in s.split(",")])
    except ValueError:
        _fail(EXIT_INPUT, "cannot parse %s %r (expected e.g. '1+0j,0')" % (name, s))
    if n is not None and len(vals) != n:
        _fail(EXIT_INPUT, "%s %r has %d components, expected %d" % (name, s, len(vals), n))
    return vals


def _json_vec(obj, name="vector"):
    try:
        return np.array([complex(re, im) for re, im in obj])
    except (TypeError, ValueError):
        _fail(EXIT_INPUT, "invalid %s in problem JSON (expected [[re,im],...])" % name)


def _vec_json(v):
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, complex)]


def _problem_from_json(obj):
    try:
        variant = obj["variant"]
    except (KeyError, TypeError):
        _fail(EXIT_INPUT, "problem JSON must have a 'variant' field")
    fields = {}
    for k in ("p", "v", "z", "w"):
        if obj.get(k) is not None:
            fields[k] = _json_vec(obj[k], k)
    try:
        if variant == "boundary":
            return StationaryProblem.boundary(fields["p"], fields["v"])
        if variant == "interior-point":
            return StationaryProblem.interior_point(fields["z"], fields["w"])
        if variant == "interior-direction":
            return StationaryProblem.interior_direction(fields["z"], fields["v"])
        if variant == "boundary-through":
            return StationaryProblem.boundary_through(fields["p"], fields["z"])
    except KeyError as e:
        _fail(EXIT_INPUT, "problem variant %r is missing field %s" % (variant, e))
    _fail(EXIT_INPUT, "unknown problem variant %r" % variant)


def _config_from_json(obj):
    if obj is None:
        return None
    allowed = {
        "degree",
        "grid",
        "tol_residual",
        "max_iter",
        "mu_degree",
        "continuation_step",
    }
    bad = set(obj) - allowed
    if bad:
        _fail(EXIT_INPUT, "unknown solver config fields: %s" % sorted(bad))
    return SolverConfig(**obj)


def _check_tangential(domain, problem):
    if problem.variant not in ("boundary",):
        return
    p = project_to_boundary(domain, problem.p)
    nu = unit_normal(domain, p)
    v = problem.v / np.linalg.norm(problem.v)
    pairing = float(np.real(hermitian_inner(v, nu)))
    if pairing < NEAR_TANGENTIAL_CUTOFF:
        _fail(
            EXIT_SOLVER,
            "near-tangential direction: Re<v, nu_p> = %.3e is below the cutoff %g"
            % (pairing, NEAR_TANGENTIAL_CUTOFF),
        )


def _seed_option(f):
    return click.option("--seed", type=int, default=0, show_default=True,
                        help="Seed for all random sampling.")(f)


def _jobs_option(f):
    return click.option(
        "--jobs",
        type=int,
        default=lambda: int(os.environ.get("LEMPERTKIT_JOBS", "1")),
        help="Upper bound on internal parallelism [default: LEMPERTKIT_JOBS or 1].",
    )(f)


# ---------------------------------------------------------------------------
# geodesic / distance / metric


@click.group()
def main():
    """Complex geodesics, spherical representations and boundary kernels on
    strongly linearly convex domains."""


@main.group()
def geodesic():
    """Stationary-disc solves."""


@geodesic.command("solve")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--problem", "problem_path", required=True, type=click.Path())
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--out", default=None, type=click.Path(), help="Output JSON path (stdout if omitted).")
@_seed_option
@_jobs_option
def geodesic_solve(domain_path, problem_path, config_path, out, seed, jobs):
    """Solve a stationary-disc problem and certify the result.

    Writes the geodesic pair (phi, dual, mu, residuals) plus its
    certificate; exits 0 iff the certificate passes."""
    domain = _load_domain(domain_path)
    problem = _problem_from_json(_load_json(problem_path))
    config = _config_from_json(_load_json(config_path) if config_path else None)
    _check_tangential(domain, problem)
    try:
        pair = solve_stationary(domain, problem, config)
    except (RuntimeError, ValueError) as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    cert = geodesic_certificate(pair, domain, seed=seed)
    doc = pair.to_json()
    doc["certificate"] = cert
    _emit(doc, out)
    sys.exit(0 if cert["pass"] else EXIT_SOLVER)


@main.command()
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--z", "z_str", required=True)
@click.option("--w", "w_str", required=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def distance(domain_path, z_str, w_str, out, seed, jobs):
    """Kobayashi distance between two interior points."""
    domain = _load_domain(domain_path)
    z = _parse_point(z_str, domain.n, "z")
    w = _parse_point(w_str, domain.n, "w")
    if not (domain.contains(z) and domain.contains(w)):
        _fail(EXIT_INPUT, "z and w must be interior points")
    try:
        d = kobayashi_distance(domain, z, w)
    except (RuntimeError, ValueError) as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    _emit({"distance": d}, out)


@main.command()
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--z", "z_str", required=True)
@click.option("--v", "v_str", required=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def metric(domain_path, z_str, v_str, out, seed, jobs):
    """Kobayashi-Royden infinitesimal metric at z in direction v."""
    domain = _load_domain(domain_path)
    z = _parse_point(z_str, domain.n, "z")
    v = _parse_point(v_str, domain.n, "v")
    if not domain.contains(z):
        _fail(EXIT_INPUT, "z must be an interior point")
    if np.linalg.norm(v) < 1e-14:
        _fail(EXIT_INPUT, "v must be nonzero")
    try:
        k = kobayashi_metric(domain, z, v)
    except (RuntimeError, ValueError) as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    _emit({"metric": k}, out)


# ---------------------------------------------------------------------------
# spherical representation


@main.group()
def rep():
    """Boundary spherical representation."""


def _rep_map_impl(domain_path, p_str, z_str, out):
    domain = _load_domain(domain_path)
    p = _parse_point(p_str, domain.n, "p")
    z = _parse_point(z_str, domain.n, "z")
    solver = RepSolver(domain, p)
    try:
        rp = solver.map_point(z)
    except ValueError as e:
        _fail(EXIT_INPUT, str(e))
    except RuntimeError as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    _emit(
        {
            "z": _vec_json(rp.z),
            "v": None if rp.v is None else _vec_json(rp.v),
            "zeta": [float(np.real(rp.zeta)), float(np.imag(rp.zeta))],
            "w": _vec_json(rp.w),
        },
        out,
    )


@rep.command("map")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--p", "p_str", required=True)
@click.option("--z", "z_str", required=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def rep_map(domain_path, p_str, z_str, out, seed, jobs):
    """Spherical image of z with respect to the boundary point p."""
    _rep_map_impl(domain_path, p_str, z_str, out)


def _horosphere_impl(domain_path, p_str, z0_str, radius, z_str, out):
    domain = _load_domain(domain_path)
    p = _parse_point(p_str, domain.n, "p")
    z0 = _parse_point(z0_str, domain.n, "z0")
    z = _parse_point(z_str, domain.n, "z")
    if radius <= 0:
        _fail(EXIT_INPUT, "R must be positive")
    solver = RepSolver(domain, p)
    try:
        member = horosphere_membership(domain, p, z0, radius, z, solver=solver)
    except ValueError as e:
        _fail(EXIT_INPUT, str(e))
    except RuntimeError as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    _emit({"member": bool(member)}, out)


@rep.command("horosphere")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--p", "p_str", required=True)
@click.option("--z0", "z0_str", required=True)
@click.option("--R", "radius", type=float, required=True)
@click.option("--z", "z_str", required=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def rep_horosphere(domain_path, p_str, z0_str, radius, z_str, out, seed, jobs):
    """Horosphere membership of z (center p, pole z0, radius R)."""
    _horosphere_impl(domain_path, p_str, z0_str, radius, z_str, out)


def _busemann_impl(domain_path, p_str, z_str, z0_str, out):
    domain = _load_domain(domain_path)
    p = _parse_point(p_str, domain.n, "p")
    z = _parse_point(z_str, domain.n, "z")
    z0 = _parse_point(z0_str, domain.n, "z0")
    solver = RepSolver(domain, p)
    try:
        b = rep_busemann(domain, p, z, z0, solver=solver)
    except ValueError as e:
        _fail(EXIT_INPUT, str(e))
    except RuntimeError as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    _emit({"busemann": b}, out)


@rep.command("busemann")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--p", "p_str", required=True)
@click.option("--z", "z_str", required=True)
@click.option("--z0", "z0_str", required=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def rep_busemann_cmd(domain_path, p_str, z_str, z0_str, out, seed, jobs):
    """Busemann function of (z, z0) at the boundary point p."""
    _busemann_impl(domain_path, p_str, z_str, z0_str, out)


# top-level aliases required by the interface contract
main.add_command(rep_horosphere, name="horosphere")
main.add_command(rep_busemann_cmd, name="busemann")


# ---------------------------------------------------------------------------
# boundary kernel


@main.group()
def ma():
    """Boundary kernel and its degenerate-Hessian verification."""


def _interior_samples(domain, p, rng, count, rmax=0.6):
    """Seeded interior points, bounded away from both boundary and p."""
    out = []
    while len(out) < count:
        z = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        z = z / np.linalg.norm(z) * rng.uniform(0.1, rmax)
        z = domain.anchor + z
        if domain.contains(z) and np.linalg.norm(z - p) > 0.45:
            out.append(z)
    return out


@ma.command("verify")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--p", "p_str", required=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def ma_verify_cmd(domain_path, p_str, samples, out, seed, jobs):
    """Degenerate-Hessian verification of the kernel at seeded samples."""
    domain = _load_domain(domain_path)
    p = _parse_point(p_str, domain.n, "p")
    solver = RepSolver(domain, p, config=SolverConfig(degree=64, tol_residual=1e-12))
    rng = np.random.default_rng(seed)
    pts = _interior_samples(domain, solver.p, rng, samples)
    h, levels = (5e-2, 4) if domain.kind == "ball" else (3e-3, 2)
    try:
        report = ma_verify(domain, solver.p, pts, h=h, levels=levels, solver=solver)
    except RuntimeError as e:
        _fail(EXIT_SOLVER, "solver failure: %s" % e)
    report["seed"] = seed
    _emit(report, out)
    if not report["pass"]:
        failing = [e for e in report["points"] if not e["pass"]]
        click.echo("FAIL: %r" % failing[0], err=True)
        sys.exit(EXIT_VERIFY)


def _parse_grid(spec, name="--grid"):
    try:
        a, b = spec.lower().split("x")
        na, nb = int(a), int(b)
        if na < 1 or nb < 1:
            raise ValueError
        return na, nb
    except ValueError:
        _fail(EXIT_INPUT, "invalid %s %r (expected e.g. '64x64')" % (name, spec))


FIELD_HEADER = "re_z1,im_z1,value"


def _field_impl(domain_path, p_str, grid, what, out, jobs):
    domain = _load_domain(domain_path)
    p = _parse_point(p_str, domain.n, "p")
    nx, ny = _parse_grid(grid)
    if what not in ("poisson", "green"):
        _fail(EXIT_INPUT, "--what must be 'poisson' or 'green'")
    solver = RepSolver(domain, p)
    xs = np.linspace(-0.995, 0.995, nx)
    ys = np.zeros(1) if ny == 1 else np.linspace(-0.995, 0.995, ny)
    rest = np.asarray(domain.anchor[1:], complex)
    lines = [FIELD_HEADER]
    for y in ys:
        for x in xs:
            z = np.concatenate([[complex(x, y)], rest])
            # cells at or adjacent to the kernel singularity at p, and cells
            # outside the domain, are emitted as the sentinel "nan"
            if not domain.contains(z) or np.linalg.norm(z - solver.p) < 1e-2:
                val = "nan"
            else:
                try:
                    if what == "poisson":
                        val = "%.17g" % pluricomplex_poisson(domain, p, z, solver=solver)
                    else:
                        val = "%.17g" % green_function(domain, solver.p - 1e-2 * solver.nu_p, z)
                except RuntimeError as e:
                    _fail(EXIT_SOLVER, "solver failure at z1=%g%+gi: %s" % (x, y, e))
            lines.append("%.17g,%.17g,%s" % (x, y, val))
    text = "\n".join(lines) + "\n"
    if out:
        _atomic_write(out, text)
    else:
        click.echo(text, nl=False)


@ma.command("field")
@click.option("--domain", "domain_path", required=True, type=click.Path())
@click.option("--p", "p_str", required=True)
@click.option("--grid", default="32x1", show_default=True, help="NXxNY cells over the z1-slice.")
@click.option("--what", default="poisson", show_default=True, help="'poisson' or 'green'.")
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def ma_field(domain_path, p_str, grid, what, out, seed, jobs):
    """CSV dump of the kernel (or Green function) over a z1-plane slice.

    Columns, fixed order: re_z1, im_z1, value.  Cells outside the domain or
    adjacent to p carry the sentinel "nan"."""
    _field_impl(domain_path, p_str, grid, what, out, jobs)


main.add_command(ma_field, name="field")


# ---------------------------------------------------------------------------
# rigidity


def _selfmap_from_json(obj):
    kind = obj.get("type")
    if kind == "poly":
        coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]])
        return SelfMap(HardyMap(coeffs[None, :]))
    if kind == "herglotz":
        amps = np.asarray(obj["amps"], float)
        thetas = np.asarray(obj["thetas"], float)
        if len(amps) != len(thetas) or np.any(amps <= 0):
            raise ValueError("herglotz maps need positive amps matching thetas")
        c = float(np.sum(amps / np.tan(thetas / 2.0)))

        def f(zeta):
            zeta = np.asarray(zeta, dtype=complex)
            g = 1j * c * np.ones_like(zeta)
            for ak, th in zip(amps, thetas):
                e = np.exp(-1j * th)
                g = g + ak * (1.0 + e * zeta) / (1.0 - e * zeta)
            q = (1.0 - zeta) * g
            return (q + 2.0 * zeta) / (q + 2.0)

        return SelfMap(f)
    if kind == "shoikhet":
        return SelfMap(lambda z: (10 * z + (1 - z) ** 2) / (10 + (1 - z) ** 2))
    raise ValueError("unknown self-map type %r (want poly | herglotz | shoikhet)" % kind)


@main.group()
def rigidity():
    """Boundary rigidity inequalities for self-maps of the disc."""


@rigidity.command("verify")
@click.option("--f", "f_path", required=True, type=click.Path(), help="Self-map descriptor JSON.")
@click.option("--grid", default="64x256", show_default=True, help="radii x angles sampling grid.")
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def rigidity_verify(f_path, grid, out, seed, jobs):
    """Check both rigidity inequalities for a self-map on a polar grid."""
    radii, angles = _parse_grid(grid)
    try:
        f = _selfmap_from_json(_load_json(f_path))
    except (KeyError, TypeError, ValueError) as e:
        _fail(EXIT_INPUT, "invalid self-map descriptor: %s" % e)
    try:
        f3 = third_derivative_at_one(f)
        rep_ = verify_bk_inequalities(f, radii=radii, angles=angles, f3=f3)
    except ValueError as e:
        _fail(EXIT_VERIFY, "rigidity check FAIL: %s" % e)
    report = {
        "margins": {"i": rep_["margin_i"], "ii": rep_["margin_ii"]},
        "f3_estimate": f3,
        "verdict": "PASS" if rep_["pass"] else "FAIL",
    }
    _emit(report, out)
    if not rep_["pass"]:
        click.echo("FAIL: %r" % report, err=True)
        sys.exit(EXIT_VERIFY)


# ---------------------------------------------------------------------------
# verification suites


def _suite_geodesics(domain, rng, jobs):
    cases = []
    ok = True
    for _ in range(3):
        p = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        p = project_to_boundary(domain, domain.anchor + p)
        nu = unit_normal(domain, p)
        u = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
        v = nu + 0.5 * (u / np.linalg.norm(u))
        v = v / np.linalg.norm(v)
        c = hermitian_inner(v, nu)
        v = v * (abs(c) / c)  # closed-form comparison needs <v, nu_p> > 0
        if np.real(hermitian_inner(v, nu)) < 0.1:
            v = nu
        pair = solve_stationary(domain, StationaryProblem.boundary(p, v))
        cert = geodesic_certificate(pair, domain)
        entry = {"residuals": pair.residuals, "certificate": cert}
        if domain.kind == "ball":
            pref = preferred_normalize(pair, domain)
            phi, _ = ball_geodesic_maps(BoundaryDirection(p=p, v=v))
            th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
            sup = float(
                np.max(np.abs(pref.phi(np.exp(1j * th)) - np.stack([phi(q) for q in np.exp(1j * th)])))
            )
            entry["closed_form_sup"] = sup
            entry["pass"] = bool(cert["pass"] and sup < 1e-8)
        else:
            entry["pass"] = bool(cert["pass"])
        ok = ok and entry["pass"]
        cases.append(entry)
    return {"suite": "geodesics", "cases": cases, "pass": ok}


def _suite_rep(domain, rng, jobs):
    p = project_to_boundary(
        domain, domain.anchor + rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
    )
    solver = RepSolver(domain, p)
    cases = []
    ok = True
    for z in _interior_samples(domain, solver.p, rng, 5):
        w = solver.map_point(z).w
        back = solver.invert_point(w)
        err = float(np.linalg.norm(back - z))
        entry = {"roundtrip_error": err, "pass": bool(err < 1e-8)}
        ok = ok and entry["pass"]
        cases.append(entry)
    return {"suite": "rep", "cases": cases, "pass": ok}


def _suite_ma(domain, rng, jobs, samples=5):
    p = project_to_boundary(
        domain, domain.anchor + rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
    )
    solver = RepSolver(domain, p, config=SolverConfig(degree=64, tol_residual=1e-12))
    pts = _interior_samples(domain, solver.p, rng, samples)
    if domain.kind == "ball":
        tol_det, tol_psd, h, levels = 1e-8, 1e-10, 5e-2, 4
    else:
        tol_det, tol_psd, h, levels = 1e-6, 1e-4, 3e-3, 2
    report = ma_verify(
        domain, solver.p, pts, h=h, levels=levels,
        tol_det=tol_det, tol_psd=tol_psd, solver=solver,
    )
    u = rng.standard_normal(domain.n) + 1j * rng.standard_normal(domain.n)
    nu = solver.nu_p
    v = nu + 0.3 * u / np.linalg.norm(u)
    sl = slice_check(domain, solver.p, v, radii=6, angles=16, solver=solver)
    return {
        "suite": "ma",
        "hessian": report,
        "det_stats": {"max": report["det_max"], "eig_min": report["eig_min"]},
        "slice": sl,
        "pass": bool(report["pass"] and sl["pass"]),
    }


def _suite_rigidity(domain, rng, jobs, count=10):
    sc = shoikhet_counterexample()
    cases = []
    ok = bool(sc["violated"])
    for _ in range(count):
        sm = random_contact_map(rng)
        f3 = third_derivative_at_one(sm)
        rep_ = verify_bk_inequalities(sm, f3=f3)
        entry = {
            "f3_exact": sm.f3_exact,
            "f3_estimate": f3,
            "margin_i": rep_["margin_i"],
            "margin_ii": rep_["margin_ii"],
            "pass": bool(rep_["pass"] and abs(f3 - sm.f3_exact) < 1e-4),
        }
        ok = ok and entry["pass"]
        cases.append(entry)
    return {"suite": "rigidity", "counterexample": sc, "cases": cases, "pass": ok}


_SUITES = {
    "geodesics": _suite_geodesics,
    "rep": _suite_rep,
    "ma": _suite_ma,
    "rigidity": _suite_rigidity,
}


@main.command()
@click.argument("suite", type=click.Choice(sorted(_SUITES)))
@click.option("--domain", "domain_path", default=None, type=click.Path(),
              help="Domain descriptor JSON [default: the unit ball in C^2].")
@click.option("--out", default=None, type=click.Path())
@_seed_option
@_jobs_option
def verify(suite, domain_path, out, seed, jobs):
    """Run a seeded verification suite; exit 3 on any FAIL.

    Reports are byte-identical across runs with the same seed."""
    domain = _load_domain(domain_path) if domain_path else DomainSpec("ball", 2)
    rng = np.random.default_rng(seed)
    try:
        report = _SUITES[suite](domain, rng, max(1, jobs))
    except (RuntimeError, ValueError) as e:
        _fail(EXIT_SOLVER, "solver failure in suite %s: %s" % (suite, e))
    report["seed"] = seed
    _emit(report, out)
    if not report["pass"]:
        failing = [c for c in report.get("cases", []) if not c.get("pass", True)]
        click.echo("FAIL: %r" % (failing[:1] or report), err=True)
        sys.exit(EXIT_VERIFY)


if __name__ == "__main__":
    main()
