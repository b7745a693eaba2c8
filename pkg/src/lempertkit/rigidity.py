# Quantitative boundary rigidity for holomorphic self-maps of the disc with
# third-order contact with the identity at 1: the transformation chain
# f -> g -> phi -> psi, two independent estimates of f'''(1), verification
# of the two rigidity inequalities on disc grids, generation of admissible
# test functions by inverting the chain, and the published counterexample to
# the earlier (incorrect) form of the inequality.

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from lempertkit.core import HardyMap, angular_limit, boundary_nodes

__all__ = [
    "SelfMap",
    "ChainBundle",
    "chain_transform",
    "inverse_chain",
    "third_derivative_at_one",
    "verify_bk_inequalities",
    "shoikhet_counterexample",
    "random_contact_map",
]


class SelfMap:
    """A holomorphic self-map of the unit disc, given as a HardyMap or any
    callable; optionally flagged as having third-order contact with the
    identity at 1 (f(zeta) = zeta + O(|zeta - 1|^3))."""

    def __init__(self, f, contact_at_one=True, check_grid=24):
        self.fun = f
        self.contact_at_one = bool(contact_at_one)
        if check_grid:
            rr = np.linspace(0.1, 0.999, check_grid)
            th = np.linspace(0.0, 2 * np.pi, check_grid, endpoint=False)
            zz = (rr[:, None] * np.exp(1j * th)[None, :]).ravel()
            vals = self(zz)
            if np.max(np.abs(vals)) > 1.0 + 1e-12:
                raise ValueError(
                    "not a self-map of the disc: max sampled |f| = %.15f"
                    % float(np.max(np.abs(vals)))
                )

    def __call__(self, zeta):
        if isinstance(self.fun, HardyMap):
            out = self.fun(zeta)
            return out[..., 0]
        zeta = np.asarray(zeta, dtype=complex)
        if zeta.ndim == 0:
            return complex(self.fun(complex(zeta)))
        return np.array([self.fun(complex(z)) for z in zeta.ravel()]).reshape(zeta.shape)


@dataclass
class ChainBundle:
    """Evaluators derived from f: g maps into the closed right half-plane,
    phi(zeta) = (f(zeta) - zeta)/(zeta - 1)^2 = g/((1 - zeta) g + 2) has
    nonnegative real part, and psi = (1 - phi)/(1 + phi) is a self-map with
    1 - |psi|^2 = 4 Re phi / |1 + phi|^2."""

    f: SelfMap
    g: object
    phi: object
    psi: object


def chain_transform(f, check_grid=32):
    """Build the g / phi / psi evaluators from a self-map f and verify
    Re g >= 0 and |psi| <= 1 on a sampling grid."""
    if not isinstance(f, SelfMap):
        f = SelfMap(f)

    def g(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        fv = f(zeta)
        if np.any(np.abs(1.0 - fv) < 1e-14):
            raise ValueError("f(zeta) = 1 at an interior sample")
        return (1.0 + fv) / (1.0 - fv) - (1.0 + zeta) / (1.0 - zeta)

    def phi(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return (f(zeta) - zeta) / (zeta - 1.0) ** 2

    def psi(zeta):
        ph = phi(zeta)
        return (1.0 - ph) / (1.0 + ph)

    if check_grid:
        rr = np.linspace(0.1, 0.99, check_grid)
        th = np.linspace(0.05, 2 * np.pi - 0.05, check_grid)
        zz = (rr[:, None] * np.exp(1j * th)[None, :]).ravel()
        gv = g(zz)
        if np.min(gv.real) < -1e-9:
            raise ValueError("Re g < 0 on the grid: hypothesis violated")
        if np.max(np.abs(psi(zz))) > 1.0 + 1e-9:
            raise ValueError("|psi| > 1 on the grid: hypothesis violated")
    return ChainBundle(f=f, g=g, phi=phi, psi=psi)


def inverse_chain(psi):
    """Reverse the chain: from a self-map psi of the disc produce f with
    (f - zeta)/(zeta - 1)^2 = (1 - psi)/(1 + psi).  Not every self-map psi
    arises from the chain: the result is a self-map exactly when
    g = 2 phi / (1 - (1 - zeta) phi) has nonnegative real part, which the
    SelfMap constructor validates on a sampling grid."""

    def f(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        ps = np.asarray(psi(zeta), dtype=complex)
        ph = (1.0 - ps) / (1.0 + ps)
        gg = 2.0 * ph / (1.0 - (1.0 - zeta) * ph)
        # f = (G - 1)/(G + 1) with G = gg + (1 + zeta)/(1 - zeta); multiply
        # through by (1 - zeta) so the fixed point zeta = 1 is not a pole
        q = (1.0 - zeta) * gg
        return (q + 2.0 * zeta) / (q + 2.0)

    return SelfMap(f)


def _hardy_project(f, degree=256, tol=1e-10):
    """Attempt a boundary-sampled polynomial model of f; return it only if
    it reproduces f at interior test points to tol."""
    M = 4 * degree
    nodes = boundary_nodes(M)
    try:
        vals = f(nodes)
    except Exception:
        return None
    if not np.all(np.isfinite(vals)):
        return None
    modes = np.fft.fft(vals) / M
    # termwise derivatives of the model are only trustworthy near the
    # boundary when the coefficient tail has decayed to rounding level
    if np.max(np.abs(modes[3 * degree // 4 : degree + 1])) > tol:
        return None
    hm = HardyMap(modes[: degree + 1][None, :])
    rng = np.random.default_rng(3)
    test = rng.uniform(0.2, 0.9, 8) * np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
    err = max(abs(complex(hm(z)[0]) - complex(f(z))) for z in test)
    return hm if err < tol else None


def third_derivative_at_one(f, tol_agree=1e-4):
    """Estimate f'''(1) two independent ways: the radial limit of the exact
    third derivative of a validated polynomial model of f (falling back to
    Cauchy-integral derivatives), and -3 times the angular derivative of
    psi at 1.  The estimates must agree; the combined value is returned.

    For maps with third-order contact at 1 this is a nonpositive real."""
    if not isinstance(f, SelfMap):
        f = SelfMap(f)
    hm = _hardy_project(f)
    if hm is not None:
        est_a, err_a = angular_limit(hm, order=3, return_error=True)
    else:
        est_a, err_a = angular_limit(f, order=3, k_range=range(2, 9), return_error=True)
    bundle = chain_transform(f, check_grid=0)

    def quotient(r):
        # (1 - psi(r))/(1 - r) -> psi'(1) (angular derivative; psi(1) = 1)
        return (1.0 - complex(bundle.psi(r))) / (1.0 - r)

    # psi comes from phi = (f - zeta)/(zeta - 1)^2, a ratio of O(eps)
    # rounding to O((1-r)^3); keep 1 - r large enough that the cancellation
    # noise eps/(1-r)^3 stays below the extrapolation accuracy
    est_b_raw, err_b = angular_limit(
        quotient, order=0, k_range=range(2, 8), return_error=True
    )
    est_b = -3.0 * est_b_raw
    if abs(est_a - est_b) > max(tol_agree, 10 * (err_a + 3 * err_b)):
        raise ValueError(
            "third-derivative estimates disagree: %r vs %r (hypothesis violated?)"
            % (est_a, est_b)
        )
    combined = est_b if err_b * 3 < err_a else est_a
    return float(np.real(combined))


def verify_bk_inequalities(f, radii=64, angles=256, exclusion=1e-3, f3=None):
    """Margins of the two rigidity inequalities on a polar grid (excluding a
    small neighborhood of the fixed point 1):

    (i)  Re((f(zeta) - zeta)/(zeta - 1)^2) >= 0;
    (ii) |f(zeta) - zeta|^2 <=
         -(1/3) f'''(1) |1 - zeta|^6 / (1 - |zeta|^2) *
         Re((f(zeta) - zeta)/(zeta - 1)^2).

    Returns worst margins (nonnegative means the inequality holds)."""
    if not isinstance(f, SelfMap):
        f = SelfMap(f)
    bundle = chain_transform(f, check_grid=0)
    if f3 is None:
        f3 = third_derivative_at_one(f)
    rr = np.linspace(0.02, 0.995, radii)
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    zz = (rr[:, None] * np.exp(1j * th)[None, :]).ravel()
    zz = zz[np.abs(zz - 1.0) >= exclusion]
    fv = f(zz)
    ph = (fv - zz) / (zz - 1.0) ** 2
    margin_i = float(np.min(ph.real))
    lhs = np.abs(fv - zz) ** 2
    rhs = (
        (-f3 / 3.0)
        * np.abs(1.0 - zz) ** 6
        / (1.0 - np.abs(zz) ** 2)
        * ph.real
    )
    margin_ii = float(np.min(rhs - lhs))
    return {
        "margin_i": margin_i,
        "margin_ii": margin_ii,
        "f3": float(f3),
        "pass": bool(margin_i >= -1e-10 and margin_ii >= -1e-8),
    }


def shoikhet_counterexample():
    """Evaluate both sides of the earlier, incorrect inequality
    |f - zeta|^2 <= -(1/6) f'''(1) Re((f - zeta)(1 - conj(zeta))^2)/(1 - |zeta|^2)
    at zeta = -1/3 for f(zeta) = (10 zeta + (1 - zeta)^2)/(10 + (1 - zeta)^2),
    in exact rational arithmetic.  The left side exceeds the right side."""
    zeta = Fraction(-1, 3)
    one_minus = 1 - zeta  # 4/3
    denom = 10 + one_minus**2
    f_val = (10 * zeta + one_minus**2) / denom
    diff = f_val - zeta  # = (1-zeta)^3 / (10 + (1-zeta)^2), real here
    assert diff == one_minus**3 / denom
    f3 = Fraction(-3, 5)
    lhs = diff**2
    rhs = -Fraction(1, 6) * f3 * (diff * one_minus**2) / (1 - zeta**2)
    return {
        "zeta": float(zeta),
        "lhs": float(lhs),
        "rhs": float(rhs),
        "lhs_exact": (lhs.numerator, lhs.denominator),
        "rhs_exact": (rhs.numerator, rhs.denominator),
        "f3": float(f3),
        "violated": bool(lhs > rhs),
    }


def random_contact_map(rng):
    """A random self-map with third-order contact at 1, built by inverting
    the chain from a random g: a positive combination of boundary Herglotz
    kernels with singularities away from 1, plus the imaginary constant that
    makes g(1) = 0 (the kernels are purely imaginary at 1).  Then
    f = (G - 1)/(G + 1) with G = g + (1 + zeta)/(1 - zeta) is a self-map by
    construction, and f'''(1) = 3 g'(1) = -3 sum_k a_k / (2 sin^2(theta_k/2))
    exactly (stored as the attribute f3_exact)."""
    m = int(rng.integers(1, 4))
    thetas = rng.uniform(0.5, 2 * np.pi - 0.5, m)
    amps = rng.uniform(0.1, 1.0, m)
    # each kernel has value -i cot(theta/2) at zeta = 1; cancel the sum
    c = float(np.sum(amps / np.tan(thetas / 2.0)))

    def g(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        val = 1j * c * np.ones_like(zeta)
        for ak, th in zip(amps, thetas):
            e = np.exp(-1j * th)
            val = val + ak * (1.0 + e * zeta) / (1.0 - e * zeta)
        return val

    def f(zeta):
        # (G - 1)/(G + 1) with G = g + (1 + zeta)/(1 - zeta), cleared of the
        # pole at zeta = 1 so boundary sampling stays finite
        zeta = np.asarray(zeta, dtype=complex)
        q = (1.0 - zeta) * g(zeta)
        return (q + 2.0 * zeta) / (q + 2.0)

    sm = SelfMap(f)
    sm.f3_exact = -3.0 * float(np.sum(amps / (2.0 * np.sin(thetas / 2.0) ** 2)))
    return sm
