# Core numerics on the unit disc and on C^n: Hermitian/bilinear pairings,
# Poincare distance, the classical Poisson kernel, disc automorphisms,
# truncated Hardy-space maps (holomorphic maps of the disc stored as power
# series), contour integration, winding numbers, and radial limit estimation
# with Richardson extrapolation.

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "hermitian_inner",
    "bilinear_inner",
    "poincare_distance",
    "poisson_kernel",
    "parabolic_automorphism",
    "mobius_automorphism",
    "DiscAutomorphism",
    "StolzRegion",
    "HardyMap",
    "boundary_nodes",
    "cauchy_contour_integral",
    "winding_number",
    "angular_limit",
    "cauchy_derivative",
]


def hermitian_inner(z, w):
    """Standard Hermitian inner product <z,w> = sum_j z_j * conj(w_j).

    Accepts 1-D arrays of equal length; broadcasting over leading axes is
    supported (the product is taken over the last axis).
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError("dimension mismatch: %d vs %d" % (z.shape[-1], w.shape[-1]))
    return np.sum(z * np.conj(w), axis=-1)


def bilinear_inner(z, w):
    """Bilinear pairing sum_j z_j * w_j (no conjugation).

    This is the pairing in which the dual-map normalization
    <phi', conj(phi*)> = sum_j phi'_j phi*_j = 1 is holomorphic in zeta.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError("dimension mismatch: %d vs %d" % (z.shape[-1], w.shape[-1]))
    return np.sum(z * w, axis=-1)


def poincare_distance(zeta1, zeta2):
    """Poincare distance on the unit disc: arctanh |(z1-z2)/(1-z1*conj(z2))|."""
    zeta1 = complex(zeta1)
    zeta2 = complex(zeta2)
    if abs(zeta1) >= 1.0 or abs(zeta2) >= 1.0:
        raise ValueError("arguments must lie in the open unit disc")
    m = abs((zeta1 - zeta2) / (1.0 - zeta1 * np.conj(zeta2)))
    return float(np.arctanh(m))


def poisson_kernel(zeta):
    """Classical Poisson kernel P(zeta) = (1-|zeta|^2)/|1-zeta|^2 on the disc."""
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(zeta) >= 1.0):
        raise ValueError("argument must lie in the open unit disc")
    return (1.0 - np.abs(zeta) ** 2) / np.abs(1.0 - zeta) ** 2


@dataclass(frozen=True)
class DiscAutomorphism:
    """Holomorphic automorphism of the closed unit disc.

    kind 'parabolic': sigma_t(z) = ((1-it)z + it)/(-itz + 1 + it), fixing 1
    with sigma_t'(1) = 1; one-parameter group sigma_s o sigma_t = sigma_{s+t}.
    kind 'mobius': m_a(z) = (z - a)/(1 - conj(a) z) for a in the open disc.
    """

    kind: str
    param: complex

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if self.kind == "parabolic":
            t = float(np.real(self.param))
            return ((1 - 1j * t) * zeta + 1j * t) / (-1j * t * zeta + 1 + 1j * t)
        a = complex(self.param)
        return (zeta - a) / (1 - np.conj(a) * zeta)

    def deriv(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if self.kind == "parabolic":
            t = float(np.real(self.param))
            den = -1j * t * zeta + 1 + 1j * t
            # d/dz of a Mobius (az+b)/(cz+d) is (ad-bc)/(cz+d)^2
            return ((1 - 1j * t) * (1 + 1j * t) - 1j * t * (-1j * t)) / den**2
        a = complex(self.param)
        den = 1 - np.conj(a) * zeta
        return (1 - abs(a) ** 2) / den**2

    def inverse(self):
        if self.kind == "parabolic":
            return DiscAutomorphism("parabolic", -float(np.real(self.param)))
        a = complex(self.param)
        # inverse of z -> (z-a)/(1-conj(a)z) is z -> (z+a)/(1+conj(a)z)
        return _MobiusInverse(a)


class _MobiusInverse(DiscAutomorphism):
    """Inverse of the normalized Mobius map; kept as a concrete evaluator."""

    def __init__(self, a):
        object.__setattr__(self, "kind", "mobius-inverse")
        object.__setattr__(self, "param", complex(a))

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        a = complex(self.param)
        return (zeta + a) / (1 + np.conj(a) * zeta)

    def deriv(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        a = complex(self.param)
        return (1 - abs(a) ** 2) / (1 + np.conj(a) * zeta) ** 2

    def inverse(self):
        return DiscAutomorphism("mobius", self.param)


def parabolic_automorphism(t):
    """The parabolic automorphism sigma_t of the disc fixing 1."""
    return DiscAutomorphism("parabolic", float(t))


def mobius_automorphism(a):
    """The normalized Mobius automorphism z -> (z-a)/(1-conj(a)z)."""
    a = complex(a)
    if abs(a) >= 1.0:
        raise ValueError("Mobius parameter must lie in the open unit disc")
    return DiscAutomorphism("mobius", a)


@dataclass(frozen=True)
class StolzRegion:
    """Stolz (non-tangential) approach region at 1: |z-1| < beta (1-|z|)."""

    beta: float

    def __post_init__(self):
        if self.beta <= 1.0:
            raise ValueError("aperture beta must exceed 1")

    def contains(self, zeta):
        zeta = complex(zeta)
        return abs(zeta - 1.0) < self.beta * (1.0 - abs(zeta))


def boundary_nodes(M):
    """M equispaced nodes exp(2 pi i j / M) on the unit circle."""
    theta = 2.0 * np.pi * np.arange(M) / M
    return np.exp(1j * theta)


class HardyMap:
    """A holomorphic map of the closed unit disc into C^n stored as a
    truncated power series: coordinate j is sum_k coeffs[j, k] zeta^k.

    coeffs has shape (n, N+1).  Evaluation, differentiation, boundary
    sampling and discrete Fourier inversion are exact for degree <= N data.
    """

    def __init__(self, coeffs):
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        if coeffs.ndim != 2 or coeffs.shape[1] < 1:
            raise ValueError("coeffs must have shape (n, N+1)")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        self.coeffs = coeffs

    @property
    def dim(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    def __call__(self, zeta):
        """Evaluate at zeta (scalar or array); returns shape zeta.shape + (n,)."""
        zeta = np.asarray(zeta, dtype=complex)
        scalar = zeta.ndim == 0
        z = np.atleast_1d(zeta)
        # Horner evaluation over the coefficient axis.
        out = np.zeros(z.shape + (self.dim,), dtype=complex)
        for k in range(self.degree, -1, -1):
            out = out * z[..., None] + self.coeffs[:, k]
        return out[0] if scalar else out

    def deriv(self, order=1):
        """Exact term-wise derivative of the given order, as a HardyMap."""
        c = self.coeffs
        for _ in range(order):
            if c.shape[1] == 1:
                c = np.zeros((c.shape[0], 1), dtype=complex)
                break
            k = np.arange(1, c.shape[1])
            c = c[:, 1:] * k
        return HardyMap(c)

    def boundary_samples(self, M=None):
        """Values at M equispaced boundary nodes (default 4N, at least 2N+2)."""
        if M is None:
            M = max(4 * self.degree, 2 * self.degree + 2, 8)
        return self(boundary_nodes(M))

    @classmethod
    def from_boundary_samples(cls, samples, degree=None, tol=1e-9):
        """Recover a HardyMap from equispaced boundary samples by FFT.

        samples: array (M, n).  Keeps Fourier modes 0..degree (default M//2-1)
        and reports nothing; negative-mode energy above tol raises, since the
        data then fails to be holomorphic at the stated resolution.
        """
        samples = np.atleast_2d(np.asarray(samples, dtype=complex))
        M = samples.shape[0]
        if degree is None:
            degree = M // 2 - 1
        modes = np.fft.fft(samples, axis=0) / M  # mode k at index k, negatives at end
        neg = modes[M // 2 + 1:]
        scale = max(np.max(np.abs(modes)), 1e-300)
        neg_energy = np.max(np.abs(neg)) / scale if neg.size else 0.0
        if neg_energy > tol:
            raise ValueError(
                "boundary samples carry negative Fourier modes "
                "(relative energy %.3e): not holomorphic data" % neg_energy
            )
        return cls(modes[: degree + 1].T)

    @staticmethod
    def negative_mode_energy(samples):
        """Max modulus of negative Fourier modes of equispaced boundary samples,
        relative to the largest mode."""
        samples = np.atleast_2d(np.asarray(samples, dtype=complex))
        M = samples.shape[0]
        modes = np.fft.fft(samples, axis=0) / M
        neg = modes[M // 2 + 1:]
        scale = max(np.max(np.abs(modes)), 1e-300)
        return float(np.max(np.abs(neg)) / scale) if neg.size else 0.0

    def compose_boundary(self, inner, M=None):
        """HardyMap of self o inner where inner maps the closed disc onto
        itself (e.g. a DiscAutomorphism): sample on the boundary, re-project."""
        if M is None:
            M = max(8 * (self.degree + 1), 64)
        nodes = boundary_nodes(M)
        vals = self(inner(nodes))
        return HardyMap.from_boundary_samples(vals, tol=1e-6)

    def to_json(self):
        return {
            "dim": self.dim,
            "degree": self.degree,
            "coeffs": [
                [[float(c.real), float(c.imag)] for c in row] for row in self.coeffs
            ],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        coeffs = np.array(
            [[complex(re, im) for re, im in row] for row in obj["coeffs"]],
            dtype=complex,
        )
        hm = cls(coeffs)
        if hm.dim != obj["dim"] or hm.degree != obj["degree"]:
            raise ValueError("inconsistent HardyMap JSON header")
        return hm


def cauchy_contour_integral(values_at_nodes):
    """(1/2 pi i) * contour integral over the unit circle of a function given
    by its values at M equispaced nodes, by the (spectrally accurate)
    trapezoid rule: (1/M) sum_j f(zeta_j) zeta_j."""
    vals = np.asarray(values_at_nodes, dtype=complex)
    M = vals.shape[0]
    nodes = boundary_nodes(M)
    return np.sum(vals * nodes) / M


def winding_number(samples, tol=1e-12):
    """Winding number about 0 of a closed loop of complex samples."""
    samples = np.asarray(samples, dtype=complex)
    if np.any(np.abs(samples) < tol):
        raise ValueError("loop passes within tolerance of 0: winding undefined")
    ratios = np.roll(samples, -1) / samples
    total = np.sum(np.angle(ratios))
    w = total / (2.0 * np.pi)
    wi = int(np.rint(w))
    if abs(w - wi) > 0.25:
        raise ValueError("winding number not close to an integer: %.3f" % w)
    return wi


def cauchy_derivative(h, center, order, radius, nodes=64):
    """d-th derivative of a holomorphic function at `center` via the Cauchy
    integral on a circle of the given radius (trapezoid rule)."""
    zeta = center + radius * boundary_nodes(nodes)
    vals = np.asarray([complex(h(z)) for z in zeta])
    mo = np.exp(-2j * np.pi * order * np.arange(nodes) / nodes)
    coeff = np.sum(vals * mo) / nodes / radius**order
    return coeff * math.factorial(order)


def _richardson(xs, ys):
    """Neville polynomial extrapolation of (x, y) data to x = 0.

    Returns (limit, error_estimate): the tableau entry with the smallest
    running correction and that correction's magnitude.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=complex)
    n = len(xs)
    tab = ys.copy()
    best = tab[-1]
    best_err = np.inf
    for m in range(1, n):
        new = np.empty(n - m, dtype=complex)
        for i in range(n - m):
            new[i] = (xs[i] * tab[i + 1] - xs[i + m] * tab[i]) / (xs[i] - xs[i + m])
        err = abs(new[-1] - tab[-1])
        tab = new
        if err < best_err:
            best_err = err
            best = new[-1]
    return best, float(best_err)


def angular_limit(h, order=0, k_range=range(3, 13), return_error=False):
    """Estimate the non-tangential limit at 1 of the order-th derivative of h
    along the radius [0, 1).

    h may be a HardyMap (derivatives taken exactly term-wise) or any callable
    holomorphic on the disc (derivatives via Cauchy integrals on small
    circles).  Values at radii r_k = 1 - 2^{-k} are Richardson-extrapolated
    (polynomial extrapolation in 1 - r).  Raises if the sequence diverges.
    """
    ks = list(k_range)
    xs = [2.0 ** (-k) for k in ks]
    if isinstance(h, HardyMap):
        d = h.deriv(order) if order else h
        ys = []
        for x in xs:
            v = d(1.0 - x)
            ys.append(complex(v[0]) if np.ndim(v) else complex(v))
    else:
        ys = []
        for x in xs:
            r = 1.0 - x
            if order == 0:
                ys.append(complex(h(r)))
            else:
                rad = x / 2.0
                ys.append(complex(cauchy_derivative(h, r, order, rad)))
    ys = np.asarray(ys)
    if not np.all(np.isfinite(ys)):
        raise ValueError("function not evaluable along the radius")
    spread = np.max(np.abs(np.diff(ys[-4:])))
    scale = max(np.max(np.abs(ys)), 1.0)
    limit, err = _richardson(xs, ys)
    if err > 1e-2 * scale and spread > 1e-2 * scale:
        raise ValueError(
            "radial sequence does not converge (error estimate %.3e)" % err
        )
    return (limit, err) if return_error else limit
