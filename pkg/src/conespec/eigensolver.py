"""Eigenvalues of singular radial problems with controlled accuracy at x = 0.

Pipeline: lumped finite elements on a graded mesh give first estimates via
Sturm-sequence bisection (LAPACK), then every eigenvalue is refined by a
Pruefer-angle shooting pass (RK4 on the angle equation, index-targeted
bisection in lambda^2) down to the reported residual.

The singular end is handled by an indicial Robin condition u'/u = sigma_w/x
at the mesh edge for inverse-square-type potentials, and by a WKB wall for
potentials blowing up faster than x^-2 (the mesh is truncated where the
potential crosses a large barrier value; the induced error is exponentially
small in the barrier height).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .power import PowerFunction
from .sl import (
    EndBehavior,
    SchrodingerProblem,
    SLProblem,
    liouville_transform,
    selected_sigma,
    selected_sigma_weighted,
)

try:  # optional JIT for the shooting sweep; pure-python fallback below
    import numba as _numba
except Exception:  # pragma: no cover
    _numba = None


@dataclass(frozen=True)
class MeshSpec:
    """Graded mesh x_i = x_lo + (x_max - x_lo) (i/N)^gamma."""

    n: int = 4000
    gamma: float = 2.0
    x_min_factor: float = 1e-6   # x_min = factor * x_max
    substeps: int = 1            # shooting substeps per FD cell
    wall: float = 1e7            # WKB truncation barrier for steep potentials

    def x_min(self, x_max: float) -> float:
        return self.x_min_factor * x_max


DEFAULT_MESH = MeshSpec()


@dataclass(frozen=True)
class EigenvalueEntry:
    lambda_sq: float
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class MeshReport:
    n: int
    gamma: float
    x_min: float


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    mesh_report: MeshReport

    def lambda_sq_list(self, expand_multiplicity: bool = False) -> list:
        out = []
        for e in self.eigenvalues:
            out.extend([e.lambda_sq] * (e.multiplicity if expand_multiplicity else 1))
        return out


@dataclass(frozen=True)
class Eigenfunction:
    xs: np.ndarray
    values: np.ndarray
    eigenvalue: float
    normalization: float  # integral of u^2 * weight dx (trapezoid), ~1


# ---------------------------------------------------------------------------
# internal uniform representation
# ---------------------------------------------------------------------------


@dataclass
class _Radial:
    """-(1/w)(p u')' + V u = lam^2 u with p = w = x^b on (x_lo, x_max]."""

    b: float                      # weight exponent
    potential: PowerFunction
    x_max: float
    gamma1: float                 # right condition gamma1 u + gamma2 u' = 0
    gamma2: float
    sigma_w: Optional[float]      # branch exponent at 0 in this frame
    wkb_left: bool                # steep potential: WKB wall at the left edge


def _from_schrodinger(sp: SchrodingerProblem) -> _Radial:
    steep = sp.potential.min_exponent() < -2
    return _Radial(
        b=0.0,
        potential=sp.potential,
        x_max=sp.x_max,
        gamma1=sp.bc.at_one.gamma1,
        gamma2=sp.bc.at_one.gamma2,
        sigma_w=None if steep else selected_sigma(sp),
        wkb_left=steep,
    )


def _from_weighted(p: SLProblem) -> _Radial:
    conj = liouville_transform(p)
    steep = conj.potential.min_exponent() < -2
    return _Radial(
        b=float(p.weight_exponent),
        potential=p.potential,
        x_max=p.x_max,
        gamma1=p.bc.at_one.gamma1,
        gamma2=p.bc.at_one.gamma2,
        sigma_w=None if steep else selected_sigma_weighted(p),
        wkb_left=steep,
    )


def _left_edge(r: _Radial, mesh: MeshSpec) -> float:
    """Mesh start: x_min, raised to the WKB wall for steep potentials."""
    x_min = mesh.x_min(r.x_max)
    if not r.wkb_left:
        return x_min
    v = r.potential
    if v(x_min) < mesh.wall:
        return x_min
    xs = np.geomspace(x_min, 0.5 * r.x_max, 4096)
    vals = v(xs)
    below = np.nonzero(vals < mesh.wall)[0]
    if len(below) == 0:
        raise ValueError("potential exceeds the WKB wall on the whole interval")
    return float(xs[max(below[0] - 1, 0)])


def _grid(r: _Radial, mesh: MeshSpec) -> np.ndarray:
    x_lo = _left_edge(r, mesh)
    i = np.arange(mesh.n + 1, dtype=float)
    return x_lo + (r.x_max - x_lo) * (i / mesh.n) ** mesh.gamma


def _left_rho(r: _Radial, x_lo: float, lam2: float = 0.0) -> float:
    """u'/u at the left mesh edge for the selected branch."""
    if r.wkb_left:
        v0 = r.potential(x_lo)
        return math.sqrt(max(v0 - lam2, v0 * 1e-9))
    return r.sigma_w / x_lo


# ---------------------------------------------------------------------------
# finite-difference stage
# ---------------------------------------------------------------------------


def _fd_estimates(r: _Radial, x: np.ndarray, n_eigen: int) -> np.ndarray:
    n = len(x) - 1
    h = np.diff(x)
    xm = 0.5 * (x[:-1] + x[1:])
    p_half = xm ** r.b
    w_node = x ** r.b
    quad = np.empty(n + 1)
    quad[0] = h[0] / 2
    quad[-1] = h[-1] / 2
    quad[1:-1] = (h[:-1] + h[1:]) / 2

    diag = np.zeros(n + 1)
    off = -p_half / h
    diag[:-1] += p_half / h
    diag[1:] += p_half / h
    diag += r.potential(x) * w_node * quad
    mass = w_node * quad

    diag[0] += _left_rho(r, x[0]) * (x[0] ** r.b)

    if r.gamma2 == 0.0:  # Dirichlet at x_max: drop the last node
        d, o, m = diag[:-1], off[:-1], mass[:-1]
    else:
        diag[-1] += (r.gamma1 / r.gamma2) * (r.x_max ** r.b)
        d, o, m = diag, off, mass

    d = d / m
    o = o / np.sqrt(m[:-1] * m[1:])
    k = min(n_eigen, len(d) - 1)
    vals = eigh_tridiagonal(
        d, o, select="i", select_range=(0, k - 1), eigvals_only=True
    )
    return np.asarray(vals, dtype=float)


# ---------------------------------------------------------------------------
# Pruefer shooting stage
# ---------------------------------------------------------------------------


def _sweep_py(theta0, lam2, xs, ip, wq, qq):
    """RK4 on theta' = (1/p) cos^2 + (lam2 w - q) sin^2 over the mesh.

    ip/wq/qq hold 1/p, w, q = w V at [node_i, midpoint_i, node_{i+1}] packed
    as arrays of shape (ncell, 3).  Returns end angles per lambda^2.
    """
    nlam = lam2.shape[0]
    ncell = xs.shape[0] - 1
    out = np.empty(nlam)
    for j in range(nlam):
        th = theta0[j]
        l2 = lam2[j]
        for i in range(ncell):
            h = xs[i + 1] - xs[i]
            s = math.sin(th)
            c = math.cos(th)
            k1 = ip[i, 0] * c * c + (l2 * wq[i, 0] - qq[i, 0]) * s * s
            t2 = th + 0.5 * h * k1
            s = math.sin(t2)
            c = math.cos(t2)
            k2 = ip[i, 1] * c * c + (l2 * wq[i, 1] - qq[i, 1]) * s * s
            t3 = th + 0.5 * h * k2
            s = math.sin(t3)
            c = math.cos(t3)
            k3 = ip[i, 1] * c * c + (l2 * wq[i, 1] - qq[i, 1]) * s * s
            t4 = th + h * k3
            s = math.sin(t4)
            c = math.cos(t4)
            k4 = ip[i, 2] * c * c + (l2 * wq[i, 2] - qq[i, 2]) * s * s
            th += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[j] = th
    return out


if _numba is not None:
    _sweep = _numba.njit(cache=True, fastmath=False)(_sweep_py)
else:  # pragma: no cover
    _sweep = _sweep_py


class _Shooter:
    def __init__(self, r: _Radial, x: np.ndarray, substeps: int):
        if substeps > 1:
            fine = [x[0]]
            for a, b in zip(x[:-1], x[1:]):
                for s in range(1, substeps + 1):
                    fine.append(a + (b - a) * s / substeps)
            x = np.asarray(fine)
        self.r = r
        self.x = x
        xm = 0.5 * (x[:-1] + x[1:])
        v = r.potential

        def pack(f):
            return np.stack([f(x[:-1]), f(xm), f(x[1:])], axis=1)

        self.ip = pack(lambda t: t ** (-r.b))
        self.wq = pack(lambda t: t ** r.b)
        self.qq = pack(lambda t: v(t) * t ** r.b)
        # right-end target angle in (0, pi]
        p_end = r.x_max ** r.b
        t = math.atan2(-r.gamma2, r.gamma1 * p_end)
        while t <= 1e-14:
            t += math.pi
        while t > math.pi + 1e-14:
            t -= math.pi
        self.theta_b = t

    def theta0(self, lam2: np.ndarray) -> np.ndarray:
        r = self.r
        x0 = self.x[0]
        if r.wkb_left:
            v0 = r.potential(x0)
            rho = np.sqrt(np.maximum(v0 - lam2, v0 * 1e-9))
            return np.arctan2(1.0, (x0 ** r.b) * rho)
        a = math.atan2(x0 ** (1.0 - r.b), r.sigma_w)
        return np.full(len(lam2), a)

    def miss(self, lam2: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """theta(x_max) - (theta_b + k pi); increasing in lambda^2."""
        end = _sweep(self.theta0(lam2), lam2, self.x, self.ip, self.wq, self.qq)
        return end - (self.theta_b + indices * math.pi)


def _refine(
    r: _Radial, x: np.ndarray, estimates: np.ndarray, mesh: MeshSpec
) -> tuple:
    shooter = _Shooter(r, x, mesh.substeps)
    n = len(estimates)
    idx = np.arange(n, dtype=float)

    gaps = np.diff(estimates)
    span = gaps.mean() if len(gaps) else max(1.0, abs(estimates[0]))
    lo = np.empty(n)
    hi = np.empty(n)
    for k in range(n):
        down = 0.5 * gaps[k - 1] if k > 0 else max(0.5 * span, 0.05 * (1 + abs(estimates[k])))
        up = 0.5 * gaps[k] if k < n - 1 else max(0.5 * span, 0.05 * (1 + abs(estimates[k])))
        lo[k] = estimates[k] - down
        hi[k] = estimates[k] + up

    # widen until each bracket straddles its index target
    for _ in range(60):
        mlo = shooter.miss(lo, idx)
        bad = mlo >= 0
        if not bad.any():
            break
        lo[bad] -= np.maximum(hi[bad] - lo[bad], 0.5)
    else:
        raise RuntimeError("could not bracket eigenvalues from below")
    for _ in range(60):
        mhi = shooter.miss(hi, idx)
        bad = mhi <= 0
        if not bad.any():
            break
        hi[bad] += np.maximum(hi[bad] - lo[bad], 0.5)
    else:
        raise RuntimeError("could not bracket eigenvalues from above")

    for _ in range(64):
        mid = 0.5 * (lo + hi)
        m = shooter.miss(mid, idx)
        neg = m < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        width = np.max((hi - lo) / (1.0 + np.abs(mid)))
        if width < 1e-13:
            break

    lam2 = 0.5 * (lo + hi)
    residual = np.maximum(0.5 * (hi - lo), 1e-8 * (1.0 + np.abs(lam2)))
    return lam2, residual


def _merge(lam2: np.ndarray, residual: np.ndarray) -> tuple:
    entries = []
    for v, res in sorted(zip(lam2, residual)):
        if entries and abs(v - entries[-1][0]) <= 1e-7 * (1 + abs(v)):
            prev_v, prev_m, prev_r = entries[-1]
            entries[-1] = (prev_v, prev_m + 1, max(prev_r, res))
        else:
            entries.append((v, 1, res))
    return tuple(EigenvalueEntry(v, m, r) for v, m, r in entries)


def _solve(r: _Radial, n_eigen: int, mesh: MeshSpec) -> Spectrum:
    if n_eigen < 1:
        raise ValueError("n_eigen must be >= 1")
    if mesh.n < 16 * n_eigen:
        raise ValueError(f"mesh too coarse: need N >= {16 * n_eigen}")
    x = _grid(r, mesh)
    estimates = _fd_estimates(r, x, n_eigen)
    if len(estimates) < n_eigen:
        raise ValueError("discretization cannot resolve the requested count")
    lam2, res = _refine(r, x, estimates, mesh)
    if r.wkb_left and max(lam2) > mesh.wall / 50.0:
        raise ValueError("WKB wall too low for the requested eigenvalue range")
    return Spectrum(
        eigenvalues=_merge(lam2, res),
        mesh_report=MeshReport(n=mesh.n, gamma=mesh.gamma, x_min=float(x[0])),
    )


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def eigenvalues(
    sp: SchrodingerProblem, n_eigen: int, mesh: MeshSpec = DEFAULT_MESH
) -> Spectrum:
    """First n eigenvalues of the conjugated (Schrodinger form) problem."""
    return _solve(_from_schrodinger(sp), n_eigen, mesh)


def eigenvalues_weighted(
    p: SLProblem, n_eigen: int, mesh: MeshSpec = DEFAULT_MESH
) -> Spectrum:
    """First n eigenvalues of the weighted problem -(1/F)(F u')' + V."""
    return _solve(_from_weighted(p), n_eigen, mesh)


def eigenfunction_weighted(
    p: SLProblem, lambda_sq: float, mesh: MeshSpec = DEFAULT_MESH
) -> Eigenfunction:
    """Integrate (u, F u') at a converged eigenvalue and L^2(F dx)-normalize."""
    r = _from_weighted(p)
    x = _grid(r, mesh)
    u = np.empty(len(x))
    up = np.empty(len(x))  # p u'
    x0 = x[0]
    rho = _left_rho(r, x0, lambda_sq)
    u[0] = x0 ** (r.sigma_w if not r.wkb_left else 0.0) if not r.wkb_left else 1.0
    up[0] = (x0 ** r.b) * rho * u[0]
    v = r.potential
    for i in range(len(x) - 1):
        h = x[i + 1] - x[i]
        y = np.array([u[i], up[i]])

        def rhs(t, yy):
            return np.array(
                [yy[1] * t ** (-r.b), (v(t) - lambda_sq) * (t ** r.b) * yy[0]]
            )

        k1 = rhs(x[i], y)
        k2 = rhs(x[i] + h / 2, y + h / 2 * k1)
        k3 = rhs(x[i] + h / 2, y + h / 2 * k2)
        k4 = rhs(x[i] + h, y + h * k3)
        ynew = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        u[i + 1], up[i + 1] = ynew
        scale = max(abs(u[i + 1]), abs(up[i + 1]))
        if scale > 1e100:  # rescale to dodge overflow; direction is what counts
            u[: i + 2] /= scale
            up[: i + 2] /= scale
    norm_sq = np.trapezoid(u * u * x ** r.b, x)
    u = u / math.sqrt(norm_sq)
    return Eigenfunction(
        xs=x,
        values=u,
        eigenvalue=lambda_sq,
        normalization=float(np.trapezoid(u * u * x ** r.b, x)),
    )


# ---------------------------------------------------------------------------
# Bessel zero oracle (series + bisection in fixed-point integer arithmetic)
# ---------------------------------------------------------------------------

_SCALE_DIGITS = 50
_SCALE = 10 ** _SCALE_DIGITS


def _fx(x: float) -> int:
    return round(x * _SCALE)


def _fx_sin_cos(xf: int) -> tuple:
    """Fixed-point sin and cos by Taylor series (exact integer arithmetic)."""
    x2 = (xf * xf) // _SCALE
    s, term, k = xf, xf, 0
    while abs(term) > 0:
        term = -(term * x2) // (_SCALE * (2 * k + 2) * (2 * k + 3))
        s += term
        k += 1
        if k > 400:
            break
    c, term, k = _SCALE, _SCALE, 0
    while abs(term) > 0:
        term = -(term * x2) // (_SCALE * (2 * k + 1) * (2 * k + 2))
        c += term
        k += 1
        if k > 400:
            break
    return s, c


def _bessel_sign_value(two_m: int, x: float) -> int:
    """Fixed-point value proportional to J_{two_m/2}(x) (positive prefactor)."""
    xf = _fx(x)
    if two_m % 2 == 0:
        m = two_m // 2
        quarter_x2 = (xf * xf) // (4 * _SCALE)
        term = _SCALE
        for i in range(m):
            term = (term * xf) // (2 * _SCALE)
        term //= math.factorial(m)
        total, k = term, 0
        while abs(term) > 0:
            term = -(term * quarter_x2) // (_SCALE * (k + 1) * (k + m + 1))
            total += term
            k += 1
            if k > 600:
                break
        return total
    # half-integer order: zeros agree with the reduced spherical function
    n = (two_m - 1) // 2
    s, c = _fx_sin_cos(xf)
    if n == 0:
        return s
    prev, cur = s, (s * _SCALE) // xf - c
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1) * cur * _SCALE) // xf - prev
    return cur


@lru_cache(maxsize=None)
def _bessel_zeros_upto(two_m: int, count: int) -> tuple:
    zeros = []
    step = math.pi / 16.0
    x = max(0.05, two_m / 2.0 * 0.05)
    prev = _bessel_sign_value(two_m, x)
    while prev == 0:
        x += 1e-3
        prev = _bessel_sign_value(two_m, x)
    while len(zeros) < count:
        x_next = x + step
        cur = _bessel_sign_value(two_m, x_next)
        if cur == 0 or (cur > 0) != (prev > 0):
            lo, hi = x, x_next
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                vm = _bessel_sign_value(two_m, mid)
                if vm == 0:
                    lo = hi = mid
                    break
                if (vm > 0) == (prev > 0):
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-14 * max(1.0, hi):
                    break
            zeros.append(0.5 * (lo + hi))
        prev = cur
        x = x_next
        if x > 500:  # pragma: no cover
            raise RuntimeError("bessel zero scan ran away")
    return tuple(zeros)


def bessel_zero_oracle(order, k: int) -> float:
    """k-th positive zero of J_order, order a (half-)integer in [0, 10].

    Independent of the eigenvalue solvers: ascending series summed in
    fixed-point integers (50 guard digits against cancellation), zeros
    located by sign-change scan plus bisection.
    """
    two_m = int(round(2 * float(Fraction(order))))
    if abs(2 * float(Fraction(order)) - two_m) > 1e-12:
        raise ValueError("order must be an integer or half-integer")
    if not (0 <= two_m <= 20):
        raise ValueError("oracle supports orders 0..10")
    if not (1 <= k <= 10):
        raise ValueError("oracle supports the first 10 zeros")
    return _bessel_zeros_upto(two_m, k)[k - 1]
