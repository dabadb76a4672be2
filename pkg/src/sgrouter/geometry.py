"""Poisson point fields, nearest-neighbor queries, and single-hop distance laws.

The Type-I law is the distance from a fixed reference point to the PPP point
nearest to a second reference a distance r away.  The Type-II law is the
distance between the nearest PPP points of two references r apart, with the
two nearest-neighbor displacements treated as independent (the tractability
assumption the analytical route model is built on).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special
from numpy.polynomial.legendre import leggauss


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangle in meters."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError("window must have positive extent")

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)


def sim_window(total_distance: float) -> Window:
    """Default simulation window around a source-target segment on the x-axis.

    Relays outside [-R/2, 3R/2] x [-R, R] are never selected by any strategy
    at the densities of interest; truncation error is below MC noise.
    """
    R = float(total_distance)
    return Window(-R / 2.0, 1.5 * R, -R, R)


@dataclass(frozen=True)
class PointField:
    """One realization of a homogeneous PPP inside a bounded window."""

    points: np.ndarray          # shape (N, 2)
    density: float              # 1/m^2
    window: Window

    def __len__(self) -> int:
        return self.points.shape[0]


def sample_ppp(density: float, window: Window, rng: np.random.Generator) -> PointField:
    """Draw one PPP realization: Poisson count, i.i.d. uniform positions."""
    if density <= 0:
        raise ValueError("density must be positive")
    n = rng.poisson(density * window.area)
    xs = rng.uniform(window.xmin, window.xmax, size=n)
    ys = rng.uniform(window.ymin, window.ymax, size=n)
    return PointField(np.column_stack([xs, ys]), density, window)


def nearest_to(field: PointField, query) -> tuple[np.ndarray, float]:
    """Point of the field closest to ``query`` (lowest index on ties)."""
    if len(field) == 0:
        raise ValueError("cannot query nearest point of an empty field")
    q = np.asarray(query, dtype=float)
    d2 = np.sum((field.points - q) ** 2, axis=1)
    i = int(np.argmin(d2))
    return field.points[i], float(np.sqrt(d2[i]))


# ---------------------------------------------------------------------------
# Distance distributions
# ---------------------------------------------------------------------------

class DistanceKind(Enum):
    TYPE_I = 1
    TYPE_II = 2


def _type1_pdf_stable(lam: float, r, rho):
    """Exact Type-I density.

    Parametrizing the relay position by its angle at the reference collapses
    the defining integral (whose raw form has inverse-square-root endpoint
    singularities) to 2*lam*rho * Int_0^pi exp(-lam*pi*(r^2+rho^2-2*r*rho*cos psi)) dpsi
    = 2*pi*lam*rho * exp(-lam*pi*(rho-r)^2) * i0e(2*pi*lam*r*rho),
    smooth and overflow-free for all rho, r.
    """
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    z = 2.0 * np.pi * lam * r * rho
    return 2.0 * np.pi * lam * rho * np.exp(-lam * np.pi * (rho - r) ** 2) * special.i0e(z)


def _type1_pdf_quad(lam: float, r: float, rho, n_nodes: int = 96):
    """Type-I density by Gauss-Legendre on the angle-substituted integrand.

    Used as an independent numerical route for testing the closed form.
    """
    rho = np.asarray(rho, dtype=float)
    x, w = leggauss(n_nodes)
    psi = 0.5 * np.pi * (x + 1.0)          # [0, pi]
    wpsi = 0.5 * np.pi * w
    l2 = r**2 + rho[..., None] ** 2 - 2.0 * r * rho[..., None] * np.cos(psi)
    return 2.0 * lam * rho * np.sum(np.exp(-lam * np.pi * l2) * wpsi, axis=-1)


def _displacement_tail_radius(lam: float, tail: float = 1e-9) -> float:
    """Radius beyond which a nearest-neighbor displacement has mass < tail."""
    return np.sqrt(np.log(1.0 / tail) / (lam * np.pi))


def _type2_pdf(lam: float, r: float, rho, n_nodes: int = 200):
    """Type-II density as the Type-I mixture over the first reference's own
    nearest-neighbor distance:

        f2(rho | r) = Int_0^inf f1(rhat | r) * f1(rho | rhat) drhat.

    The (rhat, theta) plane integral of the defining triple integral reduces
    exactly to this 1-D form because rhat = |y1 - x2| itself follows the
    Type-I law.  The radial Jacobian (absent from the raw triple-integral
    notation) is what makes the kernel a probability density.
    """
    rho = np.asarray(rho, dtype=float)
    L = _displacement_tail_radius(lam)
    lo, hi = max(0.0, r - L), r + L
    x, w = leggauss(n_nodes)
    rhat = 0.5 * (hi - lo) * (x + 1.0) + lo
    wr = 0.5 * (hi - lo) * w
    mix = _type1_pdf_stable(lam, r, rhat) * wr
    vals = _type1_pdf_stable(lam, rhat, rho[..., None])
    return np.sum(vals * mix, axis=-1)


@dataclass
class DistancePdf:
    """Evaluable single-hop distance law with an optional sampling cache."""

    kind: DistanceKind
    r: float                 # reference separation, m
    density: float           # 1/m^2
    eval_cache: tuple[np.ndarray, np.ndarray] | None = None   # (rho grid, pdf)

    def __post_init__(self):
        if self.r <= 0 or self.density <= 0:
            raise ValueError("reference distance and density must be positive")

    def pdf(self, rho):
        rho_arr = np.asarray(rho, dtype=float)
        if np.any(rho_arr <= 0):
            raise ValueError("rho must be positive")
        if self.kind is DistanceKind.TYPE_I:
            out = _type1_pdf_stable(self.density, self.r, rho_arr)
        else:
            out = _type2_pdf(self.density, self.r, rho_arr)
        return out if out.ndim else float(out)

    def support_upper(self, tail: float = 1e-9) -> float:
        """Upper truncation radius with tail mass below ``tail``."""
        k = 2.0 if self.kind is DistanceKind.TYPE_II else 1.0
        return self.r + (1.0 + k) * _displacement_tail_radius(self.density, tail)

    def build_cache(self, n: int = 4096, rho_upper: float | None = None) -> "DistancePdf":
        """Tabulate the PDF for inverse-CDF sampling; returns self."""
        hi = rho_upper if rho_upper is not None else self.support_upper()
        grid = np.linspace(hi / n * 1e-3, hi, n)
        self.eval_cache = (grid, np.asarray(self.pdf(grid)))
        return self

    def mean(self) -> float:
        """First moment by quadrature over the tabulated support."""
        if self.eval_cache is None:
            self.build_cache()
        grid, vals = self.eval_cache
        return float(np.trapezoid(grid * vals, grid))


def type1_pdf(d: DistancePdf, rho):
    """Type-I density evaluated at rho (1/m)."""
    if d.kind is not DistanceKind.TYPE_I:
        raise ValueError("type1_pdf requires a TYPE_I DistancePdf")
    return d.pdf(rho)


def type2_pdf(d: DistancePdf, rho):
    """Type-II density evaluated at rho (1/m)."""
    if d.kind is not DistanceKind.TYPE_II:
        raise ValueError("type2_pdf requires a TYPE_II DistancePdf")
    return d.pdf(rho)


def sample_hop_distance(d: DistancePdf, rng: np.random.Generator, size=None):
    """Inverse-CDF sampling from the tabulated density."""
    if d.eval_cache is None:
        raise ValueError("build_cache() must be called before sampling")
    grid, vals = d.eval_cache
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    u = rng.uniform(size=size)
    out = np.interp(u, cdf, grid)
    return out
