"""Brute-force Monte Carlo oracles shared by the geometry and acceptance tests.

These sample actual PPP realizations and scan them exhaustively; they stay
independent of the closed-form / quadrature code paths they are used to check.
"""

import numpy as np

from sgrouter.geometry import DistancePdf


def batch_nearest(lam, center, n, rng, margin_tail=1e-12):
    """Nearest point to ``center`` over n independent PPP fields (vectorized).

    Each field is drawn on a box around the center large enough that the
    nearest point lies inside with probability 1 - margin_tail; empty fields
    are resampled.
    """
    L = np.sqrt(np.log(1.0 / margin_tail) / (lam * np.pi))
    cx, cy = center
    counts = rng.poisson(lam * (2 * L) ** 2, size=n)
    empty = counts == 0
    while np.any(empty):
        counts[empty] = rng.poisson(lam * (2 * L) ** 2, size=int(empty.sum()))
        empty = counts == 0
    tot = int(counts.sum())
    xs = rng.uniform(cx - L, cx + L, size=tot)
    ys = rng.uniform(cy - L, cy + L, size=tot)
    seg = np.repeat(np.arange(n), counts)
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    order = np.lexsort((d2, seg))
    firsts = order[np.searchsorted(seg[order], np.arange(n))]
    return np.column_stack([xs[firsts], ys[firsts]])


def batch_nearest_two(lam, c1, c2, n, rng, margin_tail=1e-12):
    """Nearest points to two references over the SAME field, per realization."""
    L = np.sqrt(np.log(1.0 / margin_tail) / (lam * np.pi))
    xmin, xmax = min(c1[0], c2[0]) - L, max(c1[0], c2[0]) + L
    ymin, ymax = min(c1[1], c2[1]) - L, max(c1[1], c2[1]) + L
    area = (xmax - xmin) * (ymax - ymin)
    counts = rng.poisson(lam * area, size=n)
    empty = counts == 0
    while np.any(empty):
        counts[empty] = rng.poisson(lam * area, size=int(empty.sum()))
        empty = counts == 0
    tot = int(counts.sum())
    xs = rng.uniform(xmin, xmax, size=tot)
    ys = rng.uniform(ymin, ymax, size=tot)
    seg = np.repeat(np.arange(n), counts)
    starts = np.searchsorted(seg, np.arange(n))  # seg is already sorted
    out = []
    for cx, cy in (c1, c2):
        d2 = (xs - cx) ** 2 + (ys - cy) ** 2
        order = np.lexsort((d2, seg))
        firsts = order[np.searchsorted(seg[order], np.arange(n))]
        out.append(np.column_stack([xs[firsts], ys[firsts]]))
    return out[0], out[1]


def law_cdf_on_grid(law: DistancePdf, n_grid=4000):
    """Tabulated CDF of a distance law for KS comparisons."""
    hi = law.support_upper()
    grid = np.linspace(hi * 1e-9, hi, n_grid)
    pdf = np.asarray(law.pdf(grid))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    return grid, cdf


def ks_distance(samples, grid, cdf):
    emp = np.sort(samples)
    model = np.interp(emp, grid, cdf)
    k = np.arange(1, emp.size + 1) / emp.size
    return float(np.max(np.maximum(np.abs(model - k), np.abs(model - k + 1.0 / emp.size))))
