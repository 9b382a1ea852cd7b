"""Real hyperspherical harmonic bases, Gaunt tables, circulant diagrams.

Explicit orthonormal real bases of the degree-l harmonic eigenspace on S^2
and S^3, built from fully normalized associated Legendre functions and, for
S^3, Gegenbauer polar factors times an S^2 block per azimuthal order.  On
top of the bases: Gaunt coefficients (triple products of same-degree
harmonics) by exact-degree quadrature, the double-sum identity

    sum_{m1,m2} Gaunt(m1,m2,M) Gaunt(m1,m2,M')
        = delta_{M,M'} (n^2/|S^d|) (|S^(d-1)|/|S^d|) int_{-1}^{1} G^3 w dt,

and the circulant-diagram fourth-cumulant contraction with its closed form
|S^d|^6 n^{-5} g^2, used to quantify the fourth-moment CLT criterion for
the sample bispectrum.

Flat index convention: m in {1..n} in stored tables and file formats
(0-based rows internally).  For d=2 the map is m=1 -> zonal, m=2k ->
cos(k phi) row, m=2k+1 -> sin(k phi) row; for d=3 blocks of the S^2 layout
repeat for L = 0..l with polar order L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .specfun import eigenspace_dim, gegenbauer_lambda, sphere_surface
from .spherequad import QuadratureGrid, build_grid, cubic_integral, gegenbauer_moment

__all__ = [
    "HarmonicBasis",
    "GauntTable",
    "CirculantClosed",
    "build_basis",
    "gaunt_table",
    "lemcg_check",
    "gaunt_diagonal",
    "circulant_sum",
    "circulant_closed",
    "cum4_ratio",
]

_D2_LMAX = 64
_D3_LMAX = 12


def _alp_rows(l: int, ct: np.ndarray, st: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre values W_{l,m}, m = 0..l.

    Normalization: int_0^pi W_{l,m}(theta)^2 sin(theta) dtheta = 1, so the
    S^2 harmonics are W_{l,0}/sqrt(2 pi) and W_{l,m} {cos,sin}(m phi)/sqrt(pi).
    Diagonal seed W_{m,m} then upward degree recurrence; all coefficients
    bounded, stable far beyond l = 64.
    """
    out = np.empty((l + 1, ct.shape[0]))
    w_mm = np.full(ct.shape[0], 1.0 / math.sqrt(2.0))
    for m in range(l + 1):
        if m == l:
            out[m] = w_mm
            break
        prev = w_mm
        cur = math.sqrt(2 * m + 3.0) * ct * w_mm
        for k in range(m + 2, l + 1):
            a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b = math.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
            prev, cur = cur, a * (ct * cur - b * prev)
        out[m] = cur
        w_mm = math.sqrt((2 * m + 3.0) / (2 * m + 2.0)) * st * w_mm
    return out


def _check_points(points: np.ndarray, d: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != d + 1:
        raise ValueError(f"points must have {d + 1} coordinates, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("points must lie on the unit sphere (|x| - 1 > 1e-9)")
    return pts


def _eval_s2(l: int, points: np.ndarray) -> np.ndarray:
    """All 2l+1 real degree-l harmonics at points on S^2, rows per flat m."""
    ct = np.clip(points[:, 0], -1.0, 1.0)
    st = np.hypot(points[:, 1], points[:, 2])
    phi = np.arctan2(points[:, 2], points[:, 1])
    w = _alp_rows(l, ct, st)
    out = np.empty((2 * l + 1, points.shape[0]))
    out[0] = w[0] / math.sqrt(2.0 * math.pi)
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    for m in range(1, l + 1):
        out[2 * m - 1] = w[m] * np.cos(m * phi) * inv_sqrt_pi
        out[2 * m] = w[m] * np.sin(m * phi) * inv_sqrt_pi
    return out


def _radial_norm_s3(l: int, big_l: int) -> float:
    """Normalizer for the S^3 polar factor N (sin chi)^L Ct_{l-L}^{(L+1)}.

    Ct is the max-normalized Gegenbauer (value 1 at argument 1); the plain
    Gegenbauer squared norm against (sin chi)^(2L+2) is
    h = pi 2^(-1-2L) Gamma(l+L+2) / ((l-L)! (l+1) Gamma(L+1)^2),
    and the max value is binom(l+L+1, l-L), so N = binom/sqrt(h).
    """
    log_h = (math.log(math.pi) - (1 + 2 * big_l) * math.log(2.0)
             + math.lgamma(l + big_l + 2) - math.lgamma(l - big_l + 1)
             - math.log(l + 1.0) - 2.0 * math.lgamma(big_l + 1))
    log_c1 = (math.lgamma(l + big_l + 2) - math.lgamma(l - big_l + 1)
              - math.lgamma(2 * big_l + 2))
    return math.exp(log_c1 - 0.5 * log_h)


def _eval_s3(l: int, points: np.ndarray) -> np.ndarray:
    """All (l+1)^2 real degree-l harmonics at points on S^3.

    Block L = 0..l: N (sin chi)^L Ct_{l-L}^{(L+1)}(cos chi) times the 2L+1
    degree-L harmonics of the S^2 direction; rows ordered by L then the S^2
    flat index.
    """
    ct1 = np.clip(points[:, 0], -1.0, 1.0)
    s1 = np.linalg.norm(points[:, 1:], axis=1)
    omega = np.zeros_like(points[:, 1:])
    np.divide(points[:, 1:], s1[:, None], out=omega, where=s1[:, None] > 0)
    omega[s1 == 0] = (1.0, 0.0, 0.0)  # (sin chi)^L kills every L >= 1 block
    out = np.empty(((l + 1) ** 2, points.shape[0]))
    row = 0
    s_pow = np.ones_like(s1)
    for big_l in range(l + 1):
        radial = (_radial_norm_s3(l, big_l) * s_pow
                  * gegenbauer_lambda(big_l + 1.0, l - big_l, ct1))
        block = _eval_s2(big_l, omega)
        out[row:row + 2 * big_l + 1] = radial[None, :] * block
        row += 2 * big_l + 1
        s_pow = s_pow * s1
    return out


@dataclass(frozen=True)
class HarmonicBasis:
    """Orthonormal real basis of the degree-l eigenspace on S^d.

    size = n_{l;d}; evaluate() returns the (size, npoints) value matrix.
    """

    d: int
    l: int
    size: int

    def evaluate(self, points) -> np.ndarray:
        pts = _check_points(points, self.d)
        if self.d == 2:
            return _eval_s2(self.l, pts)
        return _eval_s3(self.l, pts)

    def evaluate_on_grid(self, grid: QuadratureGrid) -> np.ndarray:
        """Value matrix on a grid; antipodal grids get exact (-1)^l parity.

        Only the primary half is evaluated; the mirror half is written as
        +-(that value), so Y(-x) = (-1)^l Y(x) holds to the last bit and
        downstream antipodal cancellations are exact.
        """
        if grid.d != self.d:
            raise ValueError(f"grid dimension {grid.d} != basis dimension {self.d}")
        if not grid.antipodal_symmetric:
            return self.evaluate(grid.points)
        primary = grid.primary_indices()
        vals = self.evaluate(grid.points[primary])
        out = np.empty((self.size, grid.size))
        out[:, primary] = vals
        out[:, grid.antipode_index[primary]] = (-1.0) ** self.l * vals
        return out


def build_basis(d: int, l: int) -> HarmonicBasis:
    """Orthonormal real harmonics of degree l on S^d (d = 2 or 3).

    d=2: associated-Legendre times cos/sin azimuth, l <= 64.
    d=3: Gegenbauer polar factor times a degree-L S^2 block, l <= 12.
    """
    cap = {2: _D2_LMAX, 3: _D3_LMAX}.get(d)
    if cap is None:
        raise ValueError(f"explicit bases exist for d in {{2, 3}}, got d={d}")
    if not 0 <= l <= cap:
        raise ValueError(f"d={d} basis supports 0 <= l <= {cap}, got l={l}")
    return HarmonicBasis(d=d, l=l, size=eigenspace_dim(d, l))


# ---------------------------------------------------------------------------
# Gaunt coefficients and the circulant fourth-cumulant diagram

_SNAP = 1e-12  # selection-rule zeros land ~1e3 below this at acceptance scale
_GAUNT_FLOP_BUDGET = 2e9


@dataclass(frozen=True)
class GauntTable:
    """All n^3 same-degree Gaunt coefficients int Y_m1 Y_m2 Y_m3 dx.

    coefficients[i, j, k] uses 0-based rows of the flat basis order; the
    text format and value() are 1-based.  Entries are exactly symmetric
    under all 6 index permutations and exact 0 below the snap threshold.
    """

    d: int
    l: int
    n: int
    exactness: int
    coefficients: np.ndarray

    def value(self, m1: int, m2: int, m3: int) -> float:
        return float(self.coefficients[m1 - 1, m2 - 1, m3 - 1])

    def to_text(self) -> str:
        lines = [f"{self.d} {self.l} {self.n} {self.exactness}"]
        for i in range(self.n):
            for j in range(i, self.n):
                for k in range(j, self.n):
                    v = self.coefficients[i, j, k]
                    if v != 0.0:
                        lines.append(f"{i + 1} {j + 1} {k + 1} {v:.17g}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "GauntTable":
        with open(path) as fh:
            header = fh.readline().split()
            d, l, n, exactness = (int(x) for x in header)
            coeff = np.zeros((n, n, n))
            for line in fh:
                if not line.strip():
                    continue
                a, b, c, v = line.split()
                i, j, k = int(a) - 1, int(b) - 1, int(c) - 1
                val = float(v)
                for p, q, r in ((i, j, k), (i, k, j), (j, i, k),
                                (j, k, i), (k, i, j), (k, j, i)):
                    coeff[p, q, r] = val
        return cls(d=d, l=l, n=n, exactness=exactness, coefficients=coeff)


def gaunt_table(d: int, l: int) -> GauntTable:
    """Gaunt coefficients of the full degree-l basis by exact quadrature.

    The triple product has polynomial degree 3l, so a grid of exactness 3l
    integrates every coefficient exactly (up to rounding); the result is
    symmetrized over index permutations and snapped to exact zeros.
    """
    basis = build_basis(d, l)
    n = basis.size
    grid = build_grid(d, max(3 * l, 2))
    if n ** 3 * grid.size > _GAUNT_FLOP_BUDGET:
        raise ValueError(
            f"gaunt_table(d={d}, l={l}): n^3 * grid = {n ** 3 * grid.size:.2e} "
            f"exceeds budget {_GAUNT_FLOP_BUDGET:.0e}"
        )
    b = basis.evaluate_on_grid(grid)
    t = np.einsum("ip,jp,kp->ijk", b * grid.weights, b, b, optimize=True)
    t = (t + t.transpose(0, 2, 1) + t.transpose(1, 0, 2)
         + t.transpose(1, 2, 0) + t.transpose(2, 0, 1) + t.transpose(2, 1, 0)) / 6.0
    # rounding makes the six averages differ in the last bit per entry;
    # gather every entry from its sorted index triple for exact symmetry
    idx = np.sort(np.stack(np.indices((n, n, n))), axis=0)
    t = t[idx[0], idx[1], idx[2]]
    t[np.abs(t) < _SNAP] = 0.0
    return GauntTable(d=d, l=l, n=n, exactness=grid.exactness_degree, coefficients=t)


def gaunt_diagonal(d: int, l: int) -> float:
    """g_{l;d} = (n^2/|S^d|) (|S^(d-1)|/|S^d|) int_{-1}^1 G_{l;d}^3 w dt,

    the common diagonal of the Gaunt double-sum identity (zero for odd l).
    """
    n = eigenspace_dim(d, l)
    s_d = sphere_surface(d)
    return n * n / s_d * (sphere_surface(d - 1) / s_d) * cubic_integral(d, l)


def lemcg_check(table: GauntTable) -> np.ndarray:
    """Residual matrix of the Gaunt double-sum identity.

    Entry (M, M') = sum_{m1,m2} G_{m1 m2 M} G_{m1 m2 M'} - delta g_{l;d};
    the identity predicts an exact zero matrix.
    """
    if table.l % 2 == 1:
        raise ValueError("the double-sum identity is stated for even l only")
    m = np.tensordot(table.coefficients, table.coefficients, axes=([0, 1], [0, 1]))
    return m - gaunt_diagonal(table.d, table.l) * np.eye(table.n)


def circulant_sum(table: GauntTable) -> float:
    """Circulant diagram (|S^d|/n)^6 sum G_{abc} G_{abe} G_{fge} G_{fgc}.

    Direct contraction over the stored table, skipping zero slices (the
    selection rules leave O(n^2) of the n^3 entries).
    """
    n = table.n
    if float(n) ** 6 > 1e12:
        raise ValueError(f"circulant sum over n={n} exceeds the n^6 budget")
    g = table.coefficients
    m = np.zeros((n, n))
    for m1 in range(n):
        sl = g[m1]
        for m2 in np.nonzero(np.any(sl != 0.0, axis=1))[0]:
            v = sl[m2]
            idx = np.nonzero(v)[0]
            m[np.ix_(idx, idx)] += np.outer(v[idx], v[idx])
    scale = (sphere_surface(table.d) / n) ** 6
    return scale * float(np.sum(m * m))


class CirculantClosed(NamedTuple):
    value: float
    g: float


def circulant_closed(d: int, l: int) -> CirculantClosed:
    """Closed circulant value |S^d|^6 n^(-5) g_{l;d}^2, with g itself."""
    if l % 2 == 1:
        raise ValueError("circulant closed form is stated for even l only")
    g = gaunt_diagonal(d, l)
    n = eigenspace_dim(d, l)
    return CirculantClosed(value=sphere_surface(d) ** 6 / n ** 5 * g * g, g=g)


def cum4_ratio(d: int, l: int) -> float:
    """Fourth-moment CLT diagnostic for the sample bispectrum.

    Ratio of the dominant (circulant) fourth-cumulant contribution to the
    squared variance 3! |S^d| |S^(d-1)| int_0^pi G^3 (sin)^(d-1); decays
    like l^-(d-1), which drives the bispectrum CLT.
    """
    if l % 2 == 1:
        raise ValueError("the fourth-moment ratio is defined for even l only")
    var3 = (6.0 * sphere_surface(d) * sphere_surface(d - 1)
            * gegenbauer_moment(d, l, 3, "full"))
    return circulant_closed(d, l).value / (var3 * var3)
