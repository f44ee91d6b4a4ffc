"""Contour-integral semigroups and spectral projections of matrices.

For a matrix A whose spectrum splits as sigma_1 (Re < -delta) and
sigma_2 (Re > delta), the path

    lower ray  rho e^(-i beta), rho from infinity down to r
    arc        r e^(i theta),   theta from -beta to beta
    upper ray  rho e^(i beta),  rho from r up to infinity

with pi/2 < beta < pi and r < delta surrounds sigma_1 counterclockwise
(closing through the left half-plane).  Then

    T1(t) = 1/(2 pi i) int e^(t lam) R(lam, A) dlam
    P     = I + 1/(2 pi i) int R(lam, A) A / lam dlam

are the semigroup generated by A on the sigma_1 part and the spectral
projection onto it.  T2 and the complementary part use -A.

Rays are integrated with composite Gauss-Legendre panels (geometric near
the arc, then of width ~1/t where e^(t lam) oscillates); the arc uses one
Gauss-Legendre panel in theta.  For P the tail [rho_0, inf) is mapped to
w = rho_0 / rho in (0, 1], where the integrand is analytic.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss
from scipy.optimize import linear_sum_assignment

from .errors import (NearSingularError, NumericalError, RankAmbiguityError, SpectrumSplitError,
                     TruncationError, ValidationError)

TRUNC_EXP = 41.5  # e^-41.5 ~ 1e-18


class FiniteOperator:
    """Square complex matrix, or a diagonal given by its eigenvalues."""

    def __init__(self, entries=None, diagonal=None):
        if (entries is None) == (diagonal is None):
            raise ValidationError("give either entries or diagonal")
        if diagonal is not None:
            d = np.asarray(diagonal, dtype=np.complex128).reshape(-1)
            if d.size == 0:
                raise ValidationError("empty operator")
            self.diag = d
            self.entries = np.diag(d)
        else:
            a = np.asarray(entries, dtype=np.complex128)
            if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
                raise ValidationError("operator matrix must be square")
            self.diag = None
            self.entries = a
        if not np.all(np.isfinite(self.entries)):
            raise ValidationError("operator entries must be finite")
        self._eig = None

    @classmethod
    def diagonal(cls, values):
        return cls(diagonal=values)

    @property
    def n(self):
        return self.entries.shape[0]

    def __neg__(self):
        if self.diag is not None:
            return FiniteOperator(diagonal=-self.diag)
        return FiniteOperator(-self.entries)

    @property
    def norm(self):
        return float(np.linalg.norm(self.entries, 2))

    def eig(self):
        """Oracle eigendecomposition (values, right vectors, inverse)."""
        if self._eig is None:
            if self.diag is not None:
                w, v = self.diag.copy(), np.eye(self.n, dtype=np.complex128)
            else:
                w, v = scipy.linalg.eig(self.entries)
            self._eig = (w, v, np.linalg.inv(v))
        return self._eig

    @property
    def eigenvalues(self):
        return self.eig()[0]

    def resolvents(self, lams):
        """(lam I - A)^(-1) for every lam, stacked."""
        lams = np.asarray(lams, dtype=np.complex128)
        if self.diag is not None:
            inv = 1.0 / (lams[:, None] - self.diag[None, :])
            out = np.zeros((lams.size, self.n, self.n), dtype=np.complex128)
            idx = np.arange(self.n)
            out[:, idx, idx] = inv
            return out
        eye = np.eye(self.n, dtype=np.complex128)
        shifted = lams[:, None, None] * eye[None] - self.entries[None]
        return np.linalg.solve(shifted, np.broadcast_to(eye, shifted.shape))


def as_operator(a) -> FiniteOperator:
    return a if isinstance(a, FiniteOperator) else FiniteOperator(a)


@dataclass(frozen=True)
class ContourSpec:
    """Path parameters.

    ``R`` fixes the ray length for the semigroup integrals (None picks it
    from the decay of e^(t lam)); for the projection it is the radius where
    the exact tail map starts.  ``n_ray`` is the Gauss-Legendre order per
    ray panel, ``panel_ratio`` the growth of the geometric panels.
    """

    r: float
    beta: float
    R: Optional[float] = None
    n_ray: int = 16
    n_arc: int = 64
    panel_ratio: float = 1.1

    def __post_init__(self):
        if not (np.pi / 2 < self.beta < np.pi):
            raise ValidationError("beta must lie strictly inside (pi/2, pi)")
        if self.r <= 0:
            raise ValidationError("r must be positive")
        if self.n_ray < 2 or self.n_arc < 2:
            raise ValidationError("need at least 2 nodes per panel")

    def to_dict(self):
        return {"r": self.r, "beta": self.beta, "R": self.R, "n_ray": self.n_ray,
                "n_arc": self.n_arc, "panel_ratio": self.panel_ratio}


def check_split(a: FiniteOperator, delta: float):
    w = a.eigenvalues
    bad = np.abs(w.real) <= delta
    if np.any(bad):
        raise SpectrumSplitError(
            f"eigenvalues {w[bad]} violate |Re lambda| > {delta}")
    return w


def default_contour(a, delta: float, **kw) -> ContourSpec:
    """r = delta / 2 and beta halfway between pi/2 and the smallest
    |arg| over sigma_1 and -sigma_2."""
    a = as_operator(a)
    w = check_split(a, delta)
    left = np.concatenate([w[w.real < 0], -w[w.real > 0]])
    theta_min = float(np.min(np.abs(np.angle(left))))
    beta = 0.5 * (np.pi / 2 + theta_min)
    return ContourSpec(r=kw.pop("r", delta / 2), beta=kw.pop("beta", beta), **kw)


def validate_contour(a: FiniteOperator, spec: ContourSpec, delta: Optional[float]):
    w = a.eigenvalues
    if delta is not None:
        check_split(a, delta)
        if spec.r >= delta:
            raise ValidationError("contour radius r must be below delta")
    if np.any(np.abs(w) <= spec.r):
        raise SpectrumSplitError("an eigenvalue lies inside the contour arc")
    left = w[w.real < 0]
    if left.size and np.min(np.abs(np.angle(left))) <= spec.beta:
        raise SpectrumSplitError("an eigenvalue of sigma_1 is not left of the rays")


def _gl_panels(edges, order):
    x, wt = leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * wt[None, :]
    return nodes.ravel(), weights.ravel()


def _ray_edges(spec: ContourSpec, rho_end: float, width: float):
    edges = [spec.r]
    while edges[-1] < rho_end:
        step = min(edges[-1] * (spec.panel_ratio - 1.0), width)
        edges.append(min(edges[-1] + max(step, 1e-300), rho_end))
    return np.array(edges)


def contour_nodes(a: FiniteOperator, spec: ContourSpec, t: Optional[float]):
    """Nodes lam_j and weights c_j with sum c_j F(lam_j) ~ (1/2 pi i) int F.

    ``t=None`` builds the projection path (tail mapped to (0, 1]).
    """
    scale = max(float(np.max(np.abs(a.eigenvalues))), spec.r)
    eb, ebm = np.exp(1j * spec.beta), np.exp(-1j * spec.beta)
    if t is None:
        rho0 = spec.R or 4.0 * scale + spec.r
        rho, wr = _gl_panels(_ray_edges(spec, rho0, np.inf), spec.n_ray)
        wnodes, ww = _gl_panels(np.linspace(0.0, 1.0, 5), spec.n_ray)
        rho = np.concatenate([rho, rho0 / wnodes])
        wr = np.concatenate([wr, ww * rho0 / wnodes ** 2])
    else:
        cosb = np.cos(spec.beta)
        rho_end = TRUNC_EXP / (t * abs(cosb)) if spec.R is None else spec.R
        rho_end = max(rho_end, 2.0 * scale + spec.r)
        tail = np.exp(t * rho_end * cosb) / (np.pi * t * abs(cosb) * rho_end)
        if tail > 1e-12:
            raise TruncationError(f"ray truncation at R={rho_end:g} leaves a tail of {tail:.2g}")
        rho, wr = _gl_panels(_ray_edges(spec, rho_end, 1.5 / t), spec.n_ray)
    th, wth = _gl_panels(np.array([-spec.beta, spec.beta]), spec.n_arc)
    arc = spec.r * np.exp(1j * th)
    lams = np.concatenate([rho * ebm, arc, rho * eb])
    # lower ray runs inward: d lam = -e^(-i beta) d rho
    dl = np.concatenate([-ebm * wr, 1j * arc * wth, eb * wr])
    return lams, dl / (2j * np.pi)


def _contour_semigroup(a: FiniteOperator, t: float, spec: ContourSpec):
    if not t > 0:
        raise ValidationError("contour semigroups need t > 0")
    lams, c = contour_nodes(a, spec, t)
    res = a.resolvents(lams)
    return np.sum((c * np.exp(t * lams))[:, None, None] * res, axis=0)


def contour_T1(a, t: float, spec: Optional[ContourSpec] = None, delta: float = 1.0):
    """Semigroup generated by A on its left spectral part, at time t > 0."""
    a = as_operator(a)
    spec = spec or default_contour(a, delta)
    validate_contour(a, spec, delta)
    return _contour_semigroup(a, float(t), spec)


def contour_T2(a, t: float, spec: Optional[ContourSpec] = None, delta: float = 1.0):
    """Semigroup generated by -A on the right spectral part of A."""
    a = as_operator(a)
    spec = spec or default_contour(a, delta)
    return contour_T1(-a, t, spec, delta)


def projection_P(a, spec: Optional[ContourSpec] = None, delta: float = 1.0):
    """Spectral projection onto the sigma_1 subspace, from the subtracted
    resolvent integral."""
    a = as_operator(a)
    spec = spec or default_contour(a, delta)
    validate_contour(a, spec, delta)
    lams, c = contour_nodes(a, spec, None)
    res = a.resolvents(lams)
    integral = np.sum((c / lams)[:, None, None] * res, axis=0) @ a.entries
    return np.eye(a.n, dtype=np.complex128) + integral


def resolvent_apply(a, lam, x):
    """Solve (lam I - A) y = x by LU with partial pivoting."""
    a = as_operator(a)
    lam = complex(lam)
    x = np.asarray(x, dtype=np.complex128)
    if np.min(np.abs(a.eigenvalues - lam)) < 1e-10:
        raise NearSingularError(f"lambda={lam} is within 1e-10 of the spectrum")
    m = lam * np.eye(a.n) - a.entries
    lu = scipy.linalg.lu_factor(m)
    y = scipy.linalg.lu_solve(lu, x)
    resid = np.linalg.norm(m @ y - x)
    if resid > 1e-12 * (abs(lam) + a.norm) * max(np.linalg.norm(y), 1e-300):
        raise NumericalError(f"resolvent residual {resid:.2g} too large")
    return y


# oracles ---------------------------------------------------------------

def oracle_T1(a, t: float, delta: float = 1.0):
    a = as_operator(a)
    w, v, vi = a.eig()
    check_split(a, delta)
    sel = w.real < 0
    return (v[:, sel] * np.exp(t * w[sel])) @ vi[sel]


def oracle_T2(a, t: float, delta: float = 1.0):
    return oracle_T1(-as_operator(a), t, delta)


def oracle_P(a, delta: float = 1.0):
    a = as_operator(a)
    w, v, vi = a.eig()
    check_split(a, delta)
    sel = w.real < 0
    return v[:, sel] @ vi[sel]


# splitting -------------------------------------------------------------

@dataclass
class Splitting:
    basis1: np.ndarray
    basis2: np.ndarray
    spectrum1: np.ndarray
    spectrum2: np.ndarray
    expected1: np.ndarray
    expected2: np.ndarray
    mismatch: float

    def to_dict(self):
        def cl(z):
            return [[float(np.real(u)), float(np.imag(u))] for u in np.ravel(z)]
        return {"dim1": int(self.basis1.shape[1]), "dim2": int(self.basis2.shape[1]),
                "spectrum1": cl(self.spectrum1), "spectrum2": cl(self.spectrum2),
                "mismatch": self.mismatch}


def _match(found, expected):
    if found.size != expected.size:
        return np.inf
    if found.size == 0:
        return 0.0
    cost = np.abs(found[:, None] - expected[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def split_spaces(a, p, rank_tol: float = 1e-8) -> Splitting:
    """Orthonormal bases of E1 = range(P A^-1) and E2 = ker(P A^-1) and the
    spectra of A compressed to each."""
    a = as_operator(a)
    p = np.asarray(p, dtype=np.complex128)
    m = p @ np.linalg.inv(a.entries)
    u, s, vh = np.linalg.svd(m)
    thr = rank_tol * max(s[0], 1e-300)
    k = int(np.count_nonzero(s > thr))
    near = (s > thr / 1e3) & (s < thr * 1e3)
    if np.any(near):
        raise RankAmbiguityError(f"singular values {s[near]} are close to the rank threshold")
    q1 = u[:, :k]
    q2 = vh[k:].conj().T
    a1 = q1.conj().T @ a.entries @ q1
    a2 = q2.conj().T @ a.entries @ q2
    sp1 = np.linalg.eigvals(a1) if k else np.zeros(0, complex)
    sp2 = np.linalg.eigvals(a2) if k < a.n else np.zeros(0, complex)
    w = a.eigenvalues
    e1, e2 = w[w.real < 0], w[w.real > 0]
    mis = max(_match(sp1, e1), _match(sp2, e2))
    return Splitting(q1, q2, sp1, sp2, e1, e2, mis)


def laplace_consistency_check(a, spec: Optional[ContourSpec], z, t_max: float = 20.0,
                              n_t: int = 400, delta: float = 1.0) -> float:
    """|| int_0^t_max e^(-z t) T1(t) dt A^-1 P - R(z, A) A^-1 P ||_2.

    The time integral uses Gauss-Legendre panels of 16 nodes.
    """
    a = as_operator(a)
    z = complex(z)
    if not z.real > 0:
        raise ValidationError("Laplace check needs Re z > 0")
    spec = spec or default_contour(a, delta)
    validate_contour(a, spec, delta)
    w = a.eigenvalues
    decay = z.real - np.max(w[w.real < 0].real) if np.any(w.real < 0) else np.inf
    if np.isfinite(decay) and np.exp(-decay * t_max) > 1e-6:
        raise TruncationError("t_max too small for the Laplace tail")
    panels = max(1, int(np.ceil(n_t / 16)))
    ts, wt = _gl_panels(np.linspace(0.0, t_max, panels + 1), 16)
    acc = np.zeros((a.n, a.n), dtype=np.complex128)
    for tj, wj in zip(ts, wt):
        acc += wj * np.exp(-z * tj) * _contour_semigroup(a, tj, spec)
    p = projection_P(a, spec, delta)
    ainv_p = np.linalg.solve(a.entries, p)
    exact = np.linalg.solve(z * np.eye(a.n) - a.entries, ainv_p)
    return float(np.linalg.norm(acc @ ainv_p - exact, 2))

