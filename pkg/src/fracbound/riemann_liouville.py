"""Riemann-Liouville integrals J(z) of complex order on [0, 1].

    J(z) f(t) = 1/Gamma(z) int_0^t (t - s)^(z-1) f(s) ds,   Re z > 0,

plus the boundary operators J(is) obtained as sigma -> 0+ limits, and
estimates of the operator norm in sup, L^2 and Hoelder norms.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, svds

from . import convergence as cv
from .errors import DomainError, NotConvergedError, NumericalError, ValidationError
from .function_space import (CLOSED, Grid, NormSpec, SampledFunction, holder_seminorm,
                             sup_norm)
from .quadrature import ProductRule
from .special import gamma, reciprocal_gamma

DEFAULT_SIGMAS = (0.04, 0.02, 0.01, 0.005)
L2_SIGMAS = (0.04, 0.02, 0.01)
MAX_EXPONENTS = 4


@dataclass(frozen=True)
class FractionalOrder:
    """Complex order with Re z >= 0.  ``boundary`` marks Re z = 0, Im z != 0."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            raise ValidationError("order must be finite")
        if z.real < 0:
            raise DomainError("order must satisfy Re z >= 0")
        object.__setattr__(self, "z", z)

    @property
    def boundary(self):
        return self.z.real == 0 and self.z.imag != 0


def as_order(z) -> FractionalOrder:
    return z if isinstance(z, FractionalOrder) else FractionalOrder(complex(z))


def _interior(z) -> complex:
    z = as_order(z).z
    if not z.real > 0:
        raise DomainError("Re z must be positive here; use rl_boundary_apply for Re z = 0")
    return z


def _check_grid(grid: Grid):
    if grid.kind != CLOSED or not grid.uniform:
        raise ValidationError("Riemann-Liouville operators need a uniform grid on [0, 1]")


def _output_exponents(in_exps, z):
    """Leading powers of J(z)f near 0 given those of f."""
    if in_exps is None:
        base = [0.0, 1.0, 2.0]
    else:
        base = [0.0, 1.0] + [complex(g) for g in in_exps]
    out = []
    for g in base:
        e = complex(g) + z
        if all(abs(e - o) > 1e-12 for o in out):
            out.append(e)
    out.sort(key=lambda e: e.real)
    return tuple(out[:MAX_EXPONENTS])


@dataclass
class ProductQuadrature:
    """Weights W with (W q)_k = int_0^{t_k} (t_k - s)^(z-1) q(s) ds for
    piecewise-linear q."""

    grid: Grid
    order: FractionalOrder
    rule: ProductRule = field(repr=False)

    @property
    def weights(self) -> np.ndarray:
        return self.rule.matrix()

    def integrate(self, q) -> np.ndarray:
        return self.rule.apply(q)


@dataclass
class OperatorMatrix:
    grid: Grid
    entries: np.ndarray
    norm_context: Optional[NormSpec] = None

    def __matmul__(self, f):
        v = f.values if isinstance(f, SampledFunction) else np.asarray(f)
        return self.entries @ v


def rl_quadrature(z, grid: Grid, singular_exponents: Sequence = ()) -> ProductQuadrature:
    zz = _interior(z)
    _check_grid(grid)
    gamma(zz)  # pole check
    return ProductQuadrature(grid, as_order(zz),
                             ProductRule(zz, grid.size, grid.step, singular_exponents))


def rl_apply(z, f: SampledFunction, singular_exponents=None) -> SampledFunction:
    """J(z) f at every node.

    Exact for piecewise-linear f.  If f carries ``meta["exponents"]`` (or
    ``singular_exponents`` is given) the rule is also exact for those
    powers; the output records the powers of J(z) f so repeated
    applications stay accurate.
    """
    zz = _interior(z)
    _check_grid(f.grid)
    exps = f.exponents if singular_exponents is None else tuple(singular_exponents)
    rule = ProductRule(zz, f.grid.size, f.grid.step, exps or ())
    vals = rule.apply(f.values) * reciprocal_gamma(zz)
    return SampledFunction(f.grid, vals, meta={"exponents": _output_exponents(exps, zz)})


def rl_matrix(z, grid: Grid, ctx: Optional[NormSpec] = None) -> OperatorMatrix:
    zz = _interior(z)
    _check_grid(grid)
    rule = ProductRule(zz, grid.size, grid.step)
    return OperatorMatrix(grid, rule.matrix() * reciprocal_gamma(zz), ctx)


def rl_shift_apply(tau: float, f: SampledFunction) -> SampledFunction:
    """Nilpotent right shift: f(t - tau) for t > tau, else 0.

    The strict inequality makes S(1) the zero operator on the grid; the two
    conventions differ only at t = tau, where they agree for f(0) = 0.
    """
    if not (0.0 <= tau <= 1.0):
        raise ValidationError("shift must lie in [0, 1]")
    if f.grid.kind != CLOSED:
        raise ValidationError("shift needs a grid on [0, 1]")
    if tau == 0.0:
        return SampledFunction(f.grid, f.values.copy(), meta=dict(f.meta))
    t = f.nodes
    out = np.zeros(t.size, dtype=np.complex128)
    inside = t > tau + 1e-14
    out[inside] = f.evaluate(np.maximum(t[inside] - tau, 0.0))
    return SampledFunction(f.grid, out)


def rl_semigroup_defect(z1, z2, f: SampledFunction, n: Optional[NormSpec] = None) -> float:
    """|| J(z1) J(z2) f - J(z1 + z2) f || in the norm ``n`` (sup by default)."""
    n = n or NormSpec.sup()
    z1, z2 = _interior(z1), _interior(z2)
    lhs = rl_apply(z1, rl_apply(z2, f))
    rhs = rl_apply(z1 + z2, f)
    return float(n(lhs - rhs))


def rl_boundary_apply(s: float, f: SampledFunction, sigma_schedule=DEFAULT_SIGMAS,
                      n: Optional[NormSpec] = None):
    """J(is) f as the limit of J(sigma + is) f along ``sigma_schedule``.

    Returns ``(g, report)``.  When the report is not ``converged`` the
    function returned is the sample at the smallest sigma.
    """
    n = n or NormSpec.sup()
    sig = cv.check_schedule(sigma_schedule)
    s = float(s)
    if s == 0.0:
        rep = cv.ConvergenceReport(list(sig), [n(f)] * sig.size, [0.0] * (sig.size - 1),
                                   cv.CONVERGED, f.values.copy())
        return SampledFunction(f.grid, f.values.copy(), meta=dict(f.meta)), rep
    samples = [rl_apply(complex(sk, s), f).values for sk in sig]
    rep = cv.assess(sig, samples, lambda v: n(f.with_values(v)))
    vals = rep.extrapolated if rep.converged else samples[-1]
    out = SampledFunction(f.grid, vals, meta={"exponents": _output_exponents(f.exponents, 1j * s)})
    return out, rep


def _boundary_or_raise(s, f, sigma_schedule, n):
    g, rep = rl_boundary_apply(s, f, sigma_schedule, n)
    if not rep.converged:
        raise NotConvergedError(f"boundary limit at s={s} is {rep.verdict}", rep)
    return g


def rl_boundary_group_defect(s1: float, s2: float, f: SampledFunction, alpha: float,
                             sigma_schedule=DEFAULT_SIGMAS) -> float:
    """Hoelder-alpha seminorm of J(i s1) J(i s2) f - J(i (s1 + s2)) f."""
    n = NormSpec.holder(alpha)
    inner = _boundary_or_raise(s2, f, sigma_schedule, n)
    lhs = _boundary_or_raise(s1, inner, sigma_schedule, n)
    rhs = _boundary_or_raise(s1 + s2, f, sigma_schedule, n)
    return float(holder_seminorm(lhs - rhs, alpha))


def rl_opnorm_sup(z) -> float:
    """1 / (|Gamma(z)| Re z): sup-norm of the modulus kernel on [0, 1]."""
    zz = _interior(z)
    return float(abs(reciprocal_gamma(zz)) / zz.real) if abs(reciprocal_gamma(zz)) > 0 else _pole(zz)


def _pole(z):
    gamma(z)  # raises PoleError
    return 0.0  # pragma: no cover


def _top_singular_value(b: np.ndarray, method: str) -> float:
    if method == "lanczos":
        try:
            s = svds(b, k=1, which="LM", return_singular_vectors=False, tol=0)
            return float(s[0])
        except (ArpackNoConvergence, ValueError):
            pass
    try:
        return float(scipy.linalg.svdvals(b)[0])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc


def _l2_norm_interior(z: complex, n_nodes: int, method: str) -> float:
    grid = Grid.uniform_unit(n_nodes)
    m = rl_matrix(z, grid).entries
    w = np.full(n_nodes, grid.step)
    w[0] = w[-1] = grid.step / 2
    r = np.sqrt(w)
    return _top_singular_value(r[:, None] * m / r[None, :], method)


def rl_opnorm_l2(z, N: int = 2048, sigma_schedule=None, method: str = "lanczos",
                 richardson_N: bool = False, return_report: bool = False):
    """Largest singular value of the finite section of J(z) on L^2(0, 1).

    The matrix is symmetrised with the square roots of the trapezoid
    weights.  For Re z = 0 the norm is computed at ``sigma + i Im z`` for
    each sigma in the schedule (default 0.04, 0.02, 0.01) and extrapolated
    to sigma = 0 with one first-order Richardson step.  ``richardson_N``
    adds a first-order extrapolation in 1/N using N and 2N - 1 nodes.
    """
    if N < 64:
        raise ValidationError("rl_opnorm_l2 needs N >= 64")
    order = as_order(z)
    zz = order.z

    def at(zc):
        v = _l2_norm_interior(zc, N, method)
        if richardson_N:
            v2 = _l2_norm_interior(zc, 2 * N - 1, method)
            v = 2 * v2 - v
        return v

    if zz.real > 0:
        val = at(zz)
        rep = None
    elif zz == 0:
        val, rep = 1.0, None
    else:
        sig = cv.check_schedule(sigma_schedule if sigma_schedule is not None else L2_SIGMAS)
        vals = [at(complex(sk, zz.imag)) for sk in sig]
        val = float(cv.richardson_first_order(sig[-2], sig[-1], vals[-2], vals[-1]))
        rep = cv.assess_scalar_sequence(sig, vals)
        rep.extrapolated = val
    return (val, rep) if return_report else val


def hat(center: float, width: float):
    """Tent function of height 1 supported on [center - width, center + width]."""
    return lambda t: np.maximum(0.0, 1.0 - np.abs(np.asarray(t) - center) / width)


def default_holder_family(alpha: float, grid: Grid):
    """Monomials t^beta for beta in {alpha, 0.6, 0.8, 1} and five hats."""
    fam = []
    for beta in sorted({float(alpha), 0.6, 0.8, 1.0}):
        fam.append(SampledFunction.from_callable(grid, lambda t, b=beta: np.asarray(t) ** b,
                                                 label=f"t^{beta}", exponents=(beta,)))
    for c in (0.2, 0.35, 0.5, 0.65, 0.8):
        fam.append(SampledFunction.from_callable(grid, hat(c, 0.1), label=f"hat({c})"))
    return fam


def _check_lip0(f: SampledFunction, alpha: float) -> float:
    if abs(f.values[0]) > 1e-12 * max(sup_norm(f), 1.0):
        raise DomainError("Hoelder estimators need f(0) = 0")
    hn = holder_seminorm(f, alpha)
    if hn == 0.0:
        raise DomainError("family member has zero Hoelder seminorm")
    return hn


def rl_opnorm_holder_estimate(z, alpha: float, family=None, N: int = 1025) -> float:
    """Lower bound for the norm of J(z) on Lip_0^alpha: the largest ratio of
    discrete seminorms over ``family``."""
    zz = _interior(z)
    if family is None:
        family = default_holder_family(alpha, Grid.uniform_unit(N))
    best = 0.0
    for f in family:
        denom = _check_lip0(f, alpha)
        best = max(best, holder_seminorm(rl_apply(zz, f), alpha) / denom)
    return float(best)


def rl_regularity_embedding_check(alpha: float, f: SampledFunction) -> float:
    """||J(alpha) f||_alpha / ||f||_inf (bounded by 2 / Gamma(alpha + 1))."""
    s = sup_norm(f)
    if s == 0.0:
        return 0.0
    if abs(f.values[0]) > 1e-12 * s:
        raise DomainError("embedding check needs f(0) = 0")
    return float(holder_seminorm(rl_apply(float(alpha), f), alpha) / s)


def holder_small_order_bound(z, alpha: float) -> float:
    """Upper bound for the Lip_0^alpha norm of J(z), valid for 0 < |z| <= (1 - alpha)/2:
    (5/alpha + 2|z - 1|/(1 - alpha))/|Gamma(z)| + (1 + 2^(1+alpha))/|Gamma(z + 1)|."""
    z = complex(z)
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    if not 0 < abs(z) <= (1 - alpha) / 2 + 1e-15:
        raise DomainError("the small-order bound needs 0 < |z| <= (1 - alpha)/2")
    rg0 = abs(complex(reciprocal_gamma(z)))
    rg1 = abs(complex(reciprocal_gamma(z + 1)))
    return float(rg0 * (5 / alpha + 2 * abs(z - 1) / (1 - alpha)) + (1 + 2 ** (1 + alpha)) * rg1)


def holder_real_order_bound(alpha: float) -> float:
    """2/Gamma(alpha + 1): bounds J(alpha) on Lip_0^alpha and J(alpha): C_0 -> Lip_0^alpha."""
    return 2.0 / math.gamma(float(alpha) + 1.0)
