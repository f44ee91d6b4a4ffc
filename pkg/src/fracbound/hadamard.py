"""Hadamard-type fractional integrals on weighted spaces.

In the log coordinate u = ln x both operators are Laplace-type
convolutions:

    J f(x) = 1/Gamma(a) int_0^inf u^(a-1) e^(-mu u) f(x e^(-u)) du
    I f(x) = 1/Gamma(a) int_0^inf u^(a-1) e^(-mu u) f(x e^(+u)) du

On a geometric grid the shift by one step in u is an index shift, so the
product-integration coefficients of the Riemann-Liouville rule apply
directly to the samples e^(-mu u) f(x e^(-+u)).  Values below the smallest
node (J) or above the largest (I) are taken as zero; every result carries
the u-length that truncation cuts off and a bound on the neglected tail.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaincc, gammainccinv, roots_genlaguerre

from . import convergence as cv
from .errors import DomainError, NotConvergedError, TruncationError, ValidationError
from .function_space import (CLOSED, Grid, SampledFunction, holder_seminorm, sup_norm,
                             weighted_lp)
from .quadrature import toeplitz_apply, toeplitz_coefficients
from .riemann_liouville import DEFAULT_SIGMAS, as_order
from .special import gamma, reciprocal_gamma

J_VARIANT = "J"
I_VARIANT = "I"
DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class HadamardParams:
    """mu, the weight exponent c and p of the space, and the variant.

    J needs Re mu > c, I needs Re mu > -c.
    """

    mu: complex = 1.0
    c: float = 0.0
    p: float = 2.0
    variant: str = J_VARIANT

    def __post_init__(self):
        object.__setattr__(self, "mu", complex(self.mu))
        if self.variant not in (J_VARIANT, I_VARIANT):
            raise ValidationError("variant must be 'J' or 'I'")
        if self.p < 1:
            raise ValidationError("p must be >= 1")
        if self.rate <= 0:
            need = "Re mu > c" if self.variant == J_VARIANT else "Re mu > -c"
            raise DomainError(
                f"{self.variant}-variant needs {need} (got mu={self.mu}, c={self.c}); "
                "the condition is sharp: the Hardy-type bound fails at equality")

    @property
    def rate(self) -> float:
        """Exponential decay rate of the dilation group on X_c^p."""
        if self.variant == J_VARIANT:
            return self.mu.real - self.c
        return self.mu.real + self.c

    @property
    def direction(self) -> str:
        return "contract" if self.variant == J_VARIANT else "expand"

    def to_dict(self):
        return {"mu": [self.mu.real, self.mu.imag], "c": self.c, "p": self.p,
                "variant": self.variant}


def _check_log_grid(f: SampledFunction):
    if not f.grid.geometric:
        raise ValidationError("Hadamard operators need a geometric grid on (0, a]")


def truncation_length(alpha, params: HadamardParams, tol: float = DEFAULT_TAIL_TOL) -> float:
    """u-length beyond which the relative tail of the Laplace integral is < tol.

    For |f(y)| <= K y^(-c) the neglected part relative to the full integral
    is Q(Re a, rate U), the regularized upper incomplete Gamma function.
    """
    a = as_order(alpha).z.real
    return float(gammainccinv(a, tol) / params.rate)


def _spans(f: SampledFunction, variant: str) -> np.ndarray:
    u = np.log(f.nodes / f.grid.x_min) if variant == J_VARIANT else np.log(f.grid.upper / f.nodes)
    return np.maximum(u, 0.0)


def _tail_factor(alpha: complex, params: HadamardParams, span) -> np.ndarray:
    a = alpha.real
    r = params.rate
    scale = math.gamma(a) * abs(reciprocal_gamma(alpha)) / r ** a
    return scale * gammaincc(a, r * np.asarray(span))


def _finish(f, vals, alpha, params, u_trunc, tail_tol):
    spans = _spans(f, params.variant)
    tail = _tail_factor(alpha, params, spans)
    valid = spans >= u_trunc
    if tail_tol is not None and not np.any(tail <= tail_tol):
        raise TruncationError(
            f"grid spans {spans.max():.3g} in ln x, tail bound {tail.min():.3g} exceeds {tail_tol:g}")
    meta = {"u_trunc": float(u_trunc), "valid": valid, "tail_bound": tail,
            "variant": params.variant}
    return SampledFunction(f.grid, vals, meta=meta)


def _kernel_weights(alpha: complex, params: HadamardParams, n: int, h: float):
    coef, first = toeplitz_coefficients(alpha, n)
    damp = np.exp(-params.mu * h * np.arange(n))
    return coef * damp, first * damp


def hadamard_apply(alpha, params: HadamardParams, f: SampledFunction,
                   tol: float = DEFAULT_TAIL_TOL, tail_tol: Optional[float] = None) -> SampledFunction:
    """J_mu^alpha f or I_mu^alpha f on a geometric grid.

    ``meta["valid"]`` marks nodes whose truncated tail is below ``tol``
    relative to the full integral.  With ``tail_tol`` set, a grid too short
    to reach that bound anywhere raises :class:`TruncationError`.
    """
    z = as_order(alpha).z
    if not z.real > 0:
        raise DomainError("Re alpha must be positive; use hadamard_boundary_apply for Re alpha = 0")
    gamma(z)
    _check_log_grid(f)
    n, h = f.grid.size, f.grid.log_step
    kern, first = _kernel_weights(z, params, n, h)
    scale = h ** z * reciprocal_gamma(z)
    # Convolve x^c f rather than f: the tilted kernel decays at the stability
    # rate and FFT round-off becomes relative to the X_c^p scale.
    lx = np.log(f.nodes / f.grid.upper)
    c = params.c if abs(params.c) * abs(lx[0]) < 600 else 0.0
    tilt = np.exp(c * lx)
    sign = 1.0 if params.variant == J_VARIANT else -1.0
    ramp = np.exp(sign * c * h * np.arange(n))
    kern, first = kern * ramp, first * ramp
    v = f.values * tilt
    if params.variant == J_VARIANT:
        vals = scale * toeplitz_apply(kern, first, v) / tilt
    else:
        vals = scale * toeplitz_apply(kern, first, v[::-1])[::-1] / tilt
    u_prev = float(f.meta.get("u_trunc", 0.0))
    return _finish(f, vals, z, params, u_prev + truncation_length(z, params, tol), tail_tol)


def dilation_semigroup_apply(t: float, mu, direction: str, f: SampledFunction) -> SampledFunction:
    """e^(-mu t) f(e^(-t) x) (contract) or e^(-mu t) f(e^(t) x) (expand).

    On a geometric grid with t a multiple of the log step this is an index
    shift.  Samples that fall outside the grid are set to 0 and counted in
    ``meta["zero_filled"]``.
    """
    if t < 0:
        raise ValidationError("dilation time must be >= 0")
    if direction not in ("contract", "expand"):
        raise ValidationError("direction must be 'contract' or 'expand'")
    mu = complex(mu)
    factor = np.exp(-mu * t)
    x = f.nodes
    n = x.size
    out = np.zeros(n, dtype=np.complex128)
    if t == 0:
        return SampledFunction(f.grid, f.values.copy(), meta={"zero_filled": 0})
    shift = None
    if f.grid.geometric:
        m = t / f.grid.log_step
        if abs(m - round(m)) <= 1e-9 * max(1.0, m):
            shift = int(round(m))
    if shift is not None:
        if shift < n:
            if direction == "contract":
                out[shift:] = factor * f.values[: n - shift]
            else:
                out[: n - shift] = factor * f.values[shift:]
        filled = min(shift, n)
    else:
        y = x * math.exp(-t if direction == "contract" else t)
        lo, hi = x[0], x[-1]
        inside = (y >= lo * (1 - 1e-14)) & (y <= hi * (1 + 1e-14))
        if f.grid.kind == CLOSED:
            inside = y <= hi * (1 + 1e-14)
        out[inside] = factor * f.evaluate(np.clip(y[inside], lo, hi))
        filled = int(np.count_nonzero(~inside))
    return SampledFunction(f.grid, out, meta={"zero_filled": filled})


def hadamard_from_power_formula(alpha, params: HadamardParams, f: SampledFunction,
                                tol: float = DEFAULT_TAIL_TOL) -> SampledFunction:
    """(1/Gamma(a)) int_0^inf t^(a-1) T(t) f dt accumulated over the orbit
    T(m h) f of the dilation semigroup."""
    z = as_order(alpha).z
    if not z.real > 0:
        raise DomainError("Re alpha must be positive")
    _check_log_grid(f)
    n, h = f.grid.size, f.grid.log_step
    coef, first = toeplitz_coefficients(z, n)
    acc = np.zeros(n, dtype=np.complex128)
    contract = params.direction == "contract"
    f0 = f.values[0 if contract else n - 1]
    damp = np.exp(-params.mu * h * np.arange(n))
    for m in range(n):
        orbit = dilation_semigroup_apply(m * h, params.mu, params.direction, f).values
        acc += coef[m] * orbit
        # the orbit leaves the grid after m steps at node k: close the integral there
        k = m if contract else n - 1 - m
        acc[k] += (first[m] - coef[m]) * damp[m] * f0
    vals = acc * (h ** z * reciprocal_gamma(z))
    return _finish(f, vals, z, params, truncation_length(z, params, tol), None)


def _restrict(f: SampledFunction, mask) -> SampledFunction:
    idx = np.flatnonzero(mask)
    if idx.size < 3:
        raise TruncationError("fewer than 3 nodes lie inside the truncation window")
    g = Grid(f.nodes[idx], f.grid.kind, geometric=f.grid.geometric)
    return SampledFunction(g, f.values[idx])


def valid_norm(f: SampledFunction, params: HadamardParams, mask=None) -> float:
    """X_c^p norm of f over the nodes marked valid."""
    if mask is None:
        mask = f.meta.get("valid", np.ones(f.grid.size, dtype=bool))
    return weighted_lp(_restrict(f, mask), params.c, params.p).value


def hadamard_semigroup_defect(alpha1, alpha2, params: HadamardParams, f: SampledFunction,
                              tol: float = DEFAULT_TAIL_TOL) -> float:
    """X_c^p norm, over the jointly valid window, of
    J^a1 J^a2 f - J^(a1 + a2) f."""
    lhs = hadamard_apply(alpha1, params, hadamard_apply(alpha2, params, f, tol), tol)
    rhs = hadamard_apply(as_order(alpha1).z + as_order(alpha2).z, params, f, tol)
    mask = lhs.meta["valid"] & rhs.meta["valid"]
    return valid_norm(lhs - rhs, params, mask)


def hadamard_boundary_apply(s: float, params: HadamardParams, f: SampledFunction,
                            sigma_schedule=DEFAULT_SIGMAS, tol: float = DEFAULT_TAIL_TOL):
    """Boundary operator of imaginary order is as the sigma -> 0+ limit,
    with differences measured in X_c^p on the valid window."""
    sig = cv.check_schedule(sigma_schedule)
    s = float(s)
    warn = []
    if params.p == 1:
        warn.append("p = 1: a boundary group is only guaranteed for 1 < p < inf")
    if s == 0.0:
        mask = f.meta.get("valid", np.ones(f.grid.size, dtype=bool))
        nrm = valid_norm(f, params, mask)
        rep = cv.ConvergenceReport(list(sig), [nrm] * sig.size, [0.0] * (sig.size - 1),
                                   cv.CONVERGED, f.values.copy(), warnings=warn)
        return SampledFunction(f.grid, f.values.copy(), meta=dict(f.meta)), rep
    outs = [hadamard_apply(complex(sk, s), params, f, tol) for sk in sig]
    mask = np.logical_and.reduce([o.meta["valid"] for o in outs])
    rep = cv.assess(sig, [o.values for o in outs],
                    lambda v: valid_norm(f.with_values(v), params, mask))
    rep.warnings.extend(warn)
    vals = rep.extrapolated if rep.converged else outs[-1].values
    meta = {"u_trunc": max(o.meta["u_trunc"] for o in outs), "valid": mask,
            "tail_bound": np.max([o.meta["tail_bound"] for o in outs], axis=0),
            "variant": params.variant}
    return SampledFunction(f.grid, vals, meta=meta), rep


def hadamard_boundary_group_defect(s1: float, s2: float, params: HadamardParams,
                                   f: SampledFunction, sigma_schedule=DEFAULT_SIGMAS,
                                   tol: float = DEFAULT_TAIL_TOL) -> float:
    """Sup over the valid window of |J^(i s1) J^(i s2) f - J^(i (s1+s2)) f|."""
    def lim(s, g):
        out, rep = hadamard_boundary_apply(s, params, g, sigma_schedule, tol)
        if not rep.converged:
            raise NotConvergedError(f"boundary limit at s={s} is {rep.verdict}", rep)
        return out

    lhs = lim(s1, lim(s2, f))
    rhs = lim(s1 + s2, f)
    mask = lhs.meta.get("valid", np.ones(f.grid.size, bool)) & rhs.meta.get("valid", np.ones(f.grid.size, bool))
    return float(np.abs((lhs.values - rhs.values)[mask]).max())


def cesaro_power(n: int, f: SampledFunction, tol: float = DEFAULT_TAIL_TOL) -> SampledFunction:
    """n-th power of the averaging operator (1/x) int_0^x f, computed as the
    Hadamard integral with alpha = n, mu = 1."""
    n = int(n)
    if n < 1:
        raise ValidationError("Cesaro power needs n >= 1")
    return hadamard_apply(float(n), HadamardParams(1.0, 0.0, 2.0, J_VARIANT), f, tol)


def cesaro_iterated(n: int, f: SampledFunction, tol: float = DEFAULT_TAIL_TOL) -> SampledFunction:
    """The averaging operator applied n times in succession."""
    g = f
    for _ in range(int(n)):
        g = cesaro_power(1, g, tol)
    return g


def cesaro_defect(n: int, f: SampledFunction, tol: float = DEFAULT_TAIL_TOL) -> float:
    """Relative sup-norm gap, over the jointly valid window, between the
    n-th power formula and n successive averages."""
    a = cesaro_power(n, f, tol)
    b = cesaro_iterated(n, f, tol)
    mask = a.meta["valid"] & b.meta["valid"]
    if np.count_nonzero(mask) < 3:
        raise TruncationError("fewer than 3 nodes lie inside the truncation window")
    d = np.abs(a.values - b.values)[mask].max()
    scale = np.abs(b.values[mask]).max()
    return float(d / scale) if scale > 0 else float(d)


def cesaro_boyd_form(n: int, f: SampledFunction, nodes: int = 64) -> SampledFunction:
    """(1/(n-1)!) int_0^1 (ln 1/s)^(n-1) f(s x) ds by generalized Gauss-Laguerre.

    With s = e^(-u) the weight is u^(n-1) e^(-u).  f is evaluated through
    its exact ``source`` when present, otherwise by log-linear
    interpolation with zero fill below the grid.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("Cesaro power needs n >= 1")
    u, w = roots_genlaguerre(int(nodes), n - 1)
    w = w / math.factorial(n - 1)
    x = f.nodes
    pts = x[:, None] * np.exp(-u)[None, :]
    if f.source is not None:
        vals = np.asarray(f.source(pts), dtype=np.complex128)
    else:
        vals = np.zeros(pts.shape, dtype=np.complex128)
        inside = pts >= f.grid.x_min
        vals[inside] = f.evaluate(pts[inside])
    out = vals @ w
    return SampledFunction(f.grid, out, label=f"boyd C^{n}")


def favard_inclusion_check(alpha: float, f: SampledFunction, t_list) -> float:
    """max_t t^(-alpha) ||T(t) f - f||_inf / |f|_alpha for the dilation
    f -> f(e^(-t) x) (mu = 0).  At most 1 for Hoelder-alpha functions."""
    hn = holder_seminorm(f, alpha)
    if hn == 0.0:
        # only constants have zero seminorm on a grid, and dilations fix them
        return 0.0
    best = 0.0
    for t in t_list:
        if t <= 0:
            raise ValidationError("dilation times must be positive")
        tf = dilation_semigroup_apply(float(t), 0.0, "contract", f)
        best = max(best, t ** (-alpha) * sup_norm(tf - f) / hn)
    return float(best)
