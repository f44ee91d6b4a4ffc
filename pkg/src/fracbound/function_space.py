"""Grids, sampled functions and the norms operators are measured in.

Two kinds of grid exist.  ``closed`` grids cover [0, 1] and contain both
endpoints; ``weighted`` grids cover (0, a] and never contain 0.  Weighted
grids built by :meth:`Grid.geometric_grid` are uniform in ln x, which is where
the dilation and Hadamard operators become convolutions.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import ExtrapolationError, ValidationError, WeightSingularityError

CLOSED = "closed"
WEIGHTED = "weighted"
_UNIFORM_RTOL = 1e-9


def _is_uniform(v):
    d = np.diff(v)
    return bool(np.all(np.abs(d - d.mean()) <= _UNIFORM_RTOL * abs(d.mean())))


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing nodes on [0, 1] (closed) or (0, a] (weighted)."""

    nodes: np.ndarray
    kind: str
    uniform: bool = False
    geometric: bool = False

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=np.float64)
        object.__setattr__(self, "nodes", x)
        x.setflags(write=False)
        if x.ndim != 1 or x.size < 3:
            raise ValidationError("a grid needs at least 3 nodes")
        if not np.all(np.isfinite(x)) or np.any(np.diff(x) <= 0):
            raise ValidationError("grid nodes must be finite and strictly increasing")
        if self.kind == CLOSED:
            if x[0] != 0.0 or x[-1] != 1.0:
                raise ValidationError("closed grids must start at 0 and end at 1")
        elif self.kind == WEIGHTED:
            if x[0] <= 0.0:
                raise ValidationError("weighted grids must exclude 0")
        else:
            raise ValidationError(f"unknown grid kind {self.kind!r}")

    # constructors -------------------------------------------------------
    @classmethod
    def uniform_unit(cls, n: int) -> "Grid":
        """n equispaced nodes on [0, 1]."""
        return cls(np.linspace(0.0, 1.0, int(n)), CLOSED, uniform=True)

    @classmethod
    def geometric_grid(cls, a: float, n: int, x_min: float) -> "Grid":
        """n nodes on [x_min, a], equispaced in ln x."""
        if not (0 < x_min < a):
            raise ValidationError("need 0 < x_min < a")
        u = np.linspace(np.log(x_min / a), 0.0, int(n))
        x = a * np.exp(u)
        x[-1] = a
        return cls(x, WEIGHTED, geometric=True)

    @classmethod
    def geometric_step(cls, a: float, log_step: float, n: int) -> "Grid":
        """n nodes ending at a with fixed spacing ``log_step`` in ln x."""
        u = -log_step * np.arange(int(n) - 1, -1, -1, dtype=np.float64)
        x = a * np.exp(u)
        x[-1] = a
        return cls(x, WEIGHTED, geometric=True)

    @classmethod
    def from_nodes(cls, nodes, kind: str = CLOSED) -> "Grid":
        x = np.asarray(nodes, dtype=np.float64)
        if kind == CLOSED:
            return cls(x, kind, uniform=_is_uniform(x))
        geo = bool(x.size >= 3 and x[0] > 0 and _is_uniform(np.log(x)))
        return cls(x, kind, geometric=geo)

    # geometry -----------------------------------------------------------
    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def __len__(self):
        return self.size

    @property
    def step(self) -> float:
        """Node spacing of a uniform closed grid."""
        if not self.uniform:
            raise ValidationError("step is defined for uniform grids only")
        return 1.0 / (self.size - 1)

    @property
    def log_step(self) -> float:
        """Spacing in ln x of a geometric grid."""
        if not self.geometric:
            raise ValidationError("log_step is defined for geometric grids only")
        return float(np.log(self.nodes[-1] / self.nodes[0]) / (self.size - 1))

    @property
    def x_min(self) -> float:
        return float(self.nodes[0])

    @property
    def upper(self) -> float:
        return float(self.nodes[-1])

    def refine(self, factor: int = 2) -> "Grid":
        """Insert ``factor - 1`` nodes in every cell (in ln x if geometric)."""
        m = (self.size - 1) * int(factor) + 1
        if self.geometric:
            return Grid.geometric_grid(self.upper, m, self.x_min)
        if self.uniform:
            return Grid.uniform_unit(m)
        s = np.linspace(0.0, 1.0, int(factor) + 1)[:-1]
        x = self.nodes
        fine = (x[:-1, None] + np.diff(x)[:, None] * s[None, :]).ravel()
        return Grid.from_nodes(np.append(fine, x[-1]), self.kind)

    def describe(self) -> dict:
        d = {"kind": self.kind, "N": self.size}
        if self.kind == WEIGHTED:
            d.update(a=self.upper, x_min=self.x_min, geometric=self.geometric)
        else:
            d.update(uniform=self.uniform)
        return d


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples on a grid, optionally with the exact function behind them.

    ``source`` is used by operations that need values off the grid
    (dilations, the Boyd form).  When it is absent they interpolate.
    ``meta["exponents"]``, when present, lists the powers t^gamma the
    function is built from near 0; quadratures use it for starting weights.
    """

    grid: Grid
    values: np.ndarray
    source: Optional[Callable] = field(default=None, repr=False)
    label: str = ""
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if v.size != self.grid.size:
            raise ValidationError("values and grid have different lengths")
        if not np.all(np.isfinite(v)):
            raise ValidationError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, func: Callable, label: str = "",
                      exponents=None) -> "SampledFunction":
        vals = np.broadcast_to(np.asarray(func(grid.nodes), dtype=np.complex128), grid.nodes.shape)
        meta = {} if exponents is None else {"exponents": tuple(complex(e) for e in exponents)}
        return cls(grid, vals.copy(), source=func, label=label, meta=meta)

    @property
    def nodes(self):
        return self.grid.nodes

    def with_values(self, values, label: str = "", meta=None) -> "SampledFunction":
        return SampledFunction(self.grid, values, label=label, meta=dict(meta or {}))

    @property
    def exponents(self):
        return self.meta.get("exponents")

    def evaluate(self, x) -> np.ndarray:
        """Values at arbitrary points inside the grid's closure."""
        x = np.asarray(x, dtype=np.float64)
        if self.source is not None:
            return np.broadcast_to(np.asarray(self.source(x), dtype=np.complex128), x.shape).copy()
        return _interp(self.grid, self.values, x)

    def __mul__(self, other):
        if isinstance(other, SampledFunction):
            _same_grid(self, other)
            return self.with_values(self.values * other.values)
        return self.with_values(self.values * complex(other), meta=self.meta)

    __rmul__ = __mul__

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __neg__(self):
        return self.with_values(-self.values)

    # serialization ------------------------------------------------------
    def to_csv(self, path=None, imag: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "re", "im"] if imag else ["node", "re"])
        for x, v in zip(self.nodes, self.values):
            row = [repr(float(x)), repr(float(v.real))]
            if imag:
                row.append(repr(float(v.imag)))
            w.writerow(row)
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text, kind: Optional[str] = None) -> "SampledFunction":
        if "\n" in str(path_or_text):
            text = str(path_or_text)
        else:
            with open(path_or_text) as fh:
                text = fh.read()
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        try:
            arr = np.array([[float(c) for c in r] for r in rows])
        except ValueError as exc:
            raise ValidationError(f"non-numeric or ragged CSV: {exc}") from exc
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise ValidationError("CSV must have 2 or 3 columns: node, re[, im]")
        vals = arr[:, 1] + (1j * arr[:, 2] if arr.shape[1] == 3 else 0.0)
        if kind is None:
            kind = CLOSED if arr[0, 0] == 0.0 else WEIGHTED
        return cls(Grid.from_nodes(arr[:, 0], kind), vals)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.describe(),
            "nodes": self.nodes.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
            "label": self.label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SampledFunction":
        g = Grid.from_nodes(d["nodes"], d.get("grid", {}).get("kind", CLOSED))
        vals = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d.get("im", np.zeros(len(d["re"]))), dtype=float)
        return cls(g, vals, label=d.get("label", ""))

    @classmethod
    def from_json(cls, text: str) -> "SampledFunction":
        return cls.from_dict(json.loads(text))


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _same_grid(f, g):
    if f.grid is not g.grid and not np.array_equal(f.grid.nodes, g.grid.nodes):
        raise ValidationError("functions live on different grids")


def _interp(grid: Grid, values, x):
    lo, hi = grid.nodes[0], grid.nodes[-1]
    slack = 1e-12 * max(1.0, abs(hi))
    if np.any(x < lo - slack * (lo if grid.kind == WEIGHTED else 1)) or np.any(x > hi + slack):
        raise ExtrapolationError("interpolation point outside the grid")
    x = np.clip(x, lo, hi)
    if grid.geometric:
        xp, xq = np.log(grid.nodes), np.log(x)
    else:
        xp, xq = grid.nodes, x
    return np.interp(xq, xp, values.real) + 1j * np.interp(xq, xp, values.imag)


def resample(f: SampledFunction, g: Grid) -> SampledFunction:
    """Piecewise-linear interpolation onto another grid (linear in ln x on
    geometric grids)."""
    if g is f.grid or (g.size == f.grid.size and np.array_equal(g.nodes, f.grid.nodes)):
        return SampledFunction(g, f.values.copy(), label=f.label)
    return SampledFunction(g, _interp(f.grid, f.values, g.nodes), label=f.label)


# norms -----------------------------------------------------------------

def sup_norm(f: SampledFunction) -> float:
    v = f.values
    return float(np.abs(v).max()) if v.size else 0.0


@dataclass(frozen=True)
class WeightedNorm:
    """Value of a weighted L^p norm over the grid plus an estimate of the
    contribution of (0, x_min) that the grid cannot see."""

    value: float
    tail: float


def _power_moments(x0, x1, s):
    """Integrals of x^(s-1) and (x - x0) x^(s-1) over [x0, x1]."""
    if abs(s) < 1e-14:
        m0 = np.log(x1 / x0)
    else:
        m0 = (x1 ** s - x0 ** s) / s
    if abs(s + 1) < 1e-14:
        m1 = np.log(x1 / x0)
    else:
        m1 = (x1 ** (s + 1) - x0 ** (s + 1)) / (s + 1)
    return m0, m1 - x0 * m0


def weighted_lp(f: SampledFunction, c: float, p: float) -> WeightedNorm:
    """(integral of |x^c f(x)|^p dx/x)^(1/p) with a tail estimate.

    On geometric grids the measure dx/x is uniform in u = ln x and the
    trapezoid rule is used in u.  Elsewhere the weight x^(cp-1) is
    integrated exactly against the piecewise-linear interpolant of |f|^p,
    which for c = 1/p is the ordinary trapezoid rule.
    """
    if p < 1:
        raise ValidationError("weighted_lp needs p >= 1")
    s = c * p
    # scale out the peak so |f|^p neither under- nor overflows
    mag = np.abs(f.values)
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0.0 or not np.isfinite(peak):
        peak = 1.0
    g = (mag / peak) ** p
    x = f.nodes
    if f.grid.geometric:
        integrand = x ** s * g
        total = np.trapezoid(integrand, dx=f.grid.log_step)
    else:
        total = 0.0
        start = 0
        if x[0] == 0.0:
            if s <= 0 and g[0] != 0:
                raise WeightSingularityError(
                    "x^(c p - 1) is not integrable at 0 for c p <= 0 unless f(0) = 0")
            if s + 1 <= 0 and g[1] != 0:
                raise WeightSingularityError("weighted integrand is not integrable at 0")
            # first cell from 0: closed-form moments of x^(s-1) and x^s
            x1 = x[1]
            m0 = x1 ** s / s if s > 0 else 0.0
            m1 = x1 ** (s + 1) / (s + 1)
            total += g[0] * m0 + (g[1] - g[0]) / x1 * m1
            start = 1
        x0, x1 = x[start:-1], x[start + 1:]
        m0, m1 = _power_moments(x0, x1, s)
        g0, g1 = g[start:-1], g[start + 1:]
        total += float(np.sum(g0 * m0 + (g1 - g0) / (x1 - x0) * m1))
    tail = 0.0
    if x[0] > 0:
        tail = (np.inf if g[0] > 0 else 0.0) if s <= 0 else x[0] ** s * g[0] / s
    value = peak * float(total) ** (1.0 / p)
    return WeightedNorm(value, peak * float(tail) ** (1.0 / p) if np.isfinite(tail) else np.inf)


def weighted_lp_norm(f: SampledFunction, c: float, p: float) -> float:
    """Norm of f in the weighted space with measure x^(cp) dx/x."""
    return weighted_lp(f, c, p).value


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ValidationError("Hoelder exponent must lie in (0, 1)")


def _peak(v):
    # the pair kernels compare squared moduli; rescale so tiny data keeps its digits
    m = float(np.abs(v).max()) if v.size else 0.0
    return m if m > 0 and np.isfinite(m) else 1.0


def holder_seminorm(f: SampledFunction, alpha: float, adjacent_only: bool = False) -> float:
    """Largest difference quotient |f(t)-f(s)|/|t-s|^alpha over node pairs.

    A lower bound for the continuum seminorm.  ``adjacent_only`` restricts
    the scan to neighbouring nodes (O(N) instead of O(N^2)).
    """
    _check_alpha(alpha)
    if f.grid.kind != CLOSED:
        raise ValidationError("holder_seminorm needs a grid on [0, 1]")
    x, v = f.nodes, f.values
    if adjacent_only:
        return float((np.abs(np.diff(v)) / np.diff(x) ** alpha).max())
    m = _peak(v)
    return m * float(_kernels.holder_pair_max(x, v / m, alpha, np.inf, f.grid.uniform))


def little_holder_modulus(f: SampledFunction, alpha: float, delta: float,
                          window: Optional[tuple] = None) -> float:
    """Difference-quotient sup over pairs with 0 < |t-s| <= delta.

    ``window=(lo, hi)`` restricts the scan to nodes in [lo, hi].
    """
    _check_alpha(alpha)
    if delta <= 0:
        raise ValidationError("delta must be positive")
    x, v = f.nodes, f.values
    uniform = f.grid.uniform
    if window is not None:
        keep = (x >= window[0]) & (x <= window[1])
        x, v = x[keep], v[keep]
        if x.size < 2:
            return 0.0
    m = _peak(v)
    return m * float(_kernels.holder_pair_max(x, v / m, alpha, float(delta), uniform))


@dataclass(frozen=True)
class NormSpec:
    """One of the four norms: sup, weighted L^p, Hoelder, little Hoelder."""

    kind: str
    c: float = 0.0
    p: float = 2.0
    alpha: float = 0.5
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sup", "weighted_lp", "holder", "little_holder"):
            raise ValidationError(f"unknown norm kind {self.kind!r}")
        if self.kind == "weighted_lp" and self.p < 1:
            raise ValidationError("p must be >= 1")
        if self.kind in ("holder", "little_holder"):
            _check_alpha(self.alpha)
        if self.kind == "little_holder" and self.delta <= 0:
            raise ValidationError("delta must be positive")

    @classmethod
    def sup(cls):
        return cls("sup")

    @classmethod
    def weighted(cls, c: float, p: float):
        return cls("weighted_lp", c=float(c), p=float(p))

    @classmethod
    def holder(cls, alpha: float):
        return cls("holder", alpha=float(alpha))

    @classmethod
    def little_holder(cls, alpha: float, delta: float):
        return cls("little_holder", alpha=float(alpha), delta=float(delta))

    def __call__(self, f: SampledFunction) -> float:
        if self.kind == "sup":
            return sup_norm(f)
        if self.kind == "weighted_lp":
            return weighted_lp_norm(f, self.c, self.p)
        if self.kind == "holder":
            return holder_seminorm(f, self.alpha)
        return little_holder_modulus(f, self.alpha, self.delta)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "weighted_lp":
            d.update(c=self.c, p=self.p)
        elif self.kind != "sup":
            d["alpha"] = self.alpha
            if self.kind == "little_holder":
                d["delta"] = self.delta
        return d
