"""Named test functions and sequences used by the CLI and the tests.

Function presets: ``one``, ``linear``, ``monomial(beta)``,
``hat(center,width)``, ``sin``, ``holder(alpha)``.  Sequence presets for
the diagonal example: ``unit(k)``, ``exponential``, ``polynomial(q)``.
"""
import re

import numpy as np

from .errors import ValidationError
from .function_space import SampledFunction
from .riemann_liouville import hat

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def _parse(spec: str):
    m = _CALL.match(spec)
    if not m:
        raise ValidationError(f"cannot parse preset {spec!r}")
    name, args = m.group(1), m.group(2)
    vals = [float(a) for a in args.split(",")] if args and args.strip() else []
    return name, vals


def _want(name, vals, n):
    if len(vals) != n:
        raise ValidationError(f"preset {name} takes {n} argument(s)")


def function_preset(spec: str):
    """(callable, exponents) for a preset string."""
    name, vals = _parse(spec)
    if name == "one":
        _want(name, vals, 0)
        return (lambda x: np.ones_like(np.asarray(x, dtype=float))), None
    if name == "linear":
        _want(name, vals, 0)
        return (lambda x: np.asarray(x, dtype=float)), None
    if name in ("monomial", "holder"):
        _want(name, vals, 1)
        b = vals[0]
        if name == "holder" and not 0 < b < 1:
            raise ValidationError("holder(alpha) needs 0 < alpha < 1")
        return (lambda x: np.asarray(x, dtype=float) ** b), (b,)
    if name == "hat":
        _want(name, vals, 2)
        if vals[1] <= 0:
            raise ValidationError("hat width must be positive")
        return hat(vals[0], vals[1]), None
    if name == "sin":
        _want(name, vals, 0)
        return (lambda x: np.sin(np.pi * np.asarray(x, dtype=float))), None
    raise ValidationError(f"unknown function preset {name!r}")


def sample(spec: str, grid) -> SampledFunction:
    func, exps = function_preset(spec)
    return SampledFunction.from_callable(grid, func, label=spec, exponents=exps)


def sequence_preset(spec: str, n: int) -> np.ndarray:
    name, vals = _parse(spec)
    k = np.arange(int(n), dtype=float)
    if name == "unit":
        _want(name, vals, 1)
        e = np.zeros(int(n), dtype=np.complex128)
        idx = int(vals[0])
        if not 0 <= idx < n:
            raise ValidationError("unit index outside the truncation")
        e[idx] = 1.0
        return e
    if name == "exponential":
        return np.exp(-k * (vals[0] if vals else 1.0)).astype(np.complex128)
    if name == "polynomial":
        return ((k + 1.0) ** -(vals[0] if vals else 1.0)).astype(np.complex128)
    raise ValidationError(f"unknown sequence preset {name!r}")
