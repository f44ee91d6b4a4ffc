"""The diagonal holomorphic semigroup of angle pi/4 on truncated l^2.

    T(z) x_n = exp(lam_n z) x_n,   lam_n = -n + i n + i ln(n + 1),  n = 0, 1, ...

On the upper edge z = t e^(i pi/4) every component is damped, so the
boundary operator exists on all of l^2.  On the lower edge z = t e^(-i pi/4)
component n grows like (n + 1)^(t / sqrt 2), so the boundary value exists
only for sequences decaying faster than every power.  Everything is
computed in log-space so growth shows up as a verdict, never as inf.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import DomainError, ValidationError

SQRT2 = np.sqrt(2.0)
ANGLE = np.pi / 4
LOG_MAX = np.log(np.finfo(np.float64).max) - 1.0  # ~ 708.8
MEMBER = "member"
NON_MEMBER = "non-member"
INCONCLUSIVE = "inconclusive"
MEMBER_RATIO = 0.9
GROWTH_FACTOR = 1.5
DEFAULT_N = 2048


def eigenvalues(n: int) -> np.ndarray:
    k = np.arange(int(n), dtype=np.float64)
    return -k + 1j * k + 1j * np.log1p(k)


@dataclass(frozen=True)
class DiagonalGenerator:
    """The fixed eigenvalue rule truncated to N components."""

    N: int = DEFAULT_N

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("truncation N must be >= 1")

    @property
    def eigenvalues(self):
        return eigenvalues(self.N)


@dataclass(frozen=True)
class SectorPoint:
    """z = rho e^(i theta) with |theta| <= pi/4."""

    rho: float
    theta: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise DomainError("modulus must be >= 0")
        if abs(self.theta) > ANGLE * (1 + 1e-12):
            raise DomainError("angle must lie in [-pi/4, pi/4]")

    @property
    def z(self) -> complex:
        return complex(self.rho * np.exp(1j * self.theta))

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(abs(z), float(np.angle(z)) if z != 0 else 0.0)


@dataclass
class DiagResult:
    values: np.ndarray
    log_modulus: np.ndarray
    overflow: bool
    overflow_index: List[int] = field(default_factory=list)

    @property
    def norm(self) -> float:
        return log_norm_to_float(log_l2_norm(self.log_modulus))


def log_l2_norm(log_mod) -> float:
    """log of the l^2 norm from componentwise log moduli."""
    lm = np.asarray(log_mod, dtype=float)
    lm = lm[np.isfinite(lm)]
    if lm.size == 0:
        return -np.inf
    top = lm.max()
    return float(top + 0.5 * np.log(np.sum(np.exp(2 * (lm - top)))))


def log_norm_to_float(x) -> float:
    return float(np.exp(x)) if x < LOG_MAX else np.inf


def _seq(x):
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValidationError("sequence must be finite")
    return x


def diag_apply(z, x, N: int = DEFAULT_N) -> DiagResult:
    """Componentwise exp(lam_n z) x_n.

    Components whose log modulus would exceed the float range are left as
    nan in ``values`` and flagged; ``log_modulus`` stays exact.
    """
    pt = z if isinstance(z, SectorPoint) else SectorPoint.from_complex(z)
    x = _seq(x)
    if x.size > N:
        raise ValidationError("sequence longer than the truncation N")
    lam = eigenvalues(x.size)
    expo = lam * pt.z
    with np.errstate(divide="ignore"):
        logmod = expo.real + np.log(np.abs(x))
    over = np.flatnonzero(logmod > LOG_MAX)
    vals = np.full(x.size, np.nan, dtype=np.complex128)
    ok = logmod <= LOG_MAX
    vals[ok] = np.exp(expo[ok]) * x[ok]
    vals[np.abs(x) == 0] = 0.0
    return DiagResult(vals, logmod, bool(over.size), over.tolist())


def upper_boundary_norm(t: float, x) -> float:
    """l^2 norm of T(t e^(i pi/4)) x; damping exp(-sqrt2 n t - t ln(n+1)/sqrt2)."""
    if t < 0:
        raise ValidationError("t must be >= 0")
    x = _seq(x)
    n = np.arange(x.size, dtype=float)
    with np.errstate(divide="ignore"):
        lm = -SQRT2 * n * t - t * np.log1p(n) / SQRT2 + np.log(np.abs(x))
    return log_norm_to_float(log_l2_norm(lm))


def lower_boundary_log_partial_sums(x, t: float, N_schedule) -> np.ndarray:
    """log of sum_{n < N} (n+1)^(sqrt2 t) |x_n|^2 for each N in the schedule."""
    x = _seq(x)
    sched = np.asarray(N_schedule, dtype=int)
    if np.any(np.diff(sched) <= 0) or sched[0] < 1:
        raise ValidationError("N schedule must be increasing and positive")
    if sched[-1] > x.size:
        x = np.concatenate([x, np.zeros(sched[-1] - x.size, complex)])
    n = np.arange(sched[-1], dtype=float)
    with np.errstate(divide="ignore"):
        terms = SQRT2 * t * np.log1p(n) + 2 * np.log(np.abs(x[: sched[-1]]))
    out = np.empty(sched.size)
    for i, m in enumerate(sched):
        lt = terms[:m]
        lt = lt[np.isfinite(lt)]
        if lt.size == 0:
            out[i] = -np.inf
        else:
            top = lt.max()
            out[i] = top + np.log(np.sum(np.exp(lt - top)))
    return out


def default_schedule(N: int = DEFAULT_N):
    return [N // 8, N // 4, N // 2, N]


def lower_boundary_membership(x, t: float, N_schedule=None) -> dict:
    """Heuristic verdict on whether T(t e^(-i pi/4)) x stays in l^2.

    Member if the partial-sum increments shrink geometrically (ratio below
    0.9) over the last three schedule points; non-member if the last
    increment grew by more than 1.5 relative to the one before.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    sched = list(N_schedule) if N_schedule is not None else default_schedule()
    if len(sched) < 3:
        raise ValidationError("N schedule needs at least 3 points")
    logs = lower_boundary_log_partial_sums(x, t, sched)
    # increments between consecutive partial sums, in log form
    incs = []
    for a, b in zip(logs[:-1], logs[1:]):
        if not np.isfinite(b) or b <= a or not np.isfinite(a):
            incs.append(-np.inf if np.isfinite(b) or b == -np.inf else np.inf)
        else:
            incs.append(b + np.log1p(-np.exp(a - b)))
    incs = np.array(incs)
    last3 = incs[-2:]
    if np.all(np.isneginf(last3)):
        verdict, ratios = MEMBER, [0.0, 0.0]
    else:
        ratios = [float(np.exp(b - a)) if np.isfinite(a) else (0.0 if np.isneginf(b) else np.inf)
                  for a, b in zip(incs[:-1], incs[1:])]
        if all(r < MEMBER_RATIO for r in ratios[-2:]):
            verdict = MEMBER
        elif ratios[-1] > GROWTH_FACTOR:
            verdict = NON_MEMBER
        else:
            verdict = INCONCLUSIVE
    return {
        "verdict": verdict,
        "t": float(t),
        "N_schedule": [int(s) for s in sched],
        "log_partial_sums": [float(v) for v in logs],
        "increment_ratios": [float(r) for r in ratios],
    }
