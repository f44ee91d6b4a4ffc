"""Limits as sigma -> 0+ and their verdicts.

A trajectory g(sigma_1), g(sigma_2), ... is declared convergent when the
successive differences shrink geometrically (ratio below 0.75).  The limit
is then estimated with one Richardson step assuming first-order behaviour
in sigma.  Otherwise the log-log slope of the norms is fitted; a slope
within 0.15 of a non-zero integer is reported as a power-law divergence
with that exponent, anything else as inconclusive.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ValidationError

CONVERGED = "converged"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"

DECAY_RATIO = 0.75
SLOPE_TOL = 0.15


@dataclass
class ConvergenceReport:
    sigma_values: List[float]
    norms: List[float]
    differences: List[float]
    verdict: str
    extrapolated: Optional[object] = None
    slope: Optional[float] = None
    exponent: Optional[int] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def converged(self):
        return self.verdict == CONVERGED

    def to_dict(self):
        ext = self.extrapolated
        if isinstance(ext, (complex, np.complexfloating)):
            ext = [ext.real, ext.imag]
        elif isinstance(ext, (float, np.floating)):
            ext = float(ext)
        elif ext is not None and not isinstance(ext, (int, list)):
            ext = None  # arrays are written separately
        return {
            "sigma": [float(s) for s in self.sigma_values],
            "value": [float(v) for v in self.norms],
            "differences": [float(d) for d in self.differences],
            "slope": None if self.slope is None else float(self.slope),
            "exponent": self.exponent,
            "verdict": self.verdict,
            "extrapolated": ext,
            "warnings": list(self.warnings),
        }


def check_schedule(sigmas, min_len=2):
    s = np.asarray(sigmas, dtype=np.float64)
    if s.ndim != 1 or s.size < min_len:
        raise ValidationError(f"sigma schedule needs at least {min_len} values")
    if np.any(s <= 0) or np.any(np.diff(s) >= 0):
        raise ValidationError("sigma schedule must be positive and strictly decreasing")
    return s


def richardson_first_order(sig_prev, sig_last, g_prev, g_last):
    """Eliminate the O(sigma) term from two samples."""
    return g_last + (g_last - g_prev) * (sig_last / (sig_prev - sig_last))


def loglog_slope(x, y):
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def classify_divergence(sigmas, norms):
    """(verdict, slope, exponent) from the power-law fit of norms vs sigma."""
    norms = np.asarray(norms, dtype=float)
    if np.any(~np.isfinite(norms)) or np.any(norms <= 0):
        return INCONCLUSIVE, None, None
    slope = loglog_slope(sigmas, norms)
    k = int(round(slope))
    if k != 0 and abs(slope - k) <= SLOPE_TOL:
        return DIVERGED, slope, k
    return INCONCLUSIVE, slope, None


def assess(sigmas, samples, norm, zero_tol=1e-13):
    """Build a report for ``samples[k] = g(sigmas[k])``.

    ``norm`` maps a sample difference (or a sample) to a real number.
    """
    sigmas = check_schedule(sigmas)
    norms = [float(norm(g)) for g in samples]
    diffs = [float(norm(samples[k] - samples[k - 1])) for k in range(1, len(samples))]
    scale = max(max(norms), 1e-300)
    ratios = [diffs[k] / diffs[k - 1] if diffs[k - 1] > 0 else 0.0 for k in range(1, len(diffs))]
    tiny = all(d <= zero_tol * scale for d in diffs)
    if tiny or (ratios and all(r < DECAY_RATIO for r in ratios) and np.all(np.isfinite(norms))):
        ext = richardson_first_order(sigmas[-2], sigmas[-1], samples[-2], samples[-1])
        slope = loglog_slope(sigmas[1:], diffs) if not tiny and all(d > 0 for d in diffs) else None
        return ConvergenceReport(list(sigmas), norms, diffs, CONVERGED, ext, slope)
    verdict, slope, k = classify_divergence(sigmas, norms)
    return ConvergenceReport(list(sigmas), norms, diffs, verdict, None, slope, k)


def assess_scalar_sequence(sigmas, values):
    """Report for a sequence of positive numbers (operator-norm estimates)."""
    values = [float(v) for v in values]
    return assess(sigmas, [np.float64(v) for v in values], abs)
