"""Complex Gamma function.

Lanczos approximation (g = 607/128, 15 terms) in log form for Re z >= 1/2
and the reflection formula below that.  Accurate to a few ulps times
|log Gamma(z)|, i.e. better than 1e-13 relative on |z| <= 50.
"""
import numpy as np

from .errors import PoleError, ValidationError

_G = 607.0 / 128.0
_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
POLE_TOL = 1e-14


def _as_complex(z):
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(z)):
        raise ValidationError("Gamma argument must be finite")
    return z


def _pole_mask(z):
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z - nearest) <= POLE_TOL)


def _lanczos_loggamma(z):
    # valid for Re z >= 1/2
    w = z - 1.0
    series = np.full(w.shape, _COEF[0], dtype=np.complex128)
    for k in range(1, _COEF.size):
        series = series + _COEF[k] / (w + k)
    t = w + _G + 0.5
    return _LOG_SQRT_2PI + (w + 0.5) * np.log(t) - t + np.log(series)


def _sinpi(z):
    # sin(pi z) with the real part reduced exactly, so integers give 0 exactly
    n = np.round(z.real)
    r = z.real - n
    sign = np.where(np.mod(n, 2) == 0, 1.0, -1.0)
    y = np.pi * z.imag
    return sign * (np.sin(np.pi * r) * np.cosh(y) + 1j * np.cos(np.pi * r) * np.sinh(y))


def _gamma_regular(z):
    out = np.empty(z.shape, dtype=np.complex128)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = np.exp(_lanczos_loggamma(z[right]))
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (_sinpi(zl) * np.exp(_lanczos_loggamma(1.0 - zl)))
    return out


def _maybe_scalar(value, like):
    return complex(value[()]) if np.ndim(like) == 0 else value


def gamma(z):
    """Gamma function of a complex scalar or array.

    Raises
    ------
    PoleError
        If any entry lies within 1e-14 of 0, -1, -2, ...
    """
    zz = _as_complex(z)
    if np.any(_pole_mask(zz)):
        raise PoleError(f"Gamma has a pole at {z!r}")
    return _maybe_scalar(_gamma_regular(np.atleast_1d(zz)).reshape(zz.shape), z)


def reciprocal_gamma(z):
    """1/Gamma(z), an entire function: exactly 0 at non-positive integers."""
    zz = np.atleast_1d(_as_complex(z))
    out = np.zeros(zz.shape, dtype=np.complex128)
    ok = ~_pole_mask(zz)
    if np.any(ok):
        zo = zz[ok]
        res = np.empty(zo.shape, dtype=np.complex128)
        right = zo.real >= 0.5
        res[right] = np.exp(-_lanczos_loggamma(zo[right]))
        left = ~right
        if np.any(left):
            zl = zo[left]
            res[left] = _sinpi(zl) * np.exp(_lanczos_loggamma(1.0 - zl)) / np.pi
        out[ok] = res
    return _maybe_scalar(out.reshape(np.shape(z)), z)


def loggamma_lanczos(z):
    """Principal-sheet-free log Gamma for Re z >= 1/2 (used for ratios)."""
    zz = _as_complex(z)
    if np.any(zz.real < 0.5):
        raise ValidationError("loggamma_lanczos needs Re z >= 1/2")
    return _maybe_scalar(_lanczos_loggamma(np.atleast_1d(zz)).reshape(zz.shape), z)
