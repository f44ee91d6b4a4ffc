"""Product integration of the kernel (t-s)^(z-1) on a uniform grid.

Data q is modelled as piecewise linear between nodes s_j = j h and the
kernel is integrated exactly against that model.  With unit spacing the
cell integrals are

    I0(m) = int_0^1 (m - th)^(z-1) dth
    I1(m) = int_0^1 (1 - th)(m - th)^(z-1) dth

for a cell whose left end lies m steps behind the target.  Combining two
neighbouring cells gives a Toeplitz coefficient per node, so the whole
rule is a causal convolution plus a correction for node 0.
"""
import numpy as np
from scipy.signal import fftconvolve

from . import _kernels
from .errors import DomainError
from .special import gamma, reciprocal_gamma

DIRECT_LIMIT = 4096


def cell_moments(z, n):
    """I0(m), I1(m) for m = 1..n (index m-1)."""
    z = complex(z)
    m = np.arange(1, n + 1, dtype=np.float64)
    i0 = np.empty(n, dtype=np.complex128)
    i1 = np.empty(n, dtype=np.complex128)
    i0[0] = 1.0 / z
    i1[0] = 1.0 / (z + 1.0)
    if n > 1:
        mm = m[1:]
        lg = np.log1p(-1.0 / mm)
        i0[1:] = mm ** z * (-np.expm1(z * lg)) / z
        b = mm ** (z + 1.0) * (-np.expm1((z + 1.0) * lg)) / (z + 1.0)
        i1[1:] = b - (mm - 1.0) * i0[1:]
    return i0, i1


def toeplitz_coefficients(z, n):
    """Unit-spacing weights for an n-node grid.

    Returns ``(coef, first)``: ``coef[m]`` multiplies q(t_k - m h) for
    0 <= m < k and ``first[k]`` multiplies q(0) in row k (``first[0] = 0``).
    """
    i0, i1 = cell_moments(z, n)
    coef = np.empty(n, dtype=np.complex128)
    coef[0] = i0[0] - i1[0]
    if n > 1:
        coef[1:] = i1[: n - 1] + i0[1:n] - i1[1:n]
    first = np.zeros(n, dtype=np.complex128)
    first[1:] = i1[: n - 1]
    return coef, first


def causal_convolve(coef, q):
    """y[k] = sum_{j<=k} coef[k-j] q[j]."""
    n = q.size
    if n <= DIRECT_LIMIT:
        return _kernels.causal_convolve(coef[:n], q)
    return fftconvolve(coef[:n], q)[:n]


def toeplitz_apply(coef, first, q):
    """Apply the lower-triangular rule given by ``coef``/``first`` to q."""
    q = np.asarray(q, dtype=np.complex128)
    y = causal_convolve(coef, q)
    y += (first[: q.size] - coef[: q.size]) * q[0]
    y[0] = first[0] * q[0]
    return y


def _filter_exponents(exponents, tol=1e-3):
    keep = []
    for g in exponents:
        g = complex(g)
        if g.real <= -1 + tol or g.real >= 4:
            continue
        if abs(g) < tol or abs(g - 1) < tol:
            continue
        if any(abs(g - k) < tol for k in keep):
            continue
        keep.append(g)
    return keep


class ProductRule:
    """Product trapezoid rule for int_0^{t_k} (t_k - s)^(z-1) q(s) ds.

    Parameters
    ----------
    z : complex
        Kernel exponent plus one; needs Re z > 0.
    n : int
        Number of nodes of the uniform grid on [0, (n-1) h].
    h : float
        Grid spacing.
    singular_exponents : sequence of complex, optional
        Exponents gamma for which q is known to contain t^gamma terms.
        Starting weights on the first few nodes make the rule exact for
        1, t and every t^gamma, which restores full accuracy when q is not
        smooth at 0.
    """

    def __init__(self, z, n, h, singular_exponents=()):
        z = complex(z)
        if not z.real > 0:
            raise DomainError("product rule needs Re z > 0")
        self.z = z
        self.n = int(n)
        self.h = float(h)
        self.scale = self.h ** z
        self.coef, self.first = toeplitz_coefficients(z, self.n)
        self.exponents = _filter_exponents(singular_exponents)
        self.start_nodes = None
        self.start_weights = None
        if self.exponents:
            self._build_starting_weights()

    def _base(self, q):
        return self.scale * toeplitz_apply(self.coef, self.first, q)

    def _build_starting_weights(self):
        z, n, h = self.z, self.n, self.h
        gams = [0.0, 1.0] + self.exponents
        s = len(gams)
        if s >= n:
            raise DomainError("grid too small for the requested starting weights")
        t = h * np.arange(n)
        idx = np.arange(1, s + 1)
        vand = np.array([[j ** g for j in idx] for g in gams], dtype=np.complex128)
        resid = np.empty((s, n), dtype=np.complex128)
        gz = gamma(z)
        for i, g in enumerate(gams):
            phi = np.zeros(n, dtype=np.complex128)
            phi[1:] = t[1:] ** g
            if g == 0.0:
                phi[0] = 1.0
            exact = np.zeros(n, dtype=np.complex128)
            exact[1:] = gz * gamma(g + 1) * reciprocal_gamma(g + 1 + z) * t[1:] ** (g + z)
            # rows scaled by h^g so the system is in index units
            resid[i] = (exact - self._base(phi)) / h ** g
        omega = np.linalg.solve(vand, resid)
        omega[:, 0] = 0.0
        self.start_nodes = idx
        self.start_weights = omega

    def apply(self, q):
        q = np.asarray(q, dtype=np.complex128)
        if q.size != self.n:
            raise DomainError("data length does not match the rule")
        y = self._base(q)
        if self.start_weights is not None:
            y = y + q[self.start_nodes] @ self.start_weights
        return y

    def matrix(self):
        """Dense lower-triangular weight matrix of the base rule."""
        n = self.n
        k, j = np.indices((n, n))
        m = k - j
        w = np.where(m >= 0, self.coef[np.clip(m, 0, n - 1)], 0.0)
        w[:, 0] = self.first
        w[0, :] = 0.0
        w = self.scale * w
        if self.start_weights is not None:
            w[:, self.start_nodes] += self.start_weights.T
        return w
