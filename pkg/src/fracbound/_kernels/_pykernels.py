"""Pure numpy versions of the hot loops. Same signatures as ``_ckernels``."""
import numpy as np


def holder_pair_max(x, v, alpha, delta=np.inf, uniform=False):
    """Max of |v[j]-v[i]| / (x[j]-x[i])**alpha over pairs with gap <= delta."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.complex128)
    n = x.size
    best = 0.0
    lim = delta * (1.0 + 1e-12)
    for k in range(1, n):
        gaps = x[k:] - x[:-k]
        if uniform:
            if gaps[0] > lim:
                break
            r = np.abs(v[k:] - v[:-k]).max() / gaps[0] ** alpha
        else:
            mask = gaps <= lim
            if not mask.any():
                break
            r = (np.abs(v[k:] - v[:-k])[mask] / gaps[mask] ** alpha).max()
        if r > best:
            best = r
    return float(best)


def causal_convolve(c, q):
    """y[k] = sum_{j<=k} c[k-j] q[j] for k < len(q)."""
    c = np.asarray(c, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    n = q.size
    return np.convolve(c[:n], q)[:n]
