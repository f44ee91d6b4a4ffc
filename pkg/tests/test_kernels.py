import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracbound import _kernels
from fracbound._kernels import _pykernels

try:
    from fracbound._kernels import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def brute_holder(x, v, alpha, delta=np.inf):
    best = 0.0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            gap = x[j] - x[i]
            if gap <= delta * (1 + 1e-12):
                best = max(best, abs(v[j] - v[i]) / gap ** alpha)
    return best


def test_backend_reported():
    assert _kernels.BACKEND in ("cython", "python")


def test_fallback_selected_by_environment():
    env = dict(os.environ, FRACBOUND_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fracbound; print(fracbound.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_c)])
@pytest.mark.parametrize("uniform", [True, False])
@pytest.mark.parametrize("delta", [np.inf, 0.2])
def test_holder_pair_max_brute(impl, uniform, delta, rng):
    n = 40
    x = np.linspace(0, 1, n) if uniform else np.sort(np.r_[0, rng.uniform(0, 1, n - 2), 1])
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    got = impl.holder_pair_max(x, v, 0.4, delta, uniform)
    assert abs(got - brute_holder(x, v, 0.4, delta)) <= 1e-12 * got


@pytest.mark.parametrize("impl", [_pykernels, pytest.param(_ckernels, marks=needs_c)])
def test_causal_convolve_against_numpy(impl, rng):
    c = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    q = rng.standard_normal(70) + 1j * rng.standard_normal(70)
    ref = np.convolve(np.r_[c, np.zeros(20)], q)[:70]
    assert np.allclose(impl.causal_convolve(c, q), ref, rtol=0, atol=1e-12)


@needs_c
@given(st.integers(2, 200), st.floats(0.05, 0.95), st.integers(0, 2**31 - 1))
def test_backend_parity(n, alpha, seed):
    r = np.random.default_rng(seed)
    x = np.linspace(0, 1, n)
    v = r.standard_normal(n) + 1j * r.standard_normal(n)
    a = _pykernels.holder_pair_max(x, v, alpha, np.inf, True)
    b = _ckernels.holder_pair_max(x, v, alpha, np.inf, True)
    assert abs(a - b) <= 1e-13 * max(a, 1.0)
    c = r.standard_normal(n) + 1j * r.standard_normal(n)
    assert np.allclose(_pykernels.causal_convolve(c, v), _ckernels.causal_convolve(c, v),
                       rtol=1e-12, atol=1e-12 * n)
