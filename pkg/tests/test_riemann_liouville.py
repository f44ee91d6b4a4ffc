import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracbound.convergence import CONVERGED, DIVERGED, assess_scalar_sequence
from fracbound.errors import DomainError, NotConvergedError, PoleError, ValidationError
from fracbound.function_space import Grid, NormSpec, SampledFunction, holder_seminorm, sup_norm
from fracbound.riemann_liouville import (FractionalOrder, default_holder_family, hat,
                                         holder_real_order_bound, holder_small_order_bound,
                                         rl_apply, rl_boundary_apply, rl_boundary_group_defect,
                                         rl_matrix, rl_opnorm_holder_estimate, rl_opnorm_l2,
                                         rl_opnorm_sup, rl_quadrature, rl_regularity_embedding_check,
                                         rl_semigroup_defect, rl_shift_apply)
from fracbound.special import gamma


def sample(func, n=1025, exponents=None):
    return SampledFunction.from_callable(Grid.uniform_unit(n), func, exponents=exponents)


def monomial_image(z, beta, t):
    """J(z) t^beta from the Beta integral, evaluated with mpmath."""
    z = mpmath.mpc(complex(z).real, complex(z).imag)
    c = mpmath.gamma(beta + 1) / mpmath.gamma(beta + 1 + z)
    return np.array([complex(c * mpmath.mpf(float(x)) ** (beta + z)) if x > 0 else 0j for x in t])


# orders and quadrature -------------------------------------------------------

def test_fractional_order():
    assert FractionalOrder(2j).boundary
    assert not FractionalOrder(0.5 + 1j).boundary
    assert not FractionalOrder(0).boundary
    with pytest.raises(DomainError):
        FractionalOrder(-0.1)


def test_quadrature_rejects_boundary_and_poles():
    g = Grid.uniform_unit(11)
    with pytest.raises(DomainError):
        rl_quadrature(1j, g)
    with pytest.raises(ValidationError):
        rl_quadrature(0.5, Grid.from_nodes([0, 0.1, 0.5, 1.0]))


def test_quadrature_weights_example():
    g = Grid.uniform_unit(201)
    q = rl_quadrature(0.5, g)
    assert abs(q.integrate(g.nodes)[-1] - 4 / 3) < 1e-12
    assert abs(q.integrate(g.nodes)[-1] / math.gamma(0.5) - 1 / math.gamma(2.5)) < 1e-12
    assert q.weights.shape == (201, 201)
    assert np.allclose(np.triu(q.weights, 1), 0)


# application ------------------------------------------------------------------

def test_apply_trivial():
    f = sample(lambda t: np.ones_like(t), 11)
    assert np.allclose(rl_apply(1, f).values, f.nodes, atol=1e-15)


@pytest.mark.parametrize("t0", [0.3, 0.5, 1.7, 2.5])
def test_apply_real_order_to_one(t0):
    f = sample(lambda t: np.ones_like(t), 257)
    out = rl_apply(t0, f)
    assert np.allclose(out.values, f.nodes ** t0 / math.gamma(t0 + 1), rtol=0, atol=1e-13)


def test_apply_linear_complex_order():
    z = 0.3 + 0.4j
    f = sample(lambda t: t, 513)
    out = rl_apply(z, f)
    ref = monomial_image(z, 1.0, f.nodes)
    assert np.abs(out.values - ref).max() < 1e-8


def test_exponents_propagate():
    f = sample(lambda t: t ** 0.5, 129, exponents=(0.5,))
    out = rl_apply(0.4, f)
    assert any(abs(e - 0.9) < 1e-12 for e in out.exponents)
    twice = rl_apply(0.3, out)
    ref = monomial_image(0.7, 0.5, f.nodes)
    assert np.abs(twice.values - ref).max() < 1e-9


def test_matrix_reproduces_apply():
    g = Grid.uniform_unit(65)
    f = SampledFunction(g, np.sin(3 * g.nodes) + 0j)
    m = rl_matrix(0.6 + 0.3j, g, NormSpec.sup())
    assert np.allclose(m @ f, rl_apply(0.6 + 0.3j, f).values, rtol=0, atol=1e-13)
    assert m.norm_context.kind == "sup"


def test_matrix_trapezoid_stencils():
    m = rl_matrix(1, Grid.uniform_unit(3)).entries
    assert np.allclose(m, [[0, 0, 0], [0.25, 0.25, 0], [0.25, 0.5, 0.25]])


def test_matrix_on_one():
    g = Grid.uniform_unit(513)
    y = rl_matrix(0.5, g).entries @ np.ones(g.size)
    assert np.abs(y - g.nodes ** 0.5 / math.gamma(1.5)).max() < 1e-10


# shift semigroup ------------------------------------------------------------

def test_shift():
    f = sample(lambda t: np.cos(t), 101)
    assert np.array_equal(rl_shift_apply(0, f).values, f.values)
    assert np.all(rl_shift_apply(1, f).values == 0)
    s = rl_shift_apply(0.25, f).values
    assert np.allclose(s[26:], f.values[1:76]) and np.all(s[:26] == 0)


def test_shift_commutes_with_rl():
    g = Grid.uniform_unit(401)
    f = SampledFunction(g, np.minimum(g.nodes, 0.5) * (1 + 1j) + 0.0)
    for tau in (0.1, 0.35):
        lhs = rl_shift_apply(tau, rl_apply(0.4 + 0.6j, f))
        rhs = rl_apply(0.4 + 0.6j, rl_shift_apply(tau, f))
        assert sup_norm(lhs - rhs) < 1e-8


# semigroup ----------------------------------------------------------------

def test_semigroup_examples():
    one = sample(lambda t: np.ones_like(t), 1024)
    assert rl_semigroup_defect(0.5, 0.5, one) <= 1e-6
    lin = sample(lambda t: t, 1024)
    assert rl_semigroup_defect(1, 1, lin) <= 1e-10
    p = sample(lambda t: t * (1 - t), 1024)
    z1, z2 = 0.2 + 0.7j, 0.8 - 0.7j
    assert rl_semigroup_defect(z1, z2, p) <= 1e-5
    plain = rl_apply(z1 + z2, p).values
    trap = np.concatenate([[0], np.cumsum((p.values[1:] + p.values[:-1]) / 2 * np.diff(p.nodes))])
    assert np.abs(plain - trap).max() < 1e-12


# boundary values ---------------------------------------------------------

def test_boundary_identity():
    f = sample(np.sin, 65)
    g, rep = rl_boundary_apply(0.0, f)
    assert rep.verdict == CONVERGED and np.array_equal(g.values, f.values)


def test_boundary_limit_of_linear():
    f = sample(lambda t: t, 1025)
    exact = f.nodes ** (1 + 1j) / complex(gamma(2 + 1j))
    g, rep = rl_boundary_apply(1.0, f, (0.02, 0.01, 0.005, 0.0025), NormSpec.holder(0.5))
    assert rep.verdict == CONVERGED
    assert holder_seminorm(f.with_values(g.values - exact), 0.5) < 1e-4
    g, rep = rl_boundary_apply(1.0, f)
    assert rep.verdict == CONVERGED
    assert sup_norm(f.with_values(g.values - exact)) < 1e-4


def test_boundary_of_hat_converges_pointwise():
    # the operator norms blow up, but on this smooth input the orbit has a limit
    f = sample(hat(0.5, 0.1), 2049)
    _g, rep = rl_boundary_apply(1.0, f, n=NormSpec.sup())
    assert rep.verdict == CONVERGED


def test_sup_norm_blowup_classified_as_divergent():
    sig = [0.04, 0.02, 0.01, 0.005]
    rep = assess_scalar_sequence(sig, [rl_opnorm_sup(s + 1j) for s in sig])
    assert rep.verdict == DIVERGED and abs(rep.exponent + 1) < 0.05


def test_boundary_group_defects():
    assert rl_boundary_group_defect(0.0, 0.0, sample(lambda t: t, 513), 0.5) == 0.0
    f = sample(lambda t: t, 1025)
    assert rl_boundary_group_defect(0.7, -0.7, f, 0.5) <= 5e-4
    g = sample(lambda t: t ** 0.8, 1025, exponents=(0.8,))
    assert rl_boundary_group_defect(0.3, 0.7, g, 0.5) <= 5e-4


def test_boundary_group_defect_propagates_verdict():
    with pytest.raises(NotConvergedError):
        rl_boundary_group_defect(1.0, 0.5, sample(lambda t: t, 257), 0.5,
                                 sigma_schedule=(0.04, 0.039, 0.038))


# norms --------------------------------------------------------------------

def test_sup_norm_examples():
    assert abs(rl_opnorm_sup(1) - 1) < 1e-15
    assert abs(rl_opnorm_sup(0.5) - 2 / math.sqrt(math.pi)) < 1e-14
    sig = np.array([0.1, 0.05, 0.025])
    vals = [rl_opnorm_sup(s + 1j) for s in sig]
    slope = np.polyfit(np.log(sig), np.log(vals), 1)[0]
    assert abs(slope + 1) < 0.02


def test_sup_norm_rejects_pole_and_boundary():
    with pytest.raises(DomainError):
        rl_opnorm_sup(2j)


def test_sup_norm_scaling_profile():
    pts = [r * np.exp(1j * th) for r in (0.3, 0.6, 1.0) for th in (0.0, 0.5, 1.0, 1.4)]
    ratios = {}
    for R in (0.25, 0.5, 1.0):
        ratios[R] = [rl_opnorm_sup(R * z) * (R * z).real / abs(R * z) for z in pts]
    all_r = np.concatenate(list(ratios.values()))
    assert all_r.min() > 0.2 and all_r.max() < 2.0


def test_sup_norm_sandwich_near_axis():
    for s in (0.04, 0.01, 0.0025):
        v = rl_opnorm_sup(s + 1j) * s
        assert 0.5 < v < 3.0


def test_l2_norm_real_order():
    assert abs(rl_opnorm_l2(1.0, 2048) - 2 / math.pi) < 0.01 * 2 / math.pi


def test_l2_norm_report():
    val, rep = rl_opnorm_l2(0.5j, 512, return_report=True)
    assert rep.verdict == CONVERGED and val == rep.extrapolated


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_l2_boundary_norm_matches_pi_half_law(t):
    val = rl_opnorm_l2(1j * t, 2048)
    assert abs(val - math.exp(math.pi * t / 2)) < 0.05 * math.exp(math.pi * t / 2)


def test_l2_norm_input_checks():
    with pytest.raises(ValidationError):
        rl_opnorm_l2(1.0, 32)
    with pytest.raises(ValidationError):
        rl_opnorm_l2(1j, 256, sigma_schedule=(0.01, 0.02))


def test_holder_estimate_real_order():
    for a in (0.3, 0.5, 0.7):
        assert rl_opnorm_holder_estimate(a, a) <= holder_real_order_bound(a) * 1.02


def test_holder_estimate_small_orders():
    z = 0.1 + 0.2j
    assert rl_opnorm_holder_estimate(z, 0.5) <= holder_small_order_bound(z, 0.5)
    with pytest.raises(DomainError):
        holder_small_order_bound(0.3 + 0.2j, 0.5)


def test_holder_estimate_sector_order():
    # sup over the right half-plane of 2/|Gamma(w + 1)| along Re w = 0.5 is finite
    rg = [2 / abs(complex(gamma(1.5 + 1j * y))) for y in np.linspace(-1, 1, 9)]
    for y in (-1.0, 0.0, 1.0):
        z = 0.5 + 1j * y
        assert rl_opnorm_holder_estimate(z, 0.5) <= max(rg) * abs(z) / z.real


def test_holder_estimate_rejects_bad_family():
    g = Grid.uniform_unit(65)
    bad = [SampledFunction(g, np.ones(g.size))]
    with pytest.raises(DomainError):
        rl_opnorm_holder_estimate(0.5, 0.5, family=bad)
    zero = [SampledFunction(g, np.zeros(g.size))]
    with pytest.raises(DomainError):
        rl_opnorm_holder_estimate(0.5, 0.5, family=zero)


def test_default_family_vanishes_at_zero():
    fam = default_holder_family(0.5, Grid.uniform_unit(65))
    assert len(fam) == 9
    assert all(abs(f.values[0]) == 0 for f in fam)


def test_embedding_examples():
    g = Grid.uniform_unit(1025)
    assert rl_regularity_embedding_check(0.5, SampledFunction(g, np.zeros(g.size))) == 0
    assert rl_regularity_embedding_check(0.5, sample(lambda t: t)) <= 2 / math.gamma(1.5)
    assert rl_regularity_embedding_check(0.3, sample(hat(0.5, 0.1))) <= 2 / math.gamma(1.3) * 1.02


# properties ----------------------------------------------------------------

@given(st.sampled_from([0.0, 0.5, 1.0, 2.0]), st.floats(0.1, 2.0), st.floats(-2.0, 2.0))
def test_monomial_rule(beta, re, im):
    z = complex(re, im)
    f = sample(lambda t: t ** beta, 257, exponents=(beta,) if beta not in (0.0, 1.0) else None)
    out = rl_apply(z, f)
    t = f.nodes
    keep = t >= 0.1
    ref = complex(gamma(beta + 1) / gamma(beta + 1 + z)) * t[keep] ** (beta + z)
    assert np.abs(out.values[keep] - ref).max() <= 1e-6 * np.abs(ref).max()


@given(st.floats(0.2, 1.5), st.floats(-1.5, 1.5))
def test_cauchy_riemann_proxy(re, im):
    """z -> J(z) f(t) is holomorphic: d/dx = -i d/dy by central differences."""
    f = sample(lambda t: np.sin(2 * t) + t, 257)
    h = 1e-4
    z = complex(re, im)
    dx = (rl_apply(z + h, f).values - rl_apply(z - h, f).values) / (2 * h)
    dy = (rl_apply(z + 1j * h, f).values - rl_apply(z - 1j * h, f).values) / (2 * h)
    scale = max(1.0, np.abs(dx).max())
    assert np.abs(dx + 1j * dy).max() <= 1e-4 * scale


def test_semigroup_grid():
    f = sample(lambda t: np.cos(2 * t) * t, 1024)
    zs = [0.3, 0.8 + 0.5j, 1.2 - 1j, 0.5 + 1.5j, 2.0]
    worst = max(rl_semigroup_defect(a, b, f) for a in zs for b in zs)
    assert worst <= 1e-5
