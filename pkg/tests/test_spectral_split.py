import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _fixtures import random_split_matrix
from fracbound.errors import (NearSingularError, RankAmbiguityError, SpectrumSplitError,
                              TruncationError, ValidationError)
from fracbound.spectral_split import (ContourSpec, FiniteOperator, contour_T1, contour_T2,
                                      default_contour, laplace_consistency_check, oracle_P,
                                      oracle_T1, oracle_T2, projection_P, resolvent_apply,
                                      split_spaces)

D = FiniteOperator.diagonal([-2.0, 3.0])
UPPER = FiniteOperator(np.array([[-2.0, 1.0], [0.0, 3.0]]))


def mx(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


# operator and contour types ------------------------------------------------

def test_operator_construction():
    assert D.n == 2 and np.allclose(D.entries, np.diag([-2, 3]))
    with pytest.raises(ValidationError):
        FiniteOperator(np.ones((2, 3)))
    assert np.allclose((-D).entries, np.diag([2, -3]))


def test_contour_validation():
    with pytest.raises(ValidationError):
        ContourSpec(r=0.5, beta=np.pi / 2)
    with pytest.raises(ValidationError):
        ContourSpec(r=0.0, beta=2.0)
    with pytest.raises(ValidationError):
        projection_P(D, ContourSpec(r=1.5, beta=2.0), delta=1.0)
    with pytest.raises(SpectrumSplitError):
        projection_P(FiniteOperator.diagonal([-0.5, 3.0]), delta=1.0)
    # an eigenvalue of sigma_1 to the right of the rays
    steep = FiniteOperator.diagonal([-1.5 + 4j, 3.0])
    with pytest.raises(SpectrumSplitError):
        projection_P(steep, ContourSpec(r=0.5, beta=2.8), delta=1.0)


def test_default_contour_between_axis_and_spectrum():
    a = FiniteOperator.diagonal([-1.5 + 3j, -2.0, 2.0 - 3j])
    spec = default_contour(a, 1.0)
    assert spec.r == 0.5
    theta = np.angle(-1.5 + 3j)
    assert np.pi / 2 < spec.beta < theta


# resolvent ---------------------------------------------------------------

def test_resolvent_examples(rng):
    assert np.allclose(resolvent_apply(D, 0.0, [1, 1]), [0.5, -1 / 3])
    cols = np.column_stack([resolvent_apply(D, 1.0, e) for e in np.eye(2)])
    assert np.allclose(cols, np.diag([1 / 3, -1 / 2]))
    a = FiniteOperator(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    x = rng.standard_normal(5) + 0j
    lam = 0.3 + 2.1j
    y = resolvent_apply(a, lam, x)
    assert np.abs((lam * np.eye(5) - a.entries) @ y - x).max() < 1e-12
    with pytest.raises(NearSingularError):
        resolvent_apply(D, 3.0, [1, 1])


# semigroups ----------------------------------------------------------------

def test_T1_diagonal_examples():
    assert mx(contour_T1(D, 1.0), np.diag([np.exp(-2), 0])) <= 1e-8
    a = FiniteOperator.diagonal([-1 + 1j, -1 - 1j, 2.0])
    ref = np.diag([np.exp((-1 + 1j) / 2), np.exp((-1 - 1j) / 2), 0])
    assert mx(contour_T1(a, 0.5, delta=0.5), ref) <= 1e-8


def test_T2_diagonal_and_small_time():
    assert mx(contour_T2(D, 1.0), np.diag([0, np.exp(-3)])) <= 1e-8
    near = [mx(contour_T2(D, t), np.diag([0, 1])) for t in (0.5, 0.1, 0.02)]
    assert near[0] > near[1] > near[2]


@pytest.mark.parametrize("fn", [contour_T1, contour_T2])
def test_semigroup_property(fn):
    a = FiniteOperator(np.array([[-2.0, 1.0, 0.5], [0.0, 3.0 + 1j, 0.2], [0.3, 0.0, -1.5 - 2j]]))
    defect = mx(fn(a, 0.3) @ fn(a, 0.7), fn(a, 1.0))
    assert defect <= 1e-8


def test_time_must_be_positive():
    with pytest.raises(ValidationError):
        contour_T1(D, 0.0)


# projection -------------------------------------------------------------------

def test_projection_examples():
    assert mx(projection_P(D), np.diag([1, 0])) <= 1e-8
    assert mx(projection_P(UPPER), [[1, -0.2], [0, 0]]) <= 1e-8
    right = FiniteOperator.diagonal([2.0, 3 + 1j, 1.5])
    left = FiniteOperator.diagonal([-2.0, -3 + 1j, -1.5])
    assert mx(projection_P(right), np.zeros((3, 3))) <= 1e-8
    assert mx(projection_P(left), np.eye(3)) <= 1e-8


def test_projection_complementarity():
    for a in (D, FiniteOperator.diagonal([-1.5 + 2j, 2.5, -3.0, 1.2 - 1j])):
        total = projection_P(a, delta=1.0) + projection_P(-a, delta=1.0)
        assert mx(total, np.eye(a.n)) <= 1e-8


def test_contour_independence():
    rng = np.random.default_rng(7)
    m, _ = random_split_matrix(rng)
    a = FiniteOperator(m)
    s1 = ContourSpec(r=0.5, beta=1.9)
    s2 = ContourSpec(r=0.8, beta=1.7)
    assert mx(projection_P(a, s1), projection_P(a, s2)) <= 1e-8
    assert mx(contour_T1(a, 1.0, s1), contour_T1(a, 1.0, s2)) <= 1e-8


# splitting ------------------------------------------------------------------

def test_split_diagonal():
    spl = split_spaces(D, projection_P(D))
    assert spl.basis1.shape == (2, 1) and spl.basis2.shape == (2, 1)
    assert abs(abs(spl.basis1[0, 0]) - 1) < 1e-8 and abs(abs(spl.basis2[1, 0]) - 1) < 1e-8
    assert np.allclose(spl.spectrum1, [-2]) and np.allclose(spl.spectrum2, [3])


def test_split_upper_triangular():
    spl = split_spaces(UPPER, projection_P(UPPER))
    e1 = spl.basis1[:, 0] / spl.basis1[np.argmax(np.abs(spl.basis1[:, 0])), 0]
    assert mx(e1, [1, 0]) < 1e-8
    e2 = spl.basis2[:, 0]
    ref = np.array([1, 5]) / np.sqrt(26)
    assert abs(abs(np.vdot(ref, e2)) - 1) < 1e-8
    assert spl.to_dict()["dim1"] == 1


def test_split_rank_ambiguity():
    p = np.diag([1.0, 1e-8])
    with pytest.raises(RankAmbiguityError):
        split_spaces(D, p)


@settings(max_examples=12)
@given(st.integers(0, 2**31 - 1))
def test_random_splits(seed):
    m, lam = random_split_matrix(np.random.default_rng(seed), n=5)
    a = FiniteOperator(m)
    p = projection_P(a)
    assert mx(p, oracle_P(a)) <= 1e-7
    assert mx(p @ p, p) <= 1e-8
    assert mx(p @ m, m @ p) <= 1e-8
    spl = split_spaces(a, p)
    assert spl.basis1.shape[1] + spl.basis2.shape[1] == 5
    assert spl.mismatch <= 1e-8
    for t in (0.1, 1.0):
        assert mx(contour_T1(a, t), oracle_T1(a, t)) <= 1e-7
        assert mx(contour_T2(a, t), oracle_T2(a, t)) <= 1e-7


# Laplace transform ---------------------------------------------------------

@pytest.mark.parametrize("z,tol", [(1.0, 1e-6), (2 + 1j, 1e-6), (0.1, 1e-4)])
def test_laplace_consistency(z, tol):
    assert laplace_consistency_check(D, None, z, t_max=20, n_t=400) <= tol


def test_laplace_general_matrix():
    a = FiniteOperator(np.array([[-2.0, 1.0, 0.5], [0.0, 3.0 + 1j, 0.2], [0.3, 0.0, -1.5 - 2j]]))
    assert laplace_consistency_check(a, None, 0.5 + 0.5j) <= 1e-6


def test_laplace_errors():
    with pytest.raises(ValidationError):
        laplace_consistency_check(D, None, -1.0)
    with pytest.raises(TruncationError):
        laplace_consistency_check(FiniteOperator.diagonal([-1.1, 3.0]), None, 0.01, t_max=2.0)
