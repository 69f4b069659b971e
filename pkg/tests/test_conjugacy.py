import math

import numpy as np
import pytest

from capra.conjugacy import (
    CouplingSpec,
    ZeroHomFnSpec,
    build_sphere_sample,
    capra_conjugate,
    capra_conjugate_direct,
    capra_conjugate_l0_analytic,
    capra_coupling,
    capra_subdiff_at_zero,
    capra_subdiff_contains,
    conjugate_at_points,
    fenchel_biconjugate,
    fenchel_conjugate,
)
from capra.norms import NormalizationSpec, PhiSpec, SourceNormSpec, lp_value_batch
from capra.numerics import FunctionSample, build_grid, default_dual_grid, sample
from capra.envelope import BALL_TOL

RNG = np.random.default_rng(0x5EED)


def test_conjugate_of_origin_indicator_is_zero():
    g = build_grid([(-1.0, 1.0)], [3])
    f = sample(lambda x: 0.0 if x[0] == 0.0 else math.inf, g)
    c = fenchel_conjugate(f, g)
    assert np.allclose(c.values, 0.0)


def test_conjugate_of_abs_is_ball_indicator():
    g = build_grid([(-1.0, 1.0)], [201])
    f = sample(lambda x: abs(x[0]), g)
    c = conjugate_at_points(f, np.array([[0.5]]))
    assert abs(c[0]) <= 1e-12


def test_conjugate_of_half_square_selfconjugate():
    g = build_grid([(-3.0, 3.0)], [601])
    f = FunctionSample(g, 0.5 * g.nodes[:, 0] ** 2)
    h = g.steps[0]
    v = conjugate_at_points(f, np.array([[1.0]]))[0]
    assert abs(v - 0.5) <= h  # O(h); exact here since 1.0 is a node


def test_biconjugate_below_and_fixes_convex():
    g = build_grid([(-3.0, 3.0)], [121])
    f = FunctionSample(g, 0.5 * g.nodes[:, 0] ** 2)
    dual = default_dual_grid(1, 4.5)
    bic = fenchel_biconjugate(f, dual)
    assert np.all(bic.values <= f.values + 1e-12)
    assert np.max(np.abs(bic.values - f.values)) <= 1e-10


def test_biconjugate_of_1d_l0_matches_oracle():
    # Frozen from: convex_envelope_2d(l0 sample on [-1,1]/41 nodes,
    # default_dual_grid(1, 1.0)) -> equals |x| at every node.
    g = build_grid([(-1.0, 1.0)], [41])
    f = FunctionSample(g, (g.nodes[:, 0] != 0.0).astype(float))
    bic = fenchel_biconjugate(f, default_dual_grid(1, 1.0))
    assert abs(bic.value_near([0.0])) <= 1e-12
    assert np.max(np.abs(bic.values - np.abs(g.nodes[:, 0]))) <= 1e-12
    assert np.all(bic.values <= f.values + 1e-12)


def test_conjugate_with_minus_inf_input_is_plus_inf():
    g = build_grid([(-1.0, 1.0)], [5])
    vals = np.zeros(5)
    vals[2] = -math.inf
    c = fenchel_conjugate(FunctionSample(g, vals), g)
    assert np.all(np.isposinf(c.values))


def test_capra_coupling():
    c = CouplingSpec(NormalizationSpec.lp(2.0))
    assert capra_coupling(np.zeros(2), [5.0, -7.0], c) == 0.0
    assert math.isclose(capra_coupling([3.0, 4.0], [1.0, 0.0], c), 0.6)
    x = np.array([0.3, -1.2])
    y = np.array([0.7, 0.4])
    assert math.isclose(capra_coupling(2.0 * x, y, c), capra_coupling(x, y, c),
                        rel_tol=1e-12)


def test_capra_conjugate_1d_l0():
    nu = NormalizationSpec.lp(math.inf)
    f = ZeroHomFnSpec.l0(1)
    samp = build_sphere_sample(nu, 1, 10)
    coup = CouplingSpec(nu)
    for y in (0.0, 0.5, -0.5, 1.0, 2.0, -3.0):
        want = max(0.0, abs(y) - 1.0)
        assert capra_conjugate(f, coup, np.array([y]), samp) == want


def test_capra_conjugate_zero_function_is_dual_norm():
    nu = NormalizationSpec.lp(2.0)
    f = ZeroHomFnSpec.constant_zero()
    samp = build_sphere_sample(nu, 2, 10_000)
    for _ in range(10):
        y = RNG.standard_normal(2) * 2.0
        v = capra_conjugate(f, CouplingSpec(nu), y, samp)
        assert abs(v - float(np.linalg.norm(y))) <= 1e-3 * (1 + np.linalg.norm(y))


def test_capra_conjugate_at_zero_dual():
    nu = NormalizationSpec.lp(2.0)
    f = ZeroHomFnSpec.phi_l0(PhiSpec.from_values([0.0, 2.0, 3.0]))
    samp = build_sphere_sample(nu, 2, 500)
    assert capra_conjugate(f, CouplingSpec(nu), np.zeros(2), samp) == 0.0


def test_capra_conjugate_sample_validation():
    nu = NormalizationSpec.lp(2.0)
    f = ZeroHomFnSpec.l0(2)
    with pytest.raises(ValueError, match="empty-sample"):
        capra_conjugate(f, CouplingSpec(nu), np.zeros(2), np.empty((0, 2)))
    no_zero = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="origin"):
        capra_conjugate(f, CouplingSpec(nu), np.zeros(2), no_zero)
    off_sphere = np.array([[0.0, 0.0], [2.0, 0.0]])
    with pytest.raises(ValueError, match="off the unit sphere"):
        capra_conjugate(f, CouplingSpec(nu), np.zeros(2), off_sphere)


def test_analytic_conjugate_examples():
    src2 = SourceNormSpec.lp(2.0, 2)
    phi = PhiSpec.identity(2)
    assert capra_conjugate_l0_analytic([0.0, 0.0], phi, src2) == 0.0
    assert capra_conjugate_l0_analytic([3.0, 0.0], phi, src2) == 2.0


def test_analytic_conjugate_linf_source_separable_form():
    src = SourceNormSpec.lp(math.inf, 3)
    phi = PhiSpec.identity(3)
    for _ in range(25):
        y = RNG.standard_normal(3) * 3.0
        want = float(np.sum(np.maximum(np.abs(y) - 1.0, 0.0)))
        got = capra_conjugate_l0_analytic(y, phi, src)
        assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12)


def test_sphere_sample_structure():
    nu = NormalizationSpec.lp(0.5)
    samp = build_sphere_sample(nu, 2, 1000)
    assert np.any(np.all(samp == 0.0, axis=1))
    nonzero = samp[np.any(samp != 0.0, axis=1)]
    assert np.max(np.abs(nu.batch(nonzero) - 1.0)) <= 1e-9
    # signed axes are present with exact sparsity
    for e in ([1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]):
        assert np.any(np.all(samp == np.array(e), axis=1))


def test_zero_homogeneity_of_fn_specs():
    specs = [ZeroHomFnSpec.l0(3), ZeroHomFnSpec.constant_zero(),
             ZeroHomFnSpec.custom(lambda x: float(np.max(np.abs(x)) > 0))]
    for f in specs:
        for _ in range(10):
            x = RNG.standard_normal(3)
            for rho in (-2.0, -1.0, 0.5, 3.0):
                assert f.value(rho * x) == f.value(x)


def test_subdiff_contains_examples():
    nu = NormalizationSpec.lp(math.inf)
    f = ZeroHomFnSpec.l0(1)
    coup = CouplingSpec(nu)
    assert capra_subdiff_contains([0.5], [0.0], f, coup)
    assert not capra_subdiff_contains([2.0], [0.0], f, coup)
    fz = ZeroHomFnSpec.constant_zero()
    assert capra_subdiff_contains([0.0, 0.0], [0.0, 0.0], fz,
                                  CouplingSpec(NormalizationSpec.lp(2.0)))


def test_subdiff_contains_infinite_f_error():
    phi = PhiSpec.from_values([0.0, math.inf, 1.0])
    f = ZeroHomFnSpec.phi_l0(phi)
    coup = CouplingSpec(NormalizationSpec.lp(2.0))
    with pytest.raises(ValueError, match="infinite-f-at-x"):
        capra_subdiff_contains([0.5, 0.5], [1.0, 0.0], f, coup)


def test_subdiff_at_zero_1d():
    nu = NormalizationSpec.lp(math.inf)
    f = ZeroHomFnSpec.l0(1)
    cand = build_grid([(-3.0, 3.0)], [49]).nodes
    acc = capra_subdiff_at_zero(f, CouplingSpec(nu), cand)
    want = cand[np.abs(cand[:, 0]) <= 1.0 + 1e-9]
    assert np.array_equal(np.sort(acc[:, 0]), np.sort(want[:, 0]))


def test_subdiff_at_zero_lp_sources_linf_ball():
    cand = build_grid([(-2.0, 2.0), (-2.0, 2.0)], [33, 33]).nodes
    for p in (1.0, 2.0, math.inf):
        acc = capra_subdiff_at_zero(ZeroHomFnSpec.l0(2),
                                    CouplingSpec(NormalizationSpec.lp(p)), cand)
        want = cand[lp_value_batch(cand, math.inf) <= 1.0 + 1e-9]
        assert acc.shape == want.shape
        assert np.allclose(np.sort(acc, axis=0), np.sort(want, axis=0))


def test_subdiff_at_zero_zero_function():
    # for f = 0 the conjugate is the dual norm, so only y = 0 survives
    cand = build_grid([(-2.0, 2.0), (-2.0, 2.0)], [17, 17]).nodes
    acc = capra_subdiff_at_zero(ZeroHomFnSpec.constant_zero(),
                                CouplingSpec(NormalizationSpec.lp(2.0)), cand)
    assert acc.shape[0] == 1 and np.all(acc[0] == 0.0)


def test_subdiff_at_zero_requires_f0_zero():
    f = ZeroHomFnSpec.custom(lambda x: 1.0)
    with pytest.raises(ValueError, match="f-at-zero-nonzero"):
        capra_subdiff_at_zero(f, CouplingSpec(NormalizationSpec.lp(2.0)),
                              np.zeros((1, 2)))


def test_two_route_agreement_small():
    from capra.envelope import ball_box_grid

    grid = ball_box_grid(2, 101)
    h = grid.steps[0]
    for p in (1.0, 2.0, math.inf, 0.5):
        nu = NormalizationSpec.lp(p)
        f = ZeroHomFnSpec.l0(2)
        samp = build_sphere_sample(nu, 2, 5000)
        ball = nu.batch(grid.nodes) <= 1.0 + BALL_TOL
        masked = FunctionSample(grid, np.where(ball, f.batch(grid.nodes), math.inf))
        for y in ([2.5, 1.0], [-1.5, 0.25], [3.0, 3.0], [0.1, -0.2]):
            y = np.array(y)
            ball_v = conjugate_at_points(masked, y[None, :])[0]
            sph_v = capra_conjugate(f, CouplingSpec(nu), y, samp)
            dir_v = capra_conjugate_direct(f, CouplingSpec(nu), y, grid)
            tol = 5.0 * h * (1.0 + float(np.linalg.norm(y)))
            assert abs(ball_v - sph_v) <= tol
            assert abs(dir_v - sph_v) <= tol
