"""Kernel families, normalized kernel functions and condition harnesses."""

import numpy as np
import pytest

from weylbound import (
    FaceIndex,
    KernelSpec,
    SpdPoint,
    busemann_profile,
    busemann_value,
    check_condition1,
    check_condition3,
    check_lipschitz,
    conjecture_experiment,
    family_components,
    flat_point,
    kernel_eval,
    origin,
    spd_act,
)
from weylbound import generators as gen
from weylbound.errors import FaceIndexError

SQ2, SQ3 = np.sqrt(2.0), np.sqrt(3.0)


def test_family_components_frozen():
    assert family_components("F", 3) == (FaceIndex([1]), FaceIndex([2]))
    assert family_components("M", 3) == (FaceIndex([1]), FaceIndex([2]),
                                         FaceIndex([1, 2]))
    assert family_components("K", 3) == family_components("M", 3)
    assert len(family_components("K", 4)) == 7  # all nonempty proper subsets
    assert len(family_components("M", 4)) == 6
    # size-then-lex order
    k4 = family_components("K", 4)
    assert k4[:3] == (FaceIndex([1]), FaceIndex([2]), FaceIndex([3]))
    assert k4[-1] == FaceIndex([1, 2, 3])


def test_custom_kernel_spec_validation():
    spec = KernelSpec(3, "custom", components=[FaceIndex([2]), FaceIndex([1])])
    assert spec.components == (FaceIndex([1]), FaceIndex([2]))
    with pytest.raises(FaceIndexError):
        KernelSpec(3, "custom", components=[FaceIndex([1]), FaceIndex([1])])
    with pytest.raises(FaceIndexError):
        KernelSpec(3, "custom", components=[])


def test_kernel_eval_frozen_values():
    x = origin(3)
    y = SpdPoint(np.diag([np.exp(2.0), 1.0, np.exp(-2.0)]))  # radius (1, 0, -1)
    np.testing.assert_allclose(kernel_eval(KernelSpec(3, "F"), x, y),
                               [1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(kernel_eval(KernelSpec(3, "M"), x, y),
                               [1.0, 1.0, SQ2], atol=1e-12)


def test_kernel_zero_diagonal_and_basepoint(rng):
    spec = KernelSpec(3, "M")
    x = gen.random_spd(3, rng)
    assert np.array_equal(kernel_eval(spec, x, x), np.zeros(3))
    o = origin(3)
    assert np.array_equal(busemann_value(spec, x, o), np.zeros(3))


def test_kernel_is_invariant_under_the_group(rng):
    spec = KernelSpec(3, "K")
    for _ in range(40):
        x, y = gen.random_spd(3, rng), gen.random_spd(3, rng)
        v = rng.normal(size=3)
        v -= v.mean()
        g = (gen.random_rotation(3, rng).mat
             @ np.diag(np.exp(v)) @ gen.random_rotation(3, rng).mat)
        d0 = kernel_eval(spec, x, y)
        d1 = kernel_eval(spec, spd_act(g, x), spd_act(g, y))
        np.testing.assert_allclose(d1, d0, atol=1e-8)


def test_busemann_profile_shape_and_base_normalization(rng):
    spec = KernelSpec(3, "F")
    probes = gen.probes(3, rng, 6)
    x = gen.random_spd(3, rng)
    prof = busemann_profile(spec, x, [origin(3)] + probes)
    assert prof.values.shape == (7, 2)
    np.testing.assert_allclose(prof.values[0], 0.0, atol=1e-12)


def test_lipschitz_constants_frozen(cfg):
    # deterministic extremal heads realize these values
    lip = check_lipschitz(KernelSpec(2, "F"), cfg)
    np.testing.assert_allclose(lip.estimate, SQ2, atol=1e-9)
    np.testing.assert_allclose(lip.upper_bound, SQ2, atol=1e-12)
    lip = check_lipschitz(KernelSpec(3, "F"), cfg)
    np.testing.assert_allclose(lip.estimate, SQ3, atol=1e-9)
    lip = check_lipschitz(KernelSpec(3, "M"), cfg)
    np.testing.assert_allclose(lip.estimate, 2.1753021081, atol=1e-6)
    np.testing.assert_allclose(lip.upper_bound, np.sqrt(6.0), atol=1e-12)
    assert lip.estimate <= lip.upper_bound


def test_ray_constants_frozen(cfg):
    c3 = check_condition3(KernelSpec(3, "F"), cfg)
    np.testing.assert_allclose(c3.estimate, 3.0 / np.sqrt(6.0), atol=1e-9)
    c3 = check_condition3(KernelSpec(3, "K"), cfg)
    np.testing.assert_allclose(c3.estimate, SQ3, atol=1e-9)
    c3 = check_condition3(KernelSpec(4, "K"), cfg)
    np.testing.assert_allclose(c3.estimate, 4.0 / SQ3, atol=1e-9)
    # the ray constant never beats the two-point constant
    lip = check_lipschitz(KernelSpec(4, "K"), cfg)
    assert c3.estimate <= lip.estimate * (1.0 + 1e-9)


def test_condition1_rank_one_clean(cfg):
    rep = check_condition1(KernelSpec(2, "F"), cfg)
    assert rep.holds
    assert rep.violations == ()
    lo, hi = rep.rate_spread
    assert hi - lo < cfg.margin  # a single root: one growth rate


def test_condition1_rank_two_direction_dependence(cfg):
    rep = check_condition1(KernelSpec(3, "F"), cfg)
    assert not rep.holds
    assert any(v.kind == "two-ray" for v in rep.violations)
    lo, hi = rep.rate_spread
    assert hi - lo > 0.2  # corner rays grow at visibly different rates
    for v in rep.violations:
        assert v.d_near <= v.d_far and v.norm_near >= v.norm_far


def test_flat_point_accepts_unsorted_exponents():
    k = gen.givens_rotation(3, 1, 3, 0.4)
    v = np.array([-0.3, 0.5, -0.2])
    p = flat_point(k, v)
    np.testing.assert_allclose(np.linalg.det(p.mat), 1.0, atol=1e-9)


def test_conjecture_experiment_reports(cfg):
    spec = KernelSpec(2, "F")
    rep = conjecture_experiment(spec, cfg.replace(probe_count=8))
    total = sum(sum(row) for row in rep.confusion)
    assert total + 0 >= 1
    assert rep.pairs == total + rep.skipped
    assert 0.0 <= rep.agreement <= 1.0
