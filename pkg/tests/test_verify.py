"""End-to-end property suites at reduced sample budgets."""

import numpy as np
import pytest

from weylbound import Config, FaceIndex, intersection_check, run_suite
from weylbound import generators as gen
from weylbound.errors import InputFormatError
from weylbound.verify import SUITES, rank_one_report, refinement_pair_pool, refinement_report

SMALL = Config(samples=60, intersection_samples=6, refinement_pairs=36,
               class_samples=24, stratified_points=8, kernel_samples=60)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_holds(name):
    rep = run_suite(name, SMALL, n=3)
    assert rep.holds, rep.summary()
    assert rep.checked > 0
    assert rep.failures == ()


def test_run_suite_rejects_unknown_name():
    with pytest.raises(InputFormatError):
        run_suite("spectral", SMALL)


def test_suites_are_seed_stable():
    a = run_suite("stab", SMALL, n=3)
    b = run_suite("stab", SMALL, n=3)
    assert a.holds == b.holds and a.checked == b.checked


def test_intersection_check_generic_pair_has_full_face(rng):
    k, r = gen.random_rotation(3, rng), gen.random_rotation(3, rng)
    rep = intersection_check(k, r, SMALL, rng=rng)
    assert rep.holds, rep.failures
    assert rep.i_min == FaceIndex.full(3)  # generic frames share only the apex


def test_intersection_check_stab_pair(rng):
    k = gen.random_rotation(3, rng)
    s = gen.givens_rotation(3, 1, 2, 0.6)  # inside the {1} block stabilizer
    rep = intersection_check(k, k @ s, SMALL, rng=rng)
    assert rep.holds, rep.failures
    assert rep.i_min == FaceIndex([1])
    assert rep.witness_checked > 0


def test_rank_one_report_records_circle():
    rep = rank_one_report(SMALL)
    assert rep.distinct_classes == 8
    assert rep.glued_pairs == 0
    assert not rep.one_point_boundary
    assert "not a one-point" in rep.summary()


def test_refinement_counts_are_consistent():
    pairs = refinement_pair_pool(SMALL, 3)
    assert len(pairs) == SMALL.refinement_pairs
    rep = refinement_report(pairs, SMALL)
    assert rep.holds
    for key in ("martin->visual", "martin->dualcell", "iterated->martin"):
        applicable, violations = rep.implications[key]
        assert applicable > 0
        assert violations == 0
    assert rep.counterexamples["visual-not-dualcell"] > 0
    assert rep.counterexamples["dualcell-not-visual"] > 0


def test_refinement_pool_needs_rank_two():
    with pytest.raises(InputFormatError):
        refinement_pair_pool(SMALL, 2)
