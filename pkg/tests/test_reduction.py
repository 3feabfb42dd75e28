import pytest

from halman import (
    Box,
    HypothesisViolated,
    Instance,
    PointRecord,
    UsageError,
    check_colorful_n_intersecting,
    gen_colorful_lower,
    gen_pq_lower,
    gen_random_colorful,
    gen_random_mono,
    tau,
)
from halman.reduction import corollary_pipeline, reduce
from halman.solver import family_problem, verify_cover
from halman.traces import transversal_count


def test_lower_bound_d2_to_a_line():
    inst = gen_colorful_lower(2, 1)
    reduced, red = reduce(inst, 1, 1)
    assert reduced.dimension == 1 and len(reduced.families) == 1
    assert red.eliminated_axes == (0,) and red.surviving_axes == (1,)
    (j,) = red.surviving
    assert tau(inst, j).optimum <= tau(reduced, 0).optimum
    assert check_colorful_n_intersecting(reduced, 1).holds


def test_t_zero_is_identity():
    inst = gen_colorful_lower(2, 1)
    reduced, red = reduce(inst, 1, 0)
    assert reduced is inst and red.surviving == (0, 1, 2) and red.clamps == ()


def test_identical_families_stay_identical():
    mono = gen_random_mono(3, 1, size=6, seed=2, k=5)
    inst = Instance(3, (mono.families[0],) * 5, mono.points)
    reduced, red = reduce(inst, 1, 1)
    assert len(reduced.families) == 3
    assert reduced.families[0] == reduced.families[1] == reduced.families[2]


def test_clamps_use_distinct_families():
    inst = gen_random_colorful(3, 2, seed=11)
    reduced, red = reduce(inst, 2, 2)
    used = [f for pair in red.clamps for f, _ in pair]
    assert len(set(used + list(red.surviving))) == 5
    assert reduced.dimension == 1


def test_lifted_witness_covers_original_family():
    for seed in range(15):
        inst = gen_random_colorful(2, 2, seed=seed)
        reduced, red = reduce(inst, 2, 1)
        (j,) = red.surviving
        res = tau(reduced, 0, 2)
        lifted = red.lift_copies(inst, reduced, res.witness)
        assert verify_cover(family_problem(inst, j, 2), lifted)


def test_violation_lifts_to_original_transversal():
    inst = gen_colorful_lower(2, 1)
    with pytest.raises(HypothesisViolated) as exc:
        reduce(inst, 2, 1)
    assert len(exc.value.transversal) == 3
    assert transversal_count(inst, exc.value.transversal) < 2


@pytest.mark.parametrize("t", [-1, 2])
def test_bad_parameters(t):
    with pytest.raises(UsageError):
        reduce(gen_colorful_lower(2, 1), 1, t)


def test_corollary_planar_pairwise():
    inst = gen_pq_lower(2)
    out = corollary_pipeline(inst.families[0], inst.points, 2, 2)
    assert (out["s"], out["t"], out["reduced_dimension"]) == (2, 0, 2)
    assert out["identical_families"] and out["tau_original"] == out["tau_reduced"] == 3
    assert out["bound_symbol"] == "N(2,2,2)"


def test_corollary_intersecting_family():
    fam = [Box.from_bounds((0, 2), (0, 2)), Box.from_bounds((1, 3), (1, 3))]
    out = corollary_pipeline(fam, [PointRecord((1, 1))], 2, 2)
    assert out["tau_original"] == out["tau_reduced"] == 1


def test_corollary_arithmetic():
    fam = [Box.from_bounds((0, 2), (0, 2), (0, 2))]
    pts = [PointRecord((1, 1, 1))]
    out = corollary_pipeline(fam, pts, 3, 3)
    assert (out["s"], out["t"], out["reduced_families"], out["reduced_dimension"]) == (3, 0, 3, 3)
    out = corollary_pipeline(fam, pts, 3, 2)
    assert (out["s"], out["t"], out["reduced_families"], out["reduced_dimension"]) == (4, 1, 2, 2)
    assert out["bound_symbol"] == "N(2,2,2)"


def test_corollary_rejects_bad_family():
    fam = [Box.from_bounds((0, 1), (0, 1)), Box.from_bounds((5, 6), (5, 6))]
    with pytest.raises(HypothesisViolated):
        corollary_pipeline(fam, [PointRecord((0, 0)), PointRecord((5, 5))], 2, 2)
