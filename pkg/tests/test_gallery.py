from fractions import Fraction

import pytest

from halman import (
    Box,
    SelfCheckFailed,
    UsageError,
    check_colorful_n_intersecting,
    check_pq_property,
    check_subfamily_n_intersecting,
    family_traces,
    gen_colorful_lower,
    gen_mono_lower,
    gen_pq_lower,
    gen_random_colorful,
    gen_random_mono,
    q_table,
    tau,
    witness_colorful,
)
from halman.gallery import GenParams, _self_check_colorful_lower
from halman.io import dumps

F = Fraction
B = Box.from_bounds


def test_q_table_d2():
    assert [q_table(2, 1, 1, k) for k in (1, 2)] == [2, 1]
    assert [q_table(2, 1, 2, k) for k in (1, 2)] == [1, 2]
    with pytest.raises(UsageError):
        q_table(2, 2, 1, 1)


def test_q_table_last_row_extension():
    for d in range(2, 6):
        for i in range(1, d):
            assert q_table(d, i, 2, d) == d


def test_colorful_lower_d2_explicit():
    inst = gen_colorful_lower(2, 1, 4, F(1, 2))
    h = F(1, 2)
    assert inst.families == (
        (B((-4, -h), (-4, 4)), B((h, 4), (-4, 4))),
        (B((-4, 4), (-4, -h)), B((-4, 4), (h, 4))),
        (B((-2, 2), (-1, 1)), B((-1, 1), (-2, 2))),
    )
    pts = {p.coords for p in inst.points}
    assert pts == {(x, y) for a, b in ((2, 1), (1, 2)) for x in (a, -a) for y in (b, -b)}


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (3, 1), (3, 3), (4, 1)])
def test_colorful_lower_exact_counts(d, n):
    inst = gen_colorful_lower(d, n)
    rep = check_colorful_n_intersecting(inst, n)
    assert set(rep.detail["count_histogram"]) == {n}
    assert all(p.multiplicity == n for p in inst.points)


@pytest.mark.parametrize("d,n", [(2, 2), (3, 1)])
def test_colorful_lower_needs_2n(d, n):
    inst = gen_colorful_lower(d, n)
    assert {tau(inst, j, n).optimum for j in range(2 * d - 1)} == {2 * n}


def test_colorful_lower_parameter_checks():
    with pytest.raises(UsageError):
        gen_colorful_lower(2, 1, N=3)
    with pytest.raises(UsageError):
        gen_colorful_lower(2, 1, delta=1)
    with pytest.raises(UsageError):
        gen_colorful_lower(1, 1)


def test_self_check_catches_tampering():
    inst = gen_colorful_lower(2, 1)
    f = list(inst.families)
    f[2] = (B((-2, 2), (-2, 2)), f[2][1])
    with pytest.raises(SelfCheckFailed):
        _self_check_colorful_lower(inst.replace(families=tuple(f)), 2, 1)


def test_gen_params_defaults():
    p = GenParams(3)
    assert p.N == 6 and p.delta == F(1, 2)


def test_mono_lower_d2():
    inst = gen_mono_lower(2, 1)
    assert len(inst.families[0]) == 4 and len(inst.points) == 4
    assert {p.coords for p in inst.points} == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert tau(inst, 0).optimum == 2


@pytest.mark.parametrize("d", [1, 2, 3])
def test_mono_lower_subfamilies_exact(d):
    inst = gen_mono_lower(d, 2)
    traces = family_traces(inst, 0)
    assert check_subfamily_n_intersecting(traces, 2 * d - 1, 2).holds
    assert not check_subfamily_n_intersecting(traces, 2 * d - 1, 3).holds


@pytest.mark.parametrize("d", [2, 3])
def test_pq_lower(d):
    inst = gen_pq_lower(d)
    assert inst.dimension == d and len(inst.families[0]) == 9
    assert check_pq_property(family_traces(inst, 0), 2, 2).holds
    assert tau(inst, 0).optimum == 3


def test_pq_lower_no_pair_pierces():
    inst = gen_pq_lower(2)
    traces = [t.hits for t in family_traces(inst, 0)]
    pairs = [(a, b) for a in range(9) for b in range(a + 1, 9)]
    assert len(pairs) == 36
    assert not any(all(a in t or b in t for t in traces) for a, b in pairs)


def test_random_colorful_deterministic():
    a = gen_random_colorful(2, 2, seed=42)
    b = gen_random_colorful(2, 2, seed=42)
    assert dumps(a) == dumps(b)
    assert dumps(a) != dumps(gen_random_colorful(2, 2, seed=43))
    s = gen_random_colorful(3, 2, seed=42, structured=True)
    assert dumps(s) == dumps(gen_random_colorful(3, 2, seed=42, structured=True))


@pytest.mark.parametrize("structured", [False, True])
def test_random_colorful_satisfies_hypothesis(structured):
    for seed in range(10):
        inst = gen_random_colorful(3, 3, seed=seed, structured=structured)
        assert len(inst.families) == 5
        assert check_colorful_n_intersecting(inst, 3).holds


def test_random_colorful_sizes():
    inst = gen_random_colorful(2, 3, sizes=(2, 2, 2), seed=1)
    assert [len(f) for f in inst.families] == [2, 2, 2]
    assert witness_colorful(inst, 3).size <= 6
    s = gen_random_colorful(2, 1, sizes=(3, 2, 4), seed=1, structured=True)
    assert [len(f) for f in s.families] == [3, 2, 4]
    with pytest.raises(UsageError):
        gen_random_colorful(2, 1, sizes=(1, 2, 2), structured=True)


def test_random_mono_satisfies_hypothesis():
    for seed in range(10):
        inst = gen_random_mono(2, 2, seed=seed)
        traces = family_traces(inst, 0)
        assert check_subfamily_n_intersecting(traces, 3, 2).holds
