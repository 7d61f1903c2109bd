import json
import random
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from choosability import pipeline
from choosability.harness import reduced_style_lists, reduced_style_parts, uniform_lists
from choosability.instance import ListAssignment, Profile, main_bound, make_instance
from choosability.oracle import find_coloring
from choosability.pipeline import (
    EffVertex,
    MergeState,
    PipelineFailure,
    PreconditionError,
    apply_reductions,
    check_properties,
    color,
    ell,
    good_pairs,
    remaining_merges,
    replay,
    select_merges_z3,
    select_merges_z4,
    structure_checks,
    validate_coloring,
)

fs = frozenset

# K_{4,4} with no reduction available and no rainbow SDR; reaches the merge stage.
K44_PART = [{0, 1, 2}, {0, 1, 3}, {2, 3, 4}, {4, 5, 6}]
# K_{4,3,3} drawn by the reduced-style generator; merges in Z3 and in Y.
K433_LISTS = [[0, 2, 7, 8], [0, 1, 2, 3], [4, 5, 7, 8], [3, 4, 5, 6], [1, 4, 6, 8],
              [0, 2, 5, 6], [2, 4, 5, 8], [1, 3, 4, 5], [0, 4, 6, 8], [3, 6, 7, 8]]


def test_validate_coloring_examples():
    k2 = make_instance([1, 1])
    assert validate_coloring(k2, ListAssignment.of([[0], [1]]), (0, 1))
    assert not validate_coloring(k2, ListAssignment.of([[0], [1]]), (0, 0))
    assert not validate_coloring(k2, ListAssignment.of([[0], [0, 1]]), (0, 0))
    assert not validate_coloring(k2, ListAssignment.of([[0], [1]]), (0,))
    assert validate_coloring(make_instance([2]), ListAssignment.of([[0], [0]]), (0, 0))


def test_reduction_two_part():
    inst = make_instance([2, 4])
    lists = ListAssignment.of([{0, 1, 2}, {0, 3, 4}, {1, 3, 5}, {2, 4, 5}, {1, 2, 6}, {3, 4, 6}])
    red = apply_reductions(inst, lists)
    first = red.steps[0]
    assert (first["rule"], first["part"], first["vertices"], first["color"]) == ("R1", 0, [0, 1], 0)
    assert red.partial[0] == red.partial[1] == 0
    assert all(0 not in l for l in red.reduced.lists)


def test_reduction_three_part():
    inst = make_instance([3, 3])
    lists = ListAssignment.of([{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {2, 4, 6}, {1, 2, 3}])
    red = apply_reductions(inst, lists)
    first = red.steps[0]
    assert (first["rule"], first["vertices"], first["color"]) == ("R2", [0, 1, 2], 0)
    assert red.reduced.instance.part_sizes == (3,)


def test_reduction_noop():
    inst = make_instance([4, 4])
    lists = ListAssignment.of(K44_PART * 2)
    red = apply_reductions(inst, lists)
    assert red.steps == [] and red.partial == {} and red.stuck is None
    assert red.reduced.instance == inst and red.reduced.lists == lists


def test_reduction_stuck_when_pot_is_large():
    inst = make_instance([3, 3])
    part = [{0, 1, 2}, {3, 4, 5}, {6, 7, 8}]
    lists = ListAssignment.of(part * 2)
    red = apply_reductions(inst, lists)
    assert red.stuck is not None and red.steps == []
    col, trace = color(inst, lists)
    assert trace.stage == "rainbow" and trace.reduction_stuck == red.stuck
    assert validate_coloring(inst, lists, col)


def test_reductions_keep_the_bound():
    rng = random.Random(7)
    for _ in range(300):
        sizes = [rng.randint(1, 5) for _ in range(rng.randint(1, 4))]
        inst = make_instance(sizes)
        lists = uniform_lists(rng, inst)
        red = apply_reductions(inst, lists)
        for step in red.steps:
            assert step["min_list"] >= step["bound"]
        r = red.reduced
        if r.instance is not None:
            assert r.lists.min_size() >= main_bound(r.instance.n, r.instance.k)
        for v, c in red.partial.items():
            assert c in lists[v]


def test_ell_examples():
    assert ell([fs({0, 1}), fs({1, 2}), fs({2, 3})]) == 1
    assert ell([fs({0}), fs({1}), fs({2})]) == 0
    assert ell([fs(c) for c in combinations(range(3), 2)]) == 1
    with pytest.raises(ValueError):
        ell([fs({0})])


def test_good_pairs_four_part():
    u, v, w, z = fs({0, 1, 2, 10}), fs({0, 1, 2, 11}), fs({0, 1, 20}), fs({2, 10, 11, 20})
    assert [len(u & v), len(w & z), len(u & w), len(v & z)] == [3, 1, 2, 2]
    got = good_pairs([u, v, w, z], Profile(0, 0, 0, 1))
    assert (0, 1) in got and (2, 3) not in got


def test_good_pairs_three_part_threshold():
    lists = [fs({0, 1}), fs({1, 2}), fs({5, 6})]
    assert good_pairs(lists, Profile(0, 0, 1, 0)) == [(0, 1)]
    # with k1 + k4 + 1 = 6 a pair needs 2 shared colors
    lists = [fs({0, 1, 2}), fs({0, 1, 3}), fs({2, 3, 4})]
    assert good_pairs(lists, Profile(5, 0, 1, 0)) == [(0, 1)]
    assert good_pairs(lists, Profile(0, 0, 1, 0)) == [(0, 1), (0, 2), (1, 2)]
    with pytest.raises(ValueError):
        good_pairs(lists[:2], Profile(0, 0, 1, 0))


def test_select_z3_prefix_scan():
    part = [fs(range(5)) | {10}, fs(range(5)) | {11}, fs({20})]
    t3, chosen, merges = select_merges_z3([part, part], Profile(0, 0, 3, 0))
    assert t3 == 3 and chosen == [0, 1] and merges == {0: (0, 1), 1: (0, 1)}


def test_select_z3_nothing_qualifies():
    part = [fs({0}), fs({1}), fs({2})]
    t3, chosen, merges = select_merges_z3([part, part], Profile(0, 0, 3, 0))
    assert t3 == 1 and chosen == [] and merges == {}


def test_select_z3_empty():
    assert select_merges_z3([], Profile(2, 0, 0, 0)) == (0, [], {})


def test_select_z4_thresholds():
    prof = Profile(1, 0, 0, 1)
    u, v = fs({0, 1, 2}), fs({0, 1, 3})
    s, merges = select_merges_z4([[u, v, fs({4, 5}), fs({5, 6})]], 5, prof)
    assert s == 2 and merges == {0: [(0, 1)]}
    w, z = fs({4, 5, 7}), fs({4, 5, 8})
    s, merges = select_merges_z4([[u, v, w, z]], 5, prof)
    assert merges == {0: [(0, 1), (2, 3)]}
    assert not (u & v) & (w & z)


def test_select_z4_fractional_s():
    with pytest.raises(PipelineFailure, match="not an integer"):
        select_merges_z4([], 6, Profile(0, 0, 2, 0))


def test_remaining_merges_trivial():
    merges, reps, res = remaining_merges([], [], Profile(1, 0, 0, 0))
    assert merges == {} and reps == () and res.ok
    merges, reps, res = remaining_merges([], [fs({0, 1}), fs({2, 3})], Profile(1, 0, 0, 0))
    assert res.ok and reps[0] in {0, 1} and reps[1] in {2, 3}


def test_remaining_merges_violator():
    with pytest.raises(PipelineFailure) as err:
        remaining_merges([], [fs({0}), fs({0})], Profile(1, 0, 0, 0))
    assert err.value.detail["violator"] == [0, 1]


def test_check_properties_vacuous():
    star = [[EffVertex((0,), fs({0, 1})), EffVertex((1,), fs({2, 3}))], [EffVertex((2,), fs({4, 5}))]]
    state = MergeState(star, [2, 1], t3=0, z3=[], z3_prime=[], z4=[], y=[], s=None)
    props = check_properties(state, 3, Profile(1, 1, 0, 0))
    assert props["P1"] and props["P2"] and props["P8"]


def test_check_properties_unmerged_four_part_fails_p2():
    star = [[EffVertex((i,), fs({i})) for i in range(4)]]
    state = MergeState(star, [4], t3=0, z3=[], z3_prime=[], z4=[], y=[], s=None)
    assert not check_properties(state, 4, Profile(0, 0, 0, 1))["P2"]


def test_color_complete_graph_is_base_case():
    inst = make_instance([1] * 5)
    lists = ListAssignment.of([{i, 5, 6, 7, 8} for i in range(5)])
    col, trace = color(inst, lists)
    assert col == (0, 1, 2, 3, 4)
    assert trace.stage == "base" and trace.base_case


def test_color_k33_random_assignments():
    inst = make_instance([3, 3])
    subsets = [fs(c) for c in combinations(range(5), 3)]
    rng = random.Random(0)
    for _ in range(300):
        lists = ListAssignment(tuple(rng.choice(subsets) for _ in range(6)))
        col, _ = color(inst, lists)
        assert validate_coloring(inst, lists, col)


def test_color_k24_all_three_lists():
    inst = make_instance([2, 4])
    subsets = [fs(c) for c in combinations(range(5), 3)]
    # fix the 2-part, sweep the 4-part exhaustively up to order
    for tail in combinations(subsets, 4):
        lists = ListAssignment((subsets[0], subsets[9]) + tail)
        col, _ = color(inst, lists)
        assert validate_coloring(inst, lists, col)


def test_color_precondition():
    with pytest.raises(PreconditionError):
        color(make_instance([3, 3]), ListAssignment.of([{0, 1}] * 6))


def test_merge_stage_k44():
    inst = make_instance([4, 4])
    lists = ListAssignment.of(K44_PART * 2)
    col, trace = color(inst, lists)
    assert trace.stage == "merge" and trace.fallback is None
    assert trace.z4 == [0] and trace.s == 3 and trace.t3 == 0
    assert all(trace.properties.values()) and len(trace.properties) == 8
    assert validate_coloring(inst, lists, col)
    assert replay(trace, inst.n) == col


def test_merge_stage_k433():
    inst = make_instance([4, 3, 3])
    lists = ListAssignment.of(K433_LISTS)
    col, trace = color(inst, lists)
    assert trace.stage == "merge"
    assert trace.t3 == 2 and trace.z3 == [1] and trace.z3_prime == [1] and trace.z4 == []
    assert all(trace.structure.values()) and all(trace.properties.values())
    for m in trace.merges:
        a, b = m["vertices"]
        assert set(m["colors"]) == lists[a] & lists[b]
        assert col[a] == col[b]
    reps = trace.final_sdr["representatives"]
    assert len(set(reps)) == len(reps)
    assert replay(json.loads(trace.to_json()), inst.n) == col


def test_fallback_is_recorded(monkeypatch):
    def broken(reduced, trace):
        raise PipelineFailure("forced")

    monkeypatch.setattr(pipeline, "_merge_stage", broken)
    inst = make_instance([4, 4])
    lists = ListAssignment.of(K44_PART * 2)
    col, trace = color(inst, lists)
    assert trace.stage == "fallback" and trace.fallback == "forced"
    assert validate_coloring(inst, lists, col)
    assert replay(trace, inst.n) == col


def test_fallback_to_full_instance(monkeypatch):
    # if the reduced instance were uncolorable the oracle reruns on the input
    inst = make_instance([2, 4])
    lists = ListAssignment.of([{0, 1, 2}, {0, 3, 4}, {1, 3, 5}, {2, 4, 5}, {1, 2, 6}, {3, 4, 6}])
    red = apply_reductions(inst, lists)
    calls = []
    real = pipeline.find_coloring

    def fake(instance, la):
        calls.append(instance)
        return None if len(calls) == 1 else real(instance, la)

    monkeypatch.setattr(pipeline, "find_coloring", fake)
    trace = pipeline.ProofTrace(parts=[2, 4], bound=3)
    partial = dict(red.partial)
    classes = pipeline._oracle_classes(red.reduced, inst, lists, partial, trace)
    assert partial == {} and trace.reductions == []
    col = [None] * inst.n
    for cls in classes:
        for v in cls["vertices"]:
            col[v] = cls["color"]
    assert validate_coloring(inst, lists, col)


def test_structure_checks_on_reduced_instance():
    red = apply_reductions(make_instance([4, 3, 3]), ListAssignment.of(K433_LISTS))
    assert all(structure_checks(red.reduced).values())


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_color_is_always_valid(seed, n):
    rng = random.Random(seed)
    sizes = []
    while sum(sizes) < n:
        sizes.append(rng.randint(1, n - sum(sizes)))
    inst = make_instance(sizes)
    lists = uniform_lists(rng, inst)
    col, trace = color(inst, lists)
    assert validate_coloring(inst, lists, col)
    assert replay(trace, inst.n) == col
    if trace.stage == "merge":
        assert all(trace.properties.values())


def test_reduced_style_corpus_reaches_merge():
    rng = random.Random(11)
    stages = []
    while len(stages) < 60:
        parts = reduced_style_parts(rng, 14)
        if parts is None:
            continue
        inst = make_instance(parts)
        lists = reduced_style_lists(rng, inst)
        if lists is None:
            continue
        col, trace = color(inst, lists)
        assert validate_coloring(inst, lists, col)
        if trace.stage == "merge":
            assert len(trace.properties) == 8 and all(trace.properties.values())
            assert find_coloring(inst, lists) is not None
        stages.append(trace.stage)
    assert stages.count("merge") >= 30


def test_k22_single_color_lists_exhaustive():
    # n <= 2k+1: bound is k, and every such assignment must be colorable
    inst = make_instance([2, 2])
    subsets = [fs(c) for c in combinations(range(3), 2)]
    for lists in product(subsets, repeat=4):
        col, trace = color(inst, ListAssignment(lists))
        assert trace.base_case and validate_coloring(inst, ListAssignment(lists), col)
