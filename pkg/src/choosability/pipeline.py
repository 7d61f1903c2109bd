"""Constructive L-coloring following the merge-and-SDR argument.

Given lists of size at least max{k, ceil((n+k-1)/3)} on a complete
k-partite graph, :func:`color` proceeds as follows.

1. Small graphs (n <= 2k+1) go straight to the exact oracle.
2. Stable sets sharing a color are colored and deleted while that keeps
   the list-size bound intact (:func:`apply_reductions`).
3. If the reduced lists have an SDR, that SDR is a coloring.
4. Otherwise pairs inside parts are merged (``Z3``/``Z4`` greedy merges,
   then an SDR-driven choice for the remaining parts), properties P1-P8
   are checked, and a final SDR over the merged lists gives the coloring.

Every inequality the argument relies on is checked at runtime. A failed
check raises :class:`PipelineFailure` internally and the run falls back to
the exact oracle, recording why in the trace.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Sequence

from .instance import (
    Coloring,
    Instance,
    InvalidSpecification,
    ListAssignment,
    Profile,
    ceil_div,
    main_bound,
    make_instance,
    profile,
)
from .oracle import find_coloring
from .sdr import find_sdr


class PreconditionError(InvalidSpecification):
    """Lists are shorter than the bound the pipeline needs."""


class PipelineFailure(Exception):
    """A step of the merge argument did not go through; carries the reason."""

    def __init__(self, reason: str, **detail):
        super().__init__(reason)
        self.reason = reason
        self.detail = detail


class CounterexampleFound(RuntimeError):
    """No L-coloring exists although the lists meet the bound."""


def required_size(n: int, k: int) -> int:
    return main_bound(n, k) if n else 0


def validate_coloring(instance: Instance, lists: ListAssignment, coloring: Sequence[int]) -> bool:
    if len(coloring) != instance.n or len(lists) != instance.n:
        return False
    owner: dict[int, int] = {}
    for v, c in enumerate(coloring):
        if c not in lists[v]:
            return False
        p = instance.part_of[v]
        if owner.setdefault(c, p) != p:
            return False
    return True


# --------------------------------------------------------------------------
# trace
# --------------------------------------------------------------------------

@dataclass
class ProofTrace:
    """JSON-friendly record of one :func:`color` run.

    Vertex ids are those of the input instance; part ids likewise.
    ``classes`` holds the color classes produced by the finishing stage;
    together with ``reductions`` it determines the whole coloring.
    """

    parts: list[int]
    bound: int
    base_case: bool = False
    reductions: list[dict] = field(default_factory=list)
    reduction_stuck: str | None = None
    reduced_parts: list[int] = field(default_factory=list)
    reduced_pot: int | None = None
    reduced_n: int | None = None
    structure: dict = field(default_factory=dict)
    stage: str = ""
    t3: int | None = None
    s: int | None = None
    z3: list[int] = field(default_factory=list)
    z3_prime: list[int] = field(default_factory=list)
    z4: list[int] = field(default_factory=list)
    good_pairs: dict[str, list[list[int]]] = field(default_factory=dict)
    merges: list[dict] = field(default_factory=list)
    properties: dict[str, bool] = field(default_factory=dict)
    x_family_sdr: dict | None = None
    final_sdr: dict | None = None
    fallback: str | None = None
    classes: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def replay(trace: ProofTrace | dict, n: int) -> Coloring:
    """Rebuild the coloring recorded in a trace."""
    d = trace.to_dict() if isinstance(trace, ProofTrace) else trace
    out: list[int | None] = [None] * n
    for step in d["reductions"]:
        for v in step["vertices"]:
            out[v] = step["color"]
    for cls in d["classes"]:
        for v in cls["vertices"]:
            out[v] = cls["color"]
    if any(c is None for c in out):
        raise ValueError("trace does not color every vertex")
    return tuple(out)  # type: ignore[arg-type]


# --------------------------------------------------------------------------
# reductions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Reduced:
    """What is left after reductions, with maps back to the input."""

    instance: Instance | None
    lists: ListAssignment
    vertices: tuple[int, ...]  # reduced vertex -> input vertex
    part_ids: tuple[int, ...]  # reduced part -> input part

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass
class ReductionResult:
    partial: dict[int, int]
    reduced: Reduced
    steps: list[dict]
    stuck: str | None = None


def _find_step(parts, cur, live, n, k):
    for p in live:
        if len(parts[p]) == 2:
            u, v = parts[p]
            common = cur[u] & cur[v]
            if common:
                return "R1", p, [u, v], min(common)
    for p in live:
        if len(parts[p]) >= 3:
            counts: dict[int, int] = {}
            for v in parts[p]:
                for c in cur[v]:
                    counts[c] = counts.get(c, 0) + 1
            shared = sorted(c for c, cnt in counts.items() if cnt >= 3)
            if shared:
                c = shared[0]
                rule = "R2" if len(parts[p]) <= 4 else "R3"
                return rule, p, [v for v in parts[p] if c in cur[v]], c
    if (n + k - 1) % 3:
        largest = max(len(parts[p]) for p in live)
        order = [p for p in live if len(parts[p]) == largest]
        order += [p for p in live if 3 <= len(parts[p]) < largest]
        for p in order:
            for u, v in combinations(parts[p], 2):
                common = cur[u] & cur[v]
                if common:
                    return "R4", p, [u, v], min(common)
    return None


def _reduced_view(instance: Instance, parts, cur) -> Reduced:
    live = [p for p in range(instance.k) if parts[p]]
    vertices = tuple(v for p in live for v in parts[p])
    sub = make_instance([len(parts[p]) for p in live]) if live else None
    lists = ListAssignment(tuple(frozenset(cur[v]) for v in vertices))
    return Reduced(sub, lists, vertices, tuple(live))


def _check_precondition(instance: Instance, lists: ListAssignment) -> int:
    lists.check_covers(instance)
    need = main_bound(instance.n, instance.k)
    if lists.min_size() < need:
        raise PreconditionError(
            f"lists must have size >= {need} on {instance}, smallest is {lists.min_size()}"
        )
    return need


def apply_reductions(instance: Instance, lists: ListAssignment) -> ReductionResult:
    """Color and delete stable sets with a common color while n >= 2k+2.

    Rules, tried in order: R1 a 2-part with intersecting lists; R2/R3 a
    color on three or more lists of one part (R3 for parts of size >= 5);
    R4 when (n+k-1) is not divisible by 3, an intersecting pair inside a
    largest part (other parts of size >= 3 are tried after it). A step is
    applied only if the remaining lists still meet the bound for the
    remaining graph. ``stuck`` is set when R4 is needed but unavailable or
    a step would break the bound.
    """
    _check_precondition(instance, lists)
    parts = [list(instance.part(i)) for i in range(instance.k)]
    cur = [set(l) for l in lists]
    partial: dict[int, int] = {}
    steps: list[dict] = []
    stuck = None
    while True:
        live = [p for p in range(instance.k) if parts[p]]
        n = sum(len(parts[p]) for p in live)
        k = len(live)
        if n == 0 or n <= 2 * k + 1:
            break
        step = _find_step(parts, cur, live, n, k)
        if step is None:
            if (n + k - 1) % 3:
                stuck = "no intersecting pair for the divisibility reduction"
            break
        rule, p, chosen, c = step
        rest = [q for q in live if q != p or len(parts[p]) > len(chosen)]
        n2 = n - len(chosen)
        k2 = len(rest)
        need = required_size(n2, k2)
        smallest = min(
            (len(cur[v] - {c}) for q in rest for v in parts[q] if v not in chosen),
            default=need,
        )
        if smallest < need:
            stuck = f"{rule} on part {p} would leave a list of size {smallest} < {need}"
            break
        for v in chosen:
            partial[v] = c
        chosen_set = set(chosen)
        parts[p] = [v for v in parts[p] if v not in chosen_set]
        for q in live:
            for v in parts[q]:
                cur[v].discard(c)
        steps.append({
            "rule": rule, "part": p, "vertices": sorted(chosen), "color": c,
            "n": n2, "k": k2, "bound": need, "min_list": smallest,
        })
    return ReductionResult(partial, _reduced_view(instance, parts, cur), steps, stuck)


# --------------------------------------------------------------------------
# merge selection
# --------------------------------------------------------------------------

Pair = tuple[int, int]


def ell(part_lists: Sequence[frozenset[int]]) -> int:
    """Largest intersection of two lists in a part."""
    if len(part_lists) < 2:
        raise ValueError("ell needs at least two vertices")
    return max(len(a & b) for a, b in combinations(part_lists, 2))


def max_pair(part_lists: Sequence[frozenset[int]]) -> Pair:
    best, best_size = (0, 1), -1
    for i, j in combinations(range(len(part_lists)), 2):
        size = len(part_lists[i] & part_lists[j])
        if size > best_size:
            best, best_size = (i, j), size
    return best


def good_pairs(part_lists: Sequence[frozenset[int]], prof: Profile) -> list[Pair]:
    """Pairs whose merge keeps the later Hall bounds valid.

    3-parts: intersection at least (k1+k4+1)/3. 4-parts: intersection at
    least that of the complementary pair. A maximizing pair is always
    included.
    """
    size = len(part_lists)
    if size not in (3, 4):
        raise ValueError(f"good pairs are defined for parts of size 3 or 4, not {size}")
    out = set()
    for i, j in combinations(range(size), 2):
        inter = len(part_lists[i] & part_lists[j])
        if size == 3:
            if 3 * inter >= prof.k1 + prof.k4 + 1:
                out.add((i, j))
        else:
            w, z = (x for x in range(4) if x not in (i, j))
            if inter >= len(part_lists[w] & part_lists[z]):
                out.add((i, j))
    out.add(max_pair(part_lists))
    return sorted(out)


def select_merges_z3(z3_lists: Sequence[Sequence[frozenset[int]]], prof: Profile):
    """Choose t3 and the members of Z3 that get a merge.

    Returns ``(t3, chosen, merges)`` where ``chosen`` lists positions in
    ``z3_lists`` and ``merges`` maps each chosen position to its pair.
    """
    k, k3 = prof.k, prof.k3
    base = ceil_div(k3, 3)
    ells = [ell(p) for p in z3_lists]
    ranked = sorted(range(len(z3_lists)), key=lambda i: (-ells[i], i))
    t3 = base
    for t in range(base + len(z3_lists), base, -1):
        need = t - base
        # the need-th best part is the weakest one required
        if 3 * ells[ranked[need - 1]] >= k + t - 1:
            t3 = t
            break
    chosen = sorted(ranked[: t3 - base])
    merges = {i: max_pair(z3_lists[i]) for i in chosen}
    return t3, chosen, merges


def select_merges_z4(z4_lists: Sequence[Sequence[frozenset[int]]], n: int, prof: Profile):
    """Merge a maximizing pair in each Z4 part, and the other pair too if it meets s.

    Returns ``(s, merges)`` with ``merges[i]`` a list of one or two pairs.
    """
    num = 2 * n - prof.k + 1
    if num % 3:
        raise PipelineFailure("merge threshold s is not an integer", numerator=num)
    s = num // 3 - prof.k4
    floor = ceil_div(prof.k, 3)
    merges: dict[int, list[Pair]] = {}
    for i, part_lists in enumerate(z4_lists):
        u, v = max_pair(part_lists)
        w, z = (x for x in range(4) if x not in (u, v))
        pairs = [(u, v)]
        if len(part_lists[w] & part_lists[z]) >= s:
            pairs.append((w, z))
        for a, b in pairs:
            size = len(part_lists[a] & part_lists[b])
            if size < floor:
                raise PipelineFailure(
                    "merged list in Z4 smaller than k/3", part=i, size=size, floor=floor
                )
        merges[i] = pairs
    return s, merges


def pair_colors(part_lists: Sequence[frozenset[int]], pairs: Sequence[Pair]) -> frozenset[int]:
    out: set[int] = set()
    for i, j in pairs:
        out |= part_lists[i] & part_lists[j]
    return frozenset(out)


def remaining_merges(
    y_lists: Sequence[Sequence[frozenset[int]]],
    t_lists: Sequence[frozenset[int]],
    prof: Profile,
):
    """Choose one good merge per part of Y so the merged lists have an SDR.

    Builds the family of good-pair colors ``L_A`` for each part in Y plus
    the lists of already merged vertices, finds an SDR, and in each part of
    Y merges the first good pair containing its representative. Returns
    ``(merges, reps, sdr_result)`` with ``reps`` covering Y then T.
    """
    la = []
    goods = []
    for i, part_lists in enumerate(y_lists):
        g = good_pairs(part_lists, prof)
        goods.append(g)
        colors = pair_colors(part_lists, g)
        if len(part_lists) == 3:
            ok = 3 * len(colors) >= 3 * prof.k3 + prof.k1 + prof.k4
        else:
            ok = len(colors) >= prof.k3 + prof.k4
        if not ok:
            raise PipelineFailure("good-pair color set below its lower bound", part=i, size=len(colors))
        la.append(colors)
    family = la + list(t_lists)
    result = find_sdr(family)
    if not result.ok:
        raise PipelineFailure("family X has no SDR", violator=list(result.violator), sdr=result)
    reps = result.representatives
    merges = {}
    for i, part_lists in enumerate(y_lists):
        c = reps[i]
        merges[i] = next(p for p in goods[i] if c in part_lists[p[0]] & part_lists[p[1]])
    return merges, reps, result


# --------------------------------------------------------------------------
# merge state and properties
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EffVertex:
    members: tuple[int, ...]  # reduced vertex indices
    colors: frozenset[int]

    @property
    def merged(self) -> bool:
        return len(self.members) == 2


@dataclass
class MergeState:
    parts: list[list[EffVertex]]
    sizes: list[int]
    t3: int
    z3: list[int]
    z3_prime: list[int]
    z4: list[int]
    y: list[int]
    s: int | None

    def merged_vertices(self) -> list[EffVertex]:
        return [x for part in self.parts for x in part if x.merged]


def build_part(vertices: Sequence[int], lists: Sequence[frozenset[int]], pairs: Sequence[Pair]) -> list[EffVertex]:
    taken = set()
    out = []
    for i, j in pairs:
        if i in taken or j in taken:
            raise PipelineFailure("vertex merged twice", pair=(i, j))
        taken.update((i, j))
        out.append(EffVertex((vertices[i], vertices[j]), lists[i] & lists[j]))
    for i, v in enumerate(vertices):
        if i not in taken:
            out.append(EffVertex((v,), lists[i]))
    return out


def _union(xs: Sequence[EffVertex]) -> int:
    out: set[int] = set()
    for x in xs:
        out |= x.colors
    return len(out)


def check_properties(state: MergeState, n: int, prof: Profile) -> dict[str, bool]:
    """Evaluate P1-P8 on a complete set of merges."""
    k, k3, k4, t3 = prof.k, prof.k3, prof.k4, state.t3
    z3, z4 = set(state.z3), set(state.z4)
    res = {f"P{i}": True for i in range(1, 9)}
    res["P1"] = 3 * t3 >= k3
    for a, (star, size) in enumerate(zip(state.parts, state.sizes)):
        if size == 4 and not any(x.merged for x in star):
            res["P2"] = False
        for trio in combinations(star, 3):
            if _union(trio) < n - t3 - k4:
                res["P3"] = False
        for pair in combinations(star, 2):
            u = _union(pair)
            if size == 3 and len(star) == 3 and u < k + k3 + k4:
                res["P4"] = False
            if a in z3 and u < k + t3 + k4:
                res["P5"] = False
            if size == 3 and 3 * u < 3 * k + k3 + 3 * k4:
                res["P6"] = False
            if a in z4 and u < k + k4:
                res["P7"] = False
    res["P8"] = find_sdr([x.colors for x in state.merged_vertices()]).ok
    return res


def structure_checks(reduced: Reduced) -> dict[str, bool]:
    """Facts the merge argument takes from the reductions and a small pot."""
    inst, lists = reduced.instance, reduced.lists
    n, k = inst.n, inst.k
    out = {
        "parts_at_most_4": max(inst.part_sizes) <= 4,
        "n_at_least_2k_plus_2": n >= 2 * k + 2,
        "n_plus_k_minus_1_divisible_by_3": (n + k - 1) % 3 == 0,
        "pot_below_n": len(lists.pot) < n,
        "two_parts_disjoint": True,
        "no_color_thrice_in_part": True,
        "triples_intersect_at_least_k": True,
        "ell_at_least_k_over_3": True,
    }
    for part in inst.parts():
        pl = [lists[v] for v in part]
        if len(pl) == 2 and pl[0] & pl[1]:
            out["two_parts_disjoint"] = False
        counts: dict[int, int] = {}
        for l in pl:
            for c in l:
                counts[c] = counts.get(c, 0) + 1
        if any(cnt >= 3 for cnt in counts.values()):
            out["no_color_thrice_in_part"] = False
        if len(pl) >= 3:
            for trio in combinations(pl, 3):
                if sum(len(a & b) for a, b in combinations(trio, 2)) < k:
                    out["triples_intersect_at_least_k"] = False
            if 3 * ell(pl) < k:
                out["ell_at_least_k_over_3"] = False
    return out


def _merge_stage(reduced: Reduced, trace: ProofTrace) -> list[EffVertex]:
    inst, lists = reduced.instance, reduced.lists
    n = inst.n
    checks = structure_checks(reduced)
    trace.structure = checks
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise PipelineFailure("reduced instance lacks required structure: " + ", ".join(failed))
    need = (n + inst.k - 1) // 3
    if lists.min_size() < need:
        raise PipelineFailure("reduced lists below (n+k-1)/3")

    prof = profile(inst)
    parts = inst.parts()
    part_lists = [[lists[v] for v in part] for part in parts]
    pid = reduced.part_ids
    threes = [a for a in range(inst.k) if inst.part_sizes[a] == 3]
    fours = [a for a in range(inst.k) if inst.part_sizes[a] == 4]

    z3 = threes[: (2 * prof.k3) // 3]
    z4_num = prof.k1 - prof.k3 + prof.k4 + 1
    if z4_num % 3:
        raise PipelineFailure("Z4 size is not an integer")
    if z4_num // 3 >= max(prof.k4, 1):
        raise PipelineFailure("Z4 would need as many 4-parts as exist", size=z4_num // 3, k4=prof.k4)
    z4_size = max(0, z4_num // 3)
    z4 = fours[:z4_size]

    pairs: dict[int, list[Pair]] = {a: [] for a in range(inst.k)}
    t3, chosen, m3 = select_merges_z3([part_lists[a] for a in z3], prof)
    z3_prime = [z3[i] for i in chosen]
    for i, pr in m3.items():
        pairs[z3[i]].append(pr)
    s, m4 = select_merges_z4([part_lists[a] for a in z4], n, prof)
    for i, prs in m4.items():
        pairs[z4[i]].extend(prs)
    trace.t3, trace.s = t3, s
    trace.z3 = [pid[a] for a in z3]
    trace.z3_prime = [pid[a] for a in z3_prime]
    trace.z4 = [pid[a] for a in z4]

    t_vertices = [
        EffVertex((parts[a][i], parts[a][j]), part_lists[a][i] & part_lists[a][j])
        for a in z3_prime + z4 for i, j in pairs[a]
    ]
    in_z = set(z3) | set(z4)
    y = [a for a in threes + fours if a not in in_z]
    y.sort()
    for a in y:
        trace.good_pairs[str(pid[a])] = [
            [parts[a][i], parts[a][j]] for i, j in good_pairs(part_lists[a], prof)
        ]
    try:
        my, reps, xres = remaining_merges(
            [part_lists[a] for a in y], [w.colors for w in t_vertices], prof
        )
    except PipelineFailure as e:
        if "sdr" in e.detail:
            trace.x_family_sdr = {"violator": e.detail["violator"]}
        raise
    trace.x_family_sdr = {"representatives": list(reps)}
    for i, pr in my.items():
        pairs[y[i]].append(pr)

    star = [build_part(parts[a], part_lists[a], pairs[a]) for a in range(inst.k)]
    for a, st in enumerate(star):
        for x in st:
            if x.merged:
                u, v = x.members
                if x.colors != lists[u] & lists[v]:
                    raise PipelineFailure("merged list differs from intersection")
                for w in st:
                    if not w.merged and w.colors & x.colors:
                        raise PipelineFailure("merged list meets an unmerged list of its part")
    for a in range(inst.k):
        for x in star[a]:
            if x.merged:
                trace.merges.append({
                    "part": pid[a],
                    "vertices": [reduced.vertices[m] for m in x.members],
                    "colors": sorted(x.colors),
                })
    t3_actual = sum(1 for a in threes if any(x.merged for x in star[a]))
    if t3_actual != t3:
        raise PipelineFailure("number of merged 3-parts differs from t3", expected=t3, got=t3_actual)

    state = MergeState(star, list(inst.part_sizes), t3, z3, z3_prime, z4, y, s)
    props = check_properties(state, n, prof)
    trace.properties = props
    bad = [p for p, ok in props.items() if not ok]
    if bad:
        raise PipelineFailure("properties failed: " + ", ".join(bad))

    flat = [x for st in star for x in st]
    final = find_sdr([x.colors for x in flat])
    if not final.ok:
        trace.final_sdr = {"violator": list(final.violator)}
        raise PipelineFailure("final SDR does not exist")
    trace.final_sdr = {"representatives": list(final.representatives)}
    return [EffVertex(x.members, frozenset([c])) for x, c in zip(flat, final.representatives)]


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def _classes_from_coloring(vertices: Sequence[int], coloring: Sequence[int]) -> list[dict]:
    groups: dict[int, list[int]] = {}
    for v, c in zip(vertices, coloring):
        groups.setdefault(c, []).append(v)
    return [{"vertices": sorted(vs), "color": c} for c, vs in sorted(groups.items())]


def _oracle_classes(reduced: Reduced, instance: Instance, lists: ListAssignment, partial, trace):
    col = find_coloring(reduced.instance, reduced.lists)
    if col is not None:
        return _classes_from_coloring(reduced.vertices, col)
    col = find_coloring(instance, lists)
    if col is None:
        raise CounterexampleFound(f"{instance} has no L-coloring for lists meeting the bound")
    trace.reductions = []
    partial.clear()
    return _classes_from_coloring(range(instance.n), col)


def color(instance: Instance, lists: ListAssignment) -> tuple[Coloring, ProofTrace]:
    """L-color ``instance``; lists must have size >= max{k, ceil((n+k-1)/3)}."""
    bound = _check_precondition(instance, lists)
    trace = ProofTrace(parts=list(instance.part_sizes), bound=bound)

    if instance.n <= 2 * instance.k + 1:
        trace.base_case = True
        trace.stage = "base"
        col = find_coloring(instance, lists)
        if col is None:
            raise CounterexampleFound(f"{instance} has no L-coloring although n <= 2k+1")
        trace.classes = _classes_from_coloring(range(instance.n), col)
    else:
        red = apply_reductions(instance, lists)
        reduced = red.reduced
        trace.reductions = red.steps
        trace.reduction_stuck = red.stuck
        trace.reduced_n = reduced.n
        trace.reduced_pot = len(reduced.lists.pot)
        if reduced.instance is not None:
            trace.reduced_parts = list(reduced.instance.part_sizes)
        trace.classes = _finish(instance, lists, red, trace)

    coloring = replay(trace, instance.n)
    if not validate_coloring(instance, lists, coloring):
        raise RuntimeError("internal error: produced coloring does not validate")
    return coloring, trace


def _finish(instance, lists, red: ReductionResult, trace: ProofTrace) -> list[dict]:
    reduced = red.reduced
    if reduced.instance is None:
        trace.stage = "reductions"
        return []
    rinst = reduced.instance
    if rinst.n <= 2 * rinst.k + 1:
        trace.base_case = True
        trace.stage = "base"
        col = find_coloring(rinst, reduced.lists)
        if col is None:
            raise CounterexampleFound(f"reduced {rinst} has no L-coloring although n <= 2k+1")
        return _classes_from_coloring(reduced.vertices, col)

    rainbow = find_sdr(reduced.lists)
    if rainbow.ok:
        trace.stage = "rainbow"
        return _classes_from_coloring(reduced.vertices, rainbow.representatives)

    if red.stuck:
        trace.fallback = "reductions stuck: " + red.stuck
    else:
        try:
            final = _merge_stage(reduced, trace)
        except PipelineFailure as e:
            trace.fallback = e.reason
        else:
            trace.stage = "merge"
            out = []
            for x in final:
                (c,) = x.colors
                out.append({"vertices": sorted(reduced.vertices[m] for m in x.members), "color": c})
            return out
    trace.stage = "fallback"
    return _oracle_classes(reduced, instance, lists, red.partial, trace)
