"""Exact list-coloring and choosability decisions for complete multipartite graphs.

A complete multipartite graph has an L-coloring iff every part ``A`` can be
given a color set ``H_A`` hitting every list in ``A``, with the ``H_A``
pairwise disjoint. Both searches below work on that reformulation with
colors packed into integer bitmasks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .instance import Coloring, Instance, InvalidSpecification, ListAssignment

DEFAULT_NODE_LIMIT = 10**8
NODE_LIMIT_ENV = "CHOOSABILITY_NODE_LIMIT"


class Inconclusive(RuntimeError):
    """The search exceeded its node budget before reaching a verdict."""


def default_node_limit() -> int:
    raw = os.environ.get(NODE_LIMIT_ENV)
    return int(raw) if raw else DEFAULT_NODE_LIMIT


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return mask.bit_count()


# --------------------------------------------------------------------------
# L-colorability
# --------------------------------------------------------------------------

def _color_masks(instance: Instance, masks: Sequence[int]) -> list[int] | None:
    """Backtracking over (part, color) commitments; returns per-part color masks."""
    part_of = instance.part_of
    n = len(masks)
    used = [0] * instance.k

    def search() -> bool:
        taken = 0
        for m in used:
            taken |= m
        best_v, best_avail, best_cnt = -1, 0, 1 << 30
        for v in range(n):
            mv = masks[v]
            if mv & used[part_of[v]]:
                continue
            avail = mv & ~taken
            cnt = _popcount(avail)
            if cnt < best_cnt:
                best_v, best_avail, best_cnt = v, avail, cnt
                if cnt <= 1:
                    break
        if best_v < 0:
            return True
        if best_cnt == 0:
            return False
        p = part_of[best_v]
        for c in _bits(best_avail):
            bit = 1 << c
            used[p] |= bit
            if search():
                return True
            used[p] &= ~bit
        return False

    return used if search() else None


def find_coloring(instance: Instance, lists: ListAssignment) -> Coloring | None:
    """Return an L-coloring of ``instance`` or None if there is none.

    Branches on the uncolored vertex with the fewest usable colors (lowest
    index on ties). Committing a color to a part colors every vertex of that
    part whose list contains it.
    """
    if not isinstance(lists, ListAssignment):
        raise InvalidSpecification("lists must be a ListAssignment")
    lists.check_covers(instance)
    labels = sorted(lists.pot)
    code = {c: i for i, c in enumerate(labels)}
    masks = [sum(1 << code[c] for c in l) for l in lists]
    used = _color_masks(instance, masks)
    if used is None:
        return None
    out = []
    for v, mv in enumerate(masks):
        hit = mv & used[instance.part_of[v]]
        out.append(labels[(hit & -hit).bit_length() - 1])
    return tuple(out)


# --------------------------------------------------------------------------
# k-choosability
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Outcome of a k-choosability check.

    ``witness`` is a bad list assignment (all lists of size k, no L-coloring)
    whenever ``choosable`` is False.
    """

    choosable: bool
    k: int
    witness: ListAssignment | None = None
    nodes: int = 0

    def __bool__(self):
        return self.choosable


def _minimize(family) -> list[int]:
    """Inclusion-minimal members of a collection of bitmasks."""
    out: list[int] = []
    for m in sorted(set(family), key=int.bit_count):
        if not any(o & m == o for o in out):
            out.append(m)
    return out


def _add_list(states: list[tuple[int, int]], lst: int) -> list[tuple[int, int]]:
    """Extend partial colorings of the current part by one more vertex list.

    A state ``(used, mine)`` holds the colors taken by completed parts and
    the colors committed to the current part so far. States dominated
    componentwise by another state are dropped; they can never lead to a
    smaller final color set.
    """
    nxt = set()
    for used, mine in states:
        if mine & lst:
            nxt.add((used, mine))
            continue
        free = lst & ~used
        while free:
            low = free & -free
            nxt.add((used, mine | low))
            free ^= low
    if len(nxt) <= 1:
        return list(nxt)
    ranked = sorted(nxt, key=lambda st: (st[0] | st[1]).bit_count())
    out: list[tuple[int, int]] = []
    for used, mine in ranked:
        if not any(u & used == u and m & mine == m for u, m in out):
            out.append((used, mine))
    return out


def _close_part(states: list[tuple[int, int]]) -> list[int]:
    return _minimize(used | mine for used, mine in states)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.nodes = 0

    def tick(self, amount: int = 1):
        self.nodes += amount
        if self.nodes > self.limit:
            raise Inconclusive(f"node limit {self.limit} exceeded")


def _k_subsets(mask: int, k: int) -> Iterator[int]:
    for combo in combinations(list(_bits(mask)), k):
        s = 0
        for c in combo:
            s |= 1 << c
        yield s


def _cover(family: list[int], slots: int, k: int, budget: _Budget) -> list[int] | None:
    """Pick at most ``slots`` k-sets so every member of ``family`` contains one of them."""
    if not family:
        return []
    if slots == 0:
        return None
    target = min(family, key=_popcount)
    if _popcount(target) < k:
        return None
    for s in _k_subsets(target, k):
        budget.tick()
        rest = [u for u in family if s & ~u]
        sub = _cover(rest, slots - 1, k, budget)
        if sub is not None:
            return [s] + sub
    return None


class _ListCandidates:
    """Next-list options under restricted-growth color labels.

    A list may use any already-seen colors plus a block of fresh colors
    numbered consecutively from the seen count; within a part lists are
    non-decreasing as sorted tuples. Every assignment has a relabeled,
    reordered copy of this form.
    """

    def __init__(self, k: int, pot: int):
        self.k, self.pot = k, pot
        self._cache: dict[tuple[int, tuple[int, ...] | None], list[tuple[tuple[int, ...], int, int]]] = {}

    def __call__(self, seen: int, prev: tuple[int, ...] | None):
        key = (seen, prev)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = []
        for fresh in range(0, min(self.k, self.pot - seen) + 1):
            if self.k - fresh > seen:
                continue
            tail = tuple(range(seen, seen + fresh))
            for old in combinations(range(seen), self.k - fresh):
                t = old + tail
                if prev is not None and t < prev:
                    continue
                mask = 0
                for c in t:
                    mask |= 1 << c
                out.append((t, mask, seen + fresh))
        out.sort()
        self._cache[key] = out
        return out


def is_k_choosable(
    instance: Instance,
    k: int,
    *,
    pot_size: int | None = None,
    node_limit: int | None = None,
) -> Verdict:
    """Decide k-choosability, returning a verified bad assignment when it fails.

    Only lists of size exactly k over a pot of ``pot_size`` colors are
    considered (default ``n - 1``, which loses nothing by the small pot
    lemma). All parts but the largest are enumerated up to color
    relabeling; the largest part is then solved as a covering problem.
    """
    if k < 1:
        raise InvalidSpecification("k must be at least 1")
    n = instance.n
    pot = n - 1 if pot_size is None else pot_size
    budget = _Budget(default_node_limit() if node_limit is None else node_limit)
    if k > pot:
        return Verdict(True, k)

    order = sorted(range(instance.k), key=lambda i: (instance.part_sizes[i], i))
    prefix_parts, last = order[:-1], order[-1]
    prefix_sizes = [instance.part_sizes[i] for i in prefix_parts]
    last_size = instance.part_sizes[last]
    candidates = _ListCandidates(k, pot)
    filler = (1 << k) - 1

    chosen: list[int] = []  # masks of prefix vertices in enumeration order

    def witness(last_lists: list[int]) -> ListAssignment:
        by_part: dict[int, list[int]] = {}
        pos = 0
        for p, size in zip(prefix_parts, prefix_sizes):
            part_lists = chosen[pos:pos + size]
            part_lists += [filler] * (size - len(part_lists))
            by_part[p] = part_lists
            pos += size
        pad = last_lists[0] if last_lists else filler
        by_part[last] = last_lists + [pad] * (last_size - len(last_lists))
        lists = []
        for p in range(instance.k):
            lists.extend(frozenset(_bits(m)) for m in by_part[p])
        return ListAssignment(tuple(lists))

    def dfs(pi: int, slot: int, seen: int, prev, states) -> ListAssignment | None:
        if slot == prefix_sizes[pi]:
            family = _close_part(states)
            if not family:
                return witness([])
            if pi + 1 == len(prefix_parts):
                cover = _cover(family, last_size, k, budget)
                return None if cover is None else witness(cover)
            return dfs(pi + 1, 0, seen, None, [(u, 0) for u in family])
        for t, mask, seen2 in candidates(seen, prev):
            nxt = _add_list(states, mask)
            budget.tick(1 + len(nxt))
            if not nxt:
                chosen.append(mask)
                return witness([])
            chosen.append(mask)
            found = dfs(pi, slot + 1, seen2, t, nxt)
            if found is not None:
                return found
            chosen.pop()
        return None

    if prefix_parts:
        bad = dfs(0, 0, 0, None, [(0, 0)])
    else:
        cover = _cover([0], last_size, k, budget)
        bad = None if cover is None else witness(cover)
    if bad is None:
        return Verdict(True, k, nodes=budget.nodes)
    if find_coloring(instance, bad) is not None:
        raise RuntimeError(f"internal error: witness for {instance} is colorable")
    return Verdict(False, k, bad, budget.nodes)


def choice_certificate(
    instance: Instance,
    *,
    max_k: int | None = None,
    node_limit: int | None = None,
) -> tuple[int, Verdict | None]:
    """Choice number together with the failing verdict one below it.

    The second element is None when the choice number equals the part
    count, which needs no certificate.
    """
    top = instance.n if max_k is None else min(max_k, instance.n)
    last_bad = None
    for k in range(instance.k, top + 1):
        verdict = is_k_choosable(instance, k, node_limit=node_limit)
        if verdict:
            return k, last_bad
        last_bad = verdict
    raise Inconclusive(f"{instance} is not {top}-choosable; raise max_k")


def choice_number(
    instance: Instance,
    *,
    max_k: int | None = None,
    node_limit: int | None = None,
) -> int:
    """Least k for which ``instance`` is k-choosable (searched upward from the part count)."""
    return choice_certificate(instance, max_k=max_k, node_limit=node_limit)[0]
