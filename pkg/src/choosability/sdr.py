"""Systems of distinct representatives through maximum bipartite matching.

Sets are matched to colors with Hopcroft-Karp. When some set stays
unmatched, the sets reachable from it along alternating paths form a Hall
violator: their union is exactly the set of colors matched into them, which
is one short.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

_INF = float("inf")


@dataclass(frozen=True)
class SdrResult:
    """Either ``representatives`` (one per set, all distinct) or a ``violator``.

    The violator is a sorted tuple of set indices whose union is smaller
    than the number of sets in it.
    """

    representatives: tuple[int, ...] | None = None
    violator: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.representatives is not None


class _Matcher:
    def __init__(self, family: Sequence[frozenset[int]]):
        self.adj = [sorted(s) for s in family]
        self.match_set: list[int | None] = [None] * len(family)
        self.match_color: dict[int, int] = {}
        self.dist: list[float] = []

    def _bfs(self) -> bool:
        q = deque()
        self.dist = [_INF] * len(self.adj)
        for i, m in enumerate(self.match_set):
            if m is None:
                self.dist[i] = 0
                q.append(i)
        found = False
        while q:
            i = q.popleft()
            for c in self.adj[i]:
                j = self.match_color.get(c)
                if j is None:
                    found = True
                elif self.dist[j] == _INF:
                    self.dist[j] = self.dist[i] + 1
                    q.append(j)
        return found

    def _dfs(self, i: int) -> bool:
        # iterative augmenting search along the BFS layers, smallest color first
        stack = [(i, iter(self.adj[i]))]
        path: list[tuple[int, int]] = []
        while stack:
            s, it = stack[-1]
            advanced = False
            for c in it:
                j = self.match_color.get(c)
                if j is None:
                    path.append((s, c))
                    for ps, pc in path:
                        self.match_set[ps] = pc
                        self.match_color[pc] = ps
                    return True
                if self.dist[j] == self.dist[s] + 1:
                    path.append((s, c))
                    stack.append((j, iter(self.adj[j])))
                    advanced = True
                    break
            if not advanced:
                self.dist[s] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    def run(self) -> None:
        while self._bfs():
            for i in range(len(self.adj)):
                if self.match_set[i] is None:
                    self._dfs(i)

    def violator_from(self, root: int) -> tuple[int, ...]:
        seen_sets = {root}
        q = deque([root])
        while q:
            i = q.popleft()
            for c in self.adj[i]:
                j = self.match_color.get(c)
                if j is not None and j not in seen_sets:
                    seen_sets.add(j)
                    q.append(j)
        return tuple(sorted(seen_sets))


def union_size(family: Sequence[frozenset[int]], indices: Iterable[int]) -> int:
    out: set[int] = set()
    for i in indices:
        out |= family[i]
    return len(out)


def find_sdr(family: Iterable[Iterable[int]]) -> SdrResult:
    """Find an SDR of ``family`` or a Hall violator certifying that none exists."""
    fam = [frozenset(s) for s in family]
    m = _Matcher(fam)
    m.run()
    unmatched = [i for i, c in enumerate(m.match_set) if c is None]
    if not unmatched:
        reps = tuple(m.match_set)  # type: ignore[arg-type]
        if len(set(reps)) != len(reps) or any(c not in fam[i] for i, c in enumerate(reps)):
            raise RuntimeError("internal error: matching is not an SDR")
        return SdrResult(representatives=reps)
    violator = m.violator_from(unmatched[0])
    if union_size(fam, violator) >= len(violator):
        raise RuntimeError("internal error: violator satisfies Hall's condition")
    return SdrResult(violator=violator)


def has_sdr(family: Iterable[Iterable[int]]) -> bool:
    return find_sdr(family).ok
