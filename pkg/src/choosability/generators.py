"""Instance families with known (non-)choosability behaviour."""

from __future__ import annotations

from itertools import combinations
from math import comb

from .instance import Instance, InvalidSpecification, ListAssignment, make_instance, main_bound

DEFAULT_LARGE_M_CAP = 10**4


def contiguous_split(universe: int, m: int) -> list[frozenset[int]]:
    """Split colors ``0..universe-1`` into ``m`` consecutive blocks.

    Blocks of size floor(universe/m) come first, then the ones of size
    ceil(universe/m).
    """
    small, extra = divmod(universe, m)
    sizes = [small] * (m - extra) + [small + 1] * extra
    out, start = [], 0
    for s in sizes:
        out.append(frozenset(range(start, start + s)))
        start += s
    return out


def _split_lists(universe: int, m: int) -> list[frozenset[int]]:
    full = frozenset(range(universe))
    return [full - x for x in contiguous_split(universe, m)]


def gen_small_m(m: int, k: int) -> tuple[Instance, ListAssignment]:
    """K_{m*k} with lists U - X_i on the i-th vertex of every part, |U| = 2k-1.

    Every part needs two colors from disjoint pairs, so there is no L-coloring.
    """
    if m < 2 or k < 2:
        raise InvalidSpecification("small-m construction needs m >= 2 and k >= 2")
    part_lists = _split_lists(2 * k - 1, m)
    return make_instance([m] * k), ListAssignment(tuple(part_lists * k))


def small_m_list_floor(m: int, k: int) -> int:
    return (2 * k * (m - 1)) // m - 1


def gen_sharpness(k: int, i: int) -> tuple[Instance, ListAssignment]:
    """K_{1*i,3*(k-i)} over a pot of 2k-1-i colors.

    Singleton parts see the whole pot; each 3-part gets the three
    complements of a contiguous 3-way split of the pot.
    """
    if not 0 <= i < k:
        raise InvalidSpecification(f"need 0 <= i < k, got k={k}, i={i}")
    pot = 2 * k - 1 - i
    full = frozenset(range(pot))
    lists = [full] * i + _split_lists(pot, 3) * (k - i)
    return make_instance([1] * i + [3] * (k - i)), ListAssignment(tuple(lists))


def large_m_size(k: int, j: int) -> int:
    return comb(k * j - 1, (k - 1) * j)


def gen_large_m(k: int, j: int, *, cap: int = DEFAULT_LARGE_M_CAP) -> tuple[Instance, ListAssignment]:
    """K_{m*k}, m = C(kj-1, (k-1)j), each part carrying every (k-1)j-subset of kj-1 colors."""
    if k < 2 or j < 1:
        raise InvalidSpecification("large-m construction needs k >= 2 and j >= 1")
    m = large_m_size(k, j)
    if m > cap:
        raise InvalidSpecification(f"part size m={m} exceeds cap {cap}")
    subsets = [frozenset(c) for c in combinations(range(k * j - 1), (k - 1) * j)]
    return make_instance([m] * k), ListAssignment(tuple(subsets * k))


def gen_eoos(k: int) -> list[Instance]:
    """Graphs on about 2k+2 vertices that fail k-choosability for the given parities."""
    if k < 2:
        raise InvalidSpecification("k must be at least 2")
    out = [make_instance([2] * (k - 1) + [4]), make_instance([2] * (k - 1) + [5])]
    if k % 2 == 0:
        out.append(make_instance([1] * (k // 2 - 1) + [3] * (k // 2 + 1)))
    return out


def ohba_formula(k1: int, k3: int) -> int:
    """Choice number of K_{1*k1,3*k3}."""
    if k1 < 0 or k3 < 0 or k1 + k3 < 1:
        raise InvalidSpecification("need k1, k3 >= 0 with k1 + k3 >= 1")
    return main_bound(k1 + 3 * k3, k1 + k3)


def kierstead_formula(k: int) -> int:
    """ceil((4k-1)/3), the choice number of K_{3*k}."""
    return -(-(4 * k - 1) // 3)
