"""Complete multipartite instances, list assignments and part-size profiles."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class InvalidSpecification(ValueError):
    """Raised for malformed instances, list assignments or instance files."""


class UnsupportedProfile(ValueError):
    """Raised when an operation needs every part to have size at most 4."""


@dataclass(frozen=True)
class Instance:
    """A complete multipartite graph given by its part sizes.

    Vertices are numbered part-major: part 0 holds vertices
    ``0 .. part_sizes[0]-1``, part 1 the next block, and so on.
    """

    part_sizes: tuple[int, ...]
    part_of: tuple[int, ...] = field(init=False, repr=False, compare=False)
    part_offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(self.part_sizes)
        if not sizes:
            raise InvalidSpecification("an instance needs at least one part")
        for s in sizes:
            if not isinstance(s, int) or isinstance(s, bool) or s < 1:
                raise InvalidSpecification(f"part sizes must be positive integers, got {s!r}")
        offsets, part_of = [], []
        start = 0
        for i, s in enumerate(sizes):
            offsets.append(start)
            part_of.extend([i] * s)
            start += s
        object.__setattr__(self, "part_sizes", sizes)
        object.__setattr__(self, "part_of", tuple(part_of))
        object.__setattr__(self, "part_offsets", tuple(offsets))

    @property
    def n(self) -> int:
        return len(self.part_of)

    @property
    def k(self) -> int:
        return len(self.part_sizes)

    def part(self, i: int) -> range:
        """Vertex indices of part ``i``."""
        start = self.part_offsets[i]
        return range(start, start + self.part_sizes[i])

    def parts(self) -> list[range]:
        return [self.part(i) for i in range(self.k)]

    def adjacent(self, u: int, v: int) -> bool:
        return self.part_of[u] != self.part_of[v]

    def __str__(self):
        return "K_{" + ",".join(map(str, self.part_sizes)) + "}"


def make_instance(part_sizes: Iterable[int]) -> Instance:
    return Instance(tuple(part_sizes))


@dataclass(frozen=True)
class ListAssignment:
    """Per-vertex color lists, stored as frozensets of non-negative integers."""

    lists: tuple[frozenset[int], ...]

    def __post_init__(self):
        lists = tuple(frozenset(l) for l in self.lists)
        for l in lists:
            for c in l:
                if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                    raise InvalidSpecification(f"colors must be non-negative integers, got {c!r}")
        object.__setattr__(self, "lists", lists)

    @classmethod
    def of(cls, lists: Iterable[Iterable[int]]) -> "ListAssignment":
        return cls(tuple(frozenset(l) for l in lists))

    def __len__(self):
        return len(self.lists)

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.lists[v]

    def __iter__(self):
        return iter(self.lists)

    @property
    def pot(self) -> frozenset[int]:
        return frozenset().union(*self.lists)

    def min_size(self) -> int:
        return min((len(l) for l in self.lists), default=0)

    def check_covers(self, instance: Instance) -> None:
        if len(self.lists) != instance.n:
            raise InvalidSpecification(
                f"{len(self.lists)} lists given for an instance with {instance.n} vertices"
            )

    def densified(self) -> tuple["ListAssignment", tuple[int, ...]]:
        """Renumber the pot to ``0..|pot|-1``; returns the new lists and the decode table."""
        labels = tuple(sorted(self.pot))
        code = {c: i for i, c in enumerate(labels)}
        return ListAssignment(tuple(frozenset(code[c] for c in l) for l in self.lists)), labels


Coloring = tuple[int, ...]


def is_proper(instance: Instance, coloring: Sequence[int]) -> bool:
    owner: dict[int, int] = {}
    for v, c in enumerate(coloring):
        p = instance.part_of[v]
        if owner.setdefault(c, p) != p:
            return False
    return True


def main_bound(n: int, k: int) -> int:
    """Upper bound max{k, ceil((n+k-1)/3)} on the choice number of a k-chromatic n-vertex graph."""
    if k < 1 or n < k:
        raise InvalidSpecification(f"no {k}-chromatic graph has {n} vertices")
    return max(k, ceil_div(n + k - 1, 3))


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def instance_bound(instance: Instance) -> int:
    return main_bound(instance.n, instance.k)


@dataclass(frozen=True)
class Profile:
    """Counts of parts of size 1, 2, 3, 4 and of size at least 5."""

    k1: int
    k2: int
    k3: int
    k4: int
    k_big: int = 0
    big_total: int = 0  # vertices inside parts of size >= 5

    @property
    def k(self) -> int:
        return self.k1 + self.k2 + self.k3 + self.k4 + self.k_big

    @property
    def n(self) -> int:
        return self.k1 + 2 * self.k2 + 3 * self.k3 + 4 * self.k4 + self.big_total

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.k1, self.k2, self.k3, self.k4)


def profile(instance: Instance) -> Profile:
    counts = [0] * 5
    big_total = 0
    for s in instance.part_sizes:
        if s >= 5:
            counts[4] += 1
            big_total += s
        else:
            counts[s - 1] += 1
    return Profile(*counts, big_total=big_total)


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: Fraction
    rhs: tuple[Fraction, ...]
    holds: bool
    integral: bool


@dataclass(frozen=True)
class IdentityReport:
    profile: Profile
    a: Identity
    b: Identity
    c: Identity

    @property
    def all_hold(self) -> bool:
        return self.a.holds and self.b.holds and self.c.holds


def arith_identities(p: Profile) -> IdentityReport:
    """Evaluate the three profile identities behind the merge bounds.

    (a) (n+k-1)/3 == k + k4 - (k1-k3+k4+1)/3
    (b) (n+k-1)/3 + k/3 >= k + k4 + (2*k3-1)/3
    (c) 2(n+k-1)/3 == n + (k1-k3-2*k4-2)/3 == k + k3 + 2*k4 + (k+2*k2+k3-2)/3

    ``integral`` flags whether every fraction in the identity is an integer.
    """
    if p.k_big:
        raise UnsupportedProfile("profile has parts of size >= 5")
    k1, k2, k3, k4 = p.as_tuple()
    n, k = p.n, p.k
    F = Fraction

    base = F(n + k - 1, 3)
    z4 = F(k1 - k3 + k4 + 1, 3)
    rhs_a = k + k4 - z4
    a = Identity("a", base, (rhs_a,), base == rhs_a,
                 base.denominator == 1 and z4.denominator == 1)

    lhs_b = base + F(k, 3)
    rhs_b = k + k4 + F(2 * k3 - 1, 3)
    b = Identity("b", lhs_b, (rhs_b,), lhs_b >= rhs_b,
                 lhs_b.denominator == 1 and rhs_b.denominator == 1)

    lhs_c = 2 * base
    c1 = F(k1 - k3 - 2 * k4 - 2, 3)
    c2 = F(k + 2 * k2 + k3 - 2, 3)
    rhs_c = (n + c1, k + k3 + 2 * k4 + c2)
    c = Identity("c", lhs_c, rhs_c, lhs_c == rhs_c[0] == rhs_c[1],
                 all(x.denominator == 1 for x in (lhs_c, c1, c2)))
    return IdentityReport(p, a, b, c)


def merge_threshold(n: int, k: int, k4: int) -> Fraction:
    """Threshold (2n-k+1)/3 - k4 for a second merge in a 4-part."""
    return Fraction(2 * n - k + 1, 3) - k4


# JSON instance format: {"parts": [...], "lists": [[...], ...]} with optional lists.

def to_json_obj(instance: Instance, lists: ListAssignment | None = None) -> dict:
    obj: dict = {"parts": list(instance.part_sizes)}
    if lists is not None:
        obj["lists"] = [sorted(l) for l in lists]
    return obj


def from_json_obj(obj: dict) -> tuple[Instance, ListAssignment | None]:
    if not isinstance(obj, dict) or "parts" not in obj:
        raise InvalidSpecification('instance JSON needs a "parts" array')
    parts = obj["parts"]
    if not isinstance(parts, list):
        raise InvalidSpecification('"parts" must be an array')
    instance = make_instance(parts)
    raw = obj.get("lists")
    if raw is None:
        return instance, None
    if not isinstance(raw, list) or not all(isinstance(l, list) for l in raw):
        raise InvalidSpecification('"lists" must be an array of arrays')
    lists = ListAssignment.of(raw)
    lists.check_covers(instance)
    return instance, lists


def dumps(instance: Instance, lists: ListAssignment | None = None, **kw) -> str:
    return json.dumps(to_json_obj(instance, lists), **kw)


def loads(text: str) -> tuple[Instance, ListAssignment | None]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidSpecification(f"not valid JSON: {e}") from None
    return from_json_obj(obj)
