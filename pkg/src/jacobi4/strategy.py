"""Pivot orderings, cyclic strategies, and their equivalence algebra.

Pairs are 0-based internally; file formats are 1-based.  Equivalence
questions are decided by exhaustive breadth-first search over reachable
orderings (exactness over cleverness: for order 4 there are at most 720
orderings of the pair multiset).  For larger orders the searches carry a
node cap and raise once it is exceeded.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .core import SignedPermutation

DEFAULT_NODE_CAP = 500_000


class SearchSpaceExceeded(RuntimeError):
    """Raised when an equivalence search would exceed its node cap."""


@dataclass(frozen=True, order=True)
class PivotPair:
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j or self.i < 0 or self.j < 0:
            raise ValueError(f"bad pivot pair ({self.i},{self.j})")
        if self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    def disjoint(self, other: "PivotPair") -> bool:
        return len({self.i, self.j, other.i, other.j}) == 4

    def one_based(self) -> tuple[int, int]:
        return (self.i + 1, self.j + 1)

    def __repr__(self):
        return f"({self.i + 1},{self.j + 1})"


def all_pairs(n: int) -> tuple[PivotPair, ...]:
    return tuple(
        PivotPair(i, j) for i in range(n) for j in range(i + 1, n)
    )


@dataclass(frozen=True)
class PivotOrdering:
    n: int
    pairs: tuple[PivotPair, ...]

    def __post_init__(self):
        for p in self.pairs:
            if p.j >= self.n:
                raise ValueError(f"pair {p} out of range for order {self.n}")

    def __len__(self):
        return len(self.pairs)

    def is_cyclic(self) -> bool:
        """Every pair of P_n appears exactly once."""
        want = set(all_pairs(self.n))
        return len(self.pairs) == len(want) and set(self.pairs) == want

    def covers(self) -> set[PivotPair]:
        return set(self.pairs)

    def rotate(self, shift: int) -> "PivotOrdering":
        s = shift % len(self.pairs)
        return PivotOrdering(self.n, self.pairs[s:] + self.pairs[:s])

    def to_json(self) -> str:
        return json.dumps([[p.i + 1, p.j + 1] for p in self.pairs])

    @classmethod
    def from_json(cls, text: str, n: int) -> "PivotOrdering":
        try:
            raw = json.loads(text)
            pairs = tuple(PivotPair(int(i) - 1, int(j) - 1) for i, j in raw)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed ordering JSON: {exc}") from exc
        return cls(n, pairs)

    def __repr__(self):
        return "[" + ",".join(repr(p) for p in self.pairs) + "]"


# -- the six parallel orderings of P_4 --

def _ordering(*pairs) -> PivotOrdering:
    return PivotOrdering(4, tuple(PivotPair(i - 1, j - 1) for i, j in pairs))


def ordering_i1() -> PivotOrdering:
    return _ordering((1, 3), (2, 4), (1, 4), (2, 3), (1, 2), (3, 4))


def ordering_i2() -> PivotOrdering:
    return _ordering((1, 4), (2, 3), (1, 3), (2, 4), (1, 2), (3, 4))


def ordering_o1p() -> PivotOrdering:
    return _ordering((1, 2), (3, 4), (1, 3), (2, 4), (1, 4), (2, 3))


def ordering_o1pp() -> PivotOrdering:
    return _ordering((1, 4), (2, 3), (1, 2), (3, 4), (1, 3), (2, 4))


def ordering_o2p() -> PivotOrdering:
    return _ordering((1, 2), (3, 4), (1, 4), (2, 3), (1, 3), (2, 4))


def ordering_o2pp() -> PivotOrdering:
    return _ordering((1, 3), (2, 4), (1, 2), (3, 4), (1, 4), (2, 3))


def serial_rowwise(n: int) -> PivotOrdering:
    return PivotOrdering(n, all_pairs(n))


NAMED_ORDERINGS = {
    "I1": ordering_i1,
    "I2": ordering_i2,
    "O1p": ordering_o1p,
    "O1pp": ordering_o1pp,
    "O2p": ordering_o2p,
    "O2pp": ordering_o2pp,
}


def strategy_matrix(ordering: PivotOrdering) -> list[list[int]]:
    """n x n grid: entry (i,j) is the step index annihilating (i,j);
    diagonal entries are the sentinel -1."""
    if not ordering.is_cyclic():
        raise ValueError("strategy matrix requires a cyclic ordering")
    n = ordering.n
    m = [[-1] * n for _ in range(n)]
    for k, p in enumerate(ordering.pairs):
        m[p.i][p.j] = k
        m[p.j][p.i] = k
    return m


def parallel_braces(ordering: PivotOrdering) -> list[tuple[PivotPair, PivotPair]]:
    """Group a parallel ordering into consecutive disjoint braces of two."""
    if len(ordering.pairs) % 2:
        raise ValueError("odd-length ordering cannot be parallel")
    braces = []
    for k in range(0, len(ordering.pairs), 2):
        p, q = ordering.pairs[k], ordering.pairs[k + 1]
        if not p.disjoint(q):
            raise ValueError(f"pairs {p} and {q} are not disjoint")
        braces.append((p, q))
    return braces


def parallel_step_matrix(ordering: PivotOrdering) -> list[list[int]]:
    """Strategy matrix at parallel-step granularity (step index // 2)."""
    parallel_braces(ordering)  # validates
    m = strategy_matrix(ordering)
    n = ordering.n
    return [
        [m[r][s] // 2 if r != s else -1 for s in range(n)] for r in range(n)
    ]


def is_admissible_transposition(ordering: PivotOrdering, r: int) -> bool:
    """Can pairs r and r+1 be swapped, i.e. are they disjoint?"""
    if r < 0 or r + 1 >= len(ordering.pairs):
        raise IndexError(f"position {r} out of range")
    return ordering.pairs[r].disjoint(ordering.pairs[r + 1])


def _adm_neighbors(pairs: tuple) -> list[tuple]:
    out = []
    for r in range(len(pairs) - 1):
        if pairs[r].disjoint(pairs[r + 1]):
            out.append(pairs[:r] + (pairs[r + 1], pairs[r]) + pairs[r + 2:])
    return out


def _rotations(pairs: tuple) -> list[tuple]:
    return [pairs[s:] + pairs[:s] for s in range(len(pairs))]


def _bfs(start: tuple, with_shifts: bool, node_cap: int) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        nbrs = _adm_neighbors(cur)
        if with_shifts:
            nbrs += _rotations(cur)
        for nb in nbrs:
            if nb not in seen:
                if len(seen) >= node_cap:
                    raise SearchSpaceExceeded(
                        f"equivalence search exceeded {node_cap} orderings"
                    )
                seen.add(nb)
                queue.append(nb)
    return seen


def equivalent(a: PivotOrdering, b: PivotOrdering,
               node_cap: int = DEFAULT_NODE_CAP) -> bool:
    """Reachability by admissible transpositions of adjacent disjoint pairs."""
    if a.n != b.n or sorted(a.pairs) != sorted(b.pairs):
        return False
    if a.pairs == b.pairs:
        return True
    return b.pairs in _bfs(a.pairs, False, node_cap)


def shift_equivalent(a: PivotOrdering, b: PivotOrdering) -> bool:
    """Is b a cyclic rotation of a?"""
    if a.n != b.n or len(a.pairs) != len(b.pairs):
        return False
    return b.pairs in _rotations(a.pairs)


def weakly_equivalent(a: PivotOrdering, b: PivotOrdering,
                      node_cap: int = DEFAULT_NODE_CAP) -> bool:
    """Connectivity in the graph joining transposition and shift moves."""
    if a.n != b.n or sorted(a.pairs) != sorted(b.pairs):
        return False
    if a.pairs == b.pairs:
        return True
    return b.pairs in _bfs(a.pairs, True, node_cap)


def enumerate_parallel_orderings(n: int = 4) -> list[PivotOrdering]:
    """The six parallel orderings of P_4: the three commuting braces in
    every block order, fixed order inside each brace."""
    if n != 4:
        raise ValueError("parallel orderings are enumerated for order 4 only")
    return [
        ordering_i1(), ordering_i2(),
        ordering_o1p(), ordering_o1pp(),
        ordering_o2p(), ordering_o2pp(),
    ]


def shift_classes(orderings: list[PivotOrdering]) -> list[list[PivotOrdering]]:
    """Partition orderings into shift-equivalence classes."""
    classes: list[list[PivotOrdering]] = []
    for o in orderings:
        for cls in classes:
            if shift_equivalent(cls[0], o):
                cls.append(o)
                break
        else:
            classes.append([o])
    return classes


def permutationally_equivalent(a: PivotOrdering, b: PivotOrdering,
                               p: SignedPermutation) -> bool:
    """Do the parallel-step matrices satisfy M_b = P^T M_a P?"""
    if not p.is_pure():
        raise ValueError("permutational equivalence needs a pure permutation")
    if a.n != b.n or p.n != a.n:
        return False
    ma = parallel_step_matrix(a)
    mb = parallel_step_matrix(b)
    perm = [i for i, _ in p.images]
    n = a.n
    return all(
        mb[r][s] == ma[perm[r]][perm[s]] for r in range(n) for s in range(n)
    )


def cyclic_strategy(ordering: PivotOrdering):
    """Strategy function k -> pivot pair, running through the ordering
    cyclically."""
    if not ordering.is_cyclic():
        raise ValueError("not a cyclic ordering (each pair exactly once)")
    pairs = ordering.pairs
    period = len(pairs)

    def strategy(k: int) -> PivotPair:
        return pairs[k % period]

    return strategy
