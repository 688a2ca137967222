"""
Branch data for covers P^1 -> P^1 and their realizability.

A branch datum is realizable iff a *constellation* exists: permutations
``s_1, ..., s_n`` of ``{0..d-1}`` with cycle types ``Phi_1..Phi_n``, product
(applied left to right) equal to the identity, generating a transitive group.
``constellation_search`` decides this exhaustively up to simultaneous
conjugation; ``realizable`` first tries the classical closed-form rules.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DegreeMismatch, LimitExceeded, RiemannHurwitzViolation, SearchSpaceExceeded, TrivialPartition

DEFAULT_SEARCH_LIMIT = 8
DEFAULT_SEARCH_NODES = 2_000_000

Perm = tuple  # p[i] is the image of i


def normalize_partition(parts: Iterable[int]) -> tuple:
    return tuple(sorted((int(p) for p in parts), reverse=True))


@dataclass(frozen=True)
class BranchData:
    d: int
    partitions: tuple

    @property
    def n(self) -> int:
        return len(self.partitions)

    def canonical(self) -> tuple:
        return (self.d, tuple(sorted(self.partitions, reverse=True)))

    def __str__(self):
        body = "|".join("+".join(map(str, p)) for p in self.partitions)
        return f"{self.d}; {body}"

    def braces(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, p)) + "}" for p in self.partitions) + "}"

    def to_json(self):
        return {"d": self.d, "partitions": [list(p) for p in self.partitions]}


def validate_branch_data(raw) -> BranchData:
    """Accept ``BranchData``, ``(d, partitions)`` or ``{"d":..., "partitions":...}``."""
    if isinstance(raw, BranchData):
        d, parts = raw.d, raw.partitions
    elif isinstance(raw, dict):
        d, parts = raw["d"], raw["partitions"]
    else:
        d, parts = raw
    d = int(d)
    if d < 2:
        raise DegreeMismatch(f"degree must be >= 2, got {d}")
    parts = tuple(normalize_partition(p) for p in parts)
    for p in parts:
        if not p or min(p) < 1:
            raise DegreeMismatch(f"partition {p} has a nonpositive part")
        if sum(p) != d:
            raise DegreeMismatch(f"partition {list(p)} sums to {sum(p)}, not {d}")
        if max(p) == 1:
            raise TrivialPartition(f"partition {list(p)} has no part > 1")
    n = len(parts)
    ks = sum(len(p) for p in parts)
    if ks != (n - 2) * d + 2:
        raise RiemannHurwitzViolation(f"sum of lengths {ks} != (n-2)d+2 = {(n - 2) * d + 2}")
    return BranchData(d, parts)


def _partitions(d: int, max_part: int | None = None):
    max_part = d if max_part is None else max_part
    if d == 0:
        yield ()
        return
    for first in range(min(d, max_part), 0, -1):
        for rest in _partitions(d - first, first):
            yield (first,) + rest


def enumerate_branch_data(d: int) -> list[BranchData]:
    """Every valid branch datum of degree ``d`` (as unordered multisets)."""
    nontrivial = [p for p in _partitions(d) if p[0] > 1]
    nontrivial.sort(reverse=True)
    budget = 2 * d - 2
    out = []

    def rec(start: int, chosen: list, used: int):
        if used == budget:
            if len(chosen) >= 2:
                out.append(BranchData(d, tuple(chosen)))
            return
        for i in range(start, len(nontrivial)):
            p = nontrivial[i]
            r = d - len(p)
            if used + r <= budget:
                rec(i, chosen + [p], used + r)

    rec(0, [], 0)
    return out


# --- permutations ------------------------------------------------------------


def cycle_type(p: Perm) -> tuple:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if not seen[i]:
            n, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                n += 1
            out.append(n)
    return tuple(sorted(out, reverse=True))


def then(a: Perm, b: Perm) -> Perm:
    """Apply ``a`` first, then ``b``."""
    return tuple(b[a[i]] for i in range(len(a)))


def inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def conjugate(a: Perm, g: Perm) -> Perm:
    """``g a g^{-1}`` as functions: relabel the cycles of ``a`` through ``g``."""
    out = [0] * len(a)
    for i in range(len(a)):
        out[g[i]] = g[a[i]]
    return tuple(out)


def cycles(p: Perm) -> list:
    seen, out = set(), []
    for i in range(len(p)):
        if i not in seen:
            c, j = [], i
            while j not in seen:
                seen.add(j)
                c.append(j)
                j = p[j]
            out.append(tuple(c))
    return out


def cycle_str(p: Perm) -> str:
    cs = [c for c in cycles(p) if len(c) > 1]
    if not cs:
        return "()"
    return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in cs)


def orbit_count(perms: Sequence[Perm], d: int) -> int:
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    comps = d
    for p in perms:
        for i, j in enumerate(p):
            a, b = find(i), find(j)
            if a != b:
                parent[a] = b
                comps -= 1
    return comps


def _components(perms: Sequence[Perm], d: int) -> list:
    comp = list(range(d))
    changed = True
    while changed:
        changed = False
        for p in perms:
            for i, j in enumerate(p):
                if comp[i] != comp[j]:
                    comp[i] = comp[j] = min(comp[i], comp[j])
                    changed = True
    return comp


def canonical_perm(partition: Sequence[int]) -> Perm:
    """Cycles on consecutive points: (0 1 .. k-1)(k ..)..."""
    d = sum(partition)
    out = list(range(d))
    start = 0
    for k in partition:
        for i in range(k):
            out[start + i] = start + (i + 1) % k
        start += k
    return tuple(out)


@lru_cache(maxsize=None)
def _classes(d: int) -> dict:
    by_type: dict = {}
    for p in itertools.permutations(range(d)):
        by_type.setdefault(cycle_type(p), []).append(p)
    return by_type


def conjugacy_class(partition: Sequence[int]) -> list:
    part = normalize_partition(partition)
    return _classes(sum(part))[part]


@dataclass
class Constellation:
    d: int
    permutations: tuple

    def verify(self, bd: BranchData | None = None) -> bool:
        perms = self.permutations
        ident = tuple(range(self.d))
        prod = ident
        for p in perms:
            prod = then(prod, p)
        ok = prod == ident and orbit_count(perms, self.d) == 1
        if bd is not None:
            ok = ok and len(perms) == bd.n and all(
                cycle_type(p) == normalize_partition(phi) for p, phi in zip(perms, bd.partitions)
            )
        return ok

    def to_json(self):
        return [cycle_str(p) for p in self.permutations]

    def __str__(self):
        return ", ".join(self.to_json())


def _braid_to_order(perms: list, order: list) -> list:
    """Reorder a constellation found in ``order`` back to ascending positions.

    The Hurwitz move ``(a, b) -> (b, b a b^-1)`` swaps adjacent cycle types
    while keeping the product and the generated group.
    """
    perms, order = list(perms), list(order)
    n = len(perms)
    for i in range(n):
        for j in range(n - 1 - i):
            if order[j] > order[j + 1]:
                a, b = perms[j], perms[j + 1]
                perms[j], perms[j + 1] = b, conjugate(a, b)
                order[j], order[j + 1] = order[j + 1], order[j]
    return perms


def constellation_search(
    bd: BranchData, limit: int = DEFAULT_SEARCH_LIMIT, max_nodes: int | None = DEFAULT_SEARCH_NODES
) -> Constellation | None:
    """Exhaustive search; ``None`` proves the datum is not realizable.

    Raises ``SearchSpaceExceeded`` after ``max_nodes`` tuples (``None``: no cap).
    """
    bd = validate_branch_data(bd)
    d = bd.d
    if d > limit:
        raise LimitExceeded(f"degree {d} exceeds constellation search limit {limit}")
    sizes = [len(conjugacy_class(p)) for p in bd.partitions]
    idx = sorted(range(bd.n), key=lambda i: (-sizes[i], i))
    # fix the largest class, let the product determine the second largest
    order = [idx[0]] + sorted(idx[2:], key=lambda i: (sizes[i], i)) + [idx[1]]
    parts = [bd.partitions[i] for i in order]
    caps = [d - len(p) for p in parts]
    suffix = [sum(caps[i:]) for i in range(len(caps) + 1)]
    first = canonical_perm(parts[0])
    target_last = parts[-1]
    ident = tuple(range(d))
    nodes = [0]

    def rec(level: int, chosen: list, prod: Perm):
        nodes[0] += 1
        if max_nodes is not None and nodes[0] > max_nodes:
            raise SearchSpaceExceeded(f"constellation search exceeded {max_nodes} nodes")
        if orbit_count(chosen, d) - suffix[level] > 1:
            return None
        # the remaining factors must multiply to prod^-1; each one moves it at
        # most its own rank d - #cycles in the transposition metric
        if d - len(cycle_type(prod)) > suffix[level]:
            return None
        if level == len(parts) - 1:
            last = inverse(prod)
            if cycle_type(last) != target_last:
                return None
            full = chosen + [last]
            return full if orbit_count(full, d) == 1 else None
        # try permutations that join the most orbits first; realizable data
        # then usually succeed on the first branch
        comp = _components(chosen, d)
        pool = sorted(conjugacy_class(parts[level]), key=lambda p: -sum(comp[i] != comp[j] for i, j in enumerate(p)))
        for p in pool:
            found = rec(level + 1, chosen + [p], then(prod, p))
            if found:
                return found
        return None

    found = rec(1, [first], then(ident, first))
    if found is None:
        return None
    perms = _braid_to_order(found, order)
    c = Constellation(d, tuple(perms))
    assert c.verify(bd)
    return c


# --- realizability -----------------------------------------------------------

EXCEPTIONAL_D4 = ((3, 1), (2, 2), (2, 2))


@dataclass
class Realizability:
    verdict: str  # "yes" | "no" | "unknown"
    method: str
    constellation: Constellation | None = None
    reason: str = ""

    @property
    def realizable(self):
        return {"yes": True, "no": False}.get(self.verdict)

    def to_json(self):
        out = {"realizable": self.verdict, "method": self.method}
        if self.constellation is not None:
            out["constellation"] = self.constellation.to_json()
        if self.reason:
            out["reason"] = self.reason
        return out


def realizable(
    bd: BranchData, search_limit: int = DEFAULT_SEARCH_LIMIT, max_nodes: int | None = DEFAULT_SEARCH_NODES
) -> Realizability:
    """Rule cascade, then the exhaustive oracle for small degree."""
    bd = validate_branch_data(bd)
    d, parts = bd.d, bd.partitions
    if any(p == (d,) for p in parts):
        return Realizability("yes", "polynomial", reason="some branch point is totally ramified")
    if d in (2, 3, 5, 7):
        return Realizability("yes", "small-degree", reason=f"all data of degree {d} are realizable")
    if d == 4:
        if Counter(parts) == Counter(EXCEPTIONAL_D4):
            return Realizability("no", "exceptional-degree-4", reason="the unique non-realizable degree-4 datum")
        return Realizability("yes", "small-degree", reason="degree 4 datum other than {3,1},{2,2},{2,2}")
    if any(len(p) == 2 for p in parts) and bd.n >= 4:
        return Realizability("yes", "laurent", reason="two-part partition with at least four branch points")
    if d <= search_limit:
        try:
            c = constellation_search(bd, search_limit, max_nodes)
        except SearchSpaceExceeded as exc:
            return Realizability("unknown", "search-budget", reason=str(exc))
        if c is None:
            return Realizability("no", "exhaustive-constellation", reason="no transitive constellation exists")
        return Realizability("yes", "exhaustive-constellation", constellation=c)
    return Realizability("unknown", "limit", reason=f"degree {d} exceeds search limit {search_limit}")


def oracle_verdict(bd: BranchData, limit: int = DEFAULT_SEARCH_LIMIT) -> Realizability:
    """Realizability decided by the constellation oracle alone (no node cap)."""
    bd = validate_branch_data(bd)
    c = constellation_search(bd, limit, None)
    if c is None:
        return Realizability("no", "exhaustive-constellation", reason="no transitive constellation exists")
    return Realizability("yes", "exhaustive-constellation", constellation=c)
