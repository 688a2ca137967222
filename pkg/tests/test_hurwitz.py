import itertools
import time

import pytest

from meroforms.errors import DegreeMismatch, RiemannHurwitzViolation, TrivialPartition
from meroforms.hurwitz import (
    BranchData,
    constellation_search,
    enumerate_branch_data,
    oracle_verdict,
    realizable,
    validate_branch_data,
)
from meroforms.parse import parse_branch_data


# independent brute force -------------------------------------------------------


def _ctype(p):
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = p[j]
            n += 1
        out.append(n)
    return tuple(sorted(out, reverse=True))


def _compose(a, b):
    return tuple(b[a[i]] for i in range(len(a)))


def _transitive(perms, d):
    reach, todo = {0}, [0]
    while todo:
        i = todo.pop()
        for p in perms:
            if p[i] not in reach:
                reach.add(p[i])
                todo.append(p[i])
    return len(reach) == d


def naive_realizable(bd: BranchData) -> bool:
    d = bd.d
    classes = {}
    for p in itertools.permutations(range(d)):
        classes.setdefault(_ctype(p), []).append(p)
    parts = list(bd.partitions)
    first = classes[parts[0]][0]  # conjugate the whole tuple
    for middle in itertools.product(*(classes[p] for p in parts[1:-1])):
        prod = first
        for p in middle:
            prod = _compose(prod, p)
        last = tuple(sorted(range(d), key=lambda i: prod[i]))  # inverse
        if _ctype(last) == parts[-1] and _transitive([first, *middle, last], d):
            return True
    return False


def _small_enough(bd):
    return bd.d <= 4 or (bd.d == 5 and bd.n <= 4) or (bd.d == 6 and bd.n <= 3)


SMALL = [bd for d in (2, 3, 4, 5, 6) for bd in enumerate_branch_data(d) if _small_enough(bd)]


@pytest.mark.parametrize("bd", SMALL, ids=str)
def test_oracle_agrees_with_brute_force(bd):
    assert (oracle_verdict(bd).verdict == "yes") == naive_realizable(bd)


# -----------------------------------------------------------------------------


def test_enumeration_counts_match_independent_count():
    def brute(d):
        parts = [p for p in _all_partitions(d) if max(p) > 1]
        n = 0
        for k in range(2, 2 * d - 1):
            for combo in itertools.combinations_with_replacement(parts, k):
                n += sum(d - len(p) for p in combo) == 2 * d - 2
        return n

    for d in (2, 3, 4, 5, 6):
        assert len(enumerate_branch_data(d)) == brute(d)


def _all_partitions(d, top=None):
    top = d if top is None else top
    if d == 0:
        yield ()
        return
    for k in range(min(d, top), 0, -1):
        for rest in _all_partitions(d - k, k):
            yield (k,) + rest


def test_exceptional_degree_four_datum():
    bd = parse_branch_data("4; 3+1|2+2|2+2")
    assert bd.d == 4 and bd.n == 3
    assert constellation_search(bd) is None
    r = realizable(bd)
    assert r.verdict == "no" and r.method == "exceptional-degree-4"


def test_constellations_are_certificates():
    for d in (3, 4, 5, 6):
        for bd in enumerate_branch_data(d):
            c = constellation_search(bd)
            if c is None:
                continue
            perms = c.permutations
            prod = tuple(range(d))
            for p in perms:
                prod = _compose(prod, p)
            assert prod == tuple(range(d))
            assert _transitive(perms, d)
            assert sorted(_ctype(p) for p in perms) == sorted(bd.partitions)


@pytest.mark.parametrize("d", [6, 7])
def test_rule_cascade_agrees_with_oracle(d):
    t0 = time.time()
    for bd in enumerate_branch_data(d):
        rule = realizable(bd)
        if rule.verdict != "unknown":
            assert rule.verdict == oracle_verdict(bd).verdict, str(bd)
    assert time.time() - t0 < 60


def test_rules():
    assert realizable(parse_branch_data("6; 6|6")).method == "polynomial"
    assert realizable(parse_branch_data("5; 4+1|3+2|2+2+1")).method == "small-degree"
    r = realizable(parse_branch_data("6; 4+2|3+3|2+1+1+1+1|2+1+1+1+1"))
    assert r.verdict == "yes" and r.method == "laurent"
    r = realizable(parse_branch_data("9; 3+3+3|3+3+3|2+2+2+2+1"), search_limit=8)
    assert r.verdict == "unknown"


@pytest.mark.parametrize(
    "raw, err",
    [
        ((4, [[3, 1], [2, 1]]), DegreeMismatch),
        ((4, [[1, 1, 1, 1], [4], [4]]), TrivialPartition),
        ((4, [[2, 2], [2, 2]]), RiemannHurwitzViolation),
        ((1, [[1]]), DegreeMismatch),
    ],
)
def test_validation_errors(raw, err):
    with pytest.raises(err):
        validate_branch_data(raw)
