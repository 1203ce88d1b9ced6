"""Seeded random instances for property suites.

Sizes are deliberately small (a handful of boxes with denominator <= 8
endpoints, finite spaces with at most six points) so that the exhaustive
oracles used to cross-check every implication stay fast.  All generation is
driven by an explicit :class:`random.Random`, never by global state.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .relations import BoxRelation, FiniteRelation
from .sets import FiniteMetricSpace, Interval, IntervalSpace, IntervalUnion, normalize

UNIT = IntervalSpace(0, 1)


def random_fraction(
    rng: random.Random, lo=Fraction(0), hi=Fraction(1), max_den: int = 8
) -> Fraction:
    den = rng.randint(1, max_den)
    lo_num = math.ceil(lo * den)
    hi_num = math.floor(hi * den)
    return Fraction(rng.randint(lo_num, hi_num), den)


def random_interval(rng: random.Random, space: IntervalSpace, max_den: int = 8) -> Interval:
    a = random_fraction(rng, space.lo, space.hi, max_den)
    b = random_fraction(rng, space.lo, space.hi, max_den)
    return Interval(min(a, b), max(a, b))


def random_interval_union(
    rng: random.Random, space: IntervalSpace, max_parts: int = 3, max_den: int = 8
) -> IntervalUnion:
    parts = [random_interval(rng, space, max_den) for _ in range(rng.randint(1, max_parts))]
    return normalize(parts)


def _domain_gaps(space: IntervalSpace, covered: IntervalUnion) -> list[Interval]:
    """Closed gaps of the ambient interval not covered by `covered`."""
    gaps = []
    cursor = space.lo
    for part in covered.parts:
        if part.lo > cursor:
            gaps.append(Interval(cursor, part.lo))
        cursor = max(cursor, part.hi)
    if cursor < space.hi:
        gaps.append(Interval(cursor, space.hi))
    return gaps


def random_box_relation(
    rng: random.Random,
    space: IntervalSpace = UNIT,
    max_boxes: int = 5,
    max_den: int = 8,
    cover_domain: bool = True,
) -> BoxRelation:
    """A random box relation; with cover_domain, p1(F) = X is guaranteed."""
    count = rng.randint(1, max_boxes)
    boxes = [
        (random_interval(rng, space, max_den), random_interval(rng, space, max_den))
        for _ in range(count)
    ]
    if cover_domain:
        covered = normalize([a for a, _ in boxes])
        for gap in _domain_gaps(space, covered):
            boxes.append((gap, random_interval(rng, space, max_den)))
    return BoxRelation(space, tuple(boxes))


def random_partition_relation(
    rng: random.Random,
    space: IntervalSpace = UNIT,
    max_boxes: int = 5,
    max_den: int = 8,
) -> BoxRelation:
    """Domain sides tile the ambient interval, so p1(F) = X with <= max_boxes boxes."""
    cuts = sorted(
        {
            random_fraction(rng, space.lo, space.hi, max_den)
            for _ in range(rng.randint(0, max_boxes - 1))
        }
        - {space.lo, space.hi}
    )[: max_boxes - 1]
    edges = [space.lo, *cuts, space.hi]
    boxes = tuple(
        (Interval(a, b), random_interval(rng, space, max_den))
        for a, b in zip(edges, edges[1:])
    )
    return BoxRelation(space, boxes)


def random_finite_space(rng: random.Random, n: int, max_den: int = 8) -> FiniteMetricSpace:
    """A random rational metric on n points.

    Half the draws embed the points on a line (distances of arbitrary
    ratios), the other half draw distances from [1/2, 1], where the triangle
    inequality holds automatically.
    """
    if rng.random() < 0.5:
        positions = sorted(
            random_fraction(rng, Fraction(0), Fraction(4), max_den) for _ in range(n)
        )
        for i in range(1, n):
            if positions[i] <= positions[i - 1]:
                positions[i] = positions[i - 1] + Fraction(1, max_den)
        dist = tuple(
            tuple(abs(positions[i] - positions[j]) for j in range(n)) for i in range(n)
        )
        return FiniteMetricSpace(dist)
    half = Fraction(1, 2)
    values = {}
    for i in range(n):
        for j in range(i + 1, n):
            values[(i, j)] = half + random_fraction(rng, Fraction(0), half, max_den)
    dist = tuple(
        tuple(
            Fraction(0) if i == j else values[(min(i, j), max(i, j))]
            for j in range(n)
        )
        for i in range(n)
    )
    return FiniteMetricSpace(dist)


def random_finite_relation(
    rng: random.Random,
    space: FiniteMetricSpace,
    density: float = 0.4,
    p1_full: bool = True,
    p2_full: bool = False,
) -> FiniteRelation:
    n = space.n
    adj = [[rng.random() < density for _ in range(n)] for _ in range(n)]
    if p1_full:
        for i in range(n):
            if not any(adj[i]):
                adj[i][rng.randrange(n)] = True
    if p2_full:
        for j in range(n):
            if not any(adj[i][j] for i in range(n)):
                adj[rng.randrange(n)][j] = True
    return FiniteRelation(space, tuple(tuple(row) for row in adj))


def random_function_relation(rng: random.Random, space: FiniteMetricSpace) -> FiniteRelation:
    """A relation that is a function: one image point per row."""
    n = space.n
    return FiniteRelation.from_pairs(space, [(i, rng.randrange(n)) for i in range(n)])


def random_point(rng: random.Random, relation) -> object:
    if isinstance(relation, FiniteRelation):
        return rng.randrange(relation.space.n)
    return random_fraction(rng, relation.space.lo, relation.space.hi)


def random_spaced_triples(
    rng: random.Random,
    relation,
    segments: int,
    spacing: int,
    max_len: int = 2,
    max_first: int = 2,
) -> list[tuple]:
    triples = []
    first = rng.randint(0, max_first)
    for _ in range(segments):
        last = first + rng.randint(0, max_len)
        triples.append((random_point(rng, relation), first, last))
        first = last + spacing + rng.randint(0, 1)
    return triples


def random_initial_pairs(
    rng: random.Random, relation, segments: int, max_len: int = 2
) -> list[tuple]:
    return [
        (random_point(rng, relation), rng.randint(0, max_len)) for _ in range(segments)
    ]


def random_isometric_space(
    rng: random.Random, n: int, max_den: int = 6
) -> tuple[FiniteMetricSpace, tuple[int, ...]]:
    """A metric space together with a non-trivial isometry of it.

    Averaging an arbitrary random metric over the cyclic group generated by
    a random permutation yields a metric for which that permutation is an
    isometry.
    """
    perm = list(range(n))
    rng.shuffle(perm)
    base = random_finite_space(rng, n, max_den)

    orbit_of_perm = [tuple(range(n))]
    current = tuple(perm)
    while current != orbit_of_perm[0]:
        orbit_of_perm.append(current)
        current = tuple(current[p] for p in perm)
    group = orbit_of_perm

    def avg(i: int, j: int) -> Fraction:
        total = sum(base.d(g[i], g[j]) for g in group)
        return Fraction(total, len(group))

    dist = tuple(tuple(avg(i, j) for j in range(n)) for i in range(n))
    return FiniteMetricSpace(dist), tuple(perm)
