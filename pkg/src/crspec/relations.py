"""Closed relations as data, with images, orbits and exact per-cell analysis.

Two concrete relation kinds cover every construction in this library:

* :class:`BoxRelation` -- a finite union of closed boxes ``A_i x B_i`` inside
  an ambient interval squared.  The image of a set S is the exact union of
  the ``B_i`` whose domain side meets S, so every iterate of a point is a
  finite interval union and can be computed without approximation.
* :class:`FiniteRelation` -- an adjacency matrix over a finite metric space.

For box relations the ambient interval splits into finitely many *cells*
(maximal subintervals, possibly half-open, plus isolated points) on which the
membership pattern ``{i : y in A_i}`` is constant.  All iterates ``F^j(y)``
with ``j >= 1`` depend only on the cell of ``y``, which is what makes tracer
search and "for all y" refutations exact rather than sampled.  Iterates of a
cell range over unions of the ``B_i``, a finite lattice, so the sequence
``j -> F^j(y)`` is eventually periodic; :func:`iterate_automaton` returns its
preperiod and cycle per cell, turning "for all j" claims into finite checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import BadRangeError, EmptyImageError
from .sets import (
    FiniteMetricSpace,
    Interval,
    IntervalSpace,
    IntervalUnion,
    PointSet,
    normalize,
    rat,
)

AmbientSet = Union[IntervalUnion, PointSet]


@dataclass(frozen=True)
class OrbitSegment:
    """The materialized tuple of sets F^first(x), ..., F^last(x)."""

    base: object
    first: int
    last: int
    sets: tuple[AmbientSet, ...]

    def __post_init__(self):
        if self.first > self.last:
            raise BadRangeError(f"segment range [{self.first}, {self.last}] is empty")
        if len(self.sets) != self.last - self.first + 1:
            raise ValueError("segment must hold one set per exponent")

    def set_at(self, j: int) -> AmbientSet:
        """The set F^j(base); j must lie within [first, last]."""
        return self.sets[j - self.first]


@dataclass(frozen=True)
class BoxRelation:
    """A closed relation on an interval, as a finite union of boxes A_i x B_i."""

    space: IntervalSpace
    boxes: tuple[tuple[Interval, Interval], ...]

    def __post_init__(self):
        if not self.boxes:
            raise ValueError("a box relation needs at least one box")
        amb = self.space
        for a, b in self.boxes:
            if not (amb.contains(a.lo) and amb.contains(a.hi) and amb.contains(b.lo) and amb.contains(b.hi)):
                raise ValueError(f"box {a} x {b} leaves the ambient space {amb}")

    def point_set(self, x) -> IntervalUnion:
        return self.space.point(x)

    def image(self, s: IntervalUnion) -> IntervalUnion:
        """F(S): the union of the B_i whose domain side meets S.  May be empty."""
        hit = []
        for a, b in self.boxes:
            if any(p.intersects(a) for p in s.parts):
                hit.append(b)
        return normalize(hit)

    def iterate(self, x, j: int) -> IntervalUnion:
        """F^j(x) exactly; F^0(x) = {x}."""
        current = self.point_set(x)
        for step in range(1, j + 1):
            current = self.image(current)
            if current.is_empty:
                raise EmptyImageError(step)
        return current

    def orbit_segment(self, x, first: int, last: int) -> OrbitSegment:
        if first > last:
            raise BadRangeError(f"segment range [{first}, {last}] is empty")
        x = rat(x)
        current = self.point_set(x)
        sets = [current] if first == 0 else []
        for step in range(1, last + 1):
            current = self.image(current)
            if current.is_empty:
                raise EmptyImageError(step)
            if step >= first:
                sets.append(current)
        return OrbitSegment(x, first, last, tuple(sets))

    def project(self, which: int) -> IntervalUnion:
        if which not in (1, 2):
            raise ValueError("projection index must be 1 or 2")
        side = 0 if which == 1 else 1
        return normalize([box[side] for box in self.boxes])

    def inverse(self) -> "BoxRelation":
        return BoxRelation(self.space, tuple((b, a) for a, b in self.boxes))

    def is_function(self) -> bool:
        """True iff every ambient point has exactly one image point."""
        for cell in cell_decomposition(self).cells:
            img = cell_image(self, cell)
            if img.is_empty:
                return False
            if not (len(img.parts) == 1 and img.parts[0].is_point):
                return False
        return True


@dataclass(frozen=True)
class FiniteRelation:
    """A relation on a finite metric space, as a boolean adjacency matrix."""

    space: FiniteMetricSpace
    adjacency: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        frozen = tuple(tuple(bool(v) for v in row) for row in self.adjacency)
        object.__setattr__(self, "adjacency", frozen)
        n = self.space.n
        if len(frozen) != n or any(len(row) != n for row in frozen):
            raise ValueError("adjacency matrix must match the space size")

    @classmethod
    def from_pairs(cls, space: FiniteMetricSpace, pairs) -> "FiniteRelation":
        adj = [[False] * space.n for _ in range(space.n)]
        for a, b in pairs:
            adj[a][b] = True
        return cls(space, tuple(tuple(row) for row in adj))

    def pairs(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.space.n)
            for j in range(self.space.n)
            if self.adjacency[i][j]
        ]

    def point_set(self, x: int) -> PointSet:
        return self.space.point(x)

    def image(self, s: PointSet) -> PointSet:
        return PointSet.of(
            j for i in s.members for j in range(self.space.n) if self.adjacency[i][j]
        )

    def iterate(self, x: int, j: int) -> PointSet:
        current = self.point_set(x)
        for step in range(1, j + 1):
            current = self.image(current)
            if current.is_empty:
                raise EmptyImageError(step)
        return current

    def orbit_segment(self, x: int, first: int, last: int) -> OrbitSegment:
        if first > last:
            raise BadRangeError(f"segment range [{first}, {last}] is empty")
        current = self.point_set(x)
        sets = [current] if first == 0 else []
        for step in range(1, last + 1):
            current = self.image(current)
            if current.is_empty:
                raise EmptyImageError(step)
            if step >= first:
                sets.append(current)
        return OrbitSegment(x, first, last, tuple(sets))

    def project(self, which: int) -> PointSet:
        if which not in (1, 2):
            raise ValueError("projection index must be 1 or 2")
        if which == 1:
            return PointSet.of(i for i, row in enumerate(self.adjacency) if any(row))
        return PointSet.of(
            j for j in range(self.space.n) if any(row[j] for row in self.adjacency)
        )

    def inverse(self) -> "FiniteRelation":
        n = self.space.n
        return FiniteRelation(
            self.space, tuple(tuple(self.adjacency[j][i] for j in range(n)) for i in range(n))
        )

    def is_function(self) -> bool:
        return all(sum(row) == 1 for row in self.adjacency)


Relation = Union[BoxRelation, FiniteRelation]


@dataclass(frozen=True)
class Cell:
    """A maximal region of constant box-membership pattern.

    Endpoints may be open: e.g. the pattern on [0, 1/2) can differ from the
    one at the isolated breakpoint {1/2}.  A point cell has lo == hi and both
    ends closed.
    """

    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool
    pattern: frozenset[int]

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def representative(self) -> Fraction:
        """A deterministic interior point: the cell itself, or its midpoint."""
        if self.is_point:
            return self.lo
        return (self.lo + self.hi) / 2

    def intersect_closed(self, lo: Fraction, hi: Fraction) -> "Cell | None":
        """Intersection with a closed interval, or None when empty."""
        new_lo, new_hi = max(self.lo, lo), min(self.hi, hi)
        if new_lo > new_hi:
            return None
        lo_closed = self.lo_closed if new_lo == self.lo else True
        hi_closed = self.hi_closed if new_hi == self.hi else True
        if new_lo == new_hi and not (lo_closed and hi_closed):
            return None
        return Cell(new_lo, new_hi, lo_closed, hi_closed, self.pattern)

    def pick_point(self, prefer: Fraction | None = None) -> Fraction:
        """A deterministic member; `prefer` wins when it lies inside."""
        if prefer is not None and self.contains(prefer):
            return prefer
        return self.representative()

    def __str__(self):
        if self.is_point:
            return f"{{{self.lo}}}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


@dataclass(frozen=True)
class CellDecomposition:
    """The full partition of the ambient interval into pattern-constant cells."""

    breakpoints: tuple[Fraction, ...]
    cells: tuple[Cell, ...]


def _pattern_at(relation: BoxRelation, x: Fraction) -> frozenset[int]:
    return frozenset(i for i, (a, _) in enumerate(relation.boxes) if a.contains(x))


@lru_cache(maxsize=None)
def cell_decomposition(relation: BoxRelation) -> CellDecomposition:
    """Split the ambient interval by the domain-side box endpoints.

    Elementary pieces (breakpoint singletons and the open intervals between
    them) are tagged with their pattern and then adjacent pieces with equal
    patterns are merged, so e.g. {0} merges into [0, 1/2) when the pattern
    does not change at 0.
    """
    amb = relation.space
    points = {amb.lo, amb.hi}
    for a, _ in relation.boxes:
        points.add(a.lo)
        points.add(a.hi)
    breaks = tuple(sorted(points))

    pieces: list[Cell] = []
    for idx, b in enumerate(breaks):
        pieces.append(Cell(b, b, True, True, _pattern_at(relation, b)))
        if idx + 1 < len(breaks):
            nxt = breaks[idx + 1]
            mid = (b + nxt) / 2
            pieces.append(Cell(b, nxt, False, False, _pattern_at(relation, mid)))

    merged: list[Cell] = []
    for piece in pieces:
        if merged and merged[-1].pattern == piece.pattern:
            prev = merged[-1]
            merged[-1] = Cell(prev.lo, piece.hi, prev.lo_closed, piece.hi_closed, prev.pattern)
        else:
            merged.append(piece)
    return CellDecomposition(breaks, tuple(merged))


def cell_of(relation: BoxRelation, x: Fraction) -> Cell:
    for cell in cell_decomposition(relation).cells:
        if cell.contains(x):
            return cell
    raise ValueError(f"point {x} outside the ambient space")


def cell_image(relation: BoxRelation, cell: Cell) -> IntervalUnion:
    """F(y) for every y in the cell: the union of B_i over the cell's pattern."""
    return normalize([relation.boxes[i][1] for i in sorted(cell.pattern)])


@dataclass(frozen=True)
class EventualOrbit:
    """The eventually periodic tail F^1(y), F^2(y), ... of one cell or point."""

    preperiod: tuple[AmbientSet, ...]
    cycle: tuple[AmbientSet, ...]

    def value_at(self, j: int) -> AmbientSet:
        """F^j(y) for j >= 1."""
        if j < 1:
            raise ValueError("the automaton describes exponents j >= 1")
        idx = j - 1
        if idx < len(self.preperiod):
            return self.preperiod[idx]
        return self.cycle[(idx - len(self.preperiod)) % len(self.cycle)]

    @property
    def transient(self) -> int:
        return len(self.preperiod)

    @property
    def period(self) -> int:
        return len(self.cycle)


def _eventual_orbit(relation: Relation, seed: AmbientSet) -> EventualOrbit:
    """Iterate the image map from `seed` (= F^1) until the first repeat."""
    seen: dict[AmbientSet, int] = {}
    seq: list[AmbientSet] = []
    current = seed
    step = 1
    while True:
        if current.is_empty:
            raise EmptyImageError(step)
        if current in seen:
            start = seen[current]
            return EventualOrbit(tuple(seq[:start]), tuple(seq[start:]))
        seen[current] = len(seq)
        seq.append(current)
        current = relation.image(current)
        step += 1


@dataclass(frozen=True)
class IterateAutomaton:
    """Per-cell eventually periodic description of all iterates j >= 1."""

    decomposition: CellDecomposition
    orbits: tuple[EventualOrbit, ...]

    def orbit_for(self, cell: Cell) -> EventualOrbit:
        return self.orbits[self.decomposition.cells.index(cell)]

    def value_at(self, cell: Cell, j: int) -> AmbientSet:
        return self.orbit_for(cell).value_at(j)


@lru_cache(maxsize=None)
def iterate_automaton(relation: BoxRelation) -> IterateAutomaton:
    """The eventually periodic sequence (F^j(y))_{j>=1} for each cell.

    Requires p1(F) = X; a cell whose orbit dies raises EmptyImageError naming
    the failing exponent.
    """
    decomp = cell_decomposition(relation)
    orbits = tuple(_eventual_orbit(relation, cell_image(relation, c)) for c in decomp.cells)
    return IterateAutomaton(decomp, orbits)


def point_orbit(relation: FiniteRelation, x: int) -> EventualOrbit:
    """Finite-space analogue of the per-cell automaton, for a single point."""
    return _eventual_orbit(relation, relation.image(relation.point_set(x)))


def check_surjectivity(relation: Relation) -> tuple[bool, bool]:
    """Whether p1(F) and p2(F) each cover the whole ambient space."""
    full = relation.space.full()
    return relation.project(1) == full, relation.project(2) == full
