"""Orbit-segment specifications and exact eps-tracing.

A *specification* is a finite tuple of orbit segments; an *initial*
specification starts every segment at exponent 0 and carries a vector of
positive gaps.  A candidate tracer ``y`` passes when, at every index the
definition prescribes, the distance between the tracer's iterate and the
segment's iterate stays within ``eps``:

* plain mode compares with the min set distance,
* hausdorff mode compares with the Hausdorff distance,

and for initial specifications the tracer's exponent is shifted by the
accumulated segment lengths and gaps.

Tracer search is an exact decision, not a sampling heuristic.  On a box
relation every distance with tracer exponent >= 1 depends only on the cell
of ``y``; the single exponent-0 requirement (present when the first segment
starts at 0) constrains ``y`` to the closed interval ``|y - x_1| <= eps``.
Searching cells intersected with that constraint therefore either produces a
witness or an exhaustive per-cell failure table that covers all of X.  On a
finite space the search enumerates points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .errors import (
    EmptyImageError,
    NonPositiveGapError,
    NoPreimageError,
    SizeMismatchError,
)
from .relations import (
    BoxRelation,
    Cell,
    FiniteRelation,
    OrbitSegment,
    Relation,
    cell_decomposition,
    cell_image,
    cell_of,
    rat,
)
from .sets import PointSet

MODES = ("plain", "hausdorff")


def _distance_fn(relation: Relation, mode: str) -> Callable:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    space = relation.space
    return space.set_distance if mode == "plain" else space.hausdorff


@dataclass(frozen=True)
class Specification:
    """A tuple of materialized orbit segments, in tracing order."""

    segments: tuple[OrbitSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a specification needs at least one segment")

    @classmethod
    def build(cls, relation: Relation, triples: Sequence[tuple]) -> "Specification":
        """Materialize segments from (base, first, last) triples."""
        return cls(tuple(relation.orbit_segment(b, k, l) for b, k, l in triples))

    @property
    def n(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class InitialSpecification:
    """Segments all starting at exponent 0, plus n-1 positive gap lengths."""

    segments: tuple[OrbitSegment, ...]
    gaps: tuple[int, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a specification needs at least one segment")
        if any(seg.first != 0 for seg in self.segments):
            raise ValueError("initial segments must start at exponent 0")
        if len(self.gaps) != len(self.segments) - 1:
            raise ValueError("need exactly n-1 gaps")
        if any(m < 1 for m in self.gaps):
            raise ValueError("gaps must be positive")

    @classmethod
    def build(cls, relation: Relation, pairs: Sequence[tuple], gaps: Sequence[int]) -> "InitialSpecification":
        """Materialize segments from (base, last) pairs and a gap vector."""
        return cls(
            tuple(relation.orbit_segment(b, 0, l) for b, l in pairs), tuple(gaps)
        )

    @property
    def n(self) -> int:
        return len(self.segments)


def is_n_spaced(spec: Specification, n: int) -> bool:
    """True iff consecutive segments satisfy first_{i+1} - last_i >= n."""
    return all(
        nxt.first - cur.last >= n for cur, nxt in zip(spec.segments, spec.segments[1:])
    )


@dataclass(frozen=True)
class TraceEntry:
    """One compared pair: segment i at step j, against the tracer's power."""

    segment: int
    step: int
    tracer_power: int
    distance: Fraction
    tracer_set: object
    target_set: object


@dataclass(frozen=True)
class TraceReport:
    """All compared distances for one candidate tracer, with the verdict."""

    mode: str
    eps: Fraction
    entries: tuple[TraceEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.distance <= self.eps for e in self.entries)

    @property
    def worst(self) -> TraceEntry:
        return max(self.entries, key=lambda e: e.distance)

    def entry(self, segment: int, step: int) -> TraceEntry:
        for e in self.entries:
            if e.segment == segment and e.step == step:
                return e
        raise KeyError((segment, step))


@dataclass(frozen=True)
class TracerWitness:
    """A point whose report passes, with the region the search drew it from."""

    y: object
    region: object
    report: TraceReport


@dataclass(frozen=True)
class RegionFailure:
    """One region of the exhaustive search, refuted at its representative."""

    region: object
    representative: object
    report: TraceReport


@dataclass(frozen=True)
class NoTracer:
    """Proof that no tracer exists: a failing report for every region of X."""

    failures: tuple[RegionFailure, ...]

    def worst_by_region(self) -> tuple[Fraction, ...]:
        return tuple(f.report.worst.distance for f in self.failures)


SearchResult = Union[TracerWitness, NoTracer]


def _requirements(spec: Specification) -> list[tuple[int, int, int]]:
    """(segment i, step j, tracer power) triples; power equals j."""
    return [
        (i, j, j)
        for i, seg in enumerate(spec.segments, start=1)
        for j in range(seg.first, seg.last + 1)
    ]


def _initial_requirements(spec: InitialSpecification) -> list[tuple[int, int, int]]:
    """Tracer powers are shifted by the accumulated lengths and gaps."""
    reqs = []
    offset = 0
    for i, seg in enumerate(spec.segments, start=1):
        for j in range(0, seg.last + 1):
            reqs.append((i, j, offset + j))
        if i <= len(spec.gaps):
            offset += seg.last + spec.gaps[i - 1]
    return reqs


def _tracer_sets(relation: Relation, y, powers: set[int]) -> dict:
    """F^t(y) for every requested power t, computed in one sweep."""
    out = {}
    current = relation.point_set(y)
    if 0 in powers:
        out[0] = current
    for t in range(1, max(powers) + 1):
        current = relation.image(current)
        if current.is_empty:
            raise EmptyImageError(t)
        if t in powers:
            out[t] = current
    return out


def _report(relation, spec, reqs, y, eps, mode) -> TraceReport:
    dist = _distance_fn(relation, mode)
    sets = _tracer_sets(relation, y, {power for _, _, power in reqs})
    entries = []
    for i, j, power in reqs:
        target = spec.segments[i - 1].set_at(j)
        tracer = sets[power]
        entries.append(TraceEntry(i, j, power, dist(tracer, target), tracer, target))
    return TraceReport(mode, rat(eps), tuple(entries))


def check_trace(relation: Relation, spec: Specification, y, eps, mode: str) -> TraceReport:
    """Exact distances for every (i, j) demanded by plain spaced tracing."""
    return _report(relation, spec, _requirements(spec), y, eps, mode)


def check_initial_trace(
    relation: Relation, spec: InitialSpecification, y, eps, mode: str
) -> TraceReport:
    """Exact distances for initial tracing, with shifted tracer exponents."""
    return _report(relation, spec, _initial_requirements(spec), y, eps, mode)


def _cell_sets(relation: BoxRelation, cell: Cell, powers: set[int]) -> dict:
    """F^t(y) for y in the cell and t >= 1; exact because patterns are cell-constant."""
    out = {}
    current = cell_image(relation, cell)
    if current.is_empty:
        raise EmptyImageError(1)
    if 1 in powers:
        out[1] = current
    for t in range(2, max(powers) + 1):
        current = relation.image(current)
        if current.is_empty:
            raise EmptyImageError(t)
        if t in powers:
            out[t] = current
    return out


def _search(relation, spec, reqs, eps, mode, checker) -> SearchResult:
    eps = rat(eps)
    dist = _distance_fn(relation, mode)

    if isinstance(relation, FiniteRelation):
        failures = []
        witness = None
        for y in range(relation.space.n):
            report = checker(relation, spec, y, eps, mode)
            if report.passed and witness is None:
                witness = TracerWitness(y, y, report)
            elif not report.passed:
                failures.append(RegionFailure(y, y, report))
        if witness is not None:
            return witness
        return NoTracer(tuple(failures))

    # Box relation: decide each cell exactly.  Requirements with power >= 1
    # are cell-constant; the only power-0 requirement is (1, 0), which pins
    # y to the closed interval |y - x_1| <= eps.
    zero_reqs = [(i, j) for i, j, power in reqs if power == 0]
    cell_reqs = [(i, j, power) for i, j, power in reqs if power >= 1]
    base1 = rat(spec.segments[0].base)

    failures = []
    witness = None
    for cell in cell_decomposition(relation).cells:
        cell_ok = True
        if cell_reqs:
            sets = _cell_sets(relation, cell, {p for _, _, p in cell_reqs})
            for i, j, power in cell_reqs:
                target = spec.segments[i - 1].set_at(j)
                if dist(sets[power], target) > eps:
                    cell_ok = False
                    break
        region = cell
        if cell_ok and zero_reqs:
            region = cell.intersect_closed(base1 - eps, base1 + eps)
            if region is None:
                cell_ok = False
        if cell_ok and witness is None:
            y = cell.representative() if not zero_reqs else region.pick_point(prefer=base1)
            report = checker(relation, spec, y, eps, mode)
            if not report.passed:
                raise AssertionError("cell-level pass must yield a passing witness")
            witness = TracerWitness(y, cell, report)
        elif not cell_ok:
            rep = cell.representative()
            failures.append(RegionFailure(cell, rep, checker(relation, spec, rep, eps, mode)))
    if witness is not None:
        return witness
    return NoTracer(tuple(failures))


def find_tracer(relation: Relation, spec: Specification, eps, mode: str) -> SearchResult:
    """Decide whether some y in X traces the specification; exact either way."""
    return _search(relation, spec, _requirements(spec), eps, mode, check_trace)


def find_initial_tracer(
    relation: Relation, spec: InitialSpecification, eps, mode: str
) -> SearchResult:
    """Exact decision for initial tracing with the shifted exponents."""
    return _search(relation, spec, _initial_requirements(spec), eps, mode, check_initial_trace)


def derive_initial(
    relation: Relation, spec: Specification
) -> tuple[InitialSpecification, tuple]:
    """Rebase an N-spaced specification at exponent 0.

    Each new base is the minimum element of F^{first_i}(x_i), the gap vector
    is first_{i+1} - last_i, and the new segment lengths are last_i - first_i.
    The chosen bases are returned alongside as provenance.
    """
    gaps = []
    for cur, nxt in zip(spec.segments, spec.segments[1:]):
        gap = nxt.first - cur.last
        if gap < 1:
            raise NonPositiveGapError(
                f"segments at exponents {cur.last} and {nxt.first} leave no positive gap"
            )
        gaps.append(gap)
    bases = tuple(
        seg.base if seg.first == 0 else relation.iterate(seg.base, seg.first).min_point()
        for seg in spec.segments
    )
    segments = tuple(
        relation.orbit_segment(z, 0, seg.last - seg.first)
        for z, seg in zip(bases, spec.segments)
    )
    return InitialSpecification(segments, tuple(gaps)), bases


def lift_tracer(relation: Relation, spec: Specification, z):
    """The full preimage set {y : z in F^{first_1}(y)}.

    Returns a PointSet on finite spaces and a tuple of cells on box
    relations (the set need not be closed: it is a union of cells).
    Raises NoPreimageError when no such y exists.
    """
    k1 = spec.segments[0].first
    if isinstance(relation, FiniteRelation):
        if k1 == 0:
            return PointSet.point(z)
        hits = []
        for y in range(relation.space.n):
            try:
                if relation.iterate(y, k1).contains(z):
                    hits.append(y)
            except EmptyImageError:
                continue
        if not hits:
            raise NoPreimageError(f"no point reaches {z} in {k1} steps")
        return PointSet.of(hits)

    z = rat(z)
    if k1 == 0:
        home = cell_of(relation, z)
        return (Cell(z, z, True, True, home.pattern),)
    hits = []
    for cell in cell_decomposition(relation).cells:
        try:
            sets = _cell_sets(relation, cell, {k1})
        except EmptyImageError:
            continue
        if sets[k1].contains(z):
            hits.append(cell)
    if not hits:
        raise NoPreimageError(f"no point reaches {z} in {k1} steps")
    return tuple(hits)


def conjugacy_transport(phi: Sequence[int], spec, relation: FiniteRelation):
    """Pull a specification back through a conjugating bijection.

    ``phi`` maps indices of the target system's space onto indices of the
    source system's space (phi: X -> Y); bases are mapped through its
    inverse and segments are re-materialized in ``relation`` (the X side).
    Indices (first/last, gaps) are untouched.
    """
    n = relation.space.n
    if len(phi) != n or sorted(phi) != list(range(n)):
        raise SizeMismatchError("phi must be a bijection on the space's indices")
    inverse = {phi[x]: x for x in range(n)}
    if isinstance(spec, InitialSpecification):
        return InitialSpecification.build(
            relation,
            [(inverse[seg.base], seg.last) for seg in spec.segments],
            spec.gaps,
        )
    return Specification.build(
        relation,
        [(inverse[seg.base], seg.first, seg.last) for seg in spec.segments],
    )
