"""Certificates, bounded refutations, and randomized implication suites.

None of the four global properties (plain/Hausdorff, spaced/initial) is
decidable from finitely many evaluations in general, so this module never
claims to decide them.  It produces three kinds of evidence instead:

* a :class:`Certificate` that a sufficient condition holds -- a common
  image, a full image, an eventually small Hausdorff spread, eventually
  equal images, or a full-width fiber ``X x {x0}`` inside the relation.
  Certificates carry enough per-region data to be re-checked independently
  (:func:`recheck`).
* a :class:`Refutation`: for one fixed eps and one specification template,
  every tested spacing (or gap) admits no tracer, witnessed by an exhaustive
  per-cell failure table for each instantiation.  Because tracer search is
  exact on cells, a refutation is a proof for the tested range, not a
  sampling result.
* an :class:`Inconclusive` outcome carrying the tracer that defeated the
  attempted refutation.

The "for all j" in the eventual conditions is made finite through the
eventual periodicity of per-cell iterates: checking one preperiod-plus-cycle
window per cell pair covers every exponent.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import randgen
from .relations import (
    BoxRelation,
    EventualOrbit,
    FiniteRelation,
    Relation,
    cell_image,
    cell_decomposition,
    iterate_automaton,
    point_orbit,
)
from .sets import rat
from .specifications import (
    InitialSpecification,
    NoTracer,
    Specification,
    TracerWitness,
    check_initial_trace,
    check_trace,
    conjugacy_transport,
    derive_initial,
    find_initial_tracer,
    find_tracer,
    lift_tracer,
)


def _eventual_orbits(relation: Relation) -> list[tuple[object, EventualOrbit]]:
    """(region label, orbit of F^1, F^2, ...) for each cell or point."""
    if isinstance(relation, BoxRelation):
        auto = iterate_automaton(relation)
        return list(zip(auto.decomposition.cells, auto.orbits))
    return [(x, point_orbit(relation, x)) for x in range(relation.space.n)]


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable evidence that a sufficient condition holds."""

    kind: str
    n0: int | None
    eps: Fraction | None
    evidence: tuple

    def __str__(self):
        head = f"certificate[{self.kind}]"
        if self.n0 is not None:
            head += f" n0={self.n0}"
        if self.eps is not None:
            head += f" eps={self.eps}"
        return head


def certify_common_image(relation: Relation, n0_max: int) -> Certificate | None:
    """Smallest n0 <= n0_max with F^{n0}(x) and F^{n0}(y) meeting for all x, y.

    Evidence lists one common point per region pair.  Requires p1(F) = X;
    a dying orbit raises EmptyImageError.
    """
    orbits = _eventual_orbits(relation)
    for n0 in range(1, n0_max + 1):
        evidence = []
        ok = True
        for a in range(len(orbits)):
            for b in range(a + 1, len(orbits)):
                (la, oa), (lb, ob) = orbits[a], orbits[b]
                common = oa.value_at(n0).intersect(ob.value_at(n0))
                if common.is_empty:
                    ok = False
                    break
                evidence.append(((la, lb), common.min_point()))
            if not ok:
                break
        if ok:
            return Certificate("common-image", n0, None, tuple(evidence))
    return None


def certify_full_image(relation: Relation, n0_max: int) -> Certificate | None:
    """Smallest n0 <= n0_max with F^{n0}(y) = X for every y."""
    full = relation.space.full()
    orbits = _eventual_orbits(relation)
    for n0 in range(1, n0_max + 1):
        values = [(label, orbit.value_at(n0)) for label, orbit in orbits]
        if all(v == full for _, v in values):
            return Certificate("full-image", n0, None, tuple(values))
    return None


def certify_eventual_hausdorff(relation: Relation, eps, n0_max: int) -> Certificate | None:
    """Smallest n0 <= n0_max with H_d(F^{n0+j}(x), F^{n0+j}(y)) <= eps for ALL j >= 0.

    Eventual periodicity reduces "for all j" to one preperiod-plus-cycle
    window per region pair.  When all images coincide exactly from n0 on,
    the certificate is tagged eventual-equal (the stronger condition).
    """
    eps = rat(eps)
    space = relation.space
    orbits = _eventual_orbits(relation)
    for n0 in range(1, n0_max + 1):
        evidence = []
        ok = True
        equal = True
        for a in range(len(orbits)):
            for b in range(a + 1, len(orbits)):
                (la, oa), (lb, ob) = orbits[a], orbits[b]
                transient = max(oa.transient, ob.transient)
                window_end = max(n0, transient + 1) + math.lcm(oa.period, ob.period) - 1
                worst = max(
                    space.hausdorff(oa.value_at(j), ob.value_at(j))
                    for j in range(n0, window_end + 1)
                )
                if worst > eps:
                    ok = False
                    break
                if worst > 0:
                    equal = False
                evidence.append(((la, lb), worst))
            if not ok:
                break
        if ok:
            kind = "eventual-equal" if equal else "eventual-hausdorff"
            return Certificate(kind, n0, eps, tuple(evidence))
    return None


def certify_trivial_fiber(relation: Relation) -> Certificate | None:
    """A point x0 with the full-width fiber X x {x0} contained in F.

    Such an x0 belongs to F(x) for every x, i.e. to the intersection of the
    per-region first images; the minimum of that intersection is reported.
    """
    if isinstance(relation, BoxRelation):
        images = [cell_image(relation, c) for c in cell_decomposition(relation).cells]
    else:
        images = [
            relation.image(relation.point_set(x)) for x in range(relation.space.n)
        ]
    common = images[0]
    for img in images[1:]:
        common = common.intersect(img)
        if common.is_empty:
            return None
    if common.is_empty:
        return None
    return Certificate("trivial-fiber", None, None, (common.min_point(), common))


def recheck(relation: Relation, certificate: Certificate) -> bool:
    """Re-evaluate a certificate's evidence against the relation from scratch."""
    orbits = dict(_eventual_orbits(relation))
    kind = certificate.kind
    if kind == "common-image":
        return all(
            orbits[la].value_at(certificate.n0).contains(point)
            and orbits[lb].value_at(certificate.n0).contains(point)
            for (la, lb), point in certificate.evidence
        )
    if kind == "full-image":
        full = relation.space.full()
        return all(
            orbits[label].value_at(certificate.n0) == full == stored
            for label, stored in certificate.evidence
        )
    if kind in ("eventual-hausdorff", "eventual-equal"):
        space = relation.space
        for (la, lb), stored in certificate.evidence:
            oa, ob = orbits[la], orbits[lb]
            transient = max(oa.transient, ob.transient)
            end = max(certificate.n0, transient + 1) + math.lcm(oa.period, ob.period) - 1
            worst = max(
                space.hausdorff(oa.value_at(j), ob.value_at(j))
                for j in range(certificate.n0, end + 1)
            )
            if worst != stored or worst > certificate.eps:
                return False
            if kind == "eventual-equal" and worst != 0:
                return False
        return True
    if kind == "trivial-fiber":
        x0 = certificate.evidence[0]
        if isinstance(relation, BoxRelation):
            return all(
                cell_image(relation, c).contains(x0)
                for c in cell_decomposition(relation).cells
            )
        return all(
            relation.image(relation.point_set(x)).contains(x0)
            for x in range(relation.space.n)
        )
    raise ValueError(f"unknown certificate kind {kind!r}")


@dataclass(frozen=True)
class SpacedTemplate:
    """A spacing-parameterized specification scheme.

    The head segment is fixed at (base, first, last); each tail segment
    (base, length) starts exactly N steps after the previous one ends, the
    tightest N-spacing and therefore the hardest case for a refutation.
    """

    head: tuple
    tail: tuple[tuple, ...]

    def instantiate(self, relation: Relation, n: int) -> Specification:
        base, first, last = self.head
        triples = [(base, first, last)]
        for b, length in self.tail:
            start = last + n
            triples.append((b, start, start + length))
            last = start + length
        return Specification.build(relation, triples)


@dataclass(frozen=True)
class InitialTemplate:
    """An initial-specification scheme with every gap set to the parameter m."""

    segments: tuple[tuple, ...]

    def instantiate(self, relation: Relation, m: int) -> InitialSpecification:
        return InitialSpecification.build(
            relation, self.segments, (m,) * (len(self.segments) - 1)
        )


Template = Union[SpacedTemplate, InitialTemplate]

PROPERTIES = ("SP", "HSP", "ISP", "HISP")


@dataclass(frozen=True)
class Instantiation:
    """One tested spacing/gap value and its exhaustive failure table."""

    value: int
    outcome: NoTracer


@dataclass(frozen=True)
class Refutation:
    """No tracer for any tested instantiation of the template at this eps."""

    property: str
    eps: Fraction
    template: Template
    values: tuple[int, ...]
    instantiations: tuple[Instantiation, ...]


@dataclass(frozen=True)
class Inconclusive:
    """The refutation attempt failed: some instantiation admits a tracer."""

    property: str
    eps: Fraction
    value: int
    witness: TracerWitness


def refute_property(
    relation: Relation, prop: str, eps, template: Template, values: Sequence[int]
) -> Refutation | Inconclusive:
    """Try to refute a specification-type property on a template of instances.

    For each value in the range the template is instantiated and the exact
    tracer search runs in the property's mode.  The result is a Refutation
    only if every instantiation yields NoTracer; the per-cell tables are kept
    so each recorded distance can be replayed bit-for-bit.
    """
    if prop not in PROPERTIES:
        raise ValueError(f"property must be one of {PROPERTIES}")
    eps = rat(eps)
    initial = prop in ("ISP", "HISP")
    mode = "hausdorff" if prop in ("HSP", "HISP") else "plain"
    if initial != isinstance(template, InitialTemplate):
        raise ValueError(f"{prop} needs an {'initial' if initial else 'spaced'} template")
    outcomes = []
    for value in values:
        spec = template.instantiate(relation, value)
        if initial:
            result = find_initial_tracer(relation, spec, eps, mode)
        else:
            result = find_tracer(relation, spec, eps, mode)
        if isinstance(result, TracerWitness):
            return Inconclusive(prop, eps, value, result)
        outcomes.append(Instantiation(value, result))
    return Refutation(prop, eps, template, tuple(values), tuple(outcomes))


@dataclass(frozen=True)
class PropertyVerdict:
    """Outcome of one randomized implication: instance count and failures."""

    name: str
    instances: int
    failures: tuple[str, ...]
    seed: int

    @property
    def ok(self) -> bool:
        return not self.failures


def _suite_hausdorff_implies_plain(seed: int, count: int) -> PropertyVerdict:
    rng = random.Random(seed)
    failures = []
    for idx in range(count):
        relation = randgen.random_box_relation(rng)
        triples = randgen.random_spaced_triples(rng, relation, rng.randint(1, 3), rng.randint(1, 3))
        spec = Specification.build(relation, triples)
        y = randgen.random_point(rng, relation)
        eps = randgen.random_fraction(rng)
        hd = check_trace(relation, spec, y, eps, "hausdorff")
        plain = check_trace(relation, spec, y, eps, "plain")
        if hd.passed and not plain.passed:
            failures.append(f"instance {idx}: hausdorff passed but plain failed")
        if any(p.distance > h.distance for p, h in zip(plain.entries, hd.entries)):
            failures.append(f"instance {idx}: min distance exceeded hausdorff distance")
    return PropertyVerdict("hausdorff-pass-implies-plain-pass", count, tuple(failures), seed)


def _suite_initial_round_trip(seed: int, count: int) -> PropertyVerdict:
    rng = random.Random(seed)
    failures = []
    for idx in range(count):
        space = randgen.random_finite_space(rng, rng.randint(2, 6))
        relation = randgen.random_finite_relation(rng, space, p1_full=True, p2_full=True)
        triples = randgen.random_spaced_triples(
            rng, relation, rng.randint(2, 3), rng.randint(1, 3), max_len=2, max_first=2
        )
        spec = Specification.build(relation, triples)
        eps = space.diameter() / 2
        initial, _bases = derive_initial(relation, spec)
        found = find_initial_tracer(relation, initial, eps, "plain")
        if not isinstance(found, TracerWitness):
            continue
        lifted = lift_tracer(relation, spec, found.y)
        for y in lifted.members:
            if not check_trace(relation, spec, y, eps, "plain").passed:
                failures.append(f"instance {idx}: lifted tracer {y} fails the spaced trace")
    return PropertyVerdict("initial-to-spaced-round-trip", count, tuple(failures), seed)


def _suite_conjugacy_invariance(seed: int, count: int) -> PropertyVerdict:
    rng = random.Random(seed)
    failures = []
    for idx in range(count):
        n = rng.randint(2, 6)
        space, perm = randgen.random_isometric_space(rng, n)
        source = randgen.random_finite_relation(rng, space, p1_full=True)
        target = FiniteRelation.from_pairs(
            space, [(perm[a], perm[b]) for a, b in source.pairs()]
        )
        triples = randgen.random_spaced_triples(rng, target, rng.randint(1, 2), rng.randint(1, 2))
        spec_target = Specification.build(target, triples)
        spec_source = conjugacy_transport(perm, spec_target, source)
        eps = randgen.random_fraction(rng, Fraction(0), space.diameter())
        mode = rng.choice(("plain", "hausdorff"))
        for x in range(n):
            rs = check_trace(source, spec_source, x, eps, mode)
            rt = check_trace(target, spec_target, perm[x], eps, mode)
            if [e.distance for e in rs.entries] != [e.distance for e in rt.entries]:
                failures.append(f"instance {idx}: distances differ at point {x}")
                break
        found_source = find_tracer(source, spec_source, eps, mode)
        found_target = find_tracer(target, spec_target, eps, mode)
        if isinstance(found_source, TracerWitness) != isinstance(found_target, TracerWitness):
            failures.append(f"instance {idx}: verdicts differ under conjugacy")
    return PropertyVerdict("isometric-conjugacy-invariance", count, tuple(failures), seed)


def _suite_function_agreement(seed: int, count: int) -> PropertyVerdict:
    rng = random.Random(seed)
    failures = []
    for idx in range(count):
        space = randgen.random_finite_space(rng, rng.randint(2, 6))
        relation = randgen.random_function_relation(rng, space)
        fmap = [row.index(True) for row in relation.adjacency]
        triples = randgen.random_spaced_triples(rng, relation, rng.randint(1, 3), rng.randint(1, 3))
        spec = Specification.build(relation, triples)
        y = rng.randrange(space.n)
        eps = randgen.random_fraction(rng, Fraction(0), space.diameter())
        plain = check_trace(relation, spec, y, eps, "plain")
        haus = check_trace(relation, spec, y, eps, "hausdorff")
        for pe, he in zip(plain.entries, haus.entries):
            fy, fx = y, spec.segments[pe.segment - 1].base
            for _ in range(pe.step):
                fy, fx = fmap[fy], fmap[fx]
            classical = space.d(fy, fx)
            if pe.distance != classical or he.distance != classical:
                failures.append(f"instance {idx}: relation trace deviates from the function trace")
                break
    return PropertyVerdict("function-relation-agreement", count, tuple(failures), seed)


def implication_suite(seed: int, count: int) -> list[PropertyVerdict]:
    """Run the four per-instance implications on seeded random systems.

    Every failure message carries enough to reproduce: the suite seed is
    echoed in each verdict and instances are generated deterministically.
    """
    return [
        _suite_hausdorff_implies_plain(seed, count),
        _suite_initial_round_trip(seed + 1, count),
        _suite_conjugacy_invariance(seed + 2, count),
        _suite_function_agreement(seed + 3, count),
    ]
