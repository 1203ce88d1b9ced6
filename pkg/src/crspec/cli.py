"""Scenario runner: execute commands, render reports, check expectations.

Reports come in two forms: a human-readable text block per command on
stdout, and (with ``--emit``) a JSON document holding every exact distance
needed to replay each verdict through the library.  Rationals are printed
as ``p/q`` strings (plain integers when the denominator is 1); runs are
byte-identical for identical scenario text and seed.

Exit codes: 0 when every ``expect`` clause holds and no command errored,
1 on a missed expectation or a command error, 2 on parse/validation
problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import CRSpecError, ScenarioError
from .mahavier import mixing_index
from .scenario import Command, Scenario, parse_scenario
from .specifications import (
    InitialSpecification,
    NoTracer,
    TraceReport,
    check_initial_trace,
    check_trace,
    find_initial_tracer,
    find_tracer,
)
from .verdicts import (
    Inconclusive,
    Refutation,
    certify_common_image,
    certify_eventual_hausdorff,
    certify_full_image,
    certify_trivial_fiber,
    implication_suite,
    refute_property,
)


def fmt(value) -> str:
    """Exact rendering: rationals as p/q, everything else via str."""
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return str(value)


@dataclass
class CommandResult:
    line: int
    kind: str
    outcome: str
    headline: str
    detail: list[str]
    payload: dict
    expect: str | None
    error: str | None = None

    @property
    def met(self) -> bool | None:
        if self.error is not None:
            return False
        if self.expect is None:
            return None
        return self.outcome == self.expect


@dataclass
class Report:
    scenario: str
    seed: int
    results: list[CommandResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.met is not False for r in self.results)


def _report_payload(report: TraceReport) -> dict:
    return {
        "mode": report.mode,
        "eps": fmt(report.eps),
        "verdict": "pass" if report.passed else "fail",
        "entries": [
            {
                "segment": e.segment,
                "step": e.step,
                "power": e.tracer_power,
                "distance": fmt(e.distance),
            }
            for e in report.entries
        ],
        "worst": {
            "segment": report.worst.segment,
            "step": report.worst.step,
            "distance": fmt(report.worst.distance),
        },
    }


def _report_lines(report: TraceReport) -> list[str]:
    lines = [
        f"  (i={e.segment}, j={e.step}) power {e.tracer_power}: distance {fmt(e.distance)}"
        for e in report.entries
    ]
    w = report.worst
    lines.append(f"  worst: {fmt(w.distance)} at (i={w.segment}, j={w.step})")
    return lines


def _no_tracer_payload(outcome: NoTracer) -> list[dict]:
    return [
        {
            "region": str(f.region),
            "representative": fmt(f.representative),
            "report": _report_payload(f.report),
        }
        for f in outcome.failures
    ]


def _run_trace(scenario: Scenario, command: Command) -> CommandResult:
    params = command.params
    spec = scenario.specs[params["spec"]]
    initial = isinstance(spec, InitialSpecification)
    eps, mode = params["eps"], params["mode"]
    relation = scenario.relation
    label = f"trace {params['spec']} eps {fmt(eps)} mode {mode}"
    if params["y"] is not None:
        checker = check_initial_trace if initial else check_trace
        report = checker(relation, spec, params["y"], eps, mode)
        outcome = "pass" if report.passed else "fail"
        return CommandResult(
            command.line,
            "trace",
            outcome,
            f"{label} y {fmt(params['y'])}: {outcome}",
            _report_lines(report),
            {"command": label, "y": fmt(params["y"]), **_report_payload(report)},
            command.expect,
        )
    finder = find_initial_tracer if initial else find_tracer
    result = finder(relation, spec, eps, mode)
    if isinstance(result, NoTracer):
        detail = []
        for failure in result.failures:
            worst = failure.report.worst
            detail.append(
                f"  region {failure.region} (rep {fmt(failure.representative)}): "
                f"worst {fmt(worst.distance)} at (i={worst.segment}, j={worst.step})"
            )
        return CommandResult(
            command.line,
            "trace",
            "notracer",
            f"{label}: no tracer (all {len(result.failures)} regions fail)",
            detail,
            {"command": label, "verdict": "notracer", "regions": _no_tracer_payload(result)},
            command.expect,
        )
    return CommandResult(
        command.line,
        "trace",
        "witness",
        f"{label}: witness y = {fmt(result.y)} in region {result.region}",
        _report_lines(result.report),
        {
            "command": label,
            "verdict": "witness",
            "y": fmt(result.y),
            "region": str(result.region),
            "report": _report_payload(result.report),
        },
        command.expect,
    )


def _certificate_payload(cert) -> dict:
    payload = {"kind": cert.kind}
    if cert.n0 is not None:
        payload["n0"] = cert.n0
    if cert.eps is not None:
        payload["eps"] = fmt(cert.eps)
    if cert.kind == "common-image":
        payload["evidence"] = [
            {"pair": [str(la), str(lb)], "common_point": fmt(pt)}
            for (la, lb), pt in cert.evidence
        ]
    elif cert.kind == "full-image":
        payload["evidence"] = [
            {"region": str(label), "image": str(image)} for label, image in cert.evidence
        ]
    elif cert.kind in ("eventual-hausdorff", "eventual-equal"):
        payload["evidence"] = [
            {"pair": [str(la), str(lb)], "worst": fmt(worst)}
            for (la, lb), worst in cert.evidence
        ]
    else:
        payload["evidence"] = {"x0": fmt(cert.evidence[0]), "fiber": str(cert.evidence[1])}
    return payload


def _run_certify(scenario: Scenario, command: Command) -> CommandResult:
    params = command.params
    condition = params["condition"]
    relation = scenario.relation
    if condition == "common-image":
        cert = certify_common_image(relation, params["n0_max"])
        label = f"certify common-image n0max {params['n0_max']}"
    elif condition == "full-image":
        cert = certify_full_image(relation, params["n0_max"])
        label = f"certify full-image n0max {params['n0_max']}"
    elif condition == "eventual-hausdorff":
        cert = certify_eventual_hausdorff(relation, params["eps"], params["n0_max"])
        label = f"certify eventual-hausdorff eps {fmt(params['eps'])} n0max {params['n0_max']}"
    else:
        cert = certify_trivial_fiber(relation)
        label = "certify trivial-fiber"
    if cert is None:
        return CommandResult(
            command.line,
            "certify",
            "notfound",
            f"{label}: not found",
            [],
            {"command": label, "verdict": "notfound"},
            command.expect,
        )
    detail = [f"  {cert}"]
    if cert.kind == "trivial-fiber":
        detail.append(f"  x0 = {fmt(cert.evidence[0])}")
    return CommandResult(
        command.line,
        "certify",
        "certificate",
        f"{label}: {cert}",
        detail,
        {"command": label, "verdict": "certificate", "certificate": _certificate_payload(cert)},
        command.expect,
    )


def _run_refute(scenario: Scenario, command: Command) -> CommandResult:
    params = command.params
    lo, hi = params["range"]
    label = f"refute {params['property']} eps {fmt(params['eps'])} over {lo}..{hi}"
    result = refute_property(
        scenario.relation,
        params["property"],
        params["eps"],
        params["template"],
        range(lo, hi + 1),
    )
    if isinstance(result, Inconclusive):
        return CommandResult(
            command.line,
            "refute",
            "inconclusive",
            f"{label}: inconclusive (tracer at value {result.value}: y = {fmt(result.witness.y)})",
            _report_lines(result.witness.report),
            {
                "command": label,
                "verdict": "inconclusive",
                "value": result.value,
                "witness": {
                    "y": fmt(result.witness.y),
                    "report": _report_payload(result.witness.report),
                },
            },
            command.expect,
        )
    detail = []
    first = result.instantiations[0]
    for failure in first.outcome.failures:
        worst = failure.report.worst
        detail.append(
            f"  value {first.value}, region {failure.region}: "
            f"worst {fmt(worst.distance)} at (i={worst.segment}, j={worst.step})"
        )
    if len(result.instantiations) > 1:
        detail.append(f"  ... and {len(result.instantiations) - 1} more instantiations, all refuted")
    payload = {
        "command": label,
        "verdict": "refutation",
        "instantiations": [
            {"value": inst.value, "regions": _no_tracer_payload(inst.outcome)}
            for inst in result.instantiations
        ],
    }
    return CommandResult(
        command.line,
        "refute",
        "refutation",
        f"{label}: refuted for every tested value",
        detail,
        payload,
        command.expect,
    )


def _word_counts(scenario: Scenario, max_len: int) -> tuple[list[int], list[int]]:
    """Enumerated word counts next to matrix-power path counts.

    The number of admissible words with L symbols equals the sum of all
    entries of the L-1st power of the 0/1 adjacency matrix.
    """
    adjacency = scenario.relation.adjacency
    n = len(adjacency)
    counts = [len(scenario.shift_space.admissible_words(k)) for k in range(1, max_len + 1)]
    matrix = [[1 if adjacency[i][j] else 0 for j in range(n)] for i in range(n)]
    power = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    expected = []
    for _ in range(max_len):
        expected.append(sum(sum(row) for row in power))
        power = [
            [sum(power[i][k] * matrix[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return counts, expected


def _run_mahavier(scenario: Scenario, command: Command) -> CommandResult:
    params = command.params
    sub = params["sub"]
    space = scenario.shift_space
    if sub == "words":
        counts, expected = _word_counts(scenario, params["max_len"])
        ok = counts == expected
        label = f"mahavier words maxlen {params['max_len']}"
        return CommandResult(
            command.line,
            "mahavier",
            "pass" if ok else "fail",
            f"{label}: counts {counts} {'match' if ok else 'DIFFER FROM'} matrix powers",
            [f"  enumerated: {counts}", f"  matrix powers: {expected}"],
            {"command": label, "verdict": "pass" if ok else "fail", "counts": counts, "matrix_counts": expected},
            command.expect,
        )
    if sub == "mixing":
        index = mixing_index(space.transition_matrix(), params["t_max"])
        label = f"mahavier mixing tmax {params['t_max']}"
        outcome = "pass" if index is not None else "fail"
        text = f"primitive, index {index}" if index is not None else f"not primitive within {params['t_max']}"
        return CommandResult(
            command.line,
            "mahavier",
            outcome,
            f"{label}: {text}",
            [],
            {"command": label, "verdict": outcome, "index": index},
            command.expect,
        )
    if sub == "surjectivity":
        p1, p2 = scenario.relation.project(1), scenario.relation.project(2)
        full = scenario.relation.space.full()
        ok = p1 == full and p2 == full
        label = "mahavier surjectivity"
        return CommandResult(
            command.line,
            "mahavier",
            "pass" if ok else "fail",
            f"{label}: p1 {'full' if p1 == full else str(p1)}, p2 {'full' if p2 == full else str(p2)}",
            [],
            {"command": label, "verdict": "pass" if ok else "fail", "p1_full": p1 == full, "p2_full": p2 == full},
            command.expect,
        )
    # sub == "trace"
    spec = scenario.mspecs[params["mspec"]]
    y = scenario.sequences[params["y"]]
    report = space.trace_check(spec, y, params["eps"])
    outcome = "pass" if report.passed else "fail"
    label = f"mahavier trace {params['mspec']} y {params['y']} eps {fmt(params['eps'])}"
    return CommandResult(
        command.line,
        "mahavier",
        outcome,
        f"{label}: {outcome}",
        _report_lines(report),
        {"command": label, **_report_payload(report)},
        command.expect,
    )


def _run_suite(scenario: Scenario, command: Command, default_seed: int) -> CommandResult:
    params = command.params
    seed = params["seed"] if params["seed"] is not None else default_seed
    verdicts = implication_suite(seed, params["count"])
    ok = all(v.ok for v in verdicts)
    label = f"suite seed {seed} count {params['count']}"
    detail = [
        f"  {v.name}: {v.instances} instances, {len(v.failures)} failures" for v in verdicts
    ]
    for v in verdicts:
        detail.extend(f"    {msg}" for msg in v.failures)
    return CommandResult(
        command.line,
        "suite",
        "pass" if ok else "fail",
        f"{label}: {'all implications hold' if ok else 'FAILURES'}",
        detail,
        {
            "command": label,
            "verdict": "pass" if ok else "fail",
            "seed": seed,
            "results": [
                {"name": v.name, "instances": v.instances, "failures": list(v.failures)}
                for v in verdicts
            ],
        },
        command.expect,
    )


def run(scenario: Scenario, seed: int = 0, name: str = "<scenario>") -> Report:
    """Execute every command in order; never raises on domain errors."""
    report = Report(name, seed)
    runners = {
        "trace": _run_trace,
        "certify": _run_certify,
        "refute": _run_refute,
        "mahavier": _run_mahavier,
    }
    for command in scenario.commands:
        try:
            if command.kind == "suite":
                result = _run_suite(scenario, command, seed)
            else:
                result = runners[command.kind](scenario, command)
        except CRSpecError as exc:
            result = CommandResult(
                command.line,
                command.kind,
                "error",
                f"{command.kind} (line {command.line}): error: {exc}",
                [],
                {"command": command.kind, "verdict": "error", "message": str(exc)},
                command.expect,
                error=str(exc),
            )
        report.results.append(result)
    return report


def render_human(report: Report) -> str:
    lines = [f"scenario {report.scenario} (seed {report.seed})", ""]
    for result in report.results:
        lines.append(f"[line {result.line}] {result.headline}")
        lines.extend(result.detail)
        if result.expect is not None:
            status = "met" if result.met else "NOT MET"
            lines.append(f"  expect {result.expect}: {status}")
        lines.append("")
    lines.append("all expectations met" if report.ok else "EXPECTATIONS FAILED")
    return "\n".join(lines) + "\n"


def render_json(report: Report) -> str:
    doc = {
        "scenario": report.scenario,
        "seed": report.seed,
        "ok": report.ok,
        "commands": [
            {
                "line": r.line,
                "kind": r.kind,
                "outcome": r.outcome,
                "expect": r.expect,
                "met": r.met,
                **({"error": r.error} if r.error else {}),
                "data": r.payload,
            }
            for r in report.results
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="crspec",
        description="Run a closed-relation dynamics scenario file and check its expectations.",
    )
    parser.add_argument("--scenario", required=True, type=Path, help="scenario file to run")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites")
    parser.add_argument("--emit", type=Path, help="write the machine-readable JSON report here")
    parser.add_argument("--quiet", action="store_true", help="suppress the human-readable report")
    args = parser.parse_args(argv)

    try:
        text = args.scenario.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read scenario: {exc}", file=sys.stderr)
        return 2
    try:
        scenario = parse_scenario(text)
    except ScenarioError as exc:
        print(f"{args.scenario}:{exc}", file=sys.stderr)
        return 2

    report = run(scenario, seed=args.seed, name=args.scenario.name)
    if not args.quiet:
        sys.stdout.write(render_human(report))
    if args.emit is not None:
        args.emit.write_text(render_json(report), encoding="utf-8")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
