"""Theory-of-mind tasks as data-driven episodes over the engine."""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .belief_base import BeliefBase, Literal
from .errors import InvalidScenario, OslError, ParseError, UnknownLabel
from .manager import assert_belief
from .product import carrier_from_dict

SOFT_TIME_LIMIT_US = 1000.0


@dataclass(frozen=True)
class Expectation:
    kind: str  # "positive" | "zero" | "exact"
    value: Optional[float] = None
    tol: float = 1e-9

    def check(self, cred: float) -> bool:
        if self.kind == "positive":
            return cred > 0
        if self.kind == "zero":
            return cred == 0
        return abs(cred - self.value) <= self.tol

    def to_json(self):
        if self.kind == "exact":
            return {"exact": self.value, "tol": self.tol}
        return self.kind


@dataclass(frozen=True)
class Assert:
    literal: Literal
    observer: str
    situation: str
    weight: float
    comment: Optional[str] = None


@dataclass(frozen=True)
class Query:
    literal: Literal
    observer: str
    situation: str
    expect: Expectation
    comment: Optional[str] = None


Step = Union[Assert, Query]


@dataclass(frozen=True)
class Scenario:
    name: str
    carrier_spec: dict
    steps: tuple[Step, ...]
    comment: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"name": self.name}
        if self.comment is not None:
            out["comment"] = self.comment
        out["carrier"] = self.carrier_spec
        out["steps"] = [_step_to_dict(s) for s in self.steps]
        return out


@dataclass
class QueryOutcome:
    step: int
    literal: Literal
    observer: str
    situation: str
    expect: Expectation
    value: float
    ok: bool


@dataclass
class ScenarioResult:
    name: str
    passed: bool
    confidence: float
    outcomes: list[QueryOutcome] = field(default_factory=list)
    engine_time_us: float = 0.0


def _step_to_dict(step: Step) -> dict:
    d = {"op": "assert" if isinstance(step, Assert) else "query",
         "atom": step.literal.atom, "negated": step.literal.negated,
         "observer": step.observer, "situation": step.situation}
    if isinstance(step, Assert):
        d["weight"] = step.weight
    else:
        d["expect"] = step.expect.to_json()
    if step.comment is not None:
        d["comment"] = step.comment
    return d


def _parse_expect(raw, i) -> Expectation:
    if raw in ("positive", "zero"):
        return Expectation(raw)
    if isinstance(raw, dict) and "exact" in raw:
        return Expectation("exact", float(raw["exact"]), float(raw.get("tol", 1e-9)))
    raise InvalidScenario(f"bad expectation {raw!r}", i)


def _parse_step(raw, i) -> Step:
    if not isinstance(raw, dict):
        raise InvalidScenario("step must be an object", i)
    try:
        lit = Literal(raw["atom"], bool(raw.get("negated", False)))
        obs, sit = raw["observer"], raw["situation"]
        op = raw["op"]
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidScenario(f"malformed step ({exc})", i) from None
    comment = raw.get("comment")
    if op == "assert":
        if "weight" not in raw:
            raise InvalidScenario("assert needs a weight", i)
        return Assert(lit, obs, sit, float(raw["weight"]), comment)
    if op == "query":
        return Query(lit, obs, sit, _parse_expect(raw.get("expect"), i), comment)
    raise InvalidScenario(f"unknown op {op!r}", i)


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict):
        raise InvalidScenario("scenario must be an object")
    for key in ("name", "carrier", "steps"):
        if key not in data:
            raise InvalidScenario(f"scenario needs {key!r}")
    steps = tuple(_parse_step(s, i) for i, s in enumerate(data["steps"]))
    sc = Scenario(data["name"], data["carrier"], steps, data.get("comment"))
    validate_scenario(sc)
    return sc


def validate_scenario(sc: Scenario):
    """Labels must resolve, weights must be valid, and at least one query is needed."""
    if not sc.steps:
        raise InvalidScenario(f"{sc.name}: no steps")
    if not any(isinstance(s, Query) for s in sc.steps):
        raise InvalidScenario(f"{sc.name}: no query step")
    try:
        carrier = carrier_from_dict(sc.carrier_spec)
    except OslError as exc:
        raise InvalidScenario(f"{sc.name}: bad carrier ({exc})") from None
    for i, s in enumerate(sc.steps):
        try:
            carrier.node_of(s.observer, s.situation)
        except UnknownLabel as exc:
            raise InvalidScenario(f"{sc.name}: {exc}", i) from None
        if isinstance(s, Assert) and not 0.0 <= s.weight <= 1.0:
            raise InvalidScenario(f"{sc.name}: weight {s.weight} not in [0, 1]", i)


def _decode(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def loads_scenarios(text: str) -> list[Scenario]:
    data = _decode(text)
    if isinstance(data, dict):
        data = [data]
    return [scenario_from_dict(d) for d in data]


def load_scenarios(path) -> list[Scenario]:
    """Read one JSON file (an object or a list) or every ``*.json`` in a directory."""
    path = Path(path)
    if path.is_dir():
        out = []
        for p in sorted(path.glob("*.json")):
            out.extend(loads_scenarios(p.read_text(encoding="utf-8")))
        return out
    return loads_scenarios(path.read_text(encoding="utf-8"))


def dumps_scenarios(scenarios) -> str:
    return json.dumps([s.to_dict() for s in scenarios], indent=1, ensure_ascii=False)


def save_scenarios(scenarios, path):
    Path(path).write_text(dumps_scenarios(scenarios) + "\n", encoding="utf-8")


def builtin_scenarios() -> list[Scenario]:
    """The seven canonical tasks, in table order."""
    text = resources.files("osl").joinpath("data/tom_scenarios.json").read_text(encoding="utf-8")
    return loads_scenarios(text)


_warmed = False


def _warm_kernels():
    """One throwaway update so JIT loading stays out of the timed region."""
    global _warmed
    if _warmed:
        return
    carrier = carrier_from_dict({"observers": {"elements": ["a", "b"], "covers": [["a", "b"]]},
                                 "situations": {"elements": ["x"], "covers": []}})
    base = BeliefBase(carrier)
    assert_belief(base, Literal("p"), 0, 0.5)
    assert_belief(base, Literal("p", True), 1, 0.5)
    _warmed = True


def run_scenario(sc: Scenario, warn_slow: bool = True) -> ScenarioResult:
    """Replay the steps on a private base and score the queries.

    Confidence is the smallest credibility returned by a positive-expectation
    query (1.0 when there is none).
    """
    validate_scenario(sc)
    carrier = carrier_from_dict(sc.carrier_spec)
    base = BeliefBase(carrier)
    _warm_kernels()
    outcomes = []
    t0 = time.perf_counter_ns()
    for i, step in enumerate(sc.steps):
        node = carrier.node_of(step.observer, step.situation)
        if isinstance(step, Assert):
            assert_belief(base, step.literal, node, step.weight)
        else:
            v = base.cred(step.literal, node)
            outcomes.append(QueryOutcome(i, step.literal, step.observer, step.situation,
                                         step.expect, v, step.expect.check(v)))
    elapsed = (time.perf_counter_ns() - t0) / 1000.0
    positives = [o.value for o in outcomes if o.expect.kind == "positive"]
    confidence = min(positives) if positives else 1.0
    if warn_slow and elapsed > SOFT_TIME_LIMIT_US:
        warnings.warn(f"scenario {sc.name!r} took {elapsed:.0f} us of engine time "
                      f"(soft target {SOFT_TIME_LIMIT_US:.0f} us)", RuntimeWarning, stacklevel=2)
    return ScenarioResult(sc.name, all(o.ok for o in outcomes), confidence, outcomes, elapsed)


def format_table(results) -> str:
    lines = [f"{'Scenario':<32} {'OSL result':<10} {'Expected':<8} Confidence"]
    for r in results:
        lines.append(f"{r.name:<32} {'PASS' if r.passed else 'FAIL':<10} {'PASS':<8} {r.confidence:.3f}")
    return "\n".join(lines)
