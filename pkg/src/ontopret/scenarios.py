"""Kitting and poker scenario bundles, trace files and run reports."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import TraceError
from .interpret import CueRule, ExpectationProfile, ObservationEvent, TaskSpec, run_trace
from .kb import OP, RDFS_LABEL, ClassAssertion, DataProp, KnowledgeBase, Literal, ObjectProp
from .query import run_cq
from .reasoner import check_consistency
from .schema import build_tbox
from .turtle import dumps_kb

DATA_DIR = Path(__file__).parent / "data"

# Demo thresholds for the poker cues; not empirical claims.
FAST_BET_SECONDS = "0.8"

POKER_ACTIONS = frozenset({"fold", "call", "raise", "bet", "check"})


@dataclass
class ScenarioBundle:
    kb: KnowledgeBase
    profile: ExpectationProfile
    name: str


def _abox(kb, triples):
    for s, p, o in triples:
        if p == "a":
            kb.add_assertion(ClassAssertion(s, o))
        elif isinstance(o, str):
            kb.add_assertion(DataProp(s, p, Literal(o)))
        else:
            kb.add_assertion(ObjectProp(s, p, o))


def kitting_abox(kb: KnowledgeBase):
    chain = [OP.RetrieveItemA, OP.RetrieveItemB, OP.PlaceKitOnTable]
    triples = [
        (OP.KittingScenario, "a", OP.Scenario),
        (OP.KittingScenario, RDFS_LABEL, "Working in collaboration to correctly complete an assignment"),
        (OP.AssemblyLineContext, "a", OP.Context),
        (OP.AssemblyLineContext, RDFS_LABEL, "Kitting task in an assembly line"),
        (OP.AssemblyLineContext, OP.encapsulates, OP.KittingScenario),
        (OP.ManufacturingDomain, "a", OP.Domain),
        (OP.ManufacturingDomain, RDFS_LABEL, "Manufacturing"),
        (OP.ManufacturingDomain, OP.conceptualizes, OP.KittingScenario),
        (OP.CompleteKitGoal, "a", OP.Goal),
        (OP.CompleteKitGoal, RDFS_LABEL, "Correctly complete the kitting task"),
        (OP.KittingScenario, OP.hasGoal, OP.CompleteKitGoal),
        (OP.RetrieveItemA, RDFS_LABEL, "Retrieve assigned item A"),
        (OP.RetrieveItemB, RDFS_LABEL, "Retrieve assigned item B"),
        (OP.PlaceKitOnTable, RDFS_LABEL, "Place the items on the table"),
        (OP.RetrieveItemA, OP.hasNextStep, OP.RetrieveItemB),
        (OP.RetrieveItemB, OP.hasNextStep, OP.PlaceKitOnTable),
        (OP.AssemblerRole, "a", OP.Role),
        (OP.AssemblerRole, RDFS_LABEL, "Assembler"),
        (OP.ObserverRole, "a", OP.Role),
        (OP.ObserverRole, RDFS_LABEL, "Observer (monitoring for deviations)"),
        (OP.KittingScenario, OP.providesRole, OP.AssemblerRole),
        (OP.KittingScenario, OP.providesRole, OP.ObserverRole),
        (OP.KittingExpectation, "a", OP.Expectation),
        (OP.KittingExpectation, RDFS_LABEL, "Agents must correctly follow the specific instructions of the kitting task"),
        (OP.AssemblerRole, OP.sets, OP.KittingExpectation),
        (OP.ObserverRole, OP.sets, OP.KittingExpectation),
        (OP.Human1, "a", OP.Actor),
        (OP.Human1, RDFS_LABEL, "Human assembler"),
        (OP.Robot1, "a", OP.Actor),
        (OP.Robot1, RDFS_LABEL, "Robot observer"),
        (OP.Human1, OP.performsRole, OP.AssemblerRole),
        (OP.Robot1, OP.performsRole, OP.ObserverRole),
    ]
    for task in chain:
        triples += [
            (task, "a", OP.Task),
            (OP.CompleteKitGoal, OP.achievedBy, task),
            (OP.AssemblerRole, OP.assignedTask, task),
            (OP.ObserverRole, OP.assignedTask, task),
        ]
    _abox(kb, triples)
    return chain


def build_kitting_scenario() -> ScenarioBundle:
    kb = build_tbox()
    chain = kitting_abox(kb)
    specs = {
        OP.RetrieveItemA: TaskSpec(frozenset({"pick"}), OP.BinA),
        OP.RetrieveItemB: TaskSpec(frozenset({"pick"}), OP.BinB),
        OP.PlaceKitOnTable: TaskSpec(frozenset({"place"}), OP.Table),
    }
    profile = ExpectationProfile(
        role=OP.AssemblerRole,
        expected_sequence=tuple(chain),
        task_specs=specs,
        scenario=OP.KittingScenario,
    )
    return ScenarioBundle(kb, profile, "kitting")


def poker_abox(kb: KnowledgeBase):
    _abox(kb, [
        (OP.PokerScenario, "a", OP.Scenario),
        (OP.PokerScenario, RDFS_LABEL, "Playing a card-based game"),
        (OP.PokerGameContext, "a", OP.Context),
        (OP.PokerGameContext, RDFS_LABEL, "A poker game"),
        (OP.PokerGameContext, OP.encapsulates, OP.PokerScenario),
        (OP.BettingGameDomain, "a", OP.Domain),
        (OP.BettingGameDomain, RDFS_LABEL, "A betting game"),
        (OP.BettingGameDomain, OP.conceptualizes, OP.PokerScenario),
        (OP.WinGameGoal, "a", OP.Goal),
        (OP.WinGameGoal, RDFS_LABEL, "Win the game and the pot of money"),
        (OP.PokerScenario, OP.hasGoal, OP.WinGameGoal),
        (OP.MakeDecisionTask, "a", OP.Task),
        (OP.MakeDecisionTask, RDFS_LABEL, "Make a choice to fold, call, or raise an opponent"),
        (OP.WinGameGoal, OP.achievedBy, OP.MakeDecisionTask),
        (OP.PlayerRole, "a", OP.Role),
        (OP.PlayerRole, RDFS_LABEL, "Player"),
        (OP.PokerScenario, OP.providesRole, OP.PlayerRole),
        (OP.PlayerRole, OP.assignedTask, OP.MakeDecisionTask),
        (OP.PokerExpectation, "a", OP.Expectation),
        (OP.PokerExpectation, RDFS_LABEL, "Players are trying to win the poker game; the player may be bluffing to cover a weak hand"),
        (OP.PlayerRole, OP.sets, OP.PokerExpectation),
        (OP.Machine1, "a", OP.Actor),
        (OP.Machine1, RDFS_LABEL, "Machine player"),
        (OP.HumanPlayer1, "a", OP.Actor),
        (OP.HumanPlayer1, RDFS_LABEL, "Human player"),
        (OP.Machine1, OP.performsRole, OP.PlayerRole),
        (OP.HumanPlayer1, OP.performsRole, OP.PlayerRole),
    ])


POKER_CUES = (
    CueRule("avoid-eye-contact", "eye_contact", "=", Literal("false", "boolean"), "avoid-eye-contact",
            indicates="opponent-weak"),
    CueRule("fast-bet", "response_time", "<", Literal(FAST_BET_SECONDS, "decimal"), "fast-bet",
            indicates="opponent-strong"),
)


def build_poker_scenario() -> ScenarioBundle:
    kb = build_tbox()
    poker_abox(kb)
    profile = ExpectationProfile(
        role=OP.PlayerRole,
        expected_sequence=(OP.MakeDecisionTask,),
        task_specs={OP.MakeDecisionTask: TaskSpec(POKER_ACTIONS)},
        deception_cues=POKER_CUES,
        scenario=OP.PokerScenario,
        cyclic=True,
    )
    return ScenarioBundle(kb, profile, "poker")


BUILDERS = {"kitting": build_kitting_scenario, "poker": build_poker_scenario}


def build_scenario(name: str) -> ScenarioBundle:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise TraceError(f"unknown scenario {name!r}; expected one of {sorted(BUILDERS)}") from None


# ---------------------------------------------------------------- trace files

_EVENT_KEYS = {"t", "actor", "action", "object", "features"}


def _feature_literal(key, value, where):
    if isinstance(value, bool):
        return Literal.of(value)
    if isinstance(value, (int, float)):
        if key == "response_time":
            return Literal.decimal(value)
        return Literal.of(value)
    if isinstance(value, str):
        return Literal(value)
    raise TraceError(f"{where}: feature {key!r} must be a number, boolean or string")


def parse_trace(data, kb: KnowledgeBase):
    """Validate a decoded trace document; returns (scenario name, events)."""
    if not isinstance(data, dict):
        raise TraceError("trace must be a JSON object")
    extra = set(data) - {"scenario", "events"}
    if extra:
        raise TraceError("unknown top-level keys: " + ", ".join(sorted(extra)))
    if not isinstance(data.get("scenario"), str):
        raise TraceError("'scenario' must be a string")
    if not isinstance(data.get("events"), list):
        raise TraceError("'events' must be a list")
    events = []
    last = None
    for i, ev in enumerate(data["events"]):
        where = f"event {i}"
        if not isinstance(ev, dict):
            raise TraceError(f"{where}: must be an object")
        if set(ev) != _EVENT_KEYS:
            diff = sorted(set(ev) ^ _EVENT_KEYS)
            raise TraceError(f"{where}: keys must be exactly {sorted(_EVENT_KEYS)} (offending: {diff})")
        t = ev["t"]
        if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
            raise TraceError(f"{where}: 't' must be a non-negative number")
        if last is not None and t < last:
            raise TraceError(f"{where}: timestamps must be non-decreasing")
        last = t
        if not isinstance(ev["actor"], str) or not isinstance(ev["action"], str):
            raise TraceError(f"{where}: 'actor' and 'action' must be strings")
        if ev["object"] is not None and not isinstance(ev["object"], str):
            raise TraceError(f"{where}: 'object' must be a string or null")
        if not isinstance(ev["features"], dict):
            raise TraceError(f"{where}: 'features' must be an object")
        features = {k: _feature_literal(k, v, where) for k, v in ev["features"].items()}
        events.append(ObservationEvent(
            timestamp=float(t),
            actor=kb.expand(ev["actor"]),
            action=ev["action"],
            object=kb.expand(ev["object"]) if ev["object"] is not None else None,
            features=features,
        ))
    return data["scenario"], events


def load_trace(path, kb: KnowledgeBase):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TraceError(f"{path}: invalid JSON: {exc}") from None
    return parse_trace(data, kb)


# ---------------------------------------------------------------- reports


def tbox_hash(kb: KnowledgeBase) -> str:
    return hashlib.sha256(dumps_kb(kb, abox=False).encode("utf-8")).hexdigest()


def _c(kb, iri):
    return None if iri is None else kb.compact(iri)


def verdict_summary(kb: KnowledgeBase, cb) -> dict:
    ev = cb.event
    return {
        "index": cb.event_index,
        "t": ev.timestamp,
        "actor": _c(kb, ev.actor),
        "action": ev.action,
        "object": _c(kb, ev.object),
        "behavior": _c(kb, cb.behavior),
        "behavior_class": _c(kb, cb.behavior_class),
        "gems_subtype": _c(kb, cb.gems_subtype),
        "interpretation": _c(kb, cb.interpretation),
        "interpretation_class": _c(kb, cb.interpretation_class),
        "matched_task": _c(kb, cb.matched_task),
        "expected_task": _c(kb, cb.expected_task),
        "skipped": [_c(kb, t) for t in cb.skipped],
        "fired_cues": list(cb.fired_cues),
        "flags": list(cb.flags),
    }


def consistency_summary(kb: KnowledgeBase, report) -> dict:
    return {
        "violations": [
            {"individual": _c(kb, v.individual), "class_a": _c(kb, v.class_a), "class_b": _c(kb, v.class_b),
             "derivation_a": [str(s) for s in v.derivation_a.steps],
             "derivation_b": [str(s) for s in v.derivation_b.steps]}
            for v in report.violations
        ],
        "incomplete_witnesses": [
            {"individual": _c(kb, w.individual), "axiom": str(w.axiom)} for w in report.incomplete_witnesses
        ],
    }


@dataclass
class RunReport:
    scenario: str
    verdicts: list
    counts: dict
    consistency: object
    cq_answers: dict
    kb: KnowledgeBase

    def to_dict(self) -> dict:
        return {
            "engine_version": __version__,
            "tbox_sha256": tbox_hash(self.kb),
            "scenario": self.scenario,
            "verdicts": [verdict_summary(self.kb, cb) for cb in self.verdicts],
            "counts": self.counts,
            "consistency": consistency_summary(self.kb, self.consistency),
            "cq_answers": {k: v.to_dict(self.kb.prefixes) for k, v in sorted(self.cq_answers.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def count_verdicts(kb: KnowledgeBase, verdicts) -> dict:
    behavior = Counter(kb.compact(cb.behavior_class) for cb in verdicts)
    gems = Counter(kb.compact(cb.gems_subtype) for cb in verdicts if cb.gems_subtype is not None)
    interp = Counter(kb.compact(cb.interpretation_class) for cb in verdicts)
    return {
        "behavior_class": dict(sorted(behavior.items())),
        "gems_subtype": dict(sorted(gems.items())),
        "interpretation_class": dict(sorted(interp.items())),
        "events": len(verdicts),
    }


def simulate(bundle: ScenarioBundle, events, cqs=()) -> RunReport:
    kb, verdicts = run_trace(bundle.kb, bundle.profile, events)
    counts = count_verdicts(kb, verdicts)
    answers = {cq.upper(): run_cq(kb, cq) for cq in cqs}
    return RunReport(
        scenario=bundle.name,
        verdicts=verdicts,
        counts=counts,
        consistency=check_consistency(kb),
        cq_answers=answers,
        kb=kb,
    )
