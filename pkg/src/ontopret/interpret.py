"""Classify observed behavior events against role expectations.

Each event is checked, in order, against the profile's deception cues, the
current expected step, and later expected steps.  The verdicts are written
into a knowledge base and the reasoner infers the interpretation classes that
the TBox's universal restrictions dictate.
"""

from __future__ import annotations

import dataclasses
import operator
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from .errors import InvariantBreach, NotADeviation, OntoPretError, TraceError, UnknownActor
from .kb import OP, ClassAssertion, DataProp, Iri, KnowledgeBase, Literal, ObjectProp
from .reasoner import materialize
from .schema import task_chain

TASK_ORIENTED = OP.TaskOriented
DEVIATION = OP.Deviation
DECEPTION = OP.Deception
CONFIRMATION = OP.Confirmation
CONTRADICTION = OP.Contradiction

RECOGNIZED_FEATURES = frozenset({"response_time", "eye_contact", "declared_intent", "hypothesis"})
DEFAULT_HYPOTHESIS = "opponent-weak"

_OPS = {
    "=": operator.eq, "==": operator.eq,
    "!=": operator.ne, "≠": operator.ne,
    "<": operator.lt, ">": operator.gt,
    "<=": operator.le, "≤": operator.le,
    ">=": operator.ge, "≥": operator.ge,
}


def compare(left: Literal, op: str, right: Literal) -> bool:
    """Typed comparison; mismatched datatypes never compare true."""
    fn = _OPS[op]
    if left.is_numeric and right.is_numeric:
        return fn(Decimal(left.lexical), Decimal(right.lexical))
    if left.datatype != right.datatype:
        return False
    if left.datatype == "boolean" and fn not in (operator.eq, operator.ne):
        return False
    return fn(left.lexical, right.lexical)


@dataclass(frozen=True)
class CueRule:
    id: str
    feature: str
    op: str
    threshold: Literal
    label: str
    indicates: Optional[str] = None

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")

    def fires(self, features: dict) -> bool:
        value = features.get(self.feature)
        if value is None:
            return False
        return compare(value, self.op, self.threshold)


@dataclass(frozen=True)
class TaskSpec:
    """Observable signature of a task: accepted verbs and, optionally, the object acted on."""

    actions: frozenset
    object: Optional[Iri] = None

    def matches(self, event: "ObservationEvent") -> bool:
        if event.action not in self.actions:
            return False
        return self.object is None or event.object == self.object


@dataclass(frozen=True)
class ExpectationProfile:
    role: Iri
    expected_sequence: tuple
    task_specs: dict
    deception_cues: tuple = ()
    scenario: Optional[Iri] = None
    hypothesis: str = DEFAULT_HYPOTHESIS
    cyclic: bool = False
    feature_keys: frozenset = RECOGNIZED_FEATURES

    def __post_init__(self):
        seq = tuple(self.expected_sequence)
        object.__setattr__(self, "expected_sequence", seq)
        object.__setattr__(self, "deception_cues", tuple(self.deception_cues))
        if len(set(seq)) != len(seq):
            raise ValueError("expected sequence has duplicate tasks")
        missing = [t for t in seq if t not in self.task_specs]
        if missing:
            raise ValueError("no task spec for " + ", ".join(t.local for t in missing))
        for cue in self.deception_cues:
            if cue.feature not in self.feature_keys:
                raise ValueError(f"cue {cue.id!r} references undeclared feature {cue.feature!r}")

    def check_against(self, kb: KnowledgeBase) -> bool:
        """True iff the expected sequence is the hasNextStep chain of the role's assigned tasks."""
        return task_chain(kb, kb.objects(self.role, OP.assignedTask)) == list(self.expected_sequence)


@dataclass(frozen=True)
class ObservationEvent:
    timestamp: float
    actor: Iri
    action: str
    object: Optional[Iri] = None
    features: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.timestamp < 0:
            raise TraceError(f"negative timestamp {self.timestamp}")


@dataclass(frozen=True)
class ClassifiedBehavior:
    behavior: Iri
    behavior_class: Iri
    interpretation: Iri
    interpretation_class: Iri
    event: ObservationEvent
    event_index: int
    gems_subtype: Optional[Iri] = None
    matched_task: Optional[Iri] = None
    expected_task: Optional[Iri] = None
    skipped: tuple = ()
    fired_cues: tuple = ()
    cue_labels: tuple = ()
    flags: tuple = ()


@dataclass(frozen=True)
class SequenceState:
    profile: ExpectationProfile
    actors: frozenset
    cursor: int = 0
    history: tuple = ()
    hypothesis: str = DEFAULT_HYPOTHESIS
    next_index: int = 0

    @classmethod
    def start(cls, profile: ExpectationProfile, kb: KnowledgeBase) -> "SequenceState":
        actors = frozenset(kb.subjects(OP.performsRole, profile.role))
        prefix = f"{profile.scenario.value}_b" if profile.scenario else None
        taken = -1
        if prefix:
            for x in kb.individuals():
                tail = x.value[len(prefix):] if x.value.startswith(prefix) else ""
                if tail.isdigit():
                    taken = max(taken, int(tail))
        return cls(profile=profile, actors=actors, hypothesis=profile.hypothesis, next_index=taken + 1)


def _mint(profile: ExpectationProfile, kind: str, k: int) -> Iri:
    base = profile.scenario.value if profile.scenario else OP.term("trace").value
    return Iri(f"{base}_{kind}{k}")


def classify_event(state: SequenceState, event: ObservationEvent):
    """Verdict for one event and the successor state."""
    profile = state.profile
    if event.actor not in state.actors:
        raise UnknownActor(f"{event.actor} does not perform {profile.role.local}")
    seq = profile.expected_sequence
    cursor = state.cursor
    if profile.cyclic and cursor == len(seq):
        cursor = 0
    hypothesis = state.hypothesis
    h = event.features.get("hypothesis")
    if h is not None:
        hypothesis = h.lexical

    expected = seq[cursor] if cursor < len(seq) else None
    match = next((k for k in range(cursor, len(seq)) if profile.task_specs[seq[k]].matches(event)), None)
    fired = [c for c in profile.deception_cues if c.fires(event.features)]
    skipped = ()
    flags = []
    matched = None

    if fired:
        cls = DECEPTION
        agrees = any(c.indicates == hypothesis for c in fired)
        interp_cls = CONFIRMATION if agrees else CONTRADICTION
        if match == cursor:
            matched = seq[cursor]
            cursor += 1
    elif match == cursor:
        cls, interp_cls, matched = TASK_ORIENTED, CONFIRMATION, seq[cursor]
        cursor += 1
    elif match is not None:
        cls, interp_cls, matched = DEVIATION, CONTRADICTION, seq[match]
        skipped = seq[cursor:match]
        flags.append("skip")
        cursor = match + 1
    else:
        cls, interp_cls = DEVIATION, CONTRADICTION
        if cursor == len(seq):
            flags.append("exhausted-sequence")
        earlier = next((t for t in seq[:cursor] if profile.task_specs[t].matches(event)), None)
        if earlier is not None:
            matched = earlier
            flags.append("out-of-order")
        elif not any(event.action in spec.actions for spec in profile.task_specs.values()):
            flags.append("unknown-action")
        else:
            flags.append("wrong-object")

    k = state.next_index
    cb = ClassifiedBehavior(
        behavior=_mint(profile, "b", k),
        behavior_class=cls,
        interpretation=_mint(profile, "i", k),
        interpretation_class=interp_cls,
        event=event,
        event_index=len(state.history),
        matched_task=matched,
        expected_task=expected,
        skipped=tuple(skipped),
        fired_cues=tuple(c.id for c in fired),
        cue_labels=tuple(c.label for c in fired),
        flags=tuple(flags),
    )
    new_state = dataclasses.replace(
        state,
        cursor=cursor,
        history=state.history + ((event, cb),),
        hypothesis=hypothesis,
        next_index=k + 1,
    )
    return cb, new_state


def classify_gems(deviation: ClassifiedBehavior, state: SequenceState) -> Iri:
    """Heuristic GEMS subtype of a deviation: Violation, Lapse, Slip, else Mistake."""
    if deviation.behavior_class != DEVIATION:
        raise NotADeviation(f"{deviation.behavior.local} is {deviation.behavior_class.local}")
    event = deviation.event
    if event.features.get("declared_intent") == Literal("shortcut"):
        return OP.Violation
    if "skip" in deviation.flags:
        # one forgotten step, then the next step done right
        return OP.Lapse if len(deviation.skipped) == 1 else OP.Mistake
    if deviation.expected_task is not None:
        spec = state.profile.task_specs[deviation.expected_task]
        if event.action in spec.actions and spec.object is not None and event.object != spec.object:
            return OP.Slip
    return OP.Mistake


def assert_into_kb(kb: KnowledgeBase, cb: ClassifiedBehavior, event: Optional[ObservationEvent] = None,
                   profile: Optional[ExpectationProfile] = None) -> KnowledgeBase:
    """Record a verdict.  Interpretations of deviations and task-oriented
    behaviors are left untyped; the reasoner derives them."""
    event = event or cb.event
    b, i = cb.behavior, cb.interpretation
    kb.add_assertion(ClassAssertion(b, cb.behavior_class))
    if cb.gems_subtype is not None:
        kb.add_assertion(ClassAssertion(b, cb.gems_subtype))
    kb.add_assertion(ObjectProp(event.actor, OP.exhibits, b))
    kb.add_assertion(ObjectProp(b, OP.informs, i))
    rt = event.features.get("response_time")
    if rt is not None:
        kb.add_assertion(DataProp(b, OP.hasResponseTime, Literal.decimal(rt.lexical)))
    for label in cb.cue_labels:
        kb.add_assertion(DataProp(b, OP.hasCueLabel, Literal(label)))
    if cb.behavior_class == DECEPTION:
        kb.add_assertion(ClassAssertion(i, cb.interpretation_class))
    if profile is not None:
        for expectation in sorted(kb.objects(profile.role, OP.sets)):
            kb.add_assertion(ObjectProp(expectation, OP.determines, i))
    return kb


def fold_events(state: SequenceState, events):
    """classify_event + classify_gems over ``events``; returns (verdicts, final state)."""
    verdicts = []
    last_t = None
    for idx, event in enumerate(events):
        if last_t is not None and event.timestamp < last_t:
            err = TraceError(f"event {idx}: timestamp {event.timestamp} precedes {last_t}")
            err.event_index = idx
            raise err
        last_t = event.timestamp
        try:
            cb, state = classify_event(state, event)
            if cb.behavior_class == DEVIATION:
                cb = dataclasses.replace(cb, gems_subtype=classify_gems(cb, state))
        except OntoPretError as exc:
            exc.event_index = idx
            exc.args = (f"event {idx}: {exc}",)
            raise
        verdicts.append(cb)
    return verdicts, state


def run_trace(kb: KnowledgeBase, profile: ExpectationProfile, events):
    """Classify a whole trace, assert the verdicts and materialize once at the end."""
    work = kb.copy()
    state = SequenceState.start(profile, work)
    verdicts, _ = fold_events(state, events)
    for cb in verdicts:
        assert_into_kb(work, cb, profile=profile)
    closed, _ = materialize(work)
    for cb in verdicts:
        if cb.behavior_class in (DEVIATION, TASK_ORIENTED):
            want = ClassAssertion(cb.interpretation, cb.interpretation_class)
            if want not in closed.abox:
                raise InvariantBreach(f"{want} was not inferred for {cb.behavior.local}")
    return closed, verdicts
