import json

import pytest

from ontopret.errors import TraceError
from ontopret.kb import OP, RDFS_LABEL, Literal
from ontopret.reasoner import check_consistency
from ontopret.scenarios import (
    DATA_DIR,
    build_kitting_scenario,
    build_poker_scenario,
    build_scenario,
    load_trace,
    parse_trace,
    simulate,
    tbox_hash,
)
from ontopret.schema import build_tbox, validate_schema
from ontopret.turtle import dumps_kb, load_kb, read_kb

TRACES = DATA_DIR / "traces"


@pytest.mark.parametrize("builder", [build_kitting_scenario, build_poker_scenario])
def test_bundles_valid_and_consistent(builder):
    bundle = builder()
    assert validate_schema(bundle.kb) == []
    assert check_consistency(bundle.kb).consistent
    assert builder().kb == bundle.kb


def test_kitting_bundle_contents():
    b = build_kitting_scenario()
    kb = b.kb
    assert {OP.AssemblerRole, OP.ObserverRole} <= kb.objects(OP.KittingScenario, OP.providesRole)
    assert kb.values(OP.CompleteKitGoal, RDFS_LABEL) == {Literal("Correctly complete the kitting task")}
    assert kb.subjects(OP.encapsulates, OP.KittingScenario) == {OP.AssemblyLineContext}
    assert kb.subjects(OP.conceptualizes, OP.KittingScenario) == {OP.ManufacturingDomain}
    assert kb.objects(OP.Human1, OP.performsRole) == {OP.AssemblerRole}
    assert kb.objects(OP.Robot1, OP.performsRole) == {OP.ObserverRole}
    assert len(b.profile.expected_sequence) == 3 and b.profile.deception_cues == ()


def test_poker_bundle_contents():
    b = build_poker_scenario()
    kb = b.kb
    assert kb.values(OP.WinGameGoal, RDFS_LABEL) == {Literal("Win the game and the pot of money")}
    assert kb.values(OP.MakeDecisionTask, RDFS_LABEL) == {Literal("Make a choice to fold, call, or raise an opponent")}
    assert kb.subjects(OP.performsRole, OP.PlayerRole) == {OP.Machine1, OP.HumanPlayer1}
    assert [c.label for c in b.profile.deception_cues] == ["avoid-eye-contact", "fast-bet"]


@pytest.mark.parametrize("name,builder", [("kitting", build_kitting_scenario), ("poker", build_poker_scenario)])
def test_shipped_abox_files_match_builders(name, builder):
    kb = load_kb((DATA_DIR / f"{name}.ttl").read_text(encoding="utf-8"))
    assert kb.abox == builder().kb.abox
    assert (DATA_DIR / f"{name}.ttl").read_text(encoding="utf-8") == dumps_kb(builder().kb, tbox=False)


def test_unknown_scenario():
    with pytest.raises(TraceError):
        build_scenario("chess")


def _ev(**over):
    ev = {"t": 0, "actor": "ontopret:Human1", "action": "pick", "object": "ontopret:BinA", "features": {}}
    ev.update(over)
    return ev


@pytest.mark.parametrize("doc", [
    [],
    {"scenario": "kitting"},
    {"scenario": "kitting", "events": [], "extra": 1},
    {"scenario": "kitting", "events": [_ev(t=-1)]},
    {"scenario": "kitting", "events": [_ev(t=2), _ev(t=1)]},
    {"scenario": "kitting", "events": [{"t": 0, "actor": "ontopret:Human1", "action": "pick", "features": {}}]},
    {"scenario": "kitting", "events": [_ev(features={"x": [1]})]},
    {"scenario": "kitting", "events": [_ev(object=3)]},
])
def test_trace_envelope_rejected(doc):
    with pytest.raises(TraceError):
        parse_trace(doc, build_kitting_scenario().kb)


def test_unknown_features_carried():
    _, (ev,) = parse_trace({"scenario": "kitting", "events": [_ev(features={"glance": "left", "n": 2})]},
                           build_kitting_scenario().kb)
    assert ev.features == {"glance": Literal("left"), "n": Literal("2", "integer")}


def test_shipped_skip_trace_report():
    bundle = build_kitting_scenario()
    _, events = load_trace(TRACES / "kitting_skip.json", bundle.kb)
    report = simulate(bundle, events, cqs=["CQ1"])
    d = report.to_dict()
    assert d["counts"]["gems_subtype"] == {"ontopret:Lapse": 1}
    assert d["counts"]["behavior_class"]["ontopret:Deviation"] == 1
    assert d["cq_answers"]["CQ1"]["rows"][0][-1] == "ontopret:Contradiction"
    assert sum(d["counts"]["behavior_class"].values()) == d["counts"]["events"] == len(events)
    assert d["tbox_sha256"] == tbox_hash(build_tbox())
    assert set(d) == {"engine_version", "tbox_sha256", "scenario", "verdicts", "counts", "consistency", "cq_answers"}
    assert json.loads(report.to_json()) == d


def test_poker_trace_report():
    bundle = build_poker_scenario()
    _, events = load_trace(TRACES / "poker_eye_contact.json", bundle.kb)
    d = simulate(bundle, events, cqs=["CQ2", "CQ6"]).to_dict()
    deceptions = [v for v in d["verdicts"] if v["behavior_class"] == "ontopret:Deception"]
    assert deceptions and all(v["interpretation_class"] == "ontopret:Confirmation" for v in deceptions)
    assert d["cq_answers"]["CQ2"]["rows"][0] == ["avoid-eye-contact", "2"]


def test_read_kb_round_trip(tmp_path):
    path = tmp_path / "k.ttl"
    path.write_text(dumps_kb(build_kitting_scenario().kb), encoding="utf-8")
    assert read_kb(path) == build_kitting_scenario().kb
