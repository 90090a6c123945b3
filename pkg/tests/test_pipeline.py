import json
from dataclasses import replace

import pytest

from hcork.cli import FIXTURES
from hcork.intmat import IntMatrix, NonUnimodular, apply_ops
from hcork.middle import SpherePair
from hcork.pipeline import (VERDICT_KEYS, AmbientHandle, CobordismScenario,
                            ComplementNotHomologyTrivial, MissingBallCertificate, ScenarioError,
                            certify_B, double_cork, dumps_certificate, extract, inventory,
                            load_scenario, normalize_record, run_pipeline, stage1_normalize,
                            stage2_build, stage3_kill_generators, stage4_assemble,
                            stage5_simply_connect)
from hcork.tristate import TriState


def fixture(name):
    return load_scenario(FIXTURES / f"{name}.json")


def one_point(handles=None, r=0, t=0, **kw):
    return CobordismScenario(1, IntMatrix.identity(1), SpherePair(1, {(1, 1): (1,)}), r=r, t=t,
                             handles=handles, **kw)


def test_stage1_identity_needs_no_ops():
    sc, ops = stage1_normalize(fixture("minimal"))
    assert ops == [] and sc.boundary3.is_identity()


def test_stage1_one_column_op():
    raw = fixture("slid")
    sc, ops = stage1_normalize(raw)
    assert len(ops) == 1 and ops[0].kind == "add_col"
    assert apply_ops(raw.boundary3, ops).is_identity()
    assert sc.sphere_pair.algebraic() == [[1, 0], [0, 1]]
    assert sum(len(s) for s in sc.sphere_pair.intersections.values()) > \
        sum(len(s) for s in raw.sphere_pair.intersections.values())


def test_stage1_swap():
    sc, ops = stage1_normalize(fixture("swapped"))
    assert len(ops) == 1 and "swap" in ops[0].kind
    assert sc.sphere_pair.algebraic() == [[1, 0], [0, 1]]
    rec = normalize_record(fixture("swapped"), ops)
    assert rec["input"] == [[0, 1], [1, 0]] and len(rec["slides"]) == 1


def test_stage1_rejects_non_unimodular():
    sc = CobordismScenario(1, IntMatrix.from_rows([[2]]), SpherePair(1, {(1, 1): (1, 1)}))
    with pytest.raises(NonUnimodular):
        stage1_normalize(sc)


def test_scenario_validation():
    with pytest.raises(ScenarioError):
        CobordismScenario(1, IntMatrix.identity(1), SpherePair(1, {(1, 1): (1, 1, -1, -1)}))
    with pytest.raises(ScenarioError):
        one_point(budgets={"stage3": 0})
    with pytest.raises(ScenarioError):
        CobordismScenario.from_json({"n": 1, "intersections": [{"i": 1}]})


def test_digest_ignores_budgets():
    sc = fixture("akbulut")
    assert sc.with_budgets(stage3=5).digest() == sc.digest()
    assert replace(sc, name="other").digest() != sc.digest()
    assert CobordismScenario.from_json(sc.to_json()) == sc


def test_stage3_standard_killers_need_no_moves():
    ml = stage2_build(replace(fixture("akbulut"), handles=None))
    res = stage3_kill_generators(ml)
    assert res.verdict.is_yes
    assert res.search_moves == [] and res.verdict.certificate["pairs_added"] == 0
    assert res.killers == {1: 1, 2: 2, 3: 3}


def test_stage3_one_slide():
    sc = one_point([AmbientHandle((1, 2)), AmbientHandle((2,))], r=1)
    res = stage3_kill_generators(stage2_build(sc))
    assert res.verdict.is_yes
    assert [m.kind for m in res.search_moves] == ["slide"]
    assert res.state.r(res.killers[1]).reduced == (1,)


def test_stage3_no():
    sc = one_point([AmbientHandle((1, 1))])
    run = run_pipeline(sc)
    assert run.kill.verdict.is_no
    assert run.verdicts["theorem1"].is_no
    assert run.verdicts["addendumA"].is_unknown
    cert = extract(sc)
    assert "dual_state" not in cert and cert["failure"].startswith("stage 3")


def test_stage3_akbulut_handles_slide():
    res = stage3_kill_generators(stage2_build(fixture("akbulut")))
    assert res.verdict.is_yes and len(res.search_moves) == 2
    assert all(res.state.r(k).reduced == (g,) for g, k in res.killers.items())


def test_stage4_counts():
    sc = fixture("akbulut")
    ml = stage2_build(sc)
    k = stage3_kill_generators(ml)
    cork = stage4_assemble(ml, k.state, k.killers)
    assert cork.B_half.rank == 3 and len(cork.B_half.relators) == 3
    assert len(cork.A_half.relators) == 3 + 2 * sc.n
    assert len(cork.three_handles) == 2 * sc.n
    inv = inventory(cork)
    assert inv["complement_2_3_handles"] == []
    assert len(inv["in_A"]) == 2 * sc.n


def test_stage5_trivial_complement():
    sc = fixture("akbulut")
    ml = stage2_build(sc)
    k = stage3_kill_generators(ml)
    res = stage5_simply_connect(sc, k.state, k.killers)
    assert res.verdict.is_yes
    assert res.verdict.certificate["commutators_killed"] == 0
    assert res.state is k.state


def _stage5_parts(sc):
    sc1, _ = stage1_normalize(sc)
    ml = stage2_build(sc1)
    k = stage3_kill_generators(ml, sc.budgets["stage3"])
    return sc1, k


def test_stage5_with_witnesses():
    sc = fixture("stage5")
    sc1, k = _stage5_parts(sc)
    res = stage5_simply_connect(sc1, k.state, k.killers, sc.budgets["stage5"])
    assert res.verdict.is_yes
    c = res.verdict.certificate
    assert c["spare_pairs"] == len(sc.witnesses) == c["commutators_killed"]
    assert c["l1_fingerprint_before"] == c["l1_fingerprint_after"]
    assert c["complement_after"] != c["complement_before"]


def test_stage5_without_witnesses_is_unknown():
    sc = replace(fixture("stage5"), witnesses=None)
    sc1, k = _stage5_parts(sc)
    res = stage5_simply_connect(sc1, k.state, k.killers, 500)
    assert res.verdict.is_unknown
    assert "witness" in res.verdict.reason


def test_stage5_homology_obstruction():
    sc = one_point([AmbientHandle((1,)), AmbientHandle((), (1, 1))], t=1)
    sc1, k = _stage5_parts(sc)
    with pytest.raises(ComplementNotHomologyTrivial) as e:
        stage5_simply_connect(sc1, k.state, k.killers)
    assert e.value.witness["h1_torsion"] == [2]
    run = run_pipeline(sc)
    assert run.verdicts["addendumA"].is_no
    assert run.verdicts["theorem1"].is_yes


@pytest.mark.parametrize("name", ["minimal", "akbulut", "interleaved-careful", "slid", "swapped"])
def test_fixtures_certify(name):
    cert = extract(fixture(name))
    assert all(cert["verdicts"][k]["status"] == "yes" for k in VERDICT_KEYS)
    assert cert["evidence"]["theorem1"]["acyclic"]


def test_natural_ordering_only_affects_c():
    cert = extract(fixture("interleaved-natural"))
    st = {k: v["status"] for k, v in cert["verdicts"].items()}
    assert st.pop("addendumC") == "unknown"
    assert set(st.values()) == {"yes"}


def test_akbulut_theorem1_evidence():
    ev = extract(fixture("akbulut"))["evidence"]["theorem1"]
    assert ev["acyclic"]
    assert ev["chain_ranks"] == {"1": 3, "2": 5, "3": 2}


def test_double_needs_ball():
    sc = fixture("akbulut")
    run = run_pipeline(sc)
    with pytest.raises(MissingBallCertificate):
        double_cork(run.cork, run.middle, TriState.unknown("no"))
    doubled, rec = double_cork(run.cork, run.middle, run.verdicts["addendumB"])
    assert len(doubled.three_handles) == 4 * sc.n
    assert rec["top_equals_swapped_bottom"]


def test_certify_b_records_cancellations():
    run = run_pipeline(fixture("akbulut"))
    res = certify_B(normalize_record(run.scenario, run.ops), run.cork)
    assert res.is_yes
    gens = [c["generator"] for c in res.certificate["circle_cancellations"]]
    assert sorted(gens) == [1, 2, 3]


def test_certificates_are_deterministic():
    sc = fixture("interleaved-careful")
    a, b = dumps_certificate(extract(sc)), dumps_certificate(extract(fixture("interleaved-careful")))
    assert a == b
    assert json.loads(a)["scenario_sha256"] == sc.digest()
