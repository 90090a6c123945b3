"""Search-free checking of certificates.

Only move replay, free reduction and integer matrix arithmetic are used:
the middle level is rebuilt from the scenario (a deterministic
construction), the paired slide log is replayed, and every YES verdict's
evidence is re-derived and compared.  The first disagreement raises
:class:`EvidenceMismatch` naming the certificate path that failed.
"""

from __future__ import annotations

from dataclasses import replace

from .grouppres import (Move, Presentation, Word, abelian_obstruction, delete_generators,
                        is_trivial_presentation)
from .intmat import IntMatrix, RowColOp, apply_ops, homology_from_complex
from .middle import block_sum_matrix, dot_side
from .pipeline import (FORMAT, VERDICT_KEYS, CobordismScenario, _acyclic, _l1_fingerprint,
                       _op_on_spheres, certify_B, chain_complex, complement_labels,
                       complement_presentation, double_cork, initial_state, inventory,
                       stage2_build, stage4_assemble)
from .slides import ArcClass, Factor, PairedMove, ToriData, evaluate_expression


class EvidenceMismatch(ValueError):
    def __init__(self, step, message):
        super().__init__(f"{step}: {message}")
        self.step = step


def _expect(cond, step, message):
    if not cond:
        raise EvidenceMismatch(step, message)


def _replay_moves(p: Presentation, moves, step) -> Presentation:
    cur = p.restart()
    for k, d in enumerate(moves or ()):
        try:
            cur = cur.apply(Move.from_json(d))
        except (ValueError, KeyError, TypeError) as e:
            raise EvidenceMismatch(f"{step}[{k}]", f"move does not apply: {e}") from e
    return cur


def _replay_elimination(rank, relators, steps, step):
    done = []
    for k, (g, l, _word) in enumerate(steps):
        _expect(1 <= l <= len(relators), f"{step}[{k}]", f"no relator {l}")
        w = delete_generators(relators[l - 1].reduced, done)
        _expect(len(w) == 1 and abs(w[0]) == g and g not in done, f"{step}[{k}]",
                f"relator {l} does not cancel x{g}")
        done.append(g)
    _expect(sorted(done) == list(range(1, rank + 1)), step, "not every generator is cancelled")


def verify_certificate(cert: dict, sc: CobordismScenario) -> dict:
    """Check ``cert`` against ``sc``; returns {verdict: status} on success."""
    _expect(cert.get("format") == FORMAT, "format", f"unknown format {cert.get('format')!r}")
    _expect(cert.get("scenario_sha256") == sc.digest(), "scenario_sha256",
            "certificate was produced from a different scenario")

    # stage 1: op replay
    s1 = cert["stage1"]
    _expect(s1["input"] == sc.boundary3.to_rows(), "stage1.input", "boundary matrix differs")
    try:
        ops = [RowColOp.from_json(o) for o in s1["ops"]]
        m = apply_ops(sc.boundary3, ops)
    except (ValueError, KeyError, IndexError) as e:
        raise EvidenceMismatch("stage1.ops", str(e)) from e
    _expect(m.is_identity(), "stage1.ops", "ops do not reduce boundary3 to the identity")
    sp = sc.sphere_pair
    for op in ops:
        sp = _op_on_spheres(sp, op)
    normalized = replace(sc, boundary3=IntMatrix.identity(sc.n), sphere_pair=sp)
    ml = stage2_build(normalized)

    statuses = {k: cert["verdicts"][k]["status"] for k in VERDICT_KEYS}
    ev = cert["evidence"]
    if "dual_state" not in cert:
        _expect(not any(s == "yes" for s in statuses.values()), "verdicts",
                "YES verdicts without a dual state")
        return statuses

    # stages 2-3 and 5: the paired log
    ds = cert["dual_state"]
    state = initial_state(ml)
    state3 = None
    for k, d in enumerate(ds["log"]):
        if k == ds["stage3_moves"]:
            state3 = state
        try:
            state = state.apply(PairedMove.from_json(d))
        except (ValueError, KeyError, TypeError) as e:
            raise EvidenceMismatch(f"dual_state.log[{k}]", f"paired move does not apply: {e}") from e
    if state3 is None:
        state3 = state
    _expect(state.summary() == ds["final"], "dual_state.final", "replayed state differs")
    killers = {int(g): int(k) for g, k in ds["killers"].items()}
    for g, k in killers.items():
        _expect(state3.r(k).reduced == (g,), f"dual_state.killers.{g}",
                f"handle {k} does not reduce to x{g}")
    _expect(sorted(killers) == list(range(1, ml.rank + 1)), "dual_state.killers",
            "killers do not cover the generators")
    cork = stage4_assemble(ml, state, killers)
    _expect(cork.to_json() == cert["cork"], "cork", "assembled cork differs")

    if statuses["theorem1"] == "yes":
        e = ev["theorem1"]
        end = _replay_moves(cork.A_half, e["moves"], "evidence.theorem1.moves")
        _expect(is_trivial_presentation(end), "evidence.theorem1.moves",
                "moves do not reach the trivial presentation")
        cx = chain_complex(cork)
        _expect({str(k): v.to_rows() for k, v in cx.items()} == e["chain_complex"],
                "evidence.theorem1.chain_complex", "chain complex differs")
        try:
            h = homology_from_complex(cx)
        except ValueError as err:
            raise EvidenceMismatch("evidence.theorem1.chain_complex", str(err)) from err
        _expect(_acyclic(h), "evidence.theorem1.homology", "complex is not acyclic")

    if statuses["theorem2"] == "yes":
        inv = inventory(cork)
        _expect(inv == ev["theorem2"], "evidence.theorem2", "inventory differs")
        _expect(not inv["complement_2_3_handles"], "evidence.theorem2", "complement has handles")

    if statuses["addendumA"] == "yes":
        e = ev["addendumA"]
        before = complement_presentation(state3, killers)
        _expect([list(r.reduced) for r in before.relators] == e["complement_before"],
                "evidence.addendumA.complement_before", "complement differs")
        after = complement_presentation(state, killers)
        _expect([list(r.reduced) for r in after.relators] == e["complement_after"],
                "evidence.addendumA.complement_after", "complement differs")
        _expect(complement_labels(state, killers) == e["complement_labels"],
                "evidence.addendumA.complement_labels", "complement handles differ")
        end = _replay_moves(after, e["trivialization"], "evidence.addendumA.trivialization")
        _expect(is_trivial_presentation(end), "evidence.addendumA.trivialization",
                "complement relators do not normally generate")
        fp0 = _l1_fingerprint(state3, state3.handle_count)
        fp1 = _l1_fingerprint(state, state3.handle_count)
        _expect(fp0 == e["l1_fingerprint_before"] == fp1 == e["l1_fingerprint_after"],
                "evidence.addendumA.l1_fingerprint", "L1 relators changed")
        _expect(state.spare_pairs == e["spare_pairs"], "evidence.addendumA.spare_pairs", "count differs")
        if "arc_realizations" in e:
            _check_arcs(state3, state, e["arc_realizations"])

    b_ok = None
    if statuses["addendumB"] == "yes":
        e = ev["addendumB"]
        recomputed = certify_B(cert["stage1"], cork)
        _expect(recomputed.is_yes, "evidence.addendumB", "ball certificate does not hold for the assembled cork")
        steps = [(c["generator"], cork.b_labels.index(c["handle"]) + 1, c["relator"])
                 for c in e["circle_cancellations"]]
        _replay_elimination(cork.B_half.rank, cork.B_half.relators, steps,
                            "evidence.addendumB.circle_cancellations")
        _expect(e["boundary3_identity"], "evidence.addendumB.boundary3_identity", "not the identity")
        b_ok = recomputed

    if statuses["addendumC"] == "yes":
        e = ev["addendumC"]
        ks = [state3.r(killers[g]) for g in sorted(killers)]
        ident = [[int(a == b) for b in range(ml.n)] for a in range(ml.n)]
        for side in (0, 1):
            se = e[f"side{side}"]["evidence"]
            step = f"evidence.addendumC.side{side}"
            _expect(block_sum_matrix(ml, 1 - side) == se["block_sums"] == ident,
                    f"{step}.block_sums", "block sums are not the identity")
            _replay_elimination(ml.rank, ks, se["x_steps"], f"{step}.x_steps")
            dotted = dot_side(ml, side)
            _replay_elimination(ml.n, dotted.relators, se["y_steps"], f"{step}.y_steps")

    if statuses["addendumD"] == "yes":
        _expect(b_ok is not None, "evidence.addendumD", "doubling without a ball certificate")
        _, record = double_cork(cork, ml, b_ok)
        _expect(record == ev["addendumD"], "evidence.addendumD", "swap record differs")
        _expect(record["top_equals_swapped_bottom"], "evidence.addendumD", "ends differ under the swap")

    for key, status in statuses.items():
        if status == "no":
            _check_no(key, ev.get(key) or {})
    return statuses


def _check_arcs(state3, state, records):
    tori = ToriData.from_state(state3)
    doubles = [pm for pm in state.log[len(state3.log):] if pm.kind == "double_slide"]
    _expect(len(doubles) == len(records), "evidence.addendumA.arc_realizations", "count differs")
    for k, (pm, rec) in enumerate(zip(doubles, records)):
        _, _, lam1, lam3, mu1, mu3 = pm.args
        for name, arc in (("lambda", ArcClass.of(lam1, lam3)), ("mu", ArcClass.of(mu1, mu3))):
            if isinstance(rec[name], dict):
                continue
            factors = [Factor(f["family"], f["handle"], tuple(f["conjugator"]), f["sign"])
                       for f in rec[name]]
            got = evaluate_expression(factors, tori)
            _expect(got.g1.reduced == arc.g1.reduced and got.g3.reduced == arc.g3.reduced,
                    f"evidence.addendumA.arc_realizations[{k}].{name}", "expression evaluates elsewhere")


def _check_no(key, e):
    """NO verdicts carrying an abelianization witness are rechecked by SNF."""
    for name in ("witness", "complement_h1"):
        w = e.get(name)
        if isinstance(w, dict) and "abelianization" in w:
            rows = w["abelianization"]
            rank = int(w.get("rank", len(rows[0]) if rows else 0))
            p = Presentation(rank, tuple(Word(tuple(sum(([g + 1] * c if c > 0 else [-(g + 1)] * -c
                                                          for g, c in enumerate(row)), [])))
                                         for row in rows))
            _expect(abelian_obstruction(p) is not None, f"evidence.{key}.{name}",
                    "abelianization is trivial")
