"""Extracting a cork from an h-cobordism, stage by stage, with certificates.

Stages:

1. normalize the 3-to-2 boundary matrix to the identity, carrying the
   sphere intersection data along;
2. build the middle-level handle structure;
3. slide the ambient 2-handles until r of them kill the 1-handles;
4. assemble B_{1/2}, A_{1/2} and the 3-handles of A;
5. make the complement simply connected by killing commutators.

:func:`certify` then produces verdicts for the Theorem and Addenda A-D.
Everything is deterministic: the same scenario and budgets give the same
certificate bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Sequence

from .grouppres import (Move, Presentation, Word, abelian_obstruction, abelianize,
                        kill_generators_search, normally_generates,
                        trivialize_search)
from .grouppres.search import eliminate_by_killers
from .intmat import (IntMatrix, RowColOp, apply_ops, homology_from_complex, unimodular_reduce)
from .middle import (MiddleLevel, Ordering, SpherePair, build_middle, check_sequential_killing,
                     dot_side, sequential_elimination)
from .slides import (ArcClass, CommutatorTarget, DualState, PairedMove, ToriData, add_23_pair,
                     kill_commutators, l1_projection, realize_arc_class, slide, WitnessInsufficient)
from .tristate import TriState

FORMAT = "hcork-certificate/1"
DEFAULT_BUDGETS = {"stage3": 20_000, "stage5": 20_000, "theorem1": 20_000}
MAX_STAGE3_PAIRS = 2
VERDICT_KEYS = ("theorem1", "theorem2", "addendumA", "addendumB", "addendumC", "addendumD")


class ScenarioError(ValueError):
    pass


class ComplementNotHomologyTrivial(ValueError):
    def __init__(self, witness):
        super().__init__(f"H_1 of the complement is nonzero: {witness}")
        self.witness = witness


class MissingBallCertificate(ValueError):
    pass


# -- scenario ------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientHandle:
    relator_l1: tuple[int, ...]
    relator_l3: tuple[int, ...] = ()


@dataclass(frozen=True)
class CobordismScenario:
    """The handle data of an h-cobordism, plus what stages 3 and 5 need.

    ``handles=None`` means the standard ambient structure: one 2-handle
    x_g per 1-handle generator with trivial duals.  Ambient relators index
    the generators of the *normalized* middle level (points numbered after
    stage 1, then the r extra 1-handles).
    """

    n: int
    boundary3: IntMatrix
    sphere_pair: SpherePair
    ordering: Ordering = Ordering.CAREFUL
    r: int = 0
    t: int = 0
    handles: tuple[AmbientHandle, ...] | None = None
    sphere_duals: dict = field(default_factory=dict, compare=False)
    witnesses: tuple[CommutatorTarget, ...] | None = None
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS), compare=False)
    realize_arcs: bool = False
    name: str = ""

    def __post_init__(self):
        if self.boundary3.shape != (self.n, self.n):
            raise ScenarioError(f"boundary3 is {self.boundary3.shape}, expected {self.n}x{self.n}")
        if self.sphere_pair.n != self.n:
            raise ScenarioError("sphere data has the wrong number of sphere pairs")
        if self.r < 0 or self.t < 0:
            raise ScenarioError("r and t must be nonnegative")
        if self.sphere_pair.algebraic() != self.boundary3.to_rows():
            raise ScenarioError("algebraic sphere intersections disagree with boundary3")
        for k, v in self.budgets.items():
            if int(v) <= 0:
                raise ScenarioError(f"budget {k} must be positive")

    @classmethod
    def from_json(cls, d) -> "CobordismScenario":
        try:
            n = int(d["n"])
            b3 = IntMatrix.from_rows(d.get("boundary3") or [[int(i == j) for j in range(n)]
                                                            for i in range(n)], cols=n)
            sp = SpherePair.from_json(n, d.get("intersections", []))
            amb = d.get("ambient", {})
            handles = amb.get("handles")
            if handles is not None:
                handles = tuple(AmbientHandle(tuple(h.get("relator_L1", ())),
                                              tuple(h.get("relator_L3", ()))) for h in handles)
            duals = {(int(e["k"]), int(e["i"])): tuple(e["word"]) for e in d.get("sphere_duals", [])}
            wit = d.get("witnesses")
            wit = None if wit is None else tuple(CommutatorTarget.from_json(w) for w in wit)
            budgets = dict(DEFAULT_BUDGETS)
            budgets.update({k: int(v) for k, v in d.get("budgets", {}).items()})
            return cls(n, b3, sp, Ordering(d.get("ordering", "careful")), int(amb.get("r", 0)),
                       int(amb.get("t", 0)), handles, duals, wit, budgets,
                       bool(d.get("realize_arcs", False)), str(d.get("name", "")))
        except (KeyError, TypeError) as e:
            raise ScenarioError(f"malformed scenario: {e!r}") from e

    def to_json(self, with_budgets=True):
        out = {
            "name": self.name,
            "n": self.n,
            "boundary3": self.boundary3.to_rows(),
            "intersections": self.sphere_pair.to_json(),
            "ordering": self.ordering.value,
            "ambient": {"r": self.r, "t": self.t},
            "realize_arcs": self.realize_arcs,
        }
        if self.handles is not None:
            out["ambient"]["handles"] = [{"relator_L1": list(h.relator_l1),
                                          "relator_L3": list(h.relator_l3)} for h in self.handles]
        if self.sphere_duals:
            out["sphere_duals"] = [{"k": k, "i": i, "word": list(w)}
                                   for (k, i), w in sorted(self.sphere_duals.items())]
        if self.witnesses is not None:
            out["witnesses"] = [w.to_json() for w in self.witnesses]
        if with_budgets:
            out["budgets"] = dict(sorted(self.budgets.items()))
        return out

    def digest(self) -> str:
        """sha256 of the canonical scenario content (budgets excluded)."""
        blob = json.dumps(self.to_json(with_budgets=False), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_budgets(self, **budgets) -> "CobordismScenario":
        b = dict(self.budgets)
        b.update({k: int(v) for k, v in budgets.items() if v is not None})
        return replace(self, budgets=b)


def load_scenario(path) -> CobordismScenario:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"{path}: {e}") from e
    return CobordismScenario.from_json(data)


# -- stage 1 -------------------------------------------------------------------

def _op_on_spheres(sp: SpherePair, op: RowColOp) -> SpherePair:
    n = sp.n
    pts = {(i, j): list(sp.signs(i, j)) for i in range(1, n + 1) for j in range(1, n + 1)}
    key = (lambda a, k: (a, k)) if op.is_row() else (lambda a, k: (k, a))
    if op.kind in ("add_row", "add_col"):
        sgn = 1 if op.c > 0 else -1
        for k in range(1, n + 1):
            pts[key(op.i, k)] += [s * sgn for s in pts[key(op.j, k)]] * abs(op.c)
    elif op.kind in ("swap_rows", "swap_cols"):
        for k in range(1, n + 1):
            a, b = key(op.i, k), key(op.j, k)
            pts[a], pts[b] = pts[b], pts[a]
    else:
        for k in range(1, n + 1):
            pts[key(op.i, k)] = [-s for s in pts[key(op.i, k)]]
    return SpherePair(n, {k: tuple(v) for k, v in pts.items()})


def _describe_op(op: RowColOp) -> str:
    if op.kind == "add_row":
        return f"S_0,{op.i} is tubed to {op.c:+d} parallel copies of S_0,{op.j} (2-handle slide)"
    if op.kind == "add_col":
        return f"3-handle {op.i} slides {op.c:+d} times over 3-handle {op.j}"
    if op.kind == "swap_rows":
        return f"relabel 2-handles {op.i} <-> {op.j}"
    if op.kind == "swap_cols":
        return f"relabel 3-handles {op.i} <-> {op.j}"
    if op.kind == "negate_row":
        return f"reverse the orientation of 2-handle {op.i}"
    return f"reverse the orientation of 3-handle {op.i}"


def stage1_normalize(sc: CobordismScenario) -> tuple[CobordismScenario, list[RowColOp]]:
    """Reduce boundary3 to the identity; the spheres follow every op.

    AddCol(i, j, c) slides 3-handle i over 3-handle j, so S_{1,i} gains
    |c| parallel copies of the points of S_{1,j}, signs multiplied by
    sgn(c); rows do the same to the S_{0,·}; swaps relabel and negations
    reverse orientations.  Raises NonUnimodular.
    """
    ops, ident = unimodular_reduce(sc.boundary3)
    sp = sc.sphere_pair
    for op in ops:
        sp = _op_on_spheres(sp, op)
    out = replace(sc, boundary3=ident, sphere_pair=sp)
    return out, ops


def normalize_record(sc: CobordismScenario, ops: Sequence[RowColOp]):
    return {"input": sc.boundary3.to_rows(),
            "ops": [op.to_json() for op in ops],
            "slides": [_describe_op(op) for op in ops]}


# -- stage 2 -------------------------------------------------------------------

def _ambient(sc: CobordismScenario, rank):
    if sc.handles is None:
        return [AmbientHandle((g,), ()) for g in range(1, rank + 1)]
    for h in sc.handles:
        if any(abs(a) > rank or a == 0 for a in h.relator_l1):
            raise ScenarioError(f"ambient relator {list(h.relator_l1)} exceeds {rank} generators")
        if any(abs(a) > sc.t or a == 0 for a in h.relator_l3):
            raise ScenarioError(f"dual relator {list(h.relator_l3)} exceeds t = {sc.t}")
    return list(sc.handles)


def stage2_build(sc: CobordismScenario) -> MiddleLevel:
    rank = len(sc.sphere_pair.points()) + sc.r
    handles = _ambient(sc, rank)
    return build_middle(sc.sphere_pair, sc.ordering, extra_one_handles=sc.r,
                        ambient_l1=[h.relator_l1 for h in handles],
                        ambient_l3=[h.relator_l3 for h in handles],
                        l3_rank=sc.t, sphere_duals=sc.sphere_duals)


# -- stage 3 -------------------------------------------------------------------

def sphere_labels(n):
    return [f"H0,{i}" for i in range(1, n + 1)] + [f"H1,{i}" for i in range(1, n + 1)]


def initial_state(ml: MiddleLevel) -> DualState:
    """Handles in order: H_1..H_s, H_{0,1..n}, H_{1,1..n}."""
    s = len(ml.ambient_l1)
    labels = [f"H{l}" for l in range(1, s + 1)] + sphere_labels(ml.n)
    l1 = Presentation(ml.rank, tuple(ml.ambient_l1) + tuple(ml.sphere_words()))
    duals = [ml.sphere_duals.get((k, i), Word((), rank=ml.l3_rank))
             for k in (0, 1) for i in range(1, ml.n + 1)]
    l3 = Presentation(ml.l3_rank, tuple(ml.ambient_l3) + tuple(duals))
    return DualState.start(l1, l3, labels)


@dataclass
class KillResult:
    verdict: TriState
    state: DualState
    killers: dict          # generator -> DualState handle index
    search_moves: list


def _map_index(k, s, two_n):
    return k if k <= s else k + two_n


def stage3_kill_generators(ml: MiddleLevel, budget: int = DEFAULT_BUDGETS["stage3"],
                           max_pairs: int = MAX_STAGE3_PAIRS) -> KillResult:
    """Slide the ambient handles until every generator has a killer x_g·w_g.

    Tries 0, 1, ... cancelling 2-/3-handle pairs in turn, so the fewest
    stabilizations win.  Each slide of H_l over H_m is made along an arc
    that is trivial in π_1(L_3), so the dual slide uses λ' = 1.
    """
    state = initial_state(ml)
    sub = Presentation(ml.rank, tuple(ml.ambient_l1))
    res = TriState.unknown("not run")
    for extra in range(max_pairs + 1):
        res = kill_generators_search(sub, budget, extra_relators=extra)
        if not res.is_unknown:
            break
    if not res.is_yes:
        return KillResult(res, state, {}, [])
    s, two_n = len(ml.ambient_l1), 2 * ml.n
    pairs = 0
    for mv in res.certificate["moves"]:
        if mv.kind == "slide":
            state = slide(state, _map_index(mv.l, s, two_n), _map_index(mv.m, s, two_n),
                          ArcClass.of(mv.word, ()), mv.sign)
        elif mv.kind == "conjugate":
            state = state.apply(PairedMove("conjugate", (_map_index(mv.l, s, two_n), mv.word, ())))
        elif mv.kind == "invert":
            state = state.apply(PairedMove("invert", (_map_index(mv.l, s, two_n),)))
        elif mv.kind == "add_trivial":
            pairs += 1
            state = add_23_pair(state, f"P{pairs}")
        else:  # pragma: no cover - the killing search never emits other kinds
            raise AssertionError(mv.kind)
    killers = {g: _map_index(k, s, two_n) for g, k in res.certificate["killers"].items()}
    shapes = []
    for g, k in sorted(killers.items()):
        raw = state.r(k)
        if raw.reduced != (g,):  # pragma: no cover
            raise AssertionError(f"handle {k} does not kill x{g}")
        shapes.append({"generator": g, "handle": state.labels[k - 1], "raw": list(raw.raw)})
    cert = {"search_moves": [m.to_json() for m in res.certificate["moves"]],
            "expanded": res.certificate["expanded"], "pairs_added": pairs,
            "killers": {str(g): state.labels[k - 1] for g, k in sorted(killers.items())},
            "killer_shapes": shapes}
    return KillResult(TriState.yes(cert), state, killers, list(res.certificate["moves"]))


# -- stage 4 -------------------------------------------------------------------

@dataclass(frozen=True)
class CorkDescription:
    """B_{1/2}: 0-handle, 1-handles, killers.  A_{1/2}: plus the 2n H_{k,i}.

    ``b_labels`` name the B_{1/2} handles (killers in generator order, then
    spares); A_half's relators are those followed by H_{0,·}, H_{1,·}.
    """

    n: int
    B_half: Presentation
    A_half: Presentation
    b_labels: tuple[str, ...]
    three_handles: tuple[dict, ...]
    spare_pairs: int = 0

    @property
    def a_labels(self):
        return self.b_labels + tuple(sphere_labels(self.n))

    def to_json(self):
        return {"n": self.n, "B_half": _pres_json(self.B_half), "A_half": _pres_json(self.A_half),
                "b_labels": list(self.b_labels), "a_labels": list(self.a_labels),
                "three_handles": list(self.three_handles), "spare_pairs": self.spare_pairs}


def _pres_json(p: Presentation):
    return {"rank": p.rank, "relators": [list(r.reduced) for r in p.relators],
            "raw": [list(r.raw) for r in p.relators]}


def _b_labels(state: DualState, killers: dict):
    spares = [lab for lab in state.labels if lab.startswith("S")]
    return tuple(state.labels[killers[g] - 1] for g in sorted(killers)) + tuple(spares)


def stage4_assemble(ml: MiddleLevel, state: DualState, killers: dict) -> CorkDescription:
    labels = _b_labels(state, killers)
    b_rels = tuple(state.r(state.index(lab)) for lab in labels)
    sph = tuple(state.r(state.index(lab)) for lab in sphere_labels(ml.n))
    rank = state.l1.rank
    three = tuple([{"name": f"T0,{i}", "attached_to": f"S_0,{i}", "level": "below",
                    "cancels": f"H0,{i}", "handle_of_M": f"2-handle {i} (upside down)"}
                   for i in range(1, ml.n + 1)] +
                  [{"name": f"T1,{i}", "attached_to": f"S_1,{i}", "level": "above",
                    "cancels": f"H1,{i}", "handle_of_M": f"3-handle {i}"}
                   for i in range(1, ml.n + 1)])
    return CorkDescription(ml.n, Presentation(rank, b_rels), Presentation(rank, b_rels + sph),
                           labels, three, state.spare_pairs)


def inventory(cork: CorkDescription):
    """Which handles of M lie in A; the complement list must be empty."""
    items = []
    for t in cork.three_handles:
        items.append({"handle_of_M": t["handle_of_M"], "in_A_as": t["name"]})
    expected = [f"2-handle {i} (upside down)" for i in range(1, cork.n + 1)] + \
               [f"3-handle {i}" for i in range(1, cork.n + 1)]
    covered = sorted(it["handle_of_M"] for it in items)
    complement = [h for h in expected if h not in covered]
    return {"handles_of_M": expected, "in_A": items, "complement_2_3_handles": complement}


# -- stage 5 -------------------------------------------------------------------

def complement_labels(state: DualState, killers: dict):
    """Non-killer handles outside A_{1/2}: the rest of the H_l and stage-3 pairs."""
    taken = {state.labels[k - 1] for k in killers.values()} | set(sphere_labels(_n_of(state)))
    return [lab for lab in state.labels if lab not in taken and not lab.startswith("S")]


def _n_of(state):
    return sum(1 for lab in state.labels if lab.startswith("H0,"))


def complement_presentation(state: DualState, killers: dict) -> Presentation:
    labs = complement_labels(state, killers)
    return Presentation(state.l3.rank, tuple(state.dual(state.index(lab)).canonical() for lab in labs))


def _l1_fingerprint(state: DualState, upto: int):
    return hashlib.sha256(json.dumps([list(w) for w in l1_projection(state, upto)]).encode()).hexdigest()


@dataclass
class SimplyConnectResult:
    verdict: TriState
    state: DualState


def _arc_realizations(state_before: DualState, after: DualState, budget):
    tori = ToriData.from_state(state_before)
    out = []
    for pm in after.log[len(state_before.log):]:
        if pm.kind != "double_slide":
            continue
        _, _, lam1, lam3, mu1, mu3 = pm.args
        rec = {}
        for name, arc in (("lambda", ArcClass.of(lam1, lam3)), ("mu", ArcClass.of(mu1, mu3))):
            try:
                rec[name] = [f.to_json() for f in realize_arc_class(arc, tori, budget)]
            except WitnessInsufficient as e:
                rec[name] = {"unknown": str(e)}
        out.append(rec)
    return out


def stage5_simply_connect(sc: CobordismScenario, state: DualState, killers: dict,
                          budget: int = DEFAULT_BUDGETS["stage5"]) -> SimplyConnectResult:
    """Kill commutators in the duals until the complement is simply connected.

    Raises :class:`ComplementNotHomologyTrivial` when H_1 of the
    complement is nonzero.  Without witnesses a complement that is not
    already seen to be simply connected gives UNKNOWN.
    """
    comp = complement_presentation(state, killers)
    obstruction = abelian_obstruction(comp)
    if obstruction is not None:
        raise ComplementNotHomologyTrivial(obstruction)
    before = _l1_fingerprint(state, state.handle_count)
    handles_before = state.handle_count
    first = normally_generates(comp.relators, comp.rank, budget)
    cert = {"complement_labels": complement_labels(state, killers),
            "complement_before": [list(r.reduced) for r in comp.relators],
            "l3_rank": comp.rank, "l1_fingerprint_before": before}
    if first.is_yes:
        cert.update(commutators_killed=0, spare_pairs=0,
                    complement_after=cert["complement_before"],
                    trivialization=[m.to_json() for m in first.certificate["moves"]],
                    l1_fingerprint_after=before)
        return SimplyConnectResult(TriState.yes(cert, "complement already simply connected"), state)
    if not sc.witnesses:
        return SimplyConnectResult(TriState.unknown(
            "complement not shown simply connected and no commutator witnesses supplied", cert), state)
    after = kill_commutators(state, sc.witnesses)
    comp2 = complement_presentation(after, killers)
    fp = _l1_fingerprint(after, handles_before)
    cert.update(commutators_killed=len(sc.witnesses), spare_pairs=after.spare_pairs,
                complement_after=[list(r.reduced) for r in comp2.relators],
                l1_fingerprint_after=fp)
    if sc.realize_arcs:
        cert["arc_realizations"] = _arc_realizations(state, after, budget)
    if fp != before:  # pragma: no cover - kill_commutators guarantees this
        return SimplyConnectResult(TriState.no(cert, "L1 relators changed"), after)
    res = normally_generates(comp2.relators, comp2.rank, budget)
    if res.is_yes:
        cert["trivialization"] = [m.to_json() for m in res.certificate["moves"]]
        return SimplyConnectResult(TriState.yes(cert), after)
    if res.is_no:
        cert["witness"] = res.certificate
        return SimplyConnectResult(TriState.no(cert, res.reason), after)
    return SimplyConnectResult(TriState.unknown(res.reason, cert), after)


# -- certification -------------------------------------------------------------

def chain_complex(cork: CorkDescription):
    """Cellular chain complex of A: 1-handles, A_{1/2} 2-handles, 2n 3-handles.

    ∂_3 sends 3-handle T_{k,i} to the 2-handle H_{k,i} it cancels.
    """
    rank = cork.A_half.rank
    nrel = len(cork.A_half.relators)
    d1 = IntMatrix.zeros(1, rank)
    ab = abelianize(cork.A_half)
    d2 = IntMatrix.from_rows([[ab[l][g] for l in range(nrel)] for g in range(rank)], cols=nrel) \
        if rank else IntMatrix.zeros(0, nrel)
    labels = list(cork.a_labels)
    d3 = IntMatrix.from_rows([[int(labels[l] == t["cancels"]) for t in cork.three_handles]
                              for l in range(nrel)], cols=len(cork.three_handles))
    return {1: d1, 2: d2, 3: d3}


def _acyclic(h):
    return all(h.is_zero(k) for k in h.degrees() if k > 0) and h.group(0) == (1, ())


def trivialize_a_half(p: Presentation, budget):
    """Cancel 1-handles by their killers; fall back to the bounded search."""
    moves = eliminate_by_killers(p)
    if moves is not None:
        return TriState.yes({"moves": moves, "method": "killer elimination"})
    return trivialize_search(p, budget)


def certify_theorem1(cork: CorkDescription, budget):
    res = trivialize_a_half(cork.A_half, budget)
    cx = chain_complex(cork)
    h = homology_from_complex(cx)
    ev = {"A_half": _pres_json(cork.A_half),
          "chain_complex": {str(k): m.to_rows() for k, m in cx.items()},
          "chain_ranks": {"1": cx[2].rows, "2": cx[2].cols, "3": cx[3].cols},
          "homology": h.to_json(), "acyclic": _acyclic(h)}
    if res.is_yes:
        ev["moves"] = [m.to_json() for m in res.certificate["moves"]]
    if res.is_no:
        return TriState.no({**ev, "witness": res.certificate}, res.reason)
    if not ev["acyclic"]:
        return TriState.no(ev, "chain complex of A is not acyclic")
    if res.is_unknown:
        return TriState.unknown(res.reason, ev)
    return TriState.yes(ev)


def certify_theorem2(cork: CorkDescription):
    inv = inventory(cork)
    if inv["complement_2_3_handles"]:
        return TriState.no(inv, "some handles of M lie outside A")
    return TriState.yes(inv)


def certify_B(stage1: dict, cork: CorkDescription):
    d3_identity = apply_ops(IntMatrix.from_rows(stage1["input"], cols=cork.n),
                            [RowColOp.from_json(o) for o in stage1["ops"]]).is_identity() \
        if cork.n else True
    b = cork.B_half
    steps = sequential_elimination(b.rank, b.relators)
    ev = {"boundary3_identity": d3_identity}
    if steps is None:
        return TriState.unknown("B_1/2 killers do not cancel the 1-handles in sequence", ev)
    ev["circle_cancellations"] = [
        {"axiom": "circle-cancellation", "handle": cork.b_labels[l - 1], "generator": g,
         "cancelled_before": [s[0] for s in steps[:k]], "relator": word}
        for k, (g, l, word) in enumerate(steps)]
    ev["sphere_handles"] = [{"handle": lab, "reduced": list(cork.A_half.relators[
        len(cork.b_labels) + q].reduced)} for q, lab in enumerate(sphere_labels(cork.n))]
    if not d3_identity:  # pragma: no cover
        return TriState.no(ev, "boundary map is not the identity")
    if any(s["reduced"] for s in ev["sphere_handles"]):  # pragma: no cover
        return TriState.no(ev, "a sphere handle is not null-homotopic")
    return TriState.yes(ev)


def certify_C(ml: MiddleLevel, state3: DualState, killers: dict):
    ks = [state3.r(killers[g]) for g in sorted(killers)]
    sides = {}
    for side in (0, 1):
        sides[str(side)] = check_sequential_killing(ml, ks, side)
    ev = {f"side{k}": {"verdict": v.verdict.value, "reason": v.reason, "evidence": v.certificate}
          for k, v in sides.items()}
    ev["ordering"] = ml.ordering.value
    verdicts = [v for v in sides.values()]
    if all(v.is_yes for v in verdicts):
        return TriState.yes(ev)
    if any(v.is_no for v in verdicts):
        return TriState.no(ev, "block structure fails")
    return TriState.unknown("sequential killing not established for both sides", ev)


def _dotted_record(ml: MiddleLevel, side):
    p = dot_side(ml, side)
    return {"rank": p.rank, "relators": [list(r.reduced) for r in p.relators]}


def double_cork(cork: CorkDescription, ml: MiddleLevel, b_verdict: TriState):
    """A ∪ A^{-1}: the inverse cork glued on top, with the factor swap.

    Returns (doubled description, swap record).  Needs the ball
    evidence (the addendumB verdict).
    """
    if b_verdict is None or not b_verdict.is_yes:
        raise MissingBallCertificate("doubling needs the ball certificate (addendumB)")
    a0, a1 = _dotted_record(ml, 0), _dotted_record(ml, 1)
    bottom = [{"factor": "A", "end": "A_0", "data": a0}, {"factor": "A^-1", "end": "A_1", "data": a1}]
    top = [{"factor": "A", "end": "A_1", "data": a1}, {"factor": "A^-1", "end": "A_0", "data": a0}]
    order = {"A": 0, "A^-1": 1}
    swapped = sorted(({**b, "factor": "A^-1" if b["factor"] == "A" else "A"} for b in bottom),
                     key=lambda b: order[b["factor"]])
    inverse_three = tuple({**t, "level": "above" if t["level"] == "below" else "below",
                           "name": t["name"] + "'"} for t in cork.three_handles)
    doubled = replace(cork, three_handles=cork.three_handles + inverse_three)
    record = {
        "factors": ["A", "A^-1"],
        "bottom": bottom,
        "top": top,
        "involution": "swap the two factors",
        "top_equals_swapped_bottom": swapped == top,
        "identification": {"product": "B^4 x I", "ends": ["B^4_0", "B^4_1"],
                           "ball": "A is B^5 by the addendumB certificate"},
    }
    return doubled, record


def certify_D(cork, ml, b_verdict):
    try:
        _, record = double_cork(cork, ml, b_verdict)
    except MissingBallCertificate as e:
        return TriState.unknown(str(e))
    if not record["top_equals_swapped_bottom"]:  # pragma: no cover
        return TriState.no(record, "doubled ends differ under the swap")
    return TriState.yes(record)


# -- the whole run -------------------------------------------------------------

@dataclass
class PipelineRun:
    scenario: CobordismScenario
    normalized: CobordismScenario | None = None
    ops: list = field(default_factory=list)
    middle: MiddleLevel | None = None
    kill: KillResult | None = None
    cork: CorkDescription | None = None
    stage5: SimplyConnectResult | None = None
    verdicts: dict = field(default_factory=dict)
    failure: str = ""


def run_pipeline(sc: CobordismScenario) -> PipelineRun:
    run = PipelineRun(sc)
    b = sc.budgets
    run.normalized, run.ops = stage1_normalize(sc)
    run.middle = stage2_build(run.normalized)
    run.kill = stage3_kill_generators(run.middle, b["stage3"])
    if not run.kill.verdict.is_yes:
        run.failure = f"stage 3: {run.kill.verdict.reason}"
        v = run.kill.verdict
        run.verdicts = {k: (v if k in ("theorem1", "addendumB") else TriState.unknown("stage 3 did not finish"))
                        for k in VERDICT_KEYS}
        return run
    state = run.kill.state
    try:
        run.stage5 = stage5_simply_connect(run.normalized, state, run.kill.killers, b["stage5"])
        final = run.stage5.state
        a_verdict = run.stage5.verdict
    except ComplementNotHomologyTrivial as e:
        final = state
        a_verdict = TriState.no({"complement_h1": e.witness}, str(e))
    run.cork = stage4_assemble(run.middle, final, run.kill.killers)
    s1 = normalize_record(sc, run.ops)
    B = certify_B(s1, run.cork)
    run.verdicts = {
        "theorem1": certify_theorem1(run.cork, b["theorem1"]),
        "theorem2": certify_theorem2(run.cork),
        "addendumA": a_verdict,
        "addendumB": B,
        "addendumC": certify_C(run.middle, state, run.kill.killers),
        "addendumD": certify_D(run.cork, run.middle, B),
    }
    return run


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Move):
        return x.to_json()
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def certificate(run: PipelineRun) -> dict:
    sc = run.scenario
    cert = {
        "format": FORMAT,
        "scenario_sha256": sc.digest(),
        "scenario_name": sc.name,
        "budgets": dict(sorted(sc.budgets.items())),
        "stage1": normalize_record(sc, run.ops),
        "stage3": run.kill.verdict.certificate if run.kill and run.kill.verdict.is_yes else None,
        "verdicts": {},
        "evidence": {},
    }
    if run.failure:
        cert["failure"] = run.failure
    if run.kill is not None and run.kill.verdict.is_yes:
        final = run.stage5.state if run.stage5 else run.kill.state
        cert["dual_state"] = {
            "stage3_moves": len(run.kill.state.log),
            "log": [pm.to_json() for pm in final.log],
            "final": final.summary(),
            "killers": {str(g): k for g, k in sorted(run.kill.killers.items())},
        }
        cert["cork"] = run.cork.to_json()
    for key in VERDICT_KEYS:
        v = run.verdicts[key]
        cert["verdicts"][key] = {"status": v.verdict.value, "evidence": f"evidence.{key}",
                                 "reason": v.reason}
        cert["evidence"][key] = _jsonable(v.certificate) if v.certificate is not None else None
    return cert


def dumps_certificate(cert: dict) -> str:
    return json.dumps(_jsonable(cert), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def extract(sc: CobordismScenario) -> dict:
    return certificate(run_pipeline(sc))
