"""Paired handle slides on π_1(L_1) and π_1(L_3).

Every 2-handle of M_{1/2} gives a relator r in the generators of
π_1(L_1) (its attaching circle) and a dual relator r' in the generators of
π_1(L_3) (its belt circle).  A :class:`DualState` keeps both presentations
with relator k of one paired with relator k of the other, and every move
is applied to both sides at once:

* sliding H_α over H_β along an arc λ (sign ε) sends
  r_α -> r_α λ r_β^ε λ̄ and, dually, r'_β -> r'_β λ̄' r'_α^ε λ';
* a double slide (over along λ, back along μ) therefore gives
  r_α [μ̄λ, r_β]^μ and r'_β [μ'λ̄', r'_α]^{μ̄'}.

An arc is an :class:`ArcClass`: its images in both fundamental groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .grouppres import (Move, Presentation, Word, conj, delete_generators, free_reduce, inv,
                        invert_letters, mul, normally_generates)
from .grouppres.words import as_word, comm


class SlideError(ValueError):
    pass


class MalformedWitness(ValueError):
    pass


class WitnessInsufficient(ValueError):
    pass


@dataclass(frozen=True)
class ArcClass:
    g1: Word = Word(())
    g3: Word = Word(())

    def __post_init__(self):
        object.__setattr__(self, "g1", as_word(self.g1))
        object.__setattr__(self, "g3", as_word(self.g3))

    @classmethod
    def of(cls, g1=(), g3=()):
        return cls(Word(tuple(g1)), Word(tuple(g3)))

    def to_json(self):
        return {"g1": list(self.g1.reduced), "g3": list(self.g3.reduced)}

    @classmethod
    def from_json(cls, d):
        return cls.of(d.get("g1", ()), d.get("g3", ()))


@dataclass(frozen=True)
class PairedMove:
    """One move applied to both sides; ``args`` are JSON-ready."""

    kind: str
    args: tuple = ()

    def to_json(self):
        return {"kind": self.kind, "args": _jsonify(self.args)}

    @classmethod
    def from_json(cls, d):
        return cls(d["kind"], _tuplify(d.get("args", [])))


def _jsonify(x):
    if isinstance(x, (tuple, list)):
        return [_jsonify(v) for v in x]
    return x


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


@dataclass(frozen=True)
class DualState:
    l1: Presentation
    l3: Presentation
    labels: tuple[str, ...]
    pairing: tuple[int, ...] = ()
    log: tuple[PairedMove, ...] = ()
    spare_pairs: int = 0
    initial: "DualState | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(self.l1.relators) != n or len(self.l3.relators) != n:
            raise SlideError(f"{len(self.l1.relators)} L1 relators, {len(self.l3.relators)} "
                             f"L3 relators, {n} handles")
        if not self.pairing:
            object.__setattr__(self, "pairing", tuple(range(1, n + 1)))
        if sorted(self.pairing) != list(range(1, n + 1)):
            raise SlideError("pairing is not a bijection")

    @classmethod
    def start(cls, l1: Presentation, l3: Presentation, labels: Sequence[str]) -> "DualState":
        s = cls(l1.restart(), l3.restart(), tuple(labels))
        object.__setattr__(s, "initial", s)
        return s

    @property
    def handle_count(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label) + 1

    def r(self, k) -> Word:
        return self.l1.relators[k - 1]

    def dual(self, k) -> Word:
        return self.l3.relators[self.pairing[k - 1] - 1]

    def _next(self, l1, l3, pm, labels=None, spare=0) -> "DualState":
        s = DualState(l1, l3, labels or self.labels, self.pairing + tuple(
            range(len(self.pairing) + 1, len((labels or self.labels)) + 1)),
            self.log + (pm,), self.spare_pairs + spare, self.initial)
        return s

    def apply(self, pm: PairedMove) -> "DualState":
        return _PAIRED[pm.kind](self, *pm.args)

    def summary(self):
        return {
            "handles": list(self.labels),
            "l1_rank": self.l1.rank,
            "l3_rank": self.l3.rank,
            "l1": [list(r.reduced) for r in self.l1.relators],
            "l3": [list(r.reduced) for r in self.l3.relators],
            "spare_pairs": self.spare_pairs,
        }


def _check_pair(s: DualState, a, b):
    for k in (a, b):
        if not 1 <= k <= s.handle_count:
            raise SlideError(f"no 2-handle {k}")
    if a == b:
        raise SlideError("a handle cannot slide over itself")


def _slide(s: DualState, alpha, beta, g1, g3, sign):
    _check_pair(s, alpha, beta)
    l1 = s.l1.apply(Move("slide", l=alpha, m=beta, word=tuple(g1), sign=sign))
    l3 = s.l3.apply(Move("slide", l=s.pairing[beta - 1], m=s.pairing[alpha - 1],
                         word=invert_letters(free_reduce(g3)), sign=sign))
    return l1, l3


def _do_slide(s, alpha, beta, g1, g3, sign):
    l1, l3 = _slide(s, alpha, beta, g1, g3, sign)
    return s._next(l1, l3, PairedMove("slide", (alpha, beta, tuple(g1), tuple(g3), sign)))


def _do_double(s, alpha, beta, lam1, lam3, mu1, mu3):
    _check_pair(s, alpha, beta)
    a1 = s.l1.apply(Move("slide", l=alpha, m=beta, word=tuple(lam1), sign=1))
    a1 = a1.apply(Move("slide", l=alpha, m=beta, word=tuple(mu1), sign=-1))
    pa, pb = s.pairing[alpha - 1], s.pairing[beta - 1]
    a3 = s.l3.apply(Move("slide", l=pb, m=pa, word=invert_letters(free_reduce(lam3)), sign=1))
    a3 = a3.apply(Move("slide", l=pb, m=pa, word=invert_letters(free_reduce(mu3)), sign=-1))
    return s._next(a1, a3, PairedMove("double_slide",
                                      (alpha, beta, tuple(lam1), tuple(lam3), tuple(mu1), tuple(mu3))))


def _do_conjugate(s, l, g1, g3):
    l1 = s.l1.apply(Move("conjugate", l=l, word=tuple(g1)))
    l3 = s.l3.apply(Move("conjugate", l=s.pairing[l - 1], word=tuple(g3)))
    return s._next(l1, l3, PairedMove("conjugate", (l, tuple(g1), tuple(g3))))


def _do_invert(s, l):
    l1 = s.l1.apply(Move("invert", l=l))
    l3 = s.l3.apply(Move("invert", l=s.pairing[l - 1]))
    return s._next(l1, l3, PairedMove("invert", (l,)))


def _do_add_23(s, label):
    l1 = s.l1.apply(Move("add_trivial"))
    l3 = s.l3.apply(Move("stabilize"))
    return s._next(l1, l3, PairedMove("add_23_pair", (label,)), s.labels + (label,))


def _do_add_12(s, label):
    l1 = s.l1.apply(Move("stabilize"))
    l3 = s.l3.apply(Move("add_trivial"))
    return s._next(l1, l3, PairedMove("add_12_pair", (label,)), s.labels + (label,), spare=1)


_PAIRED = {
    "slide": _do_slide,
    "double_slide": _do_double,
    "conjugate": _do_conjugate,
    "invert": _do_invert,
    "add_23_pair": _do_add_23,
    "add_12_pair": _do_add_12,
}


def slide(s: DualState, alpha: int, beta: int, arc: ArcClass = ArcClass(), sign: int = 1) -> DualState:
    """Slide H_α over H_β once along ``arc``."""
    return _do_slide(s, alpha, beta, arc.g1.reduced, arc.g3.reduced, sign)


def double_slide(s: DualState, alpha: int, beta: int, lam: ArcClass, mu: ArcClass) -> DualState:
    """Slide H_α over H_β along λ and back along μ."""
    return _do_double(s, alpha, beta, lam.g1.reduced, lam.g3.reduced, mu.g1.reduced, mu.g3.reduced)


def add_23_pair(s: DualState, label: str) -> DualState:
    """Cancelling 2-/3-handle pair: empty relator in L_1, new generator and its relator in L_3."""
    return _do_add_23(s, label)


def add_12_pair(s: DualState, label: str) -> DualState:
    """Cancelling 1-/2-handle pair: new generator and its relator in L_1, empty dual in L_3."""
    return _do_add_12(s, label)


def replay_state(s: DualState) -> DualState:
    """Re-run the paired log from the recorded initial state."""
    if s.initial is None:
        raise SlideError("state has no recorded initial state")
    out = s.initial
    for pm in s.log:
        out = out.apply(pm)
    return out


def states_match(a: DualState, b: DualState) -> bool:
    return (a.labels == b.labels and a.pairing == b.pairing and a.spare_pairs == b.spare_pairs
            and a.l1.same_as(b.l1) and a.l3.same_as(b.l3))


# -- arc realization ---------------------------------------------------------

@dataclass(frozen=True)
class ToriData:
    """The loops γ_{α,1}, γ_{α,3} on the boundary torus of each 2-handle.

    Each loop is stored by its images in both groups.  As printed, the
    γ_{α,1} are trivial in π_1(L_1) and normally generate π_1(L_3); the
    γ_{α,3} are trivial in π_1(L_3) and normally generate π_1(L_1).
    """

    gamma1: tuple[ArcClass, ...]
    gamma3: tuple[ArcClass, ...]
    l1_rank: int
    l3_rank: int

    def __post_init__(self):
        if len(self.gamma1) != len(self.gamma3):
            raise ValueError("one pair of loops per 2-handle")
        for a, g in enumerate(self.gamma1, 1):
            if not g.g1.is_trivial:
                raise ValueError(f"gamma_{a},1 must be trivial in pi_1(L_1)")
        for a, g in enumerate(self.gamma3, 1):
            if not g.g3.is_trivial:
                raise ValueError(f"gamma_{a},3 must be trivial in pi_1(L_3)")

    @classmethod
    def from_state(cls, s: DualState) -> "ToriData":
        g1 = tuple(ArcClass(Word(()), s.dual(k).canonical()) for k in range(1, s.handle_count + 1))
        g3 = tuple(ArcClass(s.r(k).canonical(), Word(())) for k in range(1, s.handle_count + 1))
        return cls(g1, g3, s.l1.rank, s.l3.rank)

    def witnesses(self, budget) -> dict:
        """Normal-generation checks for both loop families."""
        return {
            "gamma1_generate_l3": normally_generates([g.g3 for g in self.gamma1], self.l3_rank, budget),
            "gamma3_generate_l1": normally_generates([g.g1 for g in self.gamma3], self.l1_rank, budget),
        }


@dataclass(frozen=True)
class Factor:
    family: int          # 1 or 3: which loop family
    handle: int          # α
    conjugator: tuple[int, ...]
    sign: int

    def to_json(self):
        return {"family": self.family, "handle": self.handle,
                "conjugator": list(self.conjugator), "sign": self.sign}


def evaluate_expression(factors: Sequence[Factor], tori: ToriData) -> ArcClass:
    """Images of a product of conjugated loops.

    A conjugator of a family-3 factor only matters in L_1 (the loop dies in
    L_3) and vice versa, so each conjugator is read in that one group.
    """
    g1, g3 = Word(()), Word(())
    for f in factors:
        loops = tori.gamma3 if f.family == 3 else tori.gamma1
        loop = loops[f.handle - 1]
        piece = loop.g1 if f.family == 3 else loop.g3
        piece = piece if f.sign > 0 else inv(piece)
        piece = conj(piece, Word(f.conjugator))
        if f.family == 3:
            g1 = mul(g1, piece).canonical()
        else:
            g3 = mul(g3, piece).canonical()
    return ArcClass(g1, g3)


def _conjugators(rank, max_len):
    letters = [s * g for g in range(1, rank + 1) for s in (1, -1)]
    out = [()]
    for n in range(1, max_len + 1):
        out += [w for w in itertools.product(letters, repeat=n) if free_reduce(w) == w]
    return out


def _express(target, loops, rank, family, budget, max_factors, max_conj):
    """Shortest product of conjugates of ``loops`` equal to ``target`` (BFS)."""
    target = free_reduce(target)
    if not target:
        return []
    pieces = []
    for c in _conjugators(rank, max_conj):
        for a, loop in enumerate(loops, 1):
            if not loop:
                continue
            for sign in (1, -1):
                body = loop if sign > 0 else invert_letters(loop)
                pieces.append((Factor(family, a, c, sign), free_reduce(c + body + invert_letters(c))))
    frontier = {(): []}
    seen = {()}
    nodes = 0
    for _ in range(max_factors):
        nxt = {}
        for word, path in frontier.items():
            for factor, piece in pieces:
                nodes += 1
                if nodes > budget:
                    return None
                w = free_reduce(word + piece)
                if w in seen:
                    continue
                seen.add(w)
                if w == target:
                    return path + [factor]
                nxt[w] = path + [factor]
        frontier = nxt
    return None


def realize_arc_class(target: ArcClass, tori: ToriData, budget: int = 200_000,
                      max_factors: int = 4, max_conjugator: int = 1) -> list[Factor]:
    """Build a loop in Q with images (target.g1, target.g3).

    The L_1 part is a product of conjugates of γ_{·,3} (trivial in L_3),
    the L_3 part one of conjugates of γ_{·,1}; the loop is their composite.
    Raises :class:`WitnessInsufficient` when the bounded search fails.
    """
    part1 = _express(target.g1.reduced, [g.g1.reduced for g in tori.gamma3], tori.l1_rank,
                     3, budget, max_factors, max_conjugator)
    part3 = _express(target.g3.reduced, [g.g3.reduced for g in tori.gamma1], tori.l3_rank,
                     1, budget, max_factors, max_conjugator)
    if part1 is None or part3 is None:
        side = "L1" if part1 is None else "L3"
        raise WitnessInsufficient(f"no {side} expression within {max_factors} factors")
    return part1 + part3


# -- killing commutators in the complement ----------------------------------

@dataclass(frozen=True)
class WitnessFactor:
    relator: int              # DualState handle index whose dual relator is used
    conjugator: tuple[int, ...]
    sign: int = 1

    def to_json(self):
        return {"relator": self.relator, "conjugator": list(self.conjugator), "sign": self.sign}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["relator"]), tuple(d.get("conjugator", ())), int(d.get("sign", 1)))


@dataclass(frozen=True)
class CommutatorTarget:
    """Multiply dual relator ``relator`` by [a, b]^c, b given as a product
    of conjugated dual relators."""

    relator: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    c: tuple[int, ...]
    b_witness: tuple[WitnessFactor, ...]

    def to_json(self):
        return {"relator": self.relator, "a": list(self.a), "b": list(self.b), "c": list(self.c),
                "b_witness": [f.to_json() for f in self.b_witness]}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["relator"]), tuple(d["a"]), tuple(d["b"]), tuple(d.get("c", ())),
                   tuple(WitnessFactor.from_json(f) for f in d["b_witness"]))


def evaluate_witness(s: DualState, factors: Sequence[WitnessFactor]) -> tuple[int, ...]:
    letters: tuple[int, ...] = ()
    for f in factors:
        if not 1 <= f.relator <= s.handle_count:
            raise MalformedWitness(f"witness refers to missing handle {f.relator}")
        r = s.dual(f.relator).reduced
        r = r if f.sign > 0 else invert_letters(r)
        c = free_reduce(f.conjugator)
        letters = free_reduce(letters + c + r + invert_letters(c))
    return letters


def kill_commutators(s: DualState, targets: Sequence[CommutatorTarget]) -> DualState:
    """Replace each targeted dual relator r'_l by r'_l ∏_j [a_j, b_j]^{c_j}.

    For every target a spare cancelling 1-/2-handle pair is added on the A
    side.  The witness handles are slid over the spare so that the spare's
    dual represents b; then the spare is slid over H_l and back along arcs
    that are trivial in π_1(L_1) with L_3 images μ' = c̄ and λ' = ā c̄, so
    μ'λ̄' = a and μ̄' = c.  The spare's own L_1 relator keeps its reduced
    form; the witness handles' L_1 relators pick up letters of the spare
    generator only (they still cancel their own 1-handles once the spares
    are cancelled).
    """
    for t in targets:
        if not 1 <= t.relator <= s.handle_count:
            raise MalformedWitness(f"target relator {t.relator} does not exist")
        b = free_reduce(t.b)
        if evaluate_witness(s, t.b_witness) != b:
            raise MalformedWitness(f"witness for b = {list(b)} evaluates to "
                                   f"{list(evaluate_witness(s, t.b_witness))}")
        expected = free_reduce(s.dual(t.relator).reduced +
                               conj(comm(Word(t.a), Word(b)), Word(t.c)).reduced)
        s = add_12_pair(s, f"S{s.spare_pairs + 1}")
        spare = s.handle_count
        for f in t.b_witness:
            s = slide(s, f.relator, spare, ArcClass.of((), invert_letters(free_reduce(f.conjugator))),
                      f.sign)
        if s.dual(spare).reduced != b:
            raise MalformedWitness("spare dual does not represent b")  # pragma: no cover
        a, c = free_reduce(t.a), free_reduce(t.c)
        mu3 = invert_letters(c)
        lam3 = invert_letters(c + a)
        s = double_slide(s, spare, t.relator, ArcClass.of((), lam3), ArcClass.of((), mu3))
        assert s.dual(t.relator).reduced == expected
    return s


def l1_projection(s: DualState, upto: int | None = None) -> list[tuple[int, ...]]:
    """Reduced L_1 relators of the first ``upto`` handles with spare generators deleted."""
    spares = [g for g in range(1, s.l1.rank + 1) if g > s.l1.initial_rank]
    upto = s.handle_count if upto is None else upto
    return [delete_generators(s.r(k).reduced, spares) for k in range(1, upto + 1)]
