"""Finite presentations with a replayable move log.

Relator and generator indices are 1-based throughout, matching the
``x_1 .. x_k`` naming of handles.  Every move returns a new
:class:`Presentation`; the original and the log travel with it, so
``replay(p)`` must rebuild ``p`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .words import Word, as_word, free_reduce, invert_letters


class PresentationError(ValueError):
    pass


class DestabilizeError(PresentationError):
    pass


@dataclass(frozen=True)
class Move:
    """One logged transformation.

    kind is one of ``slide`` (l, m, word=λ, sign), ``conjugate`` (l, word),
    ``invert`` (l), ``stabilize``, ``destabilize`` (generator, l, reindex),
    ``add_trivial`` (a new empty relator: the algebraic shadow of adding a
    cancelling 2-/3-handle pair).
    """

    kind: str
    l: int = 0
    m: int = 0
    word: tuple[int, ...] = ()
    sign: int = 1
    generator: int = 0
    reindex: tuple[tuple[int, int], ...] = ()

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "slide":
            out.update(l=self.l, m=self.m, arc=list(self.word), sign=self.sign)
        elif self.kind == "conjugate":
            out.update(l=self.l, by=list(self.word))
        elif self.kind == "invert":
            out.update(l=self.l)
        elif self.kind == "destabilize":
            out.update(generator=self.generator, l=self.l,
                       reindex={str(a): b for a, b in self.reindex})
        return out

    @classmethod
    def from_json(cls, d):
        kind = d["kind"]
        if kind == "slide":
            return cls("slide", l=int(d["l"]), m=int(d["m"]),
                       word=tuple(int(a) for a in d.get("arc", ())), sign=int(d["sign"]))
        if kind == "conjugate":
            return cls("conjugate", l=int(d["l"]), word=tuple(int(a) for a in d["by"]))
        if kind == "invert":
            return cls("invert", l=int(d["l"]))
        if kind == "destabilize":
            reindex = tuple(sorted((int(a), int(b)) for a, b in d.get("reindex", {}).items()))
            return cls("destabilize", l=int(d["l"]), generator=int(d["generator"]), reindex=reindex)
        if kind in ("stabilize", "add_trivial"):
            return cls(kind)
        raise PresentationError(f"unknown move kind {kind!r}")


@dataclass(frozen=True)
class Presentation:
    rank: int
    relators: tuple[Word, ...] = ()
    move_log: tuple[Move, ...] = ()
    initial_rank: int | None = field(default=None, repr=False)
    initial_relators: tuple[Word, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        rels = tuple(Word(as_word(r).raw, rank=self.rank) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        if self.initial_rank is None:
            object.__setattr__(self, "initial_rank", self.rank)
            object.__setattr__(self, "initial_relators", rels)

    @classmethod
    def from_lists(cls, rank: int, relators: Iterable[Sequence[int]]) -> "Presentation":
        return cls(rank, tuple(Word(tuple(r)) for r in relators))

    def restart(self) -> "Presentation":
        """The current presentation as a fresh starting point (empty log)."""
        return Presentation(self.rank, self.relators)

    def initial(self) -> "Presentation":
        return Presentation(self.initial_rank, self.initial_relators)

    def reduced_relators(self) -> tuple[tuple[int, ...], ...]:
        return tuple(r.reduced for r in self.relators)

    def same_as(self, other: "Presentation") -> bool:
        return (self.rank == other.rank
                and tuple(r.raw for r in self.relators) == tuple(r.raw for r in other.relators))

    def _check_relator(self, l):
        if not 1 <= l <= len(self.relators):
            raise PresentationError(f"relator index {l} out of range 1..{len(self.relators)}")

    def _evolve(self, rank, relators, move) -> "Presentation":
        return Presentation(rank, tuple(relators), self.move_log + (move,),
                            self.initial_rank, self.initial_relators)

    def apply(self, move: Move) -> "Presentation":
        return _APPLY[move.kind](self, move)

    def __str__(self):
        rels = ", ".join(str(r) for r in self.relators)
        gens = ", ".join(f"x{g}" for g in range(1, self.rank + 1))
        return f"<{gens} | {rels}>"


def _apply_slide(p: Presentation, mv: Move) -> Presentation:
    l, m = mv.l, mv.m
    p._check_relator(l)
    p._check_relator(m)
    if l == m:
        raise PresentationError("a relator cannot slide over itself")
    if mv.sign not in (1, -1):
        raise PresentationError(f"slide sign must be +-1, got {mv.sign}")
    if any(abs(a) > p.rank or a == 0 for a in mv.word):
        raise PresentationError(f"arc {mv.word} outside rank {p.rank}")
    target = p.relators[m - 1].reduced
    if mv.sign < 0:
        target = invert_letters(target)
    lam = free_reduce(mv.word)
    rels = list(p.relators)
    rels[l - 1] = Word(p.relators[l - 1].raw + lam + target + invert_letters(lam))
    return p._evolve(p.rank, rels, mv)


def _apply_conjugate(p: Presentation, mv: Move) -> Presentation:
    p._check_relator(mv.l)
    if any(abs(a) > p.rank or a == 0 for a in mv.word):
        raise PresentationError(f"conjugator {mv.word} outside rank {p.rank}")
    g = free_reduce(mv.word)
    rels = list(p.relators)
    rels[mv.l - 1] = Word(g + p.relators[mv.l - 1].raw + invert_letters(g))
    return p._evolve(p.rank, rels, mv)


def _apply_invert(p: Presentation, mv: Move) -> Presentation:
    p._check_relator(mv.l)
    rels = list(p.relators)
    rels[mv.l - 1] = Word(invert_letters(p.relators[mv.l - 1].raw))
    return p._evolve(p.rank, rels, mv)


def _apply_stabilize(p: Presentation, mv: Move) -> Presentation:
    rank = p.rank + 1
    return p._evolve(rank, p.relators + (Word((rank,)),), mv)


def _apply_add_trivial(p: Presentation, mv: Move) -> Presentation:
    return p._evolve(p.rank, p.relators + (Word(()),), mv)


def _apply_destabilize(p: Presentation, mv: Move) -> Presentation:
    g, l = mv.generator, mv.l
    if not 1 <= g <= p.rank:
        raise DestabilizeError(f"generator {g} out of range")
    p._check_relator(l)
    if p.relators[l - 1].reduced not in ((g,), (-g,)):
        raise DestabilizeError(f"relator {l} is not the single letter x{g}")
    for k, r in enumerate(p.relators, 1):
        if k != l and g in r.letters():
            raise DestabilizeError(f"x{g} also occurs in relator {k}")
    expected = _reindex_map(p.rank, g)
    if mv.reindex and mv.reindex != expected:
        raise DestabilizeError(f"reindex map {mv.reindex} does not match {expected}")
    shift = dict(expected)

    def move_letter(a):
        return shift[a] if a > 0 else -shift[-a]

    # deleting x_g commutes with free reduction, so raw forms stay consistent
    rels = [Word(tuple(move_letter(a) for a in r.raw if abs(a) != g))
            for k, r in enumerate(p.relators, 1) if k != l]
    return p._evolve(p.rank - 1, rels, Move("destabilize", l=l, generator=g, reindex=expected))


def _reindex_map(rank, g):
    return tuple((a, a if a < g else a - 1) for a in range(1, rank + 1) if a != g)


_APPLY = {
    "slide": _apply_slide,
    "conjugate": _apply_conjugate,
    "invert": _apply_invert,
    "stabilize": _apply_stabilize,
    "destabilize": _apply_destabilize,
    "add_trivial": _apply_add_trivial,
}


def tietze_slide(p: Presentation, l: int, m: int, lam=(), sign: int = 1) -> Presentation:
    """Replace relator l by r_l · λ · r_m^sign · λ̄."""
    lam = as_word(lam).reduced
    return p.apply(Move("slide", l=l, m=m, word=lam, sign=sign))


def conjugate(p: Presentation, l: int, g) -> Presentation:
    return p.apply(Move("conjugate", l=l, word=as_word(g).reduced))


def invert(p: Presentation, l: int) -> Presentation:
    return p.apply(Move("invert", l=l))


def stabilize(p: Presentation) -> Presentation:
    return p.apply(Move("stabilize"))


def add_trivial_relator(p: Presentation) -> Presentation:
    return p.apply(Move("add_trivial"))


def destabilize(p: Presentation, g: int) -> Presentation:
    """Remove x_g together with a relator that is exactly x_g (or its inverse)."""
    for l, r in enumerate(p.relators, 1):
        if r.reduced in ((g,), (-g,)):
            return p.apply(Move("destabilize", l=l, generator=g))
    raise DestabilizeError(f"no relator equal to x{g}")


def replay(moves: Iterable[Move], start: Presentation) -> Presentation:
    p = start
    for mv in moves:
        p = p.apply(mv)
    return p


def replay_log(p: Presentation) -> Presentation:
    return replay(p.move_log, p.initial())


def abelianize(p: Presentation) -> list[list[int]]:
    """Relator-by-generator matrix of exponent sums."""
    rows = []
    for r in p.relators:
        row = [0] * p.rank
        for a in r.reduced:
            row[abs(a) - 1] += 1 if a > 0 else -1
        rows.append(row)
    return rows


def is_trivial_presentation(p: Presentation) -> bool:
    """True when single-letter relators mention every generator.

    For a balanced presentation this is ⟨x_1..x_k | x_1, ..., x_k⟩ up to
    relabelling and inverting relators; extra relators of an over-determined
    presentation are then consequences and are ignored.
    """
    covered = {abs(r.reduced[0]) for r in p.relators if len(r.reduced) == 1}
    return covered == set(range(1, p.rank + 1))


# -- text format -----------------------------------------------------------

def parse_presentation(text: str) -> Presentation:
    """Parse ``rank k`` followed by one relator per line (``1 -2 1``; ``e`` is empty)."""
    rank = None
    rels = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if rank is None:
            head = line.split()
            if len(head) != 2 or head[0] != "rank":
                raise PresentationError(f"line {n}: expected 'rank <k>'")
            rank = int(head[1])
            continue
        if line == "e":
            rels.append(())
            continue
        try:
            letters = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise PresentationError(f"line {n}: bad relator {line!r}") from None
        if any(a == 0 or abs(a) > rank for a in letters):
            raise PresentationError(f"line {n}: letter outside rank {rank}")
        rels.append(letters)
    if rank is None:
        raise PresentationError("missing 'rank' line")
    return Presentation.from_lists(rank, rels)


def format_presentation(p: Presentation) -> str:
    lines = [f"rank {p.rank}"]
    for r in p.relators:
        lines.append(" ".join(str(a) for a in r.reduced) if r.reduced else "e")
    return "\n".join(lines) + "\n"


def presentation_to_json(p: Presentation, with_log=True):
    out = {"rank": p.rank, "relators": [list(r.reduced) for r in p.relators],
           "raw": [list(r.raw) for r in p.relators]}
    if with_log:
        out["initial"] = {"rank": p.initial_rank,
                          "relators": [list(r.raw) for r in p.initial_relators]}
        out["moves"] = [mv.to_json() for mv in p.move_log]
    return out


def presentation_from_json(d) -> Presentation:
    if "initial" in d:
        start = Presentation.from_lists(d["initial"]["rank"], d["initial"]["relators"])
        return replay((Move.from_json(m) for m in d.get("moves", ())), start)
    raws = d.get("raw", d["relators"])
    return Presentation.from_lists(d["rank"], raws)
