"""Bounded, deterministic searches over Andrews-Curtis style moves.

Triviality of a presentation is only semidecidable, so every search here
takes a node budget and may answer ``UNKNOWN``.  The search is best-first
on total relator length, ties broken by depth and then by the fixed move
enumeration order: destabilize, slide by ascending (l, m, |λ|), conjugate,
invert, stabilize.  Identical inputs therefore give identical move lists.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from ..intmat import IntMatrix, smith_normal_form
from ..tristate import TriState
from .presentation import Move, Presentation, abelianize, is_trivial_presentation, replay
from .words import Word, free_reduce, invert_letters

DEFAULT_BUDGET = 20_000


@dataclass(frozen=True)
class SearchConfig:
    budget: int = DEFAULT_BUDGET
    max_arc: int = 1
    extra_generators: int = 4     # stabilization cap above the starting rank
    extra_relators: int = 2       # cap on add_trivial moves (killing search)
    allow_destabilize: bool = True
    allow_stabilize: bool = True
    allow_add_trivial: bool = False


def abelian_obstruction(p: Presentation):
    """Return a witness that H_1 of the presented group is nonzero, or None."""
    rows = abelianize(p)
    m = IntMatrix.from_rows(rows, cols=p.rank) if rows else IntMatrix.zeros(0, p.rank)
    divs = [d for d in smith_normal_form(m).divisors if d]
    free = p.rank - len(divs)
    torsion = [d for d in divs if d > 1]
    if free == 0 and not torsion:
        return None
    return {"rank": p.rank, "abelianization": rows, "smith_divisors": divs,
            "h1_free_rank": free, "h1_torsion": torsion}


def _arcs(rank, max_arc):
    letters = [s * g for g in range(1, rank + 1) for s in (1, -1)]
    out = [()]
    for n in range(1, max_arc + 1):
        for w in itertools.product(letters, repeat=n):
            if free_reduce(w) == w:
                out.append(w)
    return out


def _successors(rank, rels, cfg: SearchConfig, base_rank, base_count):
    """Yield (move, rank, rels) in the fixed enumeration order."""
    n = len(rels)
    if cfg.allow_destabilize:
        for g in range(1, rank + 1):
            for l, r in enumerate(rels):
                if len(r) == 1 and abs(r[0]) == g:
                    if all(g not in map(abs, s) for k, s in enumerate(rels) if k != l):
                        def shift(a, g=g):
                            b = abs(a)
                            b = b - 1 if b > g else b
                            return b if a > 0 else -b
                        new = tuple(tuple(shift(a) for a in s) for k, s in enumerate(rels) if k != l)
                        yield Move("destabilize", l=l + 1, generator=g), rank - 1, new
                    break
    arcs = _arcs(rank, cfg.max_arc)
    for l in range(n):
        for m in range(n):
            if l == m or not rels[m]:
                continue
            for lam in arcs:
                ilam = invert_letters(lam)
                for sign in (1, -1):
                    t = rels[m] if sign > 0 else invert_letters(rels[m])
                    new_l = free_reduce(rels[l] + lam + t + ilam)
                    new = rels[:l] + (new_l,) + rels[l + 1:]
                    yield Move("slide", l=l + 1, m=m + 1, word=lam, sign=sign), rank, new
    for l in range(n):
        if not rels[l]:
            continue
        for g in (s * g for g in range(1, rank + 1) for s in (1, -1)):
            new_l = free_reduce((g,) + rels[l] + (-g,))
            yield Move("conjugate", l=l + 1, word=(g,)), rank, rels[:l] + (new_l,) + rels[l + 1:]
    for l in range(n):
        if len(rels[l]) > 1:
            new_l = invert_letters(rels[l])
            yield Move("invert", l=l + 1), rank, rels[:l] + (new_l,) + rels[l + 1:]
    if cfg.allow_stabilize and rank < base_rank + cfg.extra_generators:
        yield Move("stabilize"), rank + 1, rels + ((rank + 1,),)
    if cfg.allow_add_trivial and n < base_count + cfg.extra_relators:
        yield Move("add_trivial"), rank, rels + ((),)


def _covered(rank, rels):
    return {abs(r[0]) for r in rels if len(r) == 1} == set(range(1, rank + 1))


def _best_first(p: Presentation, cfg: SearchConfig, goal=_covered):
    start = (p.rank, p.reduced_relators())
    if goal(*start):
        return [], 0
    counter = itertools.count()
    parents = {start: None}
    heap = [(sum(map(len, start[1])), 0, next(counter), start)]
    expanded = 0
    while heap and expanded < cfg.budget:
        _, depth, _, state = heapq.heappop(heap)
        expanded += 1
        for move, rank, rels in _successors(*state, cfg, p.rank, len(p.relators)):
            nxt = (rank, rels)
            if nxt in parents:
                continue
            parents[nxt] = (state, move)
            if goal(rank, rels):
                path = []
                while parents[nxt] is not None:
                    nxt, mv = parents[nxt]
                    path.append(mv)
                path.reverse()
                return path, expanded
            heapq.heappush(heap, (sum(map(len, rels)), depth + 1, next(counter), nxt))
    return None, expanded


def trivialize_search(p: Presentation, budget: int = DEFAULT_BUDGET,
                      config: SearchConfig | None = None) -> TriState:
    """Look for moves turning ``p`` into a trivial presentation.

    YES carries ``{"moves": [...], "expanded": n}``; NO carries an
    abelianization witness; UNKNOWN means the node budget ran out.
    """
    cfg = config or SearchConfig(budget=budget)
    obstruction = abelian_obstruction(p)
    if obstruction is not None:
        return TriState.no(obstruction, "H_1 of the presented group is nonzero")
    path, expanded = _best_first(p, cfg)
    if path is None:
        return TriState.unknown(f"no trivialization within {cfg.budget} nodes",
                                {"expanded": expanded})
    return TriState.yes({"moves": path, "expanded": expanded})


def verify_trivialization(p: Presentation, moves) -> bool:
    """Replay ``moves`` from ``p`` (no search) and test for the trivial presentation."""
    try:
        end = replay(moves, p.restart())
    except ValueError:
        return False
    return is_trivial_presentation(end)


def normally_generates(relators, rank: int, budget: int = DEFAULT_BUDGET) -> TriState:
    """Does the normal closure of ``relators`` fill the free group of ``rank``?"""
    p = Presentation(rank, tuple(r if isinstance(r, Word) else Word(tuple(r)) for r in relators))
    return trivialize_search(p, budget)


def kill_generators_search(p: Presentation, budget: int = DEFAULT_BUDGET,
                           extra_relators: int = 2, max_arc: int = 1) -> TriState:
    """Slide relators until every generator has a relator reducing to it alone.

    Unlike :func:`trivialize_search` no generator may be removed; the only
    stabilization is ``add_trivial`` (a spare relator, i.e. a cancelling
    2-/3-handle pair).  YES carries the moves plus the generator-to-relator
    assignment of the final state.
    """
    obstruction = abelian_obstruction(p)
    if obstruction is not None:
        return TriState.no(obstruction, "relators cannot kill every generator")
    cfg = SearchConfig(budget=budget, max_arc=max_arc, extra_relators=extra_relators,
                       allow_destabilize=False, allow_stabilize=False, allow_add_trivial=True)
    path, expanded = _best_first(p, cfg)
    if path is None:
        return TriState.unknown(f"generators not killed within {budget} nodes",
                                {"expanded": expanded})
    end = replay(path, p.restart())
    # make every killer the positive letter
    killers = {}
    for l, r in enumerate(end.relators, 1):
        if len(r.reduced) == 1 and abs(r.reduced[0]) not in killers:
            killers[abs(r.reduced[0])] = l
    for g in sorted(killers):
        if end.relators[killers[g] - 1].reduced[0] < 0:
            mv = Move("invert", l=killers[g])
            path.append(mv)
            end = end.apply(mv)
    return TriState.yes({"moves": path, "expanded": expanded,
                         "killers": {g: killers[g] for g in sorted(killers)}})


def eliminate_by_killers(p: Presentation):
    """Constructive trivialization when relators cancel generators in sequence.

    While some relator reduces to a single letter x_g^{±1}, every other
    occurrence of x_g is removed: for r = u x_g^e v, conjugating by ū
    gives x_g^e v u, and a slide over the killer along λ = (v u)^{-1}
    leaves v u.  Returns the move list, or None if some generator never
    gets a killer.
    """
    cur = p.restart()
    moves = []
    done: set[int] = set()

    def do(mv):
        nonlocal cur
        cur = cur.apply(mv)
        moves.append(mv)

    while True:
        rels = cur.reduced_relators()
        if _covered(cur.rank, rels):
            return moves
        pick = None
        for k, r in enumerate(rels):
            if len(r) == 1 and abs(r[0]) not in done:
                pick = k
                break
        if pick is None:
            return None
        g, s = abs(rels[pick][0]), (1 if rels[pick][0] > 0 else -1)
        done.add(g)
        for l in range(len(rels)):
            if l == pick:
                continue
            while True:
                r = cur.relators[l].reduced
                pos = next((q for q, a in enumerate(r) if abs(a) == g), None)
                if pos is None:
                    break
                e = 1 if r[pos] > 0 else -1
                u, v = r[:pos], r[pos + 1:]
                if u:
                    do(Move("conjugate", l=l + 1, word=invert_letters(u)))
                do(Move("slide", l=l + 1, m=pick + 1, word=invert_letters(free_reduce(v + u)),
                        sign=-e * s))
