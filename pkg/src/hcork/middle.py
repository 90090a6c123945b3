"""Combinatorial model of the middle level M_{1/2}.

The ascending spheres S_{0,i} and descending spheres S_{1,j} meet in
signed points.  Each point becomes a 1-handle generator; arcs inside a
sphere are represented only by the order in which the tree from that
sphere's base point reaches its points.

Conventions:

* ``intersections[(i, j)]`` lists the signs of the points of
  S_{0,i} ∩ S_{1,j} (1-based i, j).  Points are numbered globally in
  ascending (i, j, position) order; point ``p`` is generator x_p.
* The attaching circle of H_{1,i} runs out along the tree to each point p
  and back, giving ``x_p x̄_p`` for a +1 point and ``x̄_p x_p`` for a -1
  point.  H_{0,i} attaching circles cross no 1-handle, so their words are
  empty.
* The *crossing word* of a sphere lists, in tree order, one letter per
  point, with the point's sign: a +1 point contributes the positive
  letter when traversed from the S_{1,i} side.  Projecting every letter of
  the crossing word of S_{1,i} to the dotted generator y_j of its partner
  sphere S_{0,j} gives the relator of H_{1,i} in π_1(A_0).  Flipping all
  signs globally would be an equally valid convention.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .grouppres import Presentation, Word, delete_generators
from .tristate import TriState


class Ordering(str, enum.Enum):
    NATURAL = "natural"   # round-robin over partner spheres (interleaved)
    CAREFUL = "careful"   # all points with partner 1, then partner 2, ...


class DeltaViolation(ValueError):
    def __init__(self, i, j, total):
        super().__init__(f"algebraic S_0,{i} . S_1,{j} = {total}, expected {int(i == j)}")
        self.i, self.j, self.total = i, j, total


@dataclass(frozen=True)
class Point:
    ident: int        # global 1-based id, also the generator index
    i: int            # S_{0,i}
    j: int            # S_{1,j}
    sign: int


@dataclass(frozen=True)
class SpherePair:
    n: int
    intersections: Mapping[tuple[int, int], tuple[int, ...]]

    def __post_init__(self):
        clean = {}
        for (i, j), signs in dict(self.intersections).items():
            i, j = int(i), int(j)
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"sphere index ({i}, {j}) outside 1..{self.n}")
            signs = tuple(int(s) for s in signs)
            if any(s not in (1, -1) for s in signs):
                raise ValueError(f"intersection signs must be +-1, got {signs}")
            if signs:
                clean[(i, j)] = signs
        object.__setattr__(self, "intersections", dict(sorted(clean.items())))

    def points(self) -> list[Point]:
        out, k = [], 0
        for (i, j), signs in self.intersections.items():
            for s in signs:
                k += 1
                out.append(Point(k, i, j, s))
        return out

    def algebraic(self) -> list[list[int]]:
        m = [[0] * self.n for _ in range(self.n)]
        for (i, j), signs in self.intersections.items():
            m[i - 1][j - 1] = sum(signs)
        return m

    def signs(self, i, j) -> tuple[int, ...]:
        return self.intersections.get((i, j), ())

    def swapped(self) -> "SpherePair":
        """Exchange the two sphere families."""
        return SpherePair(self.n, {(j, i): s for (i, j), s in self.intersections.items()})

    def to_json(self):
        return [{"i": i, "j": j, "signs": list(s)} for (i, j), s in self.intersections.items()]

    @classmethod
    def from_json(cls, n, items):
        return cls(n, {(int(d["i"]), int(d["j"])): tuple(d["signs"]) for d in items})


def _tree_order(blocks: list[list[Point]], ordering: Ordering) -> tuple[int, ...]:
    if ordering is Ordering.CAREFUL:
        return tuple(p.ident for b in blocks for p in b)
    out = []
    for k in range(max((len(b) for b in blocks), default=0)):
        out.extend(b[k].ident for b in blocks if k < len(b))
    return tuple(out)


@dataclass(frozen=True)
class MiddleLevel:
    """Derived handle structure on M_{1/2}.

    ``arc_trees[(k, i)]`` is the order in which the tree in S_{k,i} reaches
    its points.  ``ambient_l1`` are the relators of the extra 2-handles H_l
    over all ``rank`` generators (point generators first, then the extra
    ambient 1-handles); ``ambient_l3`` their duals over ``l3_rank``
    generators of π_1(L_3).
    """

    sphere_pair: SpherePair
    ordering: Ordering
    points: tuple[Point, ...]
    arc_trees: Mapping[tuple[int, int], tuple[int, ...]]
    extra_one_handles: int = 0
    ambient_l1: tuple[Word, ...] = ()
    ambient_l3: tuple[Word, ...] = ()
    l3_rank: int = 0
    sphere_duals: Mapping[tuple[int, int], Word] = field(default_factory=dict)

    @property
    def n(self):
        return self.sphere_pair.n

    @property
    def point_count(self):
        return len(self.points)

    @property
    def rank(self):
        """Number of 1-handle generators: one per point plus the extra ambient ones."""
        return len(self.points) + self.extra_one_handles

    def point(self, ident) -> Point:
        return self.points[ident - 1]

    def h0_word(self, i) -> Word:
        return Word((), rank=self.rank)

    def h1_word(self, i) -> Word:
        raw = []
        for p in self.arc_trees[(1, i)]:
            raw += [p, -p] if self.point(p).sign > 0 else [-p, p]
        return Word(tuple(raw), rank=self.rank)

    def sphere_words(self) -> list[Word]:
        """H_{0,1..n} then H_{1,1..n}, as attaching words in π_1(L_1)."""
        return [self.h0_word(i) for i in range(1, self.n + 1)] + \
               [self.h1_word(i) for i in range(1, self.n + 1)]

    def crossing_word(self, k, i) -> Word:
        return Word(tuple(p * self.point(p).sign for p in self.arc_trees[(k, i)]), rank=self.rank)

    def partner(self, k, p) -> int:
        """Index of the sphere of the other family through point p."""
        pt = self.point(p)
        return pt.i if k == 1 else pt.j


def build_middle(sp: SpherePair, ordering=Ordering.CAREFUL, *, extra_one_handles=0,
                 ambient_l1=(), ambient_l3=(), l3_rank=0, sphere_duals=None) -> MiddleLevel:
    ordering = Ordering(ordering)
    alg = sp.algebraic()
    for i in range(sp.n):
        for j in range(sp.n):
            if alg[i][j] != int(i == j):
                raise DeltaViolation(i + 1, j + 1, alg[i][j])
    points = sp.points()
    trees = {}
    for i in range(1, sp.n + 1):
        blocks0 = [[p for p in points if p.i == i and p.j == j] for j in range(1, sp.n + 1)]
        blocks1 = [[p for p in points if p.j == i and p.i == j] for j in range(1, sp.n + 1)]
        trees[(0, i)] = _tree_order(blocks0, ordering)
        trees[(1, i)] = _tree_order(blocks1, ordering)
    rank = len(points) + extra_one_handles
    l1 = tuple(Word(tuple(w.raw if isinstance(w, Word) else w), rank=rank) for w in ambient_l1)
    l3 = tuple(Word(tuple(w.raw if isinstance(w, Word) else w), rank=l3_rank) for w in ambient_l3)
    if len(l3) != len(l1):
        raise ValueError("every ambient 2-handle needs both an L1 relator and an L3 dual")
    duals = {}
    for key, w in dict(sphere_duals or {}).items():
        duals[tuple(key)] = Word(tuple(w.raw if isinstance(w, Word) else w), rank=l3_rank)
    return MiddleLevel(sp, ordering, tuple(points), trees, extra_one_handles, l1, l3,
                       l3_rank, duals)


def extract_relators(ml: MiddleLevel) -> list[Word]:
    """Crossing words of the H_{1,i}: w_1 w_2 ... w_n, block j from S_{1,i} ∩ S_{0,j}."""
    return [ml.crossing_word(1, i) for i in range(1, ml.n + 1)]


def block_structure(ml: MiddleLevel, k: int, i: int):
    """Split the crossing word of S_{k,i} into maximal runs with one partner.

    Returns (runs, sums): ``runs`` lists (partner, letters) in order;
    ``sums[j-1]`` is the exponent sum of all letters with partner j.
    """
    runs = []
    sums = [0] * ml.n
    for p in ml.arc_trees[(k, i)]:
        j = ml.partner(k, p)
        letter = p * ml.point(p).sign
        sums[j - 1] += ml.point(p).sign
        if runs and runs[-1][0] == j:
            runs[-1][1].append(letter)
        else:
            runs.append((j, [letter]))
    return [(j, tuple(ls)) for j, ls in runs], sums


def block_sum_matrix(ml: MiddleLevel, k: int = 1) -> list[list[int]]:
    return [block_structure(ml, k, i)[1] for i in range(1, ml.n + 1)]


def dot_side(ml: MiddleLevel, side: int, killers: Sequence[Word] | None = None) -> Presentation:
    """Presentation of π_1(A_side): dots on the attaching circles of H_{side,·}.

    Without ``killers`` the contractible piece B_{1/2} is collapsed, leaving
    ⟨y_1..y_n | s_1..s_n⟩ where s_i is the crossing word of S_{1-side,i}
    with each letter replaced by its partner's y.  With ``killers`` (words
    over the 1-handle generators) the x generators are kept:
    ⟨x_1..x_R, y_1..y_n | killers, s_i⟩ with each crossing written
    x_p y_j^{±1} x̄_p and y_j numbered R + j.
    """
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    other = 1 - side
    base = 0 if killers is None else ml.rank
    rels = []
    for i in range(1, ml.n + 1):
        letters = []
        for p in ml.arc_trees[(other, i)]:
            y = base + ml.partner(other, p)
            y = y if ml.point(p).sign > 0 else -y
            letters += [y] if killers is None else [p, y, -p]
        rels.append(Word(tuple(letters)))
    if killers is None:
        return Presentation(ml.n, tuple(rels))
    return Presentation(base + ml.n, tuple(Word(tuple(k.raw)) for k in killers) + tuple(rels))


def sequential_elimination(rank: int, relators: Sequence[Word]):
    """Cancel generators one at a time, each by a relator that becomes a single letter.

    A relator cancels x_g once, after deleting every already-cancelled
    generator, it freely reduces to x_g^{±1}.  Returns the list of steps
    ``(generator, relator, reduced_before_deletion)`` or None if stuck.
    """
    done: list[int] = []
    used: set[int] = set()
    steps = []
    while len(done) < rank:
        for l, r in enumerate(relators, 1):
            if l in used:
                continue
            w = delete_generators(r.reduced, done)
            if len(w) == 1 and abs(w[0]) not in done:
                g = abs(w[0])
                done.append(g)
                used.add(l)
                steps.append((g, l, list(r.reduced)))
                break
        else:
            return None
    return steps


def check_sequential_killing(ml: MiddleLevel, killers: Sequence[Word] | None = None,
                             side: int = 0) -> TriState:
    """The 1-handles of A_side are cancelled in sequence: x's by killers, then y's.

    ``killers`` default to the first ``ml.rank`` ambient relators.  YES
    carries the elimination order and the block-exponent-sum matrix of the
    dotted relators (the identity when every crossing word is a
    concatenation w_1 .. w_n of single-partner blocks with sums δ_ij).
    UNKNOWN means the sequential argument does not apply, not that the
    group is nontrivial.
    """
    if killers is None:
        killers = ml.ambient_l1[:ml.rank]
    other = 1 - side
    sums = block_sum_matrix(ml, other)
    identity = [[int(a == b) for b in range(ml.n)] for a in range(ml.n)]
    cert = {"side": side, "block_sums": sums}
    if len(killers) < ml.rank:
        return TriState.unknown(f"{len(killers)} killers for {ml.rank} generators", cert)
    x_steps = sequential_elimination(ml.rank, killers)
    if x_steps is None:
        return TriState.unknown("killer relators do not cancel the 1-handles in sequence", cert)
    if sums != identity:
        return TriState.no(cert, "block exponent sums differ from delta_ij")
    dotted = dot_side(ml, side)
    contiguous = all(len({j for j, _ in block_structure(ml, other, i)[0]}) ==
                     len(block_structure(ml, other, i)[0]) for i in range(1, ml.n + 1))
    y_steps = sequential_elimination(ml.n, dotted.relators)
    cert.update(x_steps=x_steps, y_steps=y_steps, contiguous_blocks=contiguous,
                reduced_dotted=[list(r.reduced) for r in dotted.relators])
    if y_steps is None:
        return TriState.unknown("dotted relators do not cancel the y generators in sequence", cert)
    return TriState.yes(cert)
