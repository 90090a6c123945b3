"""Framed links with dotted circles, at the level of linking matrices.

A diagram records, per component, whether it is a dotted circle
(a 1-handle) or an integer-framed 2-handle, plus the symmetric linking
matrix (framings on the diagonal, 0 on the diagonal for dotted circles).
No planar crossing data is kept: all homology below is a linking-matrix
computation.  Linking numbers are taken with the orientations fixed in the
diagram file; the Akbulut fixture uses lk(K_0, K_1) = +1.

Component indices are 0-based (``K_0``, ``K_1``, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .intmat import IntMatrix, cokernel, homology_from_complex, HomologyGroups
from .tristate import TriState

DOTTED = "dotted"
FRAMED = "framed"


class DiagramError(ValueError):
    pass


class TradeRequiresZeroFramedUnknot(DiagramError):
    pass


class PermNotInvolution(DiagramError):
    pass


@dataclass(frozen=True)
class Component:
    role: str
    framing: int = 0
    unknot: bool = True

    def __post_init__(self):
        if self.role not in (DOTTED, FRAMED):
            raise DiagramError(f"unknown role {self.role!r}")
        if self.role == DOTTED and (self.framing != 0 or not self.unknot):
            raise DiagramError("a dotted circle must be an unknot with no framing")

    @property
    def dotted(self):
        return self.role == DOTTED


@dataclass(frozen=True)
class KirbyDiagram:
    components: tuple[Component, ...]
    linking: tuple[tuple[int, ...], ...]
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        comps = tuple(self.components)
        lk = tuple(tuple(int(e) for e in row) for row in self.linking)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "linking", lk)
        n = len(comps)
        if len(lk) != n or any(len(row) != n for row in lk):
            raise DiagramError(f"linking matrix must be {n}x{n}")
        for i in range(n):
            for j in range(i):
                if lk[i][j] != lk[j][i]:
                    raise DiagramError(f"linking matrix not symmetric at ({i}, {j})")
            expected = 0 if comps[i].dotted else comps[i].framing
            if lk[i][i] != expected:
                raise DiagramError(f"diagonal entry {i} is {lk[i][i]}, expected {expected}")
        dots = [i for i in range(n) if comps[i].dotted]
        for a in dots:
            for b in dots:
                if a < b and lk[a][b]:
                    raise DiagramError(f"dotted circles {a} and {b} are linked")

    @classmethod
    def build(cls, roles: Sequence, linking, unknots=None, metadata=None):
        """``roles`` holds ``"dotted"`` or an integer framing per component."""
        unknots = unknots or [True] * len(roles)
        comps = tuple(Component(DOTTED) if r == DOTTED else Component(FRAMED, int(r), bool(u))
                      for r, u in zip(roles, unknots))
        return cls(comps, tuple(map(tuple, linking)), dict(metadata or {}))

    def __len__(self):
        return len(self.components)

    def dotted_indices(self):
        return [i for i, c in enumerate(self.components) if c.dotted]

    def framed_indices(self):
        return [i for i, c in enumerate(self.components) if not c.dotted]

    def to_json(self):
        comps = []
        for c in self.components:
            d = {"role": c.role, "unknot": c.unknot}
            if not c.dotted:
                d["framing"] = c.framing
            comps.append(d)
        out = {"components": comps, "linking": [list(r) for r in self.linking]}
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_json(cls, d):
        comps = tuple(Component(c["role"], int(c.get("framing", 0)), bool(c.get("unknot", False)))
                      for c in d["components"])
        return cls(comps, tuple(tuple(r) for r in d["linking"]), dict(d.get("metadata", {})))


def akbulut_cork() -> KirbyDiagram:
    """The symmetric two-component link of 0-framed unknots with 2-handles on both.

    Only linking data is committed to: the spheres S_0, S_1 meet in three
    points of signs (+, +, -), so lk(K_0, K_1) = 1.  The link is not the
    unlink, which is why only one component at a time may be traded.
    """
    meta = {
        "name": "akbulut",
        "sphere_intersection_signs": [1, 1, -1],
        "not_unlink": True,
        "unchecked_assertions": [
            "id: boundary(A_0) -> boundary(A_1) does not extend to a diffeomorphism A_0 -> A_1",
        ],
    }
    return KirbyDiagram.build([0, 0], [[0, 1], [1, 0]], metadata=meta)


def four_manifold_homology(d: KirbyDiagram) -> HomologyGroups:
    """Cellular homology of the 4-manifold: one 0-handle, dots as 1-handles, framed as 2-handles."""
    dots, framed = d.dotted_indices(), d.framed_indices()
    d2 = IntMatrix.from_rows([[d.linking[f][c] for f in framed] for c in dots], cols=len(framed))
    d1 = IntMatrix.zeros(1, len(dots))
    return homology_from_complex({1: d1, 2: d2})


def boundary_homology(d: KirbyDiagram) -> HomologyGroups:
    """H_1 of the boundary 3-manifold: cokernel of the full linking matrix.

    Dotted circles count as 0-framed 2-handles here; trading does not change
    the boundary.
    """
    n = len(d)
    m = IntMatrix.from_rows(d.linking, cols=n) if n else IntMatrix.zeros(0, 0)
    free, torsion = cokernel(m)
    return HomologyGroups({1: free}, {1: torsion} if torsion else {})


def trade_handle(d: KirbyDiagram, c: int) -> KirbyDiagram:
    """Swap component ``c`` between a dotted circle and a 0-framed 2-handle.

    A dotted circle always trades back.  A framed component must be a
    0-framed unknot; it also may not link another dotted circle, since the
    dotted circles together must bound disjoint disks.
    """
    if not 0 <= c < len(d):
        raise DiagramError(f"no component {c}")
    comp = d.components[c]
    if comp.dotted:
        new = Component(FRAMED, 0, True)
    else:
        if comp.framing != 0 or not comp.unknot:
            raise TradeRequiresZeroFramedUnknot(
                f"component {c} has framing {comp.framing}, unknot={comp.unknot}")
        linked = [k for k in d.dotted_indices() if d.linking[c][k]]
        if linked:
            raise TradeRequiresZeroFramedUnknot(
                f"component {c} links dotted circle(s) {linked}; the dotted circles would not form an unlink")
        new = Component(DOTTED)
    comps = d.components[:c] + (new,) + d.components[c + 1:]
    return KirbyDiagram(comps, d.linking, dict(d.metadata))


def apply_involution(d: KirbyDiagram, perm: Sequence[int]) -> tuple[KirbyDiagram, bool]:
    """Relabel components by ``perm`` (component i goes to perm[i]).

    Returns the permuted diagram and whether it equals ``d``.
    """
    n = len(d)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise PermNotInvolution(f"{perm} is not a permutation of {n} components")
    if any(perm[perm[i]] != i for i in range(n)):
        raise PermNotInvolution(f"{perm} is not an involution")
    comps = [None] * n
    lk = [[0] * n for _ in range(n)]
    for i in range(n):
        comps[perm[i]] = d.components[i]
        for j in range(n):
            lk[perm[i]][perm[j]] = d.linking[i][j]
    out = KirbyDiagram(tuple(comps), tuple(map(tuple, lk)), dict(d.metadata))
    return out, out == d


@dataclass(frozen=True)
class GeneralizedCorkSpec:
    """2n disks D_{0,i}, D_{1,i} in a contractible B_{1/2}.

    ``algebraic_intersections[i][j]`` is D_{0,i} . D_{1,j}.  The two
    disjointness flags record D_{0,i} ∩ D_{0,j} = ∅ and D_{1,i} ∩ D_{1,j} = ∅.
    """

    n: int
    algebraic_intersections: tuple[tuple[int, ...], ...]
    family0_disjoint: bool = True
    family1_disjoint: bool = True
    metadata: dict = field(default_factory=lambda: {
        "concordance_conjecture": "never evaluated; see concordance_conjecture()"},
        compare=False, hash=False)

    def __post_init__(self):
        m = tuple(tuple(int(e) for e in row) for row in self.algebraic_intersections)
        object.__setattr__(self, "algebraic_intersections", m)
        if len(m) != self.n or any(len(r) != self.n for r in m):
            raise DiagramError(f"intersection matrix must be {self.n}x{self.n}")


def concordance_conjecture(spec: GeneralizedCorkSpec) -> bool:
    """Whether the product structure on the sides extends over the cork.

    Conjecturally equivalent to D being concordant to the boundary sum of n
    standard cross-disk pairs.  Deliberately unimplemented.
    """
    raise NotImplementedError("open conjecture; not decidable from linking data")


def build_generalized_cork(spec: GeneralizedCorkSpec) -> tuple[KirbyDiagram, TriState]:
    """Skeleton diagram with 0-framed 2-handles on every ∂D, components ordered
    D_{0,1..n} then D_{1,1..n}; validity says whether the disks qualify."""
    n = spec.n
    lk = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            lk[i][n + j] = lk[n + j][i] = spec.algebraic_intersections[i][j]
    diagram = KirbyDiagram.build([0] * (2 * n), lk, metadata={"name": f"generalized-cork-n{n}"})
    problems = []
    if not spec.family0_disjoint:
        problems.append("D_0 disks intersect each other")
    if not spec.family1_disjoint:
        problems.append("D_1 disks intersect each other")
    off = [[i + 1, j + 1, v] for i, row in enumerate(spec.algebraic_intersections)
           for j, v in enumerate(row) if v != int(i == j)]
    if off:
        problems.append("algebraic intersections differ from delta_ij")
    if problems:
        return diagram, TriState.no({"problems": problems, "entries_off_delta": off})
    return diagram, TriState.yes({"delta_ij": True, "disjoint_families": True})
