"""Exact integer matrices for handle chain complexes.

Entries are Python ints (arbitrary precision).  Every reduction records
the elementary row/column operations it performs so that a caller can
replay them, or translate each one back into a handle slide.  Op indices
are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class NonUnimodular(ValueError):
    def __init__(self, det):
        super().__init__(f"matrix is not unimodular (det = {det})")
        self.det = det


class ComplexInvalid(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
                                   cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        return IntMatrix.from_rows(
            [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
             for i in range(self.rows)], cols=other.cols)

    def is_zero(self):
        return not any(self.entries)

    def is_identity(self):
        return self.rows == self.cols and self == IntMatrix.identity(self.rows)

    @property
    def shape(self):
        return (self.rows, self.cols)


def determinant(m: IntMatrix) -> int:
    """Fraction-free Bareiss elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = m.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


# -- elementary operations -------------------------------------------------

@dataclass(frozen=True)
class RowColOp:
    """An integer-invertible elementary operation.

    ``add_row(i, j, c)``: row_i += c * row_j;  ``add_col(i, j, c)``: col_i += c * col_j;
    ``swap_rows(i, j)``, ``swap_cols(i, j)``, ``negate_row(i)``, ``negate_col(i)``.
    """

    kind: str
    i: int
    j: int = 0
    c: int = 0

    def is_row(self):
        return self.kind.endswith("row") or self.kind.endswith("rows")

    def inverse(self) -> "RowColOp":
        if self.kind in ("add_row", "add_col"):
            return RowColOp(self.kind, self.i, self.j, -self.c)
        return self

    def to_json(self):
        out = {"kind": self.kind, "i": self.i}
        if self.kind.startswith(("add", "swap")):
            out["j"] = self.j
        if self.kind.startswith("add"):
            out["c"] = self.c
        return out

    @classmethod
    def from_json(cls, d):
        return cls(d["kind"], int(d["i"]), int(d.get("j", 0)), int(d.get("c", 0)))

    def __str__(self):
        if self.kind.startswith("add"):
            what = "row" if self.kind == "add_row" else "col"
            return f"{what}{self.i} += {self.c}*{what}{self.j}"
        if self.kind.startswith("swap"):
            return f"{self.kind}({self.i},{self.j})"
        return f"{self.kind}({self.i})"


_KINDS = {"add_row", "add_col", "swap_rows", "swap_cols", "negate_row", "negate_col"}


def _apply_inplace(a: list[list[int]], op: RowColOp):
    if op.kind not in _KINDS:
        raise ValueError(f"unknown op {op.kind!r}")
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    limit = nrows if op.is_row() else ncols
    i, j = op.i - 1, op.j - 1
    if not 0 <= i < limit or (op.kind[:3] in ("add", "swa") and not 0 <= j < limit):
        raise ValueError(f"op {op} out of range")
    if op.kind == "add_row":
        if i == j:
            raise ValueError("add_row needs distinct rows")
        a[i] = [x + op.c * y for x, y in zip(a[i], a[j])]
    elif op.kind == "add_col":
        if i == j:
            raise ValueError("add_col needs distinct columns")
        for r in a:
            r[i] += op.c * r[j]
    elif op.kind == "swap_rows":
        a[i], a[j] = a[j], a[i]
    elif op.kind == "swap_cols":
        for r in a:
            r[i], r[j] = r[j], r[i]
    elif op.kind == "negate_row":
        a[i] = [-x for x in a[i]]
    else:
        for r in a:
            r[i] = -r[i]


def apply_ops(m: IntMatrix, ops: Iterable[RowColOp]) -> IntMatrix:
    a = m.to_rows()
    for op in ops:
        _apply_inplace(a, op)
    return IntMatrix(m.rows, m.cols, tuple(e for r in a for e in r))


class _Recorder:
    def __init__(self, m: IntMatrix):
        self.a = m.to_rows()
        self.ops: list[RowColOp] = []

    def do(self, kind, i, j=0, c=0):
        op = RowColOp(kind, i + 1, j + 1 if kind[:3] in ("add", "swa") else 0, c)
        _apply_inplace(self.a, op)
        self.ops.append(op)


def _min_pivot(a, s):
    best = None
    for i in range(s, len(a)):
        for j in range(s, len(a[0])):
            v = a[i][j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return best


def _clear_cross(rec: _Recorder, s: int):
    """Pivot at (s, s) and clear its row and column by minimal-|value| pivoting."""
    a = rec.a
    while True:
        best = _min_pivot(a, s)
        if best is None:
            return False
        _, i, j = best
        # prefer a pivot already in row/col s to avoid needless swaps
        if a[s][s] and abs(a[s][s]) == best[0]:
            i, j = s, s
        if i != s:
            rec.do("swap_rows", s, i)
        if j != s:
            rec.do("swap_cols", s, j)
        p = a[s][s]
        done = True
        for r in range(s + 1, len(a)):
            q = a[r][s] // p
            if q:
                rec.do("add_row", r, s, -q)
            if a[r][s]:
                done = False
        for c in range(s + 1, len(a[0])):
            q = a[s][c] // p
            if q:
                rec.do("add_col", c, s, -q)
            if a[s][c]:
                done = False
        if done:
            return True


def unimodular_reduce(m: IntMatrix) -> tuple[list[RowColOp], IntMatrix]:
    """Reduce a square matrix of determinant ±1 to the identity.

    Returns the op sequence and the result; replaying the ops on ``m`` gives
    the identity.  Raises :class:`NonUnimodular` carrying the determinant
    otherwise.
    """
    if m.rows != m.cols:
        raise ValueError(f"unimodular_reduce needs a square matrix, got {m.rows}x{m.cols}")
    det = determinant(m)
    if abs(det) != 1:
        raise NonUnimodular(det)
    rec = _Recorder(m)
    for s in range(m.rows):
        _clear_cross(rec, s)
        if rec.a[s][s] == -1:
            rec.do("negate_row", s)
    result = IntMatrix.from_rows(rec.a, cols=m.cols)
    assert result.is_identity()
    return rec.ops, result


@dataclass(frozen=True)
class SmithForm:
    diagonal: IntMatrix
    row_ops: tuple[RowColOp, ...]
    col_ops: tuple[RowColOp, ...]
    ops: tuple[RowColOp, ...] = field(repr=False, default=())

    @property
    def divisors(self) -> list[int]:
        d = self.diagonal
        return [d[k, k] for k in range(min(d.rows, d.cols))]

    def reconstruct(self) -> IntMatrix:
        """Undo the recorded ops on the diagonal form, giving back the input."""
        return apply_ops(self.diagonal, [op.inverse() for op in reversed(self.ops)])


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form d_1 | d_2 | ... with all d_k >= 0."""
    rec = _Recorder(m)
    a = rec.a
    n = min(m.rows, m.cols)
    s = 0
    while s < n:
        if not _clear_cross(rec, s):
            break
        # enforce divisibility: fold an offending row into row s and redo
        p = a[s][s]
        bad = next(((r, c) for r in range(s + 1, m.rows) for c in range(s + 1, m.cols)
                    if a[r][c] % p), None)
        if bad is not None:
            rec.do("add_row", s, bad[0], 1)
            continue
        if p < 0:
            rec.do("negate_row", s)
        s += 1
    diag = IntMatrix.from_rows(rec.a, cols=m.cols) if m.rows else IntMatrix(0, m.cols)
    ops = tuple(rec.ops)
    return SmithForm(diag, tuple(o for o in ops if o.is_row()),
                     tuple(o for o in ops if not o.is_row()), ops)


def rank_of(m: IntMatrix) -> int:
    return sum(1 for d in smith_normal_form(m).divisors if d)


def cokernel(m: IntMatrix) -> tuple[int, tuple[int, ...]]:
    """(free rank, torsion divisors) of Z^rows / image(m)."""
    divs = [d for d in smith_normal_form(m).divisors if d]
    return m.rows - len(divs), tuple(d for d in divs if d > 1)


# -- homology ----------------------------------------------------------------

@dataclass(frozen=True)
class HomologyGroups:
    free_rank: dict
    torsion: dict

    def __post_init__(self):
        for k, divs in self.torsion.items():
            if any(d <= 1 for d in divs):
                raise ValueError(f"degree {k}: torsion divisors must exceed 1")
            if any(b % a for a, b in zip(divs, divs[1:])):
                raise ValueError(f"degree {k}: divisors {divs} do not form a chain")

    def group(self, k) -> tuple[int, tuple[int, ...]]:
        return self.free_rank.get(k, 0), tuple(self.torsion.get(k, ()))

    def is_zero(self, k) -> bool:
        return self.group(k) == (0, ())

    def describe(self, k) -> str:
        free, tors = self.group(k)
        parts = [f"Z/{d}" for d in tors]
        if free:
            parts.append("Z" if free == 1 else f"Z^{free}")
        return " + ".join(parts) if parts else "0"

    def degrees(self):
        return sorted(set(self.free_rank) | set(self.torsion))

    def to_json(self):
        return {str(k): {"free": self.free_rank.get(k, 0), "torsion": list(self.torsion.get(k, ()))}
                for k in self.degrees()}

    def __str__(self):
        return ", ".join(f"H{k} = {self.describe(k)}" for k in self.degrees())


def homology_from_complex(boundaries: dict, ranks: dict | None = None) -> HomologyGroups:
    """Homology of a chain complex given by boundary maps.

    ``boundaries[k]`` is the matrix of d_k: C_k -> C_{k-1} (rows index C_{k-1}).
    Chain ranks come from the matrix shapes; ``ranks`` supplies (or checks)
    them for degrees whose maps are absent.
    """
    ranks = dict(ranks or {})
    for k, d in boundaries.items():
        for deg, size in ((k, d.cols), (k - 1, d.rows)):
            if ranks.setdefault(deg, size) != size:
                raise ComplexInvalid(f"d_{k} has shape {d.shape}, but C_{deg} has rank {ranks[deg]}")
    degrees = sorted(ranks)
    for k in degrees:
        dk, dk1 = boundaries.get(k), boundaries.get(k + 1)
        if dk is not None and dk1 is not None and not (dk @ dk1).is_zero():
            raise ComplexInvalid(f"d_{k} o d_{k + 1} != 0")
    free, torsion = {}, {}
    for k in degrees:
        dk, dk1 = boundaries.get(k), boundaries.get(k + 1)
        rk_out = rank_of(dk) if dk is not None else 0
        if dk1 is not None:
            divs = [d for d in smith_normal_form(dk1).divisors if d]
        else:
            divs = []
        free[k] = ranks[k] - rk_out - len(divs)
        tors = tuple(d for d in divs if d > 1)
        if tors:
            torsion[k] = tors
    return HomologyGroups(free, torsion)


# -- text format -------------------------------------------------------------

def parse_matrix(text: str) -> IntMatrix:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be 'rows cols'")
    rows, cols = int(head[0]), int(head[1])
    body = [[int(t) for t in ln.split()] for ln in lines[1:]]
    if len(body) != rows or any(len(r) != cols for r in body):
        raise ValueError(f"expected {rows} rows of {cols} integers")
    return IntMatrix.from_rows(body, cols=cols)


def format_matrix(m: IntMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"] + [" ".join(str(e) for e in r) for r in m.to_rows()]
    return "\n".join(lines) + "\n"
