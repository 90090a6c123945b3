"""Words in free groups.

A letter is a nonzero int: ``g`` is the generator x_g and ``-g`` its
inverse.  A :class:`Word` keeps the letters exactly as they were
concatenated (``raw``) next to the freely reduced form (``reduced``);
the raw traversal matters for the handle-cancellation arguments, the
reduced form for everything group-theoretic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class AlphabetMismatch(ValueError):
    """Two words over free groups of different rank were combined."""


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


def invert_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-a for a in reversed(letters))


def cyclic_reduce(letters: Sequence[int]) -> tuple[int, ...]:
    w = free_reduce(letters)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]


@dataclass(frozen=True)
class Word:
    raw: tuple[int, ...] = ()
    rank: int | None = field(default=None, compare=False)
    reduced: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        raw = tuple(int(a) for a in self.raw)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "reduced", free_reduce(raw))
        if self.rank is not None:
            bad = [a for a in raw if abs(a) > self.rank]
            if bad:
                raise AlphabetMismatch(f"letter {bad[0]} outside rank {self.rank}")

    @classmethod
    def of(cls, *letters, rank=None):
        return cls(tuple(letters), rank=rank)

    def __len__(self):
        return len(self.reduced)

    def __iter__(self):
        return iter(self.reduced)

    @property
    def is_trivial(self):
        return not self.reduced

    def canonical(self) -> "Word":
        """The reduced form as a word of its own (raw history dropped)."""
        return Word(self.reduced, rank=self.rank)

    def letters(self) -> set[int]:
        return {abs(a) for a in self.reduced}

    def __mul__(self, other):
        return mul(self, other)

    def __invert__(self):
        return inv(self)

    def __str__(self):
        return format_letters(self.reduced)


def format_letters(letters: Sequence[int]) -> str:
    if not letters:
        return "1"
    return "".join(f"x{a}" if a > 0 else f"X{-a}" for a in letters)


def _joint_rank(*words: Word):
    ranks = {w.rank for w in words if w.rank is not None}
    if len(ranks) > 1:
        raise AlphabetMismatch(f"words over ranks {sorted(ranks)}")
    return ranks.pop() if ranks else None


def as_word(w) -> Word:
    return w if isinstance(w, Word) else Word(tuple(w))


def reduce(w: Word) -> Word:
    """Freely reduce ``w``; the returned word keeps ``w.raw`` alongside."""
    return Word(w.raw, rank=w.rank)


def mul(*words: Word) -> Word:
    words = tuple(as_word(w) for w in words)
    rank = _joint_rank(*words)
    raw: tuple[int, ...] = ()
    for w in words:
        raw += w.raw
    return Word(raw, rank=rank)


def inv(a: Word) -> Word:
    a = as_word(a)
    return Word(invert_letters(a.raw), rank=a.rank)


def conj(a: Word, g: Word) -> Word:
    """``a`` conjugated by ``g``: g·a·ḡ."""
    return mul(g, a, inv(g))


def comm(a: Word, b: Word) -> Word:
    """The commutator a·b·ā·b̄."""
    return mul(a, b, inv(a), inv(b))


def power(a: Word, e: int) -> Word:
    a = as_word(a)
    base = a if e >= 0 else inv(a)
    return mul(*([base] * abs(e))) if e else Word((), rank=a.rank)


def exponent_sum(w: Word, g: int) -> int:
    return sum((1 if a > 0 else -1) for a in as_word(w).reduced if abs(a) == g)


def delete_generators(letters: Sequence[int], gens) -> tuple[int, ...]:
    """Drop every letter of the given generators (sets them to 1) and reduce."""
    gens = set(gens)
    return free_reduce(a for a in letters if abs(a) not in gens)


def commutator_factors(w: Word) -> list[tuple[Word, Word, Word]]:
    """Write a word with zero exponent sums as a product of conjugated commutators.

    Returns ``[(a, b, c), ...]`` with ``w == prod [a, b]^c`` in the free group
    (``x^c = c x c̄``).  Works by bubble-sorting letters by generator index;
    each adjacent swap ``u a b v -> u b a v`` splits off ``[ā, b̄]^{v̄}``.
    """
    w = as_word(w)
    gens = {abs(a) for a in w.reduced}
    if any(exponent_sum(w, g) for g in gens):
        raise ValueError("word is not in the commutator subgroup")
    cur = list(w.reduced)
    split: list[tuple[Word, Word, Word]] = []
    while cur:
        for k in range(len(cur) - 1):
            a, b = cur[k], cur[k + 1]
            if (abs(a), a < 0) > (abs(b), b < 0):
                v = tuple(cur[k + 2:])
                split.append((Word((-a,)), Word((-b,)), Word(invert_letters(v))))
                cur = list(free_reduce(cur[:k] + [b, a] + cur[k + 2:]))
                break
        else:
            # sorted with zero exponent sums and still nonempty cannot happen
            raise AssertionError(f"stuck sorting {cur}")
    split.reverse()
    return split
