"""Three-valued verdicts for semidecidable checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class TriState:
    """A verdict plus the evidence backing it.

    ``YES`` and ``NO`` must carry a certificate; ``UNKNOWN`` carries a
    reason (usually budget exhaustion).
    """

    verdict: Verdict
    certificate: Any = None
    reason: str = ""

    def __post_init__(self):
        if self.verdict is not Verdict.UNKNOWN and self.certificate is None:
            raise ValueError(f"{self.verdict.value} verdict needs a certificate")

    @classmethod
    def yes(cls, certificate, reason=""):
        return cls(Verdict.YES, certificate, reason)

    @classmethod
    def no(cls, certificate, reason=""):
        return cls(Verdict.NO, certificate, reason)

    @classmethod
    def unknown(cls, reason, certificate=None):
        return cls(Verdict.UNKNOWN, certificate, reason)

    @property
    def is_yes(self):
        return self.verdict is Verdict.YES

    @property
    def is_no(self):
        return self.verdict is Verdict.NO

    @property
    def is_unknown(self):
        return self.verdict is Verdict.UNKNOWN

    def __repr__(self):
        tail = f", {self.reason!r}" if self.reason else ""
        return f"TriState({self.verdict.value}{tail})"
