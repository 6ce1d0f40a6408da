"""Tail-index parity classification.

Every correction formula changes shape between even-integer, odd-integer
and non-integer tail indices, so the split is made in exactly one place.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

INTEGER_TOL = 1e-9


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    NONINTEGER = "non-integer"


@dataclass(frozen=True)
class ParityClass:
    tag: Parity
    value: float

    @classmethod
    def of(cls, alpha: float) -> "ParityClass":
        k = round(alpha)
        if abs(alpha - k) < INTEGER_TOL:
            return cls(Parity.EVEN if k % 2 == 0 else Parity.ODD, float(k))
        return cls(Parity.NONINTEGER, float(alpha))

    @property
    def is_integer(self) -> bool:
        return self.tag is not Parity.NONINTEGER

    @property
    def order(self) -> int:
        """Integer value of the index; only meaningful for integer classes."""
        if not self.is_integer:
            raise ValueError(f"{self.value} is not an integer tail index")
        return int(round(self.value))


def as_parity(alpha: float, parity: ParityClass | None) -> ParityClass:
    return ParityClass.of(alpha) if parity is None else parity
