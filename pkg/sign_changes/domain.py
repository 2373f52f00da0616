"""
Shared domain types.

Rho, SignPattern and ProbEstimate travel between every module, so they live
here rather than in any one of them.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Tuple, Union

from sign_changes.errors import DomainError


class Method(Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    QMC = "qmc"
    MC = "mc"


class EstimateStatus(Enum):
    CONVERGED = "converged"
    NOT_CONVERGED = "not_converged"


@dataclass(frozen=True)
class Rho:
    """A lag-one serial correlation, strictly inside (-1, 1)."""
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", check_rho(self.value))

    def __float__(self) -> float:
        return float(self.value)


RhoLike = Union[float, int, Rho]


def check_rho(r: RhoLike) -> float:
    """Return r as a float, raising DomainError unless |r| < 1."""
    value = float(r.value) if isinstance(r, Rho) else float(r)
    if not math.isfinite(value):
        raise DomainError(f"rho must be finite, got {value!r}")
    if abs(value) >= 1.0:
        raise DomainError(f"rho must satisfy |rho| < 1, got {value!r}")
    return value


@dataclass(frozen=True)
class SignPattern:
    """
    An n-bit vector e selecting the orthant {(-1)^e_i X_i < 0 for all i}.

    Bit 1 means X_i > 0, bit 0 means X_i < 0.
    """
    bits: Tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise DomainError("a sign pattern needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"sign pattern bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        text = text.strip()
        if not text or any(ch not in "01" for ch in text):
            raise DomainError(f"sign pattern must be a string of 0/1 bits, got {text!r}")
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def coerce(cls, pattern: Union["SignPattern", str, Tuple[int, ...]]) -> "SignPattern":
        if isinstance(pattern, SignPattern):
            return pattern
        if isinstance(pattern, str):
            return cls.parse(pattern)
        return cls(tuple(pattern))

    @classmethod
    def all_patterns(cls, n: int) -> Iterator["SignPattern"]:
        """All 2^n patterns in binary counting order, 00..0 first."""
        if n < 1:
            raise DomainError(f"pattern length must be >= 1, got {n}")
        for index in range(2 ** n):
            yield cls(tuple((index >> (n - 1 - i)) & 1 for i in range(n)))

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def changes(self) -> int:
        """Number of adjacent positions whose bits differ."""
        return sum(1 for a, b in zip(self.bits, self.bits[1:]) if a != b)

    @property
    def signs(self) -> Tuple[float, ...]:
        """+1.0 where X_i > 0 is required, -1.0 where X_i < 0 is."""
        return tuple(1.0 if b else -1.0 for b in self.bits)

    def complement(self) -> "SignPattern":
        return SignPattern(tuple(1 - b for b in self.bits))

    def reversed(self) -> "SignPattern":
        return SignPattern(tuple(reversed(self.bits)))


@dataclass
class ProbEstimate:
    """A probability with the method that produced it and its absolute error."""
    value: float
    error: float = 0.0
    method: Method = Method.CLOSED_FORM
    evaluations: int = 0
    status: EstimateStatus = EstimateStatus.CONVERGED
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.error < 0:
            raise DomainError(f"error estimate must be non-negative, got {self.error}")
        # Rounding in an estimator can push a probability a hair outside [0, 1].
        self.value = min(max(self.value, 0.0), 1.0)

    @property
    def converged(self) -> bool:
        return self.status == EstimateStatus.CONVERGED

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error": self.error,
            "method": self.method.value,
            "evaluations": self.evaluations,
            "status": self.status.value,
            "metadata": self.metadata,
        }
