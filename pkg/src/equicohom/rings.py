"""Exact coefficient rings: the integers, the rationals and prime fields."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational


class RingError(ValueError):
    pass


@dataclass(frozen=True)
class Ring:
    """A coefficient ring tag with elementwise arithmetic.

    ``kind`` is ``"Z"``, ``"Q"`` or ``"F"``; ``p`` is the characteristic of a
    prime field and 0 otherwise.  Elements are Python ``int`` for Z and F_p
    (reduced into ``range(p)``) and ``Fraction`` for Q.
    """

    kind: str
    p: int = 0

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def tag(self) -> str:
        return f"Fp:{self.p}" if self.kind == "F" else self.kind

    def __str__(self) -> str:
        return {"Z": "ℤ", "Q": "ℚ"}.get(self.kind, f"F_{self.p}")

    def __call__(self, x) -> int | Fraction:
        if isinstance(x, (list, tuple)):
            if len(x) != 2:
                raise RingError(f"rational entries are [numerator, denominator] pairs, got {x!r}")
            x = Fraction(int(x[0]), int(x[1]))
        if isinstance(x, bool):
            x = int(x)
        if self.kind == "Z":
            if isinstance(x, Integral):
                return int(x)
            if isinstance(x, Rational) and x.denominator == 1:
                return int(x.numerator)
            raise RingError(f"{x!r} is not an integer")
        if self.kind == "Q":
            if isinstance(x, Rational):
                return Fraction(x)
            raise RingError(f"{x!r} is not rational")
        if isinstance(x, Integral):
            return int(x) % self.p
        if isinstance(x, Rational):
            den = int(x.denominator) % self.p
            if den == 0:
                raise RingError(f"denominator of {x} vanishes mod {self.p}")
            return int(x.numerator) * pow(den, -1, self.p) % self.p
        raise RingError(f"{x!r} cannot be read in {self}")

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def norm(self, x):
        return x % self.p if self.kind == "F" else x

    def is_zero(self, x) -> bool:
        return self.norm(x) == 0

    def is_unit(self, x) -> bool:
        if self.kind == "Z":
            return x in (1, -1)
        return not self.is_zero(x)

    def inv(self, x):
        if self.kind == "Z":
            if x in (1, -1):
                return x
            raise RingError(f"{x} is not a unit in ℤ")
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Q":
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise RingError(f"{p} is not prime")
    return Ring("F", p)


def parse_ring(tag: str) -> Ring:
    """Read ``Z``, ``Q``, ``Fp:p`` (or ``Fp``/``F_p`` shorthand like ``F5``)."""
    t = tag.strip()
    if t in ("Z", "ZZ"):
        return ZZ
    if t in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "F_", "F", "GF"):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            return GF(int(t[len(prefix):]))
    raise RingError(f"unknown ring tag {tag!r} (expected Z, Q or Fp:p)")
