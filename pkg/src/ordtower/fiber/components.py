"""Component indices (a, b, u) of the special fiber and unit bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd


@dataclass(frozen=True, order=True)
class ComponentIndex:
    a: int
    b: int
    u: int = 1

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be nonnegative")

    @property
    def r(self) -> int:
        return self.a + self.b

    @property
    def level(self) -> int:
        """The Igusa level max(a, b) of this component."""
        return max(self.a, self.b)

    @property
    def unit_level(self) -> int:
        return min(self.a, self.b)

    def __str__(self):
        return f"({self.a},{self.b},{self.u})"


def units(p: int, k: int) -> list:
    """Representatives of (Z/p^k)^x; the trivial group for k = 0 is [1]."""
    if k <= 0:
        return [1]
    m = p ** k
    return [u for u in range(1, m) if u % p]


def lifts(u: int, p: int, lo: int, hi: int) -> list:
    """u' in (Z/p^hi)^x with u' = u mod p^lo."""
    if hi < lo:
        raise ValueError("cannot lift to a smaller modulus")
    base = p ** lo
    return [v for v in units(p, hi) if lo == 0 or (v - u) % base == 0]


def reduce_unit(u: int, p: int, k: int) -> int:
    return 1 if k <= 0 else u % p ** k


def check_index(c: ComponentIndex, p: int, r: int) -> None:
    if c.r != r:
        raise ValueError(f"{c} does not have a + b = {r}")
    k = c.unit_level
    if k == 0:
        if c.u != 1:
            raise ValueError(f"{c}: the unit group is trivial, u must be 1")
    elif not (0 < c.u < p ** k and gcd(c.u, p) == 1):
        raise ValueError(f"{c}: u must be a unit mod p^{k}")


def list_components(p: int, r: int) -> list:
    if r < 1:
        raise ValueError("r must be at least 1")
    out = []
    for a in range(r, -1, -1):
        b = r - a
        for u in units(p, min(a, b)):
            out.append(ComponentIndex(a, b, u))
    return out
