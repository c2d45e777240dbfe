"""Non-field coefficient rings: Z/p^m, truncated cyclotomic rings and Q."""
from __future__ import annotations

from fractions import Fraction

from .fields import AlgebraError, FiniteField, NotInvertibleError, PrimeField, GF, is_prime


class PAdicTruncation:
    """Z/p^m, a finite-precision stand-in for Z_p."""

    is_field = False

    def __init__(self, p: int, m: int):
        if not is_prime(p) or p <= 2:
            raise AlgebraError("p must be an odd prime")
        if m < 1:
            raise AlgebraError("precision must be positive")
        self.p, self.m = p, m
        self.modulus = p ** m

    def __repr__(self):
        return f"Z/{self.p}^{self.m}"

    def __eq__(self, other):
        return isinstance(other, PAdicTruncation) and (other.p, other.m) == (self.p, self.m)

    def __hash__(self):
        return hash(("Zp", self.p, self.m))

    def describe(self):
        return {"variant": "p-adic-truncation", "p": self.p, "m": self.m}

    @property
    def characteristic(self):
        return self.modulus

    zero, one = 0, 1

    def canonical(self, a):
        return int(a) % self.modulus

    def from_int(self, n):
        return n % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def is_zero(self, a):
        return a % self.modulus == 0

    def eq(self, a, b):
        return (a - b) % self.modulus == 0

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertibleError(f"{a} is not a unit in {self}")
        return pow(int(a), -1, self.modulus)

    def valuation(self, a):
        a %= self.modulus
        if a == 0:
            return self.m
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def residue_field(self):
        return PrimeField(self.p)

    def to_residue(self, a):
        return a % self.p


def cyclotomic_coeffs(p: int, r: int) -> list:
    """Phi_{p^r}(x) = sum_{i<p} x^(i p^(r-1)), low-to-high."""
    step = p ** (r - 1)
    out = [0] * ((p - 1) * step + 1)
    for i in range(p):
        out[i * step] = 1
    return out


class TruncatedCyclotomic:
    """Z[x]/(Phi_{p^r}(x), p^m), modelling Z_p[mu_{p^r}] to precision p^m.

    Elements are tuples of length phi(p^r).  The ring is local with maximal
    ideal (p, x-1) and residue field F_p; reduction sends x to 1.
    """

    is_field = False

    def __init__(self, p: int, r: int, m: int):
        if not is_prime(p) or p <= 2:
            raise AlgebraError("p must be an odd prime")
        if r < 1 or m < 1:
            raise AlgebraError("r and m must be positive")
        self.p, self.r, self.m = p, r, m
        self.modulus = p ** m
        self.phi = cyclotomic_coeffs(p, r)
        self.n = len(self.phi) - 1

    def __repr__(self):
        return f"Z[zeta_{self.p}^{self.r}]/{self.p}^{self.m}"

    def __eq__(self, other):
        return (isinstance(other, TruncatedCyclotomic)
                and (other.p, other.r, other.m) == (self.p, self.r, self.m))

    def __hash__(self):
        return hash(("cyc", self.p, self.r, self.m))

    def describe(self):
        return {"variant": "truncated-cyclotomic", "p": self.p, "r": self.r, "m": self.m}

    @property
    def characteristic(self):
        return self.modulus

    @property
    def zero(self):
        return (0,) * self.n

    @property
    def one(self):
        return (1,) + (0,) * (self.n - 1)

    @property
    def zeta(self):
        return self.canonical([0, 1])

    def canonical(self, a):
        if isinstance(a, int):
            a = [a]
        coeffs = [int(c) for c in a]
        # reduce modulo the monic Phi
        for k in range(len(coeffs) - 1, self.n - 1, -1):
            c = coeffs[k]
            if c:
                for j in range(self.n + 1):
                    coeffs[k - self.n + j] -= c * self.phi[j]
        coeffs = (coeffs + [0] * self.n)[: self.n]
        return tuple(c % self.modulus for c in coeffs)

    def from_int(self, n):
        return self.canonical([n])

    def add(self, a, b):
        return tuple((x + y) % self.modulus for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.modulus for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.modulus for x in a)

    def mul(self, a, b):
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self.canonical(prod)

    def is_zero(self, a):
        return not any(a)

    def eq(self, a, b):
        return tuple(a) == tuple(b)

    def to_residue(self, a):
        return sum(a) % self.p

    def is_unit(self, a):
        return self.to_residue(a) != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertibleError(f"{a} is not a unit")
        x = self.from_int(pow(self.to_residue(a), -1, self.p))
        two = self.from_int(2)
        # Newton iteration; the maximal ideal is nilpotent so this terminates
        for _ in range(4 * self.n * self.m + 4):
            ax = self.mul(a, x)
            if ax == self.one:
                return x
            x = self.mul(x, self.sub(two, ax))
        raise NotInvertibleError("inversion did not converge")

    def residue_field(self):
        return PrimeField(self.p)


class Rationals:
    """Q with Fraction elements."""

    is_field = True
    characteristic = 0

    def __repr__(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def describe(self):
        return {"variant": "rationals"}

    zero = Fraction(0)
    one = Fraction(1)

    def canonical(self, a):
        return Fraction(a)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("zero has no inverse")
        return 1 / Fraction(a)

    def pow(self, a, n):
        return Fraction(a) ** n


QQ = Rationals()


def make_ring(spec: dict):
    """Build a coefficient ring from its JSON description."""
    variant = spec.get("variant")
    if variant == "prime-field":
        return GF(int(spec["p"]))
    if variant == "extension-field":
        return GF(int(spec["p"]), int(spec["m"]), spec.get("modulus"))
    if variant == "p-adic-truncation":
        return PAdicTruncation(int(spec["p"]), int(spec["m"]))
    if variant == "truncated-cyclotomic":
        return TruncatedCyclotomic(int(spec["p"]), int(spec["r"]), int(spec["m"]))
    if variant == "rationals":
        return QQ
    raise AlgebraError(f"unknown ring variant {variant!r}")


def is_finite_field(ring) -> bool:
    return isinstance(ring, FiniteField)
