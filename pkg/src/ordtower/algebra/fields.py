"""Finite fields with integer-encoded elements.

Elements of F_p are the integers 0..p-1.  Elements of F_{p^m} are integers
0..p^m-1 read as base-p digit vectors, digit i being the coefficient of
alpha^i where alpha is a root of the chosen modulus.  Both kinds expose the
same scalar API plus a vectorised numpy API used by the matrix code.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


class AlgebraError(ValueError):
    """Base error for malformed algebraic input."""


class NotInvertibleError(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def factor_int(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class FiniteField:
    """Common interface; see PrimeField and ExtensionField."""

    p: int
    m: int
    q: int
    is_field = True

    @property
    def characteristic(self):
        return self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def eq(self, a, b):
        return a == b

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        result = 1
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def random_element(self, rng, nonzero=False):
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.q))

    def residue_field(self):
        return self

    def to_residue(self, a):
        return a

    def pth_root(self, a):
        return self.frob(a, -1)

    def canonical(self, a):
        a = int(a)
        if not 0 <= a < self.q:
            raise AlgebraError(f"{a} is not an encoded element of F_{self.q}")
        return a


class PrimeField(FiniteField):
    def __init__(self, p: int):
        if not is_prime(p):
            raise AlgebraError(f"{p} is not prime")
        self.p = p
        self.m = 1
        self.q = p

    def __repr__(self):
        return f"F_{self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def describe(self):
        return {"variant": "prime-field", "p": self.p}

    def from_int(self, n: int):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise NotInvertibleError("zero has no inverse")
        return pow(int(a), self.p - 2, self.p)

    def frob(self, a, e: int = 1):
        return a

    # vectorised
    def vadd(self, a, b):
        return (a + b) % self.p

    def vsub(self, a, b):
        return (a - b) % self.p

    def vneg(self, a):
        return (-a) % self.p

    def vmul(self, a, b):
        return (a * b) % self.p

    def vfrob(self, a, e: int = 1):
        return a


def _poly_mulmod(a, b, mod, p):
    """Multiply coefficient lists a, b modulo the monic list mod over F_p."""
    m = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for j in range(m + 1):
                prod[k - m + j] = (prod[k - m + j] - c * mod[j]) % p
    return (prod + [0] * m)[:m]


def _is_irreducible(mod, p):
    # brute force: no roots of any monic factor of degree <= m/2
    m = len(mod) - 1
    for d in range(1, m // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            if _poly_divides(g, mod, p):
                return False
    return True


def _poly_divides(g, f, p):
    f = list(f)
    dg = len(g) - 1
    inv_lead = pow(g[-1], p - 2, p)
    for k in range(len(f) - 1, dg - 1, -1):
        c = f[k] * inv_lead % p
        if c:
            for j in range(dg + 1):
                f[k - dg + j] = (f[k - dg + j] - c * g[j]) % p
    return not any(f[:dg])


@lru_cache(maxsize=None)
def default_modulus(p: int, m: int) -> tuple:
    """Lexicographically first monic irreducible of degree m whose root is primitive."""
    for tail in itertools.product(range(p), repeat=m):
        mod = list(reversed(tail)) + [1]
        if mod[0] == 0 or not _is_irreducible(mod, p):
            continue
        if _root_is_primitive(mod, p):
            return tuple(mod)
    raise AlgebraError(f"no primitive modulus of degree {m} over F_{p}")


def _root_is_primitive(mod, p):
    m = len(mod) - 1
    order = p ** m - 1
    x = [0, 1] + [0] * (m - 2) if m > 1 else [0]
    if m == 1:
        root = (-mod[0]) % p
        return all(pow(root, order // ell, p) != 1 for ell in factor_int(order))
    for ell in factor_int(order):
        if _poly_pow(x, order // ell, mod, p) == [1] + [0] * (m - 1):
            return False
    return True


def _poly_pow(a, n, mod, p):
    m = len(mod) - 1
    result = [1] + [0] * (m - 1)
    while n:
        if n & 1:
            result = _poly_mulmod(result, a, mod, p)
        a = _poly_mulmod(a, a, mod, p)
        n >>= 1
    return result


class ExtensionField(FiniteField):
    """F_{p^m} = F_p[alpha]/(modulus); the modulus must be irreducible.

    Multiplication goes through discrete-log tables; addition through a full
    table when q is small enough, digitwise otherwise.
    """

    _TABLE_LIMIT = 4096

    def __init__(self, p: int, m: int, modulus=None):
        if not is_prime(p):
            raise AlgebraError(f"{p} is not prime")
        if m < 1:
            raise AlgebraError("degree must be positive")
        self.p, self.m, self.q = p, m, p ** m
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise AlgebraError("modulus must be monic of degree m (low-to-high coefficients)")
        if not _is_irreducible(list(modulus), p):
            raise AlgebraError(f"modulus {modulus} is reducible over F_{p}")
        self.modulus = modulus
        self._build_tables()

    def __repr__(self):
        return f"F_{self.p}^{self.m}"

    def __eq__(self, other):
        return (isinstance(other, ExtensionField) and other.p == self.p
                and other.modulus == self.modulus)

    def __hash__(self):
        return hash(("F", self.p, self.modulus))

    def describe(self):
        return {"variant": "extension-field", "p": self.p, "m": self.m,
                "modulus": list(self.modulus)}

    # encoding helpers
    def digits(self, a: int) -> list:
        out = []
        for _ in range(self.m):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def encode(self, digits) -> int:
        a = 0
        for d in reversed(list(digits)[: self.m]):
            a = a * self.p + int(d) % self.p
        return a

    @property
    def generator(self) -> int:
        """The class of alpha (a root of the modulus)."""
        return self.encode([0, 1]) if self.m > 1 else (-self.modulus[0]) % self.p

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        self._digits = np.array([self.digits(a) for a in range(q)], dtype=np.int64)
        weights = p ** np.arange(m, dtype=np.int64)
        self._weights = weights
        # find a primitive element and build exp/log
        for g in range(2 if q > 2 else 1, q):
            exp = [1]
            cur = [1] + [0] * (m - 1)
            gd = self.digits(g)
            for _ in range(q - 2):
                cur = _poly_mulmod(cur, gd, list(self.modulus), p)
                exp.append(self.encode(cur))
            if len(set(exp)) == q - 1:
                break
        self._exp = exp + exp  # doubled for index sums
        self._log = [0] * q
        for i, a in enumerate(exp):
            self._log[a] = i
        self._neg = [self.encode([(-d) % p for d in self.digits(a)]) for a in range(q)]
        self._np_exp = np.array(self._exp, dtype=np.int64)
        self._np_log = np.array(self._log, dtype=np.int64)
        self._np_neg = np.array(self._neg, dtype=np.int64)
        if q <= self._TABLE_LIMIT:
            d = self._digits
            s = (d[:, None, :] + d[None, :, :]) % p
            self._add_table = (s * weights).sum(axis=2)
        else:
            self._add_table = None
        # frobenius a -> a^p as a permutation
        self._frob = [self._pow_plain(a, p) for a in range(q)]
        self._np_frob = np.array(self._frob, dtype=np.int64)

    def _pow_plain(self, a, n):
        if a == 0:
            return 0 if n else 1
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def from_int(self, n: int):
        return n % self.p

    def add(self, a, b):
        if self._add_table is not None:
            return int(self._add_table[a, b])
        return self.encode([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("zero has no inverse")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow(self, a, n: int):
        if a == 0:
            if n < 0:
                raise NotInvertibleError("zero has no inverse")
            return 0 if n else 1
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def frob(self, a, e: int = 1):
        """a -> a^(p^e); e may be negative (Frobenius is bijective)."""
        e %= self.m
        for _ in range(e):
            a = self._frob[a]
        return a

    # vectorised
    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._add_table is not None:
            return self._add_table[a, b]
        s = (self._digits[a] + self._digits[b]) % self.p
        return (s * self._weights).sum(axis=-1)

    def vneg(self, a):
        return self._np_neg[np.asarray(a, dtype=np.int64)]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = self._np_exp[self._np_log[a] + self._np_log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vfrob(self, a, e: int = 1):
        a = np.asarray(a, dtype=np.int64)
        for _ in range(e % self.m):
            a = self._np_frob[a]
        return a


def GF(p: int, m: int = 1, modulus=None) -> FiniteField:
    """F_p when m == 1 and no modulus is given, else F_{p^m}."""
    if m == 1 and modulus is None:
        return PrimeField(p)
    return ExtensionField(p, m, modulus)
