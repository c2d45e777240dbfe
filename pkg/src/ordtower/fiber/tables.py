"""Degeneracy and inertia relation tables on components of the special fiber.

Rows map a component (a, b, u) of the source curve to a component of the
target together with an operator word.  Words are written as compositions of
maps of curves (leftmost applied last) in the letters F, rho, rho*, <u>,
<p>_N and id; when evaluated against a carrier each letter acts through its
pushforward on differentials.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..algebra import ExactMatrix
from .carrier import IgusaCarrier
from .components import ComponentIndex, check_index, list_components, reduce_unit

LETTERS = ("F", "rho", "rho*", "dia", "pN")


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorWord:
    """letters: ((name, arg), ...) with arg a unit for 'dia', an exponent for 'pN', else 1."""
    letters: tuple = ()

    def __post_init__(self):
        for name, _ in self.letters:
            if name not in LETTERS:
                raise TableError(f"unknown letter {name!r}")

    @classmethod
    def parse(cls, *parts):
        out = []
        for part in parts:
            if part == "id":
                continue
            if isinstance(part, tuple):
                out.append(part)
            else:
                out.append((part, 1))
        return cls(tuple(out))

    def __matmul__(self, other: "OperatorWord") -> "OperatorWord":
        """self o other: apply other first."""
        return OperatorWord(self.letters + other.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def level_shift(self) -> int:
        return sum(-1 if n == "rho" else 1 if n == "rho*" else 0 for n, _ in self.letters)

    def normal_form(self, p: int, level: int):
        """(F exponent, <p>_N exponent, diamond unit mod p^level, rho pattern) or None for zero.

        F, diamonds and <p>_N commute with everything; diamonds multiply; a
        rho applied right after rho* kills the word.
        """
        f = e = 0
        unit = 1
        pattern = []
        mod = p ** level if level > 0 else 1
        for name, arg in self.letters:
            if name == "F":
                f += arg
            elif name == "pN":
                e += arg
            elif name == "dia":
                unit = unit * arg % mod if level > 0 else 1
            else:
                pattern.append(name)
        # pattern is written left to right, so rho o rho* reads ("rho", "rho*")
        for i in range(len(pattern) - 1):
            if pattern[i] == "rho" and pattern[i + 1] == "rho*":
                return None
        return f, e, unit % mod if level > 0 else 1, tuple(pattern)

    def __str__(self):
        if not self.letters:
            return "id"
        bits = []
        for name, arg in self.letters:
            if name == "dia":
                bits.append(f"<{arg}>")
            elif name == "pN":
                bits.append("<p>_N" if arg == 1 else f"<p>_N^{arg}")
            elif name == "F" and arg != 1:
                bits.append(f"F^{arg}")
            else:
                bits.append(name)
        return " ".join(bits)

    def evaluate(self, c: IgusaCarrier, level: int) -> ExactMatrix:
        """Matrix M_level -> M_(level + level_shift) of the word on the carrier."""
        c.require(level)
        M = ExactMatrix.identity(c.F, c.dims[level])
        s = level
        for name, arg in reversed(self.letters):
            if name == "F":
                M = c.frob_power(s, arg) @ M
            elif name == "pN":
                M = c.p_N_power(s, arg) @ M
            elif name == "dia":
                M = (c.diamond(s, arg) if s > 0 else ExactMatrix.identity(c.F, c.dims[s])) @ M
            elif name == "rho":
                M = c.rho_down(s) @ M
                s -= 1
            else:
                M = c.rho_up(s + 1) @ M
                s += 1
        return M


@dataclass(frozen=True)
class TableRow:
    label: str
    source: ComponentIndex
    target: ComponentIndex
    word: OperatorWord
    source_level: int
    target_level: int

    def as_dict(self):
        return {"map": self.label, "source": str(self.source), "target": str(self.target),
                "word": str(self.word), "source_level": self.source_level,
                "target_level": self.target_level}


def _unit_inv(u, p, k):
    return pow(u, -1, p ** k) if k > 0 else 1


def _target(p, a, b, u):
    return ComponentIndex(a, b, reduce_unit(u, p, min(a, b)))


def _y_level(c: ComponentIndex, r: int) -> int:
    """Igusa level of the component J_(a,b,u) of the correspondence curve over level r."""
    return min(c.level, r)


def degeneracy_description(label: str, index: ComponentIndex, p: int) -> TableRow:
    """Row of the table for rho, sigma (level r+1 -> r) or pi1, pi2 (correspondence -> level r)."""
    a, b, u = index.a, index.b, index.u
    r = a + b - 1
    if r < 0:
        raise TableError("index must have a + b >= 1")
    check_index(index, p, r + 1)
    W = OperatorWord.parse
    if label == "sigma":
        src_level = index.level
        if b < a:
            row = (_target(p, a - 1, b, u), W("F", "rho"))
        elif a == b:
            row = (_target(p, a - 1, b, u), W(("dia", _unit_inv(u, p, b)), "F"))
        elif a == 0:
            row = (ComponentIndex(0, r, 1), W(("pN", 1), "rho"))
        else:
            row = (_target(p, a - 1, b, u), W("F"))
    elif label == "rho":
        src_level = index.level
        if (a, b) == (r + 1, 0):
            row = (ComponentIndex(r, 0, 1), W("rho"))
        elif b <= a:
            row = (_target(p, a, b - 1, u), W("F"))
        elif a + 1 == b:
            row = (_target(p, a, b - 1, u), W(("dia", u), "F", "rho"))
        else:
            row = (_target(p, a, b - 1, u), W("F", "rho"))
    elif label == "pi1":
        src_level = _y_level(index, r)
        if (a, b) == (r + 1, 0):
            row = (ComponentIndex(r, 0, 1), W("F"))
        elif (a, b) == (0, r + 1):
            row = (ComponentIndex(0, r, 1), W(("pN", 1)))
        elif b < a:
            row = (_target(p, a - 1, b, u), W("rho"))
        elif a == b:
            row = (_target(p, a - 1, b, u), W(("dia", _unit_inv(u, p, b))))
        else:
            row = (_target(p, a - 1, b, u), W("id"))
    elif label == "pi2":
        src_level = _y_level(index, r)
        if (a, b) == (r + 1, 0):
            row = (ComponentIndex(r, 0, 1), W("id"))
        elif (a, b) == (0, r + 1):
            row = (ComponentIndex(0, r, 1), W("F"))
        elif b <= a:
            row = (_target(p, a, b - 1, u), W("id"))
        elif a + 1 == b:
            row = (_target(p, a, b - 1, u), W(("dia", u), "rho"))
        else:
            row = (_target(p, a, b - 1, u), W("rho"))
    else:
        raise TableError(f"unknown map label {label!r}")
    target, word = row
    check_index(target, p, r)
    return TableRow(label, index, target, word, src_level, target.level)


def level_typecheck(row: TableRow) -> bool:
    """Every rho in the word drops the Igusa level by one; nothing else moves it."""
    return row.source_level + row.word.level_shift() == row.target_level


def inertia_description(chi: int, index: ComponentIndex, p: int) -> TableRow:
    """Restriction of the inertia automorphism attached to a unit chi (mod p^min(a,b) or finer)."""
    a, b, u = index.a, index.b, index.u
    r = a + b
    check_index(index, p, r)
    if chi % p == 0:
        raise TableError("chi must be a p-adic unit")
    k = min(a, b)
    target = ComponentIndex(a, b, reduce_unit(chi * u, p, k))
    if b <= a:
        word = OperatorWord()
    else:
        word = OperatorWord.parse(("dia", _unit_inv(chi % p ** b, p, b)))
    return TableRow("inertia", index, target, word, index.level, index.level)


def compose_rows(second: TableRow, first: TableRow) -> TableRow:
    """second o first; the target of first must be the source of second."""
    if first.target != second.source:
        raise TableError(f"cannot compose: {first.target} is not {second.source}")
    return TableRow(f"{second.label}.{first.label}", first.source, second.target,
                    second.word @ first.word, first.source_level, second.target_level)


def _quotient(p, level, big, small):
    """The word w with big = small o w when both normal forms differ by letters only."""
    fb, eb, ub, pb = big
    fs, es, us, ps = small
    if fb < fs or eb < es:
        return None
    # rho patterns: small's pattern followed by w's rho letters must give big's
    if pb[:len(ps)] != ps:
        return None
    rest = pb[len(ps):]
    mod = p ** level if level > 0 else 1
    unit = ub * pow(us, -1, mod) % mod if level > 0 else 1
    letters = [("F", 1)] * (fb - fs) + [("pN", 1)] * (eb - es)
    if unit != 1:
        letters.append(("dia", unit))
    letters += [(n, 1) for n in rest]
    return OperatorWord(tuple(letters))


@dataclass
class CrossValidation:
    p: int
    r: int
    rows: list          # (index, pi word, consistent)
    failures: list

    @property
    def holds(self) -> bool:
        return not self.failures

    def as_dict(self):
        return {"p": self.p, "r": self.r, "holds": self.holds, "failures": list(self.failures),
                "pi": [{"index": str(k), "word": str(w)} for k, w, _ in self.rows]}


def cross_validate(p: int, r: int) -> CrossValidation:
    """Infer pi with sigma = pi1 o pi and rho = pi2 o pi and check both give the same pi.

    The map pi from level r+1 to the correspondence curve preserves the index
    (a, b, u); both factorizations must produce the same word and matching targets.
    """
    rows, fails = [], []
    for k in list_components(p, r + 1):
        sig = degeneracy_description("sigma", k, p)
        rh = degeneracy_description("rho", k, p)
        p1 = degeneracy_description("pi1", k, p)
        p2 = degeneracy_description("pi2", k, p)
        for row in (sig, rh, p1, p2):
            if not level_typecheck(row):
                fails.append(f"{row.label} on {k}: level mismatch")
        if sig.target != p1.target:
            fails.append(f"sigma and pi1 disagree on the target of {k}")
        if rh.target != p2.target:
            fails.append(f"rho and pi2 disagree on the target of {k}")
        # the pi word acts on the source level, then pi1/pi2 act from the correspondence level
        lv = r
        w1 = _quotient(p, lv, sig.word.normal_form(p, lv), p1.word.normal_form(p, lv))
        w2 = _quotient(p, lv, rh.word.normal_form(p, lv), p2.word.normal_form(p, lv))
        ok = w1 is not None and w2 is not None and \
            w1.normal_form(p, lv) == w2.normal_form(p, lv)
        if ok:
            pi_row = TableRow("pi", k, k, w1, k.level, _y_level(k, r))
            ok = level_typecheck(pi_row)
        if not ok:
            fails.append(f"pi is not well defined on {k}")
        rows.append((k, w1, ok))
    return CrossValidation(p, r, rows, fails)


def chain_check(label: str, p: int, r: int) -> list:
    """Compose the label's rows from level r+2 to r+1 to r; every composite must typecheck.

    Only sigma and rho go between Igusa levels; pi1 and pi2 leave the correspondence curve.
    """
    if label not in ("sigma", "rho"):
        raise TableError(f"{label!r} does not map level r+1 to level r")
    fails = []
    for k in list_components(p, r + 2):
        first = degeneracy_description(label, k, p)
        second = degeneracy_description(label, first.target, p)
        row = compose_rows(second, first)
        if not level_typecheck(row):
            fails.append(f"{label}^2 on {k}")
    return fails


def table_dump(p: int, r: int) -> dict:
    """All rows for maps from level r+1 (or the correspondence curve) down to level r."""
    out = {}
    for label in ("sigma", "rho", "pi1", "pi2"):
        out[label] = [degeneracy_description(label, k, p).as_dict() for k in list_components(p, r + 1)]
    return out


def inertia_composition_check(chi1: int, chi2: int, p: int, r: int) -> list:
    """The inertia rows form a group action: rows for chi2 after chi1 equal the row for chi1 chi2."""
    fails = []
    for k in list_components(p, r):
        first = inertia_description(chi1, k, p)
        both = compose_rows(inertia_description(chi2, first.target, p), first)
        direct = inertia_description(chi1 * chi2, k, p)
        lv = k.level
        if both.target != direct.target or \
                both.word.normal_form(p, lv) != direct.word.normal_form(p, lv):
            fails.append(f"inertia on {k}")
    return fails
