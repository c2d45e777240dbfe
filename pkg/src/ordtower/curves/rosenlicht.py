"""Regular differentials on a union of smooth curves glued at crossings (simple poles only)."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra import ExactMatrix, mat_rank_kernel_image
from .cartier import residue_at
from .model import DivisorData, DivisorError


@dataclass
class CrossedUnion:
    """Components meeting at crossings; each crossing names one place on every component."""
    components: list
    crossings: list = field(default_factory=list)

    def __post_init__(self):
        k = len(self.components)
        if not k:
            raise DivisorError("need at least one component")
        F = self.components[0].F
        if any(c.F != F for c in self.components):
            raise DivisorError("components must share the base field")
        for cr in self.crossings:
            if len(cr) != k:
                raise DivisorError("each crossing names one place per component")
        for i in range(k):
            seen = [cr[i] for cr in self.crossings]
            if len(set(seen)) != len(seen):
                raise DivisorError(f"crossing places repeat on component {i}")
            rational = set(self.components[i].rational_places())
            for pl in seen:
                if pl not in rational:
                    raise DivisorError(f"{pl} is not a rational place of component {i}")

    @property
    def arithmetic_genus(self) -> int:
        """Sum of genera plus (k-1) per crossing, minus (k-1) for connectedness."""
        k = len(self.components)
        return sum(c.genus() for c in self.components) + (len(self.crossings) - 1) * (k - 1) \
            if self.crossings else sum(c.genus() for c in self.components)


@dataclass
class RosenlichtResult:
    basis: list          # tuples (eta_1, ..., eta_k)
    dim: int
    arithmetic_genus: int

    @property
    def matches(self) -> bool:
        return self.dim == self.arithmetic_genus


def rosenlicht_sections_simple(u: CrossedUnion, expected_genus: int | None = None) -> RosenlichtResult:
    """Tuples holomorphic off the crossings, simple poles there, residues summing to zero."""
    F = u.components[0].F
    spaces = []
    for i, c in enumerate(u.components):
        D = DivisorData.of(*[(cr[i], 1) for cr in u.crossings])
        spaces.append(c.differential_space(D))
    total = sum(s.dim for s in spaces)
    rows = [[F.zero] * total for _ in u.crossings]
    offset = 0
    for i, s in enumerate(spaces):
        for j, b in enumerate(s.basis()):
            for r, cr in enumerate(u.crossings):
                rows[r][offset + j] = residue_at(b, cr[i])
        offset += s.dim
    if rows and total:
        ker = mat_rank_kernel_image(ExactMatrix.from_rows(F, rows, total)).kernel
    else:
        ker = [tuple(F.one if i == j else F.zero for i in range(total)) for j in range(total)]
    basis = []
    for v in ker:
        parts = []
        offset = 0
        for s in spaces:
            parts.append(s.element(v[offset:offset + s.dim]))
            offset += s.dim
        basis.append(tuple(parts))
    genus = u.arithmetic_genus if expected_genus is None else expected_genus
    return RosenlichtResult(basis, len(basis), genus)
