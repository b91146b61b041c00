"""Butcher tableaux with exact coefficients.

Holds the :class:`Tableau` value type, the registry of the fourteen implicit
schemes used throughout the package, the derived vector ``d_j = sum_i b_i a_ij``
and the adjoint transformation

    b_hat_i  = b_i
    a_hat_ij = b_j - (b_j / b_i) * a_ji

which turns a state scheme into the costate scheme that makes the coupled
discretization symplectic (so discretize-then-optimize equals
optimize-then-discretize).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact import MixedRadicands, QuadNum, as_quad, to_float

__all__ = [
    "Tableau",
    "Violation",
    "UnknownScheme",
    "ZeroWeight",
    "InvalidTableau",
    "SCHEME_NAMES",
    "registry_get",
    "registry",
    "compute_d",
    "adjoint_tableau",
    "validate",
    "parse_tableau",
    "format_tableau",
]


class UnknownScheme(KeyError):
    pass


class ZeroWeight(ValueError):
    """A weight b_i vanishes where a division by it is required."""


class InvalidTableau(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # RowSumMismatch | WeightSum | Shape | MixedRadicands
    index: int | None = None
    detail: str = ""

    def __str__(self):
        where = f"(row {self.index + 1})" if self.index is not None else ""
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"


@dataclass(frozen=True, eq=False)
class Tableau:
    """Exact Butcher array ``(A, b, c)``.

    ``c`` defaults to the row sums of ``A``.  Equality compares coefficients
    only; ``name`` and ``nominal_order`` are metadata.
    """

    A: tuple[tuple[QuadNum, ...], ...]
    b: tuple[QuadNum, ...]
    c: tuple[QuadNum, ...] = None
    name: str = "custom"
    nominal_order: int | None = None
    _float: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        A = tuple(tuple(as_quad(x) for x in row) for row in self.A)
        b = tuple(as_quad(x) for x in self.b)
        if self.c is None:
            c = tuple(sum(row, QuadNum(0)) for row in A)
        else:
            c = tuple(as_quad(x) for x in self.c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        s = len(b)
        if len(A) != s or any(len(row) != s for row in A) or len(c) != s:
            raise InvalidTableau(f"inconsistent shapes for {self.name!r}")

    @property
    def s(self) -> int:
        return len(self.b)

    @property
    def radicand(self) -> int:
        """Common radicand of all coefficients (0 for rational tableaux)."""
        ds = {x.d for x in self.coefficients() if x.d}
        if len(ds) > 1:
            raise MixedRadicands(f"{self.name}: radicands {sorted(ds)}")
        return ds.pop() if ds else 0

    def coefficients(self):
        for row in self.A:
            yield from row
        yield from self.b
        yield from self.c

    def __eq__(self, other):
        if not isinstance(other, Tableau):
            return NotImplemented
        return self.A == other.A and self.b == other.b and self.c == other.c

    def __hash__(self):
        return hash((self.A, self.b, self.c))

    # float views are cached; the tableau itself is immutable
    def _floats(self):
        if not self._float:
            self._float["A"] = np.array([[to_float(x) for x in row] for row in self.A])
            self._float["b"] = np.array([to_float(x) for x in self.b])
            self._float["c"] = np.array([to_float(x) for x in self.c])
            for v in self._float.values():
                v.setflags(write=False)
        return self._float

    @property
    def A_float(self) -> np.ndarray:
        return self._floats()["A"]

    @property
    def b_float(self) -> np.ndarray:
        return self._floats()["b"]

    @property
    def c_float(self) -> np.ndarray:
        return self._floats()["c"]

    def with_name(self, name: str, nominal_order: int | None = None) -> "Tableau":
        return Tableau(self.A, self.b, self.c, name=name, nominal_order=nominal_order)

    def __str__(self):
        return format_tableau(self)


def compute_d(t: Tableau) -> tuple[QuadNum, ...]:
    """``d_j = sum_i b_i a_ij``, exactly."""
    return tuple(
        sum((t.b[i] * t.A[i][j] for i in range(t.s)), QuadNum(0)) for j in range(t.s)
    )


def adjoint_tableau(t: Tableau) -> Tableau:
    """Costate tableau ``a_hat_ij = b_j - b_j a_ji / b_i`` with unchanged weights."""
    for i, bi in enumerate(t.b):
        if not bi:
            raise ZeroWeight(f"{t.name}: b_{i + 1} = 0, adjoint scheme undefined")
    s = t.s
    A_hat = tuple(
        tuple(t.b[j] - t.b[j] * t.A[j][i] / t.b[i] for j in range(s)) for i in range(s)
    )
    return Tableau(A_hat, t.b, None, name=f"adjoint({t.name})", nominal_order=t.nominal_order)


def validate(t: Tableau) -> list[Violation]:
    """List violated invariants (row sums equal ``c`` and weights sum to one)."""
    out = []
    try:
        t.radicand
    except MixedRadicands as exc:
        out.append(Violation("MixedRadicands", None, str(exc)))
        return out
    for i, row in enumerate(t.A):
        rs = sum(row, QuadNum(0))
        if rs != t.c[i]:
            out.append(Violation("RowSumMismatch", i, f"sum_j a_ij = {rs} but c_i = {t.c[i]}"))
    wsum = sum(t.b, QuadNum(0))
    if wsum != 1:
        out.append(Violation("WeightSum", None, f"sum b_i = {wsum}"))
    return out


# --------------------------------------------------------------------------
# text format: "s d", s rows of A, one row b, one row c

def format_tableau(t: Tableau) -> str:
    lines = [f"{t.s} {t.radicand}"]
    lines += [" ".join(str(x) for x in row) for row in t.A]
    lines.append(" ".join(str(x) for x in t.b))
    lines.append(" ".join(str(x) for x in t.c))
    return "\n".join(lines) + "\n"


def parse_tableau(text: str, name: str = "custom", nominal_order: int | None = None) -> Tableau:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise InvalidTableau("first line must be 's d'")
    s, d = int(rows[0][0]), int(rows[0][1])
    if len(rows) != s + 3:
        raise InvalidTableau(f"expected {s + 3} non-empty lines, got {len(rows)}")
    body = [[QuadNum.parse(tok) for tok in row] for row in rows[1:]]
    for x in (x for row in body for x in row):
        if x.d not in (0, d):
            raise InvalidTableau(f"coefficient {x} outside Q(sqrt({d}))")
    t = Tableau(body[:s], body[s], body[s + 1], name=name, nominal_order=nominal_order)
    return t


# --------------------------------------------------------------------------
# registry

def _make(name: str, order: int, A: Sequence[Sequence[str]], b: Sequence[str], c: Sequence[str]) -> Tableau:
    P = QuadNum.parse
    t = Tableau(
        tuple(tuple(P(x) for x in row) for row in A),
        tuple(P(x) for x in b),
        tuple(P(x) for x in c),
        name=name,
        nominal_order=order,
    )
    bad = validate(t)
    if bad:
        raise InvalidTableau(f"registry entry {name}: " + "; ".join(map(str, bad)))
    return t


_LOBATTO_B4 = ["1/6", "2/3", "1/6"]
_LOBATTO_C4 = ["0", "1/2", "1"]
_LOBATTO_B6 = ["1/12", "5/12", "5/12", "1/12"]
_LOBATTO_C6 = ["0", "(5-sqrt{5})/10", "(5+sqrt{5})/10", "1"]

_DATA = {
    "stormer-verlet": (2, [["0", "0"], ["1/2", "1/2"]], ["1/2", "1/2"], ["0", "1"]),
    "radau-ia-3": (3, [["1/4", "-1/4"], ["1/4", "5/12"]], ["1/4", "3/4"], ["0", "2/3"]),
    "radau-iia-3": (3, [["5/12", "-1/12"], ["3/4", "1/4"]], ["3/4", "1/4"], ["1/3", "1"]),
    "gauss-4": (
        4,
        [["1/4", "1/4-sqrt{3}/6"], ["1/4+sqrt{3}/6", "1/4"]],
        ["1/2", "1/2"],
        ["1/2-sqrt{3}/6", "1/2+sqrt{3}/6"],
    ),
    "sdirk-4": (
        4,
        [
            ["1/4", "0", "0", "0", "0"],
            ["1/2", "1/4", "0", "0", "0"],
            ["17/50", "-1/25", "1/4", "0", "0"],
            ["371/1360", "-137/2720", "15/544", "1/4", "0"],
            ["25/24", "-49/48", "125/16", "-85/12", "1/4"],
        ],
        ["25/24", "-49/48", "125/16", "-85/12", "1/4"],
        ["1/4", "3/4", "11/20", "1/2", "1"],
    ),
    "lobatto-iiia-4": (4, [["0", "0", "0"], ["5/24", "1/3", "-1/24"], ["1/6", "2/3", "1/6"]], _LOBATTO_B4, _LOBATTO_C4),
    "lobatto-iiib-4": (4, [["1/6", "-1/6", "0"], ["1/6", "1/3", "0"], ["1/6", "5/6", "0"]], _LOBATTO_B4, _LOBATTO_C4),
    "lobatto-iiic-4": (4, [["1/6", "-1/3", "1/6"], ["1/6", "5/12", "-1/12"], ["1/6", "2/3", "1/6"]], _LOBATTO_B4, _LOBATTO_C4),
    "radau-ia-5": (
        5,
        [
            ["1/9", "(-1-sqrt{6})/18", "(-1+sqrt{6})/18"],
            ["1/9", "(88+7sqrt{6})/360", "(88-43sqrt{6})/360"],
            ["1/9", "(88+43sqrt{6})/360", "(88-7sqrt{6})/360"],
        ],
        ["1/9", "(16+sqrt{6})/36", "(16-sqrt{6})/36"],
        ["0", "(6-sqrt{6})/10", "(6+sqrt{6})/10"],
    ),
    "radau-iia-5": (
        5,
        [
            ["(88-7sqrt{6})/360", "(296-169sqrt{6})/1800", "(-2+3sqrt{6})/225"],
            ["(296+169sqrt{6})/1800", "(88+7sqrt{6})/360", "(-2-3sqrt{6})/225"],
            ["(16-sqrt{6})/36", "(16+sqrt{6})/36", "1/9"],
        ],
        ["(16-sqrt{6})/36", "(16+sqrt{6})/36", "1/9"],
        ["(4-sqrt{6})/10", "(4+sqrt{6})/10", "1"],
    ),
    "gauss-6": (
        6,
        [
            ["5/36", "2/9-sqrt{15}/15", "5/36-sqrt{15}/30"],
            ["5/36+sqrt{15}/24", "2/9", "5/36-sqrt{15}/24"],
            ["5/36+sqrt{15}/30", "2/9+sqrt{15}/15", "5/36"],
        ],
        ["5/18", "4/9", "5/18"],
        ["1/2-sqrt{15}/10", "1/2", "1/2+sqrt{15}/10"],
    ),
    # third row, third entry printed as "25-+sqrt5"; the row sum (5+sqrt5)/10 fixes the sign
    "lobatto-iiia-6": (
        6,
        [
            ["0", "0", "0", "0"],
            ["(11+sqrt{5})/120", "(25-sqrt{5})/120", "(25-13sqrt{5})/120", "(-1+sqrt{5})/120"],
            ["(11-sqrt{5})/120", "(25+13sqrt{5})/120", "(25+sqrt{5})/120", "(-1-sqrt{5})/120"],
            ["1/12", "5/12", "5/12", "1/12"],
        ],
        _LOBATTO_B6,
        _LOBATTO_C6,
    ),
    "lobatto-iiib-6": (
        6,
        [
            ["1/12", "(-1-sqrt{5})/24", "(-1+sqrt{5})/24", "0"],
            ["1/12", "(25+sqrt{5})/120", "(25-13sqrt{5})/120", "0"],
            ["1/12", "(25+13sqrt{5})/120", "(25-sqrt{5})/120", "0"],
            ["1/12", "(11-sqrt{5})/24", "(11+sqrt{5})/24", "0"],
        ],
        _LOBATTO_B6,
        _LOBATTO_C6,
    ),
    "lobatto-iiic-6": (
        6,
        [
            ["1/12", "-sqrt{5}/12", "sqrt{5}/12", "-1/12"],
            ["1/12", "1/4", "(10-7sqrt{5})/60", "sqrt{5}/60"],
            ["1/12", "(10+7sqrt{5})/60", "1/4", "-sqrt{5}/60"],
            ["1/12", "5/12", "5/12", "1/12"],
        ],
        _LOBATTO_B6,
        _LOBATTO_C6,
    ),
}

SCHEME_NAMES: tuple[str, ...] = tuple(_DATA)

_REGISTRY: dict[str, Tableau] = {name: _make(name, *spec) for name, spec in _DATA.items()}


def registry_get(name: str) -> Tableau:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownScheme(f"unknown scheme {name!r}; known: {', '.join(SCHEME_NAMES)}") from None


def registry() -> dict[str, Tableau]:
    """Read-only snapshot of all registered schemes, in table order."""
    return dict(_REGISTRY)
