"""Order conditions for Runge-Kutta discretizations of optimal control problems.

Each condition is a record ``sum over indices of (numerator atoms) / (denominator
atoms) = rhs`` where atoms are ``a_uv``, ``b_u``, ``c_u`` and ``d_u`` (with
``d_j = sum_i b_i a_ij``), possibly raised to integer powers.  The classical
conditions for the uncontrolled state equation (kind ``State``) and the extra
conditions required for the coupled state/costate pairing (kind
``Additional``) are stored as data and evaluated either exactly or in floating
point.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact import QuadNum
from .tableau import Tableau, ZeroWeight, compute_d, registry

__all__ = [
    "Kind",
    "Atom",
    "SumExpr",
    "Condition",
    "OrderReport",
    "Defect",
    "CONDITIONS",
    "DEFAULT_TOL",
    "MAX_ORDER",
    "conditions_by_id",
    "eval_condition",
    "classify",
    "check_simplifying",
    "validate_registry",
    "export_conditions",
    "state_split_audit",
    "EXPECTED_ORDERS",
]

DEFAULT_TOL = 1e-10
MAX_ORDER = 6


class Kind(str, enum.Enum):
    STATE = "State"
    ADDITIONAL = "Additional"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Atom:
    sym: str  # one of a, b, c, d
    idx: tuple[str, ...]
    power: int = 1

    def __str__(self):
        base = f"{self.sym}_{''.join(self.idx)}"
        return base if self.power == 1 else f"{base}^{self.power}"


_ATOM_RE = re.compile(r"([abcd])_([a-z]+)(?:\^(\d+))?")


def _parse_atoms(text: str) -> list[Atom]:
    atoms = []
    pos = 0
    text = text.strip()
    for m in _ATOM_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"unexpected {text[pos:m.start()]!r} in {text!r}")
        sym, idx, power = m.group(1), tuple(m.group(2)), int(m.group(3) or 1)
        if len(idx) != (2 if sym == "a" else 1):
            raise ValueError(f"atom {m.group(0)!r} has wrong index count")
        atoms.append(Atom(sym, idx, power))
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"unexpected {text[pos:]!r} in {text!r}")
    return atoms


@dataclass(frozen=True)
class SumExpr:
    """Sum over all index tuples of a product of atoms divided by b-atoms."""

    indices: tuple[str, ...]
    numerator: tuple[Atom, ...]
    denominator: tuple[Atom, ...] = ()

    def __post_init__(self):
        used = {v for at in self.numerator + self.denominator for v in at.idx}
        if used != set(self.indices):
            raise ValueError(f"index mismatch: declared {self.indices}, used {sorted(used)}")
        if any(at.sym != "b" for at in self.denominator):
            raise ValueError("only b atoms may appear in a denominator")
        if not 1 <= len(self.indices) <= 4:
            raise ValueError("between one and four summation indices supported")

    @classmethod
    def parse(cls, text: str) -> "SumExpr":
        """Parse e.g. ``"b_i a_lk a_il c_i d_k / b_k"``."""
        num, _, den = text.partition("/")
        numerator = tuple(_parse_atoms(num))
        denominator = tuple(_parse_atoms(den)) if den else ()
        order = []
        for at in numerator + denominator:
            for v in at.idx:
                if v not in order:
                    order.append(v)
        return cls(tuple(order), numerator, denominator)

    def __str__(self):
        num = " ".join(map(str, self.numerator))
        if not self.denominator:
            return num
        return f"{num} / {' '.join(map(str, self.denominator))}"


@dataclass(frozen=True)
class Condition:
    id: str
    order: int
    kind: Kind
    expr: SumExpr
    rhs: Fraction

    def __str__(self):
        return f"{self.id}: sum {self.expr} = {self.rhs}"


# --------------------------------------------------------------------------
# the tables, one record per printed entry: (id, expression, rhs)

_STATE = [
    ("O1", "b_i", "1"),
    ("O2", "d_i", "1/2"),
    ("O3.1", "c_i d_i", "1/6"),
    ("O3.2", "b_i c_i^2", "1/3"),
    ("O4.1", "b_i c_i^3", "1/4"),
    ("O4.2", "b_i c_i a_ij c_j", "1/8"),
    ("O4.3", "d_i c_i^2", "1/12"),
    ("O4.4", "d_i a_ij c_j", "1/24"),
    ("O5-1.1", "b_i a_ik a_kj c_i c_j", "1/30"),
    ("O5-1.2", "a_jk c_j d_j c_k", "1/40"),
    ("O5-1.3", "b_i a_ij c_i c_j^2", "1/15"),
    ("O5-2.1", "c_j^3 d_j", "1/20"),
    ("O5-2.2", "b_i a_lk a_il c_i d_k / b_k", "11/120"),
    ("O5-2.3", "b_i a_ij c_i^2 c_j", "1/10"),
    ("O5-3.1", "a_kj c_j^2 d_k", "1/60"),
    ("O5-3.2", "b_i c_i^4", "1/5"),
    ("O5-3.3", "b_i a_ij c_j a_ik c_k", "1/20"),  # b_i (sum_j a_ij c_j)^2
    ("O6-1.1", "c_j^4 d_j", "1/30"),
    ("O6-1.2", "a_lm a_kl a_jk d_j c_m", "1/720"),
    ("O6-1.3", "b_i a_ij c_i^2 c_j^2", "1/18"),
    ("O6-2.1", "a_jk c_j d_j c_k^2", "1/90"),
    ("O6-2.2", "b_i a_ij c_i c_j^3", "1/24"),
    ("O6-2.3", "a_kj c_j^3 d_k", "1/120"),
    ("O6-3.1", "b_i a_ij c_i^3 c_j", "1/12"),
    ("O6-3.2", "a_jk c_j^2 d_j c_k", "1/60"),
    ("O6-3.3", "b_i a_ij a_jk c_i c_j c_k", "1/48"),
    ("O6-4.1", "a_lj a_jk c_j c_k d_l", "1/240"),
    ("O6-4.2", "a_kl a_jk c_j d_j c_l", "1/180"),
    ("O6-4.3", "b_i a_jk a_ij c_i^2 c_k", "1/36"),
    ("O6-5.1", "b_i a_ik a_kj c_i c_j^2", "1/72"),
    ("O6-5.2", "a_lk a_kj c_j^2 d_l", "1/360"),
    ("O6-5.3", "b_i a_ik a_ij c_j^2 c_k", "1/36"),
    ("O6-6.1", "b_i a_il a_ik a_kj c_j c_l", "1/72"),
    ("O6-6.2", "b_i a_kl a_jk a_ij c_i c_l", "1/144"),
    ("O6-6.3", "b_i c_i^5", "1/6"),
    ("O6-7.1", "b_i c_i a_ij c_j a_ik c_k", "1/24"),  # b_i c_i (sum_j a_ij c_j)^2
    ("O6-7.2", "b_i a_ij a_jk c_k a_jl c_l", "1/120"),  # b_i a_ij (sum_k a_jk c_k)^2
]

_ADDITIONAL = [
    ("A3", "d_i^2 / b_i", "1/3"),
    ("A4.1", "c_i d_i^2 / b_i", "1/12"),
    ("A4.2", "d_i^3 / b_i^2", "1/4"),
    ("A4.3", "b_i c_i a_ij d_j / b_j", "5/24"),
    ("A4.4", "d_i a_ij d_j / b_j", "1/8"),
    ("A5-1.1", "a_lk c_k d_k d_l / b_k", "1/40"),
    ("A5-1.2", "c_k^2 d_k^2 / b_k", "1/30"),
    ("A5-1.3", "c_l d_l^3 / b_l^2", "1/20"),
    ("A5-2.1", "a_kl d_k^2 c_l / b_k", "1/60"),
    ("A5-2.2", "d_m^4 / b_m^3", "1/5"),
    ("A5-2.3", "b_i a_ik a_ij c_j c_k", "1/20"),
    ("A5-3.1", "a_lk a_kj c_j d_l", "1/120"),
    ("A5-3.2", "a_lk d_k c_l d_l / b_k", "7/120"),
    ("A5-3.3", "b_i b_j a_jk a_ik c_i c_j / b_k", "2/15"),
    ("A5-4.1", "b_i a_ik c_i c_k d_k / b_k", "7/120"),
    ("A5-4.2", "b_i a_il c_i d_l^2 / b_l^2", "3/20"),
    ("A5-4.3", "a_mk a_lk d_l d_m / b_k", "1/20"),
    ("A5-5.1", "a_ml d_l^2 d_m / b_l^2", "1/10"),
    ("A5-5.2", "a_ml a_lk d_k d_m / b_k", "1/30"),
    ("A5-5.3", "b_i a_lk a_ik c_i d_l / b_k", "3/40"),
    ("A5-6.1", "b_i a_ik a_il d_k c_l / b_k", "3/40"),
    ("A5-6.2", "b_i a_im a_il d_l d_m / b_l b_m", "2/15"),
    ("A5-6.3", "b_i a_ik c_i^2 d_k / b_k", "3/20"),
    ("A5-7", "a_lm d_l^2 d_m / b_l b_m", "1/15"),
    ("A6-1.1", "d_n^5 / b_n^4", "1/6"),
    ("A6-1.2", "c_m d_m^4 / b_m^3", "1/30"),
    ("A6-1.3", "c_l^2 d_l^3 / b_l^2", "1/60"),
    ("A6-2.1", "c_k^3 d_k^2 / b_k", "1/60"),
    ("A6-2.2", "b_i a_ik c_i^2 c_k d_k / b_k", "2/45"),
    ("A6-2.3", "a_lk c_k d_k c_l d_l / b_k", "1/72"),
    ("A6-3.1", "b_i a_il c_i^2 d_l^2 / b_l^2", "19/180"),
    ("A6-3.2", "a_ml d_l^2 c_m d_m / b_l^2", "2/45"),
    ("A6-3.3", "a_nm d_m^2 d_n^2 / b_m^2 b_n", "1/18"),
    ("A6-4.1", "a_kl d_k^2 c_l^2 / b_k", "1/180"),
    ("A6-4.2", "a_lm d_l^2 c_m d_m / b_l b_m", "1/90"),
    ("A6-4.3", "b_i a_ik c_i^3 d_k / b_k", "7/60"),
    ("A6-5.1", "b_i a_ik c_i c_k^2 d_k / b_k", "1/40"),
    ("A6-5.2", "a_lk c_k^2 d_k d_l / b_k", "1/120"),
    ("A6-5.3", "a_lk d_k c_l^2 d_l / b_k", "1/30"),
    ("A6-6.1", "b_i a_il c_i c_l d_l^2 / b_l^2", "1/30"),
    ("A6-6.2", "a_ml c_l d_l^2 d_m / b_l^2", "1/60"),
    ("A6-6.3", "a_kl c_k d_k^2 c_l / b_k", "1/120"),
    ("A6-7.1", "a_lm c_l d_l^2 d_m / b_l b_m", "1/40"),
    ("A6-7.2", "b_i a_im c_i d_m^3 / b_m^3", "7/60"),
    ("A6-7.3", "a_nm d_m^3 d_n / b_m^3", "1/12"),
    ("A6-8.1", "a_lm d_l^3 c_m / b_l^2", "1/120"),
    ("A6-8.2", "a_nl a_ml d_l d_m d_n / b_l^2", "1/24"),
    ("A6-8.3", "a_mk a_lk c_k d_l d_m / b_k", "1/120"),
    ("A6-9.1", "a_mn d_m^3 d_n / b_m^2 b_n", "1/24"),
    ("A6-9.2", "a_ml a_lk d_k c_l d_m / b_k", "1/80"),
    ("A6-9.3", "b_i a_im a_il c_i d_l d_m / b_l b_m", "11/120"),
    ("A6-10.1", "a_nl a_lm d_l d_m d_n / b_l b_m", "1/48"),
    ("A6-10.2", "a_nm a_nl d_l d_m d_n / b_l b_m", "1/24"),
    ("A6-10.3", "b_i b_j a_jk a_ik c_i c_j c_k / b_k", "1/24"),
    ("A6-11.1", "b_i b_j a_jl a_il c_i c_j d_l / b_l^2", "11/120"),
    ("A6-11.2", "b_i a_lk a_il c_i d_k c_l / b_k", "11/240"),
    ("A6-11.3", "b_i a_lk a_ik c_i c_k d_l / b_k", "1/60"),
    ("A6-12.1", "b_i a_ml a_il c_i d_l d_m / b_l^2", "7/120"),
    ("A6-12.2", "b_i a_lm a_il c_i d_l d_m / b_l b_m", "11/240"),
    ("A6-12.3", "b_i a_ik a_ij c_i c_j c_k", "1/24"),
    ("A6-13.1", "b_i a_ik a_il c_i d_k c_l / b_k", "7/120"),
    ("A6-13.2", "a_mk a_kl d_k c_l d_m / b_k", "1/240"),
    ("A6-13.3", "b_i a_ik a_kl c_i d_k c_l / b_k", "1/80"),
    ("A6-14.1", "b_i a_im a_lm c_i d_l^2 / b_l b_m", "7/180"),
    ("A6-14.2", "a_jl a_jk d_j c_k c_l", "1/120"),
    ("A6-14.3", "a_lk a_lm d_k d_l c_m / b_k", "1/60"),
    # printed with a dangling b_k after the product; b_k belongs in the denominator
    ("A6-15.1", "b_i a_lk a_ik c_i^2 d_l / b_k", "19/360"),
    ("A6-15.2", "a_mk a_lk c_l d_l d_m / b_k", "1/45"),
    ("A6-15.3", "a_nm a_lm d_l^2 d_n / b_l b_m", "1/36"),
    ("A6-16.1", "a_lm a_kl d_k^2 c_m / b_k", "1/360"),
    ("A6-16.2", "b_i a_im a_ml c_i d_l^2 / b_l^2", "13/180"),
    ("A6-16.3", "a_nm a_ln d_l^2 d_m / b_l b_m", "1/72"),
    ("A6-17.1", "a_nm a_ml d_l^2 d_n / b_l^2", "1/36"),
    ("A6-17.2", "b_i a_im a_il d_l^2 c_m / b_l^2", "19/360"),
    ("A6-17.3", "b_i a_in a_im d_m^2 d_n / b_m^2 b_n", "7/72"),
    ("A6-18.1", "b_i a_ik a_lk c_i c_l d_l / b_k", "13/360"),
    ("A6-18.2", "a_mk a_lm d_k c_l d_l / b_k", "7/360"),
    ("A6-18.3", "b_i a_il a_lk c_i c_k d_k / b_k", "7/360"),
    ("A6-19.1", "a_ml a_lk c_k d_k d_m / b_k", "1/180"),
    ("A6-19.2", "b_i a_il a_ik c_k d_k c_l / b_k", "1/45"),
    ("A6-19.3", "b_i a_im a_il c_l d_l d_m / b_l b_m", "13/360"),
    ("A6-20.1", "b_i b_j a_jk a_ik c_i^2 c_j / b_k", "7/72"),
    # same dangling-b_k repair as A6-15.1
    ("A6-20.2", "b_i a_lk a_il c_i^2 d_k / b_k", "13/180"),
    ("A6-20.3", "b_i a_ik a_il d_k c_l^2 / b_k", "7/180"),
    ("A6-21.1", "b_i b_j a_jl a_lk a_ik c_i c_j / b_k", "1/18"),
    ("A6-21.2", "b_i b_j a_jl a_jk a_ik c_i c_l / b_k", "7/144"),
    # printed without a_il, leaving l unlinked; a_il is the unique single-atom
    # repair satisfied by all four order-six collocation schemes
    ("A6-22.1", "b_i b_j a_jm a_im a_il c_j d_l / b_l b_m", "61/720"),
    ("A6-22.2", "b_i a_lm a_il a_ik d_k c_m / b_k", "7/360"),
    ("A6-23.1", "b_i a_im a_ml a_lk c_i d_k / b_k", "19/720"),
    ("A6-23.2", "b_i a_im a_il a_lk d_k c_m / b_k", "13/360"),
    ("A6-24.1", "b_i a_im a_in a_nl d_l d_m / b_l b_m", "1/18"),
    ("A6-24.2", "b_i a_ik a_mk a_lm c_i d_l / b_k", "7/360"),
    ("A6-25.1", "a_nk a_mn a_lm d_k d_l / b_k", "1/144"),
    # printed as a_ik a_mk (m then only appears in a column sum); a_im a_mk is
    # the unique single-index repair satisfied by all order-six schemes
    ("A6-25.2", "b_i a_im a_mk a_lk c_i d_l / b_k", "13/360"),
    ("A6-26.1", "a_nm a_mk a_lk d_l d_n / b_k", "1/72"),
    ("A6-26.2", "b_i a_im a_ik a_lk d_l c_m / b_k", "19/720"),
    ("A6-27", "b_i a_im a_il a_nl d_m d_n / b_l b_m", "7/144"),
]


def _order_of(cid: str) -> int:
    return int(cid[1])


def _build(rows, kind) -> list[Condition]:
    return [Condition(cid, _order_of(cid), kind, SumExpr.parse(expr), Fraction(rhs)) for cid, expr, rhs in rows]


CONDITIONS: tuple[Condition, ...] = tuple(_build(_STATE, Kind.STATE) + _build(_ADDITIONAL, Kind.ADDITIONAL))


def conditions_by_id() -> dict[str, Condition]:
    return {c.id: c for c in CONDITIONS}


# --------------------------------------------------------------------------
# evaluation

def _vectors_exact(t: Tableau):
    obj = lambda seq: np.array(list(seq), dtype=object)  # noqa: E731
    A = np.empty((t.s, t.s), dtype=object)
    for i, row in enumerate(t.A):
        for j, x in enumerate(row):
            A[i, j] = x
    return {"a": A, "b": obj(t.b), "c": obj(t.c), "d": obj(compute_d(t))}


def _vectors_float(t: Tableau):
    A, b = t.A_float, t.b_float
    return {"a": A, "b": b, "c": t.c_float, "d": b @ A}


def _atom_array(vals, atom: Atom, invert: bool):
    arr = vals[atom.sym]
    if atom.power != 1:
        arr = arr ** atom.power
    if invert:
        if any(not x for x in arr.ravel()):
            raise ZeroWeight(f"denominator atom {atom} vanishes")
        arr = 1 / arr
    return arr


def _factors(expr: SumExpr, vals):
    out = []
    for atom in expr.numerator:
        out.append((atom.idx, _atom_array(vals, atom, False)))
    for atom in expr.denominator:
        out.append((atom.idx, _atom_array(vals, atom, True)))
    return out


def _align(idx, arr, target):
    """View ``arr`` (axes ``idx``) broadcastable against axes ``target``."""
    perm = sorted(range(len(idx)), key=lambda k: target.index(idx[k]))
    arr = np.transpose(arr, perm)
    shape = [1] * len(target)
    for k in perm:
        shape[target.index(idx[k])] = arr.shape[perm.index(k)]
    return arr.reshape(shape)


def _contract(factors, indices):
    """Sum out ``indices`` one at a time (variable elimination)."""
    factors = [(tuple(dict.fromkeys(idx)), _diag(idx, arr)) for idx, arr in factors]
    remaining = list(indices)
    while remaining:
        def cost(v):
            involved = set()
            for idx, _ in factors:
                if v in idx:
                    involved.update(idx)
            return len(involved)

        v = min(remaining, key=cost)
        remaining.remove(v)
        hit = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        target = []
        for idx, _ in hit:
            for u in idx:
                if u not in target:
                    target.append(u)
        prod = None
        for idx, arr in hit:
            al = _align(idx, arr, target)
            prod = al if prod is None else prod * al
        summed = prod.sum(axis=target.index(v))
        factors.append((tuple(u for u in target if u != v), summed))
    total = None
    for _, arr in factors:
        val = arr if not isinstance(arr, np.ndarray) else arr.reshape(()).item()
        total = val if total is None else total * val
    return total


def _diag(idx, arr):
    if len(idx) == 2 and idx[0] == idx[1]:
        return np.diagonal(arr).copy()
    return arr


def eval_condition(t: Tableau, cond: Condition, mode: str = "exact", tol: float = DEFAULT_TOL):
    """Evaluate ``cond`` on ``t``; return ``(value, passed)``.

    ``mode="exact"`` sums in Q(sqrt(d)) and compares exactly; ``mode="float"``
    contracts with ``numpy.einsum`` and passes when ``|value - rhs| <= tol``.
    """
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "float" and tol <= 0:
        raise ValueError("tolerance must be positive")
    return _Evaluator(t, mode, tol)(cond)


def _eval_float(expr: SumExpr, vals) -> float:
    operands, subs = [], []
    for idx, arr in _factors(expr, vals):
        operands.append(arr)
        subs.append("".join(idx))
    return float(np.einsum(",".join(subs) + "->", *operands))


class _Evaluator:
    """Caches per-tableau vectors so a full classification reuses them."""

    def __init__(self, t: Tableau, mode: str, tol: float):
        self.t, self.mode, self.tol = t, mode, tol
        self.vals = _vectors_exact(t) if mode == "exact" else _vectors_float(t)
        self.cache: dict[str, tuple] = {}

    def __call__(self, cond: Condition):
        hit = self.cache.get(cond.id)
        if hit is None:
            if self.mode == "exact":
                v = _contract(_factors(cond.expr, self.vals), cond.expr.indices)
                v = v if isinstance(v, QuadNum) else QuadNum(v)
                hit = (v, v == cond.rhs)
            else:
                v = _eval_float(cond.expr, self.vals)
                hit = (v, abs(v - float(cond.rhs)) <= self.tol)
            self.cache[cond.id] = hit
        return hit


# --------------------------------------------------------------------------
# classification

@dataclass
class OrderReport:
    scheme: str
    state_order: int
    control_order: int
    failures: list[tuple[str, object, Fraction]] = field(default_factory=list)

    def __str__(self):
        lines = [f"{self.scheme}: state_order={self.state_order} control_order={self.control_order}"]
        for cid, value, rhs in self.failures:
            lines.append(f"  {cid} = {value} (expected {rhs})")
        return "\n".join(lines)


def classify(t: Tableau, mode: str = "exact", tol: float = DEFAULT_TOL,
             conditions: Sequence[Condition] = CONDITIONS) -> OrderReport:
    ev = _Evaluator(t, mode, tol)

    def highest(kinds):
        p = 0
        for order in range(1, MAX_ORDER + 1):
            if all(ev(c)[1] for c in conditions if c.order == order and c.kind in kinds):
                p = order
            else:
                break
        return p

    state = highest({Kind.STATE})
    control = highest({Kind.STATE, Kind.ADDITIONAL})
    failures = []
    for order, kinds in ((state + 1, {Kind.STATE}), (control + 1, {Kind.STATE, Kind.ADDITIONAL})):
        for c in conditions:
            if c.order == order and c.kind in kinds:
                value, ok = ev(c)
                if not ok and all(f[0] != c.id for f in failures):
                    failures.append((c.id, value, c.rhs))
    return OrderReport(t.name, state, control, failures)


def _holds(lhs, rhs, mode, tol):
    if mode == "exact":
        return lhs == rhs
    return abs(float(lhs) - float(rhs)) <= tol


def check_simplifying(t: Tableau, mode: str = "exact", tol: float = DEFAULT_TOL,
                      caps: tuple[int, int, int] = (12, 6, 6)) -> tuple[int, int, int]:
    """Largest ``(p, eta, zeta)`` for which B(p), C(eta) and D(zeta) hold."""
    s = t.s
    if mode == "exact":
        A, b, c = t.A, t.b, t.c
        zero, frac = QuadNum(0), (lambda n, m: QuadNum(Fraction(n, m)))
    else:
        A, b, c = t.A_float, t.b_float, t.c_float
        zero, frac = 0.0, (lambda n, m: n / m)

    def B(q):
        lhs = sum((b[i] * c[i] ** (q - 1) for i in range(s)), zero)
        return _holds(lhs, frac(1, q), mode, tol)

    def C(q):
        return all(
            _holds(sum((A[i][j] * c[j] ** (q - 1) for j in range(s)), zero), c[i] ** q * frac(1, q), mode, tol)
            for i in range(s)
        )

    def D(q):
        return all(
            _holds(
                sum((b[i] * c[i] ** (q - 1) * A[i][j] for i in range(s)), zero),
                b[j] * frac(1, q) * (1 - c[j] ** q),
                mode,
                tol,
            )
            for j in range(s)
        )

    def largest(pred, cap):
        q = 0
        while q < cap and pred(q + 1):
            q += 1
        return q

    return largest(B, caps[0]), largest(C, caps[1]), largest(D, caps[2])


# --------------------------------------------------------------------------
# registry self-check

# orders of the registry pairings as established by the sufficiency theorems
# and the SDIRK counterexample: (classical state order, optimal-control order)
EXPECTED_ORDERS: dict[str, tuple[int, int]] = {
    "stormer-verlet": (2, 2),
    "radau-ia-3": (3, 3),
    "radau-iia-3": (3, 3),
    "gauss-4": (4, 4),
    "sdirk-4": (4, 2),
    "lobatto-iiia-4": (4, 4),
    "lobatto-iiib-4": (4, 4),
    "lobatto-iiic-4": (4, 4),
    "radau-ia-5": (5, 5),
    "radau-iia-5": (5, 5),
    "gauss-6": (6, 6),
    "lobatto-iiia-6": (6, 6),
    "lobatto-iiib-6": (6, 6),
    "lobatto-iiic-6": (6, 6),
}


@dataclass(frozen=True)
class Defect:
    scheme: str
    condition: str
    value: object
    rhs: Fraction

    def __str__(self):
        return f"{self.scheme}: {self.condition} evaluates to {self.value}, table says {self.rhs}"


def validate_registry(conditions: Sequence[Condition] = CONDITIONS,
                      schemes: dict[str, Tableau] | None = None) -> list[Defect]:
    """Report (scheme, condition) pairs contradicting the established orders.

    For each scheme every condition up to its established control order, and
    every State condition up to its classical order, must hold exactly.  Any
    failure points at a transcription defect in one of the two registries.
    """
    schemes = registry() if schemes is None else schemes
    defects = []
    for name, t in schemes.items():
        if name not in EXPECTED_ORDERS:
            continue
        state_q, control_q = EXPECTED_ORDERS[name]
        ev = _Evaluator(t, "exact", DEFAULT_TOL)
        for c in conditions:
            required = c.order <= control_q or (c.kind is Kind.STATE and c.order <= state_q)
            if required:
                value, ok = ev(c)
                if not ok:
                    defects.append(Defect(name, c.id, value, c.rhs))
    return defects


def state_split_audit(schemes: dict[str, Tableau] | None = None) -> dict[str, list[str]]:
    """For State conditions of order 5 and 6, list registry schemes violating them.

    Observational output for auditing which table rows behave like classical
    conditions; nothing is asserted about it.
    """
    schemes = registry() if schemes is None else schemes
    out = {}
    evs = {name: _Evaluator(t, "exact", DEFAULT_TOL) for name, t in schemes.items()}
    for c in CONDITIONS:
        if c.kind is Kind.STATE and c.order >= 5:
            out[c.id] = [name for name, ev in evs.items() if not ev(c)[1]]
    return out


def export_conditions(conditions: Iterable[Condition] = CONDITIONS) -> str:
    """Tab-separated audit listing: id, order, kind, expression, rhs."""
    lines = ["id\torder\tkind\texpression\trhs"]
    for c in conditions:
        lines.append(f"{c.id}\t{c.order}\t{c.kind}\t{c.expr}\t{c.rhs}")
    return "\n".join(lines) + "\n"
