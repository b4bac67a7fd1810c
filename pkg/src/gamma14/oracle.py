"""Brute-force ground truth.

Three independent checks live here:

* ``brute_search``: exhaustive least positive value of Q(x + c) over an integer box.
* ``certify_critical``: a residue-class proof that the six extremal forms never take a
  positive value below d, together with a witness attaining d.
* ``verify_case_table``: exact rational sampling of the per-case solution tables.
"""

from __future__ import annotations

import ast
import functools
import json
import math
import operator
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .exact import RootAffine, as_rational, exact_root, fmt
from .forms import GAMMA_8, QForm, ShiftedInstance, evaluate, form_determinant, form_from_polynomial
from .lemmas import rational_gcd
from .sampling import seed_from_env

DEFAULT_RADIUS = 10
CRITICAL_RADIUS = 6


# ---------------------------------------------------------------- search boxes


@dataclass(frozen=True)
class SearchBox:
    """Integer box lo[i] <= x_i <= hi[i]; results are reported in sup-norm shell order."""

    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box needs matching non-empty bound vectors")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("box bounds must satisfy lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, radius: int, n: int = 5) -> "SearchBox":
        if radius < 0:
            raise ValueError("radius must be non-negative")
        return cls((-radius,) * n, (radius,) * n)

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def size(self) -> int:
        return math.prod(b - a + 1 for a, b in zip(self.lo, self.hi))

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.n and all(a <= v <= b for v, a, b in zip(x, self.lo, self.hi))

    def to_json(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}


def shell_key(x: Sequence[int]) -> Tuple:
    return (max((abs(v) for v in x), default=0), tuple(x))


@dataclass(frozen=True)
class SearchResult:
    minimum: Optional[Fraction]
    witnesses: Tuple[Tuple[int, ...], ...]
    count: int
    box: SearchBox

    def to_json(self) -> dict:
        return {
            "minimum": None if self.minimum is None else fmt(self.minimum),
            "minimum_decimal": None if self.minimum is None else f"{float(self.minimum):.12g}",
            "witnesses": [list(w) for w in self.witnesses],
            "count": self.count,
            "box": self.box.to_json(),
        }


def integer_model(instance: ShiftedInstance) -> Tuple[np.ndarray, np.ndarray, int, int]:
    """(M, p, q, s) with s * q^2 * Q(x + c) = (q x + p)^T M (q x + p) for integer x."""
    gram = instance.form.gram
    s = 1
    for row in gram:
        for v in row:
            s = math.lcm(s, v.denominator)
    q = 1
    for c in instance.shift:
        q = math.lcm(q, c.denominator)
    M = np.array([[int(v * s) for v in row] for row in gram], dtype=np.int64)
    p = np.array([int(c * q) for c in instance.shift], dtype=np.int64)
    return M, p, q, s


def brute_search(instance: ShiftedInstance, box: Optional[SearchBox] = None, cap: int = 4096) -> SearchResult:
    """Exact least positive value of Q(x + c) over the box and every x attaining it."""
    box = box or SearchBox.cube(DEFAULT_RADIUS, instance.n)
    if box.n != instance.n:
        raise ValueError("box dimension differs from the form")
    M, p, q, s = integer_model(instance)
    best, hits, count = _kernels.box_min(M, p, q, (box.lo, box.hi), cap)
    if best <= 0:
        return SearchResult(None, (), 0, box)
    witnesses = sorted((tuple(int(v) for v in h) for h in hits), key=shell_key)
    return SearchResult(Fraction(int(best), s * q * q), tuple(witnesses), int(count), box)


# ---------------------------------------------------------------- critical forms


@dataclass(frozen=True)
class CriticalForm:
    id: str
    polynomial: str
    shift: Tuple[Fraction, ...]

    def instance(self) -> ShiftedInstance:
        return ShiftedInstance(form_from_polynomial(self.polynomial, 5), self.shift, GAMMA_8)


def _shift(*xs) -> Tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


_H = Fraction(1, 2)
_TERNARY = "(x3**2 + x4**2 + x5**2) - (x3*x4 + x3*x5 + x4*x5)"

CRITICAL_FORMS: Dict[str, CriticalForm] = {
    f.id: f
    for f in (
        CriticalForm("Q1", "(x1 - x2/4)*x2 - (x3**2 + x4**2 + x5**2)/4", _shift(_H, _H, _H, _H, _H)),
        CriticalForm("Q2", "x1*x2 - " + _TERNARY, _shift(0, 0, 0, 0, 0)),
        CriticalForm("Q3", "(x1 + x2/2)*x2 - " + _TERNARY, _shift(_H, 0, 0, 0, 0)),
        CriticalForm("Q4", "(x1 + x3/2 + x4/2)*x2 - x3**2/2 - x4**2/2 - 2*x5**2", _shift(0, 0, 0, 0, 0)),
        CriticalForm("Q5", "(x1 + x2/2 + x3/2 + x4/2)*x2 - x3**2/2 - x4**2/2 - 2*x5**2", _shift(_H, 0, 0, 0, 0)),
        CriticalForm("Q6", "(x1 + x2/2 + x3/2)*x2 - x3**2/2 - x4**2 - x5**2", _shift(0, 0, 0, _H, _H)),
    )
}


def _q6_group(r: Tuple[int, ...]) -> str:
    if r[1] % 2:
        return "x2 odd"
    if r[2] % 2:
        return "x2 even, x3 odd"
    return "x2 even, x3 even"


CLASS_GROUPS: Dict[str, Callable[[Tuple[int, ...]], str]] = {"Q6": _q6_group}


class CertificateFailure(AssertionError):
    """The extremal claim does not hold; carries the search and sweep that refute it."""

    def __init__(self, message: str, search: Optional["SearchResult"] = None, sweep: Optional["ResidueSweep"] = None):
        super().__init__(message)
        self.search = search
        self.sweep = sweep


@dataclass(frozen=True)
class ResidueGroup:
    label: str
    classes: int
    least_positive: Fraction
    spacings: Tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"label": self.label, "classes": self.classes, "least_positive": fmt(self.least_positive),
                "spacings": [fmt(g) for g in self.spacings]}


@dataclass(frozen=True)
class ResidueSweep:
    modulus: int
    classes: int
    least_positive: Fraction
    groups: Tuple[ResidueGroup, ...]

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "classes": self.classes, "least_positive": fmt(self.least_positive),
                "groups": [g.to_json() for g in self.groups]}


def residue_sweep(instance: ShiftedInstance, modulus: int,
                  group: Optional[Callable[[Tuple[int, ...]], str]] = None) -> ResidueSweep:
    """Lower bound for positive values of Q(x + c), one residue class of x mod m at a time.

    On x = r + m y the value is Q(r + c) + 2m (G(r + c)) . y + m^2 y^T G y, an element of
    Q(r + c) + g_r Z where g_r generates the coefficients in y.  The least positive member
    of that coset bounds every positive value taken on the class.
    """
    G = instance.form.gram
    n = instance.n
    quad = [modulus * modulus * G[i][i] for i in range(n)]
    quad += [2 * modulus * modulus * G[i][j] for i in range(n) for j in range(i + 1, n)]
    tally: Dict[str, List] = {}
    overall = None
    for r in product(range(modulus), repeat=n):
        pt = [Fraction(ri) + c for ri, c in zip(r, instance.shift)]
        base = evaluate(instance.form, pt)
        lin = [2 * modulus * sum(G[i][j] * pt[j] for j in range(n)) for i in range(n)]
        g = rational_gcd(*lin, *quad)
        least = base % g if g else base
        if g and least == 0:
            least = g
        label = group(r) if group else "all residues"
        entry = tally.setdefault(label, [0, None, set()])
        entry[0] += 1
        if least > 0:
            entry[1] = least if entry[1] is None else min(entry[1], least)
            overall = least if overall is None else min(overall, least)
        entry[2].add(g)
    if overall is None:
        raise CertificateFailure("no residue class admits a positive value")
    groups = tuple(ResidueGroup(k, v[0], v[1] if v[1] is not None else Fraction(0), tuple(sorted(v[2])))
                   for k, v in sorted(tally.items()))
    return ResidueSweep(modulus, modulus ** n, overall, groups)


@dataclass(frozen=True)
class EqualityCertificate:
    form_id: str
    shift: Tuple[Fraction, ...]
    scale: Fraction
    modulus: int
    witness: Tuple[int, ...]
    value: Fraction
    d: Fraction
    sweep: ResidueSweep
    search: SearchResult
    elapsed: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "form": self.form_id,
            "status": "certified",
            "shift": [fmt(c) for c in self.shift],
            "scale": fmt(self.scale),
            "modulus": self.modulus,
            "d": fmt(self.d),
            "d_decimal": f"{float(self.d):.12g}",
            "witness": list(self.witness),
            "value": fmt(self.value),
            "box_minimum": fmt(self.search.minimum) if self.search.minimum is not None else None,
            "box_witness_count": self.search.count,
            "residue_sweep": self.sweep.to_json(),
            "seconds": round(self.elapsed, 3),
        }


def certify_critical(form_id: str, radius: int = CRITICAL_RADIUS, moduli: Iterable[int] = (1, 2, 4, 8)) -> EqualityCertificate:
    """Prove min positive Q(x + c) = d for one of the six extremal forms.

    The residue sweep shows no positive value lies below d; the box search exhibits d.
    """
    start = time.perf_counter()
    try:
        crit = CRITICAL_FORMS[form_id]
    except KeyError:
        raise ValueError(f"unknown critical form {form_id!r}; expected one of {sorted(CRITICAL_FORMS)}") from None
    inst = crit.instance()
    d = exact_root(inst.d_power(), inst.n)
    if d is None:
        raise CertificateFailure(f"{form_id}: d is irrational, determinant {form_determinant(inst.form)}")
    group = CLASS_GROUPS.get(form_id)
    search = brute_search(inst, SearchBox.cube(radius, inst.n))
    sweep = None
    for m in moduli:
        if group and m % 2:
            continue
        sweep = residue_sweep(inst, m, group)
        if sweep.least_positive >= d:
            break
    if search.minimum is None or search.minimum < d:
        raise CertificateFailure(
            f"{form_id}: value {search.minimum} < d = {d} at x = {search.witnesses[0] if search.witnesses else None}",
            search, sweep)
    if sweep is None or sweep.least_positive < d:
        raise CertificateFailure(f"{form_id}: residue sweep bottoms out below d", search, sweep)
    if search.minimum != d:
        raise CertificateFailure(f"{form_id}: box minimum {search.minimum} differs from d = {d}", search, sweep)
    return EqualityCertificate(form_id, inst.shift, d, sweep.modulus, search.witnesses[0], search.minimum, d,
                               sweep, search, time.perf_counter() - start)


# ---------------------------------------------------------------- range quantities

QUANTITY_KINDS = ("f", "g", "p", "q")


@dataclass(frozen=True)
class RangeQuantity:
    """f_n = n|c1| + n^2 a2, g_n = -n|c1| + n^2 a2, p_n = n c1 + n^2 a2, q_n = -n c1 + n^2 a2."""

    kind: str
    n: int
    c1: Fraction
    a2: Fraction

    def __post_init__(self):
        if self.kind not in QUANTITY_KINDS:
            raise ValueError(f"kind must be one of {QUANTITY_KINDS}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def value(self) -> Fraction:
        lin = {"f": abs(self.c1), "g": -abs(self.c1), "p": self.c1, "q": -self.c1}[self.kind]
        return self.n * lin + self.n * self.n * self.a2


def quantities(c1, a2, upto: int = 4, absolute: Callable = abs) -> Dict[str, object]:
    """All f_n, g_n, p_n, q_n for n <= upto; works on rationals and numpy arrays alike."""
    out = {}
    ac = absolute(c1)
    for n in range(1, upto + 1):
        sq = n * n * a2
        out[f"f{n}"] = n * ac + sq
        out[f"g{n}"] = -n * ac + sq
        out[f"p{n}"] = n * c1 + sq
        out[f"q{n}"] = -n * c1 + sq
    return out


# ---------------------------------------------------------------- expressions

_BIN = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.Pow: operator.pow}
_CMP = {ast.Lt: operator.lt, ast.LtE: operator.le, ast.Gt: operator.gt, ast.GtE: operator.ge}


class TableError(ValueError):
    pass


@functools.lru_cache(maxsize=None)
def _parse(text: str) -> ast.AST:
    try:
        tree = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise TableError(f"cannot parse {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        ok = isinstance(node, (ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Compare, ast.Load,
                               ast.Call, ast.USub, ast.UAdd, *_BIN, *_CMP))
        if not ok:
            raise TableError(f"unsupported syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Call) and not (isinstance(node.func, ast.Name) and node.func.id == "abs"):
            raise TableError(f"only abs() calls are allowed in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, int):
            raise TableError(f"write constants as integer ratios in {text!r}")
    return tree


def _eval(node: ast.AST, env: Mapping[str, object], exact: bool):
    if isinstance(node, ast.Constant):
        return Fraction(node.value) if exact else float(node.value)
    if isinstance(node, ast.Name):
        try:
            return env[node.id]
        except KeyError:
            raise TableError(f"undeclared name {node.id!r}") from None
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env, exact)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, env, exact)
        if isinstance(node.op, ast.Pow):
            if not isinstance(node.right, ast.Constant):
                raise TableError("exponents must be integer literals")
            return left ** node.right.value
        return _BIN[type(node.op)](left, _eval(node.right, env, exact))
    if isinstance(node, ast.Call):
        v = _eval(node.args[0], env, exact)
        return np.abs(v) if isinstance(v, np.ndarray) else abs(v)
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env, exact)
        result = True
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env, exact)
            r = _CMP[type(op)](left, right)
            result = (result and r) if exact else np.logical_and(result, r)
            if exact and not result:
                return False
            left = right
        return result
    raise TableError(f"cannot evaluate {ast.dump(node)}")


def evaluate_expr(text: str, env: Mapping[str, object], exact: bool = True):
    return _eval(_parse(text), env, exact)


# ---------------------------------------------------------------- case tables


@dataclass(frozen=True)
class CaseRow:
    index: int
    when: Tuple[str, ...]
    range: Tuple[str, ...]
    x: Dict[str, str]
    claimed: str
    exclude: Optional[str] = None
    note: Optional[str] = None

    @property
    def conditions(self) -> Tuple[str, ...]:
        return self.when + self.range

    def label(self) -> str:
        return " and ".join(self.conditions)

    def to_json(self) -> dict:
        out = {"row": self.index, "range": list(self.range), "when": list(self.when), "x": dict(self.x),
               "claimed": self.claimed}
        if self.exclude:
            out["exclude"] = self.exclude
        return out


@dataclass(frozen=True)
class CaseTable:
    id: str
    title: str
    form: str
    a2_variant: str
    bound: str
    strict: bool
    params: Dict[str, dict]
    derived: Dict[str, str]
    constraints: Tuple[str, ...]
    rows: Tuple[CaseRow, ...]

    @classmethod
    def from_json(cls, obj: dict) -> "CaseTable":
        rows = []
        for i, r in enumerate(obj["rows"], 1):
            rng = r["range"]
            rows.append(CaseRow(i, tuple(r.get("when", ())), tuple([rng] if isinstance(rng, str) else rng),
                                dict(r["x"]), r["claimed"], r.get("exclude"), r.get("note")))
        table = cls(obj["id"], obj.get("title", obj["id"]), obj["form"], obj.get("a2_variant", "a2"),
                    obj["bound"], bool(obj.get("strict", True)), dict(obj.get("params", {})),
                    dict(obj.get("derived", {})), tuple(obj.get("constraints", ())), tuple(rows))
        table.validate()
        return table

    def validate(self) -> None:
        declared = {"c1", "a2", "s"} | set(self.params) | set(self.derived) | set(quantities(0, 0))
        for row in self.rows:
            names = set(declared) | set(row.x)
            for text in (*row.conditions, row.claimed, *row.x.values(), *( [row.exclude] if row.exclude else [])):
                for node in ast.walk(_parse(text)):
                    if isinstance(node, ast.Name) and node.id not in names and node.id != "abs":
                        raise TableError(f"{self.id} row {row.index}: undeclared name {node.id!r}")
        for node in ast.walk(_parse(self.form)):
            if isinstance(node, ast.Name) and not (node.id in declared or node.id.startswith("x")):
                raise TableError(f"{self.id}: form uses undeclared {node.id!r}")


def load_case_table(path: str) -> CaseTable:
    with open(path) as fh:
        return CaseTable.from_json(json.load(fh))


def _bundled_entries():
    folder = resources.files("gamma14") / "data" / "case_tables"
    return [e for e in sorted(folder.iterdir(), key=lambda p: p.name) if e.name.endswith(".json")]


def bundled_case_tables() -> List[CaseTable]:
    return [CaseTable.from_json(json.loads(e.read_text())) for e in _bundled_entries()]


def bundled_case_table_paths() -> List[str]:
    return [str(e) for e in _bundled_entries()]


class RowFalsified(AssertionError):
    def __init__(self, table: str, row: CaseRow, params: Mapping[str, Fraction], value, claimed, reason: str):
        self.table = table
        self.row = row
        self.params = dict(params)
        self.value = value
        self.claimed = claimed
        self.reason = reason
        shown = ", ".join(f"{k}={fmt(v)}" for k, v in self.params.items())
        super().__init__(f"{table} row {row.index} ({row.label()}): {reason} at {shown}")

    def to_json(self) -> dict:
        return {"table": self.table, "row": self.row.index, "range": self.row.label(), "reason": self.reason,
                "params": {k: fmt(v) for k, v in self.params.items()},
                "value": _show(self.value), "claimed": _show(self.claimed)}


def _show(v) -> str:
    if isinstance(v, Fraction):
        return fmt(v)
    return repr(v)


@dataclass
class RowStats:
    index: int
    label: str
    tested: int = 0
    boundary: int = 0
    falsified: int = 0

    @property
    def reached(self) -> bool:
        return self.tested > 0


@dataclass
class CaseTableReport:
    """Outcome of sampling one case table."""

    table: str
    seed: int
    trials: int
    rows: List[RowStats]
    falsified: List[RowFalsified]
    coverage_samples: int = 0
    gaps: int = 0
    gap_example: Optional[Dict[str, Fraction]] = None
    overlaps: Dict[Tuple[int, ...], int] = field(default_factory=dict)
    excluded: int = 0

    @property
    def ok(self) -> bool:
        return not self.falsified

    @property
    def unreached(self) -> List[int]:
        return [r.index for r in self.rows if not r.reached]

    def warnings(self) -> List[str]:
        out = []
        if self.gaps:
            ex = ", ".join(f"{k}={float(v):.6g}" for k, v in (self.gap_example or {}).items())
            out.append(f"gap: {self.gaps}/{self.coverage_samples} admissible samples match no row (e.g. {ex})")
        for rows, count in sorted(self.overlaps.items()):
            out.append(f"overlap: rows {', '.join(map(str, rows))} share {count} samples")
        for i in self.unreached:
            out.append(f"row {i}: no admissible parameter satisfies its range")
        if self.excluded:
            out.append(f"{self.excluded} samples fell in excluded regions and were not tested")
        return out

    def summary(self) -> str:
        tested = sum(r.tested for r in self.rows)
        status = "ok" if self.ok else f"{len(self.falsified)} falsified"
        return f"{self.table}: {tested} trials over {len(self.rows)} rows, {status}, {len(self.warnings())} warnings"

    def to_json(self) -> dict:
        return {
            "table": self.table,
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "rows": [{"row": r.index, "range": r.label, "tested": r.tested, "boundary": r.boundary,
                      "falsified": r.falsified} for r in self.rows],
            "falsified": [f.to_json() for f in self.falsified[:20]],
            "falsified_count": len(self.falsified),
            "warnings": self.warnings(),
        }


class CaseSampler:
    """Seeded draws of exact rational parameters for a case table.

    Candidates are screened in floating point, then rounded to rationals with a random
    denominator and re-checked exactly, so every reported trial satisfies its predicates
    exactly.
    """

    def __init__(self, seed: Optional[int] = None, max_denominator: int = 10 ** 6, batch: int = 4096,
                 max_rounds: int = 60, boundary_share: float = 0.1):
        self.seed = seed_from_env() if seed is None else seed
        self.rng = random.Random(self.seed)
        self.np_rng = np.random.default_rng(self.seed)
        self.max_denominator = max_denominator
        self.batch = batch
        self.max_rounds = max_rounds
        self.boundary_share = boundary_share

    # -- parameter layout

    def sampled_names(self, table: CaseTable) -> List[str]:
        return ["c1", "a2"] + [k for k, v in table.params.items() if "range" in v]

    def _float_box(self, table: CaseTable) -> Dict[str, Tuple[float, float]]:
        box = {"c1": (-0.5, 0.5), "a2": (-0.5, 0.5)}
        for k, v in table.params.items():
            if "range" in v:
                lo, hi = (float(as_rational(x)) for x in v["range"])
                box[k] = (lo, hi)
        return box

    def _fixed(self, table: CaseTable, exact: bool) -> Dict[str, object]:
        out = {}
        for k, v in table.params.items():
            if "value" in v:
                val = as_rational(v["value"])
                out[k] = val if exact else float(val)
            elif "root" in v:
                rad, n = v["root"]
                root = RootAffine.root(as_rational(rad), int(n))
                out[k] = root if exact else float(root)
        return out

    def environment(self, table: CaseTable, point: Mapping[str, object], exact: bool) -> Dict[str, object]:
        env = dict(self._fixed(table, exact))
        env.update(point)
        c1, a2 = env["c1"], env["a2"]
        if exact:
            env["s"] = Fraction(1) if c1 >= 0 else Fraction(-1)
            env.update(quantities(c1, a2))
        else:
            env["s"] = np.where(c1 >= 0, 1.0, -1.0)
            env.update(quantities(c1, a2, absolute=np.abs))
        for name, text in table.derived.items():
            env[name] = evaluate_expr(text, env, exact)
        return env

    @staticmethod
    def admissible(env: Mapping[str, object], table: CaseTable, exact: bool):
        c1, a2 = env["c1"], env["a2"]
        base = (c1 > -0.5) & (c1 <= 0.5) & (a2 > -0.5) & (a2 <= 0.5) if not exact else (
            Fraction(-1, 2) < c1 <= Fraction(1, 2) and Fraction(-1, 2) < a2 <= Fraction(1, 2))
        for text in table.constraints:
            if exact:
                if not base:
                    return False
                base = bool(evaluate_expr(text, env, True))
            else:
                base = np.logical_and(base, evaluate_expr(text, env, False))
        return base

    @staticmethod
    def matches(env: Mapping[str, object], row: CaseRow, exact: bool):
        if exact:
            return all(evaluate_expr(c, env, True) for c in row.conditions)
        mask = True
        for c in row.conditions:
            mask = np.logical_and(mask, evaluate_expr(c, env, False))
        return mask

    # -- draws

    def _param_batch(self, table: CaseTable) -> Dict[str, np.ndarray]:
        """Float draws of the ranged table parameters that already satisfy the table constraints.

        Constraints only involve the parameters, so screening them before pairing with
        (c1, a2) keeps narrow parameter regions from starving the row sampling.
        """
        box = {k: v for k, v in self._float_box(table).items() if k not in ("c1", "a2")}
        if not table.constraints:
            return {k: self.np_rng.uniform(lo, hi, self.batch) for k, (lo, hi) in box.items()}
        kept: Dict[str, List[np.ndarray]] = {k: [] for k in box}
        have = 0
        for _ in range(200):
            draw = {k: self.np_rng.uniform(lo, hi, 8 * self.batch) for k, (lo, hi) in box.items()}
            probe = dict(draw, c1=np.zeros(8 * self.batch), a2=np.zeros(8 * self.batch))
            env = self.environment(table, probe, exact=False)
            mask = np.ones(8 * self.batch, dtype=bool)
            for text in table.constraints:
                mask &= np.asarray(evaluate_expr(text, env, False), dtype=bool)
            for k in box:
                kept[k].append(draw[k][mask])
            have += int(mask.sum())
            if have >= self.batch:
                break
        if have == 0:
            return {k: np.empty(0) for k in box}
        idx = self.np_rng.integers(0, have, self.batch)
        return {k: np.concatenate(v)[idx] for k, v in kept.items()}

    def _row_bounds(self, table: CaseTable, row: CaseRow, coords: str,
                    params: Dict[str, np.ndarray]) -> List[np.ndarray]:
        """Per-draw limits [u_lo, u_hi, v_lo, v_hi] that the row's conditions put on (u, v).

        Only comparisons whose other side depends on table parameters alone are used; the
        rest are left to the exact filter.
        """
        n = self.batch
        lim = [np.full(n, -1.0), np.full(n, 1.0), np.full(n, -1.0), np.full(n, 1.0)]
        axes = {"f1": 0, "g1": 1} if coords == "fg" else {"p1": 0, "q1": 1}
        probe = dict(params, c1=np.zeros(n), a2=np.zeros(n))
        env = self.environment(table, probe, exact=False)
        banned = set(quantities(Fraction(0), Fraction(0))) | {"c1", "a2", "s"}
        for text in row.conditions:
            node = _parse(text)
            if not isinstance(node, ast.Compare):
                continue
            terms = [node.left, *node.comparators]
            for i, op in enumerate(node.ops):
                left, right = terms[i], terms[i + 1]
                for var, other, upper in ((left, right, isinstance(op, (ast.Lt, ast.LtE))),
                                          (right, left, isinstance(op, (ast.Gt, ast.GtE)))):
                    if not (isinstance(var, ast.Name) and var.id in axes):
                        continue
                    if isinstance(op, (ast.Eq, ast.NotEq)):
                        continue
                    names = {x.id for x in ast.walk(other) if isinstance(x, ast.Name)}
                    if names & banned:
                        continue
                    val = np.broadcast_to(np.asarray(_eval(other, env, False), dtype=float), (n,))
                    k = 2 * axes[var.id] + (1 if upper else 0)
                    lim[k] = np.minimum(lim[k], val) if upper else np.maximum(lim[k], val)
        return lim

    def _float_batch(self, table: CaseTable, row: Optional[CaseRow] = None, coords: str = "pq") -> Dict[str, np.ndarray]:
        """Float candidates drawn in quantity coordinates (u, v) = (f1, g1) or (p1, q1).

        The map to (c1, a2) is linear, so uniform draws stay uniform. With a row, most
        draws are confined to the limits its conditions place on u and v.
        """
        pts = self._param_batch(table)
        if any(len(v) == 0 for v in pts.values()):
            return {}
        n = self.batch
        u = self.np_rng.uniform(-1.0, 1.0, n)
        v = self.np_rng.uniform(-1.0, 1.0, n)
        if row is not None:
            ulo, uhi, vlo, vhi = self._row_bounds(table, row, coords, pts)
            local = (self.np_rng.random(n) < 0.8) & (ulo <= uhi) & (vlo <= vhi)
            if coords == "fg":
                vhi = np.minimum(vhi, uhi)
                local &= vlo <= vhi
            u = np.where(local, ulo + (uhi - ulo) * self.np_rng.random(n), u)
            vcap = np.minimum(vhi, u) if coords == "fg" else vhi
            v = np.where(local, vlo + (vcap - vlo) * self.np_rng.random(n), v)
        if coords == "pq":
            c1 = (u - v) / 2
        else:
            c1 = np.where(self.np_rng.random(n) < 0.5, 1.0, -1.0) * (u - v) / 2
            c1[u < v] = np.nan
        a2 = (u + v) / 2
        # c1 = 1/2 is admissible but has measure zero; seed it explicitly.
        edge = self.np_rng.random(n) < 0.05
        c1[edge] = 0.5
        a2[edge] = u[edge] - 0.5
        pts["c1"] = c1
        pts["a2"] = a2
        return pts

    @staticmethod
    def _coords(row: Optional[CaseRow]) -> str:
        if row is None:
            return "pq"
        names = {n.id for c in row.conditions for n in ast.walk(_parse(c)) if isinstance(n, ast.Name)}
        return "fg" if names & {"f1", "g1", "f2", "g2", "f3", "g3", "f4", "g4"} else "pq"

    def _rationalize(self, x: float) -> Fraction:
        if x == 0.5:
            return Fraction(1, 2)
        den = self.rng.randint(2, self.max_denominator)
        return Fraction(round(x * den), den)

    def admissible_points(self, table: CaseTable, count: int, row: Optional[CaseRow] = None) -> List[Dict[str, Fraction]]:
        """Up to ``count`` exact points admissible for the table (and inside ``row`` if given)."""
        names = self.sampled_names(table)
        coords = self._coords(row)
        out: List[Dict[str, Fraction]] = []
        for _ in range(self.max_rounds):
            pts = self._float_batch(table, row, coords)
            if not pts:
                return out
            with np.errstate(invalid="ignore"):
                env = self.environment(table, pts, exact=False)
                mask = np.asarray(self.admissible(env, table, False), dtype=bool)
                if row is not None:
                    mask &= np.asarray(self.matches(env, row, False), dtype=bool)
            for idx in np.flatnonzero(mask):
                point = {k: self._rationalize(float(pts[k][idx])) for k in names}
                exact_env = self.environment(table, point, exact=True)
                if not self.admissible(exact_env, table, True):
                    continue
                if row is not None and not self.matches(exact_env, row, True):
                    continue
                out.append(point)
                if len(out) >= count:
                    return out
        return out

    def boundary_point(self, table: CaseTable, row: CaseRow, point: Dict[str, Fraction]) -> Optional[Dict[str, Fraction]]:
        """Move a2 so that one non-strict comparison in the row's range holds with equality."""
        env = self.environment(table, point, exact=True)
        options = []
        for text in row.range:
            node = _parse(text)
            if not isinstance(node, ast.Compare):
                continue
            terms = [node.left, *node.comparators]
            for i, op in enumerate(node.ops):
                if not isinstance(op, (ast.LtE, ast.GtE)):
                    continue
                for q_side, b_side in ((terms[i], terms[i + 1]), (terms[i + 1], terms[i])):
                    if isinstance(q_side, ast.Name) and q_side.id[:1] in QUANTITY_KINDS and q_side.id[1:].isdigit():
                        options.append((q_side.id, b_side))
        self.rng.shuffle(options)
        c1 = point["c1"]
        for qname, b_node in options:
            try:
                target = _eval(b_node, env, True)
            except TableError:
                continue
            if not isinstance(target, Fraction):
                if isinstance(target, RootAffine) and target.exact() is not None:
                    target = target.exact()
                else:
                    continue
            kind, n = qname[0], int(qname[1:])
            lin = {"f": abs(c1), "g": -abs(c1), "p": c1, "q": -c1}[kind]
            moved = dict(point, a2=(target - n * lin) / (n * n))
            moved_env = self.environment(table, moved, exact=True)
            if self.admissible(moved_env, table, True) and self.matches(moved_env, row, True):
                return moved
        return None


def evaluate_row(table: CaseTable, row: CaseRow, env: Mapping[str, object]):
    """(value, claimed, bound) of the table's form at the row's substitution."""
    local = dict(env)
    for var, text in row.x.items():
        local[var] = evaluate_expr(text, env, True)
    value = evaluate_expr(table.form, local, True)
    claimed = evaluate_expr(row.claimed, local, True)
    bound = evaluate_expr(table.bound, local, True)
    return value, claimed, bound


def check_row(table: CaseTable, row: CaseRow, env: Mapping[str, object], params: Mapping[str, Fraction]) -> None:
    value, claimed, bound = evaluate_row(table, row, env)
    if value != claimed:
        raise RowFalsified(table.id, row, params, value, claimed, f"value {_show(value)} differs from claimed {_show(claimed)}")
    if not value > 0:
        raise RowFalsified(table.id, row, params, value, claimed, f"value {_show(value)} is not positive")
    above = value >= bound if table.strict else value > bound
    if above:
        raise RowFalsified(table.id, row, params, value, claimed, f"value {_show(value)} reaches the bound {float(bound):.9g}")


def verify_case_table(table: CaseTable, sampler: Optional[CaseSampler] = None, trials: int = 10_000,
                      coverage_samples: Optional[int] = None, raise_on_falsified: bool = False) -> CaseTableReport:
    """Sample exact parameters row by row and check each claimed solution.

    Trials are split evenly over the rows; a share of each row's trials sits exactly on a
    non-strict edge of its range.  A separate uniform sample over the admissible region
    counts points covered by no row (gaps) or by several rows (overlaps).
    """
    sampler = sampler or CaseSampler()
    stats = [RowStats(r.index, r.label()) for r in table.rows]
    falsified: List[RowFalsified] = []
    per_row = max(1, trials // max(1, len(table.rows)))
    excluded = 0
    for row, st in zip(table.rows, stats):
        points = sampler.admissible_points(table, per_row, row)
        n_edge = int(len(points) * sampler.boundary_share)
        for i in range(n_edge):
            moved = sampler.boundary_point(table, row, points[i])
            if moved is not None:
                points[i] = moved
                st.boundary += 1
        for point in points:
            env = sampler.environment(table, point, exact=True)
            if row.exclude and evaluate_expr(row.exclude, env, True):
                excluded += 1
                continue
            st.tested += 1
            try:
                check_row(table, row, env, point)
            except RowFalsified as exc:
                st.falsified += 1
                falsified.append(exc)
                if raise_on_falsified:
                    raise
    report = CaseTableReport(table.id, sampler.seed, trials, stats, falsified, excluded=excluded)
    n_cov = coverage_samples if coverage_samples is not None else min(2000, trials)
    for point in sampler.admissible_points(table, n_cov):
        env = sampler.environment(table, point, exact=True)
        hit = tuple(r.index for r in table.rows if sampler.matches(env, r, True))
        report.coverage_samples += 1
        if not hit:
            report.gaps += 1
            if report.gap_example is None:
                report.gap_example = dict(point)
        elif len(hit) > 1:
            report.overlaps[hit] = report.overlaps.get(hit, 0) + 1
    return report


def verify_all_case_tables(trials: int = 10_000, seed: Optional[int] = None,
                           tables: Optional[Sequence[CaseTable]] = None) -> List[CaseTableReport]:
    tables = list(tables) if tables is not None else bundled_case_tables()
    base = seed_from_env() if seed is None else seed
    return [verify_case_table(t, CaseSampler(base + i), trials) for i, t in enumerate(tables)]
