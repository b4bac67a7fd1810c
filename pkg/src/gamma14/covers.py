"""Interval covers for the one-parameter Macbeath conditions.

A cover is a list of pairs (h_n, k_n) with breakpoints lambda_n.  Entry n claims
that the pair condition holds for every parameter value in [lambda_n, lambda_{n-1}]:

    lemma5:  |h - k^2 t| + 1/2 < B(t)     (or <= for non-strict scenarios)
    lemma6:  |h - k^2 t| < B(t)^3 / 8

where B is a worst-case lower bound for d as a function of the parameter.
Verification is exact: endpoints are decided by sign_at_point and the interior by
adaptive bisection with mean value enclosures.
"""

from __future__ import annotations

import csv
import enum
import functools
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exact import (
    Abs,
    BinOp,
    Const,
    Enclosure,
    Expr,
    MinMax,
    Pow,
    Var,
    as_rational,
    compile_float,
    enclosure_eval_mv,
    fmt,
    parse_expr,
    sign_at_point,
    to_float,
)

BOUNDARY_TOLERANCE = Fraction(1, 10 ** 4)
DEFAULT_MAX_DEPTH = 40


class CoverError(ValueError):
    """Malformed scenario or table."""


class ChainError(CoverError):
    pass


class CoverageStuck(RuntimeError):
    def __init__(self, at: Fraction, message: str = ""):
        self.at = at
        super().__init__(message or f"no admissible pair reaches below {fmt(at)}")


class Condition(enum.Enum):
    LEMMA5 = "lemma5"
    LEMMA6 = "lemma6"


class RemarkKind(enum.Enum):
    NA = "na"
    TBD = "tbd"
    ALT = "alt"
    NONE = ""


@dataclass(frozen=True)
class Remark:
    kind: RemarkKind
    alt: Optional[Tuple[Fraction, int]] = None

    @classmethod
    def parse(cls, text: str) -> "Remark":
        s = (text or "").strip()
        if s.lower() in ("na", "tbd", ""):
            return cls(RemarkKind(s.lower()))
        body = s.strip("()")
        try:
            h, k = body.split(",")
            return cls(RemarkKind.ALT, (Fraction(h.strip()), int(k)))
        except ValueError as exc:
            raise CoverError(f"unreadable remark {text!r}") from exc

    def __str__(self) -> str:
        if self.kind is RemarkKind.ALT:
            return f"({fmt(self.alt[0])},{self.alt[1]})"
        return self.kind.value


@dataclass(frozen=True)
class CoverEntry:
    n: int
    h: Fraction
    k: int
    lam: Fraction
    remark: Remark = Remark(RemarkKind.NONE)

    def __post_init__(self):
        if self.k <= 0:
            raise CoverError(f"entry {self.n}: k must be positive")
        if (2 * self.h).denominator != 1:
            raise CoverError(f"entry {self.n}: h must be a half-integer")

    @property
    def center(self) -> Fraction:
        return self.h / (self.k * self.k)


@functools.lru_cache(maxsize=64)
def _parse_cached(text: str) -> Expr:
    return parse_expr(text)


def _power(expr: Expr, n: int) -> Expr:
    """expr**n with the power pushed through max/min and merged into root exponents.

    Valid for the non-negative bounds used here; it keeps B(t)^3 rational when
    B is a cube root, so exact ties are decided exactly.
    """
    if isinstance(expr, Const):
        return Const(expr.value ** n)
    if isinstance(expr, MinMax):
        return MinMax(expr.op, tuple(_power(a, n) for a in expr.args))
    if isinstance(expr, Pow):
        e = expr.exponent * n
        return expr.base if e == 1 else Pow(expr.base, e)
    if isinstance(expr, BinOp) and expr.op in "*/":
        return BinOp(expr.op, _power(expr.left, n), _power(expr.right, n))
    return Pow(expr, Fraction(n))


@dataclass(frozen=True)
class Scenario:
    name: str
    variable: str
    lo: Fraction
    hi: Fraction
    bound_text: str
    condition: Condition
    strict: bool
    derivation: str = ""
    table: Optional[str] = None
    alternates: Tuple[Tuple[Condition, bool], ...] = ()

    def __post_init__(self):
        if not self.lo < self.hi:
            raise CoverError(f"scenario {self.name}: empty interval")
        free = self.bound.free_vars()
        if free - {self.variable}:
            raise CoverError(f"scenario {self.name}: bound uses {sorted(free)}, expected {self.variable}")

    @property
    def bound(self) -> Expr:
        return _parse_cached(self.bound_text)

    def margin(self, h: Fraction, k: int, condition: Optional[Condition] = None) -> Expr:
        """Expression that must be positive (strict) or non-negative for the pair to work."""
        t = Var(self.variable)
        dist = Abs(BinOp("-", Const(Fraction(h)), BinOp("*", Const(Fraction(k * k)), t)))
        if (condition or self.condition) is Condition.LEMMA5:
            return BinOp("-", BinOp("-", self.bound, dist), Const(Fraction(1, 2)))
        return BinOp("-", BinOp("/", _power(self.bound, 3), Const(Fraction(8))), dist)

    def holds(self, h: Fraction, k: int, t: Fraction, condition: Optional[Condition] = None,
              strict: Optional[bool] = None) -> bool:
        s = sign_at_point(self.margin(h, k, condition), {self.variable: t})
        strict = self.strict if strict is None else strict
        return s > 0 or (s == 0 and not strict)

    @property
    def alternate_conditions(self) -> Tuple[Tuple[Condition, bool], ...]:
        return self.alternates or ((self.condition, self.strict),)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "variable": self.variable,
            "interval": [fmt(self.lo), fmt(self.hi)],
            "bound": self.bound_text,
            "condition": self.condition.value,
            "strictness": "strict" if self.strict else "nonstrict",
            "derivation": self.derivation,
            "alternate_conditions": [[c.value, "strict" if s else "nonstrict"] for c, s in self.alternate_conditions],
        }

    @classmethod
    def from_json(cls, name: str, obj: dict) -> "Scenario":
        try:
            lo, hi = (as_rational(v) for v in obj["interval"])
            strictness = obj.get("strictness", "strict")
            if strictness not in ("strict", "nonstrict"):
                raise CoverError(f"scenario {name}: strictness must be strict or nonstrict")
            alts = tuple((Condition(c), s == "strict") for c, s in obj.get("alternate_conditions", ()))
            return cls(name, obj.get("variable", "t"), lo, hi, obj["bound"], Condition(obj["condition"]),
                       strictness == "strict", obj.get("derivation", ""), obj.get("table"), alts)
        except (KeyError, TypeError, ValueError, SyntaxError) as exc:
            if isinstance(exc, CoverError):
                raise
            raise CoverError(f"scenario {name}: {exc}") from exc


# ------------------------------------------------------------------ file IO


def _data_dir():
    return resources.files("gamma14") / "data" / "covers"


def load_scenarios(path: Optional[str] = None) -> Dict[str, Scenario]:
    text = open(path).read() if path else (_data_dir() / "scenarios.json").read_text()
    raw = json.loads(text)
    return {name: Scenario.from_json(name, obj) for name, obj in raw.items()}


def read_table(source: Union[str, io.TextIOBase]) -> List[CoverEntry]:
    """Read a cover CSV with columns n,h,k,lambda,remark; h and lambda may be decimals or p/q."""
    fh = open(source, newline="") if isinstance(source, str) else source
    try:
        reader = csv.DictReader(fh)
        missing = {"n", "h", "k", "lambda"} - set(reader.fieldnames or ())
        if missing:
            raise CoverError(f"cover table lacks columns {sorted(missing)}")
        out = []
        for row in reader:
            try:
                out.append(CoverEntry(int(row["n"]), as_rational(row["h"]), int(row["k"]),
                                      as_rational(row["lambda"]), Remark.parse(row.get("remark", ""))))
            except (ValueError, ZeroDivisionError) as exc:
                raise CoverError(f"line {reader.line_num}: {exc}") from exc
    finally:
        if isinstance(source, str):
            fh.close()
    if not out:
        raise CoverError("empty cover table")
    return out


def bundled_table(name: str) -> List[CoverEntry]:
    with (_data_dir() / name).open(newline="") as fh:
        return read_table(fh)


def write_table(entries: Sequence[CoverEntry], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "h", "k", "lambda", "remark"])
    for e in entries:
        w.writerow([e.n, fmt(e.h), e.k, fmt(e.lam), str(e.remark)])


# ------------------------------------------------------------------ verification


class Status(enum.Enum):
    CERTIFIED = "Certified"
    COUNTEREXAMPLE = "Counterexample"
    UNDECIDED = "Undecided"


@dataclass
class EntryResult:
    status: Status
    witness: Optional[Fraction] = None  # failing parameter value for a counterexample
    gap: Optional[Fraction] = None  # width left open when undecided
    worst: Optional[Fraction] = None  # rational lower bound on the margin over the subinterval
    pieces: int = 0

    @property
    def boundary(self) -> bool:
        """A failure smaller than the truncation of printed breakpoints."""
        return (self.status is Status.COUNTEREXAMPLE and self.worst is not None
                and self.worst > -BOUNDARY_TOLERANCE)

    def to_json(self) -> dict:
        out = {"status": self.status.value, "pieces": self.pieces}
        if self.witness is not None:
            out["witness"] = fmt(self.witness)
        if self.gap is not None:
            out["gap"] = fmt(self.gap)
        if self.worst is not None:
            out["worst_margin"] = float(self.worst)
        if self.status is Status.COUNTEREXAMPLE:
            out["boundary"] = self.boundary
        return out


def _bits(depth: int) -> int:
    return 64 + 2 * depth


def _ok(enc: Enclosure, strict: bool) -> bool:
    return enc.lo > 0 or (not strict and enc.lo >= 0)


def _bad(enc: Enclosure, strict: bool) -> bool:
    return enc.hi < 0 or (strict and enc.hi <= 0)


def _point_ok(scenario: Scenario, expr: Expr, t: Fraction) -> bool:
    s = sign_at_point(expr, {scenario.variable: t})
    return s > 0 or (s == 0 and not scenario.strict)


def _margin_lower_bound(expr: Expr, lo: Fraction, hi: Fraction, max_depth: int, resolution: Fraction) -> Fraction:
    """Rational lower bound on min of expr over [lo, hi], accurate to about `resolution`."""
    best_upper = None
    stack = [(lo, hi, 0)]
    lower = None
    while stack:
        a, b, depth = stack.pop()
        enc = enclosure_eval_mv(expr, Enclosure(a, b), _bits(depth))
        mid = enclosure_eval_mv(expr, Enclosure.point((a + b) / 2), _bits(depth))
        best_upper = mid.hi if best_upper is None else min(best_upper, mid.hi)
        if enc.lo >= best_upper - resolution or depth >= max_depth or enc.lo >= 0:
            lower = enc.lo if lower is None else min(lower, enc.lo)
            continue
        m = (a + b) / 2
        stack.append((m, b, depth + 1))
        stack.append((a, m, depth + 1))
    return lower


def verify_entry(entry: CoverEntry, upto: Fraction, scenario: Scenario,
                 max_depth: int = DEFAULT_MAX_DEPTH) -> EntryResult:
    """Decide whether the pair condition holds on [entry.lam, upto].

    An inverted range (a printed breakpoint above its predecessor) is checked over
    the swapped interval.
    """
    lo, hi = sorted((entry.lam, as_rational(upto)))
    if lo < scenario.lo or hi > scenario.hi:
        raise CoverError(f"entry {entry.n}: [{fmt(lo)}, {fmt(hi)}] leaves the scenario interval")
    expr = scenario.margin(entry.h, entry.k)
    strict = scenario.strict

    def failure(t: Fraction, pieces: int) -> EntryResult:
        worst = _margin_lower_bound(expr, lo, hi, 30, Fraction(1, 10 ** 7))
        return EntryResult(Status.COUNTEREXAMPLE, witness=t, worst=worst, pieces=pieces)

    for t in (hi, lo):
        if not _point_ok(scenario, expr, t):
            return failure(t, 0)
    if lo == hi:
        return EntryResult(Status.CERTIFIED, pieces=1)

    stack = [(lo, hi, 0)]
    pieces = 0
    open_width = Fraction(0)
    while stack:
        a, b, depth = stack.pop()
        enc = enclosure_eval_mv(expr, Enclosure(a, b), _bits(depth))
        if _ok(enc, strict):
            pieces += 1
            continue
        m = (a + b) / 2
        if _bad(enc, strict) or not _point_ok(scenario, expr, m):
            return failure(m, pieces)
        if depth >= max_depth:
            open_width += b - a
            continue
        stack.append((m, b, depth + 1))
        stack.append((a, m, depth + 1))
    if open_width:
        return EntryResult(Status.UNDECIDED, gap=open_width, pieces=pieces)
    return EntryResult(Status.CERTIFIED, pieces=pieces)


def alternate_certified(scenario: Scenario, entry: CoverEntry) -> bool:
    """The entry's alternate pair removes the exceptional point t = h/k^2.

    The alternate must satisfy one of the scenario's alternate conditions at t
    and must not be exceptional there itself, so its own center has to differ.
    The second-lemma condition needs an integral h.
    """
    if entry.remark.kind is not RemarkKind.ALT:
        return False
    h2, k2 = entry.remark.alt
    t = entry.center
    if h2 / (k2 * k2) == t:
        return False
    for cond, strict in scenario.alternate_conditions:
        if cond is Condition.LEMMA6 and h2.denominator != 1:
            continue
        if scenario.holds(h2, k2, t, cond, strict):
            return True
    return False


def computed_remark(scenario: Scenario, entry: CoverEntry, upto: Fraction) -> RemarkKind:
    """NA when the center is outside the subinterval.

    A center sitting on a breakpoint shared with a neighbouring entry also counts
    as NA, since the neighbour's pair covers that point.
    """
    lo, hi = sorted((entry.lam, upto))
    c = entry.center
    inside = lo < c < hi or (c in (lo, hi) and c in (scenario.lo, scenario.hi))
    if not inside:
        return RemarkKind.NA
    if alternate_certified(scenario, entry):
        return RemarkKind.ALT
    return RemarkKind.TBD


@dataclass
class RowReport:
    entry: CoverEntry
    upto: Fraction
    result: EntryResult
    remark: RemarkKind
    alternate_ok: Optional[bool]

    own_range: Optional[Tuple[Fraction, Fraction]] = None  # certified admissible range, failing rows only
    superseded: bool = False

    @property
    def label(self) -> str:
        if self.result.status is Status.COUNTEREXAMPLE:
            if self.result.boundary:
                return "Boundary"
            return "Superseded" if self.superseded else "Counterexample"
        return self.result.status.value

    def to_json(self) -> dict:
        e = self.entry
        return {
            "n": e.n, "h": fmt(e.h), "k": e.k, "lambda": fmt(e.lam), "upto": fmt(self.upto),
            "label": self.label, "printed_remark": str(e.remark), "computed_remark": self.remark.value,
            "alternate_ok": self.alternate_ok, **self.result.to_json(),
            **({"own_range": [fmt(v) for v in self.own_range]} if self.own_range else {}),
        }


@dataclass
class TableReport:
    scenario: Scenario
    rows: List[RowReport]
    chain_defects: List[int] = field(default_factory=list)
    covers_bottom: bool = True
    union_covers: bool = True

    def count(self, label: str) -> int:
        return sum(1 for r in self.rows if r.label == label)

    @property
    def tbd(self) -> List[int]:
        return [r.entry.n for r in self.rows if r.remark is RemarkKind.TBD]

    @property
    def printed_tbd(self) -> List[int]:
        return [r.entry.n for r in self.rows if r.entry.remark.kind is RemarkKind.TBD]

    @property
    def non_tbd(self) -> List[RowReport]:
        return [r for r in self.rows if r.entry.remark.kind is not RemarkKind.TBD]

    @property
    def certified_fraction(self) -> float:
        pool = self.non_tbd
        return sum(r.label == "Certified" for r in pool) / len(pool) if pool else 1.0

    @property
    def remark_mismatches(self) -> List[int]:
        out = []
        for r in self.rows:
            printed = r.entry.remark.kind
            if printed is RemarkKind.NONE:
                continue
            if (printed is RemarkKind.TBD) != (r.remark is RemarkKind.TBD):
                out.append(r.entry.n)
        return out

    @property
    def falsified(self) -> bool:
        return self.count("Counterexample") > 0

    def summary(self) -> dict:
        return {
            "scenario": self.scenario.name,
            "rows": len(self.rows),
            "certified": self.count("Certified"),
            "boundary": self.count("Boundary"),
            "counterexample": self.count("Counterexample"),
            "undecided": self.count("Undecided"),
            "certified_fraction_non_tbd": round(self.certified_fraction, 6),
            "tbd": self.tbd,
            "printed_tbd": self.printed_tbd,
            "tbd_match": self.tbd == self.printed_tbd,
            "superseded": self.count("Superseded"),
            "chain_defects": self.chain_defects,
            "covers_bottom": self.covers_bottom,
            "union_covers": self.union_covers,
        }

    def to_json(self) -> dict:
        return {**self.summary(), "scenario_detail": self.scenario.to_json(),
                "entries": [r.to_json() for r in self.rows]}


def chain_defects(entries: Sequence[CoverEntry], top: Fraction) -> List[int]:
    """Indices n whose breakpoint is not below the previous one (top for the first)."""
    out = []
    prev = top
    for e in entries:
        if not e.lam < prev:
            out.append(e.n)
        prev = e.lam
    return out


def _verify_row(args) -> RowReport:
    entry, upto, scenario, max_depth = args
    res = verify_entry(entry, upto, scenario, max_depth)
    alt = alternate_certified(scenario, entry) if entry.remark.kind is RemarkKind.ALT else None
    return RowReport(entry, upto, res, computed_remark(scenario, entry, upto), alt)


def verify_table(entries: Sequence[CoverEntry], scenario: Scenario, max_depth: int = DEFAULT_MAX_DEPTH,
                 tolerate_chain_defects: bool = False, jobs: int = 1) -> TableReport:
    """Verify every entry on [lambda_n, lambda_{n-1}], the first one up to the scenario top.

    A breakpoint that does not decrease is a structural error unless
    tolerate_chain_defects is set; then it is listed in the report and the
    entry is checked over the swapped range.
    """
    if not entries:
        raise CoverError("empty cover table")
    ns = [e.n for e in entries]
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise CoverError("entries must be sorted by n without repeats")
    defects = chain_defects(entries, scenario.hi)
    if defects and not tolerate_chain_defects:
        raise ChainError(f"breakpoints do not decrease at n = {defects}")
    uptos = [scenario.hi] + [e.lam for e in entries[:-1]]
    work = [(e, u, scenario, max_depth) for e, u in zip(entries, uptos)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_verify_row, work, chunksize=16))
    else:
        rows = [_verify_row(w) for w in work]
    pieces = []
    for r in rows:
        if r.result.status is Status.CERTIFIED:
            pieces.append(tuple(sorted((r.entry.lam, r.upto))))
        else:
            r.own_range = admissible_range(scenario, r.entry.h, r.entry.k, max_depth)
            if r.own_range:
                pieces.append(r.own_range)
    union = covers_interval(pieces, scenario.lo, scenario.hi)
    if union:
        for r in rows:
            r.superseded = r.result.status is not Status.CERTIFIED
    return TableReport(scenario, rows, defects, min(e.lam for e in entries) <= scenario.lo, union)


def covers_interval(pieces: Iterable[Tuple[Fraction, Fraction]], lo: Fraction, hi: Fraction) -> bool:
    """Whether closed intervals cover [lo, hi]."""
    reach = lo
    for a, b in sorted(pieces):
        if a > reach:
            return False
        reach = max(reach, b)
        if reach >= hi:
            return True
    return reach >= hi


def _float_margin(scenario: Scenario, condition: Optional[Condition] = None):
    bound = compile_float(scenario.bound, scenario.variable)
    cond = condition or scenario.condition

    def margin(t, hs, k2):
        dist = np.abs(hs - k2 * t)
        b = bound(t)
        return b - dist - 0.5 if cond is Condition.LEMMA5 else b ** 3 / 8 - dist

    return margin


def admissible_range(scenario: Scenario, h: Fraction, k: int,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> Optional[Tuple[Fraction, Fraction]]:
    """A certified subinterval of where the pair works, clipped to the scenario.

    Float bisection locates both ends around the center; the ends are rounded
    inward and the result is confirmed with verify_entry.  None if nothing certifies.
    """
    margin = _float_margin(scenario)
    hf, k2 = float(h), float(k * k)
    c = hf / k2
    lo_f, hi_f = to_float(scenario.lo), to_float(scenario.hi)
    c = min(max(c, lo_f), hi_f)
    if margin(c, hf, k2) <= 0:
        return None

    def edge(inside: float, outside: float) -> float:
        if margin(outside, hf, k2) > 0:
            return outside
        for _ in range(80):
            mid = (inside + outside) / 2
            if margin(mid, hf, k2) > 0:
                inside = mid
            else:
                outside = mid
        return inside

    a_f, b_f = edge(c, lo_f), edge(c, hi_f)
    for digits in (12, 10, 8):
        a = max(scenario.lo, _round_up(a_f, digits))
        b = min(scenario.hi, Fraction(math.floor(b_f * 10 ** digits), 10 ** digits))
        if a >= b:
            continue
        probe = CoverEntry(0, Fraction(h), k, a)
        if verify_entry(probe, b, scenario, max_depth).status is Status.CERTIFIED:
            return a, b
    return None


# ------------------------------------------------------------------ generation


def _left_roots(scenario: Scenario, hs: np.ndarray, ks: np.ndarray, floor: float, top: float) -> np.ndarray:
    """Float estimate of where each pair's admissible range starts, going down from `top`.

    Below its center a pair's margin increases with t whenever B does, so the
    left end is found by vectorized bisection on [floor, min(top, center)].
    """
    bound = compile_float(scenario.bound, scenario.variable)
    k2 = ks.astype(float) ** 2

    def margin(t):
        dist = np.abs(hs - k2 * t)
        b = bound(t)
        return b - dist - 0.5 if scenario.condition is Condition.LEMMA5 else b ** 3 / 8 - dist

    lo = np.full(hs.shape, floor)
    hi = np.minimum(np.full(hs.shape, top), hs / k2)
    good_floor = margin(lo) > 0
    for _ in range(70):
        mid = (lo + hi) / 2
        ok = margin(mid) > 0
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    return np.where(good_floor, floor, hi)


def _candidates(scenario: Scenario, top: Fraction, k_max: int):
    """Half-integer h per k whose margin at `top` is positive in floating point."""
    bound = compile_float(scenario.bound, scenario.variable)
    u = to_float(top)
    b = float(bound(u))
    slack = b - 0.5 if scenario.condition is Condition.LEMMA5 else b ** 3 / 8
    if slack <= 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    hs, ks = [], []
    for k in range(1, k_max + 1):
        c = u * k * k
        lo2 = math.ceil(2 * (c - slack))
        hi2 = math.floor(2 * (c + slack))
        for h2 in range(lo2, hi2 + 1):
            hs.append(h2 / 2)
            ks.append(k)
    return np.asarray(hs, dtype=float), np.asarray(ks, dtype=np.int64)


def _round_up(x: float, digits: int) -> Fraction:
    scale = 10 ** digits
    return Fraction(math.ceil(x * scale), scale)


def _find_alternate(scenario: Scenario, t: Fraction, k_max: int,
                    avoid: Tuple[Fraction, int]) -> Optional[Tuple[Fraction, int]]:
    """Smallest-k pair, other than `avoid`, that removes the exceptional point t."""
    ks = np.arange(1, k_max + 1)
    k2 = (ks * ks).astype(float)
    tf = to_float(t)
    for cond, strict in scenario.alternate_conditions:
        margin = _float_margin(scenario, cond)
        step = 1.0 if cond is Condition.LEMMA6 else 0.5
        h = np.round(k2 * tf / step) * step
        near = np.nonzero(margin(tf, h, k2) > -1e-9)[0]
        for i in near:
            k = int(ks[i])
            c = t * k * k
            base = Fraction(round(c / Fraction(step))) * Fraction(step)
            for hh in sorted((base - Fraction(step), base, base + Fraction(step)), key=lambda v: abs(v - c)):
                if (hh, k) == avoid or hh / (k * k) == t:
                    continue
                if scenario.holds(hh, k, t, cond, strict):
                    return hh, k
    return None


def generate_cover(scenario: Scenario, k_max: int = 340, denominator_cap: int = 10 ** 9,
                   max_entries: int = 100000, max_depth: int = DEFAULT_MAX_DEPTH,
                   alternates: bool = True) -> List[CoverEntry]:
    """Greedy cover from the top of the scenario interval downward.

    Each step takes the pair with the lowest reach among k <= k_max (ties: smaller
    k, then h nearer to t k^2), rounds its float reach up to a decimal breakpoint
    with at most log10(denominator_cap) digits, and confirms the entry exactly
    with verify_entry before moving on.
    """
    digits = max(1, int(math.floor(math.log10(denominator_cap))))
    entries: List[CoverEntry] = []
    top = scenario.hi
    floor_f = to_float(scenario.lo)
    while top > scenario.lo:
        if len(entries) >= max_entries:
            raise CoverageStuck(top, f"entry budget {max_entries} exhausted at {fmt(top)}")
        hs, ks = _candidates(scenario, top, k_max)
        if not len(hs):
            raise CoverageStuck(top)
        reach = _left_roots(scenario, hs, ks, floor_f, to_float(top))
        order = np.lexsort((np.abs(hs - ks.astype(float) ** 2 * to_float(top)), ks, reach))
        chosen = None
        for idx in order[:8]:
            h, k = Fraction(hs[idx]).limit_denominator(2), int(ks[idx])
            if reach[idx] <= floor_f:
                lam_tries = [scenario.lo]
            else:
                lam_tries = [_round_up(reach[idx], d) for d in (digits, digits - 2, digits - 4) if d > 0]
            for lam in lam_tries:
                lam = max(lam, scenario.lo)
                if not lam < top:
                    continue
                probe = CoverEntry(len(entries) + 1, h, k, lam)
                if verify_entry(probe, top, scenario, max_depth).status is Status.CERTIFIED:
                    chosen = probe
                    break
            if chosen:
                break
        if chosen is None:
            raise CoverageStuck(top)
        remark = Remark(RemarkKind.NA)
        if chosen.lam <= chosen.center <= top:
            alt = _find_alternate(scenario, chosen.center, k_max, (chosen.h, chosen.k)) if alternates else None
            remark = Remark(RemarkKind.ALT, alt) if alt else Remark(RemarkKind.TBD)
        entries.append(CoverEntry(chosen.n, chosen.h, chosen.k, chosen.lam, remark))
        top = chosen.lam
    return entries
