"""Exact rationals, n-th root enclosures and a small bound-expression algebra.

Every comparison against an irrational quantity such as (G|D|)^(1/5) is done by
raising the rational side to the n-th power.  Enclosures are only used when an
irrational value has to flow through further arithmetic, e.g. when a bound
function is evaluated over an interval of the cover parameter.
"""

from __future__ import annotations

import ast
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

RationalLike = Union[int, Fraction, str]

MAX_ROOT_INDEX = 6


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, x) -> "Ordering":
        return cls.LESS if x < 0 else cls.GREATER if x > 0 else cls.EQUAL


class DomainError(ValueError):
    """Raised for a fractional power of an interval reaching below zero."""


def as_rational(x: RationalLike) -> Fraction:
    """Parse ints, Fractions, "p/q" strings and decimal literals exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a string literal instead")
    raise TypeError(f"cannot read {x!r} as a rational")


def fmt(x: Fraction) -> str:
    """Canonical "p/q" (or "p") serialization."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def normalize_half(x: Fraction) -> Fraction:
    """Representative of x mod 1 in (-1/2, 1/2]."""
    r = x - math.floor(x)
    return r - 1 if r > Fraction(1, 2) else r


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def iroot(n_int: int, k: int) -> int:
    """floor(n_int ** (1/k)) for n_int >= 0, exact integer arithmetic."""
    if n_int < 0:
        raise ValueError("negative radicand")
    if n_int < 2 or k == 1:
        return n_int
    if k == 2:
        return math.isqrt(n_int)
    x = 1 << ((n_int.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n_int // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n_int:
        x -= 1
    while (x + 1) ** k <= n_int:
        x += 1
    return x


def exact_root(r: Fraction, n: int) -> Optional[Fraction]:
    """r^(1/n) when it is rational, else None."""
    if r < 0:
        return None
    p, q = r.numerator, r.denominator
    a, b = iroot(p, n), iroot(q, n)
    if a ** n == p and b ** n == q:
        return Fraction(a, b)
    return None


def cmp_to_root(v: RationalLike, n: int, radicand: RationalLike) -> Ordering:
    """Exact ordering of v against radicand^(1/n), for v > 0."""
    v, radicand = as_rational(v), as_rational(radicand)
    if v <= 0:
        raise ValueError("cmp_to_root needs v > 0")
    if radicand < 0 or n < 1:
        raise ValueError("radicand must be >= 0 and n >= 1")
    return Ordering.of(v ** n - radicand)


def le_root(v: Fraction, n: int, radicand: Fraction) -> bool:
    """v <= radicand^(1/n) for any rational v."""
    return v <= 0 or v ** n <= radicand


def lt_root(v: Fraction, n: int, radicand: Fraction) -> bool:
    return v <= 0 < radicand or (v > 0 and v ** n < radicand)


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: RationalLike) -> "Enclosure":
        x = as_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= as_rational(x) <= self.hi

    __contains__ = contains

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(max(self.lo, other.lo), min(self.hi, other.hi))

    def __add__(self, o):
        o = _enc(o)
        return Enclosure(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, o):
        o = _enc(o)
        return Enclosure(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, o):
        return _enc(o) - self

    def __mul__(self, o):
        o = _enc(o)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _enc(o)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor enclosure contains zero")
        return self * Enclosure(1 / o.hi, 1 / o.lo)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(Fraction(0), max(-self.lo, self.hi))

    def to_json(self) -> dict:
        return {"lo": fmt(self.lo), "hi": fmt(self.hi)}

    @classmethod
    def from_json(cls, obj: Mapping[str, str]) -> "Enclosure":
        return cls(as_rational(obj["lo"]), as_rational(obj["hi"]))

    def __repr__(self) -> str:
        return f"[{float(self.lo):.10g}, {float(self.hi):.10g}]"


def _enc(x) -> Enclosure:
    return x if isinstance(x, Enclosure) else Enclosure.point(x)


def _bits_for_width(width: Fraction) -> int:
    bits = 0
    while Fraction(1, 1 << bits) > width:
        bits += 1
    return bits


def _root_floor_dyadic(r: Fraction, n: int, bits: int) -> int:
    """floor(r^(1/n) * 2^bits)."""
    return iroot((r.numerator << (n * bits)) // r.denominator, n)


def root_enclosure(radicand: RationalLike, n: int, width: RationalLike) -> Enclosure:
    """Dyadic enclosure of radicand^(1/n) of width <= width, exact when rational.

    Successive requests with halved widths give nested enclosures because the
    endpoints are floor/ceil of the root on a dyadic grid.
    """
    r, w = as_rational(radicand), as_rational(width)
    if r < 0:
        raise DomainError("negative radicand")
    if n < 1:
        raise ValueError("root index must be positive")
    if w <= 0:
        raise ValueError("width must be positive")
    ex = exact_root(r, n)
    if ex is not None:
        return Enclosure(ex, ex)
    bits = _bits_for_width(w)
    s = _root_floor_dyadic(r, n, bits)
    return Enclosure(Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits))


def root_lower(r: Fraction, n: int, bits: int) -> Fraction:
    ex = exact_root(r, n)
    if ex is not None:
        return ex
    return Fraction(_root_floor_dyadic(r, n, bits), 1 << bits)


def root_upper(r: Fraction, n: int, bits: int) -> Fraction:
    ex = exact_root(r, n)
    if ex is not None:
        return ex
    return Fraction(_root_floor_dyadic(r, n, bits) + 1, 1 << bits)


# ---------------------------------------------------------------------------
# bound expressions


class Expr:
    """Node of a univariate bound expression."""

    def free_vars(self) -> set:
        return set()


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def free_vars(self) -> set:
        return {self.name}


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def free_vars(self) -> set:
        return self.left.free_vars() | self.right.free_vars()


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def free_vars(self) -> set:
        return self.arg.free_vars()


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr

    def free_vars(self) -> set:
        return self.arg.free_vars()


@dataclass(frozen=True)
class MinMax(Expr):
    op: str
    args: tuple

    def free_vars(self) -> set:
        out = set()
        for a in self.args:
            out |= a.free_vars()
        return out


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def free_vars(self) -> set:
        return self.base.free_vars()


def _const_value(node: ast.AST) -> Fraction:
    """Fold a constant subtree such as 1/3 or -(2/5) into a Fraction."""
    e = _from_ast(node)
    if e.free_vars():
        raise ValueError("exponent must be a constant")
    return evaluate_point(e, {})


def _from_ast(node: ast.AST) -> Expr:
    if isinstance(node, ast.Expression):
        return _from_ast(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ValueError(f"unsupported constant {node.value!r}")
        return Const(Fraction(_literal_of(node)))
    if isinstance(node, ast.Name):
        return Var(node.id)
    if isinstance(node, ast.UnaryOp):
        inner = _from_ast(node.operand)
        if isinstance(node.op, ast.USub):
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        if isinstance(node.op, ast.UAdd):
            return inner
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exp = _const_value(node.right)
            if exp.denominator > MAX_ROOT_INDEX:
                raise ValueError(f"root index {exp.denominator} exceeds {MAX_ROOT_INDEX}")
            return Pow(_from_ast(node.left), exp)
        ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}
        for kind, sym in ops.items():
            if isinstance(node.op, kind):
                left, right = _from_ast(node.left), _from_ast(node.right)
                if isinstance(left, Const) and isinstance(right, Const):
                    return Const(_apply(sym, left.value, right.value))
                return BinOp(sym, left, right)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        name = node.func.id
        args = tuple(_from_ast(a) for a in node.args)
        if name == "abs" and len(args) == 1:
            return Abs(args[0])
        if name in ("min", "max") and len(args) >= 2:
            return MinMax(name, args)
        if name in ("sqrt", "cbrt") and len(args) == 1:
            return Pow(args[0], Fraction(1, 2 if name == "sqrt" else 3))
    raise ValueError(f"unsupported syntax in bound expression: {ast.dump(node)}")


# ast.Constant carries a float for "0.42692"; re-read the literal text instead of
# trusting binary floating point.
def _patch_constants(tree: ast.AST, source: str) -> None:
    for node in ast.walk(tree):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            node.literal = ast.get_source_segment(source, node)


def _literal_of(node: ast.Constant) -> str:
    text = getattr(node, "literal", None)
    return text if text is not None else repr(node.value)


def parse_expr(text: str) -> Expr:
    """Parse a bound expression; '^' is accepted as a synonym for '**'."""
    source = text.replace("^", "**")
    tree = ast.parse(source, mode="eval")
    _patch_constants(tree, source)
    return _from_ast(tree)


def _apply(op: str, x, y):
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "/":
        return x / y
    raise ValueError(op)


def evaluate_point(expr: Expr, env: Mapping[str, Fraction]) -> Fraction:
    """Exact value at a point; fails if an irrational root would be needed."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return as_rational(env[expr.name])
    if isinstance(expr, Neg):
        return -evaluate_point(expr.arg, env)
    if isinstance(expr, Abs):
        return abs(evaluate_point(expr.arg, env))
    if isinstance(expr, BinOp):
        return _apply(expr.op, evaluate_point(expr.left, env), evaluate_point(expr.right, env))
    if isinstance(expr, MinMax):
        vals = [evaluate_point(a, env) for a in expr.args]
        return min(vals) if expr.op == "min" else max(vals)
    if isinstance(expr, Pow):
        base = evaluate_point(expr.base, env)
        p, q = expr.exponent.numerator, expr.exponent.denominator
        if q == 1:
            return base ** p
        root = exact_root(base, q)
        if root is None:
            raise ValueError("irrational value; use enclosure_eval")
        return root ** p
    raise TypeError(expr)


def _pow_enclosure(x: Enclosure, exponent: Fraction, bits: int) -> Enclosure:
    p, q = exponent.numerator, exponent.denominator
    if q == 1:
        if p >= 0:
            if p % 2 == 0:
                m = abs(x)
                return Enclosure(m.lo ** p, m.hi ** p)
            return Enclosure(x.lo ** p, x.hi ** p)
        if x.lo <= 0 <= x.hi:
            raise ZeroDivisionError("negative power of an interval containing 0")
        return Enclosure(1, 1) / _pow_enclosure(x, Fraction(-p), bits)
    if x.lo < 0:
        raise DomainError("fractional power of a negative quantity")
    if p < 0:
        if x.lo == 0:
            raise ZeroDivisionError("negative power of an interval reaching 0")
        return Enclosure(1, 1) / _pow_enclosure(x, Fraction(-p, q), bits)
    lo = root_lower(x.lo ** p, q, bits)
    hi = root_upper(x.hi ** p, q, bits)
    return Enclosure(lo, hi)


def enclosure_eval(expr: Expr, x: Union[Enclosure, Mapping[str, Enclosure]], bits: int = 64) -> Enclosure:
    """Natural interval extension with outward-rounded roots (2^-bits grid)."""
    env = x if isinstance(x, Mapping) else {_single_var(expr): x}
    return _eval_enc(expr, env, bits)


def _single_var(expr: Expr) -> str:
    names = expr.free_vars()
    if len(names) > 1:
        raise ValueError(f"expression has several variables {sorted(names)}")
    return next(iter(names)) if names else "_"


def _eval_enc(expr: Expr, env, bits: int) -> Enclosure:
    if isinstance(expr, Const):
        return Enclosure.point(expr.value)
    if isinstance(expr, Var):
        return _enc(env[expr.name])
    if isinstance(expr, Neg):
        return -_eval_enc(expr.arg, env, bits)
    if isinstance(expr, Abs):
        return abs(_eval_enc(expr.arg, env, bits))
    if isinstance(expr, BinOp):
        return _apply(expr.op, _eval_enc(expr.left, env, bits), _eval_enc(expr.right, env, bits))
    if isinstance(expr, MinMax):
        vals = [_eval_enc(a, env, bits) for a in expr.args]
        if expr.op == "min":
            return Enclosure(min(v.lo for v in vals), min(v.hi for v in vals))
        return Enclosure(max(v.lo for v in vals), max(v.hi for v in vals))
    if isinstance(expr, Pow):
        return _pow_enclosure(_eval_enc(expr.base, env, bits), expr.exponent, bits)
    raise TypeError(expr)


def _eval_with_slope(expr: Expr, var: str, x: Enclosure, bits: int):
    """Value enclosure over x and an enclosure of the (generalized) derivative.

    The derivative of abs/min/max at a kink is replaced by the hull of the
    one-sided derivatives, which keeps the mean value inclusion valid for
    Lipschitz functions.  Returns (value, None) when no finite slope bound exists.
    """
    zero = Enclosure.point(0)
    if isinstance(expr, Const):
        return Enclosure.point(expr.value), zero
    if isinstance(expr, Var):
        if expr.name != var:
            raise KeyError(expr.name)
        return x, Enclosure.point(1)
    if isinstance(expr, Neg):
        v, s = _eval_with_slope(expr.arg, var, x, bits)
        return -v, (None if s is None else -s)
    if isinstance(expr, Abs):
        v, s = _eval_with_slope(expr.arg, var, x, bits)
        if s is None:
            return abs(v), None
        if v.lo > 0:
            return v, s
        if v.hi < 0:
            return -v, -s
        m = max(abs(s.lo), abs(s.hi))
        return abs(v), Enclosure(-m, m)
    if isinstance(expr, BinOp):
        lv, ls = _eval_with_slope(expr.left, var, x, bits)
        rv, rs = _eval_with_slope(expr.right, var, x, bits)
        val = _apply(expr.op, lv, rv)
        if ls is None or rs is None:
            return val, None
        if expr.op in "+-":
            return val, _apply(expr.op, ls, rs)
        if expr.op == "*":
            return val, ls * rv + lv * rs
        if rv.lo <= 0 <= rv.hi:
            return val, None
        return val, (ls * rv - lv * rs) / (rv * rv)
    if isinstance(expr, MinMax):
        parts = [_eval_with_slope(a, var, x, bits) for a in expr.args]
        vals = [p[0] for p in parts]
        if expr.op == "min":
            val = Enclosure(min(v.lo for v in vals), min(v.hi for v in vals))
            active = [p for p in parts if p[0].lo <= val.hi]
        else:
            val = Enclosure(max(v.lo for v in vals), max(v.hi for v in vals))
            active = [p for p in parts if p[0].hi >= val.lo]
        slopes = [p[1] for p in active]
        if any(s is None for s in slopes):
            return val, None
        out = slopes[0]
        for s in slopes[1:]:
            out = out.hull(s)
        return val, out
    if isinstance(expr, Pow):
        bv, bs = _eval_with_slope(expr.base, var, x, bits)
        val = _pow_enclosure(bv, expr.exponent, bits)
        if bs is None:
            return val, None
        e = expr.exponent
        if e == 0:
            return val, zero
        if e.denominator > 1 and bv.lo <= 0 and e < 1:
            return val, None
        try:
            dpow = _pow_enclosure(bv, e - 1, bits)
        except (ZeroDivisionError, DomainError):
            return val, None
        return val, Enclosure.point(e) * dpow * bs
    raise TypeError(expr)


def enclosure_eval_mv(expr: Expr, x: Enclosure, bits: int = 64, var: Optional[str] = None) -> Enclosure:
    """Intersection of the natural extension and the mean value form.

    The mean value form shrinks quadratically with the interval width, which
    matters when a condition holds with a margin of 1e-8 over a subinterval.
    """
    var = var or _single_var(expr)
    val, slope = _eval_with_slope(expr, var, x, bits)
    if slope is None or x.is_point():
        return val
    m = x.mid
    fm = _eval_enc(expr, {var: Enclosure.point(m)}, bits)
    mv = fm + slope * (x - m)
    lo, hi = max(val.lo, mv.lo), min(val.hi, mv.hi)
    if lo > hi:  # both are valid enclosures, so this cannot happen barring a bug
        raise ArithmeticError("inconsistent enclosures")
    return Enclosure(lo, hi)


def sign_at_point(expr: Expr, env: Mapping[str, Fraction], max_bits: int = 4096) -> int:
    """Exact sign of expr at a rational point, refining roots as needed.

    Values that are rational are detected exactly (every root along the way is
    rational), so a zero is never misreported; irrational values are separated
    from zero after finitely many refinements.
    """
    try:
        exact = evaluate_point(expr, env)
    except ValueError:
        pass
    else:
        return (exact > 0) - (exact < 0)
    point_env = {k: Enclosure.point(v) for k, v in env.items()}
    bits = 64
    while True:
        enc = _eval_enc(expr, point_env, bits)
        if enc.lo > 0:
            return 1
        if enc.hi < 0:
            return -1
        if enc.is_point():
            return 0
        if bits >= max_bits:
            raise ArithmeticError("sign undecided at maximum precision")
        bits *= 2


def to_float(x: Fraction) -> float:
    return x.numerator / x.denominator


def compile_float(expr: Expr, var: str) -> Callable:
    """Float (numpy-vectorizable) version of an expression, for search heuristics only."""
    import numpy as np

    def ev(e: Expr, v):
        if isinstance(e, Const):
            return float(e.value)
        if isinstance(e, Var):
            return v
        if isinstance(e, Neg):
            return -ev(e.arg, v)
        if isinstance(e, Abs):
            return np.abs(ev(e.arg, v))
        if isinstance(e, BinOp):
            return _apply(e.op, ev(e.left, v), ev(e.right, v))
        if isinstance(e, MinMax):
            vals = [ev(a, v) for a in e.args]
            out = vals[0]
            for w in vals[1:]:
                out = np.minimum(out, w) if e.op == "min" else np.maximum(out, w)
            return out
        if isinstance(e, Pow):
            return np.power(ev(e.base, v), float(e.exponent))
        raise TypeError(e)

    return lambda v: ev(expr, v)


def lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


@dataclass(frozen=True)
class RootAffine:
    """The real number p + q * radicand^(1/n), compared exactly by powering.

    Only affine arithmetic over one fixed root is supported, which is all the
    bound chains d + rational need.
    """

    p: Fraction
    q: Fraction
    radicand: Fraction
    n: int = 5

    @classmethod
    def root(cls, radicand: RationalLike, n: int = 5) -> "RootAffine":
        return cls(Fraction(0), Fraction(1), as_rational(radicand), n)

    def _lift(self, o) -> "RootAffine":
        if isinstance(o, RootAffine):
            if (o.radicand, o.n) != (self.radicand, self.n) and o.q and self.q:
                raise DomainError("mixing different roots")
            return o
        return RootAffine(as_rational(o) if not isinstance(o, Fraction) else o, Fraction(0), self.radicand, self.n)

    def __add__(self, o):
        o = self._lift(o)
        return RootAffine(self.p + o.p, self.q + o.q, self.radicand, self.n)

    __radd__ = __add__

    def __neg__(self):
        return RootAffine(-self.p, -self.q, self.radicand, self.n)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, k):
        if isinstance(k, RootAffine):
            if k.q == 0:
                k = k.p
            elif self.q == 0:
                return k * self.p
            else:
                raise DomainError("product of two root terms is not affine")
        k = as_rational(k) if not isinstance(k, Fraction) else k
        return RootAffine(self.p * k, self.q * k, self.radicand, self.n)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, RootAffine):
            if k.q:
                raise DomainError("division by a root term")
            k = k.p
        k = as_rational(k) if not isinstance(k, Fraction) else k
        return RootAffine(self.p / k, self.q / k, self.radicand, self.n)

    def sign(self) -> int:
        """Exact sign of p + q r with r = radicand^(1/n) >= 0."""
        if self.q == 0 or self.radicand == 0:
            return (self.p > 0) - (self.p < 0)
        # p + q r > 0  iff  r > -p/q (q > 0), or r < -p/q (q < 0)
        threshold = -self.p / self.q
        if threshold <= 0:
            s = 1
        else:
            s = Ordering.of(self.radicand - threshold ** self.n).value
        return s if self.q > 0 else -s

    def _cmp(self, o) -> int:
        return (self - self._lift(o)).sign()

    def __lt__(self, o):
        return self._cmp(o) < 0

    def __le__(self, o):
        return self._cmp(o) <= 0

    def __gt__(self, o):
        return self._cmp(o) > 0

    def __ge__(self, o):
        return self._cmp(o) >= 0

    def __eq__(self, o):
        if not isinstance(o, (RootAffine, int, Fraction)):
            return NotImplemented
        return self._cmp(o) == 0

    def __hash__(self):
        return hash((self.p, self.q, self.radicand, self.n))

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        ex = self.exact()
        if ex is not None:
            return math.floor(ex)
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def ceil(self) -> int:
        return -(-self).floor()

    def exact(self) -> Optional[Fraction]:
        if self.q == 0:
            return self.p
        r = exact_root(self.radicand, self.n)
        return None if r is None else self.p + self.q * r

    def enclosure(self, width: RationalLike = Fraction(1, 10 ** 12)) -> Enclosure:
        w = as_rational(width)
        if self.q == 0:
            return Enclosure.point(self.p)
        r = root_enclosure(self.radicand, self.n, w / abs(self.q))
        return r * self.q + self.p

    def __float__(self):
        return to_float(self.p) + to_float(self.q) * to_float(self.radicand) ** (1 / self.n)

    def to_json(self) -> dict:
        enc = self.enclosure()
        return {"offset": fmt(self.p), "root_coeff": fmt(self.q), "radicand": fmt(self.radicand),
                "index": self.n, "decimal": f"{float(self):.12g}", "enclosure": enc.to_json()}

    def __repr__(self):
        return f"{fmt(self.p)} + {fmt(self.q)}*({fmt(self.radicand)})^(1/{self.n})"


Real = Union[Fraction, RootAffine]


def floor_real(x) -> int:
    return x.floor() if isinstance(x, RootAffine) else math.floor(x)


def ceil_real(x) -> int:
    return x.ceil() if isinstance(x, RootAffine) else math.ceil(x)


def real_json(x) -> object:
    return x.to_json() if isinstance(x, RootAffine) else {"value": fmt(x), "decimal": f"{float(x):.12g}"}
