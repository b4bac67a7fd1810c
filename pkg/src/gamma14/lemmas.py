"""Constructive solubility engines.

Each engine checks its hypothesis exactly, then searches for a witness and
re-verifies it by exact evaluation.  The hypotheses only decide whether a
search is expected to succeed; the returned witness never relies on them.

Bounds may be rationals or RootAffine numbers of the form p + q d.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .exact import (
    Enclosure,
    Real,
    RootAffine,
    as_rational,
    ceil_real,
    floor_real,
    fmt,
    normalize_half,
    root_enclosure,
)
from .forms import QForm, determinant, evaluate, inverse, matmul, matvec, to_matrix, transpose
from .reduction import complete_to_basis, find_isotropic

ESCALATIONS = 4


class HypothesisFails(ValueError):
    pass


class SearchExhausted(LookupError):
    pass


class Sign(enum.IntEnum):
    PLUS = 1
    MINUS = -1


def _q(x) -> Real:
    if isinstance(x, (Fraction, RootAffine)):
        return x
    return as_rational(x)


def least_cover_index(gamma: Real) -> int:
    """m >= 0 with m < gamma <= m + 1 (gamma > 0)."""
    if not gamma > 0:
        raise HypothesisFails("gamma must be positive")
    return ceil_real(gamma) - 1


# ------------------------------------------------------------------ squeeze


@dataclass(frozen=True)
class SqueezeResult:
    x: Fraction
    value: Fraction
    strict: bool


def squeeze_hypothesis(beta: Real, gamma: Real) -> Tuple[bool, bool]:
    """(holds, strict) for 1/4 < beta <= gamma + m^2/4 with m = floor(gamma).

    For non-integral gamma this is the usual m < gamma <= m + 1.  At integral
    gamma the larger m is still enough: the two windows +-[m/2, sqrt(m + m^2/4))
    cover every residue class mod 1.  For gamma <= 1, m = 0 and the window
    (-sqrt(beta), sqrt(beta)) has length > 1.
    """
    if not gamma > 0:
        raise HypothesisFails("gamma must be positive")
    m = floor_real(gamma)
    top = gamma + Fraction(m * m, 4)
    holds = beta > Fraction(1, 4) and beta <= top
    return holds, holds and beta < top


def squeeze_candidates(alpha: Fraction, beta: Real, gamma: Real, x0: Fraction) -> List[SqueezeResult]:
    """All x = x0 mod 1 with 0 < beta - (x + alpha)^2 <= gamma, nearest to -alpha first."""
    if not beta > 0:
        return []
    # s = x + alpha ranges over (x0 + alpha) + Z with s^2 < beta
    base = normalize_half(x0 + alpha)
    reach = math.isqrt(max(0, ceil_real(beta))) + 2
    out = []
    for j in sorted(range(-reach, reach + 1), key=lambda j: (abs(base + j), base + j < 0)):
        s = base + j
        s2 = s * s
        if not beta > s2:
            continue
        value = beta - s2
        if not value <= gamma:
            continue
        out.append(SqueezeResult(s - alpha, value, value < gamma))
    return out


def squeeze_solve(alpha, beta, gamma, x0) -> SqueezeResult:
    """x = x0 (mod 1) with 0 < -(x + alpha)^2 + beta <= gamma.

    Raises HypothesisFails when beta is outside (1/4, gamma + m^2/4].  A strict
    solution is preferred whenever one exists.
    """
    alpha, beta, gamma, x0 = _q(alpha), _q(beta), _q(gamma), _q(x0)
    holds, _ = squeeze_hypothesis(beta, gamma)
    if not holds:
        raise HypothesisFails(f"beta={_show(beta)} outside (1/4, gamma + m^2/4]")
    cands = squeeze_candidates(alpha, beta, gamma, x0)
    if not cands:  # pragma: no cover - the hypothesis guarantees a candidate
        raise SearchExhausted("no squeeze candidate despite the hypothesis")
    strict = [c for c in cands if c.strict]
    return strict[0] if strict else cands[0]


def _show(x) -> str:
    return repr(x) if isinstance(x, RootAffine) else fmt(x)


# ------------------------------------------------------------------ window of length 2 |D|^(1/n)


def dominates_root(x: Real, n: int, radicand: Fraction, max_bits: int = 2048) -> Optional[int]:
    """Sign of x - radicand^(1/n), exact when decidable, None if undecided."""
    if isinstance(x, Fraction) or (isinstance(x, RootAffine) and x.q == 0):
        v = x if isinstance(x, Fraction) else x.p
        if v <= 0:
            return -1 if radicand > 0 else (0 if v == 0 else -1)
        diff = v ** n - radicand
        return (diff > 0) - (diff < 0)
    if isinstance(x, RootAffine) and x.n == n and x.radicand == radicand and x.p == 0:
        diff = x.q - 1
        return (diff > 0) - (diff < 0)
    width = Fraction(1, 2 ** 40)
    while width > Fraction(1, 2 ** max_bits):
        xe = x.enclosure(width)
        re = root_enclosure(radicand, n, width)
        if xe.lo > re.hi:
            return 1
        if xe.hi < re.lo:
            return -1
        width /= 2 ** 16
    return None


@dataclass(frozen=True)
class JacksonResult:
    x: Tuple[int, ...]
    value: Fraction
    strict: bool


def jackson_hypothesis(form: QForm, alpha: Real, beta: Real) -> Tuple[bool, bool]:
    """(holds, strict) for beta - alpha >= 2 |D|^(1/n)."""
    s = dominates_root((beta - alpha) / 2, form.n, abs(determinant(form.gram)))
    if s is None:
        return False, False
    return s >= 0, s > 0


def _axis(r: int) -> List[int]:
    """0, 1, -1, 2, -2, ..., r, -r."""
    return sorted(range(-r, r + 1), key=lambda v: (abs(v), v < 0))


def _shell(n: int, r: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        if r == 0:
            yield ()
        return
    for head in _axis(r):
        if abs(head) == r:
            for tail in _box(n - 1, r):
                yield (head,) + tail
        else:
            for tail in _shell(n - 1, r):
                yield (head,) + tail


def _box(n: int, r: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for head in _axis(r):
        for tail in _box(n - 1, r):
            yield (head,) + tail


def shells(n: int, radius: int) -> Iterator[Tuple[int, ...]]:
    """Integer vectors of sup-norm 0, 1, ..., radius; within a shell, small and positive entries first."""
    for r in range(radius + 1):
        yield from _shell(n, r)


def _first_above(lower: Real, offset: Fraction) -> int:
    """Least integer y with y + offset > lower."""
    return floor_real(lower - offset) + 1


def _last_below(upper: Real, offset: Fraction) -> int:
    """Greatest integer y with y + offset < upper."""
    return ceil_real(upper - offset) - 1


def jackson_solve(form: QForm, alpha, beta, shift: Sequence, box: int = 6,
                  iso: Optional[Sequence[int]] = None, require_hypothesis: bool = True,
                  escalations: int = ESCALATIONS) -> JacksonResult:
    """Integer x with alpha < Q(x + c) <= beta for an isotropic form.

    Along the isotropic direction v the form is affine, so with the other
    coordinates fixed the v-coordinate is forced by one ceiling.  The remaining
    coordinates are scanned by sup-norm shells; the box doubles up to
    `escalations` times.
    """
    alpha, beta = _q(alpha), _q(beta)
    shift = [_q(c) for c in shift]
    n = form.n
    if require_hypothesis:
        holds, _ = jackson_hypothesis(form, alpha, beta)
        if not holds:
            raise HypothesisFails("beta - alpha < 2 |D|^(1/n)")
    if iso is None:
        iso = find_isotropic(form)
    U = complete_to_basis(iso)
    G = matmul(matmul(transpose(U), form.gram), U)
    if G[0][0] != 0:
        raise HypothesisFails("supplied vector is not isotropic")
    Ui = inverse(U)
    c = matvec(Ui, shift)
    rest_form = [[G[i][j] for j in range(1, n)] for i in range(1, n)]
    fallback = None
    radius = box
    seen = -1
    for _ in range(escalations + 1):
        for r in range(seen + 1, radius + 1):
            for y in _shell(n - 1, r):
                w = [Fraction(yi) + ci for yi, ci in zip(y, c[1:])]
                slope = 2 * sum((G[0][j + 1] * w[j] for j in range(n - 1)), Fraction(0))
                if slope == 0:
                    continue
                const = sum((rest_form[i][j] * w[i] * w[j] for i in range(n - 1) for j in range(n - 1)), Fraction(0))
                # alpha < slope * w0 + const <= beta
                if slope > 0:
                    y0 = _first_above((alpha - const) / slope, c[0])
                else:
                    y0 = _last_below((alpha - const) / slope, c[0])
                value = slope * (y0 + c[0]) + const
                if not (value > alpha and value <= beta):
                    continue
                x = tuple(int(v) for v in matvec(U, (y0,) + tuple(y)))
                check = evaluate(form, [xi + ci for xi, ci in zip(x, shift)])
                if check != value:  # pragma: no cover
                    raise ArithmeticError("jackson witness failed re-evaluation")
                if value < beta:
                    return JacksonResult(x, value, True)
                if fallback is None:
                    fallback = JacksonResult(x, value, False)
        seen = radius
        if fallback is not None:
            return fallback
        radius *= 2
    raise SearchExhausted(f"no point with alpha < Q <= beta within sup-norm {seen}")


# ------------------------------------------------------------------ binary Macbeath step


class MacbeathStatus(enum.Enum):
    STRICT_OK = "StrictOK"
    NONSTRICT_OK = "NonStrictOK"
    EXCEPTIONAL_PAIR = "ExceptionalPair"
    HYPOTHESIS_FAILS = "HypothesisFails"


def rational_gcd(*xs: Fraction) -> Fraction:
    """Positive generator of the additive group spanned by the rationals xs."""
    L = 1
    for x in xs:
        L = math.lcm(L, x.denominator)
    g = 0
    for x in xs:
        g = math.gcd(g, int(x * L))
    return Fraction(g, L)


def in_lattice(value: Fraction, *generators: Fraction) -> bool:
    """value lies in the group generated by the given rationals."""
    g = rational_gcd(*generators)
    if g == 0:
        return value == 0
    return (value / g).denominator == 1


@dataclass(frozen=True)
class MacbeathProblem:
    alpha: Fraction
    beta: Fraction
    gamma: Real
    nu: Fraction
    h: Fraction
    k: int
    sx: Sign = Sign.PLUS
    sa: Sign = Sign.PLUS

    def value(self, x: int, y: int) -> Fraction:
        return self.sx * x + self.beta * y + self.sa * self.alpha * y * y + self.nu


def macbeath1_margin(alpha: Fraction, gamma: Real, h: Fraction, k: int) -> Real:
    """gamma - |h - k^2 alpha| - 1/2; nonnegative iff the hypothesis holds."""
    return gamma - abs(h - k * k * alpha) - Fraction(1, 2)


def is_exceptional(alpha: Fraction, beta: Fraction, h: Fraction, k: int) -> bool:
    """alpha = h/k^2 and beta = h/k modulo the group generated by 1/k and 2 alpha."""
    return alpha == h / (k * k) and in_lattice(beta - h / k, Fraction(1, k), 2 * alpha)


def macbeath1_check(p: MacbeathProblem) -> MacbeathStatus:
    if (2 * p.h).denominator != 1 or p.k < 1:
        raise ValueError("need 2h integral and k >= 1")
    if p.alpha <= 0 or not p.gamma > 0:
        return MacbeathStatus.HYPOTHESIS_FAILS
    margin = macbeath1_margin(p.alpha, p.gamma, p.h, p.k)
    if margin < 0:
        return MacbeathStatus.HYPOTHESIS_FAILS
    if is_exceptional(p.alpha, p.beta, p.h, p.k):
        return MacbeathStatus.EXCEPTIONAL_PAIR
    return MacbeathStatus.STRICT_OK if margin > 0 else MacbeathStatus.NONSTRICT_OK


@dataclass(frozen=True)
class MacbeathWitness:
    x: int
    y: int
    value: Fraction
    strict: bool


def default_y_bound(p: MacbeathProblem) -> int:
    return math.ceil(4 * p.k * (float(p.gamma) + abs(float(p.nu)) + 1))


def macbeath_scan(p: MacbeathProblem, y_bound: int) -> Optional[MacbeathWitness]:
    """First witness with |y| increasing, y before -y; x gives the least positive value for that y.

    A strict witness is returned if any y in range yields one.
    """
    fallback = None
    for ay in range(y_bound + 1):
        for y in ((0,) if ay == 0 else (ay, -ay)):
            w = p.beta * y + p.sa * p.alpha * y * y + p.nu
            u = math.floor(-w) + 1  # least integer with u + w > 0
            value = u + w
            if not value <= p.gamma:
                continue
            x = int(p.sx) * u
            if p.value(x, y) != value:  # pragma: no cover
                raise ArithmeticError("macbeath witness failed re-evaluation")
            if value < p.gamma:
                return MacbeathWitness(x, y, value, True)
            if fallback is None:
                fallback = MacbeathWitness(x, y, value, False)
    return fallback


def macbeath1_solve(p: MacbeathProblem, y_bound: Optional[int] = None) -> MacbeathWitness:
    """Integers x, y with 0 < sx x + beta y + sa alpha y^2 + nu <= gamma."""
    status = macbeath1_check(p)
    if status in (MacbeathStatus.HYPOTHESIS_FAILS, MacbeathStatus.EXCEPTIONAL_PAIR):
        raise HypothesisFails(status.value)
    bound = y_bound or default_y_bound(p)
    for _ in range(ESCALATIONS + 1):
        w = macbeath_scan(p, bound)
        if w is not None and (w.strict or status is MacbeathStatus.NONSTRICT_OK):
            return w
        bound *= 2
    if w is not None:
        return w
    raise SearchExhausted(f"no Macbeath witness with |y| <= {bound // 2}")


# ------------------------------------------------------------------ second Macbeath step


class Macbeath2Status(enum.Enum):
    OK = "OK"
    EXCEPTIONAL_RATIONAL = "ExceptionalRational"
    HYPOTHESIS_FAILS = "HypothesisFails"


def cube_over_8_at_least(e: Fraction, d: Real) -> bool:
    """e <= (d/2)^3 for e >= 0, exact for rational d or d = q r^(1/n)."""
    if isinstance(d, RootAffine) and d.p == 0:
        if d.q <= 0:
            return e <= 0
        # e <= q^3 R^(3/n) / 8  iff  (8e/q^3)^n <= R^3
        return (8 * e / d.q ** 3) ** d.n <= d.radicand ** 3
    if isinstance(d, RootAffine):
        dd = d.exact()
        if dd is None:
            enc = d.enclosure(Fraction(1, 2 ** 200))
            if 8 * e <= enc.lo ** 3:
                return True
            if 8 * e > enc.hi ** 3:
                return False
            raise ArithmeticError("second Macbeath margin undecided")
        d = dd
    return 8 * e <= d ** 3


def denominator_at_most_2_over_d(beta: Fraction, d: Real) -> bool:
    return beta.denominator * d <= 2


def macbeath2_check(t, beta, d, h: int, k: int) -> Macbeath2Status:
    t, beta, d = _q(t), _q(beta), _q(d)
    if k < 1 or Fraction(h).denominator != 1:
        raise ValueError("need integers h and k >= 1")
    if t <= 0 or not d > 0:
        return Macbeath2Status.HYPOTHESIS_FAILS
    if not cube_over_8_at_least(abs(h - k * k * t), d):
        return Macbeath2Status.HYPOTHESIS_FAILS
    if t == Fraction(h, k * k) and denominator_at_most_2_over_d(beta, d):
        return Macbeath2Status.EXCEPTIONAL_RATIONAL
    return Macbeath2Status.OK


# ------------------------------------------------------------------ x1 progression


@dataclass(frozen=True)
class TrivialResult:
    x1: Fraction
    x2: Fraction
    value: Fraction
    strict: bool


def solve_for_x1(coef: Fraction, beta: Fraction, delta: Real, c1: Fraction, x2: Fraction) -> Optional[TrivialResult]:
    """x1 = c1 mod 1 with 0 < (x1 + coef) x2 + beta <= delta for a fixed x2 != 0.

    The value chosen is the least positive one.
    """
    if x2 > 0:
        x1 = c1 + _first_above(-beta / x2 - coef, c1)
    else:
        x1 = c1 + _last_below(-beta / x2 - coef, c1)
    value = (x1 + coef) * x2 + beta
    if value > 0 and value <= delta:
        return TrivialResult(x1, x2, value, value < delta)
    return None


def trivial_hypothesis(delta: Real, c2: Fraction) -> Tuple[bool, bool]:
    need = Fraction(1, 2) if c2.denominator != 1 else Fraction(1)
    return delta >= need, delta > need


def trivial_solve(alpha, nu, beta, delta, c1, c2) -> TrivialResult:
    """(x1, x2) = (c1, c2) mod 1 with 0 < (x1 + alpha x2 + nu) x2 + beta <= delta."""
    alpha, nu, beta, delta = _q(alpha), _q(nu), _q(beta), _q(delta)
    c1, c2 = normalize_half(_q(c1)), normalize_half(_q(c2))
    holds, _ = trivial_hypothesis(delta, c2)
    if not holds:
        raise HypothesisFails("delta below the progression threshold")
    candidates = [c2] if c2 != 0 else [Fraction(1), Fraction(-1)]
    if c2 != 0:
        candidates.append(c2 - 1 if c2 > 0 else c2 + 1)
    fallback = None
    for x2 in candidates:
        r = solve_for_x1(alpha * x2 + nu, beta, delta, c1, x2)
        if r is None:
            continue
        if r.strict:
            return r
        fallback = fallback or r
    if fallback is None:  # pragma: no cover - the hypothesis guarantees a solution
        raise SearchExhausted("no progression solution")
    return fallback


# ------------------------------------------------------------------ r / 2s splitting


def split_r_over_2s(value: Fraction) -> Tuple[int, int]:
    """(r, s) coprime with value = r / (2 s)."""
    if value <= 0:
        raise ValueError("value must be positive")
    P, Q = value.numerator, value.denominator
    if Q % 2 == 0:
        return P, Q // 2
    return 2 * P, Q


def residue_candidates(t_or_A, h, k: int, variant: str = "general") -> List[Tuple[Fraction, Fraction]]:
    """Candidate (b, c) pairs left after the parity rule, with c reduced to [0, 1/2]."""
    value = _q(t_or_A)
    h = _q(h)
    r, s = split_r_over_2s(value)
    if s % k:
        raise ValueError(f"k={k} does not divide s={s}")
    shk = s * h / k
    if (2 * shk).denominator != 1:
        raise ValueError("s h / k must be an integer or half an integer")
    integral = shk.denominator == 1

    def reps(start: Fraction, step: Fraction) -> List[Fraction]:
        out = set()
        c = start
        for _ in range(4 * r + 4):
            cc = abs(normalize_half(c))
            out.add(cc)
            c += step
        return sorted(out)

    whole = reps(Fraction(0), Fraction(1, r))
    half = reps(Fraction(1, 2 * r), Fraction(1, r))
    b1 = Fraction(1, 2 * s)
    out = [(Fraction(0), c) for c in (whole if integral else half)]
    if variant == "general":
        out += [(b1, c) for c in (half if integral else whole)]
    elif variant == "g_with_x2_pm1":
        seq = reps(Fraction(1, 2 * r), Fraction(2, r)) if integral else reps(Fraction(1, r), Fraction(2, r))
        out += [(b1, c) for c in seq]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return out


def residue_condition_holds(b: Fraction, c: Fraction, value: Fraction, h: Fraction, k: int) -> bool:
    """+-b - 2 value c = h/k modulo the group generated by 1/k and 2 value."""
    return any(in_lattice(sb - 2 * value * c - h / k, Fraction(1, k), 2 * value) for sb in (b, -b))


# ------------------------------------------------------------------ G* rewrite


@dataclass(frozen=True)
class GStarData:
    C: Fraction
    a2star: Fraction
    a4star: Fraction
    coefficient: Fraction
    M: int
    delta_star: Real


def gstar_transform(A, lam, t, a2p, a4p, a5p, delta_m) -> GStarData:
    """Complete the square in x5 first: F = -C(x5 + ...)^2 + (x1 + a2* x2 + a4* x4) x2 - (At/C) x4^2 - a/4."""
    A, lam, t, a2p, a4p, a5p, delta_m = (_q(v) for v in (A, lam, t, a2p, a4p, a5p, delta_m))
    C = A * lam * lam + t
    if C <= 0:
        raise ValueError("C must be positive")
    M = least_cover_index(delta_m / C)
    return GStarData(
        C=C,
        a2star=normalize_half(a2p + a5p * a5p / (4 * C)),
        a4star=normalize_half(a4p - lam * A * a5p / C),
        coefficient=A * t / C,
        M=M,
        delta_star=delta_m + Fraction(M * M - 1) * C / 4,
    )
