"""End-to-end solver for 0 < Q(x + c) <= (gamma |D|)^(1/5).

The form is taken to its normal shape and the inequality is peeled by
completing squares in x3, x4, x5:

    Q = -a (x3 + h4 x4 + h5 x5 - a3 x2/2a)^2 + F + a/4
    F = -A (x4 + lam x5 - a4' x2/2A)^2 + G + A/4
    G = -t (x5 - a5'' x2/2t)^2 + H + t/4

so a solution of the innermost inequality lifts outward one variable at a
time by the squeeze lemma.  Routes are tried innermost first; a brute-force
shell search in normal-shape coordinates is the last resort.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .exact import Real, RootAffine, fmt, iroot, lcm_denominators, normalize_half, real_json
from .forms import (
    GAMMA_8,
    GAMMA_8486,
    GAMMA_32_3,
    FormError,
    QForm,
    ShiftedInstance,
    Witness,
    check_witness,
    determinant,
    signature,
)
from .lemmas import (
    HypothesisFails,
    MacbeathProblem,
    MacbeathStatus,
    SearchExhausted,
    Sign,
    default_y_bound,
    jackson_hypothesis,
    jackson_solve,
    macbeath1_check,
    macbeath_scan,
    solve_for_x1,
    squeeze_solve,
)
from .reduction import (
    BirchForm,
    CaseParams,
    Coefficients,
    birch_instance,
    birch_reduce,
    cascade_coefficients,
    case_params,
    witness_to_original,
)

ORACLE_RADIUS = 10
MACBEATH_K_MAX = 48


class NoWitnessInBox(LookupError):
    def __init__(self, message: str, trace: Optional["CascadeTrace"] = None):
        super().__init__(message)
        self.trace = trace


class Branch(enum.Enum):
    C2_NON_INTEGRAL = "C2NonIntegral"
    A_EQ_1 = "AEq1"
    A_HALF = "AHalf"
    MK = "MK"
    EXCEPTIONAL_821 = "Exceptional821"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class CaseLabel:
    branch: Branch
    gamma_used: Fraction
    m: Optional[int] = None
    K: Optional[int] = None
    both_eligible: bool = False
    note: str = ""

    def to_json(self) -> dict:
        out = {"branch": self.branch.value, "gamma_used": fmt(self.gamma_used)}
        if self.branch in (Branch.MK, Branch.EXCEPTIONAL_821):
            out.update(m=self.m, K=self.K)
        if self.both_eligible:
            out["both_eligible"] = True
        if self.note:
            out["note"] = self.note
        return out


def _is_exceptional_821(bf: BirchForm, params: CaseParams, c5: Fraction) -> bool:
    if (params.m, params.K) != (2, 1):
        return False
    if (bf.A, bf.t, bf.lam) != (Fraction(1, 3), Fraction(1, 4), Fraction(1, 2)):
        return False
    if (params.a5pp, normalize_half(c5)) != (0, 0):
        return False
    # d + 6 d^5 <= 2/3
    return params.d <= Fraction(2, 3) - 6 * params.d5


def classify(params: CaseParams, shift: Sequence[Fraction], bf: Optional[BirchForm] = None) -> CaseLabel:
    """Branch of the case tree for a normal-shape instance with shift c."""
    c2 = normalize_half(Fraction(shift[1]))
    a = None if bf is None else bf.a
    if c2 != 0:
        return CaseLabel(Branch.C2_NON_INTEGRAL, GAMMA_8)
    if a is None:
        return CaseLabel(Branch.UNCLASSIFIED, GAMMA_32_3, note="normal shape unavailable")
    if a >= Fraction(1, 2):
        if params.d == a:
            return CaseLabel(Branch.A_EQ_1, GAMMA_8)
        return CaseLabel(Branch.A_HALF, GAMMA_8)
    m, K = params.m, params.K
    both = (params.d + a) == 1
    if _is_exceptional_821(bf, params, shift[4]):
        return CaseLabel(Branch.EXCEPTIONAL_821, GAMMA_8486, m, K, both)
    if (m, K) in ((2, 2), (1, 2), (1, 1)):
        gamma = GAMMA_32_3
    elif m >= 3 or (m == 2 and K >= 1):
        gamma = GAMMA_8
    else:
        gamma = GAMMA_32_3
    note = "" if m >= 1 else "m = 0 outside the treated range"
    return CaseLabel(Branch.MK, gamma, m, K, both, note)


# ------------------------------------------------------------------ trace


@dataclass
class StageRecord:
    stage: str
    lemma: str
    bound: object
    values: Dict[str, str]
    ok: bool = True

    def to_json(self) -> dict:
        return {"stage": self.stage, "lemma": self.lemma, "bound": self.bound, "values": self.values, "ok": self.ok}


@dataclass
class CascadeTrace:
    label: Optional[CaseLabel] = None
    params: Optional[CaseParams] = None
    birch: Optional[BirchForm] = None
    records: List[StageRecord] = field(default_factory=list)
    route: str = ""
    seconds: float = 0.0

    def add(self, *args, **kw) -> None:
        self.records.append(StageRecord(*args, **kw))

    def to_json(self) -> dict:
        return {
            "label": self.label.to_json() if self.label else None,
            "params": self.params.to_json() if self.params else None,
            "normal_shape": self.birch.to_json() if self.birch else None,
            "route": self.route,
            "stages": [r.to_json() for r in self.records],
        }


# ------------------------------------------------------------------ stage algebra


@dataclass
class Stages:
    """Exact stage forms of one normal-shape instance."""

    bf: BirchForm
    co: Coefficients
    params: CaseParams
    c: Tuple[Fraction, ...]

    @property
    def H_const(self) -> Fraction:
        return -(self.bf.a + self.bf.A + self.bf.t) / 4

    def H(self, X1, X2) -> Fraction:
        return (X1 + self.co.a2ppp_squared * X2) * X2 + self.H_const

    def G(self, X1, X2, X5) -> Fraction:
        bf, co = self.bf, self.co
        return (X1 + co.a2pp * X2 + co.a5pp * X5) * X2 - bf.t * X5 * X5 - (bf.a + bf.A) / 4

    def F(self, X1, X2, X4, X5) -> Fraction:
        bf, co = self.bf, self.co
        return ((X1 + co.a2p * X2 + co.a4p * X4 + co.a5p * X5) * X2
                - bf.A * (X4 + bf.lam * X5) ** 2 - bf.t * X5 * X5 - bf.a / 4)

    def Q(self, X) -> Fraction:
        bf = self.bf
        X1, X2, X3, X4, X5 = X
        lin = X1 + bf.a2 * X2 + bf.a3 * X3 + bf.a4 * X4 + bf.a5 * X5
        return lin * X2 - bf.a * (X3 + bf.h4 * X4 + bf.h5 * X5) ** 2 - bf.A * (X4 + bf.lam * X5) ** 2 - bf.t * X5 * X5

    # each lift returns the new coordinate and the outer stage value

    def lift_x5(self, X1, X2, H):
        bf, co, p = self.bf, self.co, self.params
        r = squeeze_solve(-co.a5pp * X2 / (2 * bf.t), (H + bf.t / 4) / bf.t, p.delta_mK / bf.t, self.c[4])
        X5 = r.x
        G = self.G(X1, X2, X5)
        if G != bf.t * r.value:  # pragma: no cover
            raise ArithmeticError("G lift mismatch")
        return X5, G

    def lift_x4(self, X1, X2, X5, G):
        bf, co, p = self.bf, self.co, self.params
        r = squeeze_solve(bf.lam * X5 - co.a4p * X2 / (2 * bf.A), (G + bf.A / 4) / bf.A, p.delta_m / bf.A, self.c[3])
        X4 = r.x
        F = self.F(X1, X2, X4, X5)
        if F != bf.A * r.value:  # pragma: no cover
            raise ArithmeticError("F lift mismatch")
        return X4, F

    def lift_x3(self, X1, X2, X4, X5, F):
        bf, p = self.bf, self.params
        r = squeeze_solve(bf.h4 * X4 + bf.h5 * X5 - bf.a3 * X2 / (2 * bf.a), (F + bf.a / 4) / bf.a, p.d / bf.a, self.c[2])
        X3 = r.x
        Qv = self.Q((X1, X2, X3, X4, X5))
        if Qv != bf.a * r.value:  # pragma: no cover
            raise ArithmeticError("Q lift mismatch")
        return X3, Qv


def _vals(**kw) -> Dict[str, str]:
    return {k: fmt(v) for k, v in kw.items()}


def lift(stages: Stages, stage: str, point: Dict[str, Fraction], value: Fraction, trace: Optional[CascadeTrace] = None):
    """Lift an inner-stage solution to the full five coordinates.

    stage is one of "H", "G", "F"; point holds the inner coordinates.
    Raises HypothesisFails if a squeeze step does not apply.
    """
    X1, X2 = point["X1"], point["X2"]
    order = ["H", "G", "F"]
    i = order.index(stage)
    X5 = point.get("X5")
    X4 = point.get("X4")
    if i == 0:
        X5, value = stages.lift_x5(X1, X2, value)
        if trace:
            trace.add("G", "squeeze (x5)", real_json(stages.params.delta_mK), _vals(X5=X5, G=value))
    if i <= 1:
        X4, value = stages.lift_x4(X1, X2, X5, value)
        if trace:
            trace.add("F", "squeeze (x4)", real_json(stages.params.delta_m), _vals(X4=X4, F=value))
    X3, value = stages.lift_x3(X1, X2, X4, X5, value)
    if trace:
        trace.add("Q", "squeeze (x3)", real_json(stages.params.d), _vals(X3=X3, Q=value))
    return (X1, X2, X3, X4, X5), value


# ------------------------------------------------------------------ routes


def _x2_candidates(c2: Fraction) -> List[Fraction]:
    base = [c2 + j for j in range(-3, 4) if c2 + j != 0]
    return sorted(base, key=lambda v: (abs(v), v < 0))[:4]


def route_progression(stages: Stages, trace: CascadeTrace):
    """H stage: x2 fixed, x1 forced by one ceiling, then three squeezes."""
    p, c = stages.params, stages.c
    target = p.delta_mKL
    for X2 in _x2_candidates(c[1]):
        if not target >= abs(X2):
            continue
        r = solve_for_x1(stages.co.a2ppp_squared * X2, stages.H_const, target, c[0], X2)
        if r is None:
            continue
        # walk a few values of the progression in case a lift prefers a larger one
        X1 = r.x1
        for _ in range(3):
            H = stages.H(X1, X2)
            if not (H > 0 and H <= target):
                break
            local = CascadeTrace()
            local.add("H", "x1 progression", real_json(target), _vals(X1=X1, X2=X2, H=H))
            try:
                X, Qv = lift(stages, "H", {"X1": X1, "X2": X2}, H, local)
            except HypothesisFails:
                X1 += 1 if X2 > 0 else -1
                continue
            yield X, Qv, local
            X1 += 1 if X2 > 0 else -1


def macbeath_pairs(alpha: Fraction, gamma: Real, k_max: int = MACBEATH_K_MAX):
    """(h, k) with 2h integral and |h - k^2 alpha| + 1/2 <= gamma, best margin first per k."""
    for k in range(1, k_max + 1):
        centre = 2 * k * k * alpha
        twice = sorted({math.floor(centre), math.ceil(centre)})
        for h2 in twice:
            h = Fraction(h2, 2)
            if abs(h - k * k * alpha) + Fraction(1, 2) <= gamma:
                yield h, k


def route_macbeath(stages: Stages, trace: CascadeTrace):
    """G stage with x2 = +-1: a Macbeath problem in (x1, x5)."""
    bf, co, p, c = stages.bf, stages.co, stages.params, stages.c
    if c[1] != 0:
        return
    t = bf.t
    for sigma in (1, -1):
        beta = sigma * co.a5pp - 2 * t * c[4]
        nu = sigma * c[0] + co.a2pp + sigma * co.a5pp * c[4] - t * c[4] ** 2 - (bf.a + bf.A) / 4
        status, hk = None, None
        for h, k in macbeath_pairs(t, p.delta_mK):
            prob = MacbeathProblem(t, beta, p.delta_mK, nu, h, k, Sign(sigma), Sign.MINUS)
            s = macbeath1_check(prob)
            if s in (MacbeathStatus.STRICT_OK, MacbeathStatus.NONSTRICT_OK):
                status, hk = s, (h, k)
                if s is MacbeathStatus.STRICT_OK:
                    break
        if hk is None:
            prob = MacbeathProblem(t, beta, p.delta_mK, nu, Fraction(0), 1, Sign(sigma), Sign.MINUS)
            lemma = "search only (no admissible pair)"
        else:
            prob = MacbeathProblem(t, beta, p.delta_mK, nu, hk[0], hk[1], Sign(sigma), Sign.MINUS)
            lemma = f"Macbeath (h,k)=({fmt(hk[0])},{hk[1]}) {status.value}"
        w = macbeath_scan(prob, default_y_bound(prob))
        if w is None:
            continue
        X1, X2, X5 = Fraction(w.x) + c[0], Fraction(sigma), Fraction(w.y) + c[4]
        G = stages.G(X1, X2, X5)
        if G != w.value:  # pragma: no cover
            raise ArithmeticError("G stage mismatch")
        local = CascadeTrace()
        local.add("G", lemma, real_json(p.delta_mK), _vals(X1=X1, X2=X2, X5=X5, G=G))
        try:
            X, Qv = lift(stages, "G", {"X1": X1, "X2": X2, "X5": X5}, G, local)
        except HypothesisFails:
            continue
        yield X, Qv, local


def route_jackson(stages: Stages, trace: CascadeTrace, box: int = 3):
    """F stage: the zero form F + a/4 in (x1, x2, x4, x5) with a/4 < P <= delta_m + a/4."""
    bf, co, p, c = stages.bf, stages.co, stages.params, stages.c
    h = Fraction(1, 2)
    P = QForm([
        [0, h, 0, 0],
        [h, co.a2p, co.a4p / 2, co.a5p / 2],
        [0, co.a4p / 2, -bf.A, -bf.A * bf.lam],
        [0, co.a5p / 2, -bf.A * bf.lam, -(bf.A * bf.lam ** 2 + bf.t)],
    ])
    lo, hi = bf.a / 4, p.delta_m + bf.a / 4
    holds, strict = jackson_hypothesis(P, lo, hi)
    try:
        r = jackson_solve(P, lo, hi, (c[0], c[1], c[3], c[4]), box=box, iso=(1, 0, 0, 0),
                          require_hypothesis=False, escalations=0)
    except SearchExhausted:
        return
    X1, X2, X4, X5 = (Fraction(v) + cc for v, cc in zip(r.x, (c[0], c[1], c[3], c[4])))
    F = stages.F(X1, X2, X4, X5)
    local = CascadeTrace()
    lemma = "window" + ("" if holds else " (search only, hypothesis fails)")
    local.add("F", lemma, real_json(p.delta_m), _vals(X1=X1, X2=X2, X4=X4, X5=X5, F=F))
    try:
        X, Qv = lift(stages, "F", {"X1": X1, "X2": X2, "X4": X4, "X5": X5}, F, local)
    except HypothesisFails:
        return
    yield X, Qv, local


def oracle_shells(inst: ShiftedInstance, d5: Fraction, radius: int):
    """Integer z by sup-norm shells with 0 < Q(z + c) <= d5^(1/5); strict hits first within a shell."""
    gram = inst.form.gram
    L = lcm_denominators(x for row in gram for x in row)
    q = lcm_denominators(inst.shift)
    M = np.array([[int(x * L) for x in row] for row in gram], dtype=np.int64)
    p = np.array([int(ci * q) for ci in inst.shift], dtype=np.int64)
    S = L * q * q  # V = S * Q
    bound5 = S ** 5 * d5
    vmax = iroot(math.floor(bound5), 5)
    for r in range(radius + 1):
        xs, vs, total = _kernels.shell_hits(M, p, q, r, vmax)
        hits = sorted(zip((tuple(int(v) for v in x) for x in xs), (int(v) for v in vs)),
                      key=lambda h: (h[1] ** 5 >= bound5, h[1], tuple(-v for v in h[0])))
        for z, v in hits:
            yield z, Fraction(v, S), Fraction(v) ** 5 < bound5


def _near_zero(c: Fraction) -> List[Fraction]:
    c = normalize_half(c)
    return [c] if c == 0 else [c, c - 1 if c > 0 else c + 1]


def route_direct(stages: Stages, trace: CascadeTrace):
    """Whole form at once: fix X3..X5 near zero and X2 with |X2| < d, then x1 by one ceiling.

    x1 moves Q in steps of |X2|, shorter than the window (0, d), so a hit is
    certain.  This covers normal shapes with a >= d, where the stage bounds
    of the other routes go negative.
    """
    bf, p, c = stages.bf, stages.params, stages.c
    x2s = [v for v in (c[1] + j for j in range(-3, 4)) if v != 0 and abs(v) ** 5 < p.d5]
    x2s.sort(key=lambda v: (abs(v), v < 0))
    for X3 in _near_zero(c[2]):
        for X4 in _near_zero(c[3]):
            for X5 in _near_zero(c[4]):
                phi = (bf.a * (X3 + bf.h4 * X4 + bf.h5 * X5) ** 2 + bf.A * (X4 + bf.lam * X5) ** 2 + bf.t * X5 * X5)
                for X2 in x2s:
                    coef = bf.a2 * X2 + bf.a3 * X3 + bf.a4 * X4 + bf.a5 * X5
                    r = solve_for_x1(coef, -phi, p.d, c[0], X2)
                    if r is None:
                        continue
                    X = (r.x1, X2, X3, X4, X5)
                    local = CascadeTrace()
                    local.add("Q", "x1 progression", real_json(p.d), _vals(**{f"X{i + 1}": X[i] for i in range(5)}, Q=r.value))
                    yield X, r.value, local


def route_oracle(stages: Stages, inst_b: ShiftedInstance, d5: Fraction, radius: int):
    for z, value, strict in oracle_shells(inst_b, d5, radius):
        X = tuple(Fraction(zi) + ci for zi, ci in zip(z, stages.c))
        local = CascadeTrace()
        local.add("Q", "oracle shell search", {"radius": radius}, _vals(**{f"X{i + 1}": X[i] for i in range(5)}, Q=value))
        yield X, value, local
        if strict:
            return


# ------------------------------------------------------------------ driver


def _validate(instance: ShiftedInstance) -> None:
    if instance.n != 5:
        raise FormError("the solver needs a quinary form")
    if determinant(instance.form.gram) == 0:
        raise FormError("form is singular")
    sig = signature(instance.form)
    if sig != (1, 4):
        raise FormError(f"form has signature {sig}, expected (1, 4)")


def solve_instance(instance: ShiftedInstance, auto_gamma: bool = False,
                   oracle_radius: int = ORACLE_RADIUS, routes: Sequence[str] = ("progression", "macbeath", "jackson", "direct", "oracle"),
                   ) -> Tuple[Witness, CascadeTrace]:
    """Witness for 0 < Q(x + c) <= (gamma |D|)^(1/5), verified exactly on the input form.

    Routes run in order; the first strict witness wins.  If only the
    non-strict bound is met anywhere, that witness is returned with
    strict=False.  NoWitnessInBox is raised when every route comes up empty.
    """
    start = time.perf_counter()
    _validate(instance)
    trace = CascadeTrace()
    bf = birch_reduce(instance.form)
    inst_b = birch_instance(instance, bf)
    params = case_params(bf, instance.gamma)
    label = classify(params, inst_b.shift, bf)
    if auto_gamma and label.gamma_used != instance.gamma:
        instance = instance.with_gamma(label.gamma_used)
        inst_b = birch_instance(instance, bf)
        params = case_params(bf, instance.gamma)
    trace.label, trace.params, trace.birch = label, params, bf
    stages = Stages(bf, cascade_coefficients(bf), params, inst_b.shift)

    fallback = None
    runners = {
        "progression": lambda: route_progression(stages, trace),
        "macbeath": lambda: route_macbeath(stages, trace),
        "jackson": lambda: route_jackson(stages, trace),
        "direct": lambda: route_direct(stages, trace),
        "oracle": lambda: route_oracle(stages, inst_b, params.d5, oracle_radius),
    }
    for name in routes:
        for X, Qv, local in runners[name]():
            strict_here = Qv > 0 and Qv ** 5 < params.d5
            if not strict_here and fallback is not None:
                continue
            z = tuple(int(Xi - ci) for Xi, ci in zip(X, stages.c))
            x = witness_to_original(instance, bf, z)
            w = check_witness(instance, x)
            if w.value != bf.scale * Qv:  # pragma: no cover
                raise ArithmeticError("witness value differs from the stage value")
            if w.strict:
                trace.records.extend(local.records)
                trace.route = name
                trace.seconds = time.perf_counter() - start
                return w, trace
            if fallback is None:
                fallback = (w, local, name)
    trace.seconds = time.perf_counter() - start
    if fallback is not None:
        w, local, name = fallback
        trace.records.extend(local.records)
        trace.route = name
        return w, trace
    raise NoWitnessInBox(f"no witness within sup-norm {oracle_radius} of the normal shape", trace)
