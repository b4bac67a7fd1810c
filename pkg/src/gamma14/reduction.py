"""Normal shape of an isotropic quinary form and the parameters read off it.

A type (1,4) form with an isotropic vector is brought, by an integral unimodular
change of variable z = T x and a positive rational scale g, to

    Q(x) = g * [ (z1 + a2 z2 + a3 z3 + a4 z4 + a5 z5) z2 - phi(z3, z4, z5) ]

with phi positive definite, phi(1,0,0) its minimum a, and

    phi = a (z3 + h4 z4 + h5 z5)^2 + A (z4 + lam z5)^2 + t z5^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .exact import Enclosure, RootAffine, fmt, lcm_denominators, normalize_half
from .forms import (
    GAMMA_8,
    GAMMA_32_3,
    FormError,
    Matrix,
    QForm,
    ShiftedInstance,
    determinant,
    evaluate,
    identity,
    inverse,
    matmul,
    matvec,
    signature,
    to_matrix,
    transpose,
)

DEFAULT_ISO_RADIUS = 25


class NotFoundWithinRadius(LookupError):
    pass


class ReductionError(FormError):
    pass


# ------------------------------------------------------------------ helpers


def integer_scaled(form: QForm) -> Tuple[np.ndarray, int]:
    """(M, L) with M = L * gram integral."""
    L = lcm_denominators(x for row in form.gram for x in row)
    M = np.array([[int(x * L) for x in row] for row in form.gram], dtype=object)
    return M, L


def _canonical_key(v: Sequence[int]):
    # smallest sup-norm, then L1, then lexicographically largest
    return (max(abs(x) for x in v), sum(abs(x) for x in v), tuple(-x for x in v))


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g


def complete_to_basis(v: Sequence[int]) -> Matrix:
    """Unimodular integer matrix whose first column is the primitive vector v."""
    v = [int(x) for x in v]
    n = len(v)
    if content(v) != 1:
        raise ReductionError(f"vector {v} is not primitive")
    # row operations A with A v = e1; then A^-1 has first column v
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    w = list(v)
    while sum(1 for x in w if x) > 1:
        i = min((k for k in range(n) if w[k]), key=lambda k: (abs(w[k]), k))
        for j in range(n):
            if j != i and w[j]:
                q = w[j] // w[i]
                w[j] -= q * w[i]
                A[j] = [a - q * b for a, b in zip(A[j], A[i])]
    i = next(k for k in range(n) if w[k])
    if i != 0:
        A[0], A[i] = A[i], A[0]
        w[0], w[i] = w[i], w[0]
    if w[0] < 0:
        A[0] = [-a for a in A[0]]
    inv = inverse(to_matrix(A))
    if any(x.denominator != 1 for row in inv for x in row):  # pragma: no cover
        raise ReductionError("internal error: basis completion not integral")
    if [inv[r][0] for r in range(n)] != [Fraction(x) for x in v]:  # pragma: no cover
        raise ReductionError("internal error: basis completion lost the vector")
    return inv


def _congruence(G: Matrix, P: Matrix) -> Matrix:
    return matmul(matmul(transpose(P), G), P)


def _elementary(n: int, i: int, j: int, k: int) -> Matrix:
    """I + k E_ij."""
    return tuple(tuple(Fraction(int(r == c) + (k if (r, c) == (i, j) else 0)) for c in range(n)) for r in range(n))


def _block(n: int, start: int, sub: Matrix) -> Matrix:
    rows = [list(r) for r in identity(n)]
    for i, row in enumerate(sub):
        for j, x in enumerate(row):
            rows[start + i][start + j] = Fraction(x)
    return to_matrix(rows)


def _nearest_down(x: Fraction) -> int:
    """Integer n with x - n in (-1/2, 1/2]."""
    return int(x - normalize_half(x))


# ------------------------------------------------------------------ isotropic vectors


def find_isotropic(form: QForm, search_radius: int = DEFAULT_ISO_RADIUS) -> Tuple[int, ...]:
    """Primitive integer v with Q(v) = 0, searched shell by shell in sup-norm."""
    M, _ = integer_scaled(form)
    M64 = M.astype(np.int64)
    for r in range(1, search_radius + 1):
        found, total = _kernels.zero_shell(M64, r)
        cands = [tuple(int(x) for x in row) for row in found if content(row) == 1]
        if cands:
            return min(cands, key=_canonical_key)
    raise NotFoundWithinRadius(f"no isotropic vector with sup-norm <= {search_radius}")


# ------------------------------------------------------------------ ternary minimum


def _ldl(gram: Matrix) -> Tuple[List[Fraction], List[List[Fraction]]]:
    """phi(x) = sum_i D_i (x_i + sum_{j>i} mu_ij x_j)^2, exact."""
    n = len(gram)
    a = [list(r) for r in gram]
    D = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d = a[i][i]
        if d <= 0:
            raise ReductionError("form is not positive definite")
        D.append(d)
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] -= a[r][i] * a[i][c] / d
    return D, mu


def _int_window(center: Fraction, radius_sq: Fraction) -> range:
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    s = math.sqrt(float(radius_sq))
    lo = math.floor(float(center) - s) - 1
    hi = math.ceil(float(center) + s) + 1
    xs = [x for x in range(lo, hi + 1) if (x - center) ** 2 <= radius_sq]
    return range(xs[0], xs[-1] + 1) if xs else range(0)


def short_vectors(gram: Matrix, bound: Fraction) -> List[Tuple[Tuple[int, ...], Fraction]]:
    """All nonzero integer x with phi(x) <= bound, by exact Fincke-Pohst enumeration."""
    D, mu = _ldl(gram)
    n = len(D)
    out = []
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        centre = -sum((mu[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        for xi in _int_window(centre, remaining / D[i]):
            x[i] = xi
            used = D[i] * (xi - centre) ** 2
            if i == 0:
                if any(x):
                    out.append((tuple(x), bound - remaining + used))
            else:
                rec(i - 1, remaining - used)
        x[i] = 0

    rec(n - 1, bound)
    return out


def ternary_minimum(phi: QForm) -> Tuple[Fraction, Tuple[int, ...]]:
    """Least nonzero value of a positive definite form and a canonical minimizer."""
    g = phi.gram
    a0 = min(g[i][i] for i in range(phi.n))
    if a0 <= 0 or signature(phi) != (phi.n, 0):
        raise ReductionError("form is not positive definite")
    vecs = short_vectors(g, a0)
    best = min(val for _, val in vecs)
    cands = [v for v, val in vecs if val == best]
    cands = [v if next(c for c in v if c) > 0 else tuple(-c for c in v) for v in cands]
    return best, min(set(cands), key=_canonical_key)


# ------------------------------------------------------------------ binary reduction


@dataclass(frozen=True)
class BinaryReduced:
    A: Fraction
    B: Fraction
    C: Fraction
    lam: Fraction
    t: Fraction
    transform: Matrix  # old = R new


def binary_reduce(psi: QForm) -> BinaryReduced:
    """Gauss reduction to 0 <= B <= A <= C for psi = A x^2 + B x y + C y^2."""
    if psi.n != 2:
        raise FormError("binary_reduce needs a binary form")
    if psi.gram[0][0] <= 0 or determinant(psi.gram) <= 0:
        raise ReductionError("binary form is not positive definite")
    R = identity(2)
    G = psi.gram
    while True:
        A, B, C = G[0][0], 2 * G[0][1], G[1][1]
        n = math.ceil((B - A) / (2 * A))
        if n:
            P = ((Fraction(1), Fraction(-n)), (Fraction(0), Fraction(1)))
            R, G = matmul(R, P), _congruence(G, P)
            continue
        if A > C:
            P = ((Fraction(0), Fraction(-1)), (Fraction(1), Fraction(0)))
            R, G = matmul(R, P), _congruence(G, P)
            continue
        break
    if G[0][1] < 0:
        P = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(-1)))
        R, G = matmul(R, P), _congruence(G, P)
    A, B, C = G[0][0], 2 * G[0][1], G[1][1]
    lam = B / (2 * A)
    t = determinant(G) / A
    return BinaryReduced(A, B, C, lam, t, R)


# ------------------------------------------------------------------ normal shape


def normalize_phi(phi: QForm, v: Sequence[int]):
    """Basis change putting the minimizer v first.

    Returns (a, h4, h5, psi, W) with phi(W y) = a (y1 + h4 y2 + h5 y3)^2 + psi(y2, y3)
    and h4, h5 in (-1/2, 1/2].
    """
    W = complete_to_basis(v)
    for j in (1, 2):
        G = _congruence(phi.gram, W)
        W = matmul(W, _elementary(3, 0, j, -_nearest_down(G[0][j] / G[0][0])))
    G = _congruence(phi.gram, W)
    a = G[0][0]
    h4, h5 = G[0][1] / a, G[0][2] / a
    psi = QForm(tuple(tuple(G[i][j] - G[0][i] * G[0][j] / a for j in (1, 2)) for i in (1, 2)))
    return a, h4, h5, psi, W


@dataclass(frozen=True)
class BirchForm:
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a5: Fraction
    a: Fraction
    h4: Fraction
    h5: Fraction
    A: Fraction
    B: Fraction
    C: Fraction
    lam: Fraction
    t: Fraction
    scale: Fraction
    transform: Matrix  # z = T x
    inverse_transform: Matrix  # x = S z
    iso: Tuple[int, ...] = ()

    @property
    def gram(self) -> Matrix:
        h = Fraction(1, 2)
        return to_matrix([
            [0, h, 0, 0, 0],
            [h, self.a2, self.a3 / 2, self.a4 / 2, self.a5 / 2],
            [0, self.a3 / 2, -self.phi.gram[0][0], -self.phi.gram[0][1], -self.phi.gram[0][2]],
            [0, self.a4 / 2, -self.phi.gram[1][0], -self.phi.gram[1][1], -self.phi.gram[1][2]],
            [0, self.a5 / 2, -self.phi.gram[2][0], -self.phi.gram[2][1], -self.phi.gram[2][2]],
        ])

    @property
    def form(self) -> QForm:
        return QForm(self.gram)

    @property
    def phi(self) -> QForm:
        a, h4, h5, A, lam, t = self.a, self.h4, self.h5, self.A, self.lam, self.t
        return QForm([
            [a, a * h4, a * h5],
            [a * h4, a * h4 * h4 + A, a * h4 * h5 + A * lam],
            [a * h5, a * h4 * h5 + A * lam, a * h5 * h5 + A * lam * lam + t],
        ])

    @property
    def psi(self) -> QForm:
        return QForm([[self.A, self.B / 2], [self.B / 2, self.C]])

    @property
    def abs_det(self) -> Fraction:
        """|D| of the normal shape, which is det(phi)/4."""
        return determinant(self.phi.gram) / 4

    def value_at(self, z: Sequence) -> Fraction:
        return evaluate(self.form, z)

    def to_original(self, z: Sequence[int]) -> Tuple[int, ...]:
        return tuple(int(v) for v in matvec(self.inverse_transform, z))

    def check_invariants(self) -> None:
        half = Fraction(1, 2)
        for name in ("a2", "a3", "a4", "a5", "h4", "h5"):
            v = getattr(self, name)
            if not -half < v <= half:
                raise ReductionError(f"{name}={v} not normalized")
        if not (0 <= self.B <= self.A <= self.C):
            raise ReductionError("binary part not reduced")
        if self.a <= 0 or self.t <= 0:
            raise ReductionError("ternary part not positive")
        if self.C != self.t + self.A * self.lam ** 2:
            raise ReductionError("C != t + A lam^2")
        if 3 * self.A * self.C > 4 * determinant(self.psi.gram):
            raise ReductionError("binary part violates AC <= 4/3 det")

    def to_json(self) -> dict:
        out = {k: fmt(getattr(self, k)) for k in ("a2", "a3", "a4", "a5", "a", "h4", "h5", "A", "B", "C", "lam", "t", "scale")}
        out["transform"] = [[int(x) for x in row] for row in self.transform]
        out["inverse_transform"] = [[int(x) for x in row] for row in self.inverse_transform]
        out["isotropic_vector"] = list(self.iso)
        out["det_phi"] = fmt(determinant(self.phi.gram))
        return out


def birch_reduce(form: QForm, iso: Optional[Sequence[int]] = None) -> BirchForm:
    """Normal shape of a type (1,4) form, exact, with the unimodular audit trail."""
    if form.n != 5:
        raise FormError("normal shape needs a quinary form")
    if determinant(form.gram) == 0:
        raise FormError("form is singular")
    if signature(form) != (1, 4):
        raise FormError(f"form has signature {signature(form)}, expected (1, 4)")
    if iso is None:
        iso = find_isotropic(form)
    iso = tuple(int(v) for v in iso)
    if evaluate(form, iso) != 0:
        raise ReductionError(f"{iso} is not isotropic")
    if content(iso) != 1:
        raise ReductionError(f"{iso} is not primitive")
    G = form.gram

    # isotropic vector first
    S = complete_to_basis(iso)
    G1 = _congruence(G, S)
    r = [2 * G1[0][j] for j in range(1, 5)]
    L = lcm_denominators(r)
    g = Fraction(content([int(x * L) for x in r]), L)
    if g == 0:  # pragma: no cover - excluded by nonsingularity
        raise ReductionError("isotropic vector lies in the radical")
    w = [int(x / g) for x in r]
    # new coordinate z2 = w . y', all other cross terms with z1 vanish
    V = transpose(complete_to_basis(w))
    S = matmul(S, _block(5, 1, inverse(V)))

    def current():
        return tuple(tuple(x / g for x in row) for row in _congruence(G, S))

    GB = current()
    phi = QForm(tuple(tuple(-GB[i][j] for j in range(2, 5)) for i in range(2, 5)))
    if signature(phi) != (3, 0):  # pragma: no cover - follows from type (1,4)
        raise ReductionError("ternary part is not positive definite")

    a, v = ternary_minimum(phi)
    _, _, _, psi, W = normalize_phi(phi, v)
    S = matmul(S, _block(5, 2, W))
    br = binary_reduce(psi)
    S = matmul(S, _block(5, 3, br.transform))
    # renormalize h4, h5 after the binary change: z3 -> z3 - n z_j
    for j in (3, 4):
        GB = current()
        h = -GB[2][j] / (-GB[2][2])
        S = matmul(S, _elementary(5, 2, j, -_nearest_down(h)))
    # a_j into (-1/2, 1/2] via z1 -> z1 - n z_j
    GB = current()
    S = matmul(S, _elementary(5, 0, 1, -_nearest_down(GB[1][1])))
    for j in (2, 3, 4):
        GB = current()
        S = matmul(S, _elementary(5, 0, j, -_nearest_down(2 * GB[1][j])))
    GB = current()

    T = inverse(S)
    phi_gram = [[-GB[i][j] for j in range(2, 5)] for i in range(2, 5)]
    a = phi_gram[0][0]
    h4, h5 = phi_gram[0][1] / a, phi_gram[0][2] / a
    bf = BirchForm(
        a2=GB[1][1], a3=2 * GB[1][2], a4=2 * GB[1][3], a5=2 * GB[1][4],
        a=a, h4=h4, h5=h5, A=br.A, B=br.B, C=br.C, lam=br.lam, t=br.t,
        scale=g, transform=T, inverse_transform=S, iso=iso,
    )
    if bf.gram != GB:  # pragma: no cover
        raise ReductionError("internal error: normal shape does not match the transformed gram")
    bf.check_invariants()
    return bf


def birch_instance(instance: ShiftedInstance, bf: BirchForm) -> ShiftedInstance:
    """Shift and form in normal-shape coordinates; the bound scales by 1/g."""
    cb = matvec(bf.transform, instance.shift)
    return ShiftedInstance(bf.form, tuple(normalize_half(c) for c in cb), instance.gamma)


def witness_to_original(instance: ShiftedInstance, bf: BirchForm, z: Sequence[int]) -> Tuple[int, ...]:
    """x with x + c = S (z + c_B), where c_B is the normalized transformed shift."""
    cb = tuple(normalize_half(c) for c in matvec(bf.transform, instance.shift))
    pt = matvec(bf.inverse_transform, [Fraction(zi) + ci for zi, ci in zip(z, cb)])
    x = [p - c for p, c in zip(pt, instance.shift)]
    if any(v.denominator != 1 for v in x):  # pragma: no cover
        raise ReductionError("internal error: witness did not map to an integer vector")
    return tuple(int(v) for v in x)


# ------------------------------------------------------------------ case parameters


def _least_cover(x: RootAffine, y: Fraction) -> int:
    """Least integer j >= 0 with x <= (j+1) y, for y > 0."""
    j = max(0, math.ceil(float(x) / float(y)) - 2)
    while j > 0 and x <= j * y:
        j -= 1
    while not x <= (j + 1) * y:
        j += 1
    return j


@dataclass(frozen=True)
class CaseParams:
    gamma: Fraction
    d5: Fraction
    d: RootAffine
    m: int
    K: int
    L: int
    M: int
    delta_m: RootAffine
    delta_mK: RootAffine
    delta_mKL: RootAffine
    delta_star_mM: RootAffine
    a2p: Fraction
    a4p: Fraction
    a5p: Fraction
    a2pp: Fraction
    a5pp: Fraction
    a2ppp: Fraction
    a2ppp_squared: Fraction
    a2star: Fraction
    a4star: Fraction
    Cval: Fraction
    regime: str
    a_equals_d: bool
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    def d_enclosure(self, width=Fraction(1, 10 ** 12)) -> Enclosure:
        return self.d.enclosure(width)

    def to_json(self) -> dict:
        out = {
            "gamma": fmt(self.gamma), "d5": fmt(self.d5), "d": self.d.to_json(),
            "m": self.m, "K": self.K, "L": self.L, "M": self.M,
            "regime": self.regime, "a_equals_d": self.a_equals_d, "warnings": list(self.warnings),
        }
        for k in ("delta_m", "delta_mK", "delta_mKL", "delta_star_mM"):
            out[k] = getattr(self, k).to_json()
        for k in ("a2p", "a4p", "a5p", "a2pp", "a5pp", "a2ppp", "a2ppp_squared", "a2star", "a4star", "Cval"):
            out[k] = fmt(getattr(self, k))
        return out


@dataclass(frozen=True)
class Coefficients:
    """Unnormalized cascade coefficients; the solver needs these exact values."""

    a2p: Fraction
    a4p: Fraction
    a5p: Fraction
    a2pp: Fraction
    a5pp: Fraction
    a2ppp_squared: Fraction
    a2star: Fraction
    a4star: Fraction


def cascade_coefficients(bf: BirchForm) -> Coefficients:
    a, A, t, lam, C = bf.a, bf.A, bf.t, bf.lam, bf.C
    a2p = bf.a2 + bf.a3 ** 2 / (4 * a)
    a4p = bf.a4 - bf.a3 * bf.h4
    a5p = bf.a5 - bf.a3 * bf.h5
    a2pp = a2p + a4p ** 2 / (4 * A)
    a5pp = a5p - lam * a4p
    return Coefficients(
        a2p=a2p, a4p=a4p, a5p=a5p, a2pp=a2pp, a5pp=a5pp,
        a2ppp_squared=a2pp + a5pp ** 2 / (4 * t),
        a2star=a2p + a5p ** 2 / (4 * C),
        a4star=a4p - lam * A * a5p / C,
    )


def case_params(bf: BirchForm, gamma: Fraction = GAMMA_8) -> CaseParams:
    """Integer parameters and delta chain of the normal shape at constant gamma."""
    gamma = Fraction(gamma)
    d5 = gamma * bf.abs_det
    d = RootAffine.root(d5, 5)
    a, A, t, C = bf.a, bf.A, bf.t, bf.C
    m = _least_cover(d, a)
    delta_m = d + Fraction(m * m - 1) * a / 4
    K = _least_cover(delta_m, A)
    delta_mK = delta_m + Fraction(K * K - 1) * A / 4
    L = _least_cover(delta_mK, t)
    delta_mKL = delta_mK + Fraction(L * L - 1) * t / 4
    M = _least_cover(delta_m, C)
    delta_star = delta_m + Fraction(M * M - 1) * C / 4
    co = cascade_coefficients(bf)
    warnings = []
    if gamma == GAMMA_8:
        regime = "gamma8"
        if a ** 3 > 2 * 4 * bf.abs_det:
            warnings.append("a exceeds (2 det phi)^(1/3)")
    elif gamma == GAMMA_32_3:
        regime = "gamma32/3"
        # with d^5 = (32/3)|D|: a <= (3 d^5 / 4)^(1/3) and A <= (d^5 / 2a)^(1/2)
        if a ** 3 > 3 * d5 / 4:
            warnings.append("a exceeds (3 d^5/4)^(1/3)")
        if A ** 2 > d5 / (2 * a):
            warnings.append("A exceeds (d^5/2a)^(1/2)")
    else:
        regime = "custom"
    return CaseParams(
        gamma=gamma, d5=d5, d=d, m=m, K=K, L=L, M=M,
        delta_m=delta_m, delta_mK=delta_mK, delta_mKL=delta_mKL, delta_star_mM=delta_star,
        a2p=normalize_half(co.a2p), a4p=normalize_half(co.a4p), a5p=normalize_half(co.a5p),
        a2pp=normalize_half(co.a2pp), a5pp=normalize_half(co.a5pp),
        a2ppp=normalize_half(co.a2pp + co.a5pp / (4 * t)),
        a2ppp_squared=normalize_half(co.a2ppp_squared),
        a2star=normalize_half(co.a2star), a4star=normalize_half(co.a4star),
        Cval=C, regime=regime, a_equals_d=(d == a), warnings=tuple(warnings),
    )


def a2ppp_printed(a2pp: Fraction, a5pp: Fraction, t: Fraction) -> Fraction:
    """a2'' + a5''/(4t) mod 1, the unsquared variant."""
    return normalize_half(a2pp + a5pp / (4 * t))
