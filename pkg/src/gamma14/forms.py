"""Quadratic forms with rational Gram matrices, shifts and witnesses."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .exact import (
    Enclosure,
    as_rational,
    evaluate_point,
    fmt,
    normalize_half,
    parse_expr,
    root_enclosure,
)

GAMMA_8 = Fraction(8)
GAMMA_8486 = Fraction(8486, 1000)
GAMMA_32_3 = Fraction(32, 3)
KNOWN_GAMMAS = (GAMMA_8, GAMMA_8486, GAMMA_32_3)

Matrix = Tuple[Tuple[Fraction, ...], ...]


class FormError(ValueError):
    pass


def to_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(as_rational(x) if not isinstance(x, Fraction) else x for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> Tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def determinant(m: Matrix) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    a = [list(row) for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise FormError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def is_integral(m: Matrix) -> bool:
    return all(x.denominator == 1 for row in m for x in row)


def check_unimodular(u: Matrix) -> None:
    if not is_integral(u):
        raise FormError("transformation matrix is not integral")
    if abs(determinant(u)) != 1:
        raise FormError("transformation matrix is not unimodular")


@dataclass(frozen=True)
class QForm:
    gram: Matrix

    def __post_init__(self):
        g = to_matrix(self.gram)
        n = len(g)
        if n < 1 or any(len(row) != n for row in g):
            raise FormError("gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise FormError(f"gram matrix not symmetric at ({i + 1},{j + 1})")
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return len(self.gram)

    def __call__(self, x: Sequence) -> Fraction:
        return evaluate(self, x)

    def __neg__(self) -> "QForm":
        return QForm(tuple(tuple(-x for x in row) for row in self.gram))

    def scaled(self, s: Fraction) -> "QForm":
        return QForm(tuple(tuple(s * x for x in row) for row in self.gram))

    def to_json(self) -> list:
        return [[fmt(x) for x in row] for row in self.gram]

    def pretty(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.n)]
        terms = []
        for i in range(self.n):
            for j in range(i, self.n):
                c = self.gram[i][j] * (1 if i == j else 2)
                if c:
                    mono = f"{names[i]}^2" if i == j else f"{names[i]}*{names[j]}"
                    terms.append(f"{fmt(c)}*{mono}")
        return " + ".join(terms) or "0"


def evaluate(form: QForm, point: Sequence) -> Fraction:
    """Exact value x^T G x."""
    if len(point) != form.n:
        raise FormError(f"point has dimension {len(point)}, form has {form.n}")
    x = [p if isinstance(p, Fraction) else as_rational(p) for p in point]
    total = Fraction(0)
    g = form.gram
    for i in range(form.n):
        xi = x[i]
        if not xi:
            continue
        row = g[i]
        total += row[i] * xi * xi
        for j in range(i + 1, form.n):
            if x[j]:
                total += 2 * row[j] * xi * x[j]
    return total


def form_determinant(form: QForm) -> Fraction:
    return determinant(form.gram)


def signature(form: QForm) -> Tuple[int, int]:
    """(r, s) from a rational congruence diagonalization."""
    a = [list(row) for row in form.gram]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in active for j in active if i < j and a[i][j] != 0), None)
            if pair is None:
                raise FormError("singular form has no signature")
            i, j = pair
            # x_i -> x_i + x_j makes the diagonal entry 2*a_ij != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for r in active:
            if r != piv and a[r][piv] != 0:
                f = a[r][piv] / p
                for k in range(n):
                    a[r][k] -= f * a[piv][k]
                for k in range(n):
                    a[k][r] -= f * a[k][piv]
        active.remove(piv)
    if pos + neg != n:
        raise FormError("singular form has no signature")
    return pos, neg


def apply_unimodular(form: QForm, u: Sequence[Sequence]) -> QForm:
    """Form x -> Q(Ux); the Gram matrix becomes U^T G U."""
    um = to_matrix(u)
    if len(um) != form.n:
        raise FormError("dimension mismatch")
    check_unimodular(um)
    return QForm(matmul(matmul(transpose(um), form.gram), um))


def form_from_polynomial(text: str, n: int) -> QForm:
    """Gram matrix of a homogeneous quadratic polynomial in x1..xn."""
    expr = parse_expr(text)

    def val(vec):
        return evaluate_point(expr, {f"x{i + 1}": Fraction(v) for i, v in enumerate(vec)})

    unit = [[int(i == j) for j in range(n)] for i in range(n)]
    diag = [val(unit[i]) for i in range(n)]
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = diag[i]
        for j in range(i + 1, n):
            both = [a + b for a, b in zip(unit[i], unit[j])]
            rows[i][j] = rows[j][i] = (val(both) - diag[i] - diag[j]) / 2
    form = QForm(rows)
    # a quadratic is fixed by these values only if it is homogeneous of degree 2
    probe = [Fraction(k + 2, k + 3) for k in range(n)]
    if val(probe) != evaluate(form, probe):
        raise FormError("polynomial is not a homogeneous quadratic")
    return form


@dataclass(frozen=True)
class ShiftedInstance:
    form: QForm
    shift: Tuple[Fraction, ...]
    gamma: Fraction = GAMMA_8

    def __post_init__(self):
        shift = tuple(normalize_half(as_rational(c) if not isinstance(c, Fraction) else c) for c in self.shift)
        if len(shift) != self.form.n:
            raise FormError("shift dimension differs from form dimension")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "gamma", as_rational(self.gamma))
        if self.gamma <= 0:
            raise FormError("gamma must be positive")

    @property
    def n(self) -> int:
        return self.form.n

    def d_power(self) -> Fraction:
        """d^n = gamma * |D|, exact."""
        return self.gamma * abs(form_determinant(self.form))

    def with_gamma(self, gamma: Fraction) -> "ShiftedInstance":
        return ShiftedInstance(self.form, self.shift, gamma)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "gram": self.form.to_json(),
            "shift": [fmt(c) for c in self.shift],
            "gamma": fmt(self.gamma),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ShiftedInstance":
        if not isinstance(obj, dict):
            raise FormError("form file must hold a JSON object")
        if "gram" not in obj and "polynomial" in obj:
            n = int(obj.get("n", 5))
            form = form_from_polynomial(str(obj["polynomial"]), n)
        else:
            try:
                gram = obj["gram"]
                n = int(obj.get("n", len(gram)))
            except (KeyError, TypeError) as exc:
                raise FormError(f"form file needs a 'gram' array or a 'polynomial': {exc}") from None
            if len(gram) != n:
                raise FormError(f"'n' is {n} but gram has {len(gram)} rows")
            form = QForm(to_matrix(gram))
        shift = obj.get("shift", ["0"] * n)
        return cls(form, tuple(as_rational(c) for c in shift), as_rational(str(obj.get("gamma", "8"))))


def load_instance(path: str) -> ShiftedInstance:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return ShiftedInstance.from_json(obj)


def d_value(instance: ShiftedInstance, width: Fraction = Fraction(1, 10 ** 12)) -> Enclosure:
    return root_enclosure(instance.d_power(), instance.n, width)


@dataclass(frozen=True)
class Witness:
    x: Tuple[int, ...]
    value: Fraction
    strict: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"x": list(self.x), "value": fmt(self.value), "value_decimal": f"{float(self.value):.12g}", "strict": self.strict}


def check_witness(instance: ShiftedInstance, x: Sequence[int]) -> Witness:
    """Re-evaluate Q(x + c) and test 0 < value and value^n <= gamma |D| exactly."""
    if any(not isinstance(v, int) for v in x):
        raise FormError("witness coordinates must be integers")
    pt = [Fraction(v) + c for v, c in zip(x, instance.shift)]
    value = evaluate(instance.form, pt)
    if value <= 0:
        raise FormError(f"witness value {value} is not positive")
    bound = instance.d_power()
    power = value ** instance.n
    if power > bound:
        raise FormError(f"witness value {value} exceeds the bound")
    return Witness(tuple(x), value, strict=power < bound)


def shift_point(instance: ShiftedInstance, x: Sequence[int]) -> List[Fraction]:
    return [Fraction(v) + c for v, c in zip(x, instance.shift)]
