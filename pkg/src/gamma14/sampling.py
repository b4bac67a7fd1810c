"""Seeded random instances for batch runs and property tests."""

from __future__ import annotations

import os
import random
from fractions import Fraction
from typing import Iterator, List, Optional

from .forms import GAMMA_32_3, QForm, ShiftedInstance, determinant, signature

DEFAULT_SEED = 20240611


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("GAMMA14_SEED")
    return int(raw) if raw not in (None, "") else default


def random_entry(rng: random.Random, num: int = 4, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_type14_form(rng: random.Random, num: int = 4, den: int = 4, max_tries: int = 10000) -> QForm:
    """Uniform small-rational Gram entries, kept when the form has type (1,4) or (4,1).

    A (4,1) draw is negated, so every accepted draw is used.
    """
    for _ in range(max_tries):
        g = [[Fraction(0)] * 5 for _ in range(5)]
        for i in range(5):
            for j in range(i, 5):
                g[i][j] = g[j][i] = random_entry(rng, num, den)
        form = QForm(g)
        if determinant(form.gram) == 0:
            continue
        sig = signature(form)
        if sig == (1, 4):
            return form
        if sig == (4, 1):
            return -form
    raise RuntimeError("no type (1,4) form drawn")


def random_shift(rng: random.Random, n: int = 5, max_den: int = 12) -> List[Fraction]:
    out = []
    for _ in range(n):
        q = rng.randint(1, max_den)
        out.append(Fraction(rng.randrange(q), q))
    return out


def random_instances(count: int, seed: Optional[int] = None, gamma: Fraction = GAMMA_32_3,
                     num: int = 4, den: int = 4, max_den: int = 12) -> Iterator[ShiftedInstance]:
    rng = random.Random(seed_from_env() if seed is None else seed)
    for _ in range(count):
        form = random_type14_form(rng, num, den)
        yield ShiftedInstance(form, tuple(random_shift(rng, 5, max_den)), gamma)
