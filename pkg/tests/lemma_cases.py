"""Seeded generators of instances that satisfy each lemma's hypotheses, plus exact re-checks."""

import math
import random
from fractions import Fraction

from gamma14.exact import normalize_half, root_enclosure
from gamma14.forms import QForm, determinant, evaluate
from gamma14.lemmas import (MacbeathProblem, MacbeathStatus, Sign, is_exceptional, jackson_solve, macbeath1_check,
                            macbeath1_solve, squeeze_solve, trivial_solve)
from gamma14.sampling import random_type14_form

F = Fraction


def rand_q(rng, lo, hi, den=24):
    """Random rational in [lo, hi] with denominator at most den (or larger if the range needs it)."""
    if lo > hi:
        raise ValueError("empty range")
    q = rng.randint(1, den)
    while math.ceil(lo * q) > math.floor(hi * q):
        q += 1
    return F(rng.randint(math.ceil(lo * q), math.floor(hi * q)), q)


# squeeze: 0 < beta - (x + alpha)^2 <= gamma with x = x0 mod 1

def squeeze_case(rng):
    gamma = rand_q(rng, F(13, 48), 4)
    m = math.floor(gamma)
    beta = rand_q(rng, F(1, 4), gamma + F(m * m, 4), 48)
    if beta <= F(1, 4):
        beta = F(1, 4) + F(1, 97)
    return rand_q(rng, -3, 3), beta, gamma, rand_q(rng, -1, 1)


def check_squeeze(alpha, beta, gamma, x0):
    r = squeeze_solve(alpha, beta, gamma, x0)
    assert (r.x - x0).denominator == 1
    assert r.value == beta - (r.x + alpha) ** 2
    assert 0 < r.value <= gamma
    return r


# window: alpha < Q(x + c) <= beta when beta - alpha >= 2 |D|^(1/n)

def jackson_case(rng):
    if rng.random() < 0.4:
        a, b = rng.randint(1, 6), rng.randint(-5, 5)
        form = QForm([[F(0), F(a, 2)], [F(a, 2), F(b, rng.randint(1, 4))]])
    else:
        form = random_type14_form(rng)
    n = form.n
    root = root_enclosure(abs(determinant(form.gram)), n, F(1, 2 ** 30)).hi
    alpha = rand_q(rng, -2, 2)
    beta = alpha + 2 * root + rand_q(rng, 0, 1)
    shift = [F(rng.randrange(q), q) for q in (rng.randint(1, 12) for _ in range(n))]
    return form, alpha, beta, shift


def check_jackson(form, alpha, beta, shift):
    r = jackson_solve(form, alpha, beta, shift)
    value = evaluate(form, [F(x) + c for x, c in zip(r.x, shift)])
    assert value == r.value
    assert alpha < value <= beta
    return r


# Macbeath step: 0 < sx x + beta y + sa alpha y^2 + nu <= gamma

def macbeath_case(rng, exceptional_share=0.2):
    k = rng.randint(1, 6)
    h = F(rng.randint(-12, 24), 2)
    if rng.random() < exceptional_share:
        alpha = h / (k * k)
        if alpha <= 0:
            alpha = F(1, 2 * k * k)
            h = alpha * k * k
            if (2 * h).denominator != 1:
                h, alpha = F(1, 2), F(1, 2 * k * k)
    else:
        alpha = rand_q(rng, F(1, 50), 3)
    gamma = abs(h - k * k * alpha) + F(1, 2) + rand_q(rng, 0, 1)
    beta = rand_q(rng, -2, 2)
    nu = rand_q(rng, -3, 3)
    p = MacbeathProblem(alpha, beta, gamma, nu, h, k, Sign(rng.choice((1, -1))), Sign(rng.choice((1, -1))))
    return p


def brute_exceptional(alpha, beta, h, k):
    """Membership of beta - h/k in <1/k, 2 alpha> by scanning multiples of 2 alpha."""
    if alpha != h / (k * k):
        return False
    target = beta - h / k
    period = (2 * alpha * k).denominator
    return any(((target - 2 * alpha * j) * k).denominator == 1 for j in range(period + 1))


def check_macbeath(p):
    status = macbeath1_check(p)
    assert (status is MacbeathStatus.EXCEPTIONAL_PAIR) == brute_exceptional(p.alpha, p.beta, p.h, p.k)
    if status is MacbeathStatus.EXCEPTIONAL_PAIR:
        return None
    w = macbeath1_solve(p)
    assert w.value == p.value(w.x, w.y)
    assert 0 < w.value <= p.gamma
    return w


# x1 progression: 0 < (x1 + alpha x2 + nu) x2 + beta <= delta

def trivial_case(rng):
    c2 = normalize_half(rand_q(rng, 0, 1, 12))
    need = F(1, 2) if c2.denominator != 1 else F(1)
    delta = need + rand_q(rng, 0, 2)
    return rand_q(rng, -2, 2), rand_q(rng, -2, 2), rand_q(rng, -3, 3), delta, rand_q(rng, -1, 1, 12), c2


def check_trivial(alpha, nu, beta, delta, c1, c2):
    r = trivial_solve(alpha, nu, beta, delta, c1, c2)
    assert (r.x1 - c1).denominator == 1 and (r.x2 - c2).denominator == 1
    value = (r.x1 + alpha * r.x2 + nu) * r.x2 + beta
    assert value == r.value
    assert 0 < value <= delta
    return r


def run_suite(make, check, count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        args = make(rng)
        if isinstance(args, tuple):
            check(*args)
        else:
            check(args)
    return count
