"""Distributions of gamma-power ratios driving both relaying protocols.

For X, Y ~ Gamma(m, m) independent and constants a, b, I, g >= 0 this module
evaluates the cdfs of

    T1 = aX / (bY + I)                      (direct-link SINR form)
    T2 = max(aX, bY) / (min(aX, bY) + I)    (decode-and-forward form)
    (T1, T3) jointly at (tau, tau), with    (amplify-and-forward form)
    T3 = bY / (aX + I + g(aX + bY + I))

Internally every exceedance probability is expanded into a finite list of
terms  coef * I^n * exp(-s*I).  The same term lists, with E[I^n e^(-sI)]
replaced by signed Laplace-transform derivatives, drive the coverage
integrands, so the scalar cdfs double as direct oracles for that path.

Conventions for the piecewise regimes (the indicator-in-denominator
notation): when an indicator in a denominator fails, the corresponding
incomplete-gamma argument is +infinity, i.e. the gamma is complete.  The
regime boundaries are  tau >= 1/g  (joint cdf collapses onto T1) and
tau >= 1/(1+g); g = 0 never reaches the first regime.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class RatioCdfParams:
    """Scalar inputs of the ratio laws: powers a,b, constant interference-plus-
    noise I, backhaul inverse-SNR g, gamma shape m."""
    a: float
    b: float
    i_plus_n: float
    g: float = 0.0
    m: int = 1

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.i_plus_n < 0 or self.g < 0:
            raise ValueError("ratio-cdf parameters must be non-negative")
        if not (self.a > 0 or self.b > 0):
            raise ValueError("need a > 0 or b > 0")
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ValueError("m must be an integer >= 1")


class Term(NamedTuple):
    """One exceedance-probability term  sign * exp(log_coef) * I^n * e^(-s I)."""
    sign: float
    log_coef: float
    n: int
    s: float


def _log_coef(binom, powers):
    """log(binom * prod x^k) for (x, k) pairs; None marks a vanished term.

    x == 0 with k > 0 kills the term; x == inf with k > 0 is only produced
    together with an e^(-inf*I) factor, so those terms are emitted with the
    rate inf and handled at evaluation time (they matter only at I == 0 where
    n >= 1 makes them vanish anyway), hence also dropped here.
    """
    lc = math.log(binom)
    for x, k in powers:
        if k == 0:
            continue
        if x == 0.0 or not math.isfinite(x):
            return None
        lc += k * math.log(x)
    return lc


def _ratio_part(i, x, j, y):
    """(x, i), (y, j), (x+y, -(i+j)) factor list of x^i y^j / (x+y)^(i+j)."""
    return [(x, i), (y, j), (x + y, -(i + j))]


def t1_exceedance_terms(tau, a, b, m):
    """Terms of P[T1 > tau]."""
    if a == 0.0:
        return []  # T1 is identically zero, never exceeds tau >= 0
    if tau == 0.0:
        return [Term(1.0, 0.0, 0, 0.0)]
    s1 = m * tau / a
    out = []
    for i in range(m):
        for k in range(i + 1):
            n = i - k
            lc = _log_coef(
                math.comb(k + m - 1, k) / math.factorial(n),
                _ratio_part(m, a, k, b * tau) + [(s1, n)],
            )
            if lc is not None:
                out.append(Term(1.0, lc, n, s1))
    return out


def joint_exceedance_term_groups(tau, a, b, g, m):
    """Terms of P[T1 > tau or T3 > tau], split as (t1_terms, extra_terms).

    The split mirrors the protocol structure: P[T2/T3-event beyond the T1
    event] carries the backhaul-success weight in the DF combination while the
    AF combination consumes the plain sum.
    """
    if tau == 0.0:
        # T3 > 0 almost surely (b > 0), so the union event is certain
        return [Term(1.0, 0.0, 0, 0.0)], []
    t1 = t1_exceedance_terms(tau, a, b, m)
    if g > 0.0 and tau * g >= 1.0:
        return t1, []  # joint cdf equals the T1 cdf here
    op = 1.0 + g
    y2 = b * (1.0 - tau * g)
    x2 = a * tau * op
    s2 = m * tau * op / y2
    extra = []
    if tau * op >= 1.0:
        # middle regime: complete-gamma variant, one extra double sum
        for i in range(m):
            for k in range(i + 1):
                n = i - k
                lc = _log_coef(
                    math.comb(k + m - 1, k) / math.factorial(n),
                    _ratio_part(k, x2, m, y2) + [(s2, n)],
                )
                if lc is not None:
                    extra.append(Term(1.0, lc, n, s2))
        return t1, extra
    # low-threshold regime: incomplete gammas expand into rate-s3 cross terms
    d = 1.0 - tau * op
    if a > 0.0:
        s1 = m * tau / a
        s3 = (a * op + b) * m * tau / (a * b * d)
        z1 = (tau / a + 1.0 / b) * m * tau * op / d
    else:
        s1 = math.inf
        s3 = math.inf
        z1 = math.inf
    z2 = (1.0 / (a * op) if a > 0.0 else math.inf)
    z2 = (z2 + tau / y2) * m * tau * op / d if math.isfinite(z2) else math.inf
    xa = a * op
    for i in range(m):
        base = math.comb(m + i - 1, i)
        for j in range(m + i):
            for part in (_ratio_part(m, xa, i, b), _ratio_part(i, xa, m, b)):
                lc = _log_coef(base / math.factorial(j), part + [(s3, j)])
                if lc is not None:
                    extra.append(Term(1.0, lc, j, s3))
    for i in range(m):
        for k in range(i + 1):
            nk = i - k
            base = math.comb(k + m - 1, k) / math.factorial(nk)
            part1 = _ratio_part(m, a, k, b * tau) + [(s1, nk)]
            part2 = _ratio_part(k, x2, m, y2) + [(s2, nk)]
            # D2 positive part (rate s2); the D1 positive part is the T1 list
            lc = _log_coef(base, part2)
            if lc is not None:
                extra.append(Term(1.0, lc, nk, s2))
            for j in range(m + k):
                lc = _log_coef(base / math.factorial(j), part1 + [(z1, j)])
                if lc is not None:
                    extra.append(Term(-1.0, lc, nk + j, s3))
                lc = _log_coef(base / math.factorial(j), part2 + [(z2, j)])
                if lc is not None:
                    extra.append(Term(-1.0, lc, nk + j, s3))
    return t1, extra


def t2_exceedance_terms(tau, a, b, m):
    """Terms of P[T2 > tau]; the g = 0 case of the joint law."""
    t1, extra = joint_exceedance_term_groups(tau, a, b, 0.0, m)
    return t1 + extra


_EXP_FLOOR = -745.0  # exp underflows to 0 below this


def evaluate_terms(terms, i_plus_n):
    """Sum  sign * exp(log_coef) * I^n * e^(-s I)  over the term list.

    At I == 0 only n == 0 terms survive and e^(-s*0) = 1 even for s = inf
    (the regime limits require this convention).
    """
    big = i_plus_n
    total = 0.0
    if big == 0.0:
        for t in terms:
            if t.n == 0:
                total += t.sign * math.exp(t.log_coef)
        return total
    log_big = math.log(big)
    for t in terms:
        if not math.isfinite(t.s):
            continue
        e = t.log_coef + t.n * log_big - t.s * big
        if e > _EXP_FLOOR:
            total += t.sign * math.exp(e)
    return total


def _clip_unit(x):
    return min(1.0, max(0.0, x))


def cdf_t1(tau, p: RatioCdfParams):
    """cdf of T1 = aX/(bY + I) at tau."""
    if tau < 0:
        return 0.0
    return _clip_unit(1.0 - evaluate_terms(
        t1_exceedance_terms(tau, p.a, p.b, p.m), p.i_plus_n))


def cdf_t2(tau, p: RatioCdfParams):
    """cdf of T2 = max(aX,bY)/(min(aX,bY) + I) at tau."""
    if tau < 0:
        return 0.0
    return _clip_unit(1.0 - evaluate_terms(
        t2_exceedance_terms(tau, p.a, p.b, p.m), p.i_plus_n))


def cdf_t1_t3_joint(tau, p: RatioCdfParams):
    """Joint cdf P[T1 <= tau, T3 <= tau]; collapses onto F_T1 for tau >= 1/g."""
    if tau < 0:
        return 0.0
    t1, extra = joint_exceedance_term_groups(tau, p.a, p.b, p.g, p.m)
    return _clip_unit(1.0 - evaluate_terms(t1 + extra, p.i_plus_n))


def _exp_or_zero(x):
    return math.exp(x) if x > _EXP_FLOOR else 0.0


def rayleigh_cdfs(tau, p: RatioCdfParams):
    """Closed forms of the three cdfs for exponential fading (m = 1).

    Implemented directly from the m = 1 expressions rather than through the
    general term machinery, so the two paths can check each other.
    """
    a, b, big, g = p.a, p.b, p.i_plus_n, p.g
    if tau < 0:
        return 0.0, 0.0, 0.0
    f1 = 1.0 - a / (a + b * tau) * _exp_or_zero(-tau * big / a)

    if tau < 1.0:
        cross = _exp_or_zero(-(1.0 / a + 1.0 / b) * tau * big / (1.0 - tau))
    else:
        cross = 0.0
    f2 = (f1 - b / (b + a * tau) * _exp_or_zero(-tau * big / b)
          + a * b * (1.0 + tau) * (1.0 - tau) / ((a + b * tau) * (b + a * tau)) * cross)

    op = 1.0 + g
    if g > 0.0 and tau * g >= 1.0:
        f13 = f1
    else:
        y2 = b * (1.0 - tau * g)
        mid = y2 / (y2 + a * tau * op) * _exp_or_zero(-tau * op * big / y2)
        if tau * op < 1.0:
            cross = _exp_or_zero(
                -(1.0 / (a * op) + 1.0 / b) * tau * op * big / (1.0 - tau * op))
        else:
            cross = 0.0
        f13 = (f1 - mid
               + a * b * (1.0 + tau) * (1.0 - tau * op)
               / ((a + b * tau) * (y2 + a * tau * op)) * cross)
    return _clip_unit(f1), _clip_unit(f2), _clip_unit(f13)


def af_end_to_end_sinr(s_bd, s_du):
    """Two-hop amplify-and-forward SINR  x·y / (x + y + 1)."""
    if math.isinf(s_bd):
        return s_du
    if math.isinf(s_du):
        return s_bd
    return s_bd * s_du / (s_bd + s_du + 1.0)


def df_end_to_end_sinr(s_bd, s_du):
    """Two-hop decode-and-forward SINR  min(x, y)."""
    return min(s_bd, s_du)
