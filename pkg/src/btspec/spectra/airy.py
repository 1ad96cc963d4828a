"""Airy function Ai on |x| <= 20 and its rightmost zero."""
from __future__ import annotations

import math
from decimal import Decimal, localcontext

SERIES_LIMIT = 8.0
DOMAIN_LIMIT = 20.0

# Ai(0) = 3^(-2/3) / Gamma(2/3) and -Ai'(0) = 3^(-1/3) / Gamma(1/3), to 50 digits
_AI0_DEC = Decimal("0.35502805388781723926006318600418317639797917419918")
_AIP0_DEC = Decimal("0.25881940379280679840518356018920396347909113835493")
AI0 = float(_AI0_DEC)
AIP0 = float(_AIP0_DEC)

# For x > 0 the two series grow like exp(+zeta) while Ai decays like exp(-zeta),
# zeta = 2/3 x^1.5; 45 digits leave ~30 after the cancellation at x = 8.
_SERIES_DIGITS = 45


def _maclaurin(x: float) -> float:
    # Ai(x) = Ai(0) f(x) - |Ai'(0)| g(x) with
    # f = sum 3^k (1/3)_k x^{3k} / (3k)!,  g = sum 3^k (2/3)_k x^{3k+1} / (3k+1)!
    with localcontext() as ctx:
        ctx.prec = _SERIES_DIGITS
        xd = Decimal(x)
        x3 = xd * xd * xd
        f_term, g_term = Decimal(1), xd
        f, g = f_term, g_term
        eps = Decimal(10) ** (-_SERIES_DIGITS)
        k = 0
        while k < 400:
            k += 1
            f_term = f_term * x3 / ((3 * k - 1) * (3 * k))
            g_term = g_term * x3 / ((3 * k) * (3 * k + 1))
            f += f_term
            g += g_term
            if abs(f_term) <= eps * abs(f) and abs(g_term) <= eps * abs(g):
                break
        return float(_AI0_DEC * f - _AIP0_DEC * g)


def _asymptotic_coeffs(n):
    # u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!)
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    return u


_U = _asymptotic_coeffs(40)


def _asymptotic(x: float) -> float:
    if x > 0:
        zeta = 2.0 / 3.0 * x ** 1.5
        total, prev = 0.0, math.inf
        for k, u in enumerate(_U):
            term = (-1) ** k * u / zeta ** k
            if abs(term) > prev:
                break
            total += term
            prev = abs(term)
            if abs(term) < 1e-17 * abs(total):
                break
        return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * x ** 0.25) * total
    y = -x
    zeta = 2.0 / 3.0 * y ** 1.5
    P = Q = 0.0
    prev = math.inf
    for k in range(0, len(_U) // 2):
        tp = (-1) ** k * _U[2 * k] / zeta ** (2 * k)
        tq = (-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        size = max(abs(tp), abs(tq))
        if size > prev:
            break
        P += tp
        Q += tq
        prev = size
        if size < 1e-17:
            break
    phase = zeta + math.pi / 4.0
    return (math.sin(phase) * P - math.cos(phase) * Q) / (math.sqrt(math.pi) * y ** 0.25)


def airy_ai(x: float) -> float:
    """Ai(x): Maclaurin series for |x| <= 8, asymptotic expansions beyond.

    The series is summed in decimal arithmetic so that the cancellation for
    positive arguments does not cost relative accuracy.
    """
    x = float(x)
    if not abs(x) <= DOMAIN_LIMIT:
        raise OverflowError(f"airy_ai is only supported on |x| <= {DOMAIN_LIMIT}, got {x}")
    if abs(x) <= SERIES_LIMIT:
        return _maclaurin(x)
    return _asymptotic(x)


def airy_first_zero(tol: float = 1e-10) -> float:
    """Rightmost zero a1 of Ai by bisection on [-3, -2]."""
    lo, hi = -3.0, -2.0
    f_lo = airy_ai(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = airy_ai(mid)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


A1 = airy_first_zero(1e-13)
RE_TARGET = abs(A1) / 2.0                     # limit of Re lambda / g^(2/3)
IM_TARGET = math.sqrt(3.0) / 2.0 * abs(A1)    # limit of (g x* - Im lambda) / g^(2/3), see airy_anchor
