"""Certified complex roots of integer polynomials.

Roots are located by Aberth iteration at twice the working precision, then
each approximation z is certified by the inclusion disc of radius
``n * |p(z)| / |p'(z)|`` (every degree-n polynomial has a root there).  With
the Horner rounding error folded in, pairwise-disjoint discs each hold
exactly one root.  Approximations close to the real axis are re-centred on
it; a conjugation-symmetric disc holding a single root proves that root real.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import PrecisionExhausted, RepeatedRoot


@dataclass(frozen=True)
class RootEnclosure:
    center: mpmath.mpc
    radius: mpmath.mpf
    is_real: bool


def _horner_with_bound(coeffs, z, prec):
    """p(z), p'(z) and an upper bound on the rounding error of each."""
    n = len(coeffs) - 1
    p = mpmath.mpc(coeffs[-1])
    dp = mpmath.mpc(0)
    absz = abs(z)
    mag = mpmath.mpf(abs(coeffs[-1]))
    dmag = mpmath.mpf(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        dmag = dmag * absz + mag
        p = p * z + c
        mag = mag * absz + abs(c)
    u = mpmath.ldexp(1, -prec + 1)
    gamma = 4 * (n + 1) * u
    return p, dp, gamma * mag, gamma * dmag


def _aberth(coeffs, prec, max_iter=500):
    n = len(coeffs) - 1
    lead = mpmath.mpf(coeffs[-1])
    # Cauchy-type bound for the initial circle
    bound = 1 + max(abs(mpmath.mpf(c) / lead) for c in coeffs[:-1])
    radius = bound / 2
    zs = [
        radius * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4"))
        for k in range(n)
    ]
    tol = mpmath.ldexp(1, -prec + 8)
    for _ in range(max_iter):
        biggest = mpmath.mpf(0)
        new = list(zs)
        for i, z in enumerate(zs):
            p, dp, _, _ = _horner_with_bound(coeffs, z, prec)
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else mpmath.mpc(1e-3)
            s = sum(1 / (z - w) for j, w in enumerate(new) if j != i)
            step = ratio / (1 - ratio * s)
            new[i] = z - step
            biggest = max(biggest, abs(step) / max(abs(z), 1))
        zs = new
        if biggest < tol:
            break
    # a couple of polishing Newton steps
    for _ in range(3):
        polished = []
        for z in zs:
            p, dp, _, _ = _horner_with_bound(coeffs, z, prec)
            polished.append(z - p / dp if dp != 0 else z)
        zs = polished
    return zs


def _inclusion_radius(coeffs, z, prec):
    n = len(coeffs) - 1
    p, dp, ep, edp = _horner_with_bound(coeffs, z, prec)
    denom = abs(dp) - edp
    if denom <= 0:
        return mpmath.inf
    return n * (abs(p) + ep) / denom


def certified_roots(coeffs: list[int], working_precision: int) -> list[RootEnclosure]:
    """Certified, pairwise-disjoint root discs for a squarefree integer polynomial.

    ``coeffs`` is ascending.  Discs are computed at ``2 * working_precision``
    bits and must have radius below ``2**(-working_precision/2)``.
    """
    prec = 2 * working_precision
    target = mpmath.ldexp(1, -(working_precision // 2))
    with mpmath.workprec(prec + 32):
        zs = _aberth(coeffs, prec)
        encl: list[RootEnclosure] = []
        near_real_cut = mpmath.ldexp(1, -(working_precision // 2))
        for z in zs:
            if abs(z.imag) < near_real_cut * max(1, abs(z)):
                c = mpmath.mpc(z.real, 0)
                rad = _inclusion_radius(coeffs, c, prec)
                if rad < target:
                    encl.append(RootEnclosure(c, rad, True))
                    continue
            rad = _inclusion_radius(coeffs, z, prec)
            encl.append(RootEnclosure(mpmath.mpc(z), rad, False))
        for e in encl:
            if not e.radius < target:
                raise PrecisionExhausted(
                    f"root near {mpmath.nstr(e.center, 8)} not certified at "
                    f"{working_precision} bits"
                )
        for i in range(len(encl)):
            for j in range(i + 1, len(encl)):
                gap = abs(encl[i].center - encl[j].center)
                if gap <= encl[i].radius + encl[j].radius:
                    if gap < mpmath.ldexp(1, -working_precision):
                        raise RepeatedRoot("root approximations coincide")
                    raise PrecisionExhausted("root discs overlap")
        # a non-real disc must not meet the real axis, otherwise the root's
        # conjugate could be the same root and realness is undecided
        for e in encl:
            if not e.is_real and abs(e.center.imag) <= e.radius:
                raise PrecisionExhausted("cannot decide whether a root is real")
    return encl
