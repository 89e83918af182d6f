"""Independent numerical oracles used by the tests.

These deliberately avoid the code paths they check: direct adaptive
Simpson integration in gain space, golden-section minimization, and a
bisection inverse of the Gaussian tail.
"""

import math

import numpy as np

from fadebound.bounds import qfunc


def adaptive_simpson(f, a, b, abs_tol=1e-14, max_depth=50):
    """Recursive adaptive Simpson quadrature on [a, b] to an absolute
    tolerance, with the usual Richardson correction."""

    def simpson(fa, fm, fb, a_, b_):
        return (b_ - a_) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a_, b_, fa, fm, fb, whole, tol_, depth):
        m = 0.5 * (a_ + b_)
        flm = f(0.5 * (a_ + m))
        frm = f(0.5 * (m + b_))
        left = simpson(fa, flm, fm, a_, m)
        right = simpson(fm, frm, fb, m, b_)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol_:
            return left + right + (left + right - whole) / 15.0
        return recurse(a_, m, fa, flm, fm, left, tol_ / 2.0, depth - 1) + recurse(
            m, b_, fm, frm, fb, right, tol_ / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), abs_tol, max_depth)


def scalar_gain_pdf(ch):
    """Scalar gain density from the eigenvalues in extended precision.

    The partial-fraction coefficients alternate in sign and cancel near
    x = 0; accumulating in long double keeps the cancellation benign.
    """
    lam = ch.eigenvalues.astype(np.longdouble)
    N = len(lam)
    b = np.empty(N, dtype=np.longdouble)
    for j in range(N):
        prod = lam[j] ** (N - 1)
        for n in range(N):
            if n != j:
                prod /= lam[j] - lam[n]
        b[j] = prod
    weight = b / lam
    inv_lam = 1.0 / lam

    def pdf(x):
        return float(np.sum(weight * np.exp(-np.longdouble(x) * inv_lam)))

    return pdf


def pep_tail_oracle(d, snr, ch, gamma, rel_tol=1e-10):
    """Direct integration of Q(d sqrt(x E / 2)) f_X(x) over [gamma, inf).

    The range is cut into panels of ~e^-3 decay each; a coarse pass sets
    the absolute tolerance for the refined pass.
    """
    pdf = scalar_gain_pdf(ch)

    def integrand(x):
        return float(qfunc(d * math.sqrt(x * snr / 2.0))) * pdf(x)

    lam_max = float(max(ch.eigenvalues))
    rate = d * d * snr / 4.0 + 1.0 / lam_max
    width = 3.0 / rate
    edges = [gamma + j * width for j in range(28)]

    coarse = sum(
        adaptive_simpson(integrand, lo, hi, abs_tol=1e-6, max_depth=12)
        for lo, hi in zip(edges, edges[1:])
    )
    abs_tol = max(abs(coarse), 1e-300) * rel_tol / len(edges)
    return sum(
        adaptive_simpson(integrand, lo, hi, abs_tol=abs_tol)
        for lo, hi in zip(edges, edges[1:])
    )


def golden_section_min(f, a, b, tol=1e-10):
    """Golden-section search for the minimizer of a unimodal function.

    Ties move the bracket left, so flat plateaus on the right (where the
    objective saturates) are escaped.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d_ = a + invphi * (b - a)
    fc, fd = f(c), f(d_)
    while b - a > tol:
        if fc <= fd:
            b, d_, fd = d_, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d_, fd
            d_ = a + invphi * (b - a)
            fd = f(d_)
    return 0.5 * (a + b)


def q_inverse_bisect(p, lo=0.0, hi=40.0, tol=1e-13):
    """Inverse Gaussian tail by bisection: returns x with Q(x) = p."""
    if not 0.0 < p <= 0.5:
        raise ValueError("p must be in (0, 0.5]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if float(qfunc(mid)) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
