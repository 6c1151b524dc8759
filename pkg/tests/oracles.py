"""Independent brute-force expanders used as test oracles.

They work from the raw (un-normalized) description of a function
c * x1^(p+i) * x2^(q+j) * (x1-x2)^e and use sympy's binomial coefficients,
sharing no code with the library's expansion routines.
"""

from fractions import Fraction

import sympy

from ioalg.exactnum import phase


def binom(r, m):
    return Fraction(str(sympy.binomial(sympy.Rational(str(r)), m)))


def _put(out, key, val):
    out[key] = out.get(key, 0) + val


def _clean(out):
    return {k: v for k, v in out.items() if v}


def expand12(raw, W):
    """iota12 on the box [-W, W]^2: powers of x2/x1."""
    out = {}
    for b1, b2, e, c in raw:
        m = 0
        while b2 + m <= W:
            bc = binom(e, m)
            key = (b1 + e - m, b2 + m)
            if bc and -W <= key[0] <= W and -W <= key[1]:
                _put(out, key, c * bc * (-1) ** m)
            m += 1
    return _clean(out)


def expand21(raw, W, order):
    """iota21 on the box: (x1-x2)^e = e^{-pi i e} (x2-x1)^e, powers of x1/x2."""
    out = {}
    for b1, b2, e, c in raw:
        ph = phase(-e, order)
        m = 0
        while b1 + m <= W:
            bc = binom(e, m)
            key = (b1 + m, b2 + e - m)
            if bc and -W <= key[1] <= W and -W <= key[0]:
                _put(out, key, c * ph * bc * (-1) ** m)
            m += 1
    return _clean(out)


def expand20(raw, W):
    """iota20 on the box in (x0, x2): x1 = x2 + x0, powers of x0/x2."""
    out = {}
    for b1, b2, e, c in raw:
        m = 0
        while e + m <= W:
            bc = binom(b1, m)
            key = (e + m, b1 + b2 - m)
            if bc and -W <= key[1] <= W and -W <= key[0]:
                _put(out, key, c * bc)
            m += 1
    return _clean(out)


def delta_derivative(t, W):
    """(1/(t-1)!) d^{t-1}/dx2^{t-1} of sum_n x1^n x2^{-n-1}, on the box."""
    out = {}
    fact = sympy.factorial(t - 1)
    for n in range(-W, W + 1):
        e2 = -n - t
        if -W <= e2 <= W:
            c = sympy.Integer(1)
            for k in range(t - 1):
                c *= -n - 1 - k
            c = Fraction(str(c / fact))
            if c:
                out[(Fraction(n), Fraction(e2))] = c
    return out

