"""Pure-Python implementations of the hot loops.

The compiled module ``ioalg._ckernel`` exposes the same functions with the
same signatures; ``ioalg.kernel`` picks one of the two at import time.
"""

from array import array


def conv_pairs(ea, eb, nvars, lo, hi):
    """Index pairs (i, j) whose exponent sum lies inside the box [lo, hi].

    ``ea`` and ``eb`` are flat int64 arrays of integer-scaled exponent
    tuples (``nvars`` entries per term); ``lo``/``hi`` are per-variable bounds
    on the same scale.  Returns two arrays of matching indices.
    """
    na = len(ea) // nvars if nvars else 0
    nb = len(eb) // nvars if nvars else 0
    out_i = array("q")
    out_j = array("q")
    rows_b = [tuple(eb[j * nvars:(j + 1) * nvars]) for j in range(nb)]
    bounds = list(zip(lo, hi))
    for i in range(na):
        row_a = ea[i * nvars:(i + 1) * nvars]
        for j, row_b in enumerate(rows_b):
            for v in range(nvars):
                s = row_a[v] + row_b[v]
                lo_v, hi_v = bounds[v]
                if s < lo_v or s > hi_v:
                    break
            else:
                out_i.append(i)
                out_j.append(j)
    return out_i, out_j


def poly_mulmod(a, b, red):
    """Multiply integer coefficient lists modulo a monic polynomial.

    ``a`` and ``b`` have length d; ``red[k]`` is the length-d coordinate
    list of x^(d+k) modulo the polynomial, for 0 <= k <= d-2.
    """
    d = len(a)
    prod = [0] * (2 * d - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    out = prod[:d]
    for k in range(d, 2 * d - 1):
        c = prod[k]
        if c:
            row = red[k - d]
            for t in range(d):
                if row[t]:
                    out[t] += c * row[t]
    return out
