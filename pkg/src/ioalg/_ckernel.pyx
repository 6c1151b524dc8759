# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot loops; see ``ioalg._pykernel`` for the contract."""

from array import array
from cpython cimport array as carray


def conv_pairs(ea, eb, Py_ssize_t nvars, lo, hi):
    cdef carray.array a_arr = array("q", ea)
    cdef carray.array b_arr = array("q", eb)
    cdef carray.array lo_arr = array("q", lo)
    cdef carray.array hi_arr = array("q", hi)
    cdef long long[:] av = a_arr
    cdef long long[:] bv = b_arr
    cdef long long[:] lov = lo_arr
    cdef long long[:] hiv = hi_arr
    cdef Py_ssize_t na = len(a_arr) // nvars if nvars else 0
    cdef Py_ssize_t nb = len(b_arr) // nvars if nvars else 0
    cdef Py_ssize_t i, j, v, count = 0, pos = 0
    cdef long long s
    cdef bint ok
    # two passes: count the matches, then fill preallocated arrays
    for i in range(na):
        for j in range(nb):
            ok = True
            for v in range(nvars):
                s = av[i * nvars + v] + bv[j * nvars + v]
                if s < lov[v] or s > hiv[v]:
                    ok = False
                    break
            if ok:
                count += 1
    cdef carray.array out_i = carray.clone(array("q"), count, False)
    cdef carray.array out_j = carray.clone(array("q"), count, False)
    cdef long long[:] oi = out_i
    cdef long long[:] oj = out_j
    for i in range(na):
        for j in range(nb):
            ok = True
            for v in range(nvars):
                s = av[i * nvars + v] + bv[j * nvars + v]
                if s < lov[v] or s > hiv[v]:
                    ok = False
                    break
            if ok:
                oi[pos] = i
                oj[pos] = j
                pos += 1
    return out_i, out_j


def poly_mulmod(list a, list b, list red):
    cdef Py_ssize_t d = len(a)
    cdef Py_ssize_t i, j, k, t
    cdef list prod = [0] * (2 * d - 1)
    cdef object ai, bj, c
    cdef list row
    for i in range(d):
        ai = a[i]
        if ai:
            for j in range(d):
                bj = b[j]
                if bj:
                    prod[i + j] += ai * bj
    cdef list out = prod[:d]
    for k in range(d, 2 * d - 1):
        c = prod[k]
        if c:
            row = red[k - d]
            for t in range(d):
                if row[t]:
                    out[t] += c * row[t]
    return out
