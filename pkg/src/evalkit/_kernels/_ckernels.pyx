# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled DP kernels: character Levenshtein and LCS length."""

from libc.stdlib cimport free, malloc


cdef Py_UCS4* _copy_chars(str s, Py_ssize_t n) except NULL:
    cdef Py_UCS4* buf = <Py_UCS4*> malloc(n * sizeof(Py_UCS4))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = s[i]
    return buf


def levenshtein(str a, str b):
    """Minimum number of single-character insertions, deletions and
    substitutions turning `a` into `b`."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if a == b:
        return 0
    if lb > la:
        a, b = b, a
        la, lb = lb, la
    cdef Py_UCS4* ca = _copy_chars(a, la)
    cdef Py_UCS4* cb = _copy_chars(b, lb)
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* curr = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or curr == NULL:
        free(ca); free(cb); free(prev); free(curr)
        raise MemoryError()
    cdef Py_ssize_t i, j, best, cand
    cdef Py_ssize_t* tmp
    cdef Py_UCS4 ch
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        ch = ca[i - 1]
        curr[0] = i
        for j in range(1, lb + 1):
            best = prev[j - 1] + (0 if ch == cb[j - 1] else 1)
            cand = prev[j] + 1
            if cand < best:
                best = cand
            cand = curr[j - 1] + 1
            if cand < best:
                best = cand
            curr[j] = best
        tmp = prev; prev = curr; curr = tmp
    cdef Py_ssize_t result = prev[lb]
    free(ca); free(cb); free(prev); free(curr)
    return result


cdef Py_ssize_t _lcs_core(long* ia, Py_ssize_t la, long* ib, Py_ssize_t lb):
    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* curr = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or curr == NULL:
        free(prev); free(curr)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef Py_ssize_t* tmp
    cdef long x
    for j in range(lb + 1):
        prev[j] = 0
    curr[0] = 0
    for i in range(la):
        x = ia[i]
        for j in range(1, lb + 1):
            if x == ib[j - 1]:
                curr[j] = prev[j - 1] + 1
            elif prev[j] >= curr[j - 1]:
                curr[j] = prev[j]
            else:
                curr[j] = curr[j - 1]
        tmp = prev; prev = curr; curr = tmp
    cdef Py_ssize_t result = prev[lb]
    free(prev); free(curr)
    return result


cdef long* _copy_ids(list seq, Py_ssize_t n) except NULL:
    cdef long* buf = <long*> malloc(n * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = seq[i]
    return buf


def lcs_length(list a, list b):
    """Length of the longest common subsequence of two id sequences."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0 or lb == 0:
        return 0
    cdef long* ia = _copy_ids(a, la)
    cdef long* ib = _copy_ids(b, lb)
    cdef Py_ssize_t result
    try:
        result = _lcs_core(ia, la, ib, lb)
    finally:
        free(ia); free(ib)
    return result


def lcs_str(str a, str b):
    """Length of the longest common subsequence of two strings (per character)."""
    cdef Py_ssize_t la = len(a), lb = len(b)
    if la == 0 or lb == 0:
        return 0
    if a == b:
        return la
    cdef long* ia = <long*> malloc(la * sizeof(long))
    cdef long* ib = <long*> malloc(lb * sizeof(long))
    if ia == NULL or ib == NULL:
        free(ia); free(ib)
        raise MemoryError()
    cdef Py_ssize_t i, result
    for i in range(la):
        ia[i] = <long> a[i]
    for i in range(lb):
        ib[i] = <long> b[i]
    try:
        result = _lcs_core(ia, la, ib, lb)
    finally:
        free(ia); free(ib)
    return result
