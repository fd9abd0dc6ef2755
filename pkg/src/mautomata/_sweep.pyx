# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exhaustive sweep of a deterministic automaton with a Z^n register."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def sweep_abelian(const int[:, :] trans, const long long[:, :, :] deltas,
                  int initial, const unsigned char[:] terminal, int max_len):
    cdef int n_letters = trans.shape[1]
    cdef int dim = deltas.shape[2]
    cdef Py_ssize_t total = 0, p = 1
    cdef int k
    offsets_np = np.zeros(max_len + 2, dtype=np.int64)
    cdef long long[:] offsets = offsets_np
    for k in range(max_len + 1):
        offsets[k] = total
        total += p
        p *= n_letters
    offsets[max_len + 1] = total

    out_np = np.zeros(total, dtype=np.uint8)
    cdef unsigned char[:] out = out_np
    st_np = np.zeros(max_len + 1, dtype=np.int32)
    lt_np = np.zeros(max_len + 1, dtype=np.int32)
    num_np = np.zeros(max_len + 1, dtype=np.int64)
    reg_np = np.zeros((max_len + 1, max(dim, 1)), dtype=np.int64)
    cdef int[:] st = st_np
    cdef int[:] lt = lt_np
    cdef long long[:] num = num_np
    cdef long long[:, :] reg = reg_np

    cdef int d = 0, x, s, t, i
    cdef bint zero
    st[0] = initial
    out[0] = terminal[initial]
    if max_len == 0:
        return out_np
    lt[0] = 0
    while d >= 0:
        if d == max_len or lt[d] == n_letters:
            d -= 1
            if d >= 0:
                lt[d] += 1
            continue
        x = lt[d]
        s = st[d]
        t = trans[s, x]
        if t < 0:
            lt[d] += 1
            continue
        zero = True
        for i in range(dim):
            reg[d + 1, i] = reg[d, i] + deltas[s, x, i]
            if reg[d + 1, i] != 0:
                zero = False
        st[d + 1] = t
        num[d + 1] = num[d] * n_letters + x
        if zero and terminal[t]:
            out[offsets[d + 1] + num[d + 1]] = 1
        d += 1
        lt[d] = 0
    return out_np
