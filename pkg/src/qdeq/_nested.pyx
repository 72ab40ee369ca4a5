# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled nested harmonic-sum kernel.

Values are unsigned fixed point numbers stored in ``frac_limbs + 1``
little-endian 64-bit limbs; the top limb is the integer part.  Every
division truncates, so the result equals ``x // d**s`` computed with
Python integers, bit for bit.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset, memcpy

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef inline void _div_small(uint64_t* x, int n, uint64_t d) noexcept nogil:
    cdef u128 rem = 0
    cdef u128 cur
    cdef int i
    for i in range(n - 1, -1, -1):
        cur = (rem << 64) | x[i]
        x[i] = <uint64_t>(cur / (<u128>d))
        rem = cur - (<u128>x[i]) * d

cdef inline void _add_into(uint64_t* acc, const uint64_t* x, int n) noexcept nogil:
    cdef u128 carry = 0
    cdef u128 s
    cdef int i
    for i in range(n):
        s = <u128>acc[i] + x[i] + carry
        acc[i] = <uint64_t>s
        carry = s >> 64

cdef object _to_int(const uint64_t* x, int n):
    cdef int i
    out = 0
    for i in range(n - 1, -1, -1):
        out = (out << 64) | x[i]
    return out


def nested_sums(compositions, long d_max, bint weak, int frac_limbs, checkpoints):
    """Scan nested sums over d = 1..d_max for each composition.

    Returns, per composition, the scaled integer value at each checkpoint.
    """
    cdef int n = frac_limbs + 1
    cdef int k, j, e, s, c_idx
    cdef long d
    cdef uint64_t p
    cdef uint64_t* state
    cdef uint64_t* tmp = <uint64_t*>malloc(n * sizeof(uint64_t))
    cdef int* exps
    cdef list results = []
    cdef list marks = sorted(set(int(c) for c in checkpoints))
    if tmp == NULL:
        raise MemoryError()
    try:
        for comp in compositions:
            comp = tuple(int(x) for x in comp)
            k = len(comp)
            state = <uint64_t*>malloc((k + 1) * n * sizeof(uint64_t))
            exps = <int*>malloc((k + 1) * sizeof(int))
            if state == NULL or exps == NULL:
                free(state)
                free(exps)
                raise MemoryError()
            try:
                memset(state, 0, (k + 1) * n * sizeof(uint64_t))
                state[k * n + n - 1] = 1
                for j in range(k):
                    exps[j] = comp[j]
                vals = {}
                c_idx = 0
                while c_idx < len(marks) and marks[c_idx] <= 0:
                    vals[marks[c_idx]] = _to_int(state, n)
                    c_idx += 1
                for d in range(1, d_max + 1):
                    if weak:
                        j = k - 1
                        while j >= 0:
                            memcpy(tmp, state + (j + 1) * n, n * sizeof(uint64_t))
                            s = exps[j]
                            while s > 0:
                                # largest power of d that fits a limb
                                p = <uint64_t>d
                                e = 1
                                while e < s and p <= (<uint64_t>0xFFFFFFFFFFFFFFFF) // <uint64_t>d:
                                    p *= <uint64_t>d
                                    e += 1
                                _div_small(tmp, n, p)
                                s -= e
                            _add_into(state + j * n, tmp, n)
                            j -= 1
                    else:
                        for j in range(k):
                            memcpy(tmp, state + (j + 1) * n, n * sizeof(uint64_t))
                            s = exps[j]
                            while s > 0:
                                p = <uint64_t>d
                                e = 1
                                while e < s and p <= (<uint64_t>0xFFFFFFFFFFFFFFFF) // <uint64_t>d:
                                    p *= <uint64_t>d
                                    e += 1
                                _div_small(tmp, n, p)
                                s -= e
                            _add_into(state + j * n, tmp, n)
                    while c_idx < len(marks) and marks[c_idx] == d:
                        vals[d] = _to_int(state, n)
                        c_idx += 1
                results.append([vals[c] if c in vals else None for c in checkpoints])
            finally:
                free(state)
                free(exps)
    finally:
        free(tmp)
    return results
