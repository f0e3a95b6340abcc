# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Machine-word double-description kernels.

Same contract as ``_ddpy.add_rows`` and ``_ddpy.minimize``, including the
order of the returned generators, so both backends produce identical
polyhedra.  Coordinates live in 64-bit integers with 128-bit intermediates;
a value that does not fit raises ``OverflowError`` and the caller retries
with the arbitrary-precision kernels.
"""
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy, memset
from libc.stdint cimport uint64_t

from . import _ddpy

cdef extern from *:
    """
    typedef long long hm_i64;
    typedef __int128 hm_i128;

    static int hm_fits(hm_i128 v) {
        return v >= -(hm_i128)9223372036854775807LL && v <= (hm_i128)9223372036854775807LL;
    }

    static hm_i128 hm_gcd128(hm_i128 a, hm_i128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) { hm_i128 t = a % b; a = b; b = t; }
        return a;
    }

    /* 0 on success, 1 on overflow */
    static int hm_dot(const hm_i64 *a, const hm_i64 *b, int n, hm_i128 *out) {
        hm_i128 s = 0;
        for (int i = 0; i < n; i++) {
            if (__builtin_add_overflow(s, (hm_i128)a[i] * (hm_i128)b[i], &s)) return 1;
        }
        *out = s;
        return 0;
    }

    /* out = (ca*a + cb*b) / gcd; 0 on success, 1 on overflow */
    static int hm_combine(hm_i64 ca, const hm_i64 *a, hm_i64 cb, const hm_i64 *b,
                          int n, hm_i64 *out, hm_i128 *tmp) {
        hm_i128 g = 0;
        for (int i = 0; i < n; i++) {
            hm_i128 v;
            if (__builtin_add_overflow((hm_i128)ca * a[i], (hm_i128)cb * b[i], &v)) return 1;
            tmp[i] = v;
            if (g != 1) g = hm_gcd128(g, v);
        }
        if (g == 0) g = 1;
        for (int i = 0; i < n; i++) {
            hm_i128 v = tmp[i] / g;
            if (!hm_fits(v)) return 1;
            out[i] = (hm_i64)v;
        }
        return 0;
    }

    static int hm_sign128(hm_i128 v) { return (v > 0) - (v < 0); }
    static hm_i64 hm_narrow(hm_i128 v) { return (hm_i64)v; }
    """
    ctypedef long long hm_i64
    ctypedef long long hm_i128  # opaque here: arithmetic stays in the C helpers
    int hm_fits(hm_i128 v) nogil
    int hm_dot(const hm_i64 *a, const hm_i64 *b, int n, hm_i128 *out) nogil
    int hm_combine(hm_i64 ca, const hm_i64 *a, hm_i64 cb, const hm_i64 *b,
                   int n, hm_i64 *out, hm_i128 *tmp) nogil
    int hm_sign128(hm_i128 v) nogil
    hm_i64 hm_narrow(hm_i128 v) nogil


cdef class _Rows:
    """Growable matrix of int64 rows with optional bitset masks."""

    cdef hm_i64 *v
    cdef uint64_t *m
    cdef Py_ssize_t count, cap
    cdef int n, nw

    def __cinit__(self, int n, int nw, Py_ssize_t cap=8):
        self.n = n
        self.nw = nw
        self.count = 0
        self.cap = cap if cap > 0 else 1
        self.v = <hm_i64 *> malloc(self.cap * n * sizeof(hm_i64))
        self.m = <uint64_t *> malloc(self.cap * (nw if nw > 0 else 1) * sizeof(uint64_t))
        if self.v == NULL or self.m == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.v)
        free(self.m)

    cdef Py_ssize_t push(self) except -1:
        cdef hm_i64 *nv
        cdef uint64_t *nm
        if self.count == self.cap:
            self.cap *= 2
            nv = <hm_i64 *> realloc(self.v, self.cap * self.n * sizeof(hm_i64))
            if nv == NULL:
                raise MemoryError()
            self.v = nv
            nm = <uint64_t *> realloc(self.m, self.cap * (self.nw if self.nw > 0 else 1) * sizeof(uint64_t))
            if nm == NULL:
                raise MemoryError()
            self.m = nm
        self.count += 1
        return self.count - 1

    cdef inline hm_i64 *row(self, Py_ssize_t k):
        return self.v + k * self.n

    cdef inline uint64_t *mask(self, Py_ssize_t k):
        return self.m + k * self.nw

    cdef void remove(self, Py_ssize_t k):
        cdef Py_ssize_t j
        for j in range(k, self.count - 1):
            memcpy(self.row(j), self.row(j + 1), self.n * sizeof(hm_i64))
            if self.nw:
                memcpy(self.mask(j), self.mask(j + 1), self.nw * sizeof(uint64_t))
        self.count -= 1

    cdef list to_tuples(self):
        cdef Py_ssize_t k
        cdef int i
        cdef hm_i64 *r
        out = []
        for k in range(self.count):
            r = self.row(k)
            out.append(tuple([r[i] for i in range(self.n)]))
        return out


cdef void _load(hm_i64 *dst, object vec, int n) except *:
    cdef int i
    for i in range(n):
        dst[i] = <hm_i64> vec[i]


cdef void _load_mask(uint64_t *dst, object value, int nw) except *:
    cdef int w
    value = int(value)
    for w in range(nw):
        dst[w] = <uint64_t> (value & 0xFFFFFFFFFFFFFFFF)
        value >>= 64


cdef inline hm_i128 _dot(hm_i64 *a, hm_i64 *b, int n) except? -1:
    cdef hm_i128 s
    if hm_dot(a, b, n, &s):
        raise OverflowError("dot product exceeds 127 bits")
    return s


cdef inline hm_i64 _narrow(hm_i128 s) except? -1:
    if not hm_fits(s):
        raise OverflowError("coefficient exceeds 64 bits")
    return hm_narrow(s)


cdef void _canonical(hm_i64 *v, int n):
    cdef int i
    for i in range(n):
        if v[i]:
            if v[i] < 0:
                for i in range(n):
                    v[i] = -v[i]
            return


def add_rows(lines, rays, sats, int nbits, eqs, ineqs, bint need_point=False):
    """Intersect ``cone(lines, rays)`` with the rows; returns ``(lines, rays)``."""
    cdef int n = 0
    for group in (lines, rays, eqs, ineqs):
        if len(group):
            n = len(group[0])
            break
    if n == 0:
        return list(lines), list(rays)
    cdef int maxbits = nbits + len(ineqs)
    cdef int nw = (maxbits + 63) // 64
    if nw == 0:
        nw = 1
    cdef _Rows L = _Rows(n, 0, len(lines) + 1)
    cdef _Rows R = _Rows(n, nw, len(rays) + 8)
    cdef _Rows R2
    cdef Py_ssize_t k, j, p, q, r, nr, idx
    cdef int i, w, pivot, bword
    cdef uint64_t bmask
    cdef hm_i128 s, ps128
    cdef hm_i64 ps, sq, sp
    cdef bint is_eq, adjacent, any_point
    cdef hm_i64 *rowv = <hm_i64 *> malloc(n * sizeof(hm_i64))
    cdef hm_i64 *piv = <hm_i64 *> malloc(n * sizeof(hm_i64))
    cdef hm_i128 *tmp = <hm_i128 *> malloc(n * sizeof(hm_i128))
    cdef hm_i64 *signs = NULL
    cdef int *sgn = NULL
    cdef uint64_t *common = <uint64_t *> malloc(nw * sizeof(uint64_t))
    if rowv == NULL or piv == NULL or tmp == NULL or common == NULL:
        free(rowv); free(piv); free(tmp); free(common)
        raise MemoryError()
    try:
        for ln in lines:
            k = L.push()
            _load(L.row(k), ln, n)
        for j in range(len(rays)):
            k = R.push()
            _load(R.row(k), rays[j], n)
            _load_mask(R.mask(k), sats[j] if j < len(sats) else 0, nw)
        work = [(rw, True) for rw in eqs] + [(rw, False) for rw in ineqs]
        for rw, is_eq in work:
            _load(rowv, rw, n)
            pivot = -1
            for k in range(L.count):
                s = _dot(rowv, L.row(k), n)
                if hm_sign128(s) != 0:
                    pivot = <int> k
                    ps128 = s
                    break
            if pivot >= 0:
                memcpy(piv, L.row(pivot), n * sizeof(hm_i64))
                L.remove(pivot)
                if hm_sign128(ps128) < 0:
                    for i in range(n):
                        piv[i] = -piv[i]
                    ps = -_narrow(ps128)
                else:
                    ps = _narrow(ps128)
                for k in range(L.count):
                    s = _dot(rowv, L.row(k), n)
                    if hm_sign128(s) != 0:
                        if hm_combine(ps, L.row(k), -_narrow(s), piv, n, L.row(k), tmp):
                            raise OverflowError("line combination exceeds 64 bits")
                        _canonical(L.row(k), n)
                for k in range(R.count):
                    s = _dot(rowv, R.row(k), n)
                    if hm_sign128(s) != 0:
                        if hm_combine(ps, R.row(k), -_narrow(s), piv, n, R.row(k), tmp):
                            raise OverflowError("ray combination exceeds 64 bits")
                if not is_eq:
                    bword = nbits // 64
                    bmask = (<uint64_t> 1) << (nbits % 64)
                    for k in range(R.count):
                        R.mask(k)[bword] |= bmask
                    k = R.push()
                    memcpy(R.row(k), piv, n * sizeof(hm_i64))
                    # the former line saturates every earlier row
                    memset(R.mask(k), 0, nw * sizeof(uint64_t))
                    for i in range(nbits):
                        R.mask(k)[i // 64] |= (<uint64_t> 1) << (i % 64)
                    nbits += 1
                continue

            nr = R.count
            free(signs)
            free(sgn)
            signs = <hm_i64 *> malloc((nr + 1) * sizeof(hm_i64))
            sgn = <int *> malloc((nr + 1) * sizeof(int))
            if signs == NULL or sgn == NULL:
                raise MemoryError()
            any_pos = False
            any_neg = False
            for k in range(nr):
                s = _dot(rowv, R.row(k), n)
                sgn[k] = hm_sign128(s)
                if sgn[k] != 0:
                    signs[k] = _narrow(s)
                else:
                    signs[k] = 0
                if sgn[k] > 0:
                    any_pos = True
                elif sgn[k] < 0:
                    any_neg = True
            if is_eq:
                if not any_pos and not any_neg:
                    continue
            elif not any_neg:
                bword = nbits // 64
                bmask = (<uint64_t> 1) << (nbits % 64)
                for k in range(nr):
                    if sgn[k] == 0:
                        R.mask(k)[bword] |= bmask
                nbits += 1
                continue

            if is_eq:
                bword = 0
                bmask = 0
            else:
                bword = nbits // 64
                bmask = (<uint64_t> 1) << (nbits % 64)
            R2 = _Rows(n, nw, nr + 8)
            for k in range(nr):
                if sgn[k] == 0 or (sgn[k] > 0 and not is_eq):
                    idx = R2.push()
                    memcpy(R2.row(idx), R.row(k), n * sizeof(hm_i64))
                    memcpy(R2.mask(idx), R.mask(k), nw * sizeof(uint64_t))
                    if sgn[k] == 0:
                        R2.mask(idx)[bword] |= bmask
            for p in range(nr):
                if sgn[p] <= 0:
                    continue
                sp = signs[p]
                for q in range(nr):
                    if sgn[q] >= 0:
                        continue
                    for w in range(nw):
                        common[w] = R.mask(p)[w] & R.mask(q)[w]
                    adjacent = True
                    for r in range(nr):
                        if r == p or r == q:
                            continue
                        for w in range(nw):
                            if (R.mask(r)[w] & common[w]) != common[w]:
                                break
                        else:
                            adjacent = False
                            break
                    if adjacent:
                        idx = R2.push()
                        sq = signs[q]
                        if hm_combine(sp, R.row(q), -sq, R.row(p), n, R2.row(idx), tmp):
                            raise OverflowError("ray combination exceeds 64 bits")
                        memcpy(R2.mask(idx), common, nw * sizeof(uint64_t))
                        R2.mask(idx)[bword] |= bmask
            R = R2
            if not is_eq:
                nbits += 1
            if need_point:
                any_point = False
                for k in range(R.count):
                    if R.row(k)[0] > 0:
                        any_point = True
                        break
                if not any_point:
                    return L.to_tuples(), []
        return L.to_tuples(), R.to_tuples()
    finally:
        free(rowv)
        free(piv)
        free(tmp)
        free(signs)
        free(sgn)
        free(common)


def minimize(glines, grays, eqs, ineqs):
    """Drop redundant rows given the generators; see ``_ddpy.minimize``."""
    cdef Py_ssize_t ng = len(grays)
    cdef int n = 0
    if ng:
        n = len(grays[0])
    elif len(ineqs):
        n = len(ineqs[0])
    else:
        return _ddpy.echelon(list(eqs)), [], []
    cdef int gw = (ng + 63) // 64
    if gw == 0:
        gw = 1
    cdef _Rows G = _Rows(n, 0, ng + 1)
    cdef Py_ssize_t k, j, c, nc
    cdef int w
    cdef hm_i128 s
    cdef bint full, sub
    cdef hm_i64 *rowv = <hm_i64 *> malloc(n * sizeof(hm_i64))
    cdef _Rows C = _Rows(n, gw, len(ineqs) + 1)
    cdef uint64_t *mk
    cdef uint64_t *m2
    if rowv == NULL:
        raise MemoryError()
    try:
        for g in grays:
            k = G.push()
            _load(G.row(k), g, n)
        eq_rows = list(eqs)
        cand = []
        seen = set()
        for row in ineqs:
            _load(rowv, row, n)
            k = C.push()
            mk = C.mask(k)
            memset(mk, 0, gw * sizeof(uint64_t))
            for j in range(ng):
                s = _dot(rowv, G.row(j), n)
                if hm_sign128(s) == 0:
                    mk[j // 64] |= (<uint64_t> 1) << (j % 64)
            full = True
            for j in range(ng):
                if not (mk[j // 64] >> (j % 64)) & 1:
                    full = False
                    break
            if full:
                eq_rows.append(row)
                C.count -= 1
                continue
            key = (<char *> mk)[: gw * 8]
            if key in seen:
                C.count -= 1
                continue
            seen.add(key)
            cand.append(row)
        nc = C.count
        kept = []
        csat = []
        for c in range(nc):
            mk = C.mask(c)
            sub = False
            for k in range(nc):
                if k == c:
                    continue
                m2 = C.mask(k)
                # strict subset test: mk & m2 == mk and mk != m2
                for w in range(gw):
                    if (mk[w] & m2[w]) != mk[w]:
                        break
                else:
                    for w in range(gw):
                        if mk[w] != m2[w]:
                            sub = True
                            break
                if sub:
                    break
            if not sub:
                kept.append(cand[c])
                csat.append(int.from_bytes((<char *> mk)[: gw * 8], "little"))
        return _ddpy.echelon(eq_rows), kept, csat
    finally:
        free(rowv)
