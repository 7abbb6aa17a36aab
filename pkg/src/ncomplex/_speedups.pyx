# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled sparse row-echelon kernel; contract identical to _kernel_py."""

cdef class Ops:
    cdef object add(self, a, b):
        raise NotImplementedError
    cdef object sub(self, a, b):
        raise NotImplementedError
    cdef object mul(self, a, b):
        raise NotImplementedError
    cdef object neg(self, a):
        raise NotImplementedError
    cdef object inv(self, a):
        raise NotImplementedError
    cdef bint is_zero(self, a):
        raise NotImplementedError


cdef class RatOps(Ops):
    """Entries are gmpy2.mpq (or Fraction) objects."""

    cdef object add(self, a, b):
        return a + b

    cdef object sub(self, a, b):
        return a - b

    cdef object mul(self, a, b):
        return a * b

    cdef object neg(self, a):
        return -a

    cdef object inv(self, a):
        return 1 / a

    cdef bint is_zero(self, a):
        return not a


cdef class CycOps(Ops):
    """Entries are tuples of rationals mod a cyclotomic polynomial."""

    cdef int degree
    cdef tuple reduction
    cdef object field  # Python Field, used for the rare inversions

    def __init__(self, int degree, tuple reduction, field):
        self.degree = degree
        self.reduction = reduction
        self.field = field

    cdef object add(self, a, b):
        cdef int i, n = self.degree
        cdef list out = [None] * n
        for i in range(n):
            out[i] = a[i] + b[i]
        return tuple(out)

    cdef object sub(self, a, b):
        cdef int i, n = self.degree
        cdef list out = [None] * n
        for i in range(n):
            out[i] = a[i] - b[i]
        return tuple(out)

    cdef object neg(self, a):
        cdef int i, n = self.degree
        cdef list out = [None] * n
        for i in range(n):
            out[i] = -a[i]
        return tuple(out)

    cdef object mul(self, a, b):
        cdef int i, j, k, n = self.degree
        if n == 1:
            return (a[0] * b[0],)
        cdef list prod = [None] * (2 * n - 1)
        for i in range(2 * n - 1):
            prod[i] = 0
        cdef object x, y, c
        for i in range(n):
            x = a[i]
            if x:
                for j in range(n):
                    y = b[j]
                    if y:
                        prod[i + j] = prod[i + j] + x * y
        cdef list out = prod[:n]
        cdef tuple row
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                row = <tuple> self.reduction[k - n]
                for i in range(n):
                    y = row[i]
                    if y:
                        out[i] = out[i] + c * y
        return tuple(out)

    cdef object inv(self, a):
        return self.field.inv(a)

    cdef bint is_zero(self, a):
        cdef int i
        for i in range(self.degree):
            if a[i]:
                return False
        return True


cdef tuple _axpy(list cols_a, list vals_a, object f, list cols_b, list vals_b, Ops ops):
    cdef list out_c = [], out_v = []
    cdef Py_ssize_t i = 0, j = 0, na = len(cols_a), nb = len(cols_b)
    cdef long ca, cb
    cdef object v
    while i < na and j < nb:
        ca = cols_a[i]
        cb = cols_b[j]
        if ca < cb:
            out_c.append(ca)
            out_v.append(vals_a[i])
            i += 1
        elif ca > cb:
            v = ops.neg(ops.mul(f, vals_b[j]))
            if not ops.is_zero(v):
                out_c.append(cb)
                out_v.append(v)
            j += 1
        else:
            v = ops.sub(vals_a[i], ops.mul(f, vals_b[j]))
            if not ops.is_zero(v):
                out_c.append(ca)
                out_v.append(v)
            i += 1
            j += 1
    while i < na:
        out_c.append(cols_a[i])
        out_v.append(vals_a[i])
        i += 1
    while j < nb:
        v = ops.neg(ops.mul(f, vals_b[j]))
        if not ops.is_zero(v):
            out_c.append(cols_b[j])
            out_v.append(v)
        j += 1
    return (out_c, out_v)


def row_echelon(rows, long limit, Ops ops, bint reduced=True):
    cdef dict buckets = {}
    cdef list residual = []
    cdef long serial = 0
    cdef list cols, vals, pc, pv, rc, rv, group
    cdef long c
    cdef object f

    for cols_in, vals_in in rows:
        cols = list(cols_in)
        vals = list(vals_in)
        if not cols:
            continue
        c = cols[0]
        if c >= limit:
            residual.append((cols, vals))
            continue
        if c in buckets:
            (<list> buckets[c]).append((serial, cols, vals))
        else:
            buckets[c] = [(serial, cols, vals)]
        serial += 1

    cdef list pivots = [], erows = []
    cdef Py_ssize_t gi, k
    cdef object piv_inv
    while buckets:
        c = min(buckets)
        group = <list> buckets.pop(c)
        group.sort(key=_group_key)
        pc = (<tuple> group[0])[1]
        pv = (<tuple> group[0])[2]
        piv_inv = ops.inv(pv[0])
        pv = [ops.mul(piv_inv, v) for v in pv]
        pivots.append(c)
        erows.append((pc, pv))
        for gi in range(1, len(group)):
            rc = (<tuple> group[gi])[1]
            rv = (<tuple> group[gi])[2]
            nc, nv = _axpy(rc, rv, rv[0], pc, pv, ops)
            if not nc:
                continue
            c2 = (<list> nc)[0]
            if c2 >= limit:
                residual.append((nc, nv))
                continue
            if c2 in buckets:
                (<list> buckets[c2]).append((serial, nc, nv))
            else:
                buckets[c2] = [(serial, nc, nv)]
            serial += 1

    cdef Py_ssize_t lo, hi, mid, npiv = len(pivots)
    cdef long cpiv
    if reduced:
        for k in range(npiv - 1, 0, -1):
            cpiv = pivots[k]
            pc = (<tuple> erows[k])[0]
            pv = (<tuple> erows[k])[1]
            for gi in range(k):
                rc = (<tuple> erows[gi])[0]
                rv = (<tuple> erows[gi])[1]
                lo = 0
                hi = len(rc)
                while lo < hi:
                    mid = (lo + hi) // 2
                    if <long> rc[mid] < cpiv:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < len(rc) and <long> rc[lo] == cpiv:
                    erows[gi] = _axpy(rc, rv, rv[lo], pc, pv, ops)

    return pivots, erows, residual


def _group_key(t):
    return (len(t[1]), t[0])
