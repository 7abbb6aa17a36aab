"""Exact sparse linear algebra over a Field: rank, kernel/image bases, solving,
subspaces and quotients with deterministic representative choices."""

from __future__ import annotations

from . import kernel
from .fields import Field


class ExactMatrix:
    """Immutable-by-convention sparse matrix; stored entries are nonzero."""

    __slots__ = ("nrows", "ncols", "field", "entries")

    def __init__(self, nrows, ncols, field, entries=None, _clean=True):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        if entries is None:
            entries = {}
        if _clean:
            entries = {
                rc: v for rc, v in entries.items() if not field.is_zero(v)
            }
        self.entries = entries

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zeros(nrows, ncols, field):
        return ExactMatrix(nrows, ncols, field, {}, _clean=False)

    @staticmethod
    def identity(n, field):
        one = field.one
        return ExactMatrix(n, n, field, {(i, i): one for i in range(n)}, _clean=False)

    @staticmethod
    def from_rows(rows, field, ncols=None):
        """rows: list of lists of scalars."""
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        ent = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if not field.is_zero(v):
                    ent[(i, j)] = v
        return ExactMatrix(nrows, ncols, field, ent, _clean=False)

    @staticmethod
    def from_columns(cols, nrows, field):
        """cols: list of sparse dicts {row: scalar}."""
        ent = {}
        for j, col in enumerate(cols):
            for i, v in col.items():
                if not field.is_zero(v):
                    ent[(i, j)] = v
        return ExactMatrix(nrows, len(cols), field, ent, _clean=False)

    @staticmethod
    def from_int_rows(rows, field, ncols=None):
        conv = field.from_rat
        return ExactMatrix.from_rows(
            [[conv(v) for v in row] for row in rows], field, ncols
        )

    # -- basic inspection --------------------------------------------------

    def __getitem__(self, rc):
        return self.entries.get(rc, self.field.zero)

    def column(self, j):
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def columns(self):
        cols = [dict() for _ in range(self.ncols)]
        for (r, c), v in self.entries.items():
            cols[c][r] = v
        return cols

    def rows_sparse(self):
        """Rows as (sorted cols, vals) pairs, for the kernel."""
        rows = [[] for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r].append((c, v))
        out = []
        for items in rows:
            items.sort()
            out.append(([c for c, _ in items], [v for _, v in items]))
        return out

    def is_zero(self):
        return not self.entries

    def nnz(self):
        return len(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.field == other.field
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        f = self.field
        ent = dict(self.entries)
        for rc, v in other.entries.items():
            s = f.add(ent.get(rc, f.zero), v)
            if f.is_zero(s):
                ent.pop(rc, None)
            else:
                ent[rc] = s
        return ExactMatrix(self.nrows, self.ncols, f, ent, _clean=False)

    def __sub__(self, other):
        return self + other.scale(self.field.neg(self.field.one))

    def scale(self, s):
        f = self.field
        if f.is_zero(s):
            return ExactMatrix.zeros(self.nrows, self.ncols, f)
        return ExactMatrix(
            self.nrows,
            self.ncols,
            f,
            {rc: f.mul(s, v) for rc, v in self.entries.items()},
            _clean=False,
        )

    def __matmul__(self, other):
        assert self.ncols == other.nrows, "shape mismatch"
        f = self.field
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        ent = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                rc = (r, c)
                s = f.add(ent.get(rc, f.zero), f.mul(a, b))
                ent[rc] = s
        return ExactMatrix(self.nrows, other.ncols, f, ent)

    def __mul__(self, other):
        return self.__matmul__(other)

    def power(self, k):
        assert self.nrows == self.ncols
        acc = ExactMatrix.identity(self.nrows, self.field)
        for _ in range(k):
            acc = acc @ self
        return acc

    def transpose(self):
        return ExactMatrix(
            self.ncols,
            self.nrows,
            self.field,
            {(c, r): v for (r, c), v in self.entries.items()},
            _clean=False,
        )

    def apply(self, vec):
        """Matrix times sparse column vector {index: scalar}."""
        f = self.field
        out = {}
        cols = {}
        for (r, c), v in self.entries.items():
            cols.setdefault(c, []).append((r, v))
        for j, x in vec.items():
            if f.is_zero(x):
                continue
            for r, v in cols.get(j, ()):
                s = f.add(out.get(r, f.zero), f.mul(v, x))
                if f.is_zero(s):
                    out.pop(r, None)
                else:
                    out[r] = s
        return out

    def hstack(self, other):
        assert self.nrows == other.nrows
        ent = dict(self.entries)
        off = self.ncols
        for (r, c), v in other.entries.items():
            ent[(r, c + off)] = v
        return ExactMatrix(self.nrows, off + other.ncols, self.field, ent, _clean=False)

    def vstack(self, other):
        assert self.ncols == other.ncols
        ent = dict(self.entries)
        off = self.nrows
        for (r, c), v in other.entries.items():
            ent[(r + off, c)] = v
        return ExactMatrix(off + other.nrows, self.ncols, self.field, ent, _clean=False)

    def take_columns(self, js):
        ent = {}
        pos = {j: k for k, j in enumerate(js)}
        for (r, c), v in self.entries.items():
            if c in pos:
                ent[(r, pos[c])] = v
        return ExactMatrix(self.nrows, len(js), self.field, ent, _clean=False)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        items = sorted(self.entries.items())
        return {
            "rows": self.nrows,
            "cols": self.ncols,
            "field": self.field.to_json(),
            "entries": [[r, c, self.field.to_str(v)] for (r, c), v in items],
        }

    @staticmethod
    def from_json(obj, field=None):
        f = field or Field.from_json(obj["field"])
        ent = {}
        for r, c, s in obj["entries"]:
            ent[(r, c)] = f.parse(s)
        return ExactMatrix(obj["rows"], obj["cols"], f, ent)


# -- elimination-backed operations ---------------------------------------


def _echelon(M, reduced=True):
    return kernel.row_echelon(M.rows_sparse(), M.ncols, M.field, reduced=reduced)


def rank(M):
    pivots, _, _ = _echelon(M, reduced=False)
    return len(pivots)


def pivot_columns(M):
    pivots, _, _ = _echelon(M, reduced=False)
    return pivots


def kernel_basis(M):
    """Right kernel as a Subspace of the column-index space; deterministic
    free-variable parametrization of the RREF."""
    f = M.field
    pivots, erows, _ = _echelon(M, reduced=True)
    piv_set = set(pivots)
    free = [j for j in range(M.ncols) if j not in piv_set]
    cols = []
    for fc in free:
        col = {fc: f.one}
        for p, (rc, rv) in zip(pivots, erows):
            lo, hi = 0, len(rc)
            while lo < hi:
                mid = (lo + hi) // 2
                if rc[mid] < fc:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < len(rc) and rc[lo] == fc:
                col[p] = f.neg(rv[lo])
        cols.append(col)
    return Subspace(M.ncols, ExactMatrix.from_columns(cols, M.ncols, f))


def image_basis(M):
    """Column space: the original columns at the pivot positions."""
    piv = pivot_columns(M)
    return Subspace(M.nrows, M.take_columns(piv))


def row_space_rank(M):
    return rank(M)


def solve(M, b):
    """One solution x of M x = b (sparse dict b), or None."""
    sol = EchelonSolver(M)
    return sol.solve(b)


class EchelonSolver:
    """RREF of [M | I]; supports repeated solves M x = b."""

    def __init__(self, M):
        self.M = M
        f = self.field = M.field
        rows = []
        sparse = M.rows_sparse()
        for i, (cols, vals) in enumerate(sparse):
            rows.append((cols + [M.ncols + i], vals + [f.one]))
        pivots, erows, residual = kernel.row_echelon(
            rows, M.ncols, f, reduced=True
        )
        self.pivots = pivots
        self.rank = len(pivots)
        split = M.ncols
        self.main = []
        self.aug = []
        for rc, rv in erows:
            k = 0
            while k < len(rc) and rc[k] < split:
                k += 1
            self.main.append((rc[:k], rv[:k]))
            self.aug.append(
                {c - split: v for c, v in zip(rc[k:], rv[k:])}
            )
        self.res_aug = [
            {c - split: v for c, v in zip(rc, rv) if c >= split}
            for rc, rv in residual
        ]

    def _dot(self, aug, b):
        f = self.field
        acc = f.zero
        if len(aug) < len(b):
            for j, t in aug.items():
                x = b.get(j)
                if x is not None:
                    acc = f.add(acc, f.mul(t, x))
        else:
            for j, x in b.items():
                t = aug.get(j)
                if t is not None:
                    acc = f.add(acc, f.mul(t, x))
        return acc

    def solve(self, b):
        """Particular solution with free variables set to zero, or None."""
        f = self.field
        for aug in self.res_aug:
            if not f.is_zero(self._dot(aug, b)):
                return None
        x = {}
        for p, aug in zip(self.pivots, self.aug):
            v = self._dot(aug, b)
            if not f.is_zero(v):
                x[p] = v
        # verify: guards against inconsistent rows that were fully eliminated
        Mx = self.M.apply(x)
        for j, v in b.items():
            if not f.is_zero(f.sub(Mx.pop(j, f.zero), v)):
                return None
        if any(not f.is_zero(v) for v in Mx.values()):
            return None
        return x

    def in_image(self, b):
        return self.solve(b) is not None


class Subspace:
    """A subspace given by a basis matrix with independent columns."""

    def __init__(self, ambient_dim, basis):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self._solver = None

    @staticmethod
    def full(n, field):
        return Subspace(n, ExactMatrix.identity(n, field))

    @staticmethod
    def zero(n, field):
        return Subspace(n, ExactMatrix.zeros(n, 0, field))

    @property
    def dim(self):
        return self.basis.ncols

    @property
    def field(self):
        return self.basis.field

    def solver(self):
        if self._solver is None:
            self._solver = EchelonSolver(self.basis)
        return self._solver

    def coordinates(self, v):
        """Coordinates of sparse vector v in this basis, or None."""
        return self.solver().solve(v)

    def contains(self, v):
        return self.coordinates(v) is not None

    def contains_subspace(self, other):
        return all(self.contains(col) for col in other.basis.columns())

    def column_vectors(self):
        return self.basis.columns()

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def intersection(S1, S2):
    """S1 cap S2 via the kernel of [B1 | -B2]."""
    f = S1.field
    B1, B2 = S1.basis, S2.basis
    stacked = B1.hstack(B2.scale(f.neg(f.one)))
    K = kernel_basis(stacked)
    cols = []
    for kcol in K.basis.columns():
        part = {j: v for j, v in kcol.items() if j < B1.ncols}
        cols.append(B1.apply(part))
    mat = ExactMatrix.from_columns(cols, S1.ambient_dim, f)
    return image_basis(mat)


def sum_spaces(S1, S2):
    return image_basis(S1.basis.hstack(S2.basis))


class QuotientSpace:
    """Z / B with the deterministic complement rule: complement positions are
    the Z-coordinate indices missed by the pivots of B's coordinate matrix,
    so representatives are actual basis columns of Z."""

    def __init__(self, Z, B):
        if B.ambient_dim != Z.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        self.Z = Z
        self.B = B
        f = Z.field
        zdim = Z.dim
        bcols = []
        for col in B.basis.columns():
            coords = Z.coordinates(col)
            if coords is None:
                raise ValueError("B is not contained in Z")
            bcols.append(coords)
        B_in_Z = ExactMatrix.from_columns(bcols, zdim, f)
        # coordinate positions covered by B: pivot columns of the row space
        piv = set(pivot_columns(B_in_Z.transpose()))
        self.complement_positions = [i for i in range(zdim) if i not in piv]
        self.dim = len(self.complement_positions)
        comp_cols = [{i: f.one} for i in self.complement_positions]
        full = B_in_Z.hstack(ExactMatrix.from_columns(comp_cols, zdim, f))
        self._full_solver = EchelonSolver(full)
        self._bdim = B_in_Z.ncols
        self.field = f

    def representatives(self):
        """Columns of Z's basis at the complement positions (ambient coords)."""
        return self.Z.basis.take_columns(self.complement_positions)

    def coordinates(self, v):
        """Class of v (must lie in Z) in the representative basis."""
        vz = self.Z.coordinates(v)
        if vz is None:
            raise ValueError("vector not in Z")
        sol = self._full_solver.solve(vz)
        assert sol is not None
        out = {}
        for k in range(self.dim):
            c = sol.get(self._bdim + k)
            if c is not None:
                out[k] = c
        return out


def quotient_coordinates(Z, B, v):
    return QuotientSpace(Z, B).coordinates(v)
