"""N-differential modules: generalized homology H_(m) = ker d^m / im d^(N-m),
Jordan multiplicities, exact hexagons, homotopy criteria, Green-ansatz tensor
products and short exact sequences with connecting homomorphisms."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .fields import Field
from .linalg import (
    EchelonSolver,
    ExactMatrix,
    QuotientSpace,
    Subspace,
    image_basis,
    kernel_basis,
    rank,
)


class NDiffModule:
    """Finite-dimensional vector space with an endomorphism d, d^N = 0."""

    def __init__(self, N, d, check=True):
        if N < 2:
            raise ValueError("N must be >= 2")
        if d.nrows != d.ncols:
            raise ValueError("d must be square")
        self.N = N
        self.d = d
        self.dim = d.nrows
        self.field = d.field
        self._powers = {0: ExactMatrix.identity(self.dim, self.field), 1: d}
        self._image_chain = None
        self._homology = None
        if check and not self.power(N).is_zero():
            raise ValueError(f"d^{N} != 0: not an {N}-differential")

    def power(self, k):
        """d^k, cached."""
        if k not in self._powers:
            self._powers[k] = self.power(k - 1) @ self.d
        return self._powers[k]

    def image_chain(self):
        """Image bases of d^1, ..., d^N computed by shrinking eliminations."""
        if self._image_chain is None:
            chain = []
            B = ExactMatrix.identity(self.dim, self.field)
            for _ in range(self.N):
                B = image_basis(self.d @ B).basis
                chain.append(Subspace(self.dim, B))
            self._image_chain = chain
        return self._image_chain

    def rank_profile(self):
        """[rank d^0, ..., rank d^N] (first = dim, last = 0)."""
        return [self.dim] + [S.dim for S in self.image_chain()]

    def to_json(self):
        return {"N": self.N, "field": self.field.to_json(), "d": self.d.to_json()}

    @staticmethod
    def from_json(obj):
        f = Field.from_json(obj["field"])
        return NDiffModule(obj["N"], ExactMatrix.from_json(obj["d"], field=f))

    def __repr__(self):
        return f"NDiffModule(N={self.N}, dim={self.dim})"


@dataclass
class HomologySlot:
    m: int
    dim_Z: int
    dim_B: int
    dim_H: int
    quotient: QuotientSpace

    @property
    def representatives(self):
        return self.quotient.representatives()


@dataclass
class GeneralizedHomology:
    """Per m in {1..N-1}: Z, B and H data with fixed representative bases."""

    module: NDiffModule
    slots: dict

    def __getitem__(self, m):
        return self.slots[m]

    def dims(self):
        return {m: s.dim_H for m, s in self.slots.items()}


def homology(E):
    """Generalized homology with representatives from the deterministic
    complement rule of the quotient machinery."""
    if E._homology is not None:
        return E._homology
    slots = {}
    images = E.image_chain()
    for m in range(1, E.N):
        Z = kernel_basis(E.power(m))
        B = images[E.N - m - 1]
        q = QuotientSpace(Z, B)
        slots[m] = HomologySlot(m, Z.dim, B.dim, q.dim, q)
        assert q.dim == Z.dim - B.dim >= 0
    E._homology = GeneralizedHomology(E, slots)
    return E._homology


@dataclass
class Multiplicities:
    """Jordan multiplicities m_n of the nilpotent d."""

    counts: dict  # n -> m_n

    def total_dim(self):
        return sum(n * c for n, c in self.counts.items())


def multiplicities(E):
    """m_n = rank d^(n-1) - 2 rank d^n + rank d^(n+1)."""
    r = E.rank_profile() + [0]
    counts = {}
    for n in range(1, E.N + 1):
        m_n = r[n - 1] - 2 * r[n] + r[n + 1]
        if m_n < 0:
            raise AssertionError("inconsistent rank profile")
        counts[n] = m_n
    return Multiplicities(counts)


def proposition4_check(E):
    """dim H_(k) = dim H_(N-k) = sum_{j<=k} sum_{j<=i<=N-j} m_i for k <= N/2,
    comparing the multiplicity formula against direct rank computations."""
    N = E.N
    mult = multiplicities(E)
    assert mult.total_dim() == E.dim
    r = E.rank_profile()
    dims_direct = {m: (E.dim - r[m]) - r[N - m] for m in range(1, N)}
    report = {"ok": True, "N": N, "dim": E.dim, "multiplicities": mult.counts,
              "dims": dims_direct, "formula": {}}
    for k in range(1, N // 2 + 1):
        formula = sum(
            mult.counts[i] for j in range(1, k + 1) for i in range(j, N - j + 1)
        )
        report["formula"][k] = formula
        if not (dims_direct[k] == dims_direct[N - k] == formula):
            report["ok"] = False
    # dimension symmetry for every m
    for m in range(1, N):
        if dims_direct[m] != dims_direct[N - m]:
            report["ok"] = False
    return report


def induced_i(E, m):
    """[i]: H_(m) -> H_(m+1), class of z maps to class of z."""
    if not 1 <= m <= E.N - 2:
        raise ValueError("need 1 <= m <= N-2")
    H = homology(E)
    src, tgt = H[m], H[m + 1]
    cols = []
    for z in src.representatives.columns():
        cols.append(tgt.quotient.coordinates(z))
    return ExactMatrix.from_columns(cols, tgt.dim_H, E.field)


def induced_d(E, m):
    """[d]: H_(m+1) -> H_(m), class of z maps to class of d z."""
    if not 1 <= m <= E.N - 2:
        raise ValueError("need 1 <= m <= N-2")
    H = homology(E)
    src, tgt = H[m + 1], H[m]
    cols = []
    for z in src.representatives.columns():
        cols.append(tgt.quotient.coordinates(E.d.apply(z)))
    return ExactMatrix.from_columns(cols, tgt.dim_H, E.field)


def _compose_chain(mats):
    acc = mats[0]
    for M in mats[1:]:
        acc = M @ acc
    return acc


def induced_i_power(E, m, k):
    """[i]^k: H_(m) -> H_(m+k)."""
    if k == 0:
        return ExactMatrix.identity(homology(E)[m].dim_H, E.field)
    return _compose_chain([induced_i(E, m + j) for j in range(k)])


def induced_d_power(E, m, k):
    """[d]^k: H_(m+k) -> H_(m)."""
    if k == 0:
        return ExactMatrix.identity(homology(E)[m].dim_H, E.field)
    return _compose_chain([induced_d(E, m + k - 1 - j) for j in range(k)])


def exact_at(incoming, outgoing, vertex_dim):
    """im(incoming) = ker(outgoing): composite vanishes and ranks add up."""
    if not (outgoing @ incoming).is_zero():
        return False
    return rank(incoming) == vertex_dim - rank(outgoing)


def hexagon_check(E, ell, m):
    """Exactness of the hexagon of [i]/[d] powers at all six vertices."""
    N = E.N
    if not (ell >= 1 and m >= 1 and ell + m <= N - 1):
        raise ValueError("need ell, m >= 1 and ell + m <= N - 1")
    H = homology(E)
    k = N - (ell + m)
    # vertices in cyclic order with the maps leaving them
    vertices = [m, ell + m, ell, N - m, N - (ell + m), N - ell]
    maps = [
        induced_i_power(E, m, ell),          # H_(m) -> H_(l+m)
        induced_d_power(E, ell, m),          # H_(l+m) -> H_(l)
        induced_i_power(E, ell, k),          # H_(l) -> H_(N-m)
        induced_d_power(E, N - (ell + m), ell),  # H_(N-m) -> H_(N-(l+m))
        induced_i_power(E, N - (ell + m), m),    # -> H_(N-l)
        induced_d_power(E, m, k),            # H_(N-l) -> H_(m)
    ]
    failures = []
    for v in range(6):
        incoming = maps[(v - 1) % 6]
        outgoing = maps[v]
        if not exact_at(incoming, outgoing, H[vertices[v]].dim_H):
            failures.append(vertices[v])
    return {"ok": not failures, "ell": ell, "m": m, "failed_vertices": failures}


def all_hexagons_check(E):
    reports = []
    for ell in range(1, E.N - 1):
        for m in range(1, E.N - ell):
            reports.append(hexagon_check(E, ell, m))
    return {"ok": all(r["ok"] for r in reports), "hexagons": reports}


def homotopy_criterion_lemma3(E, hs):
    """True iff sum_k d^(N-1-k) h_k d^k = Id; if so, all H_(n) vanish (checked)."""
    if len(hs) != E.N:
        raise ValueError("need N homotopy components h_0..h_(N-1)")
    f = E.field
    acc = ExactMatrix.zeros(E.dim, E.dim, f)
    for k, h in enumerate(hs):
        acc = acc + E.power(E.N - 1 - k) @ h @ E.power(k)
    holds = acc == ExactMatrix.identity(E.dim, f)
    if holds:
        assert all(v == 0 for v in homology(E).dims().values())
    return holds


def homotopy_criterion_lemma4(E, h, q):
    """True iff h d - q d h = Id under assumption (A1); if so, homology vanishes."""
    from .fields import check_assumptions

    if check_assumptions(q, E.N, E.field) != "A1":
        raise ValueError("(field, q, N) must satisfy (A1)")
    lhs = (h @ E.d) - (E.d @ h).scale(q)
    holds = lhs == ExactMatrix.identity(E.dim, E.field)
    if holds:
        assert all(v == 0 for v in homology(E).dims().values())
    return holds


def green_tensor(E1, E2):
    """(N'+N''-1)-differential d'ox I + I ox d'' on the tensor product."""
    if E1.field != E2.field:
        raise ValueError("field mismatch")
    f = E1.field
    n1, n2 = E1.dim, E2.dim
    ent = {}
    for (r, c), v in E1.d.entries.items():
        for j in range(n2):
            ent[(r * n2 + j, c * n2 + j)] = v
    for (r, c), v in E2.d.entries.items():
        for i in range(n1):
            key = (i * n2 + r, i * n2 + c)
            s = f.add(ent.get(key, f.zero), v)
            if f.is_zero(s):
                ent.pop(key, None)
            else:
                ent[key] = s
    d = ExactMatrix(n1 * n2, n1 * n2, f, ent, _clean=False)
    return NDiffModule(E1.N + E2.N - 1, d)


# -- quotients and short exact sequences ------------------------------------


def stable_quotient(E, S):
    """Quotient of E by a d-stable subspace S: returns (G, proj, section)."""
    f = E.field
    n = E.dim
    q = QuotientSpace(Subspace.full(n, f), S)
    idx = q.complement_positions
    section = ExactMatrix.from_columns([{i: f.one} for i in idx], n, f)
    proj_cols = []
    for j in range(n):
        proj_cols.append(q.coordinates({j: f.one}))
    proj = ExactMatrix.from_columns(proj_cols, q.dim, f)
    dG = proj @ E.d @ section
    G = NDiffModule(E.N, dG)
    return G, proj, section


def submodule(E, S):
    """Restriction of d to a stable subspace S in its own coordinates."""
    sol = S.solver()
    cols = []
    for col in S.basis.columns():
        c = sol.solve(E.d.apply(col))
        if c is None:
            raise ValueError("subspace is not d-stable")
        cols.append(c)
    dE = ExactMatrix.from_columns(cols, S.dim, E.field)
    return NDiffModule(E.N, dE)


@dataclass
class ShortExactSequence:
    """0 -> E -phi-> F -psi-> G -> 0 of N-differential modules."""

    E: NDiffModule
    F: NDiffModule
    G: NDiffModule
    phi: ExactMatrix
    psi: ExactMatrix
    _psi_solver: object = dc_field(default=None, repr=False)
    _phi_solver: object = dc_field(default=None, repr=False)

    def validate(self):
        if not (self.E.N == self.F.N == self.G.N):
            raise ValueError("mixed N")
        if rank(self.phi) != self.E.dim:
            raise ValueError("phi is not injective")
        if rank(self.psi) != self.G.dim:
            raise ValueError("psi is not surjective")
        if not (self.psi @ self.phi).is_zero():
            raise ValueError("psi o phi != 0")
        if self.E.dim + self.G.dim != self.F.dim:
            raise ValueError("im phi != ker psi (dimension count)")
        if (self.phi @ self.E.d) != (self.F.d @ self.phi):
            raise ValueError("phi is not a chain map")
        if (self.psi @ self.F.d) != (self.G.d @ self.psi):
            raise ValueError("psi is not a chain map")
        return True

    def psi_solver(self):
        if self._psi_solver is None:
            self._psi_solver = EchelonSolver(self.psi)
        return self._psi_solver

    def phi_solver(self):
        if self._phi_solver is None:
            self._phi_solver = EchelonSolver(self.phi)
        return self._phi_solver

    def connect_vector(self, z, m, lift_shift=None):
        """partial applied to one cycle z in Z_(m)(G): lift, apply d^m, pull
        back through phi; returns the representative x in E-coordinates."""
        y = self.psi_solver().solve(z)
        assert y is not None, "psi must be surjective"
        if lift_shift is not None:
            y = _vec_add(y, lift_shift, self.F.field)
        w = self.F.power(m).apply(y)
        x = self.phi_solver().solve(w)
        if x is None:
            raise AssertionError("d^m of the lift left the image of phi")
        if self.E.power(self.E.N - m).apply(x):
            raise AssertionError("connecting image is not a (N-m)-cycle")
        return x


def _vec_add(a, b, f):
    out = dict(a)
    for j, v in b.items():
        s = f.add(out.get(j, f.zero), v)
        if f.is_zero(s):
            out.pop(j, None)
        else:
            out[j] = s
    return out


def ses_connecting(ses, m):
    """Matrix of partial: H_(m)(G) -> H_(N-m)(E) in the representative bases."""
    HG = homology(ses.G)[m]
    HE = homology(ses.E)[ses.E.N - m]
    cols = []
    for z in HG.representatives.columns():
        x = ses.connect_vector(z, m)
        cols.append(HE.quotient.coordinates(x))
    return ExactMatrix.from_columns(cols, HE.dim_H, ses.E.field)


def connecting_well_defined(ses, m, rng, trials=10):
    """Re-lift each representative with random kernel shifts; the class of the
    connecting image must not move."""
    HG = homology(ses.G)[m]
    HE = homology(ses.E)[ses.E.N - m]
    ker_psi = kernel_basis(ses.psi)
    f = ses.F.field
    for z in HG.representatives.columns():
        base = HE.quotient.coordinates(ses.connect_vector(z, m))
        for _ in range(trials):
            if ker_psi.dim == 0:
                break
            shift = {}
            for col in ker_psi.basis.columns():
                c = f.from_rat(rng.randint(-3, 3))
                if not f.is_zero(c):
                    for i, v in col.items():
                        shift[i] = f.add(shift.get(i, f.zero), f.mul(c, v))
            x = ses.connect_vector(z, m, lift_shift=shift)
            if HE.quotient.coordinates(x) != base:
                return False
    return True


def induced_map_on_homology(M, src_module, tgt_module, m):
    """H_(m)(src) -> H_(m)(tgt) induced by a chain map M."""
    Hs = homology(src_module)[m]
    Ht = homology(tgt_module)[m]
    cols = []
    for z in Hs.representatives.columns():
        cols.append(Ht.quotient.coordinates(M.apply(z)))
    return ExactMatrix.from_columns(cols, Ht.dim_H, tgt_module.field)


def ses_hexagon_check(ses):
    """Exactness of the hexagon (H_n) for each n in {1..N-1}."""
    ses.validate()
    N = ses.E.N
    HE, HF, HG = homology(ses.E), homology(ses.F), homology(ses.G)
    failures = []
    for n in range(1, N):
        maps = [
            induced_map_on_homology(ses.phi, ses.E, ses.F, n),
            induced_map_on_homology(ses.psi, ses.F, ses.G, n),
            ses_connecting(ses, n),
            induced_map_on_homology(ses.phi, ses.E, ses.F, N - n),
            induced_map_on_homology(ses.psi, ses.F, ses.G, N - n),
            ses_connecting(ses, N - n),
        ]
        dims = [
            HF[n].dim_H,
            HG[n].dim_H,
            HE[N - n].dim_H,
            HF[N - n].dim_H,
            HG[N - n].dim_H,
            HE[n].dim_H,
        ]
        for v in range(6):
            if not exact_at(maps[v], maps[(v + 1) % 6], dims[v]):
                failures.append((n, v))
    return {"ok": not failures, "failures": failures}


# -- random instances -------------------------------------------------------


def jordan_block(n, field):
    """D_n: superdiagonal ones, d e_(i+1) = e_i."""
    one = field.one
    ent = {(i, i + 1): one for i in range(n - 1)}
    return ExactMatrix(n, n, field, ent, _clean=False)


def block_module(field, N, block_sizes):
    """Direct sum of Jordan blocks D_n (n <= N)."""
    total = sum(block_sizes)
    ent = {}
    off = 0
    for n in block_sizes:
        for i in range(n - 1):
            ent[(off + i, off + i + 1)] = field.one
        off += n
    return NDiffModule(N, ExactMatrix(total, total, field, ent, _clean=False))


def random_unimodular(n, field, rng, nops=None):
    """Product of elementary shears and swaps; returns (P, P_inverse)."""
    if nops is None:
        nops = n + 8
    ops = []
    for _ in range(nops):
        if rng.random() < 0.25:
            i, j = rng.sample(range(n), 2) if n >= 2 else (0, 0)
            ops.append(("swap", i, j, 0))
        else:
            i, j = rng.sample(range(n), 2) if n >= 2 else (0, 0)
            ops.append(("shear", i, j, rng.choice((-1, 1))))

    def apply_ops(sequence):
        rows = [{k: field.one} for k in range(n)]
        for kind, i, j, c in sequence:
            if i == j:
                continue
            if kind == "swap":
                rows[i], rows[j] = rows[j], rows[i]
            else:
                cc = field.from_rat(c)
                for col, v in rows[j].items():
                    s = field.add(rows[i].get(col, field.zero), field.mul(cc, v))
                    if field.is_zero(s):
                        rows[i].pop(col, None)
                    else:
                        rows[i][col] = s
        ent = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                ent[(r, c)] = v
        return ExactMatrix(n, n, field, ent, _clean=False)

    P = apply_ops(ops)
    inv_ops = [
        (kind, i, j, -c if kind == "shear" else 0)
        for kind, i, j, c in reversed(ops)
    ]
    Pinv = apply_ops(inv_ops)
    return P, Pinv


def random_ndiff(field, N, dim, rng):
    """Conjugated direct sum of D_n blocks; returns (module, multiplicities).

    d^N = 0 holds by construction and the block sizes are the ground truth
    Jordan data."""
    sizes = []
    left = dim
    while left > 0:
        n = rng.randint(1, min(N, left))
        sizes.append(n)
        left -= n
    rng.shuffle(sizes)
    base = block_module(field, N, sizes)
    P, Pinv = random_unimodular(dim, field, rng)
    d = P @ base.d @ Pinv
    mod = NDiffModule(N, d, check=False)  # nilpotency by construction
    truth = {n: sizes.count(n) for n in range(1, N + 1)}
    return mod, truth


def random_stable_subspace(E, rng, nseeds=2):
    """Span of d-orbits of random vectors: d-stable by construction."""
    f = E.field
    cols = []
    for _ in range(nseeds):
        v = {i: f.from_rat(rng.randint(-2, 2)) for i in range(E.dim)}
        v = {i: c for i, c in v.items() if not f.is_zero(c)}
        for k in range(E.N):
            w = v
            for _ in range(k):
                w = E.d.apply(w)
            if w:
                cols.append(w)
    if not cols:
        return None
    return image_basis(ExactMatrix.from_columns(cols, E.dim, f))


def random_ses(field, N, rng, dim_range=(6, 14)):
    """Random SES 0 -> E -> F -> G -> 0 with E a stable subspace of F."""
    while True:
        dim = rng.randint(*dim_range)
        F, _ = random_ndiff(field, N, dim, rng)
        S = random_stable_subspace(F, rng)
        if S is None or S.dim == 0 or S.dim == F.dim:
            continue
        E = submodule(F, S)
        G, proj, _ = stable_quotient(F, S)
        ses = ShortExactSequence(E, F, G, S.basis, proj)
        ses.validate()
        return ses
