"""Finitely presented graded D-modules, realized degree by degree.

Every graded degree of D is free of rank 1 over the coefficient ring, so each
graded piece of a finitely presented module, each slice of a homogeneous map,
and each syzygy computation is a finite exact linear-algebra problem over the
coefficient ring.  All operations here work degreewise up to an explicit
horizon and tag their results with it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coeff_rings import (
    ExactMatrix,
    IntegersModRing,
    ModuleInvariants,
    PreconditionError,
    Ring,
    SpanReducer,
    ZZ,
    cokernel_invariants,
    homology_invariants,
    kernel_basis,
    smith_normal_form,
    solve_columns,
)
from .gdpa import AlgebraContext, GdpaElement


def default_horizon(max_relation_degree: int) -> int:
    return 4 * (max_relation_degree + 1)


# ---------------------------------------------------------------------------
# free modules, homogeneous maps, presentations
# ---------------------------------------------------------------------------


class FreeGradedModule:
    """A free graded D-module with listed generator degrees.

    The degree-d piece is free over the coefficient ring with one basis
    element x^[d - g_i] e_i for each generator with g_i <= d.
    """

    def __init__(self, context: AlgebraContext, generator_degrees):
        self.context = context
        self.degrees = tuple(int(g) for g in generator_degrees)

    @property
    def n_gens(self) -> int:
        return len(self.degrees)

    def basis(self, d: int):
        """[(generator index, monomial shift)] for the degree-d piece."""
        return [(i, d - g) for i, g in enumerate(self.degrees) if g <= d]

    def rank(self, d: int) -> int:
        return sum(1 for g in self.degrees if g <= d)

    def shifted(self, by: int) -> "FreeGradedModule":
        return FreeGradedModule(self.context, [g + by for g in self.degrees])


class ModuleMap:
    """A homogeneous map of free graded modules, one GdpaElement column per
    source generator: e_j maps to the sum over i of column[j][i] * e_i.

    Entry (i, j) must be a monomial of pure degree source_deg_j - target_deg_i
    (graded pieces of D have rank 1) or absent.
    """

    def __init__(self, source: FreeGradedModule, target: FreeGradedModule, columns):
        if source.context is not target.context:
            raise PreconditionError("source/target context mismatch")
        self.source = source
        self.target = target
        self.context = source.context
        self.columns = []
        for j, col in enumerate(columns):
            clean = {}
            for i, e in col.items():
                i = int(i)
                if e.is_zero:
                    continue
                t = source.degrees[j] - target.degrees[i]
                if e.degrees() != [t]:
                    raise PreconditionError(
                        f"entry ({i},{j}) must be homogeneous of degree {t}"
                    )
                clean[i] = e
            self.columns.append(clean)
        if len(self.columns) != source.n_gens:
            raise PreconditionError("one column per source generator required")

    @classmethod
    def zero(cls, source: FreeGradedModule, target: FreeGradedModule) -> "ModuleMap":
        return cls(source, target, [{} for _ in range(source.n_gens)])

    def slice(self, d: int) -> ExactMatrix:
        """The degree-d piece as a matrix over the coefficient ring.

        Rows are the target basis at degree d, columns the source basis.
        The basis vector x^[s] e_j maps to sum_i coeff * C(d - g_i, t) times
        x^[d - g_i] e_i, where the (i, j) entry is coeff * x^[t].
        """
        ctx = self.context
        R = ctx.ring
        tbasis = self.target.basis(d)
        sbasis = self.source.basis(d)
        row_of = {i: r for r, (i, _) in enumerate(tbasis)}
        m = ExactMatrix.zero(R, len(tbasis), len(sbasis))
        for c, (j, _s) in enumerate(sbasis):
            for i, e in self.columns[j].items():
                t = self.source.degrees[j] - self.target.degrees[i]
                coeff = R.mul(e.coeff(t), ctx.C(d - self.target.degrees[i], t))
                if not R.is_zero(coeff):
                    m.entries[row_of[i]][c] = coeff
        return m

    def constant_slice(self, d: int) -> ExactMatrix:
        """The degree-d piece of the map tensored with k = D/D_+.

        Rows/columns are generators of degree exactly d; entries are the
        degree-0 (scalar) components."""
        R = self.context.ring
        trows = [i for i, g in enumerate(self.target.degrees) if g == d]
        scols = [j for j, g in enumerate(self.source.degrees) if g == d]
        m = ExactMatrix.zero(R, len(trows), len(scols))
        for c, j in enumerate(scols):
            for r, i in enumerate(trows):
                e = self.columns[j].get(i)
                if e is not None:
                    m.entries[r][c] = e.coeff(0)
        return m

    def apply_to_basis_vector(self, d: int, v):
        """Image (as a coordinate vector on target basis at d) of the degree-d
        source vector with coordinates v."""
        return self.slice(d).apply_vector(v)

    def to_json(self):
        return {
            "source_degrees": list(self.source.degrees),
            "target_degrees": list(self.target.degrees),
            "columns": [
                {str(i): e.to_json() for i, e in col.items()} for col in self.columns
            ],
        }


class PresentedModule:
    """A finitely presented graded module F0 / im(F1 -> F0)."""

    def __init__(self, generators: FreeGradedModule, relations: ModuleMap):
        if relations.target is not generators:
            raise PreconditionError("relations must target the generator module")
        self.generators = generators
        self.relations = relations
        self.context = generators.context

    @classmethod
    def from_columns(cls, context, gen_degrees, relation_columns, relation_degrees):
        """relation_columns: list of dicts {gen index: GdpaElement}."""
        f0 = FreeGradedModule(context, gen_degrees)
        f1 = FreeGradedModule(context, relation_degrees)
        return cls(f0, ModuleMap(f1, f0, relation_columns))

    @classmethod
    def free(cls, context, gen_degrees) -> "PresentedModule":
        f0 = FreeGradedModule(context, gen_degrees)
        f1 = FreeGradedModule(context, [])
        return cls(f0, ModuleMap(f1, f0, []))

    @property
    def n_relations(self) -> int:
        return self.relations.source.n_gens

    def min_degree(self) -> int:
        return min(self.generators.degrees, default=0)

    def max_presentation_degree(self) -> int:
        degs = self.generators.degrees + self.relations.source.degrees
        return max(degs, default=0)

    def graded_piece(self, d: int) -> "GradedPieceRealization":
        m = self.relations.slice(d)
        return GradedPieceRealization(
            degree=d,
            presentation_matrix=m,
            invariants=cokernel_invariants(m),
            basis_labels=self.generators.basis(d),
        )

    def piece_invariants(self, d: int) -> ModuleInvariants:
        return cokernel_invariants(self.relations.slice(d))

    def to_json(self):
        return {
            "context": self.context.pi.to_json(),
            "generators": list(self.generators.degrees),
            "relation_degrees": list(self.relations.source.degrees),
            "relations": [
                {str(i): e.to_json() for i, e in col.items()}
                for col in self.relations.columns
            ],
        }

    @classmethod
    def from_json(cls, context: AlgebraContext, obj) -> "PresentedModule":
        f0 = FreeGradedModule(context, obj["generators"])
        f1 = FreeGradedModule(context, obj["relation_degrees"])
        cols = [
            {int(i): GdpaElement.from_json(context, e) for i, e in col.items()}
            for col in obj["relations"]
        ]
        return cls(f0, ModuleMap(f1, f0, cols))


@dataclass
class GradedPieceRealization:
    degree: int
    presentation_matrix: ExactMatrix
    invariants: ModuleInvariants
    basis_labels: list

    def to_json(self):
        return {
            "degree": self.degree,
            "invariants": self.invariants.to_json(),
            "basis": [list(b) for b in self.basis_labels],
        }


def trivial_module(context: AlgebraContext, horizon: int) -> PresentedModule:
    """k = D / D_+, presented with the relations x^[j] for the degrees j
    where pi_j is not a unit (horizon-limited: relations up to the horizon)."""
    degs = context.dplus_generator_degrees(horizon)
    cols = [{0: context.x(j)} for j in degs]
    return PresentedModule.from_columns(context, [0], cols, degs)


def principal_special_module(context, ideal_gens, h: int, shift: int = 0):
    """M(a, h)[-shift] = (D/aD)^(h), regraded: one generator in degree shift,
    relations a*e for each ideal generator and x^[j] e for 0 < j < h
    (so nonzero pieces sit at shift + multiples of h, each one k/a)."""
    R = context.ring
    cols = []
    degs = []
    for a in ideal_gens:
        cols.append({0: context.x(0, a)})
        degs.append(shift)
    for j in range(1, h):
        cols.append({0: context.x(j)})
        degs.append(shift + j)
    return PresentedModule.from_columns(context, [shift], cols, degs)


# ---------------------------------------------------------------------------
# incremental lattice / span arithmetic over the coefficient ring
# ---------------------------------------------------------------------------


class _Echelon:
    """Incremental triangular basis of a submodule of R^dim, over a ring with
    a division algorithm (fields, Z, Z_(p))."""

    def __init__(self, ring: Ring, dim: int):
        self.ring = ring
        self.dim = dim
        self.rows: dict[int, list] = {}  # pivot index -> vector

    def insert(self, v) -> bool:
        R = self.ring
        v = [R.canon(x) for x in v]
        changed = False
        for p in range(self.dim):
            if R.is_zero(v[p]):
                continue
            if p not in self.rows:
                self.rows[p] = v
                return True
            r = self.rows[p]
            while not R.is_zero(v[p]):
                q, _ = R.quo_rem(v[p], r[p])
                if not R.is_zero(q):
                    v = [R.sub(v[t], R.mul(q, r[t])) for t in range(self.dim)]
                if R.is_zero(v[p]):
                    break
                # remainder step did not clear the pivot: swap to shrink it
                self.rows[p], v = v, r
                r = self.rows[p]
                changed = True
        return changed

    def contains(self, v) -> bool:
        R = self.ring
        v = [R.canon(x) for x in v]
        for p in range(self.dim):
            if R.is_zero(v[p]):
                continue
            r = self.rows.get(p)
            if r is None or not R.divides(r[p], v[p]):
                return False
            q = R.exact_div(v[p], r[p])
            v = [R.sub(v[t], R.mul(q, r[t])) for t in range(self.dim)]
        return True

    def basis_columns(self):
        return [self.rows[p][:] for p in sorted(self.rows)]

    def coords(self, v):
        """Coordinates of v in basis_columns order, or None."""
        R = self.ring
        v = [R.canon(x) for x in v]
        pivots = sorted(self.rows)
        out = [R.zero()] * len(pivots)
        for k, p in enumerate(pivots):
            if R.is_zero(v[p]):
                continue
            r = self.rows[p]
            if not R.divides(r[p], v[p]):
                return None
            q = R.exact_div(v[p], r[p])
            out[k] = q
            v = [R.sub(v[t], R.mul(q, r[t])) for t in range(self.dim)]
        if any(not R.is_zero(x) for x in v):
            return None
        return out


def _lift_int(v):
    return [int(x) for x in v]


class _SliceQuotient:
    """The quotient K_d / G_d of a graded slice of a submodule by the slice
    generated from below; extracts minimal new generators.

    kernel_vectors generate K_d; old_vectors generate G_d subset K_d.
    Over Z/n everything is lifted to integer lattices containing n Z^dim.
    """

    def __init__(self, ring: Ring, dim: int, kernel_vectors, old_vectors):
        self.ring = ring
        self.dim = dim
        self.kernel_vectors = kernel_vectors
        self.old_vectors = old_vectors

    def new_generators(self):
        R = self.ring
        dim = self.dim
        if R.is_field:
            span = SpanReducer(R, dim)
            for v in self.old_vectors:
                span.add(v)
            return [v for v in self.kernel_vectors if span.add(v)]
        if isinstance(R, IntegersModRing):
            return self._new_generators_lifted()
        # PID case (Z, Z_(p))
        kspan = _Echelon(R, dim)
        for v in self.kernel_vectors:
            kspan.insert(v)
        old = _Echelon(R, dim)
        for v in self.old_vectors:
            old.insert(v)
        if all(old.contains(v) for v in self.kernel_vectors):
            return []
        basis = kspan.basis_columns()
        coords = []
        for v in self.old_vectors:
            c = kspan.coords(v)
            if c is None:
                raise AssertionError("old vectors must lie in the kernel slice")
            coords.append(c)
        return self._cokernel_lift(R, basis, coords, len(basis))

    def _new_generators_lifted(self):
        R = self.ring
        n = R.n
        dim = self.dim
        lat = _Echelon(ZZ, dim)
        for i in range(dim):
            lat.insert([n if t == i else 0 for t in range(dim)])
        for v in self.kernel_vectors:
            lat.insert(_lift_int(v))
        old = _Echelon(ZZ, dim)
        for i in range(dim):
            old.insert([n if t == i else 0 for t in range(dim)])
        for v in self.old_vectors:
            old.insert(_lift_int(v))
        if all(old.contains(_lift_int(v)) for v in self.kernel_vectors):
            return []
        basis = lat.basis_columns()
        coords = []
        for v in self.old_vectors:
            coords.append(lat.coords(_lift_int(v)))
        for i in range(dim):
            coords.append(lat.coords([n if t == i else 0 for t in range(dim)]))
        lifted = self._cokernel_lift(ZZ, basis, coords, len(basis))
        out = []
        for v in lifted:
            w = [R.canon(x) for x in v]
            if any(not R.is_zero(x) for x in w):
                out.append(w)
        return out

    def _cokernel_lift(self, R, basis, coords, r):
        """Minimal generators of R^r / (column span of coords), lifted through
        the basis columns of the kernel slice."""
        if not coords:
            return [b[:] for b in basis]
        X = ExactMatrix(R, [[c[i] for c in coords] for i in range(r)], r, len(coords))
        U, D, _ = smith_normal_form(X)
        Uinv = solve_columns(U, ExactMatrix.identity(R, r))
        out = []
        for i in range(r):
            di = D.entries[i][i] if i < min(D.rows, D.cols) else R.zero()
            if not R.is_unit(di):
                vec = [R.zero()] * self.dim
                for t in range(r):
                    c = Uinv.entries[t][i]
                    if not R.is_zero(c):
                        for s in range(self.dim):
                            vec[s] = R.add(vec[s], R.mul(c, basis[t][s]))
                out.append(vec)
        return out


# ---------------------------------------------------------------------------
# syzygies / kernels with generator-degree extraction
# ---------------------------------------------------------------------------


@dataclass
class SubmoduleGenerators:
    """Generators of a graded submodule K of a free module, found degreewise.

    Each generator is (degree, column) with the column a dict row -> element
    of the ambient free module."""

    ambient: FreeGradedModule
    generators: list
    horizon: int
    complete: bool = False

    def degrees(self):
        return [d for d, _ in self.generators]

    def max_degree(self):
        return max((d for d, _ in self.generators), default=None)

    def as_map(self) -> ModuleMap:
        src = FreeGradedModule(self.ambient.context, self.degrees())
        return ModuleMap(src, self.ambient, [c for _, c in self.generators])

    def generator_slice_vectors(self, d: int):
        """For each generator of degree e <= d, the coordinate vector of
        x^[d-e] * g on the ambient basis at degree d (spans the degree-d
        piece of the generated submodule: D_s has rank 1)."""
        ctx = self.ambient.context
        R = ctx.ring
        basis = self.ambient.basis(d)
        col_of = {i: c for c, (i, _) in enumerate(basis)}
        out = []
        for e, col in self.generators:
            if e > d:
                continue
            vec = [R.zero()] * len(basis)
            for i, elem in col.items():
                t = e - self.ambient.degrees[i]
                coeff = R.mul(elem.coeff(t), ctx.C(d - self.ambient.degrees[i], t))
                if not R.is_zero(coeff):
                    vec[col_of[i]] = coeff
            out.append(vec)
        return out


def _vector_to_column(ambient: FreeGradedModule, d: int, vec) -> dict:
    """Turn a degree-d coordinate vector into a column of GdpaElements."""
    ctx = ambient.context
    R = ctx.ring
    col = {}
    for c, (i, s) in enumerate(ambient.basis(d)):
        v = vec[c]
        if not R.is_zero(v):
            col[i] = ctx.x(s, v)
    return col


def kernel_slice_vectors(f: ModuleMap, d: int, target_relations: ModuleMap | None = None):
    """Generating vectors (source coordinates at degree d) of the kernel of
    the degree-d slice of f, into the target modulo target_relations."""
    A = f.slice(d)
    if target_relations is not None and target_relations.source.n_gens:
        P = target_relations.slice(d)
        R = f.context.ring
        stacked = ExactMatrix(
            R,
            [A.entries[i] + P.entries[i] for i in range(A.rows)],
            A.rows,
            A.cols + P.cols,
        )
        vs = kernel_basis(stacked)
        out = []
        seen = set()
        for v in vs:
            w = v[: A.cols]
            if any(not R.is_zero(x) for x in w):
                key = tuple(R.to_str(x) for x in w)
                if key not in seen:
                    seen.add(key)
                    out.append(w)
        return out
    return kernel_basis(A)


def syzygy_generators(
    f: ModuleMap,
    degree_bound: int,
    target_relations: ModuleMap | None = None,
    fast_membership: bool = True,
) -> SubmoduleGenerators:
    """Minimal generators (over fields and PIDs; a generating set over Z/n)
    of ker(f) up to degree_bound, degree by degree.

    With target_relations, computes the kernel of the induced map into the
    presented quotient of the target (the result then contains the source
    classes mapping into the relation submodule)."""
    src = f.source
    R = f.context.ring
    out = SubmoduleGenerators(src, [], degree_bound)
    dmin = min(src.degrees, default=0)
    for d in range(dmin, degree_bound + 1):
        kv = [v for v in kernel_slice_vectors(f, d, target_relations)
              if any(not R.is_zero(x) for x in v)]
        if not kv:
            continue
        old = out.generator_slice_vectors(d)
        if fast_membership and _all_in_span(R, len(src.basis(d)), old, kv):
            continue
        q = _SliceQuotient(R, len(src.basis(d)), kv, old)
        for vec in q.new_generators():
            out.generators.append((d, _vector_to_column(src, d, vec)))
    return out


def _all_in_span(R: Ring, dim: int, old, vectors) -> bool:
    if not old:
        return False
    if R.is_field:
        span = SpanReducer(R, dim)
        for v in old:
            span.add(v)
        return all(span.contains(v) for v in vectors)
    if isinstance(R, IntegersModRing):
        n = R.n
        span = _Echelon(ZZ, dim)
        for i in range(dim):
            span.insert([n if t == i else 0 for t in range(dim)])
        for v in old:
            span.insert(_lift_int(v))
        return all(span.contains(_lift_int(v)) for v in vectors)
    span = _Echelon(R, dim)
    for v in old:
        span.insert(v)
    return all(span.contains(v) for v in vectors)


@dataclass
class KernelPresentation:
    module: PresentedModule  # presentation of the kernel itself
    inclusion: ModuleMap  # kernel generators into the source of f
    generator_degrees: list
    horizon: int
    provably_complete: bool


def kernel_presentation(
    f: ModuleMap,
    degree_bound: int,
    target_relations: ModuleMap | None = None,
    certificate_bound: int | None = None,
) -> KernelPresentation:
    """Present ker(f) up to degree_bound: generators via degreewise extraction,
    relations as the second syzygies among them (same bound).

    certificate_bound: a degree t such that the generator list is provably
    complete once the scan reaches it (e.g. the (2N+3)d bound for ideals with
    torsion-free quotient); sets provably_complete when degree_bound >= t."""
    gens = syzygy_generators(f, degree_bound, target_relations)
    incl = gens.as_map()
    second = syzygy_generators(incl, degree_bound)
    module = PresentedModule(incl.source, second.as_map())
    complete = certificate_bound is not None and degree_bound >= certificate_bound
    return KernelPresentation(
        module=module,
        inclusion=incl,
        generator_degrees=gens.degrees(),
        horizon=degree_bound,
        provably_complete=complete,
    )


# ---------------------------------------------------------------------------
# Hilbert series
# ---------------------------------------------------------------------------


@dataclass
class HilbertSeries:
    module: PresentedModule
    pieces: dict  # degree -> ModuleInvariants
    horizon: int
    fit: dict | None = None

    def piece(self, d: int) -> ModuleInvariants:
        R = self.module.context.ring
        return self.pieces.get(d, ModuleInvariants(R, 0, ()))

    def to_json(self):
        out = {
            "horizon": self.horizon,
            "pieces": {str(d): inv.to_json() for d, inv in sorted(self.pieces.items())},
        }
        if self.fit:
            out["fit"] = {
                "preperiod": [
                    [d, inv.to_json()] for d, inv in self.fit["preperiod"]
                ],
                "period": self.fit["period"],
                "block_start": self.fit["block_start"],
                "block": [inv.to_json() for inv in self.fit["block"]],
            }
        return out


def hilbert_series(M: PresentedModule, horizon: int) -> HilbertSeries:
    pieces = {}
    for d in range(M.min_degree(), horizon + 1):
        inv = M.piece_invariants(d)
        if not inv.is_zero:
            pieces[d] = inv
    return HilbertSeries(M, pieces, horizon)


def rational_fit(H: HilbertSeries, max_period: int = 12) -> HilbertSeries:
    """Fit H as  sum_{d < s} [M_d] t^d  +  (sum_{j<h} [M_{s+j}] t^{s+j}) / (1 - t^h)
    by detecting the minimal eventual period h and preperiod s, then verifying
    the fit by exact re-expansion over the horizon.  Requires at least two
    full periods of data; otherwise the series is returned unfitted."""
    M = H.module
    horizon = H.horizon
    dmin = M.min_degree()
    for h in range(1, max_period + 1):
        # find minimal preperiod for this h
        last_bad = dmin - 1
        for d in range(dmin, horizon - h + 1):
            if not H.piece(d).eq(H.piece(d + h)):
                last_bad = d
        s = last_bad + 1
        # demand a tail of at least two periods and four data points, so a
        # short trailing run cannot masquerade as a period-1 fit
        if horizon - s + 1 >= max(2 * h, 4):
            preperiod = [(d, H.piece(d)) for d in range(dmin, s)]
            block = [H.piece(s + j) for j in range(h)]
            fit = {
                "preperiod": preperiod,
                "period": h,
                "block_start": s,
                "block": block,
            }
            # verify by re-expansion
            ok = True
            for d in range(dmin, horizon + 1):
                if d < s:
                    expect = dict(preperiod).get(d, ModuleInvariants(M.context.ring, 0, ()))
                else:
                    expect = block[(d - s) % h]
                if not expect.eq(H.piece(d)):
                    ok = False
                    break
            if ok:
                H.fit = fit
                return H
    H.fit = None
    return H


def fit_matches_principal_special(H: HilbertSeries, ideal_gens, h: int) -> bool:
    """Whether the fitted series equals [k/a] / (1 - t^h) (no preperiod)."""
    if not H.fit or H.fit["period"] != h or H.fit["preperiod"]:
        return False
    R = H.module.context.ring
    m = ExactMatrix(R, [[R.canon(a) for a in ideal_gens]], 1, len(ideal_gens))
    target = cokernel_invariants(m)
    block = H.fit["block"]
    if H.fit["block_start"] % h != 0:
        return False
    if not block[0].eq(target):
        return False
    return all(block[j].is_zero for j in range(1, h))


# ---------------------------------------------------------------------------
# Tor tables via degreewise free resolutions
# ---------------------------------------------------------------------------


@dataclass
class TorTable:
    entries: dict  # (i, d) -> ModuleInvariants (nonzero only)
    max_i: int
    horizon: int

    def entry(self, i: int, d: int, ring: Ring) -> ModuleInvariants:
        return self.entries.get((i, d), ModuleInvariants(ring, 0, ()))

    def t(self, i: int):
        """t_i = max degree with Tor_i nonzero (None if all zero)."""
        degs = [d for (j, d) in self.entries if j == i]
        return max(degs, default=None)

    def to_json(self):
        return {
            "max_i": self.max_i,
            "horizon": self.horizon,
            "entries": [
                [i, d, inv.to_json()] for (i, d), inv in sorted(self.entries.items())
            ],
        }


def free_resolution(M: PresentedModule, steps: int, degree_bound: int):
    """Maps d_1, ..., d_steps of a degreewise free resolution of M, built by
    repeated syzygy extraction (exact in all degrees <= degree_bound)."""
    maps = [M.relations]
    for _ in range(1, steps):
        prev = maps[-1]
        if prev.source.n_gens == 0:
            zero_src = FreeGradedModule(M.context, [])
            maps.append(ModuleMap.zero(zero_src, prev.source))
            continue
        syz = syzygy_generators(prev, degree_bound)
        maps.append(syz.as_map())
    return maps


def _slice_homology(R: Ring, A: ExactMatrix, B: ExactMatrix) -> ModuleInvariants:
    if A.cols == 0:
        return ModuleInvariants(R, 0, ())
    if A.rows == 0:
        A = ExactMatrix.zero(R, 1, A.cols)
    if B.cols == 0:
        B = ExactMatrix.zero(R, A.cols, 1)
    return homology_invariants(A, B)


def tor(M: PresentedModule, max_i: int, degree_bound: int) -> TorTable:
    """Tor_i(M, k)_d for 0 <= i <= max_i, d <= degree_bound, computed as the
    homology of (free resolution) tensor k: only the scalar components of the
    differentials survive, degree by degree."""
    R = M.context.ring
    maps = free_resolution(M, max_i + 1, degree_bound)
    frees = [M.generators] + [m.source for m in maps]
    entries = {}
    for d in range(M.min_degree(), degree_bound + 1):
        bars = [m.constant_slice(d) for m in maps]
        # Tor_0 = coker(bar d_1) on generators of degree exactly d
        inv0 = cokernel_invariants(bars[0])
        if not inv0.is_zero:
            entries[(0, d)] = inv0
        for i in range(1, max_i + 1):
            A = bars[i - 1]
            B = bars[i]
            inv = _slice_homology(R, A, B)
            if not inv.is_zero:
                entries[(i, d)] = inv
    return TorTable(entries, max_i, degree_bound)


def minimal_generator_degrees(M: PresentedModule) -> list:
    """Degrees of a minimal generating set, via M / D_+ M = Tor_0(M, k):
    the degree-d count is the size of coker of the scalar relation slice."""
    out = []
    for d in sorted(set(M.generators.degrees)):
        inv = cokernel_invariants(M.relations.constant_slice(d))
        count = inv.free_rank + len(inv.torsion_factors)
        out.extend([d] * count)
    return out


# ---------------------------------------------------------------------------
# torsion submodules
# ---------------------------------------------------------------------------


@dataclass
class TorsionReport:
    verdict: str  # "torsion_free" | "has_torsion" | "inconclusive"
    candidates: list  # (degree, invariants of the candidate torsion slice)
    horizon: int
    margin: int
    certificate: str | None = None

    def to_json(self):
        return {
            "verdict": self.verdict,
            "candidates": [[d, inv.to_json()] for d, inv in self.candidates],
            "horizon": self.horizon,
            "margin": self.margin,
            "certificate": self.certificate,
        }


def _annihilated_lattice(M: PresentedModule, d: int, margin: int):
    """Echelon span of {v in F0_d : x^[j] v in im(relations) for 1 <= j <=
    margin} together with the degree-d relation slice (so the span always
    contains the relation submodule)."""
    ctx = M.context
    R = ctx.ring
    F0 = M.generators
    P = M.relations
    basis = F0.basis(d)
    dim = len(basis)
    blocks = []
    for j in range(1, margin + 1):
        tb = F0.basis(d + j)
        row_of = {i: r for r, (i, _) in enumerate(tb)}
        mult = ExactMatrix.zero(R, len(tb), dim)
        for c, (i, s) in enumerate(basis):
            coeff = ctx.C(s + j, j)
            if not R.is_zero(coeff):
                mult.entries[row_of[i]][c] = coeff
        blocks.append((mult, P.slice(d + j)))
    total_rows = sum(m.rows for m, _ in blocks)
    total_rel_cols = sum(p.cols for _, p in blocks)
    big = ExactMatrix.zero(R, total_rows, dim + total_rel_cols)
    r0 = 0
    c0 = dim
    for mult, p in blocks:
        for r in range(mult.rows):
            for c in range(dim):
                big.entries[r0 + r][c] = mult.entries[r][c]
            for c in range(p.cols):
                big.entries[r0 + r][c0 + c] = p.entries[r][c]
        r0 += mult.rows
        c0 += p.cols
    vectors = [v[:dim] for v in kernel_basis(big)]
    pd = P.slice(d)
    vectors += [[pd.entries[i][j] for i in range(pd.rows)] for j in range(pd.cols)]
    return _make_span(R, dim, vectors), pd, dim


def _make_span(R: Ring, dim: int, vectors):
    if R.is_field:
        span = SpanReducer(R, dim)
        for v in vectors:
            span.add(v)
        return span
    if isinstance(R, IntegersModRing):
        span = _Echelon(ZZ, dim)
        for i in range(dim):
            span.insert([R.n if t == i else 0 for t in range(dim)])
        for v in vectors:
            span.insert(_lift_int(v))
        return span
    span = _Echelon(R, dim)
    for v in vectors:
        span.insert(v)
    return span


def _span_vectors(R: Ring, span):
    if isinstance(span, SpanReducer):
        return [list(span.pivots[j]) for j in sorted(span.pivots)]
    return span.basis_columns()


def _span_equal(R: Ring, a, b, dim: int) -> bool:
    va, vb = _span_vectors(R, a), _span_vectors(R, b)
    if isinstance(R, IntegersModRing):
        va, vb = [_lift_int(v) for v in va], [_lift_int(v) for v in vb]
    return all(b.contains(v) for v in va) and all(a.contains(v) for v in vb)


def _refine_lattice(M: PresentedModule, d: int, B, j_start: int, j_end: int):
    """Cut the candidate lattice spanned by B down to the vectors v with
    x^[j] v in im(relations) for every j in [j_start, j_end], one j at a
    time (each step is a kernel of a tiny matrix in the lattice coordinates,
    so large margins stay cheap).  The relation span is preserved."""
    ctx = M.context
    R = ctx.ring
    F0 = M.generators
    P = M.relations
    basis = F0.basis(d)
    dim = len(basis)
    for j in range(j_start, j_end + 1):
        if not B:
            return B
        tb = F0.basis(d + j)
        row_of = {i: r for r, (i, _) in enumerate(tb)}
        rows = max(len(tb), 1)
        pj = P.slice(d + j)
        big = ExactMatrix.zero(R, rows, len(B) + pj.cols)
        for col, v in enumerate(B):
            for c, (i, s) in enumerate(basis):
                coeff = ctx.C(s + j, j)
                if not R.is_zero(coeff) and not R.is_zero(v[c]):
                    r = row_of[i]
                    big.entries[r][col] = R.add(
                        big.entries[r][col], R.mul(coeff, v[c])
                    )
        for r in range(pj.rows):
            for c in range(pj.cols):
                big.entries[r][len(B) + c] = pj.entries[r][c]
        newvecs = []
        for k in kernel_basis(big):
            w = [R.zero()] * dim
            for col, coeff in enumerate(k[: len(B)]):
                if not R.is_zero(coeff):
                    for t in range(dim):
                        w[t] = R.add(w[t], R.mul(coeff, B[col][t]))
            if any(not R.is_zero(x) for x in w):
                newvecs.append(w)
        B = _span_vectors(R, _make_span(R, dim, newvecs))
        if isinstance(R, IntegersModRing):
            B = [[R.canon(x) for x in v] for v in B]
    return B


def torsion_submodule(
    M: PresentedModule, degree_bound: int, margin: int | None = None
) -> TorsionReport:
    """Detect classes m with x^[j] m = 0 for all large j (torsion), degreewise.

    A degree-d class is a candidate when x^[j] m lies in the relation
    submodule for every 1 <= j <= margin.  Because the conditions are finite,
    margin artifacts are possible (e.g. over Z_(p), deep p-power multiples of
    free classes satisfy long windows and only escape at p-power-aligned j);
    so the annihilated lattice of every candidate degree is refined one j at
    a time up to a cap that scales with the degree bound:

    - lattice equal to the relation span at any point -> no candidate;
    - unchanged over the top half of the window [cap/2, cap] (stable) ->
      reported torsion, certified when the ring is a field and pi is never
      zero on the scanned range (then x^[j] is a unit multiple of x^[1]^j
      and x^[1]-annihilation persists), otherwise inconclusive;
    - still shrinking at the cap -> a margin artifact, no stable torsion.

    Never claims torsion that was not certified; torsion_free is always
    qualified by the scanned bound and margins."""
    ctx = M.context
    R = ctx.ring
    if margin is None:
        margin = max(4, M.max_presentation_degree() + 1)
    cap = max(4 * margin, 2 * (1 << (degree_bound + margin - 1).bit_length()))
    certified = R.is_field and ctx.pi.is_never_zero(degree_bound + cap + 1)
    stable = []
    shrank = False
    for d in range(M.min_degree(), degree_bound + 1):
        if not M.generators.basis(d):
            continue
        span1, pd, dim = _annihilated_lattice(M, d, margin)
        pspan = _make_span(
            R, dim, [[pd.entries[i][j] for i in range(pd.rows)] for j in range(pd.cols)]
        )
        if _span_equal(R, span1, pspan, dim):
            continue
        B = _span_vectors(R, span1)
        if isinstance(R, IntegersModRing):
            B = [[R.canon(x) for x in v] for v in B]
        half = _refine_lattice(M, d, B, margin + 1, cap // 2)
        half_span = _make_span(R, dim, half)
        if _span_equal(R, half_span, pspan, dim):
            shrank = True
            continue
        final = _refine_lattice(M, d, half, cap // 2 + 1, cap)
        final_span = _make_span(R, dim, final)
        if _span_equal(R, final_span, pspan, dim):
            shrank = True
            continue
        if _span_equal(R, half_span, final_span, dim):
            # stable annihilated classes beyond the relation submodule
            basis2 = _span_vectors(R, final_span)
            if isinstance(R, IntegersModRing):
                basis2 = [[R.canon(x) for x in v] for v in basis2]
            cmat = ExactMatrix(
                R, [[v[i] for v in basis2] for i in range(dim)], dim, len(basis2)
            )
            stable.append((d, cokernel_invariants(cmat)))
        else:
            shrank = True
    if stable:
        if certified:
            return TorsionReport(
                "has_torsion", stable, degree_bound, margin,
                certificate=(
                    "field with nowhere-vanishing pi: x^[1]-annihilation persists"
                ),
            )
        return TorsionReport("inconclusive", stable, degree_bound, margin)
    note = f"no stable annihilated classes up to degree {degree_bound}"
    if shrank:
        note += f" (margin artifacts eliminated within extended window {cap})"
    return TorsionReport("torsion_free", [], degree_bound, margin, certificate=note)


# ---------------------------------------------------------------------------
# truncations
# ---------------------------------------------------------------------------


def truncate_at_most(M: PresentedModule, n: int, horizon: int | None = None) -> PresentedModule:
    """tau^{<=n}: add relations killing the monomials of degree > n.

    Horizon-limited: the added relations certify vanishing on (n, horizon];
    over coefficient rings where D_{>n} is not finitely generated (e.g.
    classical pi over Z) no finite presentation kills all higher degrees."""
    ctx = M.context
    R = ctx.ring
    if horizon is None:
        horizon = default_horizon(max(n, M.max_presentation_degree()))
    new_cols = list(M.relations.columns)
    new_degs = list(M.relations.source.degrees)
    for i, g in enumerate(M.generators.degrees):
        kept = []
        for t in range(max(n + 1 - g, 0), horizon - g + 1):
            if any(R.is_unit(ctx.C(t, t2)) for t2 in kept):
                continue
            kept.append(t)
            new_cols.append({i: ctx.x(t)})
            new_degs.append(g + t)
    return PresentedModule.from_columns(
        ctx, list(M.generators.degrees), new_cols, new_degs
    )


def truncate_at_least(M: PresentedModule, n: int, horizon: int | None = None) -> PresentedModule:
    """tau_{>=n}: the submodule of degrees >= n, presented by the monomial
    classes in a generation window [n, n + gap] with induced relations found
    degreewise (horizon-limited); pieces verified against M on [n, horizon]."""
    ctx = M.context
    R = ctx.ring
    if horizon is None:
        horizon = default_horizon(max(n, M.max_presentation_degree()))
    gap = 0
    while True:
        gen_degs = []
        gen_cols = []
        for i, g in enumerate(M.generators.degrees):
            for d in range(max(n, g), n + gap + 1):
                gen_degs.append(d)
                gen_cols.append({i: ctx.x(d - g)})
        F = FreeGradedModule(ctx, gen_degs)
        to_M = ModuleMap(F, M.generators, gen_cols)
        if _generates_range(to_M, M, n, horizon):
            break
        gap += 1
        if n + gap > horizon:
            raise PreconditionError(
                f"cannot generate degrees [{n}, {horizon}] within the horizon"
            )
    rels = syzygy_generators(to_M, horizon, target_relations=M.relations)
    out = PresentedModule(F, rels.as_map())
    for d in range(n, horizon + 1):
        if not out.piece_invariants(d).eq(M.piece_invariants(d)):
            raise AssertionError(f"truncation pieces disagree at degree {d}")
    return out


def _generates_range(to_M: ModuleMap, M: PresentedModule, n: int, horizon: int) -> bool:
    """Whether the image of to_M spans M_d (modulo relations) for n <= d <= horizon."""
    R = M.context.ring
    for d in range(n, horizon + 1):
        A = to_M.slice(d)
        P = M.relations.slice(d)
        stacked = ExactMatrix(
            R,
            [A.entries[i] + P.entries[i] for i in range(A.rows)],
            A.rows,
            A.cols + P.cols,
        )
        if not cokernel_invariants(stacked).is_zero:
            return False
    return True
