"""Finite-support chain complexes and chain-map analysis.

Degree conventions: differentials lower degree by one; homology is
H_n = ker d_n / im d_{n+1}.  Hom and tensor complexes follow

    Hom(X,Y)_n = sum over p of Hom(X_p, Y_{p+n}),  d(f) = dY.f - (-1)^n f.dX
    (X (x) Y)_n = sum over t of X_t (x) Y_{n-t},    d(x(x)y) = dx(x)y + (-1)^t x(x)dy

and the mapping cone of u: X -> Y has degree-n component Y_{n+1} (+) X_n
with d(x, y) = (dY x + u y, -dX y).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DegreeGap,
    EndpointMismatch,
    InfiniteRing,
    NotAComplex,
    RingMismatch,
)
from .modules import (
    HomData,
    MembershipResult,
    Module,
    Morphism,
    NEG_INF,
    block_morphism,
    class_membership,
    direct_sum,
    dual_data,
    dual_morphism,
    express_in_generators,
    hom_module,
    kernel,
    prune_columns,
    syzygies,
    tensor_module,
    zero_module,
)
from .rings import Matrix, RingHandle, kernel_columns, matrix_normal_form, solve_matrix


class Complex:
    """Chain complex supported on the integer interval [lo, hi]."""

    def __init__(self, ring: RingHandle, lo: int, components: Sequence[Module],
                 differentials: Sequence[Morphism]):
        hi = lo + len(components) - 1
        if len(components) == 0:
            lo, hi = 0, -1
        if len(differentials) != max(0, len(components) - 1):
            raise DegreeGap(
                f"need {max(0, len(components) - 1)} differentials for support "
                f"[{lo},{hi}], got {len(differentials)}")
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self._components = list(components)
        self._diffs = list(differentials)  # _diffs[i]: C_{lo+i+1} -> C_{lo+i}
        for m in components:
            if m.ring != ring:
                raise RingMismatch("component over a different ring")
        for i, d in enumerate(self._diffs):
            if d.source is not self._components[i + 1] or d.target is not self._components[i]:
                raise NotAComplex(f"differential at degree {lo + i + 1} has wrong endpoints")
        for i in range(len(self._diffs) - 1):
            comp = self._diffs[i].compose(self._diffs[i + 1])
            if not comp.is_zero_morphism():
                raise NotAComplex(f"d.d != 0 at degree {lo + i + 2}")
        self._homology_cache: Dict[int, Tuple[Module, Matrix]] = {}

    # -- access -----------------------------------------------------------------

    def component(self, n: int) -> Module:
        if self.lo <= n <= self.hi:
            return self._components[n - self.lo]
        return zero_module(self.ring)

    def differential(self, n: int) -> Morphism:
        """d_n : C_n -> C_{n-1} (zero outside support)."""
        if self.lo + 1 <= n <= self.hi:
            return self._diffs[n - self.lo - 1]
        return Morphism.zero(self.component(n), self.component(n - 1))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def is_zero_complex(self) -> bool:
        return all(m.is_zero_module() for m in self._components)

    def __repr__(self):
        parts = ", ".join(f"{n}:{self.component(n).ngens}g" for n in self.degrees())
        return f"Complex[{self.lo}..{self.hi}; {parts}]"


def build_complex(ring: RingHandle, lo: int, components: Sequence[Module],
                  differentials: Sequence[Morphism]) -> Complex:
    return Complex(ring, lo, components, differentials)


def module_as_complex(M: Module, degree: int = 0) -> Complex:
    return Complex(M.ring, degree, [M], [])


def zero_complex(ring: RingHandle) -> Complex:
    return Complex(ring, 0, [], [])


def shift(C: Complex, k: int) -> Complex:
    """Re-index upward by k (unsigned, cone-compatible): shift(C,k)_n = C_{n-k}."""
    return Complex(C.ring, C.lo + k, C._components, C._diffs)


def truncate(C: Complex, mode: str, degree: int) -> Complex:
    """hard_above / hard_below zero out one side; soft_above replaces the
    degree-`degree` term by the boundary cokernel C_degree."""
    if mode == "hard_above":
        if degree >= C.hi:
            return C
        if degree < C.lo:
            return zero_complex(C.ring)
        keep = degree - C.lo + 1
        return Complex(C.ring, C.lo, C._components[:keep], C._diffs[: keep - 1])
    if mode == "hard_below":
        if degree <= C.lo:
            return C
        if degree > C.hi:
            return zero_complex(C.ring)
        drop = degree - C.lo
        return Complex(C.ring, degree, C._components[drop:], C._diffs[drop:])
    if mode == "soft_above":
        if degree > C.hi:
            return C
        if degree < C.lo:
            return zero_complex(C.ring)
        ck, _ = _boundary_cokernel_with_projection(C, degree)
        comps = C._components[: degree - C.lo] + [ck]
        diffs = list(C._diffs[: max(0, degree - C.lo - 1)])
        if degree > C.lo:
            # d_degree kills im d_{degree+1}, so it descends to the cokernel
            # on the same generators
            diffs.append(Morphism(ck, C.component(degree - 1),
                                  C.differential(degree).matrix))
        return Complex(C.ring, C.lo, comps, diffs)
    raise ValueError(f"unknown truncation mode {mode!r}")


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

def _cycles(C: Complex, n: int) -> Tuple[Matrix, Module]:
    """Generators of ker d_n in generator coordinates of C_n."""
    comp = C.component(n)
    if n <= C.lo:
        return Matrix.identity(C.ring, comp.ngens), comp
    d = C.differential(n)
    lifted = d.matrix.hstack(d.target.presentation)
    ker = kernel_columns(lifted)
    cols = [k[: comp.ngens] for k in ker]
    gens = Matrix.from_columns(C.ring, comp.ngens, cols)
    gens = prune_columns(gens, comp.presentation)
    return gens, comp


def homology_data(C: Complex, n: int) -> Tuple[Module, Matrix]:
    """(H_n, cycle representatives as columns in C_n coordinates)."""
    if n in C._homology_cache:
        return C._homology_cache[n]
    if not (C.lo <= n <= C.hi):
        res = (zero_module(C.ring), Matrix(C.ring, 0, 0, []))
        C._homology_cache[n] = res
        return res
    gens, comp = _cycles(C, n)
    rel = syzygies(gens, comp.presentation)
    bnd = C.differential(n + 1)
    if bnd.source.ngens:
        lifted = express_in_generators(gens, comp.presentation, bnd.matrix)
        assert lifted is not None, "boundaries must be cycles"
        pres = rel.hstack(lifted)
    else:
        pres = rel
    H = Module(C.ring, pres)
    res = (H, gens)
    C._homology_cache[n] = res
    return res


def homology_at(C: Complex, n: int) -> Module:
    return homology_data(C, n)[0]


def sup_h(C: Complex):
    """Largest degree with nonzero homology; -inf when exact."""
    for n in range(C.hi, C.lo - 1, -1):
        if not homology_at(C, n).is_zero_module():
            return n
    return NEG_INF


def inf_h(C: Complex):
    for n in range(C.lo, C.hi + 1):
        if not homology_at(C, n).is_zero_module():
            return n
    return NEG_INF


def is_exact(C: Complex) -> bool:
    return sup_h(C) == NEG_INF


def _boundary_cokernel_with_projection(C: Complex, j: int) -> Tuple[Module, Morphism]:
    comp = C.component(j)
    d = C.differential(j + 1)
    pres = comp.presentation.hstack(d.matrix) if d.source.ngens else comp.presentation
    mod = Module(C.ring, pres)
    proj = Morphism(comp, mod, Matrix.identity(C.ring, comp.ngens))
    return mod, proj


def boundary_cokernel(C: Complex, j: int) -> Module:
    """coker d_{j+1}, the module the dimension searches test for class membership."""
    if not (C.lo <= j <= C.hi):
        return zero_module(C.ring)
    return _boundary_cokernel_with_projection(C, j)[0]


# ---------------------------------------------------------------------------
# chain maps
# ---------------------------------------------------------------------------

class ChainMap:
    """Degree-0 map of complexes; commutation with differentials is checked."""

    def __init__(self, source: Complex, target: Complex,
                 parts: Dict[int, Morphism], check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch("chain map over different rings")
        self.source = source
        self.target = target
        self.parts = {}
        for n, f in parts.items():
            if f.source is not source.component(n) or f.target is not target.component(n):
                # tolerate equal-presentation stand-ins
                if (f.source.presentation != source.component(n).presentation
                        or f.target.presentation != target.component(n).presentation):
                    raise EndpointMismatch(f"part at degree {n} has wrong endpoints")
            if not (f.matrix.rows == 0 and f.matrix.cols == 0):
                self.parts[n] = f
        if check:
            lo = min(source.lo, target.lo)
            hi = max(source.hi, target.hi)
            for n in range(lo + 1, hi + 1):
                lhs = self.part(n - 1).compose(source.differential(n))
                rhs = target.differential(n).compose(self.part(n))
                if not lhs.equals(rhs):
                    raise NotAComplex(f"chain map does not commute at degree {n}")

    def part(self, n: int) -> Morphism:
        if n in self.parts:
            return self.parts[n]
        return Morphism.zero(self.source.component(n), self.target.component(n))

    @staticmethod
    def zero(source: Complex, target: Complex) -> "ChainMap":
        return ChainMap(source, target, {}, check=False)

    @staticmethod
    def identity(C: Complex) -> "ChainMap":
        return ChainMap(C, C, {n: Morphism.identity(C.component(n)) for n in C.degrees()},
                        check=False)

    def compose(self, other: "ChainMap") -> "ChainMap":
        parts = {}
        lo = min(other.source.lo, self.target.lo)
        hi = max(other.source.hi, self.target.hi)
        for n in range(lo, hi + 1):
            m = self.part(n).compose(other.part(n))
            if m.matrix.rows and m.matrix.cols:
                parts[n] = m
        return ChainMap(other.source, self.target, parts, check=False)

    def add(self, other: "ChainMap") -> "ChainMap":
        parts = {}
        for n in set(self.parts) | set(other.parts):
            parts[n] = self.part(n).add(other.part(n))
        return ChainMap(self.source, self.target, parts, check=False)

    def sub(self, other: "ChainMap") -> "ChainMap":
        parts = {}
        for n in set(self.parts) | set(other.parts):
            parts[n] = self.part(n).sub(other.part(n))
        return ChainMap(self.source, self.target, parts, check=False)

    def is_zero_map(self) -> bool:
        return all(f.is_zero_morphism() for f in self.parts.values())

    def equals(self, other: "ChainMap") -> bool:
        return self.sub(other).is_zero_map()


class Homotopy:
    """s_n: X_n -> Y_{n+1} with f - g = d.s + s.d (verified)."""

    def __init__(self, f: ChainMap, g: ChainMap, parts: Dict[int, Morphism]):
        self.f = f
        self.g = g
        self.parts = parts
        X, Y = f.source, f.target
        lo = min(X.lo, Y.lo) - 1
        hi = max(X.hi, Y.hi) + 1
        for n in range(lo, hi + 1):
            sn = self.part(n)
            sn1 = self.part(n - 1)
            lhs = f.part(n).sub(g.part(n))
            rhs = Y.differential(n + 1).compose(sn).add(sn1.compose(X.differential(n)))
            if not lhs.equals(rhs):
                raise NotAComplex(f"homotopy identity fails at degree {n}")

    def part(self, n: int) -> Morphism:
        if n in self.parts:
            return self.parts[n]
        return Morphism.zero(self.f.source.component(n), self.f.target.component(n + 1))


# ---------------------------------------------------------------------------
# linear problems in unknown morphism matrices
# ---------------------------------------------------------------------------

class LinearProblem:
    """Affine constraints  sum_i L_i S_{k_i} R_i + C == 0  modulo target relations.

    Unknown matrices S_k are solved simultaneously; each constraint carries the
    presentation whose column span the residual must land in.
    """

    def __init__(self, ring: RingHandle):
        self.ring = ring
        self.shapes: Dict[str, Tuple[int, int]] = {}
        self.order: List[str] = []
        self.constraints: List[Tuple[List[Tuple[Matrix, str, Matrix]], Matrix, Matrix]] = []

    def add_unknown(self, name: str, rows: int, cols: int):
        if name in self.shapes:
            raise ValueError(f"duplicate unknown {name}")
        self.shapes[name] = (rows, cols)
        self.order.append(name)

    def add_constraint(self, terms, const: Matrix, relations: Matrix):
        """terms: list of (L, name, R); asserts sum L*S*R + const in im(relations) columnwise."""
        if const.rows * const.cols == 0:
            return
        self.constraints.append((list(terms), const, relations))

    def solve(self, variant: int = 0) -> Optional[Dict[str, Matrix]]:
        ring = self.ring
        offsets: Dict[str, int] = {}
        total = 0
        for name in self.order:
            r, c = self.shapes[name]
            offsets[name] = total
            total += r * c
        rows_blocks: List[Matrix] = []
        rhs_blocks: List[List] = []
        slack_shapes: List[Tuple[int, int]] = []
        # first pass: constraint row sizes and slack sizes
        for terms, const, relations in self.constraints:
            a, b = const.rows, const.cols
            slack_shapes.append((relations.cols * b, a * b))
        n_slack = sum(s[0] for s in slack_shapes)
        grand_cols = total + n_slack
        big_rows: List[List] = []
        big_rhs: List = []
        slack_off = total
        for ci, (terms, const, relations) in enumerate(self.constraints):
            a, b = const.rows, const.cols
            nrows = a * b
            block = [[ring.zero()] * grand_cols for _ in range(nrows)]
            for (L, name, R) in terms:
                coeff = L.kron(R.transpose())  # vec_row(L S R) = (L kron R^T) vec(S)
                off = offsets[name]
                for i in range(coeff.rows):
                    row = block[i]
                    for j in range(coeff.cols):
                        e = coeff.at(i, j)
                        if not ring.is_zero(e):
                            row[off + j] = ring.add(row[off + j], e)
            if relations.cols:
                rel_coeff = relations.kron(Matrix.identity(ring, b))  # vec(B*Y)
                for i in range(nrows):
                    row = block[i]
                    for j in range(rel_coeff.cols):
                        e = rel_coeff.at(i, j)
                        if not ring.is_zero(e):
                            row[slack_off + j] = ring.neg(e)
            slack_off += slack_shapes[ci][0]
            big_rows.extend(block)
            big_rhs.extend(ring.neg(e) for e in const.entries)
        if not big_rows:
            sol = {name: Matrix.zero(ring, *self.shapes[name]) for name in self.order}
            return sol
        A = Matrix(ring, len(big_rows), grand_cols, [e for row in big_rows for e in row])
        Bm = Matrix.from_columns(ring, len(big_rhs), [big_rhs])
        nf = matrix_normal_form(A)
        X = solve_matrix(A, Bm, nf)
        if X is None:
            return None
        xi = X.col(0)
        if variant:
            kers = kernel_columns(A, nf)
            if kers:
                kv = kers[(variant - 1) % len(kers)]
                xi = [ring.add(x, k) for x, k in zip(xi, kv)]
        out = {}
        for name in self.order:
            r, c = self.shapes[name]
            off = offsets[name]
            out[name] = Matrix(ring, r, c, xi[off: off + r * c])
        return out


def solve_homotopy(f: ChainMap, g: ChainMap, variant: int = 0) -> Optional[Homotopy]:
    """Homotopy witness between parallel chain maps, or None (certified by the
    exact linear solver: no solution over these rings means no homotopy)."""
    if f.source is not g.source or f.target is not g.target:
        if (f.source.lo != g.source.lo or f.target.lo != g.target.lo
                or f.source._components != g.source._components
                or f.target._components != g.target._components):
            raise EndpointMismatch("homotopy endpoints differ")
    X, Y = f.source, f.target
    ring = X.ring
    prob = LinearProblem(ring)
    lo = min(X.lo, Y.lo) - 1
    hi = max(X.hi, Y.hi) + 1
    names = {}
    for n in range(lo, hi + 1):
        r = Y.component(n + 1).ngens
        c = X.component(n).ngens
        if r and c:
            names[n] = f"s{n}"
            prob.add_unknown(f"s{n}", r, c)
            # well-definedness: s_n maps source relations into target relations
            A = X.component(n).presentation
            if A.cols:
                prob.add_constraint(
                    [(Matrix.identity(ring, r), f"s{n}", A)],
                    Matrix.zero(ring, r, A.cols),
                    Y.component(n + 1).presentation)
    for n in range(lo, hi + 1):
        tn = Y.component(n).ngens
        cn = X.component(n).ngens
        if tn == 0 or cn == 0:
            continue
        const = f.part(n).matrix.sub(g.part(n).matrix).neg()
        terms = []
        if n in names:
            terms.append((Y.differential(n + 1).matrix, names[n],
                          Matrix.identity(ring, cn)))
        if (n - 1) in names:
            terms.append((Matrix.identity(ring, tn), names[n - 1],
                          X.differential(n).matrix))
        # d s + s d - (f - g) == 0 mod relations of Y_n
        prob.add_constraint(terms, const, Y.component(n).presentation)
    sol = prob.solve(variant)
    if sol is None:
        return None
    parts = {}
    for n, nm in names.items():
        parts[n] = Morphism(X.component(n), Y.component(n + 1), sol[nm])
    return Homotopy(f, g, parts)


def solve_chain_map(source: Complex, target: Complex,
                    equations, variant: int = 0) -> Optional[ChainMap]:
    """Chain map u: source -> target satisfying extra equations.

    equations: list of (post: ChainMap-or-None, rhs: ChainMap) demanding
    post o u = rhs degreewise (post None means u itself).
    """
    ring = source.ring
    prob = LinearProblem(ring)
    names = {}
    for n in range(source.lo, source.hi + 1):
        r = target.component(n).ngens
        c = source.component(n).ngens
        if r and c:
            names[n] = f"u{n}"
            prob.add_unknown(f"u{n}", r, c)
            A = source.component(n).presentation
            if A.cols:
                prob.add_constraint([(Matrix.identity(ring, r), f"u{n}", A)],
                                    Matrix.zero(ring, r, A.cols),
                                    target.component(n).presentation)
    # commutation: d_target u_n - u_{n-1} d_source == 0 mod relations(target_{n-1})
    for n in range(source.lo, source.hi + 2):
        tur = target.component(n - 1).ngens
        sc = source.component(n).ngens
        if tur == 0 or sc == 0:
            continue
        terms = []
        if n in names:
            terms.append((target.differential(n).matrix, names[n],
                          Matrix.identity(ring, sc)))
        if (n - 1) in names:
            terms.append((Matrix.identity(ring, tur).neg(), names[n - 1],
                          source.differential(n).matrix))
        if terms:
            prob.add_constraint(terms, Matrix.zero(ring, tur, sc),
                                target.component(n - 1).presentation)
    for post, rhs in equations:
        for n in range(source.lo, source.hi + 1):
            sc = source.component(n).ngens
            if sc == 0:
                continue
            if post is None:
                rr = target.component(n).ngens
                if rr == 0:
                    continue
                terms = [(Matrix.identity(ring, rr), names[n], Matrix.identity(ring, sc))] \
                    if n in names else []
                prob.add_constraint(terms, rhs.part(n).matrix.neg(),
                                    rhs.target.component(n).presentation)
            else:
                rr = post.target.component(n).ngens
                if rr == 0:
                    continue
                terms = [(post.part(n).matrix, names[n], Matrix.identity(ring, sc))] \
                    if n in names else []
                prob.add_constraint(terms, rhs.part(n).matrix.neg(),
                                    post.target.component(n).presentation)
    sol = prob.solve(variant)
    if sol is None:
        return None
    parts = {n: Morphism(source.component(n), target.component(n), sol[nm])
             for n, nm in names.items()}
    return ChainMap(source, target, parts)


@dataclass
class ChainMapAnalysis:
    induced: Dict[int, Morphism]
    is_quasi_iso: bool


def induced_map(f: ChainMap, n: int) -> Morphism:
    HS, repsS = homology_data(f.source, n)
    HT, repsT = homology_data(f.target, n)
    if HS.ngens == 0 or HT.ngens == 0:
        return Morphism.zero(HS, HT)
    mapped = f.part(n).matrix.mul(repsS)
    coords = express_in_generators(repsT, f.target.component(n).presentation, mapped)
    assert coords is not None, "cycles must map to cycles"
    return Morphism(HS, HT, coords)


def is_isomorphism(f: Morphism) -> bool:
    from .modules import cokernel as _cok, kernel as _ker
    cok, _ = _cok(f)
    if not cok.is_zero_module():
        return False
    ker, _ = _ker(f)
    return ker.is_zero_module()


def analyze_chain_map(f: ChainMap, degrees: Optional[Sequence[int]] = None) -> ChainMapAnalysis:
    if degrees is None:
        lo = min(f.source.lo, f.target.lo)
        hi = max(f.source.hi, f.target.hi)
        degrees = range(lo, hi + 1)
    induced = {}
    qi = True
    for n in degrees:
        m = induced_map(f, n)
        induced[n] = m
        if qi and not is_isomorphism(m):
            qi = False
    return ChainMapAnalysis(induced, qi)


# ---------------------------------------------------------------------------
# hom and tensor complexes
# ---------------------------------------------------------------------------

@dataclass
class HomComplexData:
    complex: Complex
    blocks: Dict[int, List[Tuple[int, HomData]]]  # degree -> [(p, Hom(X_p, Y_{p+n}))]

    def block_offset(self, n: int, p: int) -> int:
        off = 0
        for q, hd in self.blocks.get(n, []):
            if q == p:
                return off
            off += hd.module.ngens
        raise KeyError((n, p))


def hom_complex(X: Complex, Y: Complex) -> HomComplexData:
    """Total Hom complex with the displayed sign convention."""
    ring = X.ring
    if Y.ring != ring:
        raise RingMismatch("hom complex over different rings")
    lo = Y.lo - X.hi
    hi = Y.hi - X.lo
    blocks: Dict[int, List[Tuple[int, HomData]]] = {}
    comps: List[Module] = []
    if lo > hi:
        return HomComplexData(zero_complex(ring), {})
    for m in range(lo, hi + 1):
        blist = []
        for p in X.degrees():
            q = p + m
            if not (Y.lo <= q <= Y.hi):
                continue
            if X.component(p).ngens == 0 or Y.component(q).ngens == 0:
                continue
            blist.append((p, hom_module(X.component(p), Y.component(q))))
        blocks[m] = blist
    sums = {}
    for m in range(lo, hi + 1):
        mods = [hd.module for _, hd in blocks[m]]
        sums[m] = direct_sum(mods)[0] if mods else zero_module(ring)
    diffs = []
    for m in range(lo + 1, hi + 1):
        src_blocks = blocks[m]
        tgt_blocks = blocks[m - 1]
        if not src_blocks or not tgt_blocks:
            diffs.append(Morphism.zero(sums[m], sums[m - 1]))
            continue
        tgt_index = {p: i for i, (p, _) in enumerate(tgt_blocks)}
        bm: Dict[Tuple[int, int], Matrix] = {}
        for sj, (p, hd) in enumerate(src_blocks):
            q = p + m
            # post-compose with dY_q : block (p, q-1)
            dY = Y.differential(q)
            if dY.target.ngens and p in tgt_index:
                ti = tgt_index[p]
                cols = []
                for h in hd.generators:
                    comp_mat = dY.matrix.mul(h)
                    coords = tgt_blocks[ti][1].express(comp_mat)
                    assert coords is not None
                    cols.append(coords)
                if cols:
                    blk = Matrix.from_columns(ring, tgt_blocks[ti][1].module.ngens, cols)
                    bm[(ti, sj)] = blk if (ti, sj) not in bm else bm[(ti, sj)].add(blk)
            # pre-compose with dX_{p+1} : block (p+1, q), sign -(-1)^m
            dX = X.differential(p + 1)
            if dX.source.ngens and (p + 1) in tgt_index:
                ti = tgt_index[p + 1]
                sign_neg = (m % 2 == 0)  # -(-1)^m = -1 when m even
                cols = []
                for h in hd.generators:
                    comp_mat = h.mul(dX.matrix)
                    if sign_neg:
                        comp_mat = comp_mat.neg()
                    coords = tgt_blocks[ti][1].express(comp_mat)
                    assert coords is not None
                    cols.append(coords)
                if cols:
                    blk = Matrix.from_columns(ring, tgt_blocks[ti][1].module.ngens, cols)
                    bm[(ti, sj)] = blk if (ti, sj) not in bm else bm[(ti, sj)].add(blk)
        diffs.append(block_morphism([hd.module for _, hd in src_blocks],
                                    [hd.module for _, hd in tgt_blocks],
                                    bm,
                                    dsum_source=sums[m],
                                    dsum_target=sums[m - 1]))
    cx = Complex(ring, lo, [sums[m] for m in range(lo, hi + 1)], diffs)
    return HomComplexData(cx, blocks)


def hom_precompose(target_data: HomComplexData, source_data: HomComplexData,
                   v: ChainMap) -> ChainMap:
    """Hom(v, N): Hom(W, N) -> Hom(V, N) for v: V -> W (precomposition)."""
    parts = {}
    W_hom, V_hom = target_data, source_data
    for m, wblocks in W_hom.blocks.items():
        if m not in V_hom.blocks or not wblocks or not V_hom.blocks[m]:
            continue
        vblocks = V_hom.blocks[m]
        v_index = {p: i for i, (p, _) in enumerate(vblocks)}
        bm: Dict[Tuple[int, int], Matrix] = {}
        for sj, (p, whd) in enumerate(wblocks):
            if p not in v_index:
                continue  # composite factors through a zero block
            ti = v_index[p]
            vp = v.part(p)
            cols = []
            for h in whd.generators:
                comp_mat = h.mul(vp.matrix)
                coords = vblocks[ti][1].express(comp_mat)
                assert coords is not None
                cols.append(coords)
            if cols:
                bm[(ti, sj)] = Matrix.from_columns(v.source.ring,
                                                   vblocks[ti][1].module.ngens, cols)
        src_mod = W_hom.complex.component(m)
        tgt_mod = V_hom.complex.component(m)
        mor = block_morphism([hd.module for _, hd in wblocks],
                             [hd.module for _, hd in vblocks],
                             bm, dsum_source=src_mod, dsum_target=tgt_mod)
        parts[m] = mor
    return ChainMap(W_hom.complex, V_hom.complex, parts)


def tensor_complex(X: Complex, Y: Complex) -> Complex:
    """Total tensor complex with the displayed sign convention."""
    ring = X.ring
    if Y.ring != ring:
        raise RingMismatch("tensor complex over different rings")
    lo = X.lo + Y.lo
    hi = X.hi + Y.hi
    if X.hi < X.lo or Y.hi < Y.lo:
        return zero_complex(ring)
    blocks: Dict[int, List[Tuple[int, Module]]] = {}
    for n in range(lo, hi + 1):
        blist = []
        for t in X.degrees():
            s = n - t
            if not (Y.lo <= s <= Y.hi):
                continue
            if X.component(t).ngens == 0 or Y.component(s).ngens == 0:
                continue
            blist.append((t, tensor_module(X.component(t), Y.component(s))))
        blocks[n] = blist
    sums = {n: (direct_sum([m for _, m in blocks[n]])[0] if blocks[n] else zero_module(ring))
            for n in range(lo, hi + 1)}
    diffs = []
    for n in range(lo + 1, hi + 1):
        src_blocks = blocks[n]
        tgt_blocks = blocks[n - 1]
        if not src_blocks or not tgt_blocks:
            diffs.append(Morphism.zero(sums[n], sums[n - 1]))
            continue
        tgt_index = {t: i for i, (t, _) in enumerate(tgt_blocks)}
        bm: Dict[Tuple[int, int], Matrix] = {}
        for sj, (t, mod) in enumerate(src_blocks):
            s = n - t
            dX = X.differential(t)
            if dX.target.ngens and (t - 1) in tgt_index:
                ti = tgt_index[t - 1]
                blk = dX.matrix.kron(Matrix.identity(ring, Y.component(s).ngens))
                bm[(ti, sj)] = blk
            dY = Y.differential(s)
            if dY.target.ngens and t in tgt_index:
                ti = tgt_index[t]
                blk = Matrix.identity(ring, X.component(t).ngens).kron(dY.matrix)
                if t % 2:
                    blk = blk.neg()
                bm[(ti, sj)] = blk if (ti, sj) not in bm else bm[(ti, sj)].add(blk)
        diffs.append(block_morphism([m for _, m in src_blocks],
                                    [m for _, m in tgt_blocks],
                                    bm, dsum_source=sums[n], dsum_target=sums[n - 1]))
    return Complex(ring, lo, [sums[n] for n in range(lo, hi + 1)], diffs)


# ---------------------------------------------------------------------------
# mapping cone
# ---------------------------------------------------------------------------

@dataclass
class MappingCone:
    complex: Complex
    incl: ChainMap      # shift(target, -1) -> cone
    proj: ChainMap      # cone -> source, with sign (-1)^n
    u: ChainMap
    shifted_target: Complex

    def summands(self, n: int) -> Tuple[Module, Module]:
        return (self.u.target.component(n + 1), self.u.source.component(n))


def mapping_cone(u: ChainMap) -> MappingCone:
    """Cone with degree-n component target_{n+1} (+) source_n.

    The degreewise split short exact sequence is
    0 -> shift(target,-1) -> cone -> source -> 0.
    """
    X, Y = u.source, u.target
    ring = X.ring
    lo = min(Y.lo - 1, X.lo)
    hi = max(Y.hi - 1, X.hi)
    comps = []
    sum_mods = []
    for n in range(lo, hi + 1):
        mod, _ = direct_sum([Y.component(n + 1), X.component(n)])
        comps.append(mod)
        sum_mods.append((Y.component(n + 1), X.component(n)))
    diffs = []
    for n in range(lo + 1, hi + 1):
        yn1, xn = sum_mods[n - lo]
        yn, xn1 = sum_mods[n - 1 - lo]
        bm = {}
        dY = Y.differential(n + 1)
        if dY.matrix.rows and dY.matrix.cols:
            bm[(0, 0)] = dY.matrix
        un = u.part(n)
        if un.matrix.rows and un.matrix.cols:
            bm[(0, 1)] = un.matrix
        dX = X.differential(n)
        if dX.matrix.rows and dX.matrix.cols:
            bm[(1, 1)] = dX.matrix.neg()
        diffs.append(block_morphism([yn1, xn], [yn, xn1], bm,
                                    dsum_source=comps[n - lo],
                                    dsum_target=comps[n - 1 - lo]))
    cone = Complex(ring, lo, comps, diffs)
    shifted = shift(Y, -1)
    incl_parts = {}
    proj_parts = {}
    for n in range(lo, hi + 1):
        yn1, xn = sum_mods[n - lo]
        if yn1.ngens:
            incl_parts[n] = block_morphism([yn1], [yn1, xn], {(0, 0): Matrix.identity(ring, yn1.ngens)},
                                           dsum_source=shifted.component(n),
                                           dsum_target=cone.component(n))
        if xn.ngens:
            sign = Matrix.identity(ring, xn.ngens)
            if n % 2:
                sign = sign.neg()
            proj_parts[n] = block_morphism([yn1, xn], [xn], {(0, 1): sign},
                                           dsum_source=cone.component(n),
                                           dsum_target=X.component(n))
    incl = ChainMap(shifted, cone, incl_parts)
    proj = ChainMap(cone, X, proj_parts)
    return MappingCone(cone, incl, proj, u, shifted)


# ---------------------------------------------------------------------------
# structural predicates and duals
# ---------------------------------------------------------------------------

STRUCTURAL_CLASSES = ("dg_projective", "dg_flat", "dg_injective",
                      "projective_complex", "flat_complex")


def structural_class(C: Complex, name: str) -> MembershipResult:
    """Structural class decision; exact for finite-support complexes."""
    if name not in STRUCTURAL_CLASSES:
        raise ValueError(f"unknown structural class {name!r}")
    termwise = {"dg_projective": "projective", "dg_flat": "flat",
                "dg_injective": "injective", "projective_complex": "projective",
                "flat_complex": "flat"}[name]
    for n in C.degrees():
        res = class_membership(C.component(n), termwise)
        if not res.member:
            return MembershipResult(False, f"component at degree {n}: {res.certificate}")
    if name.startswith("dg_"):
        return MembershipResult(
            True, f"finite-support complex of {termwise} modules (bounded on the right)")
    if not is_exact(C):
        return MembershipResult(False, "complex is not exact")
    for n in C.degrees():
        gens, comp = _cycles(C, n)
        rel = syzygies(gens, comp.presentation)
        kr = Module(C.ring, rel)
        res = class_membership(kr, termwise)
        if not res.member:
            return MembershipResult(False, f"kernel at degree {n}: {res.certificate}")
    return MembershipResult(True, f"exact with {termwise} components and kernels")


@dataclass
class SumComplex:
    complex: Complex
    inject: List[ChainMap]
    project: List[ChainMap]


def direct_sum_complex(parts: Sequence[Complex]) -> SumComplex:
    """Degreewise direct sum with injection and projection chain maps."""
    ring = parts[0].ring
    lo = min(p.lo for p in parts)
    hi = max(p.hi for p in parts)
    if hi < lo:
        z = zero_complex(ring)
        return SumComplex(z, [ChainMap.zero(p, z) for p in parts],
                          [ChainMap.zero(z, p) for p in parts])
    comps = []
    for n in range(lo, hi + 1):
        comps.append(direct_sum([p.component(n) for p in parts])[0])
    diffs = []
    for n in range(lo + 1, hi + 1):
        bm = {}
        for i, p in enumerate(parts):
            d = p.differential(n)
            if d.matrix.rows and d.matrix.cols:
                bm[(i, i)] = d.matrix
        diffs.append(block_morphism([p.component(n) for p in parts],
                                    [p.component(n - 1) for p in parts], bm,
                                    dsum_source=comps[n - lo],
                                    dsum_target=comps[n - 1 - lo]))
    total = Complex(ring, lo, comps, diffs)
    inject = []
    project = []
    for i, p in enumerate(parts):
        iparts, pparts = {}, {}
        for n in p.degrees():
            pc = p.component(n)
            if pc.ngens == 0:
                continue
            others = [q.component(n) for q in parts]
            iparts[n] = block_morphism([pc], others,
                                       {(i, 0): Matrix.identity(ring, pc.ngens)},
                                       dsum_source=pc, dsum_target=total.component(n))
            pparts[n] = block_morphism(others, [pc],
                                       {(0, i): Matrix.identity(ring, pc.ngens)},
                                       dsum_source=total.component(n), dsum_target=pc)
        inject.append(ChainMap(p, total, iparts))
        project.append(ChainMap(total, p, pparts))
    return SumComplex(total, inject, project)


def dual_complex(C: Complex) -> Complex:
    """Termwise character dual with reversed degrees: (C+)_n = (C_{-n})+."""
    if not C.ring.profile.is_finite:
        raise InfiniteRing("dual complex needs a finite catalog ring")
    if C.hi < C.lo:
        return zero_complex(C.ring)
    comps = []
    diffs = []
    lo, hi = -C.hi, -C.lo
    duals = {n: dual_data(C.component(n)) for n in C.degrees()}
    for n in range(lo, hi + 1):
        comps.append(duals[-n].module)
    for n in range(lo + 1, hi + 1):
        # differential (C+)_n -> (C+)_{n-1} is the dual of d_{-n+1}: C_{-n+1} -> C_{-n}
        d = C.differential(-n + 1)
        dm = dual_morphism(d)
        diffs.append(Morphism(comps[n - lo], comps[n - 1 - lo], dm.matrix))
    return Complex(C.ring, lo, comps, diffs)
