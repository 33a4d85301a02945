"""Resolution builders: projective, injective, DG-projective, complete, and
special Gorenstein projective precovers, plus horseshoe and lifting helpers.

Infinite resolutions are materialized on windows; a bundle records the degree
interval on which the materialized complex is a faithful prefix of the
infinite object (homology reads outside it are meaningless).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InfiniteRing, LiftNotFound, NoCompleteResolution, UnsupportedRing
from .complexes import (
    ChainMap,
    Complex,
    Homotopy,
    MappingCone,
    analyze_chain_map,
    boundary_cokernel,
    direct_sum_complex,
    dual_complex,
    hom_complex,
    homology_at,
    is_exact,
    mapping_cone,
    module_as_complex,
    shift,
    solve_chain_map,
    solve_homotopy,
    structural_class,
    sup_h,
    zero_complex,
)
from .modules import (
    INF,
    Module,
    Morphism,
    NEG_INF,
    class_membership,
    cokernel,
    cyclic_module,
    double_dual_map,
    dual_morphism,
    express_in_generators,
    free_module,
    kernel,
    minimal_cover,
    module_dimension,
    present_module,
    zero_module,
)
from .rings import Matrix, RingHandle


@dataclass
class ResolutionBundle:
    """A resolution/precover with its structure map and provenance."""
    target: Complex
    resolution: Complex
    map: ChainMap                     # resolution -> target (target -> resolution for injective_co)
    flavor: str                       # projective | dg_projective | injective_co | gp_precover
    kernel_profile: Optional[Dict[int, float]] = None
    faithful: Optional[Tuple[int, int]] = None   # interval of honest degrees; None = everywhere
    periodic: Optional[int] = None

    def faithful_degrees(self):
        if self.faithful is None:
            return range(min(self.resolution.lo, self.target.lo),
                         max(self.resolution.hi, self.target.hi) + 1)
        return range(self.faithful[0], self.faithful[1] + 1)

    def verify_quasi_iso(self) -> bool:
        an = analyze_chain_map(self.map, self.faithful_degrees())
        return an.is_quasi_iso


@dataclass
class CompleteResolution:
    """Totally acyclic complex of projectives agreeing with a DG-projective
    resolution above the threshold."""
    T: Complex
    P: ResolutionBundle
    u: ChainMap                       # T -> P.resolution
    agreement_threshold: int
    periodic: Optional[int] = None


# ---------------------------------------------------------------------------
# module-level resolutions
# ---------------------------------------------------------------------------

def projective_resolution(M: Module, length: int) -> ResolutionBundle:
    """Free resolution with minimal generator counts; terminates early when a
    syzygy vanishes; records the period when syzygy classes cycle."""
    ring = M.ring
    cover = minimal_cover(M)
    comps = [cover.source]
    diffs: List[Morphism] = []
    keys: Dict = {}
    period = None
    current_cover = cover
    terminated = False
    for j in range(1, length + 1):
        K, incl = kernel(current_cover)
        if K.is_zero_module():
            terminated = True
            break
        key = K.invariant_factors()
        if key in keys and period is None:
            period = j - keys[key]
        keys.setdefault(key, j)
        nxt = minimal_cover(K)
        d = Morphism(nxt.source, comps[-1], incl.matrix.mul(nxt.matrix))
        comps.append(nxt.source)
        diffs.append(d)
        current_cover = nxt
    res = Complex(ring, 0, comps, diffs)
    tgt = module_as_complex(M)
    cm = ChainMap(res, tgt, {0: Morphism(res.component(0), tgt.component(0),
                                         cover.matrix)})
    faithful = None if terminated else (0, len(comps) - 2)
    return ResolutionBundle(tgt, res, cm, "projective",
                            faithful=faithful, periodic=period)


def injective_coresolution(M: Module, length: int) -> ResolutionBundle:
    """Dual of a projective resolution of the dual module (finite QF rings)."""
    if not M.ring.profile.is_finite:
        raise InfiniteRing("injective coresolutions need a finite catalog ring")
    prb = projective_resolution(_dual(M), length)
    I = dual_complex(prb.resolution)          # degrees [-k, 0]
    dd = double_dual_map(M)                   # M -> M++
    cover_dual = dual_morphism(prb.map.part(0))   # (M+)+ -> (F_0)+
    part0 = cover_dual.compose(dd)
    aug = ChainMap(module_as_complex(M), I, {0: Morphism(M, I.component(0), part0.matrix)})
    faithful = None if prb.faithful is None else (-prb.faithful[1], 0)
    return ResolutionBundle(module_as_complex(M), I, aug, "injective_co",
                            faithful=faithful, periodic=prb.periodic)


def _dual(M: Module) -> Module:
    from .modules import character_dual
    return character_dual(M)


def special_gp_resolution(M: Module) -> Tuple[Complex, ChainMap]:
    """Special Gorenstein projective resolution of a module, as a complex in
    degrees >= 0 with its augmentation.

    Quasi-Frobenius rings: length 0 (every module is Gorenstein projective and
    the zero kernel has finite projective dimension).  Integers: the finite
    free resolution.
    """
    ring = M.ring
    if ring.kind == "Z" or not ring.profile.is_quasi_frobenius:
        if ring.kind != "Z":
            raise UnsupportedRing("special Gorenstein projective resolutions need "
                                  "a Gorenstein catalog ring")
        prb = projective_resolution(M, 1 + M.ngens)
        assert prb.faithful is None, "free resolutions over Z terminate"
        return prb.resolution, prb.map
    G = module_as_complex(M)
    return G, ChainMap.identity(G)


# ---------------------------------------------------------------------------
# DG-projective resolutions of complexes
# ---------------------------------------------------------------------------

def dg_projective_resolution(N: Complex, top: Optional[int] = None,
                             pad_at: Optional[int] = None) -> ResolutionBundle:
    """Surjective quasi-isomorphism from a right-bounded complex of frees.

    The complex is materialized on [N.lo, top]; degrees <= top-1 are faithful.
    When every component is already projective the identity bundle is returned.
    ``pad_at`` direct-sums a contractible [R = R] at (pad_at, pad_at-1), which
    yields a second, genuinely different resolution for cross-checks.
    """
    ring = N.ring
    if top is None:
        top = N.hi + 2
    top = max(top, N.hi + 1)
    if N.hi < N.lo:
        z = zero_complex(ring)
        return ResolutionBundle(N, z, ChainMap.zero(z, N), "dg_projective", faithful=None)
    if structural_class(N, "dg_projective").member:
        bundle = ResolutionBundle(N, N, ChainMap.identity(N), "dg_projective",
                                  faithful=None)
        if pad_at is not None:
            bundle = pad_with_contractible(bundle, pad_at)
        return bundle
    lo = N.lo
    comps: List[Module] = []
    diffs: List[Morphism] = []
    pparts: List[Morphism] = []
    # base degree: free cover of N_lo
    cover = minimal_cover(N.component(lo))
    comps.append(cover.source)
    pparts.append(cover)
    for j in range(lo + 1, top + 1):
        Pprev = comps[-1]
        Nj = N.component(j)
        Nj1 = N.component(j - 1)
        Pprev2 = comps[-2] if len(comps) >= 2 else zero_module(ring)
        # W = {(z, n) : p(z) = dN(n), dP(z) = 0} inside Pprev (+) Nj
        dN = N.differential(j)
        dP = diffs[-1] if diffs else None
        top_row = pparts[-1].matrix.hstack(dN.matrix.neg()) if Nj.ngens else pparts[-1].matrix
        if dP is not None and Pprev2.ngens:
            bot = dP.matrix.hstack(Matrix.zero(ring, Pprev2.ngens, Nj.ngens)) if Nj.ngens else dP.matrix
            big = top_row.vstack(bot)
            tgt_pres = Matrix.block_diag(ring, [Nj1.presentation, Pprev2.presentation])
        else:
            big = top_row
            tgt_pres = Nj1.presentation
        src = Module(ring, Matrix.block_diag(ring, [Pprev.presentation, Nj.presentation]))
        tgt = Module(ring, tgt_pres)
        f = Morphism(src, tgt, big)
        W, incl = kernel(f)
        zparts = Matrix(ring, Pprev.ngens, incl.matrix.cols,
                        incl.matrix.entries[: Pprev.ngens * incl.matrix.cols])
        nparts = Matrix(ring, Nj.ngens, incl.matrix.cols,
                        incl.matrix.entries[Pprev.ngens * incl.matrix.cols:])
        Pj = free_module(ring, incl.matrix.cols)
        comps.append(Pj)
        diffs.append(Morphism(Pj, Pprev, zparts))
        pparts.append(Morphism(Pj, Nj, nparts))
    res = Complex(ring, lo, comps, diffs)
    parts = {}
    for j, pm in enumerate(pparts):
        if pm.matrix.rows and pm.matrix.cols:
            parts[lo + j] = Morphism(res.component(lo + j), N.component(lo + j), pm.matrix)
    cm = ChainMap(res, N, parts)
    bundle = ResolutionBundle(N, res, cm, "dg_projective", faithful=(lo, top - 1))
    if pad_at is not None:
        bundle = pad_with_contractible(bundle, pad_at)
    # degreewise surjectivity onto N
    for j in N.degrees():
        cok, _ = cokernel(bundle.map.part(j))
        assert cok.is_zero_module(), f"resolution must be surjective at degree {j}"
    return bundle


def pad_with_contractible(bundle: ResolutionBundle, at_degree: int) -> ResolutionBundle:
    """Direct-sum a contractible free [R = R] at (at_degree, at_degree-1)."""
    ring = bundle.resolution.ring
    F = free_module(ring, 1)
    pad = Complex(ring, at_degree - 1, [F, F], [Morphism.identity(F)])
    summed = direct_sum_complex([bundle.resolution, pad])
    new_parts = {}
    for n, pm in bundle.map.parts.items():
        new_parts[n] = pm.compose(summed.project[0].part(n))
    cm = ChainMap(summed.complex, bundle.target, new_parts)
    return ResolutionBundle(bundle.target, summed.complex, cm, bundle.flavor,
                            faithful=bundle.faithful, periodic=bundle.periodic)


# ---------------------------------------------------------------------------
# complete resolutions
# ---------------------------------------------------------------------------

def _free_presented(ring: RingHandle, M: Module) -> Tuple[Module, Morphism]:
    """Re-present a module known to be free as an actual free module.

    Returns (F, iso: F -> M)."""
    cov = minimal_cover(M)
    K, _ = kernel(cov)
    assert K.is_zero_module(), "module is not free"
    return cov.source, cov


def complete_resolution(N: Complex, window: Tuple[int, int],
                        threshold: Optional[int] = None) -> CompleteResolution:
    """T -> P -> N with T totally acyclic projective, agreeing with P at and
    above the reported threshold; materialized on the window.

    Over the integers a pinned threshold below the least degree with projective
    boundary cokernel raises NoCompleteResolution.
    """
    ring = N.ring
    wlo, whi = window
    s = sup_h(N)
    if s == NEG_INF:
        s = N.lo
    s = int(s)
    P = dg_projective_resolution(N, top=max(whi, s) + 2)
    if ring.kind == "Z" or not ring.profile.is_quasi_frobenius:
        if ring.kind != "Z":
            raise UnsupportedRing("complete resolutions are built over the "
                                  "quasi-Frobenius catalog rings and Z")
        g = s
        C = boundary_cokernel(P.resolution, g)
        if not class_membership(C, "projective").member:
            g = s + 1
            C = boundary_cokernel(P.resolution, g)
            assert class_membership(C, "projective").member, \
                "second boundary cokernel over Z is a submodule of a free module"
        if threshold is not None and threshold < g:
            bad = boundary_cokernel(P.resolution, threshold)
            raise NoCompleteResolution(
                f"boundary cokernel at degree {threshold} has invariants "
                f"{bad.invariant_factors()}; not projective, no totally acyclic "
                f"tail agrees with P from degree {threshold} on")
        thr = g if threshold is None else threshold
        C = boundary_cokernel(P.resolution, thr)
        F, iso = _free_presented(ring, C)
        comps = []
        diffs = []
        lo_T = thr - 1
        comps.append(F)
        d_first = express_in_generators(iso.matrix, C.presentation,
                                        Matrix.identity(ring, C.ngens))
        assert d_first is not None
        # T_thr = P_thr -> F realizes P_thr ->> C composed with iso^{-1}
        prev = F
        for j in range(thr, whi + 1):
            Pj = P.resolution.component(j)
            comps.append(Pj)
        for j in range(thr, whi + 1):
            Pj = P.resolution.component(j)
            if j == thr:
                mat = d_first  # gens of C = gens of P_thr
                diffs.append(Morphism(Pj, F, mat))
            else:
                diffs.append(P.resolution.differential(j))
        T = Complex(ring, lo_T, comps, diffs)
        uparts = {}
        for j in range(thr, whi + 1):
            uparts[j] = Morphism(T.component(j), P.resolution.component(j),
                                 Matrix.identity(ring, T.component(j).ngens))
        # u at thr-1: induced C -> P_{thr-1} from dP factoring through the cokernel
        dmat = P.resolution.differential(thr).matrix
        u_low = dmat.mul(iso.matrix)
        uparts[lo_T] = Morphism(F, P.resolution.component(thr - 1), u_low)
        u = ChainMap(T, P.resolution, uparts)
        _certify_totally_acyclic(T)
        return CompleteResolution(T, P, u, thr, periodic=None)
    # quasi-Frobenius rings: splice with the dual of a resolution of the dual
    thr = s if threshold is None else threshold
    if threshold is not None and threshold < s:
        raise NoCompleteResolution(
            f"homology is nonzero at degree {s}; no totally acyclic complex "
            f"agrees with P from degree {threshold} on")
    C = boundary_cokernel(P.resolution, thr)
    depth = max(0, thr - wlo)
    prb = projective_resolution(_dual(C), depth + 1)
    cores = dual_complex(prb.resolution)       # degrees [-k, 0], F_t^+ at -t
    dd = double_dual_map(C)
    iota = dual_morphism(prb.map.part(0)).compose(dd)    # C -> (F_0)^+
    comps = []
    diffs = []
    # T_j = cores.component(j - thr + 1) for j < thr (F_0^+ sits at thr-1)
    lo_T = thr - 1 + cores.lo
    for j in range(lo_T, thr):
        comps.append(cores.component(j - thr + 1))
    for j in range(thr, whi + 1):
        comps.append(P.resolution.component(j))
    for j in range(lo_T + 1, whi + 1):
        if j < thr:
            diffs.append(Morphism(comps[j - lo_T], comps[j - 1 - lo_T],
                                  cores.differential(j - thr + 1).matrix))
        elif j == thr:
            mat = iota.matrix  # P_thr gens = C gens
            diffs.append(Morphism(comps[j - lo_T], comps[j - 1 - lo_T], mat))
        else:
            diffs.append(P.resolution.differential(j))
    T = Complex(ring, lo_T, comps, diffs)
    uparts = {}
    for j in range(thr, whi + 1):
        uparts[j] = Morphism(T.component(j), P.resolution.component(j),
                             Matrix.identity(ring, T.component(j).ngens))
    u = _extend_comparison_down(T, P.resolution, uparts, thr, lo_T)
    _certify_totally_acyclic(T)
    return CompleteResolution(T, P, u, thr, periodic=prb.periodic)


def _extend_comparison_down(T: Complex, P: Complex, uparts: Dict[int, Morphism],
                            thr: int, lo_T: int) -> ChainMap:
    """Extend u: T -> P below the agreement threshold degree by degree."""
    ring = T.ring
    from .complexes import LinearProblem
    for j in range(thr - 1, lo_T - 1, -1):
        Tj, Pj = T.component(j), P.component(j)
        if Tj.ngens == 0 or Pj.ngens == 0:
            continue
        prob = LinearProblem(ring)
        prob.add_unknown("u", Pj.ngens, Tj.ngens)
        if Tj.presentation.cols:
            prob.add_constraint([(Matrix.identity(ring, Pj.ngens), "u", Tj.presentation)],
                                Matrix.zero(ring, Pj.ngens, Tj.presentation.cols),
                                Pj.presentation)
        above = uparts.get(j + 1)
        if above is not None:
            # u_j . dT_{j+1} = dP_{j+1} . u_{j+1}
            rhs = P.differential(j + 1).matrix.mul(above.matrix)
            prob.add_constraint([(Matrix.identity(ring, Pj.ngens), "u",
                                  T.differential(j + 1).matrix)],
                                rhs.neg(), Pj.presentation)
        sol = prob.solve()
        assert sol is not None, "comparison map extension exists over QF rings"
        uparts[j] = Morphism(Tj, Pj, sol["u"])
    return ChainMap(T, P, uparts)


def _certify_totally_acyclic(T: Complex):
    """Exactness + termwise projectivity + Hom(-, indecomposable projectives)
    exactness on the materialized window (interior degrees)."""
    assert all(class_membership(T.component(n), "projective").member
               for n in T.degrees()), "complete resolution components must be projective"
    for n in range(T.lo + 1, T.hi):
        assert homology_at(T, n).is_zero_module(), \
            f"complete resolution window not exact at degree {n}"
    ring = T.ring
    for w in ring.complement_selectors():
        Pind = cyclic_module(ring, w)
        hc = hom_complex(T, module_as_complex(Pind)).complex
        for m in range(hc.lo + 1, hc.hi):
            assert homology_at(hc, m).is_zero_module(), \
                "window fails Hom(-, Proj)-exactness"


# ---------------------------------------------------------------------------
# special Gorenstein projective precovers (bounded complexes)
# ---------------------------------------------------------------------------

def _components_gp(C: Complex) -> bool:
    return all(class_membership(C.component(n), "gorenstein_projective").member
               for n in C.degrees())


def kernel_complex(f: ChainMap) -> Tuple[Complex, ChainMap]:
    """Degreewise kernels with induced differentials and the inclusion map."""
    src = f.source
    ring = src.ring
    mods = []
    incls = []
    for n in src.degrees():
        K, incl = kernel(f.part(n))
        mods.append(K)
        incls.append(incl)
    diffs = []
    for n in range(src.lo + 1, src.hi + 1):
        hi_incl = incls[n - src.lo]
        lo_incl = incls[n - 1 - src.lo]
        composite = src.differential(n).matrix.mul(hi_incl.matrix)
        coords = express_in_generators(lo_incl.matrix,
                                       src.component(n - 1).presentation, composite)
        assert coords is not None, "differential restricts to kernels"
        diffs.append(Morphism(mods[n - src.lo], mods[n - 1 - src.lo], coords))
    K = Complex(ring, src.lo, mods, diffs)
    incl = ChainMap(K, src, {src.lo + i: Morphism(K.component(src.lo + i),
                                                  src.component(src.lo + i),
                                                  incls[i].matrix)
                             for i in range(len(mods)) if mods[i].ngens})
    return K, incl


def complex_pd_profile(L: Complex) -> Tuple[bool, Dict[int, float]]:
    """Finite projective dimension certificate for a complex: exact, and every
    component and boundary kernel has finite module pd.  Returns (ok, per-degree
    component pd)."""
    profile = {}
    ok = is_exact(L)
    for n in L.degrees():
        pdn = module_dimension(L.component(n), "pd")
        profile[n] = pdn
        if pdn == INF:
            ok = False
    if ok:
        for n in L.degrees():
            from .complexes import _cycles
            gens, comp = _cycles(L, n)
            from .modules import syzygies as _syz
            kr = Module(L.ring, _syz(gens, comp.presentation))
            if module_dimension(kr, "pd") == INF:
                ok = False
                break
    return ok, profile


def special_gp_precover(M: Complex, policy: str = "lemma7") -> ResolutionBundle:
    """Special Gorenstein projective precover of a bounded complex.

    policy "lemma7": the inductive construction on the top degree (base case:
    a special GP resolution of the bottom module; step: resolve the new top
    module, lift its differential through the inductive precover, take the
    mapping cone).  policy "identity": the cheapest valid special precover
    (the complex itself when its components are Gorenstein projective, else a
    surjective DG-projective resolution).
    """
    ring = M.ring
    if ring.kind != "Z" and not ring.profile.is_quasi_frobenius:
        raise UnsupportedRing("special precovers need a Gorenstein catalog ring")
    if M.hi < M.lo or M.is_zero_complex():
        z = zero_complex(ring)
        b = ResolutionBundle(M, z, ChainMap.zero(z, M), "gp_precover",
                             kernel_profile={}, faithful=None)
        return b
    if policy == "identity":
        if _components_gp(M):
            bundle = ResolutionBundle(M, M, ChainMap.identity(M), "gp_precover",
                                      kernel_profile={n: NEG_INF for n in M.degrees()},
                                      faithful=None)
            return bundle
        dg = dg_projective_resolution(M)
        if dg.faithful is not None:
            raise UnsupportedRing("identity policy needs either Gorenstein "
                                  "projective components or a finite "
                                  "DG-projective resolution")
        K, _ = kernel_complex(dg.map)
        ok, prof = complex_pd_profile(K)
        assert ok, "kernel of a finite free resolution has finite pd"
        return ResolutionBundle(M, dg.resolution, dg.map, "gp_precover",
                                kernel_profile=prof, faithful=None)
    if policy != "lemma7":
        raise ValueError(f"unknown precover policy {policy!r}")
    # inductive construction on the top degree
    if M.hi == M.lo:
        G0, aug = special_gp_resolution(M.component(M.lo))
        G = shift(G0, M.lo)
        parts = {M.lo: Morphism(G.component(M.lo), M.component(M.lo),
                                aug.part(0).matrix)}
        cm = ChainMap(G, M, parts)
        bundle = ResolutionBundle(M, G, cm, "gp_precover")
    else:
        T = M.hi
        from .complexes import truncate
        Mbar = truncate(M, "hard_above", T - 1)
        base = special_gp_precover(Mbar, "lemma7")
        Gbar, alpha = base.resolution, base.map
        Gp0, aug = special_gp_resolution(M.component(T))
        Gp = shift(Gp0, T - 1)          # G'_j sits at degree T-1+j
        # w: Gp -> Mbar, nonzero only at degree T-1: dM_T . g'_0
        w_mat = M.differential(T).matrix.mul(aug.part(0).matrix)
        wpart = Morphism(Gp.component(T - 1), Mbar.component(T - 1), w_mat)
        w = ChainMap(Gp, Mbar, {T - 1: wpart} if w_mat.rows and w_mat.cols else {})
        u = solve_chain_map(Gp, Gbar, [(alpha, w)])
        if u is None:
            raise LiftNotFound("no lift of the top differential through the "
                               "inductive precover")
        cone = mapping_cone(u)
        G = shift(cone.complex, 1)      # degree j component: Gbar_j (+) G'_{j-T}
        parts = {}
        for j in range(G.lo, G.hi + 1):
            gbar_j = Gbar.component(j)
            gp_j = Gp.component(j - 1)  # shifted cone: (Y_{j}, X_{j-1})
            Mj = M.component(j)
            if Mj.ngens == 0:
                continue
            blocks = {}
            if j <= T - 1 and gbar_j.ngens:
                blocks[(0, 0)] = alpha.part(j).matrix
            if j == T and gp_j.ngens:
                blocks[(0, 1)] = aug.part(0).matrix
            if not blocks:
                continue
            parts[j] = _sum_part(ring, [gbar_j, gp_j], Mj, blocks,
                                 G.component(j))
        cm = ChainMap(G, M, parts)
        bundle = ResolutionBundle(M, G, cm, "gp_precover")
    # certify: GP components, surjectivity, kernel of finite pd
    assert _components_gp(bundle.resolution), "precover components must be GP"
    for n in M.degrees():
        cok, _ = cokernel(bundle.map.part(n))
        assert cok.is_zero_module(), f"precover not surjective at degree {n}"
    K, _ = kernel_complex(bundle.map)
    ok, prof = complex_pd_profile(K)
    assert ok, "special precover kernel must have finite projective dimension"
    bundle.kernel_profile = prof
    # components above the top degree of the target stay projective
    for n in range(M.hi + 1, bundle.resolution.hi + 1):
        assert class_membership(bundle.resolution.component(n), "projective").member
    return bundle


def _sum_part(ring, summands, target, blocks, dsum_source):
    """Morphism from a prebuilt direct sum into one module, from (0, j) blocks."""
    from .modules import block_morphism
    return block_morphism(summands, [target], blocks,
                          dsum_source=dsum_source, dsum_target=target)


# ---------------------------------------------------------------------------
# horseshoe and lifting
# ---------------------------------------------------------------------------

@dataclass
class HorseshoeResult:
    left: ResolutionBundle
    middle: ResolutionBundle
    right: ResolutionBundle
    incl: ChainMap        # F' -> F'(+)F''
    proj: ChainMap        # F'(+)F'' -> F''
    lift: ChainMap        # u: F'' -> M with h.u = phi''


def _check_degreewise_ses(l: ChainMap, h: ChainMap):
    from .modules import exactness_defect
    M = l.target
    for n in range(min(l.source.lo, M.lo, h.target.lo),
                   max(l.source.hi, M.hi, h.target.hi) + 1):
        ker_l, _ = kernel(l.part(n))
        if not ker_l.is_zero_module():
            raise ValueError(f"left map not injective at degree {n}")
        cok_h, _ = cokernel(h.part(n))
        if not cok_h.is_zero_module():
            raise ValueError(f"right map not surjective at degree {n}")
        if not exactness_defect(l.part(n), h.part(n)).is_zero_module():
            raise ValueError(f"sequence not exact at degree {n}")


def horseshoe(l: ChainMap, h: ChainMap, flavor: str = "gp",
              policy: str = "lemma7") -> HorseshoeResult:
    """Precovers/resolutions of the ends of 0 -> M' -> M -> M'' -> 0 assembled
    into one of the middle; the required lift is certified by the solver."""
    _check_degreewise_ses(l, h)
    Mp, M, Mpp = l.source, l.target, h.target
    ring = M.ring
    if flavor == "gp":
        left = special_gp_precover(Mp, policy)
        right = special_gp_precover(Mpp, policy)
    elif flavor == "dg":
        left = dg_projective_resolution(Mp)
        right = dg_projective_resolution(Mpp)
    else:
        raise ValueError(f"unknown horseshoe flavor {flavor!r}")
    u = solve_chain_map(right.resolution, M, [(h, right.map)])
    if u is None:
        raise LiftNotFound(
            "the sequence is not Hom-exact against the right precover: no "
            "chain map u with h(u) matching the precover of the quotient")
    summed = direct_sum_complex([left.resolution, right.resolution])
    phi_parts = {}
    for n in range(summed.complex.lo, summed.complex.hi + 1):
        if M.component(n).ngens == 0 or summed.complex.component(n).ngens == 0:
            continue
        via_left = l.part(n).compose(left.map.part(n)).compose(summed.project[0].part(n))
        via_right = u.part(n).compose(summed.project[1].part(n))
        phi_parts[n] = via_left.add(via_right)
    phi = ChainMap(summed.complex, M, phi_parts)
    K, _ = kernel_complex(phi)
    if flavor == "gp":
        ok, prof = complex_pd_profile(K)
        assert ok, "middle precover kernel inherits finite projective dimension"
        middle = ResolutionBundle(M, summed.complex, phi, "gp_precover",
                                  kernel_profile=prof)
    else:
        middle = ResolutionBundle(M, summed.complex, phi, "dg_projective",
                                  faithful=_intersect_faithful(left, right))
    return HorseshoeResult(left, middle, right,
                           summed.inject[0], summed.project[1], u)


def _intersect_faithful(a: ResolutionBundle, b: ResolutionBundle):
    if a.faithful is None:
        return b.faithful
    if b.faithful is None:
        return a.faithful
    return (min(a.faithful[0], b.faithful[0]), min(a.faithful[1], b.faithful[1]))


def lift_through_precover(f: ChainMap, bundle: ResolutionBundle,
                          variant: int = 0) -> ChainMap:
    """u with bundle.map o u = f; two lifts are homotopic (checked in tests)."""
    X = f.source
    if bundle.flavor == "gp_precover":
        if not _components_gp(X):
            raise LiftNotFound("source complex is not Gorenstein projective")
    else:
        if not structural_class(X, "dg_projective").member:
            raise LiftNotFound("source complex is not DG-projective")
    u = solve_chain_map(X, bundle.resolution, [(bundle.map, f)], variant=variant)
    if u is None:
        raise LiftNotFound("no lift through the precover")
    return u
