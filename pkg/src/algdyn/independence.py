"""Combinatorial independence witnesses and specification shadowing.

Independence: a homoclinic point x with summable decay yields, for every
window F, a positive-density subset F1 on which all 2^|F1| on/off patterns
are realized by explicit points y_sigma = sum_{s in F1} sigma(s) (s^-1 x).
The target neighborhoods are max-metric cylinders of radius eps over the
interaction ball K of x, and the density guarantee comes from greedy
selection: |F1| >= |F| / (2|K'|+1) for the conflict set K' = K - K.

Shadowing: prescribed homoclinic blocks on separated windows are traced by
one point, built exactly as (sum of block provenances) (A*)^-1; gaps are
certified through the l1 tail of the truncated inverse, and summing over a
finite-index subgroup produces an exactly periodic shadow.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .groupring import GroupRingElement, GroupRingMatrix, ball, frac_center
from .homoclinic import HomoclinicPoint, _star_inverse, group_element


def _norm_sites(F, d: int) -> list[tuple[int, ...]]:
    out = []
    for s in F:
        if isinstance(s, int):
            if d != 1:
                raise ValueError("integer sites only valid when d=1")
            out.append((s,))
        else:
            out.append(tuple(int(v) for v in s))
    return out


def greedy_separated_subset(F: list, K: list) -> list[tuple[int, ...]]:
    """Greedy maximal subset F1 of F with (F1 - F1) \\ {0} disjoint from K.

    Scanning F in the given order guarantees |F1| >= |F| / (2|K|+1): every
    rejected site lies in K + s or -K + s for some chosen s.
    """
    if not F or not K:
        raise ValueError("F and K must be nonempty")
    d = len(next(iter(K))) if not isinstance(next(iter(K)), int) else 1
    Fn = _norm_sites(F, d)
    Kn = set(_norm_sites(K, d))
    chosen: list[tuple[int, ...]] = []
    for s in Fn:
        ok = True
        for t in chosen:
            fwd = tuple(a - b for a, b in zip(s, t))
            bwd = tuple(b - a for a, b in zip(s, t))
            if fwd in Kn or bwd in Kn:
                ok = False
                break
        if ok:
            chosen.append(s)
    return chosen


def interaction_radius(x: HomoclinicPoint, eps: float, radius_cap: int = 200) -> int:
    """Smallest max-norm radius whose outside torus-distance mass is < eps.

    The mass is the exact sum of per-site distances to zero over the lift
    support plus the certified tail bound of the truncation.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    centered = x.centered_lift()
    total = x.rho_sum() + Fraction(x.tail_bound).limit_denominator(10**15)
    support = x.support()
    max_r = max((max(abs(v) for v in e) for e in support), default=0)
    inside = Fraction(0)
    by_radius: dict[int, Fraction] = {}
    for e in support:
        r = max(abs(v) for v in e)
        by_radius[r] = by_radius.get(r, Fraction(0)) + max(
            (abs(comp.get(e, Fraction(0))) for comp in centered), default=Fraction(0)
        )
    for r in range(0, min(max_r, radius_cap) + 1):
        inside += by_radius.get(r, Fraction(0))
        if float(total - inside) < eps:
            return r
    raise ValueError("no interaction ball with tail below eps within the support")


@dataclass
class IndependenceReport:
    F: list[tuple[int, ...]]
    K: list[tuple[int, ...]]
    F1: list[tuple[int, ...]]
    density: float
    witnesses_checked: int
    max_violation: float
    all_pass: bool
    eps: float
    subsampled: bool = False
    seed: int | None = None
    note: str = ""

    def to_obj(self) -> dict:
        return {
            "F": [list(s) for s in self.F],
            "K": [list(s) for s in self.K],
            "F1": [list(s) for s in self.F1],
            "density": self.density,
            "witnesses_checked": self.witnesses_checked,
            "max_violation": self.max_violation,
            "all_pass": self.all_pass,
            "eps": self.eps,
            "subsampled": self.subsampled,
            "seed": self.seed,
            "note": self.note,
        }


def _sigma_violation_direct(
    x: HomoclinicPoint,
    F1: list[tuple[int, ...]],
    K: list[tuple[int, ...]],
    sigma: dict[tuple[int, ...], int],
) -> float:
    """Pure-dict evaluation of max_t rho((s y_sigma)_t, target_t), all s in F1."""
    worst = 0.0
    for s in F1:
        for t in K:
            for j in range(x.k):
                acc = 0.0
                for sp in F1:
                    if sigma[sp]:
                        e = tuple(a - b + c for a, b, c in zip(t, s, sp))
                        v = x.lift[j].get(e)
                        if v is not None:
                            acc += float(v)
                target = float(x.lift[j].get(t, Fraction(0))) if sigma[s] else 0.0
                diff = acc - target
                diff -= round(diff)
                worst = max(worst, abs(diff))
    return worst


def independence_witnesses(
    x: HomoclinicPoint,
    eps: float,
    F: list,
    cap: int = 4096,
    seed: int = 0,
    double_check: bool = True,
) -> IndependenceReport:
    """Enumerate and verify the on/off pattern witnesses over the window F.

    Every sigma in {0,1}^F1 (all of them up to cap, then a flagged seeded
    subsample) is realized by y_sigma = sum sigma(s) (s^-1 x); verification
    checks that s.y_sigma lies in the eps-cylinder over the interaction
    ball K around x (pattern 1) or around zero (pattern 0).  Passing
    witnesses are re-verified by an independent direct evaluation.
    """
    d = x.d
    Fn = _norm_sites(F, d)
    radius = interaction_radius(x, eps)
    K = ball(d, radius)
    conflict = ball(d, 2 * radius)
    F1 = greedy_separated_subset(Fn, conflict) if len(conflict) > 1 else list(Fn)
    nf1 = len(F1)

    total = 1 << nf1
    subsampled = total > cap
    if subsampled:
        rng = np.random.default_rng(seed)
        codes = np.unique(rng.integers(0, total, size=cap, dtype=np.uint64))
    else:
        codes = np.arange(total, dtype=np.uint64)
    nsig = len(codes)
    sigma = ((codes[:, None] >> np.arange(nf1, dtype=np.uint64)[None, :]) & 1).astype(
        np.float64
    )

    # D[a, b, t, j] = lift_j(t - F1[a] + F1[b])
    nk, kk = len(K), x.k
    D = np.zeros((nf1, nf1, nk, kk))
    X = np.zeros((nk, kk))
    for ti, t in enumerate(K):
        for j in range(kk):
            v = x.lift[j].get(t)
            X[ti, j] = float(v) if v is not None else 0.0
    for a, s in enumerate(F1):
        for b, sp in enumerate(F1):
            for ti, t in enumerate(K):
                e = tuple(p - q + r for p, q, r in zip(t, s, sp))
                for j in range(kk):
                    v = x.lift[j].get(e)
                    if v is not None:
                        D[a, b, ti, j] = float(v)

    vals = np.einsum("nb,abtj->natj", sigma, D)
    targets = sigma[:, :, None, None] * X[None, None, :, :]
    diff = vals - targets
    diff -= np.round(diff)
    viol = np.abs(diff).max(axis=(2, 3)) if nk else np.zeros((nsig, nf1))
    max_violation = float(viol.max()) if viol.size else 0.0
    all_pass = bool((viol <= eps).all())

    if double_check:
        for idx in range(nsig):
            sd = {F1[b]: int(sigma[idx, b]) for b in range(nf1)}
            direct = _sigma_violation_direct(x, F1, K, sd)
            recorded = float(viol[idx].max()) if nf1 else 0.0
            if abs(direct - recorded) > 1e-9:
                raise AssertionError("independent witness re-verification disagrees")

    return IndependenceReport(
        F=Fn,
        K=K,
        F1=F1,
        density=len(F1) / len(Fn) if Fn else 0.0,
        witnesses_checked=nsig * max(1, nf1),
        max_violation=max_violation,
        all_pass=all_pass,
        eps=eps,
        subsampled=subsampled,
        seed=seed if subsampled else None,
    )


# -- shadowing ----------------------------------------------------------------


@dataclass
class ShadowBlock:
    window: list
    point: HomoclinicPoint


@dataclass
class ShadowRequest:
    blocks: list[ShadowBlock]
    eps: float
    periodic_subgroup: list | None = None  # d x d integer basis, or diagonal list

    def basis_matrix(self, d: int) -> list[list[int]] | None:
        if self.periodic_subgroup is None:
            return None
        B = self.periodic_subgroup
        if all(isinstance(v, int) for v in B):
            if len(B) != d:
                raise ValueError("diagonal subgroup needs d entries")
            return [[B[i] if i == j else 0 for j in range(d)] for i in range(d)]
        M = [[int(v) for v in row] for row in B]
        if len(M) != d or any(len(r) != d for r in M):
            raise ValueError("basis matrix must be d x d")
        return M


@dataclass
class ShadowResult:
    lift: list[dict[tuple[int, ...], Fraction]]
    block_errors: list[float]
    gap_radius: int
    eps: float
    periodic_basis: list[list[int]] | None = None
    note: str = ""

    def value(self, e) -> tuple[float, ...]:
        if isinstance(e, int):
            e = (e,)
        e = self._fold(tuple(e))
        return tuple(float(frac_center(comp.get(e, Fraction(0)))) for comp in self.lift)

    def lift_at(self, e) -> tuple[Fraction, ...]:
        if isinstance(e, int):
            e = (e,)
        e = self._fold(tuple(e))
        return tuple(comp.get(e, Fraction(0)) for comp in self.lift)

    def _fold(self, e: tuple[int, ...]) -> tuple[int, ...]:
        if self.periodic_basis is None:
            return e
        return _fold_lattice(e, self.periodic_basis)

    def to_obj(self) -> dict:
        return {
            "block_errors": self.block_errors,
            "gap_radius": self.gap_radius,
            "eps": self.eps,
            "periodic_basis": self.periodic_basis,
            "note": self.note,
        }


def inverse_tail_radius(A: GroupRingMatrix, bound: float, tol: float = 1e-10, radius_cap: int = 40) -> int:
    """Smallest R with the l1 mass of the truncated (A*)^-1 beyond radius R,
    plus its truncation tail, below the given bound."""
    inv = _star_inverse(A, tol, radius_cap)
    d = A.d
    by_radius: dict[int, Fraction] = {}
    for row in inv.entries:
        for cell in row:
            for e, c in cell.terms.items():
                r = max(abs(v) for v in e)
                by_radius[r] = by_radius.get(r, Fraction(0)) + abs(c)
    total = sum(by_radius.values(), Fraction(0)) + Fraction(inv.tail_bound or 0.0).limit_denominator(10**15)
    inside = Fraction(0)
    for r in range(0, max(by_radius, default=0) + 1):
        inside += by_radius.get(r, Fraction(0))
        if float(total - inside) < bound:
            return r
    raise ValueError("epsilon tail unreachable within the truncated inverse radius")


def _region(block: ShadowBlock, d: int) -> set[tuple[int, ...]]:
    sites = set(_norm_sites(block.window, d))
    for comp in block.point.provenance:
        sites.update(comp.terms)
    return sites


def _min_distance(S: set, T: set) -> int:
    best = None
    for s in S:
        for t in T:
            dd = max(abs(a - b) for a, b in zip(s, t))
            best = dd if best is None else min(best, dd)
    return best if best is not None else 0


def shadow(
    A: GroupRingMatrix,
    req: ShadowRequest,
    tol: float = 1e-10,
    radius_cap: int = 40,
) -> ShadowResult:
    """One point tracing all requested homoclinic blocks within eps.

    The integer data of each block (its provenance vector) is summed, over
    the periodizing subgroup when one is given, and pushed through the
    truncated inverse of the involuted presenting matrix; block windows
    must be separated by the gap radius derived from the inverse's l1 tail.
    """
    d = A.d
    if not req.blocks:
        zero = [dict() for _ in range(A.rows)]
        return ShadowResult(zero, [], 0, req.eps, req.basis_matrix(d))
    norm_a = A.l1_norm()
    R = inverse_tail_radius(A, req.eps / (2.0 * norm_a), tol, radius_cap)

    regions = [_region(b, d) for b in req.blocks]
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            if _min_distance(regions[i], regions[j]) <= R:
                raise ValueError(
                    f"blocks {i} and {j} are within the gap radius {R}; move them apart"
                )

    k = A.rows
    m_total = [GroupRingElement.zero(d) for _ in range(k)]
    for b in req.blocks:
        if b.point.k != k:
            raise ValueError("block point has wrong number of components")
        for i in range(k):
            m_total[i] = m_total[i] + b.point.provenance[i]

    y = group_element(A, m_total, tol, radius_cap)
    lift = [dict(comp) for comp in y.lift]

    B = req.basis_matrix(d)
    if B is not None:
        # fundamental domain must contain every block's R-neighborhood:
        # neighboring subgroup translates of the combined region must stay
        # farther than R apart.
        all_sites = set().union(*regions)
        for gz in _small_lattice_vectors(B, d):
            shifted = {tuple(a + b for a, b in zip(s, gz)) for s in all_sites}
            if _min_distance(all_sites, shifted) <= R:
                raise ValueError("periodic domain too small for the blocks' gap radius")
        folded: list[dict[tuple[int, ...], Fraction]] = [dict() for _ in range(k)]
        for j in range(k):
            for e, c in lift[j].items():
                fe = _fold_lattice(e, B)
                v = folded[j].get(fe, Fraction(0)) + c
                if v:
                    folded[j][fe] = v
                else:
                    folded[j].pop(fe, None)
        lift = folded

    result = ShadowResult(lift, [], R, req.eps, B)
    errors = []
    for b in req.blocks:
        worst = 0.0
        for t in _norm_sites(b.window, d):
            yv = result.lift_at(t)
            xv = tuple(comp.get(t, Fraction(0)) for comp in b.point.lift)
            for a, c in zip(yv, xv):
                dv = float(frac_center(a - c))
                worst = max(worst, abs(dv))
        errors.append(worst)
    result.block_errors = errors
    return result


def _small_lattice_vectors(B: list[list[int]], d: int):
    out = []
    rng = [-1, 0, 1]
    for z in itertools.product(rng, repeat=d):
        if all(v == 0 for v in z):
            continue
        out.append(tuple(sum(B[i][j] * z[j] for j in range(d)) for i in range(d)))
    return out


def _fold_lattice(e: tuple[int, ...], B: list[list[int]]) -> tuple[int, ...]:
    """Representative of e with B^-1 e in [0,1)^d, computed exactly."""
    d = len(e)
    Bq = [[Fraction(B[i][j]) for j in range(d)] for i in range(d)]
    coords = _solve_rational(Bq, [Fraction(v) for v in e])
    ks = [c.__floor__() for c in coords]
    return tuple(e[i] - sum(B[i][j] * ks[j] for j in range(d)) for i in range(d))


def _solve_rational(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    d = len(rhs)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(M)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular basis matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][d] for i in range(d)]


@dataclass
class SpecificationReport:
    passed: bool
    block_error: float
    outside_max: float
    gap_radius: int
    eps: float
    annulus: list[tuple[int, ...]]

    def to_obj(self) -> dict:
        return {
            "passed": self.passed,
            "block_error": self.block_error,
            "outside_max": self.outside_max,
            "gap_radius": self.gap_radius,
            "eps": self.eps,
            "annulus_size": len(self.annulus),
        }


def homoclinic_specification_check(
    A: GroupRingMatrix,
    eps: float,
    F1: list,
    x: HomoclinicPoint,
    verify_width: int = 20,
    support_cap: int = 120,
    tol: float = 1e-10,
    radius_cap: int = 40,
) -> SpecificationReport:
    """Single-block shadowing plus the outside-decay clause.

    The shadow must match x within eps on F1 and stay within eps of zero on
    an annulus beyond the gap set (the gap radius dilation of F1).
    """
    d = A.d
    Fn = _norm_sites(F1, d)
    if x.support() and max(max(abs(v) for v in e) for e in x.support()) > support_cap:
        raise ValueError("support exceeds verification window")
    res = shadow(A, ShadowRequest([ShadowBlock(Fn, x)], eps), tol, radius_cap)
    R = res.gap_radius
    gap_set = set()
    for s in Fn:
        for b in ball(d, R):
            gap_set.add(tuple(a + c for a, c in zip(s, b)))
    annulus = []
    for s in Fn:
        for b in ball(d, R + verify_width):
            t = tuple(a + c for a, c in zip(s, b))
            if t not in gap_set:
                annulus.append(t)
    annulus = sorted(set(annulus))
    outside = 0.0
    for t in annulus:
        outside = max(outside, max(abs(v) for v in res.value(t)))
    passed = (max(res.block_errors, default=0.0) <= eps) and (outside <= eps)
    return SpecificationReport(
        passed, max(res.block_errors, default=0.0), outside, R, eps, annulus
    )
