"""Chart-presented Lie groupoids with evaluable structure maps, and the
numerical checks for multiplicative 2-forms: multiplicativity, relative
closedness, unit/inversion identities, kernel dimension identities,
classification (Dirac type / robust / presymplectic / over-symplectic /
nondegenerate), rho*-extraction at units, induced Dirac structures, and
gauge transformations."""

from dataclasses import dataclass, field

import numpy as np

from . import jets, linear
from .geometry import Form, ext_d, pullback, ChartMap


class RankInstabilityError(ValueError):
    """A singular value sits too close to the rank cutoff to decide."""


@dataclass
class ChartGroupoid:
    """Groupoid on global coordinate charts.

    All structure maps are evaluators over generic scalars so that jets can
    differentiate through them.  Composable pairs/triples come from the
    fixture's own samplers (never from root-finding).
    """

    total_dim: int
    base_dim: int
    s: object
    t: object
    unit: object
    inv: object
    mul: object
    sample_unit: object   # rng -> base point
    sample_arrow: object  # rng -> arrow
    sample_pair: object   # rng -> (g, h) with s(g) = t(h)
    sample_triple: object = None

    def structure_residuals(self, rng, n=8):
        """Sanity residuals of the groupoid axioms at sampled points."""
        r_unit = r_st = r_assoc = r_inv = 0.0
        for _ in range(n):
            x = self.sample_unit(rng)
            ex = self.unit(x)
            r_unit = max(r_unit, _dist(self.s(ex), x), _dist(self.t(ex), x))
            g, h = self.sample_pair(rng)
            gh = self.mul(g, h)
            r_st = max(r_st, _dist(self.s(gh), self.s(h)),
                       _dist(self.t(gh), self.t(g)))
            r_inv = max(r_inv, _dist(self.inv(self.inv(g)), g),
                        _dist(self.mul(g, self.inv(g)), self.unit(self.t(g))))
            if self.sample_triple is not None:
                a, b, c = self.sample_triple(rng)
                r_assoc = max(r_assoc, _dist(self.mul(self.mul(a, b), c),
                                             self.mul(a, self.mul(b, c))))
        return {"unit": r_unit, "source_target": r_st,
                "associativity": r_assoc, "inverse": r_inv}


def _dist(a, b):
    return max(abs(jets.value_of(x) - jets.value_of(y)) for x, y in zip(a, b))


@dataclass
class GroupoidForm:
    """A 2-form on the total space plus the background 3-form on the base."""

    omega: Form
    phi: Form = None  # None means zero


# -- jacobians and kernels -------------------------------------------------

def _jac(f, p):
    return np.array(jets.jacobian(f, [float(c) for c in p]))


def omega_matrix(F, g):
    """Matrix of omega at the arrow g in chart coordinates."""
    N = len(g)
    E = np.eye(N)
    M = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            v = jets.value_of(F.omega(list(map(float, g)), E[i], E[j]))
            M[i, j] = v
            M[j, i] = -v
    return M


def _stable_rank(s, tol, where="matrix"):
    """Rank from singular values; record the gap, refuse unstable cutoffs."""
    if s.size == 0:
        return 0, np.inf
    top = max(s[0], 1.0)
    cut = tol * top
    r = int(np.sum(s > cut))
    small = s[s <= cut]
    kept = s[s > cut]
    gap = np.inf
    if small.size and small.max() > 0:
        gap = (kept.min() / small.max()) if kept.size else np.inf
        if small.max() > cut / 10 and kept.size and kept.min() < cut * 10:
            raise RankInstabilityError(
                f"indeterminate rank at {where}: singular values straddle "
                f"the cutoff {cut:.1e}")
    return r, gap


def kernel_of_form(F, g, tol=1e-9, where="omega"):
    M = omega_matrix(F, g)
    U, s, Vt = np.linalg.svd(M)
    r, gap = _stable_rank(s, tol, where)
    return Vt[r:].T, gap


# -- the multiplicative-form checks ---------------------------------------

def composable_tangents(G, g, h, tol=1e-9):
    """Basis of the tangent space to the composable-pair set at (g, h):
    pairs (u, v) with ds_g u = dt_h v."""
    Js = _jac(G.s, g)
    Jt = _jac(G.t, h)
    C = np.hstack([Js, -Jt])
    return linear.null_basis(C, tol)


def check_multiplicative(G, F, rng, n_pairs=8):
    """Max |m*omega - pr1*omega - pr2*omega| over sampled composable pairs
    and tangent-basis pairs."""
    N = G.total_dim
    worst = 0.0
    for _ in range(n_pairs):
        g, h = G.sample_pair(rng)
        gh = G.mul(g, h)
        B = composable_tangents(G, g, h)
        Dm = _jac(lambda z: G.mul(z[:N], z[N:]), list(g) + list(h))
        for i in range(B.shape[1]):
            for j in range(i + 1, B.shape[1]):
                u, v = B[:, i], B[:, j]
                lhs = F.omega(gh, Dm @ u, Dm @ v)
                rhs = (F.omega(g, u[:N], v[:N])
                       + F.omega(h, u[N:], v[N:]))
                worst = max(worst, abs(jets.value_of(lhs - rhs)))
    return worst


def check_rel_closed(G, F, rng, n_points=8, n_triples=4):
    """Max |d omega - s*phi + t*phi| at sampled arrows on random triples."""
    dom = ext_d(F.omega)
    ch = F.omega.chart
    if F.phi is not None:
        bch = F.phi.chart
        smap = ChartMap(ch, bch, G.s)
        tmap = ChartMap(ch, bch, G.t)
        sphi = pullback(smap, F.phi)
        tphi = pullback(tmap, F.phi)
    worst = 0.0
    for _ in range(n_points):
        g = [float(c) for c in G.sample_arrow(rng)]
        for _ in range(n_triples):
            u, v, w = rng.standard_normal((3, G.total_dim))
            val = dom(g, u, v, w)
            if F.phi is not None:
                val = val - sphi(g, u, v, w) + tphi(g, u, v, w)
            worst = max(worst, abs(jets.value_of(val)))
    return worst


def check_unit_identities(G, F, rng, n=8):
    """(max |eps* omega| at units, max |i* omega + omega| at arrows)."""
    r_eps = 0.0
    for _ in range(n):
        x = [float(c) for c in G.sample_unit(rng)]
        ex = G.unit(x)
        for _ in range(3):
            u, v = rng.standard_normal((2, G.base_dim))
            du = jets.directional(G.unit, x, list(u))
            dv = jets.directional(G.unit, x, list(v))
            r_eps = max(r_eps, abs(jets.value_of(F.omega(ex, du, dv))))
    r_inv = 0.0
    for _ in range(n):
        g = [float(c) for c in G.sample_arrow(rng)]
        ig = G.inv(g)
        for _ in range(3):
            u, v = rng.standard_normal((2, G.total_dim))
            du = jets.directional(G.inv, g, list(u))
            dv = jets.directional(G.inv, g, list(v))
            val = F.omega(ig, du, dv) + F.omega(g, list(u), list(v))
            r_inv = max(r_inv, abs(jets.value_of(val)))
    return r_eps, r_inv


def check_kernel_orthogonality(G, F, rng, n=8, tol=1e-9):
    """Ker(ds) + Ker(omega) is omega-orthogonal to Ker(dt) at arrows."""
    worst = 0.0
    for _ in range(n):
        g = [float(c) for c in G.sample_arrow(rng)]
        Om = omega_matrix(F, g)
        Ks = linear.null_basis(_jac(G.s, g), tol)
        Kt = linear.null_basis(_jac(G.t, g), tol)
        Kw = linear.null_basis(Om, tol)
        span = linear.orth_basis(np.hstack([Ks, Kw]))
        if span.shape[1] and Kt.shape[1]:
            worst = max(worst, np.max(np.abs(span.T @ Om @ Kt)))
    return worst


def check_orbit_form(G, F, theta, rng, n=8):
    """|omega - (t*theta - s*theta)| on transitive fixtures."""
    ch = F.omega.chart
    bch = theta.chart
    diff = F.omega - (pullback(ChartMap(ch, bch, G.t), theta)
                      - pullback(ChartMap(ch, bch, G.s), theta))
    worst = 0.0
    for _ in range(n):
        g = [float(c) for c in G.sample_arrow(rng)]
        for _ in range(3):
            u, v = rng.standard_normal((2, G.total_dim))
            worst = max(worst, abs(jets.value_of(diff(g, u, v))))
    return worst


# -- units: splitting, rho*, induced Dirac --------------------------------

@dataclass
class UnitSplitting:
    """Data of the canonical splitting T_x G = T_x M + A_x at a unit."""

    x: np.ndarray          # base point
    point: np.ndarray      # unit arrow eps(x)
    TM: np.ndarray         # basis of T_xM inside T_{eps(x)}G (d eps columns)
    A: np.ndarray          # basis of A_x = Ker(ds) at eps(x)
    rho: np.ndarray        # dt restricted to A, in base coordinates (n x a)
    rho_star: np.ndarray   # matrix (a x n): row j = i_{A_j} omega |_{T_xM}


def extract_rho_star(G, F, x, tol=1e-9):
    """rho*_omega at the unit over x: alpha -> i_alpha(omega)|_{T_xM}."""
    x = [float(c) for c in x]
    ex = [float(c) for c in G.unit(x)]
    Deps = _jac(G.unit, x)
    Js = _jac(G.s, ex)
    U, sv, Vt = np.linalg.svd(Js)
    r, _ = _stable_rank(sv, tol, "ds at unit")
    if r != G.base_dim:
        raise linear.DegenerateRankError("rank defect in ds at the unit")
    A = Vt[r:].T
    Jt = _jac(G.t, ex)
    rho = Jt @ A
    n = G.base_dim
    rho_star = np.zeros((A.shape[1], n))
    for j in range(A.shape[1]):
        for i in range(n):
            rho_star[j, i] = jets.value_of(F.omega(ex, A[:, j], Deps[:, i]))
    return UnitSplitting(np.array(x), np.array(ex), Deps, A, rho, rho_star)


def induced_dirac(G, F, x, tol=1e-9):
    """The Dirac structure at x induced on the base by a multiplicative form."""
    sp = extract_rho_star(G, F, x, tol)
    n = G.base_dim
    Kw, _ = kernel_of_form(F, sp.point, tol, "omega at unit")
    KTM = linear.intersect_spans(Kw, sp.TM, tol)
    # express Ker(omega) ∩ T_xM in base coordinates (d eps is injective)
    if KTM.shape[1]:
        coeff, *_ = np.linalg.lstsq(sp.TM, KTM, rcond=None)
        base_kernel = coeff
    else:
        base_kernel = np.zeros((n, 0))
    cols = []
    for j in range(sp.A.shape[1]):
        cols.append(np.concatenate([sp.rho[:, j], sp.rho_star[j]]))
    for j in range(base_kernel.shape[1]):
        cols.append(np.concatenate([base_kernel[:, j], np.zeros(n)]))
    span = np.array(cols).T if cols else np.zeros((2 * n, 0))
    B = linear.orth_basis(span, tol)
    if B.shape[1] != n:
        raise linear.DegenerateRankError(
            f"non-Dirac point: induced span has rank {B.shape[1]} != {n}")
    return linear.LinearDirac.from_span(span, tol)


# -- classification --------------------------------------------------------

@dataclass
class ClassificationReport:
    flags: dict
    dims: dict
    residuals: dict
    worst_points: dict = field(default_factory=dict)
    rank_gaps: dict = field(default_factory=dict)

    def to_json(self):
        return {"flags": self.flags, "dims": self.dims,
                "residuals": {k: float(v) for k, v in self.residuals.items()},
                "worst_points": self.worst_points,
                "rank_gaps": {k: float(v) for k, v in self.rank_gaps.items()}}


def classify(G, F, rng, n_units=8, n_arrows=16, tol=1e-9):
    """Dimension/classification suite at sampled units and arrows."""
    N, n = G.total_dim, G.base_dim
    dims = {}
    residuals = {"kernel_dim_sum": 0.0, "kernel_decomp": 0.0,
                 "kernel_orth": 0.0}
    worst = {}
    gaps = {}
    dim_ker, dim_ker_tm, dim_gx, dim_ker_ks = [], [], [], []
    over_symplectic = True
    min_gap = np.inf
    for _ in range(n_units):
        x = [float(c) for c in G.sample_unit(rng)]
        ex = [float(c) for c in G.unit(x)]
        Om = omega_matrix(F, ex)
        Kw, gap = kernel_of_form(F, ex, tol, f"unit {x}")
        min_gap = min(min_gap, gap)
        Deps = _jac(G.unit, x)
        TM = linear.orth_basis(Deps, tol)
        Ks = linear.null_basis(_jac(G.s, ex), tol)
        Kt = linear.null_basis(_jac(G.t, ex), tol)
        Kst = linear.intersect_spans(Ks, Kt, tol)
        KwTM = linear.intersect_spans(Kw, TM, tol)
        KwKs = linear.intersect_spans(Kw, Ks, tol)
        gx = linear.intersect_spans(Kw, Kst, tol)
        dim_ker.append(Kw.shape[1])
        dim_ker_tm.append(KwTM.shape[1])
        dim_ker_ks.append(KwKs.shape[1])
        dim_gx.append(gx.shape[1])
        # Ker(ds) + Ker(omega) = omega-orthogonal of Ker(dt), and
        # T_xM + Ker(omega) = omega-orthogonal of T_xM  (kernel identities)
        lhs1 = linear.orth_basis(np.hstack([Ks, Kw]), tol)
        rhs1 = linear.null_basis((Kt.T @ Om), tol) if Kt.shape[1] else np.eye(N)
        lhs2 = linear.orth_basis(np.hstack([TM, Kw]), tol)
        rhs2 = linear.null_basis((TM.T @ Om), tol)
        r_orth = 0.0
        if not linear.spans_equal(lhs1, rhs1, tol):
            r_orth = max(r_orth, 1.0)
        if not linear.spans_equal(lhs2, rhs2, tol):
            r_orth = max(r_orth, 1.0)
        residuals["kernel_orth"] = max(residuals["kernel_orth"], r_orth)
        # decomposition Ker(omega) = (Ker ∩ Ker ds) + (Ker ∩ TM)
        recomb = linear.orth_basis(np.hstack([KwKs, KwTM]), tol)
        if recomb.shape[1] != Kw.shape[1] or not linear.spans_equal(recomb, Kw, tol):
            residuals["kernel_decomp"] = max(residuals["kernel_decomp"], 1.0)
        # dimension formulas
        want_tm = 0.5 * (Kw.shape[1] + 2 * n - N)
        want_ks = 0.5 * (Kw.shape[1] - 2 * n + N)
        err = max(abs(KwTM.shape[1] - want_tm), abs(KwKs.shape[1] - want_ks))
        residuals["kernel_dim_sum"] = max(residuals["kernel_dim_sum"], err)
        if not linear.subspace_contained(Kw, Kst):
            over_symplectic = False
    dims["ker_omega_units"] = dim_ker
    dims["ker_omega_cap_TM"] = dim_ker_tm
    dims["ker_omega_cap_ker_ds"] = dim_ker_ks
    dims["g_x_omega"] = dim_gx
    gaps["units"] = min_gap

    # Dirac type at arrows
    dirac_type = True
    worst_fail = None
    min_gap_a = np.inf
    for _ in range(n_arrows):
        g = [float(c) for c in G.sample_arrow(rng)]
        Kg, gap = kernel_of_form(F, g, tol, f"arrow {g}")
        min_gap_a = min(min_gap_a, gap)
        sx = [jets.value_of(c) for c in G.s(g)]
        tx = [jets.value_of(c) for c in G.t(g)]
        Ks_, _ = kernel_of_form(F, [float(c) for c in G.unit(sx)], tol, "unit")
        Kt_, _ = kernel_of_form(F, [float(c) for c in G.unit(tx)], tol, "unit")
        want = 0.5 * (Ks_.shape[1] + Kt_.shape[1])
        if Kg.shape[1] != want:
            dirac_type = False
            if worst_fail is None:
                worst_fail = {"arrow": g, "s": sx, "t": tx,
                              "dim_ker_arrow": Kg.shape[1],
                              "expected": want}
    gaps["arrows"] = min_gap_a
    if worst_fail is not None:
        worst["dirac_type"] = worst_fail

    robust = all(d == N - 2 * n for d in dim_gx)
    presymplectic = robust and (N == 2 * n)
    nondegenerate = all(d == 0 for d in dim_gx)
    flags = {
        "is_dirac_type": dirac_type,
        "is_robust": robust,
        "is_presymplectic": presymplectic,
        "is_over_symplectic": over_symplectic,
        "is_nondegenerate": nondegenerate,
        "is_symplectic": nondegenerate and all(d == 0 for d in dim_ker)
                         and N == 2 * n,
    }
    return ClassificationReport(flags, dims, residuals, worst, gaps)


# -- gauge transformations -------------------------------------------------

def gauge(G, F, B):
    """tau_B: omega -> omega + t*B - s*B, phi -> phi - dB."""
    ch = F.omega.chart
    bch = B.chart
    omega2 = F.omega + pullback(ChartMap(ch, bch, G.t), B) \
                     - pullback(ChartMap(ch, bch, G.s), B)
    dB = ext_d(B)
    phi2 = (-dB) if F.phi is None else (F.phi - dB)
    return GroupoidForm(omega2, phi2)
