"""Presymplectic realization and quasi-hamiltonian checkers.

A realization is (P, eta, mu) mapping into a Dirac-structured target; the
defining property is that each target frame element (w, xi) lifts to a
unique tangent vector X with d mu(X) = w and i_X eta = mu* xi.  The
quasi-hamiltonian axioms specialize the target to the Cartan-Dirac
structure on a group.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from . import jets, linear
from .geometry import Chart, ChartMap, Form, VectorField, ext_d, interior, \
    lie_derivative, pullback
from .liegroup import MatrixGroup, cartan_dirac_field, cartan_form, \
    chart_metric, torus


def _dot(a, b):
    total = 0.0
    for x, y in zip(a, b):
        total = total + x * y
    return total


def eta_matrix(eta, p):
    """Component matrix H[a, b] = eta(e_a, e_b) at p."""
    n = eta.chart.dim
    E = np.eye(n)
    H = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            H[a, b] = jets.value_of(eta(p, list(E[a]), list(E[b])))
            H[b, a] = -H[a, b]
    return H


@dataclass
class RealizationData:
    P: Chart
    eta: Form                # 2-form on P
    mu: ChartMap             # P -> target chart
    target: object           # has .dirac_at(y), .phi (3-form or None)

    def closedness_residual(self, samples):
        """|d eta + mu* phi| at samples over tangent triples."""
        d_eta = ext_d(self.eta)
        total = d_eta if self.target.phi is None else \
            d_eta + pullback(self.mu, self.target.phi)
        n = self.P.dim
        E = np.eye(n)
        worst = 0.0
        for p in samples:
            for a in range(n):
                for b in range(a + 1, n):
                    for c in range(b + 1, n):
                        worst = max(worst, abs(jets.value_of(
                            total(p, list(E[a]), list(E[b]), list(E[c])))))
        return worst


def realization_check(R, samples, tol=1e-8):
    """Solve d mu(X) = w, i_X eta = mu* xi for each target frame element.

    Returns a report dict with solvability and uniqueness residuals, the
    kernel-isomorphism diagnostics, and the induced action vectors per
    sample (one X per frame column of the target Dirac space).
    """
    n = R.P.dim
    report = {
        "solve_residual": 0.0,
        "kernel_dim_max": 0,
        "dirac_map": True,
        "unique": True,
        "kernel_iso_ok": True,
        "kernel_iso_residual": 0.0,
        "action_vectors": [],
        "failures": [],
    }
    for p in samples:
        Dmu = np.array(jets.jacobian(R.mu.func, p))
        H = eta_matrix(R.eta, p)
        y = [jets.value_of(c) for c in R.mu(p)]
        L = R.target.dirac_at(y)
        m = L.dim
        A = np.vstack([Dmu, H.T])
        vecs = []
        for row in L.canonical:
            w, xi = row[:m], row[m:]
            rhs = np.concatenate([w, Dmu.T @ xi])
            X, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            res = float(np.linalg.norm(A @ X - rhs, np.inf))
            report["solve_residual"] = max(report["solve_residual"], res)
            if res > tol:
                report["dirac_map"] = False
                report["failures"].append(
                    {"kind": "not a Dirac map", "point": list(map(float, p)),
                     "residual": res})
            vecs.append([float(c) for c in X])
        report["action_vectors"].append(vecs)
        kdim = linear.null_basis(A).shape[1]
        report["kernel_dim_max"] = max(report["kernel_dim_max"], kdim)
        if kdim > 0:
            report["unique"] = False
            report["failures"].append(
                {"kind": "degenerate realization",
                 "point": list(map(float, p)), "kernel_dim": kdim})
        # d mu maps Ker(eta) isomorphically onto Ker(L)
        ker_eta = linear.null_basis(H)
        ker_L = linear.induced(L).kernel
        image = Dmu @ ker_eta if ker_eta.size else np.zeros((len(y), 0))
        if ker_eta.shape[1] != ker_L.shape[1]:
            report["kernel_iso_ok"] = False
        elif ker_eta.shape[1] > 0:
            if np.linalg.matrix_rank(image, tol=1e-10) < ker_eta.shape[1]:
                report["kernel_iso_ok"] = False
            gap = _span_gap(image, ker_L)
            report["kernel_iso_residual"] = max(
                report["kernel_iso_residual"], gap)
            if gap > 1e-7:
                report["kernel_iso_ok"] = False
    return report


def _span_gap(A, B):
    """sin of the largest principal angle between the column spans."""
    if A.shape[1] == 0 and B.shape[1] == 0:
        return 0.0
    if A.shape[1] != B.shape[1]:
        return 1.0
    ang = subspace_angles(np.asarray(A, float), np.asarray(B, float))
    return float(np.sin(np.max(ang))) if ang.size else 0.0


@dataclass
class QuasiHamData:
    P: Chart
    group: MatrixGroup
    generators: list         # VectorFields rho_P(e_i) on P
    eta: Form
    mu: ChartMap             # P -> group chart

    def rho_P(self, v):
        return VectorField(
            self.P,
            lambda p: [sum(v[i] * c for i, c in
                           enumerate(col)) for col in
                       zip(*[g(p) for g in self.generators])])

    def moment_one_form(self, v):
        """(1/2) mu*((lam + lam_bar)(.), v) as a 1-form on P."""
        Gp = self.group

        def ev(p, vs):
            u = self.mu(p)
            W = self.mu.push(p, vs[0])
            lw = [a + b for a, b in zip(Gp.lam(u, W), Gp.lam_bar(u, W))]
            return 0.5 * Gp.inner(lw, v)

        return Form(self.P, 1, ev)


def equivariance_residual(Q, samples):
    """|d mu(rho_P(v)) - (v_r - v_l) at mu(p)| over the algebra basis."""
    Gp = Q.group
    worst = 0.0
    for p in samples:
        u = [jets.value_of(c) for c in Q.mu(p)]
        for e in np.eye(Gp.dim):
            lhs = Q.mu.push(p, Q.rho_P(list(e))(p))
            vr = Gp.right_translate(u, list(e))
            vl = Gp.left_translate(u, list(e))
            rhs = [a - b for a, b in zip(vr, vl)]
            worst = max(worst, max(abs(jets.value_of(a - b))
                                   for a, b in zip(lhs, rhs)))
    return worst


def quasi_ham_check(Q, samples, tol=1e-8):
    """Residuals (r1, r2, r3, r_inv) of the quasi-hamiltonian axioms.

    r1: |d eta + mu* phi|;  r2: |i_{rho_P(v)} eta - moment 1-form|;
    r3: span gap between Ker(eta_p) and rho_P(Ker(Ad_{mu(p)} + 1));
    r_inv: |L_{rho_P(v)} eta| (invariance of eta under the action).
    """
    Gp = Q.group
    n = Q.P.dim
    E = np.eye(n)
    phi = cartan_form(Gp)
    R = RealizationData(Q.P, Q.eta, Q.mu, cartan_dirac_field(Gp))
    r1 = R.closedness_residual(samples)
    r2 = 0.0
    r3 = 0.0
    r_inv = 0.0
    for p in samples:
        H = eta_matrix(Q.eta, p)
        for v in np.eye(Gp.dim):
            v = list(v)
            Xv = Q.rho_P(v)
            beta = Q.moment_one_form(v)
            for e in E:
                val = Q.eta(p, Xv(p), list(e)) - beta(p, list(e))
                r2 = max(r2, abs(jets.value_of(val)))
            Leta = lie_derivative(Xv, Q.eta)
            for a in range(n):
                for b in range(a + 1, n):
                    r_inv = max(r_inv, abs(jets.value_of(
                        Leta(p, list(E[a]), list(E[b])))))
        u = [jets.value_of(c) for c in Q.mu(p)]
        Adp1 = Gp.Ad_matrix(u) + np.eye(Gp.dim)
        ker_v = linear.null_basis(Adp1)
        gen_mat = np.array([[jets.value_of(c) for c in g(p)]
                            for g in Q.generators]).T  # n x dim(h)
        image = gen_mat @ ker_v if ker_v.size else np.zeros((n, 0))
        ker_eta = linear.null_basis(H)
        r3 = max(r3, _span_gap(image, ker_eta))
    return r1, r2, r3, r_inv


def equivalence_crosscheck(Q, samples, tol=1e-8):
    """Run the realization solve against the Cartan-Dirac target and compare
    the solved action vectors with Q's generators.

    The Cartan-Dirac frame element for an algebra vector v is
    (v_r - v_l, ((v_r + v_l)/2)-flat); its realization solve must return
    rho_P(v).
    """
    Gp = Q.group
    R = RealizationData(Q.P, Q.eta, Q.mu, cartan_dirac_field(Gp))
    report = realization_check(R, samples, tol)
    mismatch = 0.0
    n = Q.P.dim
    for p in samples:
        Dmu = np.array(jets.jacobian(Q.mu.func, p))
        H = eta_matrix(Q.eta, p)
        A = np.vstack([Dmu, H.T])
        u = [jets.value_of(c) for c in Q.mu(p)]
        Gm = chart_metric(Gp, u)
        for e in np.eye(Gp.dim):
            vr = np.array([jets.value_of(c)
                           for c in Gp.right_translate(u, list(e))])
            vl = np.array([jets.value_of(c)
                           for c in Gp.left_translate(u, list(e))])
            w = vr - vl
            xi = Gm @ (0.5 * (vr + vl))
            rhs = np.concatenate([w, Dmu.T @ xi])
            X, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            ref = [jets.value_of(c) for c in Q.rho_P(list(e))(p)]
            mismatch = max(mismatch, max(abs(a - b)
                                         for a, b in zip(X, ref)))
    report["generator_mismatch"] = mismatch
    return report


def action_compatibility_residual(m_P, omega_L, eta, g_dim, p_dim,
                                  sample_pairs, rng, n_samples=8,
                                  s_of_g=None, mu_of_p=None):
    """Residual of the groupoid-action compatibility on composable pairs:
    eta pulled back by the action map minus (omega_L on the arrow part plus
    eta on the base part).

    When the source and moment maps are given, tangent probes are drawn
    from the tangent space of the composable locus {s(g) = mu(p)};
    otherwise every pair is treated as composable.
    """
    worst = 0.0
    for _ in range(n_samples):
        g, p = sample_pairs(rng)
        z = list(g) + list(p)
        Dm = np.array(jets.jacobian(lambda q: m_P(q[:g_dim], q[g_dim:]), z))
        q = [jets.value_of(c) for c in m_P(g, p)]
        if s_of_g is None:
            basis = np.eye(g_dim + p_dim)
        else:
            Ds = np.array(jets.jacobian(s_of_g, list(g)))
            Dmu = np.array(jets.jacobian(mu_of_p, list(p)))
            basis = linear.null_basis(np.hstack([Ds, -Dmu])).T
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                V, W = basis[a], basis[b]
                lhs = eta(q, list(Dm @ V), list(Dm @ W))
                rhs = omega_L(list(g), list(V[:g_dim]), list(W[:g_dim])) \
                    + eta(list(p), list(V[g_dim:]), list(W[g_dim:]))
                worst = max(worst, abs(jets.value_of(lhs - rhs)))
    return worst


# -- the plane with a circle action -----------------------------------------

def rotation_quasi_ham(factor=0.5):
    """The plane R^2 with area form dx^dy, the clockwise rotation
    generator (y, -x), and moment map mu = factor*(x^2 + y^2) into the
    circle group chart.  factor=1/2 satisfies the axioms; other factors
    give a negative control."""
    ch = Chart(("x", "y"))
    Gp = torus(1)
    eta = Form.from_components(ch, 2, {(0, 1): "1.0"})
    gen = VectorField.from_components(ch, ("y", "-x"))
    mu = ChartMap(ch, Chart(Gp.chart_names()),
                  lambda p: [factor * (p[0] * p[0] + p[1] * p[1])])
    return QuasiHamData(ch, Gp, [gen], eta, mu)
