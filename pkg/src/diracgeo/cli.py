"""Scenario-driven batch runner.

Scenarios are JSON files naming a fixture (builtin or inline), a suite of
named checks, and a numeric policy.  Reports are JSON with one entry per
check; an expect map lets a scenario assert that a check FAILS (the
counterexample fixtures ship that way) while the run as a whole exits 0.

Exit codes: 0 all checks as expected, 1 check mismatch, 2 usage or parse
error.
"""

import argparse
import json
import sys
import time

import numpy as np
import scipy

from . import __version__
from . import fixtures as fx_mod
from . import foliation as FO
from . import groupoid as GR
from . import liegroup as LG
from . import pathspace as PS
from . import realization as RZ
from .expr import ExprSyntaxError, UnknownIdentifierError
from .geometry import Chart, Form
from .jets import value_of
from .linear import DEFAULT_TOL


class ScenarioError(ValueError):
    """Malformed scenario file or inline fixture."""


DEFAULT_POLICY = {"seed": 42, "samples": 8, "tol": 1e-8,
                  "grid": [32, 64, 128], "fd_step": None}


# -- fixture loading --------------------------------------------------------

def _parse_comp_key(key, degree):
    parts = key.split(",")
    if len(parts) != degree:
        raise ScenarioError(f"component key {key!r} needs {degree} indices")
    try:
        return tuple(int(c) for c in parts)
    except ValueError:
        raise ScenarioError(f"bad component key {key!r}")


def _inline_fixture(spec):
    """Inline pair-groupoid fixture: {'n': int, 'omega': {'i,j': expr},
    'phi': {'i,j,k': expr} (optional)}."""
    try:
        n = int(spec["n"])
    except (KeyError, TypeError, ValueError):
        raise ScenarioError("inline fixture needs an integer 'n'")
    if "omega" not in spec:
        raise ScenarioError("inline fixture needs 'omega' components")
    box = float(spec.get("box", 1.0))

    def sample_point(rng):
        return list(rng.uniform(-box, box, n))

    omega = {_parse_comp_key(k, 2): v for k, v in spec["omega"].items()}
    phi = None
    if spec.get("phi"):
        phi = {_parse_comp_key(k, 3): v for k, v in spec["phi"].items()}
    try:
        F, theta = fx_mod._pair_form(n, omega, phi)
    except (ExprSyntaxError, UnknownIdentifierError) as e:
        raise ScenarioError(f"inline expression: {e}")
    G = fx_mod._pair_groupoid(n, sample_point)
    return {"groupoid": G, "form": F, "theta": theta, "expected_flags": {}}


def load_fixture(ref):
    if isinstance(ref, str):
        try:
            return ref, fx_mod.load(ref)
        except KeyError as e:
            raise ScenarioError(str(e))
    if isinstance(ref, dict) and "inline" in ref:
        return "inline", _inline_fixture(ref["inline"])
    if isinstance(ref, dict) and "builtin" in ref:
        return load_fixture(ref["builtin"])
    raise ScenarioError("fixture must be a builtin name or {'inline': ...}")


# -- checks -----------------------------------------------------------------

def _residual_entry(residual, threshold, extra=None):
    entry = {"residual": float(residual), "threshold": float(threshold),
             "pass": bool(residual <= threshold)}
    if extra:
        entry.update(extra)
    return entry


def check_structure(fx, rng, policy):
    G = fx["groupoid"]
    res = G.structure_residuals(rng, policy["samples"])
    worst = max(res.values())
    return _residual_entry(worst, policy["tol"],
                           {"parts": {k: float(v) for k, v in res.items()}})


def check_multiplicative(fx, rng, policy):
    r = GR.check_multiplicative(fx["groupoid"], fx["form"], rng,
                                policy["samples"])
    return _residual_entry(r, policy["tol"])


def check_rel_closed(fx, rng, policy):
    r = GR.check_rel_closed(fx["groupoid"], fx["form"], rng,
                            policy["samples"], 3)
    return _residual_entry(r, policy["tol"])


def check_unit_identities(fx, rng, policy):
    r_eps, r_inv = GR.check_unit_identities(fx["groupoid"], fx["form"], rng,
                                            policy["samples"])
    return _residual_entry(max(r_eps, r_inv), policy["tol"],
                           {"unit_pullback": float(r_eps),
                            "inversion": float(r_inv)})


def check_kernel_orthogonality(fx, rng, policy):
    r = GR.check_kernel_orthogonality(fx["groupoid"], fx["form"], rng,
                                      policy["samples"])
    return _residual_entry(r, policy["tol"])


def check_orbit_form(fx, rng, policy):
    if fx.get("theta") is None:
        return {"pass": True, "skipped": "fixture has no base 2-form"}
    r = GR.check_orbit_form(fx["groupoid"], fx["form"], fx["theta"], rng,
                            policy["samples"])
    return _residual_entry(r, policy["tol"])


def check_classification(fx, rng, policy):
    rep = GR.classify(fx["groupoid"], fx["form"], rng,
                      policy["samples"], 2 * policy["samples"])
    expected = fx.get("expected_flags", {})
    mismatches = {k: {"expected": v, "got": rep.flags.get(k)}
                  for k, v in expected.items() if rep.flags.get(k) != v}
    entry = rep.to_json()
    entry["pass"] = not mismatches and \
        max(rep.residuals.values(), default=0.0) <= policy["tol"]
    if mismatches:
        entry["mismatches"] = mismatches
    return entry


def check_dirac_type(fx, rng, policy):
    rep = GR.classify(fx["groupoid"], fx["form"], rng,
                      policy["samples"], 2 * policy["samples"])
    entry = {"pass": bool(rep.flags["is_dirac_type"]),
             "flags": rep.flags}
    if "dirac_type" in rep.worst_points:
        entry["worst_point"] = rep.worst_points["dirac_type"]
    return entry


def check_induced_vs_group(fx, rng, policy):
    """Conjugation fixtures: the base Dirac structure induced at sampled
    units must be the group's own two-sided-translate structure."""
    if fx.get("kind") != "amm":
        return {"pass": True, "skipped": "not a conjugation fixture"}
    Gp = fx["group"]
    worst = 0.0
    for _ in range(policy["samples"]):
        x = [float(c) for c in fx["groupoid"].sample_unit(rng)]
        L1 = GR.induced_dirac(fx["groupoid"], fx["form"], x)
        L2 = LG.cartan_dirac(Gp, x)
        gap = 0.0 if L1 == L2 else float(np.max(np.abs(
            L1.canonical - L2.canonical)))
        worst = max(worst, gap)
    return _residual_entry(worst, policy["tol"])


def check_rho_star_half_flat(fx, rng, policy):
    """Conjugation fixtures: rho* extracted at units must be the
    ((v_r + v_l)/2)-flat of the algebra vector carried by each Ker(ds)
    basis element (at a unit those live purely in the arrow slot)."""
    if fx.get("kind") != "amm":
        return {"pass": True, "skipped": "not a conjugation fixture"}
    Gp = fx["group"]
    d = Gp.dim
    worst = 0.0
    for _ in range(policy["samples"]):
        x = [float(c) for c in fx["groupoid"].sample_unit(rng)]
        sp = GR.extract_rho_star(fx["groupoid"], fx["form"], x)
        Gm = LG.chart_metric(Gp, x)
        for j in range(sp.A.shape[1]):
            v_alg = list(sp.A[:d, j])
            worst = max(worst, float(np.max(np.abs(sp.A[d:, j]))))
            vr = np.array([value_of(c) for c in Gp.right_translate(x, v_alg)])
            vl = np.array([value_of(c) for c in Gp.left_translate(x, v_alg)])
            ref = Gm @ (0.5 * (vr + vl))
            rho_ref = vr - vl
            worst = max(worst, float(np.max(np.abs(sp.rho_star[j] - ref))))
            worst = max(worst, float(np.max(np.abs(sp.rho[:, j] - rho_ref))))
    return _residual_entry(worst, policy["tol"])


def check_quasi_ham(fx, rng, policy):
    Q = RZ.rotation_quasi_ham(0.5)
    samples = _annulus_samples(rng, policy["samples"])
    r1, r2, r3, r_inv = RZ.quasi_ham_check(Q, samples)
    worst = max(r1, r2, r3, r_inv)
    return _residual_entry(worst, policy["tol"],
                           {"d_eta": float(r1), "moment": float(r2),
                            "kernel_match": float(r3),
                            "invariance": float(r_inv)})


def check_quasi_ham_negative(fx, rng, policy):
    Q = RZ.rotation_quasi_ham(1.0)
    samples = _annulus_samples(rng, policy["samples"])
    r2 = RZ.quasi_ham_check(Q, samples)[1]
    return {"residual": float(r2), "threshold": 0.1, "pass": bool(r2 >= 0.1)}


def check_equivalence_crosscheck(fx, rng, policy):
    Q = RZ.rotation_quasi_ham(0.5)
    samples = _annulus_samples(rng, policy["samples"])
    rep = RZ.equivalence_crosscheck(Q, samples)
    worst = max(rep["solve_residual"], rep["generator_mismatch"])
    return _residual_entry(worst, policy["tol"],
                           {"dirac_map": rep["dirac_map"],
                            "unique": rep["unique"],
                            "kernel_iso_ok": rep["kernel_iso_ok"]})


def _annulus_samples(rng, n):
    out = []
    while len(out) < n:
        p = rng.uniform(-1.2, 1.2, 2)
        if np.linalg.norm(p) > 0.3:
            out.append(list(p))
    return out


def _pathspace_scenario(policy):
    pres = PS.tangent_presentation({(0, 1): "1.0"}, 2)
    eta = PS.GaugeParameter(["1.0 + x2", "t - x1*x1"])

    def make(N):
        path = PS.sampled_path(pres, ["t", "t*t*(1.0-t)"],
                               ["1.0", "2.0*t - 3.0*t*t"], N)
        probes = [PS.sampled_tangent(path, ["sin(t)", "t*t"],
                                     ["cos(t)", "2.0*t"]),
                  PS.sampled_tangent(path, ["t", "1.0 - t"],
                                     ["1.0", "-1.0"])]
        return path, probes

    return pres, eta, make


def check_basicness(fx, rng, policy):
    _, eta, make = _pathspace_scenario(policy)
    grid = policy["grid"]
    residuals = []
    for N in grid:
        path, probes = make(N)
        residuals.append(PS.basicness_residual(path, eta, None, probes,
                                               policy["fd_step"]))
    order = PS.fitted_order(grid, residuals)
    mid = residuals[min(1, len(residuals) - 1)]
    entry = _residual_entry(mid, 5e-4, {
        "grid": list(grid),
        "convergence": [float(r) for r in residuals],
        "order": float(order)})
    entry["pass"] = entry["pass"] and order >= 1.8
    return entry


def check_sigma_contraction(fx, rng, policy):
    _, eta, make = _pathspace_scenario(policy)
    path, _ = make(max(policy["grid"]))
    r = PS.sigma_contraction_residual(path, eta)
    return _residual_entry(r, 1e-10)


def check_path_boundary_identity(fx, rng, policy):
    N = max(policy["grid"])
    ts = np.linspace(0.0, 1.0, N + 1)
    gamma = ts.reshape(-1, 1)
    X = np.ones_like(gamma)
    worst = max(
        PS.path_variation_identity_residual(["t"], gamma, X),
        PS.path_variation_identity_residual(["x1"], gamma, X))
    return _residual_entry(worst, 1e-6)


def _foliation_scenario():
    fol = FO.CoordFoliation(3, 2)
    ch = fol.chart
    theta = FO.FoliatedForm(fol, 2, {(0, 1): "x3"})
    ext = Form.from_components(ch, 2, {(0, 1): "x3"})
    phi = Form.from_components(ch, 3, {(0, 1, 2): "sin(x3) + x1"})
    return fol, theta, ext, phi


def check_leafwise_d_squared(fx, rng, policy):
    fol, _, _, _ = _foliation_scenario()
    f = FO.FoliatedForm(fol, 0, {(): "x3*x1 + sin(x2)"})
    samples = [list(v) for v in rng.uniform(-1, 1, (policy["samples"], 3))]
    r = FO.d_F(FO.d_F(f)).max_abs(samples)
    return _residual_entry(r, 1e-12)


def check_transverse_derivative(fx, rng, policy):
    fol, theta, ext, _ = _foliation_scenario()
    samples = [list(v) for v in rng.uniform(-1, 1, (policy["samples"], 3))]
    dn = FO.d_nu(theta, ext, samples)
    u = FO.classifying_rep(fol, ext)
    r = (u - dn).max_abs(samples)
    return _residual_entry(r, 1e-9)


def check_twisted_shift(fx, rng, policy):
    fol, _, ext, phi = _foliation_scenario()
    samples = [list(v) for v in rng.uniform(-1, 1, (policy["samples"], 3))]
    r = FO.twisted_shift_residual(fol, ext, phi, samples)
    return _residual_entry(r, 1e-9)


CHECKS = {
    "structure": check_structure,
    "multiplicative": check_multiplicative,
    "rel-closed": check_rel_closed,
    "unit-identities": check_unit_identities,
    "kernel-orthogonality": check_kernel_orthogonality,
    "orbit-form": check_orbit_form,
    "classification": check_classification,
    "dirac-type": check_dirac_type,
    "induced-dirac": check_induced_vs_group,
    "rho-star-half-flat": check_rho_star_half_flat,
    "quasi-ham": check_quasi_ham,
    "quasi-ham-negative": check_quasi_ham_negative,
    "equivalence-crosscheck": check_equivalence_crosscheck,
    "basicness": check_basicness,
    "sigma-contraction": check_sigma_contraction,
    "path-boundary-identity": check_path_boundary_identity,
    "leafwise-d-squared": check_leafwise_d_squared,
    "transverse-derivative": check_transverse_derivative,
    "twisted-shift": check_twisted_shift,
}


# -- runner -----------------------------------------------------------------

def load_scenario(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e}")
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: line {e.lineno} col {e.colno}: {e.msg}")
    if not isinstance(data, dict) or "id" not in data:
        raise ScenarioError(f"{path}: scenario needs an 'id'")
    if not isinstance(data.get("suite"), list) or not data["suite"]:
        raise ScenarioError(f"{path}: scenario needs a non-empty 'suite'")
    for name in data["suite"]:
        if name not in CHECKS:
            raise ScenarioError(
                f"{path}: unknown check {name!r}; known: "
                + ", ".join(sorted(CHECKS)))
    return data


def merge_policy(scenario, args):
    policy = dict(DEFAULT_POLICY)
    policy.update(scenario.get("policy", {}))
    for key in ("seed", "samples", "tol", "fd_step"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            policy[key] = val
    if getattr(args, "grid", None):
        policy["grid"] = args.grid
    if policy["samples"] <= 0 or policy["tol"] <= 0 or \
            any(n <= 1 for n in policy["grid"]):
        raise ScenarioError("policy values must be positive")
    return policy


def run_scenario(scenario, args):
    policy = merge_policy(scenario, args)
    _, fx = load_fixture(scenario.get("fixture", "pair-groupoid-r2"))
    expect = dict(scenario.get("expect", {}))
    if args.expect_file:
        with open(args.expect_file) as fh:
            expect.update(json.load(fh).get(scenario["id"], {}))
    checks = {}
    ok = True
    for name in sorted(set(scenario["suite"])):
        # derive the stream from the check name bytes so each check is
        # reproducible independently of suite order
        rng = np.random.default_rng(
            [policy["seed"]] + list(name.encode()))
        entry = CHECKS[name](fx, rng, policy)
        expected = expect.get(name, True)
        entry["expected"] = expected
        entry["as_expected"] = bool(entry["pass"]) == bool(expected)
        ok = ok and entry["as_expected"]
        checks[name] = entry
    report = {
        "schema": "v1",
        "scenario": scenario["id"],
        "seed": policy["seed"],
        "policy": {k: policy[k] for k in sorted(policy)},
        "checks": checks,
        "versions": {"diracgeo": __version__,
                     "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "ok": ok,
    }
    return report, ok


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="diracgeo",
        description="Run scenario check-suites and emit JSON reports.")
    sub = parser.add_subparsers(dest="command")
    runp = sub.add_parser("run", help="run scenario files")
    runp.add_argument("scenarios", nargs="+")
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--samples", type=int, default=None)
    runp.add_argument("--tol", type=float, default=None)
    runp.add_argument("--grid", type=lambda s: [int(c) for c in s.split(",")],
                      default=None)
    runp.add_argument("--fd-step", type=float, default=None)
    runp.add_argument("--out", default=None)
    runp.add_argument("--expect-file", default=None)
    sub.add_parser("list-fixtures", help="list builtin fixtures")
    sub.add_parser("list-checks", help="list known checks")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.command == "list-fixtures":
        print("\n".join(sorted(fx_mod.FIXTURES)))
        return 0
    if args.command == "list-checks":
        print("\n".join(sorted(CHECKS)))
        return 0
    if args.command != "run":
        parser.print_usage()
        return 2

    reports = []
    all_ok = True
    start = time.time()
    try:
        for path in args.scenarios:
            scenario = load_scenario(path)
            report, ok = run_scenario(scenario, args)
            reports.append(report)
            all_ok = all_ok and ok
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    payload = {"schema": "v1", "reports": reports,
               "wall_time": round(time.time() - start, 3)}
    text = json.dumps(payload, indent=2, sort_keys=True,
                      default=_json_default)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
