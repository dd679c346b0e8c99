"""Named experiments: each runs one verification pipeline from a config tree
and returns a report dict, CSV tables and PASS/FAIL assertions.

Everything downstream of a fixed config (and its seeds) is deterministic, so
repeated runs serialize to byte-identical report files.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from ._backend import backend_name
from .analysis import (assemble_stokes, build_graded_mesh,
                       counterexample_report, inf_sup_constant, korn_constant,
                       lifted_korn_transfer_check)
from .divsolve import (BetaOutOfRangeError, DegenerateConstantError,
                       hardy_check, solve_divergence_cusp)
from .fields import ScalarField, bump_field, coordinate_field
from .geometry import CuspDomain
from .quadrature import make_rule, project_mean_zero
from .weights import admissible_beta_interval, beta_hat, is_muckenhoupt_ap


@dataclass
class Assertion:
    name: str
    passed: bool
    detail: str


@dataclass
class ExperimentResult:
    name: str
    report: dict
    tables: dict
    assertions: list

    @property
    def passed(self):
        return all(a.passed for a in self.assertions)


def _result(name, cfg, results, tables, assertions):
    report = {
        "experiment": name,
        "version": __version__,
        "backend": backend_name(),
        "config": cfg,
        "results": results,
        "assertions": [{"name": a.name, "passed": a.passed, "detail": a.detail}
                       for a in assertions],
    }
    return ExperimentResult(name, report, tables, assertions)


def _domain(cfg):
    d = cfg["domain"]
    return CuspDomain(float(d["gamma"]), int(d["k"]), int(d["m"]))


# ----------------------------------------------------------------------
def exponent_identity_draws(n_draws=1000, seed=123):
    """Exact-rational check of alpha p eta + alpha - 1 = p beta_hat at the
    minimal eta = beta + gamma - 1; returns the number of failures."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(n_draws):
        gamma = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 12)))
        if gamma < 1:
            gamma = 1 / gamma
        p = Fraction(int(rng.integers(11, 60)), 10)
        beta = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 10)))
        eta = beta + gamma - 1
        pprime = p / (p - 1)
        bhat = (beta + (gamma - 1) / pprime) / gamma
        alpha = 1 / gamma
        if alpha * p * eta + alpha - 1 != p * bhat:
            failures += 1
    return failures


def run_divsolve(cfg):
    dom = _domain(cfg)
    qc, dc = cfg["quadrature"], cfg["divsolve"]
    tol = cfg["tolerances"]["residual"]
    orders = [int(qc["N"]), int(round(qc["N"] * dc["refine_factor"]))]

    runs = []
    for N in orders:
        rule = make_rule(dom, N, qc["grading"])
        f = project_mean_zero(rule, coordinate_field(0))
        _, rep = solve_divergence_cusp(
            dom, f, dc["beta"], dc["eta"], dc["p"], rule_order=N,
            rule_grading=qc["grading"], norm_rule_order=dc["norm_N"],
            probe_count=dc["probes"], fd_step=dc["h_fd"],
            probe_margin=dc["probe_margin"], seed=dc["seed"])
        runs.append(rep)

    drift = abs(runs[1].ratio - runs[0].ratio) / runs[0].ratio
    id_failures = exponent_identity_draws()

    assertions = [
        Assertion("residual_within_tol",
                  runs[0].residual_max <= tol,
                  f"residual {runs[0].residual_max:.3e} vs tol {tol:.1e}"),
        Assertion("residual_decreases_under_refinement",
                  runs[1].residual_max < runs[0].residual_max,
                  f"{runs[0].residual_max:.3e} -> {runs[1].residual_max:.3e}"),
        Assertion("ratio_finite",
                  all(np.isfinite(r.ratio) and r.ratio > 0 for r in runs),
                  f"ratios {[round(r.ratio, 6) for r in runs]}"),
        Assertion("ratio_stable_under_refinement",
                  drift <= dc["ratio_drift_tol"],
                  f"relative drift {drift:.3f} vs {dc['ratio_drift_tol']}"),
        Assertion("exponent_identity_exact",
                  id_failures == 0,
                  f"{id_failures} failures in 1000 rational draws"),
    ]
    results = {
        "base": runs[0].__dict__, "refined": runs[1].__dict__,
        "ratio_drift": drift, "exponent_identity_failures": id_failures,
    }
    tables = {"runs": (runs[0].csv_header(),
                       [r.to_csv_row() for r in runs])}
    return _result("divsolve", cfg, results, tables, assertions)


# ----------------------------------------------------------------------
def _hardy_bumps(dom, n_bumps, seed):
    rng = np.random.default_rng(seed)
    gamma = dom.gamma
    bumps = []
    for _ in range(n_bumps):
        cx = rng.uniform(0.35, 0.75)
        rx = rng.uniform(0.1, min(0.2, 0.95 - cx, cx - 0.08))
        ry = rng.uniform(0.3, 0.9) * (cx - rx) ** gamma
        cy = rng.uniform(-0.2, 0.2) * (cx - rx) ** gamma
        bumps.append(bump_field([cx, cy], [rx, ry]))
    return bumps


def run_hardy(cfg):
    dom = _domain(cfg)
    hc = cfg["hardy"]
    rule = make_rule(dom, int(hc["N"]), hc["grading"])
    bumps = _hardy_bumps(dom, int(hc["n_bumps"]), int(hc["seed"]))

    rows = []
    worst = 0.0
    degenerate = []
    for bi, v in enumerate(bumps):
        for p in hc["ps"]:
            for kap in hc["kappas"]:
                if p * kap - p + 1.0 == 0.0:
                    if bi == 0:
                        try:
                            hardy_check(dom, v, kap, p, rule)
                            degenerate.append((p, kap, False))
                        except DegenerateConstantError:
                            degenerate.append((p, kap, True))
                    continue
                chk = hardy_check(dom, v, kap, p, rule)
                ratio = chk.lhs / (chk.bound * chk.rhs)
                worst = max(worst, ratio)
                rows.append([bi, p, kap, chk.lhs, chk.rhs, chk.bound, ratio])

    slack = hc["slack"]
    assertions = [
        Assertion("hardy_bound_holds",
                  worst <= slack,
                  f"worst lhs/(bound*rhs) = {worst:.4f} vs slack {slack}"),
        Assertion("degenerate_pairs_raise",
                  all(flag for _, _, flag in degenerate) if degenerate else True,
                  f"degenerate (p, kappa) pairs {[(p, k) for p, k, _ in degenerate]}"),
    ]
    results = {"worst_ratio": worst,
               "checked": len(rows),
               "degenerate_pairs": [[p, k] for p, k, _ in degenerate]}
    tables = {"hardy": (["bump", "p", "kappa", "lhs", "rhs", "bound", "ratio"],
                        rows)}
    return _result("hardy", cfg, results, tables, assertions)


# ----------------------------------------------------------------------
def _level_constants(cfg_block, constant_fn):
    levels = int(cfg_block["levels"])
    eps0 = float(cfg_block["eps0"])
    out = []
    for lev in range(levels):
        out.append(constant_fn(lev, eps0 * 4.0 ** (-lev)))
    return out


def _trend_assertion(name, values, expect, stability, tol_kind):
    if expect == "decreasing":
        ok = all(values[i + 1] < values[i] for i in range(len(values) - 1))
        detail = " > ".join(f"{v:.5f}" for v in values)
    elif expect == "increasing":
        ok = all(values[i + 1] > values[i] for i in range(len(values) - 1))
        detail = " < ".join(f"{v:.5f}" for v in values)
    elif expect == "stable":
        r = values[-1] / values[-2]
        if tol_kind == "ratio":
            ok = r >= stability
            detail = f"last-two ratio {r:.4f} vs floor {stability}"
        else:
            ok = abs(r - 1.0) <= stability
            detail = f"last-two ratio {r:.4f} within {stability} of 1"
    else:
        raise ValueError(f"unknown trend {expect!r}")
    ok = ok and all(np.isfinite(v) and v > 0 for v in values)
    return Assertion(name, bool(ok), detail)


def run_infsup(cfg):
    ic = cfg["infsup"]
    rows = []
    assertions = []
    results = {"cases": []}
    for case in ic["cases"]:
        gamma = float(case["gamma"])
        expo = float(case["exponent"])
        dom = CuspDomain(gamma, 1, 0)
        constants = []
        cells = []

        def constant(lev, eps):
            mesh = build_graded_mesh(dom, lev, eps,
                                     base_layers=int(ic["base_layers"]),
                                     base_cross=int(ic["base_cross"]))
            saddle = assemble_stokes(mesh, expo)
            c = inf_sup_constant(saddle)
            cells.append(mesh.cell_count)
            rows.append([f"g{gamma:g}_w{expo:g}", lev, mesh.cell_count,
                         mesh.eps_mesh, c])
            return c

        constants = _level_constants(ic, constant)
        label = f"infsup_gamma{gamma:g}_exponent{expo:g}"
        assertions.append(_trend_assertion(
            f"{label}_{case['expect']}", constants, case["expect"],
            ic["stability_ratio"], "ratio"))
        results["cases"].append({"gamma": gamma, "exponent": expo,
                                 "expect": case["expect"],
                                 "constants": constants, "cells": cells})
    tables = {"constants": (["case", "level", "cells", "eps_mesh", "constant"],
                            rows)}
    return _result("infsup", cfg, results, tables, assertions)


def run_korn(cfg):
    kc = cfg["korn"]
    ball = (tuple(float(v) for v in kc["ball_center"]),
            float(kc["ball_radius"]))
    rows = []
    assertions = []
    results = {"cases": []}
    for case in kc["cases"]:
        gamma = float(case["gamma"])
        beta = float(case["beta"])
        rexp = case["right_exponent"]
        rexp = None if rexp is None else float(rexp)
        dom = CuspDomain(gamma, 1, 0)
        cells = []

        def constant(lev, eps):
            mesh = build_graded_mesh(dom, lev, eps,
                                     base_layers=int(kc["base_layers"]),
                                     base_cross=int(kc["base_cross"]))
            c = korn_constant(mesh, beta, ball=ball,
                              right_weight_exponent=rexp)
            cells.append(mesh.cell_count)
            rows.append([f"g{gamma:g}_b{beta:g}_r{'auto' if rexp is None else f'{rexp:g}'}",
                         lev, mesh.cell_count, mesh.eps_mesh, c])
            return c

        constants = _level_constants(kc, constant)
        rlabel = "auto" if rexp is None else f"{rexp:g}"
        label = f"korn_gamma{gamma:g}_beta{beta:g}_right{rlabel}"
        assertions.append(_trend_assertion(
            f"{label}_{case['expect']}", constants, case["expect"],
            kc["stability_tol"], "band"))
        results["cases"].append({"gamma": gamma, "beta": beta,
                                 "right_exponent": rexp,
                                 "expect": case["expect"],
                                 "constants": constants, "cells": cells})
    tables = {"constants": (["case", "level", "cells", "eps_mesh", "constant"],
                            rows)}
    return _result("korn", cfg, results, tables, assertions)


# ----------------------------------------------------------------------
def run_counterexample(cfg):
    cc = cfg["counterexample"]
    rep = counterexample_report(rule_order=int(cc["N"]),
                                rule_grading=cc["grading"],
                                refine_order=int(cc["refine_N"]),
                                n_test_bumps=int(cc["n_bumps"]),
                                bump_rule_order=int(cc["bump_rule_N"]),
                                seed=int(cc["seed"]))
    vt = cc["value_tol"]
    growth = rep["truncated_l2_sq"][-1] / rep["truncated_l2_sq"][-2]
    lr_change = abs(rep["lr_probe_fine"] - rep["lr_probe_coarse"]) \
        / rep["lr_probe_coarse"]
    r0_expected = 2.0 - 4.0 * (rep["gamma"] - 1.0) / (rep["gamma"] * 3.0 - 1.0)

    assertions = [
        Assertion("int_inv_sq",
                  abs(rep["int_inv_sq"] - 2.0) / 2.0 <= 1e-3,
                  f"{rep['int_inv_sq']:.6f} vs 2 (rel tol 1e-3)"),
        Assertion("conjugate_witness",
                  abs(rep["conjugate_witness_l2_sq"] - 8.0 / 3.0) / (8.0 / 3.0) <= vt,
                  f"{rep['conjugate_witness_l2_sq']:.6f} vs 8/3"),
        Assertion("weighted_membership",
                  abs(rep["weighted_l2_sq"] - 592.0 / 315.0) / (592.0 / 315.0) <= vt,
                  f"{rep['weighted_l2_sq']:.6f} vs 592/315"),
        Assertion("truncated_l2_divergence",
                  growth >= cc["truncation_growth"],
                  f"growth {growth:.2f}x from eps={rep['truncation_eps'][-2]:g} "
                  f"to {rep['truncation_eps'][-1]:g}"),
        Assertion("weak_derivative_identity",
                  max(rep["identity_errors"]) <= cc["identity_tol"],
                  f"max rel err {max(rep['identity_errors']):.2e}"),
        Assertion("lr_threshold_formula",
                  abs(rep["r0"] - r0_expected) <= 1e-14 and abs(rep["r0"] - 1.2) <= 1e-14,
                  f"r0 = {rep['r0']}"),
        Assertion("lr_probe_finite_under_refinement",
                  np.isfinite(rep["lr_probe_fine"]) and lr_change <= 1e-2,
                  f"coarse {rep['lr_probe_coarse']:.6f}, fine "
                  f"{rep['lr_probe_fine']:.6f}, rel change {lr_change:.2e}"),
    ]
    rows = [[e, v] for e, v in zip(rep["truncation_eps"], rep["truncated_l2_sq"])]
    tables = {"truncation": (["eps", "truncated_l2_sq"], rows)}
    return _result("counterexample", cfg, rep, tables, assertions)


# ----------------------------------------------------------------------
def run_apcheck(cfg):
    ac = cfg["apcheck"]
    mus = np.linspace(float(ac["mu_min"]), float(ac["mu_max"]),
                      int(ac["mu_points"]))
    rows = []
    mismatches = 0
    endpoint_ok = True
    count = 0
    for n, m in (tuple(d) for d in ac["dims"]):
        for p in ac["ps"]:
            for mu in mus:
                inside = is_muckenhoupt_ap(float(mu), float(p), n, m)
                expected = (-(n - m) < mu < (n - m) * (p - 1.0))
                mismatches += int(inside != expected)
                count += 1
                rows.append([float(mu), float(p), n, m, int(inside)])
            lo_end = is_muckenhoupt_ap(-(n - m), float(p), n, m)
            hi_end = is_muckenhoupt_ap((n - m) * (p - 1.0), float(p), n, m)
            endpoint_ok = endpoint_ok and not lo_end and not hi_end
    assertions = [
        Assertion("classifier_matches_interval", mismatches == 0,
                  f"{mismatches} mismatches over {count} grid points"),
        Assertion("endpoints_excluded", endpoint_ok,
                  "both interval endpoints classify as outside"),
    ]
    results = {"grid_points": count, "mismatches": mismatches}
    tables = {"apgrid": (["mu", "p", "n", "m", "in_ap"], rows)}
    return _result("apcheck", cfg, results, tables, assertions)


def run_scan_beta(cfg):
    dom = _domain(cfg)
    sc = cfg["scan_beta"]
    p = float(sc["p"])
    lo, hi = admissible_beta_interval(dom.gamma, p, dom.n, dom.m)
    margin = (hi - lo) * float(sc["margin_frac"])
    betas = np.linspace(lo + margin, hi - margin, int(sc["points"]))
    rows = []
    all_finite = True
    for beta in betas:
        eta = beta + dom.gamma - 1.0 + float(sc["eta_offset"])
        rule = make_rule(dom, int(sc["N"]), cfg["quadrature"]["grading"])
        f = project_mean_zero(rule, coordinate_field(0))
        _, rep = solve_divergence_cusp(
            dom, f, float(beta), eta, p, rule_order=int(sc["N"]),
            rule_grading=cfg["quadrature"]["grading"],
            norm_rule_order=int(sc["norm_N"]), probe_count=int(sc["probes"]),
            seed=int(sc["seed"]))
        all_finite = all_finite and np.isfinite(rep.ratio) and rep.ratio > 0
        rows.append([float(beta), rep.ratio, rep.residual_max])

    endpoint_records = []
    for beta_end in (lo, hi):
        try:
            rule = make_rule(dom, int(sc["N"]), cfg["quadrature"]["grading"])
            f = project_mean_zero(rule, coordinate_field(0))
            solve_divergence_cusp(dom, f, float(beta_end),
                                  beta_end + dom.gamma - 1.0, p,
                                  rule_order=int(sc["N"]),
                                  norm_rule_order=int(sc["norm_N"]),
                                  probe_count=int(sc["probes"]))
            endpoint_records.append([float(beta_end), "no_error"])
        except BetaOutOfRangeError:
            endpoint_records.append([float(beta_end), "BetaOutOfRange"])
    assertions = [
        Assertion("interior_ratios_finite", bool(all_finite),
                  f"{len(rows)} interior beta values"),
        Assertion("endpoints_rejected",
                  all(r[1] == "BetaOutOfRange" for r in endpoint_records),
                  str(endpoint_records)),
    ]
    results = {"interval": [lo, hi],
               "betas": [r[0] for r in rows],
               "ratios": [r[1] for r in rows],
               "endpoints": endpoint_records}
    tables = {"scan": (["beta", "ratio", "residual_max"], rows)}
    return _result("scan-beta", cfg, results, tables, assertions)


def run_lift_check(cfg):
    dom = _domain(cfg)
    lc = cfg["lift_check"]
    integrands = [
        ("one", ScalarField(lambda pts: np.ones(pts.shape[:-1]), name="1")),
        ("x", coordinate_field(0)),
        ("smooth", ScalarField(lambda pts: np.cos(pts[..., 0])
                               + pts[..., 1] ** 2, name="smooth")),
        ("bump", bump_field([0.6, 0.0], [0.25, 0.25 ** dom.gamma])),
        ("inv_sqrt_x", ScalarField(lambda pts: pts[..., 0] ** -0.5,
                                   name="x^-1/2")),
    ]
    rows = []
    worst = 0.0
    for case in lc["cases"]:
        n_prime, s = int(case["n_prime"]), float(case["s"])
        for label, g in integrands:
            lhs, rhs = lifted_korn_transfer_check(
                dom, n_prime, s, g, p=1.0 if label == "inv_sqrt_x" else 2.0,
                rule_order=int(lc["N"]), rule_grading=lc["grading"])
            rel = abs(lhs - rhs) / max(abs(rhs), 1e-300)
            worst = max(worst, rel)
            rows.append([n_prime, s, label, lhs, rhs, rel])
    assertions = [
        Assertion("lifted_measure_identity", worst <= lc["tol"],
                  f"worst relative mismatch {worst:.2e} vs tol {lc['tol']:.1e}"),
    ]
    results = {"worst_rel_mismatch": worst, "checked": len(rows)}
    tables = {"lift": (["n_prime", "s", "integrand", "lhs", "rhs", "rel_err"],
                       rows)}
    return _result("lift-check", cfg, results, tables, assertions)


RUNNERS = {
    "divsolve": run_divsolve,
    "hardy": run_hardy,
    "infsup": run_infsup,
    "korn": run_korn,
    "counterexample": run_counterexample,
    "apcheck": run_apcheck,
    "scan-beta": run_scan_beta,
    "lift-check": run_lift_check,
}


def run_experiment(name, cfg):
    if name not in RUNNERS:
        raise KeyError(f"unknown experiment {name!r}")
    return RUNNERS[name](cfg)
