"""Experiment configuration and the end-to-end verification suite.

`run_verification` exercises every identity and bound in the library on a
seeded synthetic instance and assembles a VerificationReport. Wall-clock
times are recorded per check but kept out of the JSON serialization so
identical configs produce byte-identical reports.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from .data import Dataset, synth_prior_dataset
from .errors import SparseGpError
from .kernels import Kernel, make_kernel
from .linalg import factor_spd, solve
from .nystrom import fit_nystrom, fit_nystrom_via_q, q_gram, select_inducing
from .svgp import (elbo, elbo_breakdown, fixed_point_solver, make_state,
                   optimal_parameters, optimal_posterior, psi_forward)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    kernel_family: str = "gaussian"
    gamma: float = 1.0
    degree: int = 2
    offset: float = 0.0
    n: int = 60
    d: int = 1
    m: int = 8
    noise_var: float = 0.1
    ridge: float | None = None  # defaults to noise_var / n when linked
    link_noise_ridge: bool = True
    select: str = "greedy_trace"
    seed: int = 7
    mc_samples: int = 2000
    tolerance: float = 1e-8

    def kernel(self) -> Kernel:
        return make_kernel(self.kernel_family, input_dim=self.d, gamma=self.gamma,
                           degree=self.degree, offset=self.offset)

    def ridge_value(self) -> float:
        if self.link_noise_ridge or self.ridge is None:
            return self.noise_var / self.n
        return self.ridge

    def to_dict(self) -> dict:
        return {
            "kernel_family": self.kernel_family,
            "gamma": self.gamma,
            "degree": self.degree,
            "offset": self.offset,
            "n": self.n,
            "d": self.d,
            "m": self.m,
            "noise_var": self.noise_var,
            "ridge": self.ridge_value() if self.n >= 1 else self.ridge,
            "link_noise_ridge": self.link_noise_ridge,
            "select": self.select,
            "seed": self.seed,
            "mc_samples": self.mc_samples,
            "tolerance": self.tolerance,
        }


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "error" | "skipped"
    detail: str = ""
    lhs: float | None = None
    rhs: float | None = None
    wall_clock: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.lhs is not None:
            out["lhs"] = self.lhs
        if self.rhs is not None:
            out["rhs"] = self.rhs
        return out


@dataclass
class VerificationReport:
    config: dict
    checks: list = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "overall_pass": self.overall_pass,
        }


def _record(report: VerificationReport, name: str, fn) -> None:
    start = time.perf_counter()
    try:
        result = fn()
    except SparseGpError as exc:
        report.checks.append(CheckResult(
            name=name, status="error",
            detail=f"{type(exc).__name__}: {exc}",
            wall_clock=time.perf_counter() - start))
        return
    elapsed = time.perf_counter() - start
    if isinstance(result, bnd.BoundRecord):
        report.checks.append(CheckResult(
            name=name, status="pass" if result.holds else "fail",
            detail=f"slack={result.slack:.6g}", lhs=result.lhs, rhs=result.rhs,
            wall_clock=elapsed))
    else:
        ok, detail = result
        report.checks.append(CheckResult(
            name=name, status="pass" if ok else "fail", detail=detail,
            wall_clock=elapsed))


def run_verification(config: ExperimentConfig) -> VerificationReport:
    """Run the full identity-and-bound suite on one synthetic instance."""
    report = VerificationReport(config=config.to_dict())
    tol = config.tolerance
    try:
        kernel = config.kernel()
        rng = np.random.default_rng(config.seed)
        X = rng.uniform(-3.0, 3.0, size=(config.n, config.d))
        data = synth_prior_dataset(kernel, X, config.noise_var, seed=config.seed + 1)
        scale = float(np.linalg.norm(data.targets))
        if scale > 10.0:
            data = Dataset(data.inputs, data.targets * (10.0 / scale),
                           provenance=data.provenance)
        ind = select_inducing(kernel, data, config.m, strategy=config.select,
                              seed=config.seed)
    except (SparseGpError, ValueError) as exc:
        report.checks.append(CheckResult(
            name="setup", status="error", detail=f"{type(exc).__name__}: {exc}"))
        return report

    s2 = config.noise_var
    ridge = config.ridge_value()
    grid = rng.uniform(-3.0, 3.0, size=(50, config.d))

    def check_equivalence():
        sparse = fit_nystrom(kernel, data, ind, s2 / data.n)
        mean, _ = optimal_posterior(kernel, data, ind, s2)
        gap = max(abs(mean(x) - sparse.predict(x)) for x in grid)
        return gap <= tol, f"max |m*(x) - nystrom(x)| = {gap:.3g}"

    def check_nystrom_routes():
        a = fit_nystrom(kernel, data, ind, ridge)
        b = fit_nystrom_via_q(kernel, data, ind, ridge)
        gap = float(np.max(np.abs(a.predict_many(grid) - b.predict_many(grid))))
        return gap <= tol, f"max route disagreement = {gap:.3g}"

    def check_elbo_decomposition():
        state = optimal_parameters(kernel, data, ind, s2)
        bd = elbo_breakdown(state, data, s2)
        resid = abs(bd.term_sum() - bd.total_check)
        ok = resid <= tol * max(1.0, abs(bd.total_check))
        return ok, f"decomposition residual = {resid:.3g}"

    def check_psi_coefficients():
        state = optimal_parameters(kernel, data, ind, s2)
        sparse = fit_nystrom(kernel, data, ind, s2 / data.n)
        gap = float(np.max(np.abs(psi_forward(ind, state.mu) - sparse.beta)))
        return gap <= tol, f"max |k_ZZ^-1 mu* - beta| = {gap:.3g}"

    def check_optimality():
        state = optimal_parameters(kernel, data, ind, s2)
        best = elbo(state, data, s2)
        probe_rng = np.random.default_rng(config.seed + 2)
        worst_gain = -np.inf
        for _ in range(20):
            delta = probe_rng.standard_normal(ind.m) * 0.1
            A = probe_rng.standard_normal((ind.m, ind.m)) * 0.05
            sigma = state.sigma + A @ A.T + 1e-6 * np.eye(ind.m)
            probe = make_state(ind, state.mu + delta, sigma)
            worst_gain = max(worst_gain, elbo(probe, data, s2) - best)
        return worst_gain <= tol, f"best probe gain = {worst_gain:.3g}"

    def check_kl_two_path():
        kl = bnd.kl_to_exact_posterior(kernel, data, ind, s2)
        return kl >= -1e-10, f"KL = {kl:.6g}"

    def check_fixed_point():
        state = fixed_point_solver(kernel, data, ind, s2, max_iters=10, tol=1e-10)
        target = optimal_parameters(kernel, data, ind, s2)
        gap = max(float(np.max(np.abs(state.mu - target.mu))),
                  float(np.max(np.abs(state.sigma - target.sigma))))
        return gap <= 1e-6, f"max-abs gap to closed form = {gap:.3g}"

    def check_excess_risk_identity():
        ex = bnd.excess_risk(kernel, data, ind, ridge)
        n = data.n
        y = data.targets
        Fq = factor_spd(q_gram(ind, data.inputs) + n * ridge * np.eye(n),
                        jitter_ladder=[0.0])
        Fk = factor_spd(kernel.gram(data.inputs) + n * ridge * np.eye(n),
                        jitter_ladder=[0.0])
        # n * excess = s2 * (quad_q - quad_k) with s2 = n * ridge
        direct = n * ridge * float(y @ solve(Fq, y) - y @ solve(Fk, y))
        resid = abs(n * ex - direct)
        return resid <= tol * max(1.0, abs(direct)), f"identity residual = {resid:.3g}"

    def check_worst_case():
        probe_rng = np.random.default_rng(config.seed + 3)
        worst = 0.0
        for _ in range(100):
            x = probe_rng.uniform(-3.5, 3.5, size=config.d)
            try:
                worst = max(worst, bnd.worst_case_residual(kernel, data, ind, s2, x))
            except SparseGpError:
                continue
        return worst <= tol, f"max decomposition residual = {worst:.3g}"

    def check_expected_kl():
        mc, half, lo, hi = bnd.expected_kl_sandwich(
            kernel, data.inputs, ind, s2, n_samples=config.mc_samples,
            seed=config.seed + 4)
        stderr3 = 3.0 * half / 1.96
        ok = (mc + stderr3 >= lo - 1e-10) and (mc - stderr3 <= hi + 1e-10)
        return ok, f"mc={mc:.6g} band=[{lo:.6g},{hi:.6g}] 3se={stderr3:.3g}"

    def check_expected_excess():
        rec, stderr = bnd.expected_excess_risk_lower_bound(
            kernel, data.inputs, ind, ridge, n_samples=config.mc_samples,
            seed=config.seed + 5)
        ok = rec.lhs <= rec.rhs + 3.0 * stderr + 1e-10
        return ok, f"lhs={rec.lhs:.6g} mc={rec.rhs:.6g} 3se={3 * stderr:.3g}"

    def run_derivative():
        probe_rng = np.random.default_rng(config.seed + 6)
        worst = bnd.BoundRecord("derivative_gap", 0.0, 0.0)
        worst_excess = -np.inf
        for _ in range(20):
            x = probe_rng.uniform(-3.0, 3.0, size=config.d)
            j = int(probe_rng.integers(config.d))
            rec = bnd.derivative_gap_bound(kernel, data, ind, s2, x, j)
            excess = rec.lhs - rec.rhs
            if excess > worst_excess:
                worst_excess = excess
                worst = rec
        ok = worst.lhs <= worst.rhs + 1e-4 * max(1.0, worst.rhs)
        return ok, f"worst lhs={worst.lhs:.3g} rhs={worst.rhs:.3g}"

    _record(report, "svgp_nystrom_equivalence", check_equivalence)
    _record(report, "nystrom_two_routes", check_nystrom_routes)
    _record(report, "elbo_decomposition", check_elbo_decomposition)
    _record(report, "psi_maps_mu_star_to_beta", check_psi_coefficients)
    _record(report, "elbo_optimality_probes", check_optimality)
    _record(report, "kl_two_path", check_kl_two_path)
    _record(report, "fixed_point_solver", check_fixed_point)
    _record(report, "burt_bound", lambda: bnd.burt_upper_bound(kernel, data, ind, s2)[0])
    _record(report, "burt_bound_intermediate",
            lambda: bnd.burt_upper_bound(kernel, data, ind, s2)[1])
    _record(report, "quadratic_form_gap",
            lambda: bnd.quadratic_form_gap_bound(kernel, data, ind, s2))
    _record(report, "excess_risk_identity", check_excess_risk_identity)
    _record(report, "excess_risk_bound",
            lambda: bnd.excess_risk_upper_bound(kernel, data, ind, ridge)[0])
    _record(report, "rkhs_distance_bound",
            lambda: bnd.rkhs_distance_bound(kernel, data, ind, ridge))
    if config.kernel_family == "gaussian":
        _record(report, "derivative_bound", run_derivative)
    else:
        report.checks.append(CheckResult(
            name="derivative_bound", status="skipped",
            detail="non-gaussian kernel"))
    _record(report, "worst_case_decomposition", check_worst_case)
    _record(report, "expected_kl_sandwich", check_expected_kl)
    _record(report, "expected_excess_risk_lower_bound", check_expected_excess)
    return report


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    """Serialize a report; JSON is deterministic, text is a human table."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2)
    if fmt == "text":
        lines = [f"{'check':40s} {'status':8s} detail"]
        for c in report.checks:
            status = c.status.upper() if c.status in ("pass", "fail") else c.status
            lines.append(f"{c.name:40s} {status:8s} {c.detail}  [{c.wall_clock:.3f}s]")
        lines.append(f"overall: {'PASS' if report.overall_pass else 'FAIL'}")
        return "\n".join(lines)
    raise ValueError(f"unknown format {fmt!r}")
