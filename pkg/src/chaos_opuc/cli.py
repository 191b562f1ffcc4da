"""Experiment harness: named, reproducible runs with machine-readable output.

Each subcommand wires the library into one experiment, writes
``<prefix>.report.json`` (config echo, statistics, thresholds, pass/fail)
and ``<prefix>.samples.csv`` (columns documented in the report), and exits
0 on pass, 1 on a statistical failure, 2 on a usage or parameter error.

Replica fan-out uses fixed-size chunks with seeds derived from
(seed, chunk index), so results are bit-identical for any ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate, special

from . import analysis, cmv, gmc, measures, opuc, sampling, sde
from .analysis import TestReport
from .sampling import CouplingParams

try:  # version string for report provenance
    from importlib.metadata import version as _pkg_version

    _VERSION = _pkg_version("chaos-opuc")
except Exception:  # pragma: no cover - not installed
    _VERSION = "unknown"

_CHUNK = 2048


def _default_threads() -> int:
    env = os.environ.get("CHAOS_OPUC_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _fan_out(chunk_fn, total: int, threads: int) -> np.ndarray:
    """Deterministic replica fan-out: fixed chunking, ordered aggregation."""
    n_chunks = max(1, math.ceil(total / _CHUNK))
    sizes = [_CHUNK] * (n_chunks - 1) + [total - _CHUNK * (n_chunks - 1)]
    indices = range(n_chunks)
    if threads <= 1:
        parts = [chunk_fn(i, sizes[i]) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda i: chunk_fn(i, sizes[i]), indices))
    return np.concatenate(parts)


def _write_outputs(prefix: str, experiment: str, config: dict,
                   reports: list[TestReport], columns: list[str],
                   rows: np.ndarray, metadata: dict | None = None) -> None:
    report = {
        "experiment": experiment,
        "code_version": _VERSION,
        "config": config,
        "csv_columns": columns,
        "reports": [r.to_dict() for r in reports],
        "pass": all(r.passed for r in reports),
    }
    if metadata:
        report["metadata"] = metadata
    with open(prefix + ".report.json", "w") as fh:
        json.dump(report, fh, indent=2, default=str)
        fh.write("\n")
    with open(prefix + ".samples.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in np.atleast_2d(np.asarray(rows, dtype=float)):
            writer.writerow([repr(float(v)) for v in row])


def _write_error(prefix: str, experiment: str, config: dict, exc: Exception) -> None:
    payload = {
        "experiment": experiment,
        "code_version": _VERSION,
        "config": config,
        "error": {"module": type(exc).__module__, "type": type(exc).__name__, "message": str(exc)},
        "pass": False,
    }
    with open(prefix + ".report.json", "w") as fh:
        json.dump(payload, fh, indent=2, default=str)
        fh.write("\n")


# ---------------------------------------------------------------- experiments


def _run_verify_fb(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)

    def chunk(i, m):
        return measures.total_mass_samples(params, args.jmax, m, [args.seed, i], variant=args.variant)

    samples = _fan_out(chunk, args.replicas, args.threads)
    report = analysis.ks_test(samples, lambda x: gmc.fb_cdf(params.gamma, x),
                              name="verify-fb", threshold=args.threshold)
    meta = {"mean": float(samples.mean()), "variant": args.variant}
    return [report], ["total_mass"], samples[:, None], meta


def _run_trace_identity(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)
    seq = sampling.sample_verblunsky(params, args.n, args.seed)
    pair = opuc.szego_coefficients(seq)
    log_coeffs = opuc.log_polynomial_series(pair.phi_star, args.kmax)
    operator = cmv.build_cmv(seq, args.n)
    traces = cmv.cmv_trace_powers(operator, args.kmax)
    k = np.arange(1, args.kmax + 1)
    deviation = np.abs(log_coeffs + traces / k)
    report = TestReport(name="trace-identity", statistic=float(deviation.max()),
                        threshold=args.threshold, n_samples=args.kmax)
    rows = np.column_stack([k, log_coeffs.real, log_coeffs.imag,
                            traces.real, traces.imag, deviation])
    cols = ["k", "log_coeff_re", "log_coeff_im", "trace_re", "trace_im", "deviation"]
    return [report], cols, rows, {}


def _run_sde_compare(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)
    delta = math.log(1.0 / args.r**2)
    j_max = int(math.ceil(args.t_end / delta)) + 1
    paths = sde.sample_discrete_paths(params, args.r, j_max, args.paths, [args.seed, 0])
    x_start = sde.marginal_at_time(paths, args.r, args.t0)
    x_final = sde.marginal_at_time(paths, args.r, args.t_end)
    em = sde.euler_maruyama_x(params, args.t0, x_start, args.t_end, args.dt, [args.seed, 1])
    em_final = em.values[:, -1]
    report = analysis.ks_test(x_final, em_final, name="sde-compare", threshold=args.threshold)
    meta = {"t0": args.t0, "t_end": args.t_end, "n_clamped": em.n_clamped}
    return [report], ["discrete_x", "euler_x"], np.column_stack([x_final, em_final]), meta


def _run_sample_cbe(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)
    alphas, _ = sampling.sample_verblunsky_batch(params, args.n, args.replicas, args.seed)
    j = np.arange(args.n)
    expected = 1.0 / (1.0 + params.beta_j(j))
    mod2 = np.abs(alphas) ** 2
    statistic = float(np.max(np.abs(mod2.mean(axis=0) - expected))) if args.replicas >= 100 else float(np.max(np.abs(alphas)))
    threshold = args.threshold if args.threshold is not None else (
        5.0 / math.sqrt(args.replicas) if args.replicas >= 100 else 1.0)
    report = TestReport(name="sample-cbe", statistic=statistic, threshold=threshold,
                        n_samples=args.replicas * args.n)
    rows = np.column_stack([
        np.repeat(np.arange(args.replicas), args.n),
        np.tile(j, args.replicas),
        alphas.real.ravel(),
        alphas.imag.ravel(),
    ])
    meta = {"mean_modulus_squared": mod2.mean(axis=0).tolist(), "expected": expected.tolist()}
    return [report], ["replica", "j", "alpha_re", "alpha_im"], rows, meta


def _run_quadrature_check(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)
    seq = sampling.sample_verblunsky(params, args.n - 1, args.seed, with_terminal=True)
    measure = measures.quadrature(seq)
    m = np.arange(1, args.n)
    nodes = np.exp(1j * measure.angles)
    quad_moments = np.array([np.sum(measure.weights * nodes**-mm) for mm in m])
    exact = opuc.moments_from_alphas(seq, args.n - 1) if args.n > 1 else np.array([])
    deviation = np.abs(quad_moments - exact) if args.n > 1 else np.array([0.0])
    weight_defect = abs(measure.weights.sum() - 1.0)
    statistic = float(max(deviation.max() if deviation.size else 0.0, weight_defect))
    report = TestReport(name="quadrature-check", statistic=statistic,
                        threshold=args.threshold, n_samples=args.n)
    rows = np.column_stack([measure.angles, measure.weights])
    return [report], ["angle", "weight"], rows, {"weight_sum": float(measure.weights.sum())}


def _run_mass_compare(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)

    def chunk_gmc(i, m):
        return gmc.gmc_mass_samples(params, args.r, args.kmax, args.mgrid, m, [args.seed, i])

    def chunk_product(i, m):
        return measures.total_mass_samples(params, args.jmax, m, [args.seed, i], variant="c0")

    gmc_masses = _fan_out(chunk_gmc, args.replicas, args.threads)
    product_masses = _fan_out(chunk_product, args.replicas, args.threads)
    report = analysis.ks_test(gmc_masses, product_masses, name="mass-compare",
                              threshold=args.threshold)
    meta = {"gmc_mean": float(gmc_masses.mean()), "product_mean": float(product_masses.mean())}
    rows = np.column_stack([gmc_masses, product_masses])
    return [report], ["gmc_mass", "product_mass"], rows, meta


def _run_moment_check(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)

    def chunk(i, m):
        return opuc.sample_phi_star_abs2(params, args.z, args.n, m, [args.seed, i])

    samples = _fan_out(chunk, args.replicas, args.threads)
    mean, se = analysis.empirical_moment(samples)
    bound = (1.0 - args.z**2) ** (-0.5)
    # statistic: standardized exceedance over the closed-form bound
    statistic = (mean - bound) / se
    report = TestReport(name="moment-check", statistic=float(statistic),
                        threshold=args.threshold, n_samples=args.replicas,
                        metadata={"mean": mean, "se": se, "bound": bound})
    return [report], ["phi_star_abs2"], samples[:, None], {"mean": mean, "bound": bound}


def _run_gaussianity_traces(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)

    def chunk(i, m):
        return cmv.first_gaussian_partial_sums(params, args.jmax, m, [args.seed, i])

    sums = _fan_out(chunk, args.replicas, args.threads)
    scale = 1.0 / math.sqrt(params.beta)
    normal_cdf = lambda x: 0.5 * (1.0 + special.erf(x / (scale * math.sqrt(2.0))))
    rep_re = analysis.ks_test(sums.real, normal_cdf, name="gaussianity-re", threshold=args.threshold)
    rep_im = analysis.ks_test(sums.imag, normal_cdf, name="gaussianity-im", threshold=args.threshold)
    rows = np.column_stack([sums.real, sums.imag])
    return [rep_re, rep_im], ["sum_re", "sum_im"], rows, {}


def _run_dufresne(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    def chunk(i, m):
        return sde.dufresne_perpetuity(args.b, dt=args.dt, seed=[args.seed, i], n_samples=m)

    samples = _fan_out(chunk, args.replicas, args.threads)
    cdf = lambda x: special.gammaincc(args.b, 1.0 / np.maximum(np.asarray(x, dtype=float), 1e-300))
    report = analysis.ks_test(samples, cdf, name="dufresne", threshold=args.threshold)
    meta = {"mean": float(samples.mean()), "expected_mean": 1.0 / (args.b - 1.0) if args.b > 1 else None}
    return [report], ["perpetuity"], samples[:, None], meta


def _run_entrance_law(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    params = CouplingParams(args.beta)
    result = sde.entrance_law_check(params, args.t_small, args.paths, args.seed, r=args.r)
    report = TestReport(name="entrance-law", statistic=result["ks_statistic"],
                        threshold=args.threshold, n_samples=args.paths,
                        metadata={k: v for k, v in result.items() if not isinstance(v, np.ndarray)})
    meta = {"mean": result["mean"], "reference_mean": result["reference_mean"],
            "mean_checked": result["mean_checked"]}
    rows = np.array([[result["mean"], result["ks_statistic"]]])
    return [report], ["mean_scaled_gap", "ks_statistic"], rows, meta


def _run_circle_moment(args) -> tuple[list[TestReport], list[str], np.ndarray, dict]:
    u = args.modulus * complex(math.cos(args.phase), math.sin(args.phase))
    series = analysis.circle_moment_series(args.lam, u)

    def integrand(theta):
        return abs(1.0 - np.exp(1j * theta) * u) ** (-2.0 * args.lam)

    numeric, _ = integrate.quad(integrand, 0.0, 2.0 * np.pi, limit=200)
    numeric /= 2.0 * np.pi
    deviation = abs(series - numeric)
    report = TestReport(name="circle-moment", statistic=float(deviation),
                        threshold=args.threshold, n_samples=1)
    rows = np.array([[args.lam, u.real, u.imag, series, numeric, deviation]])
    cols = ["lambda", "u_re", "u_im", "series", "quadrature", "deviation"]
    return [report], cols, rows, {}


_EXPERIMENTS = {
    "verify-fb": _run_verify_fb,
    "trace-identity": _run_trace_identity,
    "sde-compare": _run_sde_compare,
    "sample-cbe": _run_sample_cbe,
    "quadrature-check": _run_quadrature_check,
    "mass-compare": _run_mass_compare,
    "moment-check": _run_moment_check,
    "gaussianity-traces": _run_gaussianity_traces,
    "dufresne": _run_dufresne,
    "entrance-law": _run_entrance_law,
    "circle-moment": _run_circle_moment,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaos-opuc",
                                     description="circle-ensemble / multiplicative-chaos experiments")
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p, default_output):
        p.add_argument("--seed", type=int, default=0, help="base seed for all randomness")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker threads for replica fan-out (env CHAOS_OPUC_THREADS)")
        p.add_argument("--output", default=default_output,
                       help="path prefix for .report.json / .samples.csv")

    p = sub.add_parser("verify-fb", help="truncated mass product vs the limiting mass law")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--replicas", type=int, default=10000)
    p.add_argument("--jmax", type=int, default=100000)
    p.add_argument("--variant", choices=["c0", "m_inf", "c0_prime"], default="c0")
    p.add_argument("--threshold", type=float, default=0.02, help="KS threshold")
    common(p, "verify-fb")

    p = sub.add_parser("trace-identity", help="log-polynomial coefficients vs operator traces")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--threshold", type=float, default=1e-10)
    common(p, "trace-identity")

    p = sub.add_parser("sde-compare", help="discrete tilted paths vs the limiting diffusion")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--r", type=float, default=0.999)
    p.add_argument("--paths", type=int, default=5000)
    p.add_argument("--t0", type=float, default=0.1)
    p.add_argument("--t-end", dest="t_end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--threshold", type=float, default=0.05, help="two-sample KS threshold")
    common(p, "sde-compare")

    p = sub.add_parser("sample-cbe", help="draw coefficient sequences; check modulus law")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--threshold", type=float, default=None)
    common(p, "sample-cbe")

    p = sub.add_parser("quadrature-check", help="quadrature moments vs recursive moments")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--threshold", type=float, default=1e-10)
    common(p, "quadrature-check")

    p = sub.add_parser("mass-compare", help="spectral-route mass vs product-route mass")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--r", type=float, default=0.9998)
    p.add_argument("--kmax", type=int, default=20000)
    p.add_argument("--mgrid", type=int, default=65536)
    p.add_argument("--jmax", type=int, default=100000)
    p.add_argument("--replicas", type=int, default=5000)
    p.add_argument("--threshold", type=float, default=0.05)
    common(p, "mass-compare")

    p = sub.add_parser("moment-check", help="mean squared polynomial modulus vs closed bound")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--z", type=float, default=0.5)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--replicas", type=int, default=10000)
    p.add_argument("--threshold", type=float, default=3.0, help="allowed standard errors above the bound")
    common(p, "moment-check")

    p = sub.add_parser("gaussianity-traces", help="coefficient pair sums vs the Gaussian limit")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--jmax", type=int, default=10000)
    p.add_argument("--replicas", type=int, default=10000)
    p.add_argument("--threshold", type=float, default=0.02)
    common(p, "gaussianity-traces")

    p = sub.add_parser("dufresne", help="Brownian exponential functional vs inverse-gamma")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--replicas", type=int, default=10000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--threshold", type=float, default=0.02)
    common(p, "dufresne")

    p = sub.add_parser("entrance-law", help="small-time gap law vs inverse-gamma reference")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t-small", dest="t_small", type=float, default=2e-4)
    p.add_argument("--paths", type=int, default=40000)
    p.add_argument("--r", type=float, default=1.0 - 2e-7)
    p.add_argument("--threshold", type=float, default=0.05)
    common(p, "entrance-law")

    p = sub.add_parser("circle-moment", help="negative-moment series vs numeric integration")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--modulus", type=float, default=0.5)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--threshold", type=float, default=1e-8)
    common(p, "circle-moment")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    runner = _EXPERIMENTS[args.experiment]
    config = {k: v for k, v in vars(args).items() if k != "experiment"}
    try:
        reports, columns, rows, meta = runner(args)
    except (ValueError, NotImplementedError) as exc:
        _write_error(args.output, args.experiment, config, exc)
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    _write_outputs(args.output, args.experiment, config, reports, columns, rows, meta)
    for rep in reports:
        flag = "PASS" if rep.passed else "FAIL"
        print(f"{flag} {rep.name}: statistic={rep.statistic:.6g} threshold={rep.threshold:.6g}")
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
