"""Experiment runner: every module behind one reproducible file-based driver.

Exit codes: 0 success, 1 usage or input error, 2 scientific assertion failure
(a bound a lemma promises did not hold on this run's artifacts). Each command
writes its CSV/JSON artifacts plus manifest.json and summary.txt into --out;
CSV bodies are byte-identical across reruns, timestamps live in the manifest.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .algorithms import qssamp_prepare, spatial_search
from .chains import (MarkedSet, check_ergodic_reversible, critical_interpolation,
                     discriminant, discriminant_of, interpolate,
                     require_ergodic_reversible, stationary_distribution,
                     stationary_of_interpolated)
from .errors import QwmixError, ValidationError
from .generators import lazy_complete_graph, random_reversible_chain
from .gnp import (classical_locations, ks_distance_to_semicircle,
                  mixing_exponent_experiment, rmt_report, sample_gnp,
                  sigma_scaling_experiment)
from .hamiltonian import build_effective
from .hitting import (classical_mixing_time, extended_hitting_time,
                      hitting_time_montecarlo, hitting_time_spectral,
                      interpolated_hitting_time, tv_trace)
from .mixing import (edge_walk_gap_map, limiting_distribution, mixing_time_bound,
                     mixing_trace, time_averaged_distribution)
from .pointer import PointerConfig, pointer_zero_amplitude, run_blocks_postselect

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSERT = 2

DEFAULT_S_GRID = (0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9)


def _chain_id(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:12]


class Run:
    """Collects params, summary lines and assertion failures for one command."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.cfg = io.parse_config(args.config) if args.config else {}
        self.args = args
        self.params: dict = {}
        self.lines: list[str] = []
        self.failures: list[str] = []
        out = self._get("out", str, default=f"out_{command}")
        self.outdir = Path(out)
        self.outdir.mkdir(parents=True, exist_ok=True)

    def _get(self, key: str, cast, default=None, required: bool = False):
        flag = getattr(self.args, key.replace("-", "_"), None)
        file_value = self.cfg.get(key, self.cfg.get(key.replace("_", "-")))
        raw = flag if flag is not None else file_value
        if raw is None:
            if required:
                raise ValidationError(f"missing required parameter --{key}")
            value = default
        else:
            try:
                value = cast(raw) if not isinstance(raw, bool) else raw
            except (TypeError, ValueError):
                raise ValidationError(f"parameter {key}={raw!r} is not a valid "
                                      f"{cast.__name__}") from None
        self.params[key] = value
        return value

    def say(self, line: str) -> None:
        self.lines.append(line)

    def check(self, ok: bool, label: str) -> None:
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {label}")
        if not ok:
            self.failures.append(label)

    def finish(self, t0: float) -> int:
        io.write_manifest(self.outdir / "manifest.json", self.command, self.params,
                          time.time() - t0)
        text = "\n".join(self.lines) + "\n"
        (self.outdir / "summary.txt").write_text(text)
        sys.stdout.write(text)
        if self.failures:
            sys.stdout.write(f"{len(self.failures)} assertion failure(s)\n")
            return EXIT_ASSERT
        return EXIT_OK


def _load_chain(run: Run):
    path = Path(run._get("chain", str, required=True))
    P = io.read_chain(path)
    run.params["chain_id"] = _chain_id(path)
    return P


def cmd_chain_info(run: Run) -> None:
    P = _load_chain(run)
    report = check_ergodic_reversible(P)
    run.say(f"n = {P.n}")
    run.say(f"ergodic = {report.ergodic}  reversible = {report.reversible}")
    run.say(f"detailed balance residual = {report.detailed_balance_residual:.3e}")
    if report.pi is not None:
        io.write_csv(run.outdir / "pi.csv", ["index", "value"],
                     list(enumerate(report.pi.pi)))
        run.say(f"pi_min = {report.pi.pi_min:.17g}")
    if not (report.ergodic and report.reversible):
        run.say("spectral artifacts skipped: chain is not ergodic reversible")
        return
    marked_raw = run._get("marked", str)
    s = run._get("s", float, default=0.0)
    if marked_raw:
        M = io.parse_marked(marked_raw)
        chain = interpolate(P, M, s)
        D = discriminant(chain)
        pi_s = stationary_of_interpolated(report.pi, M, s)
        io.write_csv(run.outdir / "pi_s.csv", ["index", "value"],
                     list(enumerate(pi_s.pi)))
        p_M = report.pi.marked_mass(M)
        run.say(f"p_M = {p_M:.17g}")
        if p_M < 0.5:
            run.say(f"s_star = {critical_interpolation(p_M):.17g}")
    else:
        D = discriminant_of(P)
    io.write_csv(run.outdir / "spectrum.csv", ["index", "value"],
                 list(enumerate(D.spectrum.eigenvalues)))
    run.say(f"discriminant gap = {D.spectral_gap:.17g}")


def cmd_hitting(run: Run) -> None:
    P = _load_chain(run)
    M = io.parse_marked(run._get("marked", str, required=True))
    trials = run._get("trials", int, default=100_000)
    seed = run._get("master_seed", int, default=0)
    epsilon = run._get("epsilon", float, default=0.1)
    pi = require_ergodic_reversible(P)
    spectral = hitting_time_spectral(P, pi, M)
    mc = hitting_time_montecarlo(P, M, trials=trials, seed=seed)
    ext = extended_hitting_time(P, pi, M, DEFAULT_S_GRID)
    run.say(f"HT spectral = {spectral.ht:.17g}")
    run.say(f"HT montecarlo = {mc.ht:.17g} +- {mc.stderr:.3g} ({mc.trials} trials)")
    run.say(f"HT_plus = {ext.ht_plus:.17g}")
    run.say(f"invariance residual = {ext.invariance_residual:.3e}")
    p_M = pi.marked_mass(M)
    io.write_csv(run.outdir / "ht_grid.csv", ["s", "HT_s", "HT_plus_estimate"],
                 [(s, ht, ht * (1.0 - s * (1.0 - p_M)) ** 2 / p_M ** 2)
                  for s, ht in ext.per_s_values])
    mixing = classical_mixing_time(P, pi, epsilon)
    run.say(f"classical t_mix empirical = {mixing.t_mix_empirical}")
    run.say(f"classical t_mix bound = {mixing.t_mix_bound:.17g}")
    horizon = max(2 * mixing.t_mix_empirical, 8)
    ts = np.unique(np.geomspace(1, horizon, 24).astype(int))
    io.write_csv(run.outdir / "tv_trace.csv", ["t", "tv_distance"],
                 tv_trace(P, pi, ts))
    io.write_json(run.outdir / "result.json", {
        "chain_id": run.params["chain_id"], "n": P.n,
        "ht_spectral": spectral.ht, "ht_montecarlo": mc.ht,
        "mc_stderr": mc.stderr, "ht_plus": ext.ht_plus,
        "invariance_residual": ext.invariance_residual,
        "t_mix_empirical": mixing.t_mix_empirical,
        "t_mix_bound": mixing.t_mix_bound, "seed": seed,
    })
    gap = 3.0 * mc.stderr + 1e-9
    run.check(abs(spectral.ht - mc.ht) <= gap,
              f"spectral vs Monte Carlo within 3 sigma ({spectral.ht:.6g} vs {mc.ht:.6g})")
    run.check(ext.invariance_residual <= 1e-6,
              f"HT(s) invariance residual {ext.invariance_residual:.3e} <= 1e-6")
    run.check(mixing.t_mix_empirical <= math.ceil(mixing.t_mix_bound),
              "empirical mixing time within the spectral bound")


def cmd_search(run: Run) -> None:
    P = _load_chain(run)
    M = io.parse_marked(run._get("marked", str, required=True))
    epsilon = run._get("epsilon", float, default=0.05)
    seed = run._get("master_seed", int, default=0)
    pi = require_ergodic_reversible(P)
    out = spatial_search(P, pi, M, epsilon, seed=seed)
    io.write_csv(run.outdir / "node_distribution.csv", ["node", "prob"],
                 list(enumerate(out.node_distribution)))
    io.write_json(run.outdir / "result.json", {
        "chain_id": run.params["chain_id"], "n": P.n, "s_star": out.s_star,
        "success_prob": out.success_prob, "total_time": out.total_time,
        "seed": seed, "sampled_node": out.sampled_node,
        "is_marked": out.is_marked, "select_prob": out.select_prob,
    })
    run.say(f"s_star = {out.s_star:.17g}")
    run.say(f"sampled node = {out.sampled_node} (marked: {out.is_marked})")
    run.say(f"success_prob = {out.success_prob:.17g}")
    run.say(f"total_time = {out.total_time:.17g}")
    run.check(out.success_prob >= 0.25 - epsilon,
              f"success probability {out.success_prob:.6g} >= 1/4 - epsilon")


def cmd_qssamp(run: Run) -> None:
    P = _load_chain(run)
    j = run._get("j", int, default=0)
    epsilon = run._get("epsilon", float, default=0.01)
    pi = require_ergodic_reversible(P)
    out = qssamp_prepare(P, j, epsilon, pi_hint=pi)
    dist = float(np.linalg.norm(out.state - np.sqrt(pi.pi)))
    io.write_csv(run.outdir / "state.csv", ["index", "re", "im"],
                 [(i, z.real, z.imag) for i, z in enumerate(out.state)])
    io.write_json(run.outdir / "result.json", {
        "chain_id": run.params["chain_id"], "n": P.n,
        "fidelity": out.fidelity_to_pi, "distance": dist,
        "stage_probs": list(out.stage_probs), "total_time": out.total_time,
        "epsilon": epsilon, "j": j,
    })
    run.say(f"fidelity to sqrt(pi) = {out.fidelity_to_pi:.17g}")
    run.say(f"distance = {dist:.17g}")
    run.say(f"stage post-selection probs = {out.stage_probs[0]:.6g}, {out.stage_probs[1]:.6g}")
    run.say(f"total_time = {out.total_time:.17g}")
    run.check(dist <= 4.0 * epsilon, f"distance {dist:.3e} <= 4 epsilon")


def cmd_qlsamp(run: Run) -> None:
    chain_path = run._get("chain", str)
    start = run._get("start", int, default=0)
    epsilon = run._get("epsilon", float, default=0.1)
    t_max = run._get("t_max", float, default=1e4)
    if chain_path:
        P = io.read_chain(Path(chain_path))
        run.params["chain_id"] = _chain_id(Path(chain_path))
        spec = discriminant_of(P).spectrum
        label = run.params["chain_id"]
    else:
        n = run._get("n", int, required=True)
        p = run._get("p", float, default=0.5)
        seed = run._get("master_seed", int, default=0)
        sample = sample_gnp(n, p, seed)
        spec = sample.spectrum
        label = f"gnp-n{n}-p{p}-seed{seed}"
    if not 0 <= start < spec.n:
        raise ValidationError(f"start index {start} out of range")
    psi0 = np.zeros(spec.n)
    psi0[start] = 1.0
    limit = limiting_distribution(spec, psi0)
    io.write_csv(run.outdir / "limiting.csv", ["node", "prob"],
                 list(enumerate(limit.probs)))
    horizons = [t_max / 100.0, t_max / 10.0, t_max]
    for k, T in enumerate(horizons, start=1):
        avg = time_averaged_distribution(spec, psi0, T, psi0_id=label)
        io.write_csv(run.outdir / f"avg_{k}.csv", ["node", "prob"],
                     list(enumerate(avg.probs)))
    grid = np.geomspace(1.0, t_max, 40)
    trace = mixing_trace(spec, psi0, epsilon, grid)
    io.write_csv(run.outdir / "trace.csv", ["t", "D_P"],
                 list(zip(trace.times, trace.distances)))
    bound = mixing_time_bound(spec, psi0, epsilon)
    io.write_json(run.outdir / "result.json", {
        "source": label, "n": spec.n, "start": start, "epsilon": epsilon,
        "t_mix": trace.t_mix, "mixing_time_bound": bound,
        "average_horizons": horizons,
        "uniform_distance_inf": float(np.abs(limit.probs - 1.0 / spec.n).max()),
    })
    run.say(f"limiting max|prob - 1/n| = {np.abs(limit.probs - 1.0 / spec.n).max():.6g}")
    run.say(f"t_mix on grid = {trace.t_mix}")
    run.say(f"mixing time bound = {bound:.6g}")


def cmd_gnp_spectrum(run: Run) -> None:
    n = run._get("n", int, default=200)
    p = run._get("p", float, default=0.5)
    seed = run._get("master_seed", int, default=0)
    eps_exp = run._get("eps_exponent", float, default=0.4)
    sample = sample_gnp(n, p, seed)
    model = classical_locations(n, p)
    report = rmt_report(sample, model, eps_exp)
    ks = ks_distance_to_semicircle(sample, model)
    bulk = sample.spectrum.eigenvalues[:-1]
    io.write_csv(run.outdir / "spectrum.csv", ["i", "lambda", "gamma"],
                 [(i + 1, bulk[i], model.classical_locations[i])
                  for i in range(n - 1)])
    io.write_json(run.outdir / "result.json", {
        "n": n, "p": p, "seed": seed,
        "lambda_top": report.lambda_top, "lambda_second": report.lambda_second,
        "delta_min": report.delta_min, "deloc_max": report.deloc_max,
        "rigidity_violations": report.rigidity_violations,
        "eps_exponent": eps_exp, "sigma": report.sigma, "sigma1": report.sigma1,
        "simple_spectrum": report.simple_spectrum, "connected": report.connected,
        "ks_distance": ks, "tail_fit_C": report.tail_fit_C,
    })
    run.say(f"lambda_top = {report.lambda_top:.17g}")
    run.say(f"lambda_second = {report.lambda_second:.17g}")
    run.say(f"delta_min = {report.delta_min:.6g}  sigma = {report.sigma:.6g}  "
            f"sigma1 = {report.sigma1:.6g}")
    run.say(f"deloc_max = {report.deloc_max:.6g}")
    run.say(f"rigidity violations (eps={eps_exp}) = {report.rigidity_violations}")
    run.say(f"KS distance to semicircle = {ks:.6g}")


def cmd_gnp_mixing(run: Run) -> None:
    sizes = io.parse_sizes(run._get("sizes", str, required=True))
    p = run._get("p", float, default=0.5)
    epsilon = run._get("epsilon", float, default=0.1)
    seeds = run._get("seeds", int, default=3)
    t_max = run._get("t_max", float, default=1e5)
    master = run._get("master_seed", int, default=0)
    res = mixing_exponent_experiment(sizes, p, epsilon, seeds, t_max,
                                     master_seed=master)
    io.write_csv(run.outdir / "table.csv",
                 ["n", "seed", "t_mix", "sigma", "sigma1", "delta_min", "deloc_max"],
                 res.rows)
    for n, times, dists in res.traces:
        io.write_csv(run.outdir / f"trace_n{n}.csv", ["t", "D_P"],
                     list(zip(times, dists)))
    io.write_json(run.outdir / "result.json", {
        "sizes": sizes, "p": p, "epsilon": epsilon, "seeds_per_size": seeds,
        "t_max": t_max, "master_seed": master, "exponent_c": res.exponent_c,
        "intercept": res.intercept, "fit_residual": res.fit_residual,
        "uncrossed_cells": res.uncrossed,
    })
    run.say(f"fitted exponent c = {res.exponent_c:.6g}")
    run.say(f"fit residual = {res.fit_residual:.3g}")
    run.say(f"cells without crossing = {res.uncrossed}")


def cmd_sigma_scaling(run: Run) -> None:
    sizes = io.parse_sizes(run._get("sizes", str, required=True))
    p = run._get("p", float, default=0.5)
    seeds = run._get("seeds", int, default=5)
    master = run._get("master_seed", int, default=0)
    res = sigma_scaling_experiment(sizes, p, seeds, master_seed=master)
    io.write_csv(run.outdir / "table.csv",
                 ["n", "seed", "sigma1", "sigma", "delta_min", "avg_gap", "deloc_max"],
                 res.rows)
    io.write_json(run.outdir / "result.json", {
        "sizes": sizes, "p": p, "seeds_per_size": seeds, "slack": res.slack,
        "pass_rate_sigma1": res.pass_rate_sigma1,
        "pass_rate_sigma": res.pass_rate_sigma,
        "pass_rate_delta_min": res.pass_rate_delta_min,
    })
    run.say(f"pass rates: sigma1 {res.pass_rate_sigma1:.3f}, "
            f"sigma {res.pass_rate_sigma:.3f}, delta_min {res.pass_rate_delta_min:.3f}")


def _suite_lemma1(run: Run, master: int) -> None:
    worst = 0.0
    points = 0
    for gap in np.geomspace(1e-4, 0.9, 10):
        cfg = PointerConfig.from_gap(gap, 0.01)
        for E in np.linspace(gap, 1.0, 100):
            g = abs(pointer_zero_amplitude(E, cfg.tau, cfg.l))
            worst = max(worst, g)
            points += 1
    run.check(worst < 0.5, f"|gamma| < 1/2 on {points} grid points (worst {worst:.6g})")
    bad = []
    for eps in (0.1, 0.01):
        for k in range(5):
            P = random_reversible_chain(8, seed=master + 17 * k)
            pi = require_ergodic_reversible(P)
            M = MarkedSet((k % 8,))
            s = critical_interpolation(pi.marked_mass(M))
            H = build_effective(discriminant(interpolate(P, M, s)))
            psi0 = np.sqrt(pi.pi)
            alpha_sq = float((H.vectors[:, -1] @ psi0) ** 2)
            cfg = PointerConfig.from_gap(H.gap, eps * alpha_sq)
            res = run_blocks_postselect(H, psi0, cfg)
            dist = math.sqrt(np.linalg.norm(res.system_state - H.vectors[:, -1]) ** 2
                             + np.linalg.norm(res.perp_amplitudes) ** 2)
            if dist > eps or res.success_prob < alpha_sq - eps:
                bad.append((eps, k, dist, res.success_prob))
    run.check(not bad, f"post-selection lands within eps of the top mode ({bad!r})")


def _suite_search(run: Run, master: int) -> None:
    insts = [(random_reversible_chain(n, seed=master + n), MarkedSet((0,)))
             for n in (5, 8, 12)]
    insts.append((lazy_complete_graph(8), MarkedSet((2, 5))))
    eps = 0.05
    for k, (P, M) in enumerate(insts):
        pi = require_ergodic_reversible(P)
        out = spatial_search(P, pi, M, eps, seed=master + k)
        run.check(out.success_prob >= 0.25 - eps,
                  f"search success {out.success_prob:.4f} on instance {k}")
        ext = extended_hitting_time(P, pi, M, DEFAULT_S_GRID)
        D = discriminant(interpolate(P, M, out.s_star))
        run.check(1.0 / D.spectral_gap >= ext.ht_plus / 2.0,
                  f"1/Delta(s*) >= HT+/2 on instance {k}")


def _suite_qssamp(run: Run, master: int) -> None:
    eps = 0.01
    for k, n in enumerate((5, 9, 16)):
        P = random_reversible_chain(n, seed=master + 3 * k + 1)
        pi = require_ergodic_reversible(P)
        out = qssamp_prepare(P, 0, eps, pi_hint=pi)
        dist = float(np.linalg.norm(out.state - np.sqrt(pi.pi)))
        run.check(dist <= 4 * eps, f"qssamp distance {dist:.3e} on n={n}")
        run.check(min(out.stage_probs) >= 0.45,
                  f"stage probabilities {out.stage_probs} on n={n}")


def _suite_hitting(run: Run, master: int) -> None:
    for k, n in enumerate((6, 10)):
        P = random_reversible_chain(n, seed=master + 7 * k)
        pi = require_ergodic_reversible(P)
        M = MarkedSet((1,))
        spectral = hitting_time_spectral(P, pi, M)
        mc = hitting_time_montecarlo(P, M, trials=40_000, seed=master + k)
        run.check(abs(spectral.ht - mc.ht) <= 3 * mc.stderr + 1e-9,
                  f"spectral vs MC hitting time on n={n}")
        ext = extended_hitting_time(P, pi, M, DEFAULT_S_GRID)
        run.check(ext.invariance_residual <= 1e-8,
                  f"invariance residual {ext.invariance_residual:.2e} on n={n}")
        for s in (0.0, 0.5):
            D = discriminant(interpolate(P, M, s))
            u = np.sqrt(pi.pi) * (~M.mask(n))
            overlaps = D.spectrum.overlaps(u)[:-1]
            bound = float(np.sum(overlaps ** 2)) / D.spectral_gap
            run.check(interpolated_hitting_time(P, pi, M, s) <= bound + 1e-9,
                      f"HT(s={s}) within the gap bound on n={n}")


def _suite_gapmap(run: Run, master: int) -> None:
    for k, n in enumerate((5, 9)):
        P = random_reversible_chain(n, seed=master + 11 * k)
        D = discriminant_of(P)
        report = edge_walk_gap_map(D)
        H = build_effective(D)
        direct = np.diff(np.concatenate([[0.0], np.sort(H.mode_energies)]))
        mapped = np.sort([row[3] for row in report.per_gap_map])
        run.check(bool(np.allclose(np.sort(direct), mapped, atol=1e-12)),
                  f"gap map matches direct energy differencing on n={n}")


def cmd_verify(run: Run) -> None:
    suite = run._get("suite", str, default="all")
    master = run._get("master_seed", int, default=0)
    suites = {"lemma1": _suite_lemma1, "search": _suite_search,
              "qssamp": _suite_qssamp, "hitting": _suite_hitting,
              "gapmap": _suite_gapmap}
    if suite != "all" and suite not in suites:
        raise ValidationError(f"unknown suite {suite!r}; pick one of "
                              f"{sorted(suites)} or all")
    for name, fn in suites.items():
        if suite in ("all", name):
            run.say(f"suite {name}:")
            fn(run, master)


HANDLERS = {
    "chain-info": cmd_chain_info,
    "hitting": cmd_hitting,
    "search": cmd_search,
    "qssamp": cmd_qssamp,
    "qlsamp": cmd_qlsamp,
    "gnp-spectrum": cmd_gnp_spectrum,
    "gnp-mixing": cmd_gnp_mixing,
    "sigma-scaling": cmd_sigma_scaling,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwmix",
        description="Continuous-time walk experiments on Markov chains and random graphs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        sp = sub.add_parser(name)
        sp.add_argument("--chain", help="chain file: first line n, then n rows")
        sp.add_argument("--marked", help="comma-separated marked node indices")
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--s", type=float)
        sp.add_argument("--j", type=int)
        sp.add_argument("--start", type=int)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--eps-exponent", type=float)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seeds", type=int, help="seeds per experiment cell")
        sp.add_argument("--master-seed", type=int)
        sp.add_argument("--sizes", help="start:stop:step or comma list")
        sp.add_argument("--t-max", type=float)
        sp.add_argument("--suite")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--config", help="key=value file; flags override it")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; 2 is reserved for assertion failures
        return EXIT_OK if not exc.code else EXIT_USAGE
    t0 = time.time()
    try:
        run = Run(args.command, args)
        HANDLERS[args.command](run)
        return run.finish(t0)
    except QwmixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
