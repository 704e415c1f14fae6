"""Command-line front end: rates, sweeps, simulation, self-test.

Commands
--------
rate       one key-rate report for a single parameter point
sweep-q    rate vs X-error at fixed signal count (CSV table)
sweep-n    rate vs total signal count at fixed noise (CSV table)
simulate   Monte Carlo trials with analytic columns for comparison
selftest   statevector and sampling verification battery

Exit codes: 0 success / positive rate, 1 usage error, 2 zero rate,
3 self-test failure.  Every command accepts ``--seed`` and produces
byte-identical output for identical invocations.  CSV output is
RFC-4180-style with an LF line ending and floats printed to 12
significant digits; ``--format json`` emits the same fields as JSON.
A ``--config FILE`` of flat ``key = value`` lines overrides flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import ghzsim, sampling
from .bitcore import BitString
from .keyrate import KeyRateReport, key_length, optimize_m
from .protosim import (
    NoiseModel,
    ProtocolParams,
    aggregate,
    analytic_pa,
    analytic_qx,
    postcad_error_rates,
    run_trial,
)

__all__ = ["main", "REPORT_FIELDS", "simulate_fields", "selftest_checks", "CheckResult"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ZERO_RATE = 2
EXIT_SELFTEST = 3

REPORT_FIELDS = [
    "p",
    "signals",
    "half_signals",
    "m",
    "n",
    "epsilon",
    "q",
    "qz",
    "error_formula",
    "delta",
    "qx",
    "pa",
    "n_a",
    "hmin",
    "leak_ec",
    "ell",
    "rate",
    "epsilon_prime",
    "epsilon_fail",
    "epsilon_pa",
    "flags",
]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def report_record(report: KeyRateReport) -> dict:
    """A key-rate report as an ordered field -> value mapping."""
    return {
        "p": report.bobs,
        "signals": 2 * report.half_signals,
        "half_signals": report.half_signals,
        "m": report.test_size,
        "n": report.key_blocks,
        "epsilon": report.epsilon,
        "q": report.x_error,
        "qz": list(report.z_errors),
        "error_formula": report.error_formula,
        "delta": report.delta,
        "qx": report.qx,
        "pa": report.pa,
        "n_a": report.accepted,
        "hmin": report.hmin,
        "leak_ec": report.leak_ec,
        "ell": report.ell,
        "rate": report.rate,
        "epsilon_prime": report.epsilon_prime,
        "epsilon_fail": report.epsilon_fail,
        "epsilon_pa": report.epsilon_pa,
        "flags": ";".join(report.flags),
    }


def _csv_text(fields, records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        writer.writerow([_fmt(rec[f]) for f in fields])
    return buf.getvalue()


def _json_text(payload) -> str:
    return json.dumps(_null_nan(payload), indent=2) + "\n"


def _null_nan(value):
    """NaN fields (e.g. error rates with no surviving block) become null."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _null_nan(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_null_nan(v) for v in value]
    return value


def _emit(text: str, out_path: str | None) -> None:
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Flag parsing
# ---------------------------------------------------------------------------


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems map to exit code 1, not 2
        raise _CliError(message)


def _parse_signals(text: str) -> int:
    total = float(text)
    if total <= 0 or total != int(total):
        raise argparse.ArgumentTypeError(f"signals must be a positive integer, got {text}")
    total = int(total)
    if total % 2:
        raise argparse.ArgumentTypeError("signals must be even (two-round blocks)")
    return total


def _parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text}")
    return int(value)


def _parse_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


_CONFIG_CONVERTERS = {
    "bobs": _parse_int,
    "signals": _parse_signals,
    "signals_min": _parse_signals,
    "signals_max": _parse_signals,
    "points": _parse_int,
    "q": float,
    "q_min": float,
    "q_max": float,
    "q_step": float,
    "qz": str,
    "qz_factors": str,
    "epsilon": float,
    "m": _parse_int,
    "seed": _parse_int,
    "trials": _parse_int,
    "error_formula": str,
    "format": str,
    "out": str,
    "quick": _parse_bool,
}


def _apply_config(args: argparse.Namespace, path: str) -> None:
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _CliError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            dest = key.replace("-", "_")
            if dest not in _CONFIG_CONVERTERS or not hasattr(args, dest):
                raise _CliError(f"{path}:{lineno}: unknown option {key!r}")
            try:
                setattr(args, dest, _CONFIG_CONVERTERS[dest](value))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise _CliError(f"{path}:{lineno}: {exc}") from exc


def _parse_qz(text: str, bobs: int) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise _CliError("empty --qz value")
    values = [float(p) for p in parts]
    if len(values) == 1:
        values = values * bobs
    if len(values) != bobs:
        raise _CliError(f"--qz needs 1 or {bobs} values, got {len(values)}")
    return tuple(values)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=_parse_int, default=0, help="reproducibility seed")
    sub.add_argument("--out", default=None, help="also write the output to this file")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--config", default=None, help="flat key=value file overriding flags")


def _add_protocol(sub: argparse.ArgumentParser, *, with_q: bool = True) -> None:
    sub.add_argument("--bobs", "--p", "-p", dest="bobs", type=_parse_int, default=1,
                     help="number of non-reference parties")
    sub.add_argument("--epsilon", type=float, default=1e-36, help="security parameter")
    sub.add_argument("--m", type=_parse_int, default=None,
                     help="test size (default: optimized)")
    sub.add_argument("--error-formula", choices=("conservative", "independent"),
                     default="conservative", dest="error_formula",
                     help="post-sieve error rate used inside leak_EC")
    if with_q:
        sub.add_argument("--q", type=float, required=True, help="X-basis flip rate per half")
        sub.add_argument("--qz", required=True,
                         help="Z flip rates: one value or a comma list, one per party")


def build_parser() -> _Parser:
    parser = _Parser(prog="qcka-cad", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    rate = subs.add_parser("rate", help="single-point key-rate report")
    rate.add_argument("--signals", type=_parse_signals, required=True,
                      help="total signal count 2N (e.g. 1e7)")
    _add_protocol(rate)
    _add_common(rate)
    rate.set_defaults(func=cmd_rate)

    sweep_q = subs.add_parser("sweep-q", help="rate vs X-error at fixed signals")
    sweep_q.add_argument("--signals", type=_parse_signals, required=True)
    sweep_q.add_argument("--q-min", type=float, default=0.0)
    sweep_q.add_argument("--q-max", type=float, required=True)
    sweep_q.add_argument("--q-step", type=float, default=0.01)
    _add_protocol(sweep_q, with_q=False)
    sweep_q.add_argument("--qz", default=None,
                         help="fixed Z flip rates (otherwise scaled from Q)")
    sweep_q.add_argument("--qz-factors", default="1", dest="qz_factors",
                         help="per-party multipliers applied to Q (comma list)")
    _add_common(sweep_q)
    sweep_q.set_defaults(func=cmd_sweep_q)

    sweep_n = subs.add_parser("sweep-n", help="rate vs total signals at fixed noise")
    sweep_n.add_argument("--signals-min", type=_parse_signals, required=True)
    sweep_n.add_argument("--signals-max", type=_parse_signals, required=True)
    sweep_n.add_argument("--points", type=_parse_int, default=16,
                         help="geometric grid size")
    _add_protocol(sweep_n)
    _add_common(sweep_n)
    sweep_n.set_defaults(func=cmd_sweep_n)

    simulate = subs.add_parser("simulate", help="Monte Carlo protocol trials")
    simulate.add_argument("--signals", type=_parse_signals, required=True)
    simulate.add_argument("--trials", type=_parse_int, default=1)
    _add_protocol(simulate)
    _add_common(simulate)
    simulate.set_defaults(func=cmd_simulate)

    selftest = subs.add_parser("selftest", help="verification battery")
    selftest.add_argument("--quick", action="store_true",
                          help="reduced battery sizes for a fast pass")
    _add_common(selftest)
    selftest.set_defaults(func=cmd_selftest)

    return parser


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _point_report(args, half_signals: int, noise: NoiseModel) -> KeyRateReport:
    if args.m is not None:
        params = ProtocolParams(args.bobs, half_signals, args.m, args.epsilon)
        return key_length(params, noise, error_formula=args.error_formula)
    _, report = optimize_m(args.bobs, half_signals, args.epsilon, noise,
                           error_formula=args.error_formula)
    return report


def _emit_reports(args, reports) -> int:
    records = [report_record(r) for r in reports]
    if args.format == "json":
        _emit(_json_text(records if len(records) > 1 else records[0]), args.out)
    else:
        _emit(_csv_text(REPORT_FIELDS, records), args.out)
    return EXIT_OK if any(r.rate > 0.0 for r in reports) else EXIT_ZERO_RATE


def cmd_rate(args) -> int:
    noise = NoiseModel(args.q, _parse_qz(args.qz, args.bobs))
    report = _point_report(args, args.signals // 2, noise)
    return _emit_reports(args, [report])


def cmd_sweep_q(args) -> int:
    if args.q_step <= 0 or args.q_max < args.q_min:
        raise _CliError("need q-min <= q-max and a positive q-step")
    count = int(math.floor((args.q_max - args.q_min) / args.q_step + 1e-9)) + 1
    qs = [args.q_min + i * args.q_step for i in range(count)]
    factors = None
    if args.qz is None:
        factors = tuple(float(f) for f in args.qz_factors.split(","))
        if len(factors) == 1:
            factors = factors * args.bobs
        if len(factors) != args.bobs:
            raise _CliError(f"--qz-factors needs 1 or {args.bobs} values")
    reports = []
    for q in qs:
        z = _parse_qz(args.qz, args.bobs) if factors is None else tuple(f * q for f in factors)
        reports.append(_point_report(args, args.signals // 2, NoiseModel(q, z)))
    return _emit_reports(args, reports)


def cmd_sweep_n(args) -> int:
    if args.signals_max < args.signals_min or args.points < 1:
        raise _CliError("need signals-min <= signals-max and points >= 1")
    grid = np.geomspace(args.signals_min, args.signals_max, num=args.points)
    totals = sorted({max(2, 2 * int(round(v / 2))) for v in grid})
    noise = NoiseModel(args.q, _parse_qz(args.qz, args.bobs))
    reports = [_point_report(args, total // 2, noise) for total in totals]
    return _emit_reports(args, reports)


def simulate_fields(bobs: int) -> list:
    """Column order of the simulate command for a given party count."""
    fields = ["trial", "qx_observed", "n_a", "n_r", "accepted_fraction"]
    fields += [f"postcad_error_{j + 1}" for j in range(bobs)]
    fields += ["keys_equal_fraction", "qx_analytic", "pa_analytic"]
    fields += [f"postcad_conservative_{j + 1}" for j in range(bobs)]
    fields += [f"postcad_independent_{j + 1}" for j in range(bobs)]
    return fields


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise _CliError("trials must be at least 1")
    noise = NoiseModel(args.q, _parse_qz(args.qz, args.bobs))
    half = args.signals // 2
    if args.m is None:
        m, _ = optimize_m(args.bobs, half, args.epsilon, noise,
                          error_formula=args.error_formula)
    else:
        m = args.m
    params = ProtocolParams(args.bobs, half, m, args.epsilon, seed=args.seed)
    outcomes = [run_trial(params, noise, trial_index=i) for i in range(args.trials)]

    qx_a = analytic_qx(noise.x_error)
    pa_a = analytic_pa(noise.z_errors)
    cons = postcad_error_rates(noise.z_errors, "conservative")
    indep = postcad_error_rates(noise.z_errors, "independent")
    n = params.key_blocks

    records = []
    for i, t in enumerate(outcomes):
        rec = {
            "trial": i,
            "qx_observed": t.qx_observed,
            "n_a": t.accepted,
            "n_r": t.rejected,
            "accepted_fraction": t.accepted / n,
            "keys_equal_fraction": t.keys_equal_fraction,
            "qx_analytic": qx_a,
            "pa_analytic": pa_a,
        }
        for j in range(args.bobs):
            rec[f"postcad_error_{j + 1}"] = t.postcad_error[j]
            rec[f"postcad_conservative_{j + 1}"] = cons[j]
            rec[f"postcad_independent_{j + 1}"] = indep[j]
        records.append(rec)

    stats = aggregate(outcomes)
    summary = {}
    sim_columns = ["qx_observed", "n_a", "n_r", "accepted_fraction"]
    sim_columns += [f"postcad_error_{j + 1}" for j in range(args.bobs)]
    sim_columns += ["keys_equal_fraction"]
    for col in sim_columns:
        source = {"n_a": "accepted", "n_r": "rejected"}.get(col, col)
        if col == "accepted_fraction":
            base = stats["accepted"]
            scale = 1.0 / n
        else:
            base = stats[source]
            scale = 1.0
        summary[col] = {
            "mean": base.mean * scale,
            "std": None if base.std is None else base.std * scale,
            "stderr": None if base.stderr is None else base.stderr * scale,
        }

    fields = simulate_fields(args.bobs)
    if args.format == "json":
        payload = {
            "config": {
                "p": args.bobs, "signals": args.signals, "m": m, "n": n,
                "epsilon": args.epsilon, "q": noise.x_error,
                "qz": list(noise.z_errors), "trials": args.trials, "seed": args.seed,
            },
            "trials": records,
            "aggregate": summary,
        }
        _emit(_json_text(payload), args.out)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for rec in records:
            writer.writerow([_fmt(rec[f]) for f in fields])
        for stat in ("mean", "std", "stderr"):
            row = [stat]
            for f in fields[1:]:
                if f in summary and summary[f][stat] is not None:
                    row.append(_fmt(summary[f][stat]))
                else:
                    row.append("")
            writer.writerow(row)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Self-test battery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # PASS | FAIL | SKIP
    margin: float | None
    detail: str


def _check_parity_exact() -> CheckResult:
    worst = 0.0
    for p in (1, 2, 3):
        for bits in itertools.product((0, 1), repeat=p):
            for y in (0, 1):
                dist = ghzsim.x_basis_parity_distribution(ghzsim.ghz_state(p, bits, y))
                worst = max(worst, abs(dist[y] - 1.0), dist[1 - y])
    ok = worst <= 1e-12
    return CheckResult("ghz-parity-exact", "PASS" if ok else "FAIL", worst,
                       "max deviation of the announced parity from the phase bit")


def _check_orthonormality() -> CheckResult:
    worst = 0.0
    for p in (1, 2, 3):
        basis = [
            (bits, y, ghzsim.ghz_state(p, bits, y).amplitudes)
            for bits in itertools.product((0, 1), repeat=p)
            for y in (0, 1)
        ]
        for (b1, y1, a1), (b2, y2, a2) in itertools.product(basis, repeat=2):
            expect = 1.0 if (b1 == b2 and y1 == y2) else 0.0
            worst = max(worst, abs(abs(np.vdot(a1, a2)) - expect))
    ok = worst <= 1e-10
    return CheckResult("ghz-orthonormality", "PASS" if ok else "FAIL", worst,
                       "max deviation of pairwise inner products from identity")


def _check_expansion() -> CheckResult:
    bad = 0
    for p in (1, 2, 3):
        for bits in itertools.product((0, 1), repeat=p):
            for y in (0, 1):
                if not ghzsim.hadamard_expansion_check(p, bits, y):
                    bad += 1
    return CheckResult("hadamard-expansion", "PASS" if bad == 0 else "FAIL", float(bad),
                       "GHZ states failing the all-Hadamard expansion identity")


def _check_sieve_equivalence(seed: int, trials: int) -> CheckResult:
    configs = ((1, 1), (2, 1), (1, 2))  # (p, rounds)
    worst = 0.0
    skipped = []
    for c, (p, rounds) in enumerate(configs):
        try:
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(1, c)))
            )
            for _ in range(trials):
                state = ghzsim.random_pure_state(2 * rounds * (p + 1), rng)
                worst = max(worst, ghzsim.cad_delayed_measurement_equivalence(p, rounds, state))
        except ValueError:
            skipped.append((p, rounds))
    if skipped and len(skipped) == len(configs):
        return CheckResult("sieve-equivalence", "SKIP", None, "all configs exceed the qubit cap")
    ok = worst <= 1e-9
    note = f"max TV distance over {trials} random states per config"
    if skipped:
        note += f"; skipped {skipped} (qubit cap)"
    return CheckResult("sieve-equivalence", "PASS" if ok else "FAIL", worst, note)


def _check_key_min_entropy(seed: int, trials: int) -> CheckResult:
    configs = ((2, 1), (3, 1), (2, 2))  # (n, p)
    worst = math.inf
    skipped = []
    for c, (n, p) in enumerate(configs):
        try:
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(2, c)))
            )
            for _ in range(trials):
                size = int(rng.integers(1, 2**n + 1))
                picks = rng.choice(2**n, size=size, replace=False)
                words = [format(int(w), f"0{n}b") for w in sorted(picks)]
                hmin, bound = ghzsim.key_min_entropy_check(n, p, words)
                worst = min(worst, hmin - bound)
        except ValueError:
            skipped.append((n, p))
    if skipped and len(skipped) == len(configs):
        return CheckResult("key-min-entropy", "SKIP", None, "all configs exceed the qubit cap")
    ok = worst >= -1e-9
    note = f"min (hmin - bound) over {trials} random parity sets per config"
    if skipped:
        note += f"; skipped {skipped} (qubit cap)"
    return CheckResult("key-min-entropy", "PASS" if ok else "FAIL", worst, note)


def _check_sampling_exhaustive(seed: int) -> CheckResult:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(3,))))
    worst = math.inf
    for n_pop, m in ((16, 4), (20, 5), (24, 6)):
        words = [
            BitString("01" * (n_pop // 2)),
            BitString(rng.integers(0, 2, size=n_pop, dtype=np.uint8)),
        ]
        for delta in (0.25, 0.4):
            bound = sampling.epsilon_cl_bound(sampling.SamplingParams(n_pop, m, delta))
            for q in words:
                fail = sampling.empirical_sampling_failure(q, m, delta)
                worst = min(worst, bound - fail)
    ok = worst >= 0.0
    return CheckResult("sampling-exhaustive", "PASS" if ok else "FAIL", worst,
                       "min (bound - exact failure probability) over small instances")


def _check_sampling_monte_carlo(seed: int, trials: int) -> CheckResult:
    n_pop, m, delta = 200, 50, 0.25
    bound = sampling.epsilon_cl_bound(sampling.SamplingParams(n_pop, m, delta))
    q = BitString("01" * (n_pop // 2))
    fail = sampling.empirical_sampling_failure(q, m, delta, trials=trials, seed=seed)
    sigma = math.sqrt(max(fail, 1.0 / trials) * (1.0 - min(fail, 1.0)) / trials)
    margin = bound + 3.0 * sigma - fail
    ok = margin >= 0.0
    return CheckResult("sampling-monte-carlo", "PASS" if ok else "FAIL", margin,
                       f"bound + 3 sigma - estimate at N={n_pop}, m={m}, delta={delta}")


def _check_sampling_roundtrip() -> CheckResult:
    worst = 0.0
    for eps in (1e-6, 1e-12, 1e-36):
        for n_pop in (1000, 1_000_000):
            for m in (n_pop // 10, n_pop // 4):
                delta = sampling.delta_from_epsilon(n_pop, m, eps)
                log_bound = sampling.sampling_failure_log(n_pop, m, delta)
                target = 2.0 * math.log(eps)
                worst = max(worst, abs(log_bound - target) / abs(target))
    ok = worst <= 1e-12
    return CheckResult("sampling-roundtrip", "PASS" if ok else "FAIL", worst,
                       "max relative log-space error of the delta inverse")


def selftest_checks(seed: int = 0, quick: bool = False) -> list:
    """Run the verification battery and return one result per check."""
    sieve_trials = 10 if quick else 200
    entropy_trials = 10 if quick else 100
    mc_trials = 20_000 if quick else 100_000
    return [
        _check_parity_exact(),
        _check_orthonormality(),
        _check_expansion(),
        _check_sieve_equivalence(seed, sieve_trials),
        _check_key_min_entropy(seed, entropy_trials),
        _check_sampling_exhaustive(seed),
        _check_sampling_monte_carlo(seed, mc_trials),
        _check_sampling_roundtrip(),
    ]


def cmd_selftest(args) -> int:
    results = selftest_checks(seed=args.seed, quick=args.quick)
    if args.format == "json":
        payload = [
            {"name": r.name, "status": r.status, "margin": r.margin, "detail": r.detail}
            for r in results
        ]
        text = _json_text(payload)
    else:
        lines = []
        for r in results:
            margin = "" if r.margin is None else f" margin={r.margin:.6e}"
            lines.append(f"{r.status:4s} {r.name}{margin}  ({r.detail})")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_SELFTEST if any(r.status == "FAIL" for r in results) else EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            _apply_config(args, args.config)
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
