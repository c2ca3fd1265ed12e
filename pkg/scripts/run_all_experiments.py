#!/usr/bin/env python3
"""Run the full experiment battery and write reports to an output directory.

Each experiment produces a JSON report (cells, gates, verdict, param hash)
and a CSV of the raw cells. The script prints one summary line per
experiment, lists any failed gates, and exits 1 if anything failed.

Full mode takes a few minutes on one core; --quick drops the expensive
torus tube cells and shrinks the surveys for a fast smoke run.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nodalab import (
    DomainSpec,
    FieldCache,
    run_approx_theorem,
    run_comparability_scaling,
    run_density_check,
    run_dim2_checks,
    run_exponent_survey,
    run_tube_scaling,
    run_yau_check,
    write_report,
)


def build_jobs(quick: bool, seed: int, cache):
    interval = DomainSpec.interval()
    torus = DomainSpec.torus((1.0, 1.0))

    if quick:
        tube_torus_modes = ((3, 4), (5, 5), (2, 7))
        tube_mu_delta = (0.1, 0.2, 0.3)
        exponent_kwargs = dict(
            n_interval=25,
            mu_max_interval=5e4,
            n_box=10,
            interval_point_min=20,
            seed=seed,
        )
        approx_kwargs = dict(k_max=2000, n_points=2000, k0=50, box_k_max=400, seed=seed)
    else:
        tube_torus_modes = None
        tube_mu_delta = (0.05, 0.1, 0.2, 0.3)
        exponent_kwargs = dict(seed=seed)
        approx_kwargs = dict(seed=seed)

    return [
        (
            "tube interval",
            lambda: run_tube_scaling(
                interval, include_break_cell=True, seed=seed, cache=cache
            ),
        ),
        (
            "tube torus",
            lambda: run_tube_scaling(
                torus,
                modes=tube_torus_modes,
                mu_delta=tube_mu_delta,
                include_break_cell=True,
                seed=seed,
                cache=cache,
            ),
        ),
        ("yau interval", lambda: run_yau_check(interval, seed=seed, cache=cache)),
        ("yau torus", lambda: run_yau_check(torus, seed=seed, cache=cache)),
        ("density interval", lambda: run_density_check(interval, cache=cache)),
        ("density torus", lambda: run_density_check(torus, cache=cache)),
        ("dim2 torus", lambda: run_dim2_checks(seed=seed, cache=cache)),
        ("comparability", lambda: run_comparability_scaling()),
        ("approx theorem", lambda: run_approx_theorem(**approx_kwargs)),
        ("exponent survey", lambda: run_exponent_survey(**exponent_kwargs)),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="report output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for stochastic refinement")
    parser.add_argument("--cache-dir", default=None, help="distance-field cache directory")
    parser.add_argument("--quick", action="store_true", help="smaller configs, same gates")
    args = parser.parse_args(argv)

    cache = FieldCache(args.cache_dir) if args.cache_dir else None
    jobs = build_jobs(args.quick, args.seed, cache)

    failures = 0
    skipped_total = 0
    t_start = time.monotonic()
    for label, job in jobs:
        t0 = time.monotonic()
        report = job()
        elapsed = time.monotonic() - t0
        json_path, _ = write_report(report, args.out)
        n_pass = sum(1 for g in report.gates if g.passed)
        n_skip = sum(1 for c in report.cells if c.skipped)
        skipped_total += n_skip
        verdict = "PASS" if report.passed else "FAIL"
        print(
            f"{label:18s} {verdict}  gates {n_pass}/{len(report.gates)}"
            f"  cells {len(report.cells)} ({n_skip} skipped)"
            f"  {elapsed:6.1f}s  {json_path}"
        )
        if not report.passed:
            failures += 1
            for g in report.gates:
                if not g.passed:
                    print(f"    failed gate {g.name}: {g.value!r} not {g.op} {g.bound!r}")

    total = time.monotonic() - t_start
    print(
        f"\n{len(jobs) - failures}/{len(jobs)} experiments passed,"
        f" {skipped_total} cells skipped, {total:.1f}s total"
    )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
