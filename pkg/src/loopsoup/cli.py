"""Command-line interface.

Subcommands: ``sample-soup``, ``sample-bubbles``, ``hcap``, ``loop-add``,
``verify`` and ``plot``.  Every command echoes the merged run configuration
(flags over config file over defaults) so outputs can be reproduced
bit-exactly; exit code 2 flags configuration errors (with a JSON error on
stderr), 1 a failed verification.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .capacity import HalfDiskHull, VerticalSlitHull, estimate_hcap
from .config import RunConfig, merge_config
from .curves import read_ndjson, write_ndjson
from .domains import RectWindow
from .errors import ConfigError, LoopSoupError
from .rng import RngStream
from .samplers import Window, sample_bubble
from .soups import sample_loop_soup, write_soup
from .stats import reports_to_json, summarize

HCAP_SETS = {
    "half-disk": lambda size: HalfDiskHull(size),
    "slit": lambda size: VerticalSlitHull(size),
}


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="loopsoup",
        description="Monte Carlo toolkit for Brownian loop, bubble and excursion "
        "measures, loop soups, and chronological loop adding.",
    )
    top.add_argument("--config", help="JSON config file (flags take precedence)")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--dt", type=float)
        p.add_argument("--delta-hit", dest="delta_hit", type=float)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--t-min", dest="t_min", type=float)
        p.add_argument("--t-max", dest="t_max", type=float)
        p.add_argument("--box", help="x0,y0,x1,y1")
        p.add_argument("--r-min", dest="r_min", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--T", dest="horizon", type=float)
        p.add_argument("--n", type=float)
        p.add_argument("--soups", type=float)
        p.add_argument("--threads", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--format", dest="fmt", choices=["ndjson", "csv"])

    p = sub.add_parser("sample-soup", help="sample one loop soup over a window")
    common(p)
    p = sub.add_parser("sample-bubbles", help="sample bubbles above a least radius")
    common(p)
    p = sub.add_parser("hcap", help="estimate half-plane capacity")
    common(p)
    p.add_argument("--set", dest="shape", choices=sorted(HCAP_SETS), default="half-disk")
    p.add_argument("--size", type=float, default=1.0, help="radius or height of the set")
    p = sub.add_parser("loop-add", help="chronological discovery along the slit")
    common(p)
    p.add_argument(
        "--trace-out", help="write the loop-added trace of the first soup here"
    )
    p = sub.add_parser("verify", help="run the acceptance suite")
    common(p)
    p.add_argument("--suite", action="append", help="suite name (repeatable); default all")
    p.add_argument("--figures", help="directory for diagnostic figures")
    p = sub.add_parser("plot", help="render curves from NDJSON to a figure file")
    common(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--shade-hulls", action="store_true")
    p.add_argument("--skip-header", action="store_true", help="input is a soup stream")
    return top


def _echo_config(cfg: RunConfig) -> None:
    print(cfg.to_json())


def _write_curves(curves, cfg: RunConfig) -> None:
    if cfg.out is None:
        write_ndjson(curves, sys.stdout)
        return
    path = Path(cfg.out)
    if cfg.fmt == "csv":
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["curve_id", "kind", "t", "x", "y"])
            for k, c in enumerate(curves):
                for t, p in zip(c.times, c.points):
                    wr.writerow([k, c.kind, repr(float(t)), repr(p.real), repr(p.imag)])
    else:
        with path.open("w") as fh:
            write_ndjson(curves, fh)
    path.with_suffix(path.suffix + ".config.json").write_text(cfg.to_json() + "\n")


def cmd_sample_soup(cfg: RunConfig, args) -> int:
    window = Window(RectWindow(*cfg.box), cfg.t_min, cfg.t_max)
    soup = sample_loop_soup(
        cfg.lam, window, RngStream(cfg.seed), n_steps=int(cfg.n)
    )
    if cfg.out is None:
        write_soup(soup, sys.stdout)
    else:
        with open(cfg.out, "w") as fh:
            write_soup(soup, fh)
        Path(cfg.out + ".config.json").write_text(cfg.to_json() + "\n")
    print(f"sampled {len(soup)} loops (window mass {soup.restricted_mass:.6g})",
          file=sys.stderr)
    return 0


def cmd_sample_bubbles(cfg: RunConfig, args) -> int:
    count = int(cfg.soups)
    rng = RngStream(cfg.seed)
    bubbles = [sample_bubble(cfg.r_min, int(cfg.n), rng.substream(k)) for k in range(count)]
    _write_curves(bubbles, cfg)
    return 0


def cmd_hcap(cfg: RunConfig, args) -> int:
    shape = HCAP_SETS[args.shape](args.size)
    est, err = estimate_hcap(shape, int(cfg.n), RngStream(cfg.seed))
    print(json.dumps({"set": args.shape, "size": args.size, "estimate": est,
                      "stderr": err, "walks": int(cfg.n)}))
    return 0


def cmd_loop_add(cfg: RunConfig, args) -> int:
    from .capacity import VerticalSlit
    from .loop_adding import (
        DEFAULT_DISCOVERY_WINDOW,
        build_loop_added_path,
        run_chronological_discovery,
    )

    run = run_chronological_discovery(
        cfg.lam,
        cfg.horizon,
        cfg.rho,
        int(cfg.soups),
        RngStream(cfg.seed),
        window=DEFAULT_DISCOVERY_WINDOW,
        delta_hit=cfg.hit_tolerance,
        workers=cfg.threads,
    )
    lines = []
    pos = 0
    for soup_idx, ts in enumerate(run.hit_times):
        for j, r in enumerate(ts):
            lines.append(
                {
                    "soup": soup_idx,
                    "r_j": r,
                    "t_gamma": float(run.loop_duration[pos + j]),
                    "rad_bubble": float(run.bubble_radius[pos + j]),
                    "loop_id": j,
                }
            )
        pos += len(ts)
    out = sys.stdout if cfg.out is None else open(cfg.out, "w")
    try:
        for rec in lines:
            out.write(json.dumps(rec))
            out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
            Path(cfg.out + ".config.json").write_text(cfg.to_json() + "\n")
    print(
        json.dumps(
            {
                "soups": int(cfg.soups),
                "mean_count": run.mean_count,
                "dispersion": run.dispersion,
                "near_double_hits": run.near_double_hits,
                "delta_hit": cfg.hit_tolerance,
            }
        ),
        file=sys.stderr,
    )
    if getattr(args, "trace_out", None):
        from .loop_adding import discover
        from .soups import sample_loop_soup as _soup

        eta = VerticalSlit()
        window = Window(RectWindow(-4, 0, 4, 4.5), max(cfg.t_min, 0.05), 40.0)
        soup = _soup(cfg.lam, window, RngStream(cfg.seed).substream(999), n_steps=int(cfg.n))
        discs, _ = discover(eta, cfg.horizon, soup, cfg.hit_tolerance)
        path = build_loop_added_path(eta, cfg.horizon, discs)
        with open(args.trace_out, "w") as fh:
            write_ndjson([path.trace], fh)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    from .acceptance import SUITES, run_suite

    names = args.suite or sorted(SUITES)
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    all_reports = []
    for name in names:
        reports = run_suite(name, cfg.seed, workers=cfg.threads)
        all_reports.extend(reports)
        for rep in reports:
            print(rep.line())
    summary = summarize(all_reports)
    print(
        f"{summary['passed']}/{summary['total']} passed"
        f"  (bonferroni alpha {summary['bonferroni_alpha']:.2e},"
        f" ok={summary['bonferroni_ok']})"
    )
    if cfg.out:
        Path(cfg.out).write_text(reports_to_json(all_reports) + "\n")
        Path(cfg.out + ".config.json").write_text(cfg.to_json() + "\n")
    if args.figures:
        _verify_figures(all_reports, args.figures, cfg)
    return 0 if summary["failed"] == 0 else 1


def _verify_figures(reports, figdir: str, cfg: RunConfig) -> None:
    from . import plotting
    from .samplers import bubble_statistics_batch

    out = Path(figdir)
    out.mkdir(parents=True, exist_ok=True)
    stats = bubble_statistics_batch(1.0, 20_000, RngStream(cfg.seed, 77), n=128)
    plotting.render_histogram(
        np.minimum(stats["radius"], 8.0),
        str(out / "bubble_radius_tail.svg"),
        density_curve=lambda r: np.where(r >= 1.0, 2.0 / r**3, 0.0),
        title="bubble apex radius vs 2/r^3",
        xlabel="radius",
    )
    plotting.render_histogram(
        stats["angle"],
        str(out / "bubble_apex_angle.svg"),
        density_curve=lambda a: 2.0 * np.sin(a) ** 2 / np.pi,
        title="bubble apex angle vs (2/pi) sin^2",
        xlabel="angle",
    )


def cmd_plot(cfg: RunConfig, args) -> int:
    from . import plotting

    with open(args.infile) as fh:
        if args.skip_header:
            fh.readline()
        curves = read_ndjson(fh)
    out = cfg.out or (args.infile + ".svg")
    plotting.render_curves(curves, out, shade_hulls=args.shade_hulls)
    print(f"wrote {out} ({len(curves)} curves)", file=sys.stderr)
    return 0


COMMANDS = {
    "sample-soup": cmd_sample_soup,
    "sample-bubbles": cmd_sample_bubbles,
    "hcap": cmd_hcap,
    "loop-add": cmd_loop_add,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    flag_keys = [
        "seed", "dt", "delta_hit", "lam", "t_min", "t_max", "box", "r_min",
        "rho", "horizon", "n", "soups", "threads", "out", "fmt",
    ]
    flags = {k: getattr(args, k, None) for k in flag_keys}
    try:
        cfg = merge_config(flags, args.config)
        _echo_config(cfg)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except LoopSoupError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
