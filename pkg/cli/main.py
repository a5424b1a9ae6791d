"""
eit-nsim command line.

    python -m cli.main scan --scenario fig2b --out results/fig2b.csv
    python -m cli.main scan --config run.yaml --override modulation.ratio=0.05 --threads 4
    python -m cli.main validate --level full
    python -m cli.main plot --csv results/fig2b.csv

Exit codes: 0 ok, 1 config or file error, 2 solver error, 3 validation failure.
"""
import argparse
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import pandas as pd

import config
from eit_nsim.atom.level_scheme import build_level_scheme
from eit_nsim.errors import (
    ConfigError, EitSimError, InputValidationError, ResultsFileError, SolverError, UnsupportedModeError,
)
from eit_nsim.pipeline.run_config import load_run
from eit_nsim.pipeline.validation import LEVELS, ValidationConstants, run_checks
from eit_nsim.spectrum.features import dip_metrics, features_frame, track_side_dips
from eit_nsim.spectrum.scan import SpectrumResult, scan, sweep
from eit_nsim.stores.plot_script import emit_plot_script
from eit_nsim.stores.results_store import sweep_path, write_spectrum

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VALIDATION = 3

pd.set_option("display.width", 160)


def _guarded(action: Callable[[], int]) -> int:
    """Run a subcommand and turn library errors into exit codes"""
    try:
        return action()
    except (ConfigError, InputValidationError, UnsupportedModeError, ResultsFileError) as e:
        print(f"[CONFIG ERROR] {e}")
        return EXIT_CONFIG
    except SolverError as e:
        print(f"[SOLVER ERROR] {e}")
        return EXIT_SOLVER
    except EitSimError as e:
        print(f"[ERROR] {type(e).__name__}: {e}")
        return EXIT_SOLVER
    except OSError as e:
        print(f"[CONFIG ERROR] {e}")
        return EXIT_CONFIG


def _summary(result: SpectrumResult, path: Path, config_hash: str) -> None:
    print(f"[scan] wrote {path} ({len(result)} points, config={config_hash}, "
          f"optical depth scale={result.optical_depth_scale:.4g})")
    for w in result.warnings:
        print(f"[scan] warning: {w}")
    frame = features_frame(dip_metrics(result))
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.4f}") if len(frame) else "[scan] no features")


def run_scan(config_path: Optional[str] = None, scenario: Optional[str] = None, out: Optional[str] = None,
             overrides: Sequence[str] = (), threads: Optional[int] = None, verbose: Optional[bool] = None,
             plot: bool = False) -> int:
    def action() -> int:
        run = load_run(config_path, scenario, overrides, threads=threads, verbose=verbose)
        model = run.model
        stem = model.scenario or (Path(config_path).stem if config_path else "scan")
        csv = Path(out or model.output.csv or config.RESULTS_DIR / f"{stem}.csv")
        plot_to = model.output.plot
        scheme = build_level_scheme(run.scheme)

        if run.scan.outer is None:
            result = scan(run.scan, scheme, run.doppler)
            path = write_spectrum(result, csv, run.config_hash)
            _summary(result, path, run.config_hash)
            if plot or plot_to:
                print(f"[plot] wrote {emit_plot_script(path, plot_to)}")
            return EXIT_OK

        results = sweep(run.scan, scheme, run.doppler)
        for k, (value, result) in enumerate(results):
            path = write_spectrum(result, sweep_path(csv, k), run.config_hash)
            print(f"[sweep] {run.scan.outer.axis.value}={value:g}")
            _summary(result, path, run.config_hash)
            if plot or plot_to:
                script = emit_plot_script(path, sweep_path(plot_to, k) if plot_to else None)
                print(f"[plot] wrote {script}")
        try:
            tracking = track_side_dips(results)
        except InputValidationError as e:
            print(f"[sweep] side-dip tracking skipped: {e}")
            return EXIT_OK
        print(tracking.table.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        print(f"[sweep] slope left={tracking.slope_left:.4f} right={tracking.slope_right:.4f}")
        for side, gone in (("left", tracking.vanished_left), ("right", tracking.vanished_right)):
            if gone:
                print(f"[sweep] {side} dip not found at {', '.join(f'{v:g}' for v in gone)}")
        return EXIT_OK

    return _guarded(action)


def run_validate(level: str = "quick", constants: Optional[ValidationConstants] = None, seed: Optional[int] = None,
                 verbose: Optional[bool] = None, config_path: Optional[str] = None) -> int:
    def action() -> int:
        # an explicit --seed wins over the run file's seed
        draw_seed = seed if seed is not None else (load_run(config_path).model.seed if config_path else 0)
        print(f"[validate] level={level} seed={draw_seed}")
        results = run_checks(level, constants, draw_seed, verbose=config.VERBOSE if verbose is None else verbose)
        table = pd.DataFrame([{
            "check": r.name,
            "result": "PASS" if r.passed else "FAIL",
            "value": r.value,
            "limit": r.limit,
            "seconds": round(r.seconds, 2),
            "detail": r.detail,
        } for r in results])
        print(table.to_string(index=False, float_format=lambda v: f"{v:.3e}"))
        failed = [r.name for r in results if not r.passed]
        if failed:
            print(f"[VALIDATION FAILED] {', '.join(failed)}")
            return EXIT_VALIDATION
        print(f"[validate] {level}: all {len(results)} checks passed")
        return EXIT_OK

    return _guarded(action)


def run_plot(csv: str, out: Optional[str] = None, with_laser2: bool = False) -> int:
    def action() -> int:
        print(f"[plot] wrote {emit_plot_script(csv, out, with_laser2=with_laser2)}")
        return EXIT_OK

    return _guarded(action)


def _threads(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"--threads must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eit-nsim", description="Rb-87 D2 N-scheme EIT spectra")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scan", help="compute a spectrum (or a sweep of spectra) and write CSV")
    s.add_argument("--scenario", help="named preset, e.g. fig2b")
    s.add_argument("--config", help="YAML run file")
    s.add_argument("--out", help="CSV path (sweeps write <stem>.<k>.csv)")
    s.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="dotted key, value parsed as YAML; repeatable")
    s.add_argument("--threads", type=_threads, default=None,
                   help=f"worker threads (default EITNSIM_THREADS={config.THREADS})")
    s.add_argument("--verbose", action="store_true", default=None)
    s.add_argument("--plot", action="store_true", help="also write a gnuplot script next to each CSV")

    v = sub.add_parser("validate", help="run the oracle suite")
    v.add_argument("--level", choices=LEVELS, default="quick")
    v.add_argument("--seed", type=int, default=None, help="random draws (default: the run file seed, else 0)")
    v.add_argument("--config", help="YAML run file supplying the seed")
    v.add_argument("--verbose", action="store_true", default=None)

    p = sub.add_parser("plot", help="write a gnuplot script for a spectrum CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", help="script path (default <csv stem>.gp)")
    p.add_argument("--laser2", action="store_true", help="also draw the laser-2 absorption")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scan":
        if args.scenario is None and args.config is None:
            print("[CONFIG ERROR] scan needs --scenario or --config")
            return EXIT_CONFIG
        return run_scan(args.config, args.scenario, args.out, args.override, args.threads, args.verbose,
                        args.plot)
    if args.command == "validate":
        return run_validate(args.level, seed=args.seed, verbose=args.verbose, config_path=args.config)
    return run_plot(args.csv, args.out, args.laser2)


if __name__ == "__main__":
    sys.exit(main())
