"""Command line entry point: ``surfstokes study ...``."""
from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, UnsupportedSurface

EXIT_OK, EXIT_LEVEL_FAILURE, EXIT_CONFIG = 0, 1, 2


def parse_levels(text: str) -> tuple:
    """Accept ``a..b`` (inclusive), a comma list, or a single level."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level range {text!r}") from None


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="surfstokes", description="Taylor-Hood surface Stokes studies")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    st = sub.add_parser("study", help="run a mesh-refinement convergence study")
    st.add_argument("--surface", choices=("sphere", "torus"), default="sphere")
    st.add_argument("--radius", type=float, default=1.0)
    st.add_argument("--major-radius", type=float, default=2.0)
    st.add_argument("--minor-radius", type=float, default=0.5)
    st.add_argument("--geom-degree", type=int, default=2)
    st.add_argument("--velocity-degree", type=int, default=2)
    st.add_argument("--levels", type=parse_levels, default=(1, 2, 3, 4))
    st.add_argument("--mms", choices=("killing", "polynomial"), default="killing")
    st.add_argument("--penalty-exponent", type=float, default=2.0)
    st.add_argument("--penalty-normal", choices=("improved", "discrete"), default="improved")
    st.add_argument("--solver", choices=("direct", "minres"), default="direct")
    st.add_argument("--tol", type=float, default=1e-10)
    st.add_argument("--spectra", type=_on_off, default=False, metavar="{on,off}")
    st.add_argument("--format", choices=("json", "csv"), default="json")
    st.add_argument("--out", default=None, help="report path (stdout if omitted)")
    st.add_argument("-q", "--quiet", action="store_true", help="no per-level progress")
    return parser


def _thread_limit():
    raw = os.environ.get("SURFSTOKES_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SURFSTOKES_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("SURFSTOKES_THREADS must be >= 1")
    return n


def _progress(rec):
    if rec.ok:
        msg = (f"level {rec.level}: h={rec.h:.4g} n_u={rec.n_u} n_p={rec.n_p} "
               f"energy={rec.energy_error:.4e} pressure={rec.pressure_l2:.4e} "
               f"({rec.wall_time_s:.1f}s)")
    else:
        msg = f"level {rec.level}: FAILED {rec.failure}"
    print(msg, file=sys.stderr, flush=True)


def main(argv=None) -> int:
    from threadpoolctl import threadpool_limits

    from .study import StudyConfig, emit_report, run_study

    args = build_parser().parse_args(argv)
    try:
        threads = _thread_limit()
        cfg = StudyConfig(
            surface=args.surface, radius=args.radius, major_radius=args.major_radius,
            minor_radius=args.minor_radius, geom_degree=args.geom_degree,
            velocity_degree=args.velocity_degree, levels=args.levels, mms=args.mms,
            penalty_exponent=args.penalty_exponent, penalty_normal=args.penalty_normal,
            solver=args.solver, tol=args.tol, spectra=args.spectra, out=args.out,
            format=args.format,
        )
        with threadpool_limits(limits=threads):
            report = run_study(cfg, log=None if args.quiet else _progress)
    except (ConfigError, UnsupportedSurface, ValueError) as exc:
        print(f"surfstokes: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = emit_report(report, cfg.format, cfg.out)
    except OSError as exc:
        print(f"surfstokes: cannot write report: {exc}", file=sys.stderr)
        return EXIT_LEVEL_FAILURE
    if cfg.out is None:
        sys.stdout.write(text)
    return EXIT_LEVEL_FAILURE if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
