"""Command-line front end: CSV data files plus a key: value run manifest.

Subcommands::

    svd       singular values (and vectors) of one block
    spectra   singular values with the paired tridiagonal eigenvalues
    cond      condition number, printed on one line
    heatmap   log10 condition numbers of every block of an N x N DFT
    hadamard  singular value profile of the factor H in F = G o H
    localize  log10 magnitudes of the column DFTs of U and V

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import apps, pdpss
from .core import DEFAULT_SCALAR, SubmatrixSpec, build_J
from .eig_tridiag import eig_selected, EigenSelection
from .errors import InvalidArgumentError, NumericalFailureError
from .fourier_ops import columnwise_fft

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
MANIFEST = "manifest.txt"


def _version():
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a binary64 value."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _cell(z) -> str:
    return f'"{fmt(z.real)},{fmt(z.imag)}"'


def write_real_csv(path: Path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in M:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_column(path: Path, v):
    with open(path, "w", newline="\n") as fh:
        for x in np.asarray(v, dtype=float):
            fh.write(fmt(x) + "\n")


def write_complex_csv(path: Path, M):
    with open(path, "w", newline="\n") as fh:
        for row in np.asarray(M, dtype=complex):
            fh.write(",".join(_cell(z) for z in row) + "\n")


class _Run:
    """Collects written files and writes the manifest at the end."""

    def __init__(self, command, params, args):
        self.command, self.params = command, params
        self.out = Path(args.out)
        self.files: list[str] = []
        self.extra: dict[str, str] = {}
        self.t0 = args.t0

    def path(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        self.files.append(name)
        return self.out / name

    def finish(self):
        lines = [
            f"command: {self.command}",
            "parameters: " + " ".join(f"{k}={v}" for k, v in self.params.items()),
            f"eps: {fmt(DEFAULT_SCALAR.eps)}",
            f"wall_time_s: {time.perf_counter() - self.t0:.3f}",
            "files: " + " ".join(self.files),
            f"version: {_version()}",
        ]
        lines += [f"{k}: {v}" for k, v in self.extra.items()]
        with open(self.out / MANIFEST, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")


def _spec(args):
    return SubmatrixSpec(args.n, args.p, args.q, getattr(args, "j0", 1), getattr(args, "k0", 1))


def cmd_svd(args) -> int:
    spec = _spec(args)
    res = pdpss.svd(spec, strategy=args.strategy, mode=args.mode, matvec=args.matvec)
    run = _Run("svd", {"n": spec.N, "p": spec.p, "q": spec.q, "j0": spec.j0, "k0": spec.k0,
                       "strategy": args.strategy, "mode": args.mode}, args)
    write_column(run.path("sigma.csv"), res.sigma)
    if not args.no_vectors:
        write_complex_csv(run.path("U.csv"), res.U)
        write_complex_csv(run.path("V.csv"), res.V)
    if res.flags:
        run.extra["flags"] = " ".join(res.flags)
    run.finish()
    return EXIT_OK


def cmd_spectra(args) -> int:
    spec = _spec(args)
    tall = spec.at_origin()
    if tall.p < tall.q:
        tall = tall.transposed()
    r = tall.q
    sigma = pdpss.singular_values(tall)
    pairs = eig_selected(build_J(tall.p, tall.q, tall.N), EigenSelection.all(), vectors=False)
    lam = pairs.values[::-1]  # ascending, paired with decreasing sigma
    gaps = np.concatenate((np.diff(lam), [np.nan]))
    run = _Run("spectra", {"n": spec.N, "p": spec.p, "q": spec.q}, args)
    with open(run.path("spectra.csv"), "w", newline="\n") as fh:
        fh.write("k,sigma,sigma_squared,J_eigenvalue,J_gap\n")
        for k in range(r):
            gap = "" if k == r - 1 else fmt(gaps[k])
            fh.write(f"{k + 1},{fmt(sigma[k])},{fmt(sigma[k] ** 2)},{fmt(lam[k])},{gap}\n")
    run.extra["plateau_count"] = str(int(np.count_nonzero(sigma >= math.sqrt(spec.N) / 2)))
    run.extra["pq_over_N"] = fmt(spec.p * spec.q / spec.N)
    run.finish()
    return EXIT_OK


def cmd_cond(args) -> int:
    res = apps.condition_number(_spec(args), method=args.method)
    print(f"{fmt(res.sigma_max)} {fmt(res.sigma_min)} {fmt(res.log10_cond)} "
          f"{'true' if res.overflow else 'false'}")
    return EXIT_OK


def cmd_heatmap(args) -> int:
    grid = apps.cond_heatmap(args.n, threads=args.threads)
    run = _Run("heatmap", {"n": args.n}, args)
    write_real_csv(run.path("heatmap.csv"), grid.masked())
    write_real_csv(run.path("heatmap_markers.csv"), grid.values)
    run.extra["overflow_cells"] = str(int(grid.overflow.sum()))
    p, q = np.unravel_index(int(np.argmax(grid.values)), grid.values.shape)
    run.extra["argmax"] = f"p={p + 1} q={q + 1}"
    run.finish()
    return EXIT_OK


def cmd_hadamard(args) -> int:
    if not 0 < args.threshold < 1:
        raise InvalidArgumentError(f"--threshold must lie in (0, 1), got {args.threshold}")
    apps.hadamard_H(args.n)  # checks F = G o H
    sigma, count = apps.hadamard_rank_profile(args.n, args.threshold)
    run = _Run("hadamard", {"n": args.n, "threshold": fmt(args.threshold)}, args)
    write_column(run.path("hadamard_sigma.csv"), sigma)
    run.extra["count_above"] = str(count)
    run.finish()
    print(f"count_above {count}")
    return EXIT_OK


def cmd_localize(args) -> int:
    spec = _spec(args)
    res = pdpss.svd(spec)
    left = apps._log_magnitude(columnwise_fft(res.U))
    right = apps._log_magnitude(columnwise_fft(res.V))
    run = _Run("localize", {"n": spec.N, "p": spec.p, "q": spec.q}, args)
    write_real_csv(run.path("leftMap.csv"), left)
    write_real_csv(run.path("rightMap.csv"), right)
    ok = True
    for M, d in ((res.U, spec.p), (res.V, spec.q)):
        energy = np.sum(np.abs(columnwise_fft(M)) ** 2, axis=0)
        ok &= bool(np.all(np.abs(energy - d) <= 1e-10 * d))
    Ud, Vd = apps.demodulated_factors(spec, res.U, res.V)
    cols = [
        apps.band_energy(res.U, apps.literal_band_half_width(spec.p, spec.N)),
        apps.band_energy(res.V, apps.literal_band_half_width(spec.q, spec.N)),
        apps.band_energy(Ud, apps.demodulated_band_half_width(spec)),
        apps.band_energy(Vd, apps.demodulated_band_half_width(spec)),
    ]
    with open(run.path("band_energy.csv"), "w", newline="\n") as fh:
        fh.write("k,U_literal,V_literal,U_demodulated,V_demodulated\n")
        for k in range(spec.r):
            fh.write(f"{k + 1}," + ",".join(fmt(c[k]) for c in cols) + "\n")
    run.extra["parseval"] = "ok" if ok else "failed"
    run.finish()
    return EXIT_OK if ok else EXIT_NUMERICAL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fouriersvd", description="SVD of contiguous DFT submatrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def block(p, defaults=(None, None, None), shift=False):
        n, pp, q = defaults
        p.add_argument("--n", type=int, required=n is None, default=n, help="DFT length N")
        p.add_argument("--p", type=int, required=pp is None, default=pp, help="number of rows")
        p.add_argument("--q", type=int, required=q is None, default=q, help="number of columns")
        if shift:
            p.add_argument("--j0", type=int, default=1, help="first row (1-based, default 1)")
            p.add_argument("--k0", type=int, default=1, help="first column (1-based, default 1)")

    def out(p):
        p.add_argument("--out", default=".", help="output directory (default: current)")

    p = sub.add_parser("svd", help="singular triplets of one block")
    block(p, shift=True)
    p.add_argument("--strategy", choices=("auto", "fft", "projection"), default="auto")
    p.add_argument("--mode", choices=("reduced", "full"), default="reduced")
    p.add_argument("--matvec", choices=("auto", "dense", "fft"), default="auto",
                   help="product backend for A v (default: by cost)")
    p.add_argument("--no-vectors", action="store_true", help="write sigma.csv only")
    out(p)
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("spectra", help="singular values and tridiagonal eigenvalues")
    block(p)
    out(p)
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("cond", help="condition number of one block")
    block(p, shift=True)
    p.add_argument("--method", choices=("linear", "full"), default="linear")
    p.set_defaults(func=cmd_cond)

    p = sub.add_parser("heatmap", help="condition numbers of all blocks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: CPU count)")
    out(p)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("hadamard", help="singular values of H in F = G o H")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.5, help="relative threshold (default 0.5)")
    out(p)
    p.set_defaults(func=cmd_hadamard)

    p = sub.add_parser("localize", help="frequency localization maps")
    block(p, defaults=(200, 100, 50))
    out(p)
    p.set_defaults(func=cmd_localize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.t0 = time.perf_counter()
    try:
        return args.func(args)
    except InvalidArgumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailureError as e:
        stage = f" [{e.stage}]" if e.stage else ""
        print(f"numerical failure{stage}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
