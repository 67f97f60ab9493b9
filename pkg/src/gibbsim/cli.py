"""Command line interface.

One binary, six subcommands: ``simulate`` (dataset generation),
``recon-pf`` (classical partial Fourier reconstruction of a k-space
tensor file), ``phantom-edge`` (edge phantom generation), ``eval-cnr``
and ``eval-spectral`` (processor evaluation harnesses) and ``validate``
(dataset integrity check).  Exit codes: 0 success, 2 usage error,
1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from fractions import Fraction

import numpy as np

from . import dataset as ds
from . import tensorfile
from .errors import GibbsimError
from .metrics import spectral_response
from .pfrecon import PfReconConfig, margosian_recon
from .phantom import (
    EdgePhantomSpec,
    compose_processor_input,
    make_edge_phantom,
    run_cnr_sweep,
)
from .phase import PhaseModelParams
from .simulate import SimConfig

__all__ = ["main"]


def _parse_fraction(text: str) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid fraction {text!r}") from exc
    if not 0.5 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"fraction must be in (1/2, 1], got {text}")
    return value


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gibbsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a training dataset from photographs")
    p.add_argument("--src", required=True, help="directory of source photographs")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--pf", type=_parse_fraction, default=1.0, metavar="{1,7/8,6/8,5/8}")
    p.add_argument("--matrix", type=int, default=100, help="output matrix size (default 100)")
    p.add_argument("--hi-res", type=int, default=256, dest="hi_res")
    p.add_argument("--noise-min", type=float, default=1.0)
    p.add_argument("--noise-max", type=float, default=32.0)
    p.add_argument("--magnitude", action="store_true", help="magnitude-mode pairs")
    p.add_argument("--concat-pf-recon", action="store_true", dest="concat_pf_recon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("recon-pf", help="partial Fourier reconstruction of a k-space tensor")
    p.add_argument("--in", dest="infile", required=True,
                   help="complex tensor file of centered, masked k-space")
    p.add_argument("--out", required=True, help="output tensor file (real image)")
    p.add_argument("--pf", type=_parse_fraction, required=True)
    p.add_argument("--ramp", type=int, default=4, help="homodyne transition width in lines")

    p = sub.add_parser("phantom-edge", help="generate the rotated edge phantom")
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--matrix", type=int, default=1024)
    p.add_argument("--snr", type=float, default=float("inf"),
                   help="add image-domain complex noise at mean|img|/snr (inf = clean)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output tensor file")

    p = sub.add_parser("eval-cnr", help="FWHM-vs-CNR sweep of a processor")
    p.add_argument("--processor", required=True, help="processor command")
    p.add_argument("--cnr", type=_parse_float_list, required=True, metavar="LIST")
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--pf", type=_parse_fraction, default=1.0)
    p.add_argument("--matrix", type=int, default=100, help="simulated matrix size")
    p.add_argument("--hi-res", type=int, default=256, dest="hi_res")
    p.add_argument("--phantom-matrix", type=int, default=1024)
    p.add_argument("--magnitude", action="store_true")
    p.add_argument("--no-phase", action="store_true", help="disable random phase")
    p.add_argument("--composite", help="optional path for the stitched composite tensor")

    p = sub.add_parser("eval-spectral", help="spectral response of a processor on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--processor", required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--plot", help="optional PNG plot of the profile")
    p.add_argument("--limit", type=int, default=0, help="use only the first N samples")
    p.add_argument("--batch", type=int, default=32)

    p = sub.add_parser("validate", help="check a dataset directory")
    p.add_argument("--dataset", required=True)
    return parser


def _cmd_simulate(args) -> int:
    cfg = SimConfig(
        hi_res=args.hi_res,
        lo_res=args.matrix,
        pf_fraction=args.pf,
        noise_ratio_range=(args.noise_min, args.noise_max),
        magnitude_mode=args.magnitude,
        concat_pf_recon=args.concat_pf_recon,
    )
    manifest = ds.generate_dataset(args.src, cfg, args.count, args.seed, args.out,
                                   workers=args.workers)
    print(f"wrote {args.count} samples, manifest at {manifest}")
    return 0


def _cmd_recon_pf(args) -> int:
    ksp = tensorfile.load_tensor(args.infile)
    if ksp.ndim != 2:
        raise GibbsimError(f"expected a 2D k-space tensor, got shape {ksp.shape}")
    recon = margosian_recon(
        np.asarray(ksp, dtype=np.complex128),
        PfReconConfig(args.pf, transition_width=args.ramp),
    )
    tensorfile.save_tensor(args.out, recon)
    print(f"wrote reconstruction to {args.out}")
    return 0


def _cmd_phantom_edge(args) -> int:
    spec = EdgePhantomSpec(matrix=args.matrix, angle_deg=args.angle, snr_or_cnr=args.snr)
    img = make_edge_phantom(spec)
    if np.isfinite(args.snr):
        rng = np.random.Generator(np.random.PCG64(args.seed))
        sigma = float(np.mean(np.abs(img))) / args.snr / np.sqrt(2.0)
        noise = rng.standard_normal(img.shape + (2,))
        img = np.abs(img + sigma * (noise[..., 0] + 1j * noise[..., 1]))
    tensorfile.save_tensor(args.out, img)
    print(f"wrote phantom to {args.out}")
    return 0


def _cmd_eval_cnr(args) -> int:
    phase = PhaseModelParams(no_phase_prob=1.0) if args.no_phase else PhaseModelParams()
    cfg = SimConfig(
        hi_res=args.hi_res,
        lo_res=args.matrix,
        pf_fraction=args.pf,
        magnitude_mode=args.magnitude,
        phase_params=phase,
    )
    phantom = EdgePhantomSpec(matrix=args.phantom_matrix)
    points, composite = run_cnr_sweep(
        ds.CommandProcessor(args.processor), args.cnr, args.repeats, cfg, args.seed,
        phantom=phantom,
    )
    with open(args.csv, "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["cnr", "fwhm_mean", "fwhm_std", "n_rows"])
        for pt in points:
            writer.writerow([pt.cnr, pt.fwhm_mean, pt.fwhm_std, pt.n_rows])
    if args.composite:
        tensorfile.save_tensor(args.composite, composite)
    print(f"wrote {len(points)} CNR points to {args.csv}")
    return 0


def _cmd_eval_spectral(args) -> int:
    _, records = ds.load_manifest(args.dataset)
    if args.limit:
        records = records[: args.limit]
    if not records:
        raise GibbsimError("dataset has no samples")
    processor = ds.CommandProcessor(args.processor)
    outputs: list[np.ndarray] = []
    targets: list[np.ndarray] = []
    for start in range(0, len(records), args.batch):
        chunk = records[start : start + args.batch]
        pairs = [ds.read_sample(args.dataset, rec) for rec in chunk]
        batch = [compose_processor_input(p) for p in pairs]
        outputs.extend(processor(batch))
        targets.extend(np.asarray(p.target, dtype=np.float64) for p in pairs)
    response = spectral_response(outputs, targets)
    h = response.pf_direction_profile.size
    with open(args.csv, "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["freq_index", "profile"])
        for i, value in enumerate(response.pf_direction_profile):
            writer.writerow([i - h // 2, value])
    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        freqs = np.arange(h) - h // 2
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(freqs, response.pf_direction_profile)
        ax.set_xlabel("frequency index (PF direction)")
        ax.set_ylabel("mean spectral response")
        ax.set_ylim(bottom=0)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
    print(f"averaged {response.n_averaged} samples into {args.csv}")
    return 0


def _cmd_validate(args) -> int:
    n = ds.validate_dataset(args.dataset)
    print(f"dataset OK: {n} samples")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "recon-pf": _cmd_recon_pf,
    "phantom-edge": _cmd_phantom_edge,
    "eval-cnr": _cmd_eval_cnr,
    "eval-spectral": _cmd_eval_spectral,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (GibbsimError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
