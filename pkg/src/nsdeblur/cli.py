"""Command-line front end.

Commands: estimate (kernel pair from one degraded image), deblur (restore
with a stored inverse kernel), synth (make degraded test images with a
known kernel), quality (no-reference sharpness and optional PSNR).
Exit codes: 0 ok, 2 input error, 3 consistency error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import OptimizerConfig, format_report, make_report
from .errors import DeblurError, InputError
from .fileio import read_image, read_kernel, write_image, write_kernel
from .pipeline import PipelineConfig, estimate_kernels, restore
from .quality import AiConfig, anisotropy_index, psnr
from .synth import add_impulse_noise, disk_kernel, gaussian_kernel, motion_kernel
from .grid import convolve

_CONFIG_KEYS = {
    "ar_p": int, "ar_q": int, "psf_l": int, "psf_m": int,
    "optimizer": str, "ipsf_route": str, "denoise": bool,
    "denoise_order": int, "denoise_size": int, "space_ridge": float,
    "lambda0": float, "delta_t": float, "theta": float, "q": int,
    "eps": float, "max_iters": int, "alpha": float,
}


def read_config_file(path) -> dict:
    """Plain "key = value" settings, # comments, one per line."""
    values: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                if "=" not in body:
                    raise InputError(
                        f"{path}:{lineno}: expected 'key = value'")
                key, _, val = body.partition("=")
                key, val = key.strip(), val.strip()
                if key not in _CONFIG_KEYS:
                    raise InputError(f"{path}:{lineno}: unknown key {key!r}")
                conv = _CONFIG_KEYS[key]
                if conv is bool:
                    values[key] = val.lower() in ("1", "true", "yes", "on")
                else:
                    values[key] = conv(val)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    return values


def _build_config(args) -> PipelineConfig:
    values = read_config_file(args.config) if args.config else {}
    # command-line flags override the file
    if args.ar_order is not None:
        values["ar_p"], values["ar_q"] = args.ar_order
    if args.psf_size is not None:
        values["psf_l"], values["psf_m"] = args.psf_size
    if getattr(args, "optimizer", None) is not None:
        values["optimizer"] = args.optimizer
    if getattr(args, "ipsf", None) is not None:
        values["ipsf_route"] = args.ipsf
    if getattr(args, "denoise", False):
        values["denoise"] = True
    for flag, key in (("lam", "lambda0"), ("delta_t", "delta_t"),
                      ("eps", "eps"), ("max_iters", "max_iters"),
                      ("theta", "theta"), ("alpha", "alpha"),
                      ("space_ridge", "space_ridge")):
        val = getattr(args, flag, None)
        if val is not None:
            values[key] = val
    solver_keys = {k: values.pop(k) for k in
                   ("lambda0", "delta_t", "theta", "q", "eps", "max_iters",
                    "alpha") if k in values}
    cfg = PipelineConfig(**values, solver=OptimizerConfig(**solver_keys))
    cfg.validate()
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ar-order", nargs=2, type=int, metavar=("P", "Q"),
                   help="model orders (odd)")
    p.add_argument("--psf-size", nargs=2, type=int, metavar=("L", "M"),
                   help="kernel size (odd, smaller than the model order)")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="initial regularization weight")
    p.add_argument("--delta-t", dest="delta_t", type=float,
                   help="relaxation (step) parameter")
    p.add_argument("--eps", type=float, help="stop tolerance")
    p.add_argument("--max-iters", dest="max_iters", type=int,
                   help="iteration cap")
    p.add_argument("--theta", type=float, help="contraction gate factor")
    p.add_argument("--alpha", type=float, help="dynamic-weight seed scale")
    p.add_argument("--space-ridge", dest="space_ridge", type=float,
                   help="ridge for the space-domain inverse fit")
    p.add_argument("--config", help="settings file (key = value lines)")


def _parse_blur(spec: str) -> np.ndarray:
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind == "gaussian":
            sigma = float(parts[1])
            size = int(parts[2]) if len(parts) > 2 else None
            return gaussian_kernel(sigma, size)
        if kind == "motion":
            length = int(parts[1])
            angle = float(parts[2]) if len(parts) > 2 else 0.0
            return motion_kernel(length, angle)
        if kind == "disk":
            return disk_kernel(float(parts[1]))
    except (IndexError, ValueError) as exc:
        raise InputError(f"bad blur spec {spec!r}: {exc}") from exc
    raise InputError(
        f"unknown blur type {parts[0]!r} (gaussian:SIGMA[:SIZE], "
        "motion:LENGTH[:ANGLE], disk:RADIUS)")


def cmd_estimate(args) -> int:
    stage = "config"
    try:
        cfg = _build_config(args)
        stage = "load"
        image = read_image(args.input)
        stage = "estimate"
        result = estimate_kernels(image, cfg)
        stage = "write"
        write_kernel(args.out_psf, result.psf)
        write_kernel(args.out_ipsf, result.ipsf)
        with open(args.report, "w", encoding="ascii") as fh:
            fh.write("# kernel estimation\n")
            fh.write(f"null_dim = {result.basis.null_dim}\n")
            fh.write("# kernel shape optimization\n")
            fh.write(format_report(result.psf_report))
            fh.write("# inverse shape optimization\n")
            fh.write(format_report(result.ipsf_report))
    except DeblurError as exc:
        print(f"estimate failed at stage {stage}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def cmd_deblur(args) -> int:
    stage = "config"
    try:
        cfg = _build_config(args)
        stage = "load"
        image = read_image(args.input)
        ipsf = read_kernel(args.ipsf_file)
        psf = read_kernel(args.psf_file) if args.psf_file else None
        if cfg.optimizer != "none" and psf is None:
            raise InputError(
                "iterative optimizers need --psf in addition to --ipsf")
        stage = "restore"
        restored, report = restore(image, ipsf, psf, cfg)
        stage = "write"
        write_image(args.output, restored)
        if args.report:
            with open(args.report, "w", encoding="ascii") as fh:
                fh.write(format_report(
                    report if report is not None
                    else make_report([], [], "eps_reached")))
    except DeblurError as exc:
        print(f"deblur failed at stage {stage}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def cmd_synth(args) -> int:
    try:
        image = read_image(args.input)
        kernel = _parse_blur(args.blur)
        degraded = convolve(image, kernel)
        if args.noise > 0:
            degraded = add_impulse_noise(degraded, args.noise, args.seed)
        write_image(args.output, degraded)
        if args.kernel_out:
            write_kernel(args.kernel_out, kernel)
        if args.manifest:
            with open(args.manifest, "w", encoding="ascii") as fh:
                fh.write(f"input = {args.input}\n")
                fh.write(f"output = {args.output}\n")
                fh.write(f"blur = {args.blur}\n")
                fh.write(f"kernel = {args.kernel_out or ''}\n")
                fh.write(f"noise = {args.noise:.17g}\n")
                fh.write(f"seed = {args.seed}\n")
    except DeblurError as exc:
        print(f"synth failed: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def cmd_quality(args) -> int:
    try:
        cfg = AiConfig(window=args.window, fragment=args.fragment)
        reference = read_image(args.reference) if args.reference else None
        for path in args.images:
            image = read_image(path)
            ai = anisotropy_index(image, cfg)
            line = f"{path} AI={ai:.6f}"
            if reference is not None:
                line += f" PSNR={psnr(image, reference):.4f}"
            print(line)
    except DeblurError as exc:
        print(f"quality failed: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsdeblur",
        description="Blind single-image deblurring: estimate a blur kernel "
                    "and its inverse, then restore.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate",
                           help="estimate kernel and inverse from an image")
    p_est.add_argument("input", help="degraded image (.pgm/.png)")
    p_est.add_argument("--out-psf", default="h.kern")
    p_est.add_argument("--out-ipsf", default="g.kern")
    p_est.add_argument("--report", default="report.txt")
    p_est.add_argument("--ipsf", choices=("spectral", "space"))
    p_est.add_argument("--denoise", action="store_true",
                       help="apply the high-order prefilter first")
    _add_common(p_est)
    p_est.set_defaults(func=cmd_estimate, optimizer=None)

    p_deb = sub.add_parser("deblur", help="restore an image with a stored "
                                          "inverse kernel")
    p_deb.add_argument("input")
    p_deb.add_argument("--ipsf-file", required=True, metavar="G_KERN")
    p_deb.add_argument("--psf-file", metavar="H_KERN")
    p_deb.add_argument("--output", required=True)
    p_deb.add_argument("--report")
    p_deb.add_argument("--optimizer", choices=("none", "bvdr", "cs"))
    _add_common(p_deb)
    p_deb.set_defaults(func=cmd_deblur, ipsf=None, denoise=False)

    p_syn = sub.add_parser("synth", help="degrade a clean image with a "
                                         "known kernel")
    p_syn.add_argument("input")
    p_syn.add_argument("--blur", required=True,
                       help="gaussian:SIGMA[:SIZE] | motion:LENGTH[:ANGLE] "
                            "| disk:RADIUS")
    p_syn.add_argument("--output", required=True)
    p_syn.add_argument("--kernel-out")
    p_syn.add_argument("--manifest")
    p_syn.add_argument("--noise", type=float, default=0.0,
                       help="impulse-noise density in [0, 1]")
    p_syn.add_argument("--seed", type=int, default=0)
    p_syn.set_defaults(func=cmd_synth)

    p_q = sub.add_parser("quality", help="no-reference sharpness index "
                                         "(and PSNR against a reference)")
    p_q.add_argument("images", nargs="+")
    p_q.add_argument("--reference")
    p_q.add_argument("--window", type=int, default=8)
    p_q.add_argument("--fragment", type=int, default=100)
    p_q.set_defaults(func=cmd_quality)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
