"""Command-line surface.

Verbs: score-ssim, fit-pristine, score-niqe, distort, mscn-hist,
penalty-eval, serve.  Exit codes are a stable contract: 0 success,
2 input error, 3 degenerate data, 4 model incompatibility.  All numeric
output uses fixed six-decimal formatting (override with --precision where
offered) and LF line endings so golden-file tests stay stable.

``QAQ_THREADS`` caps fit-pristine corpus parallelism; aggregation is
ordered by path, so results are identical at any thread count.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .distort import DistortionSpec, apply_distortion
from .errors import DegenerateDataError, InputError, ModelIncompatibilityError, QaqError
from .images import load_image, save_pgm
from .mscn import FeatureConfig, mscn, patch_features, spatial_gradient
from .mvg import fit_mvg, load_model, meta_from_config, save_model, score_image
from .regularizers import PenaltyWeights, discriminator_loss_terms
from .ssim import SsimParams, d1_distance, d2_distance, dq_distance, ssim_index

IMAGE_SUFFIXES = (".png", ".pgm")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QaqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.EXIT_CODE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaq",
        description="Quality-aware scoring toolkit: SSIM distances, "
        "naturalness models, and gradient-penalty evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score-ssim", help="SSIM, d1, d2 and dQ between two images")
    p.add_argument("reference")
    p.add_argument("test")
    p.add_argument("--precision", type=int, default=6, help="output decimals")
    p.set_defaults(func=_cmd_score_ssim)

    p = sub.add_parser("fit-pristine", help="fit a pristine model over a corpus dir")
    p.add_argument("corpus", help="directory of PNG/PGM images (one level)")
    p.add_argument("-o", "--output", required=True, help="model JSON path")
    p.add_argument("--gradient", action="store_true", help="model spatial-gradient fields")
    p.add_argument("--patch-size", type=int, default=96)
    p.add_argument("--sharpness", type=float, default=0.75)
    p.add_argument("--scales", type=int, default=2, choices=(1, 2))
    p.set_defaults(func=_cmd_fit_pristine)

    p = sub.add_parser("score-niqe", help="naturalness score against a model")
    p.add_argument("image")
    p.add_argument("--model", required=True)
    p.add_argument("--gradient", action="store_true", help="score the spatial-gradient field")
    p.add_argument("--precision", type=int, default=6)
    p.set_defaults(func=_cmd_score_niqe)

    p = sub.add_parser("distort", help="write a distorted copy of an image (PGM)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--kind", required=True, choices=("blur", "awgn"))
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_distort)

    p = sub.add_parser("mscn-hist", help="MSCN coefficient histogram as CSV")
    p.add_argument("image")
    p.add_argument("--gradient", action="store_true")
    p.add_argument("--bins", type=int, default=101)
    p.add_argument("--range", nargs=2, type=float, default=(-3.0, 3.0), metavar=("A", "B"))
    p.set_defaults(func=_cmd_mscn_hist)

    p = sub.add_parser("penalty-eval", help="compose discriminator loss terms")
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--one-gp", type=float, required=True)
    p.add_argument("--quality", type=float, required=True)
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=0.1)
    p.add_argument("--precision", type=int, default=6)
    p.set_defaults(func=_cmd_penalty_eval)

    p = sub.add_parser("serve", help="run the HTTP scoring service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def _cmd_score_ssim(args) -> int:
    ref = load_image(args.reference)
    test = load_image(args.test)
    params = SsimParams()
    prec = args.precision
    print(f"SSIM {ssim_index(ref, test, params):.{prec}f}")
    print(f"d1 {d1_distance(ref, test, params):.{prec}f}")
    print(f"d2 {d2_distance(ref, test, params):.{prec}f}")
    print(f"dQ {dq_distance(ref, test, params):.{prec}f}")
    return 0


def _corpus_paths(corpus: str) -> list[Path]:
    root = Path(corpus)
    if not root.is_dir():
        raise InputError(f"corpus {corpus} is not a directory")
    paths = sorted(
        p for p in root.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if len(paths) < 2:
        raise InputError(
            f"corpus {corpus} holds {len(paths)} usable images; need at least 2"
        )
    return paths


def _thread_count() -> int:
    raw = os.environ.get("QAQ_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise InputError(f"QAQ_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise InputError(f"QAQ_THREADS must be >= 1, got {n}")
        return n
    return min(8, os.cpu_count() or 1)


def _cmd_fit_pristine(args) -> int:
    paths = _corpus_paths(args.corpus)
    config = FeatureConfig(
        patch_size=args.patch_size,
        sharpness_fraction=args.sharpness,
        scales=args.scales,
    )

    def features_of(path: Path) -> np.ndarray:
        img = load_image(path)
        if args.gradient:
            img = spatial_gradient(img)
        return patch_features(img, config)

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        per_image = list(pool.map(features_of, paths))
    feats = np.vstack(per_image)
    if feats.shape[0] < 2:
        raise DegenerateDataError(
            f"corpus yielded {feats.shape[0]} patches; need at least 2"
        )
    meta = meta_from_config(config, gradient=args.gradient, sample_count=feats.shape[0])
    model = fit_mvg(feats, meta=meta)
    save_model(model, args.output)
    print(f"patches {feats.shape[0]}")
    return 0


def _cmd_score_niqe(args) -> int:
    model = load_model(args.model)
    if model.meta.gradient != args.gradient:
        want = "with" if model.meta.gradient else "without"
        raise ModelIncompatibilityError(
            f"meta mismatch on field 'gradient': model was fitted {want} --gradient"
        )
    img = load_image(args.image)
    if args.gradient:
        img = spatial_gradient(img)
    score = score_image(img, model)
    print(f"{score:.{args.precision}f}")
    return 0


def _cmd_distort(args) -> int:
    spec = DistortionSpec(kind=args.kind, level=args.level, seed=args.seed)
    img = load_image(args.input)
    save_pgm(apply_distortion(img, spec), args.output)
    return 0


def _cmd_mscn_hist(args) -> int:
    lo, hi = args.range
    if not (hi > lo):
        raise InputError(f"--range must satisfy A < B, got {lo} {hi}")
    if args.bins < 1:
        raise InputError(f"--bins must be >= 1, got {args.bins}")
    img = load_image(args.image)
    if args.gradient:
        img = spatial_gradient(img)
    coeffs = mscn(img).ravel()
    counts, edges = np.histogram(coeffs, bins=args.bins, range=(lo, hi))
    total = counts.sum()
    normalized = counts / total if total > 0 else counts.astype(np.float64)
    centers = (edges[:-1] + edges[1:]) / 2.0
    for center, frac in zip(centers, normalized):
        print(f"{center:.6f},{frac:.6f}")
    return 0


def _cmd_penalty_eval(args) -> int:
    weights = PenaltyWeights(lambda1=args.lambda1, lambda2=args.lambda2)
    total = discriminator_loss_terms(args.gap, args.one_gp, args.quality, weights)
    print(f"{total:.{args.precision}f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
