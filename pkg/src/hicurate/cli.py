"""``hicurate`` command-line entry point.

Subcommands map one-to-one onto pipeline stages: ``stabilize`` (crop
planning + application), ``curate`` (quality scoring + partition),
``schedule`` (curriculum emission), ``evaluate`` (metrics report) and
``resampler-check`` (numerical verification of the token resampler).

Per-sample failures never abort a corpus run; a subcommand exits nonzero
only when it produces no successful output at all.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import curation, curriculum, lip_geometry, manifest_io, metrics, resampler_core
from .config import PipelineConfig
from .errors import HicurateError


def _load_config(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    for attr in ("threshold", "seed", "workers"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(config, attr, value)
    if getattr(args, "frozen_stats", None):
        config.frozen_stats_path = args.frozen_stats
    if getattr(args, "snr_mode", None):
        config.snr_mode = args.snr_mode
    config.validate()
    return config


def _read_manifest(path: str) -> list[manifest_io.SampleRecord]:
    return manifest_io.parse_sample_manifest(
        Path(path).read_text(encoding="utf-8"))


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_stabilize(args) -> int:
    config = _load_config(args)
    records = _read_manifest(args.manifest)
    if args.lip_indices:
        lips = lip_geometry.load_lip_indices(args.lip_indices)
    elif config.lip_indices_path:
        lips = lip_geometry.load_lip_indices(config.lip_indices_path)
    else:
        lips = lip_geometry.default_lip_indices()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    failures = []
    n_ok = 0
    for record in records:
        try:
            track = manifest_io.parse_landmark_track(
                Path(record.landmarks_path).read_text(encoding="utf-8"))
            plan = lip_geometry.plan_crops(track, lips, config.gamma)
            frames = manifest_io.read_frame_dir(record.frames_path)
            crops = lip_geometry.apply_crops(frames, plan)
            sample_dir = out / record.id
            manifest_io.write_frame_dir(crops, sample_dir, prefix="crop")
            (sample_dir / "crop_plan.json").write_text(
                plan.to_json_line() + "\n", encoding="utf-8")
            n_ok += 1
        except (HicurateError, OSError) as exc:
            failures.append({"id": record.id, "error": str(exc)})
    report = {"n_samples": len(records), "n_ok": n_ok, "failures": failures}
    (out / "stabilize_report.json").write_text(
        json.dumps(report, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(report, indent=2))
    return 0 if n_ok > 0 else 1


def cmd_curate(args) -> int:
    config = _load_config(args)
    records = _read_manifest(args.manifest)
    out = Path(args.out)
    stats, scores, failures = curation.curate_corpus(records, config, out)
    (out / "corpus_stats.json").write_text(
        json.dumps(stats.__dict__, indent=2) + "\n", encoding="utf-8")
    n_accept = sum(1 for s in scores if s.accepted)
    print(f"scored {len(scores)} samples: {n_accept} accepted, "
          f"{len(scores) - n_accept} rejected, {len(failures)} failed")
    return 0


def cmd_schedule(args) -> int:
    accept = [r.id for r in _read_manifest(args.accept_manifest)]
    reject = [r.id for r in _read_manifest(args.reject_manifest)]
    hashes = {"accept": _sha256(args.accept_manifest),
              "reject": _sha256(args.reject_manifest)}
    schedule = curriculum.build_schedule(
        accept, reject, seed=args.seed,
        epochs_stage1=args.epochs_stage1, epochs_stage2=args.epochs_stage2,
        manifest_hashes=hashes)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    schedule.save(out / "schedule.json")
    print(f"wrote {schedule.total_epochs}-epoch schedule to {out / 'schedule.json'}")
    for warning in schedule.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    records = _read_manifest(args.manifest)
    pairs = []
    load_failures = []
    for record in records:
        missing = [name for name, v in (
            ("hyp_text", record.hypothesis_text),
            ("ref_emb", record.ref_embedding_path),
            ("pred_emb", record.pred_embedding_path)) if v is None]
        if missing:
            load_failures.append(
                {"id": record.id, "error": f"missing fields: {missing}"})
            continue
        try:
            pred = manifest_io.load_embedding(record.pred_embedding_path)
            ref = manifest_io.load_embedding(record.ref_embedding_path)
        except (HicurateError, OSError) as exc:
            load_failures.append({"id": record.id, "error": str(exc)})
            continue
        pairs.append((record.id, record.hypothesis_text,
                      record.reference_text, pred, ref))
    if not pairs:
        print("error: no evaluable pairs", file=sys.stderr)
        return 1
    report = metrics.evaluate_corpus(pairs, alpha=args.alpha)
    report.failures = load_failures + report.failures
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.save(out / "eval_report.json")
    print(f"CER micro {report.corpus_cer_micro:.4f} / macro "
          f"{report.corpus_cer_macro:.4f}, EmbSim {report.corpus_emb_sim:.4f}, "
          f"CS micro {report.corpus_cs_micro:.4f} / macro {report.corpus_cs_macro:.4f}")
    return 0


def cmd_resampler_check(args) -> int:
    config = resampler_core.ResamplerConfig(
        n_queries=args.n_queries, d_in=args.d_in, d_model=args.d_model,
        n_heads=args.n_heads, d_llm=args.d_llm, seed=args.seed)
    params = resampler_core.init_resampler(config)

    shape_checks = []
    for dims in [(1, 1, 1), (2, 2, 2), (4, 4, 4), (8, 8, 8)]:
        grid = resampler_core.synthetic_grid(dims, config.d_in, seed=args.seed)
        out = resampler_core.resample(params, grid)
        shape_checks.append({
            "dims": list(dims),
            "tokens_in": grid.tokens.shape[0],
            "shape_out": list(out.shape),
            "ok": out.shape == (config.n_queries, config.d_llm),
        })

    grid = resampler_core.synthetic_grid(tuple(args.grid), config.d_in, seed=args.seed)
    attn = resampler_core.attention_weights(params, grid, per_head=True)
    row_sum_residual = float(np.abs(attn.sum(axis=-1) - 1.0).max())
    grad_err = resampler_core.gradient_check(
        params, grid, targets=np.array([0]), seed=args.seed)

    report = {
        "config": config.__dict__,
        "shape_checks": shape_checks,
        "attention_row_sum_residual": row_sum_residual,
        "gradient_max_rel_error": grad_err,
        "pass": bool(all(c["ok"] for c in shape_checks)
                     and row_sum_residual < 1e-6 and grad_err < 1e-4),
    }
    print(json.dumps(report, indent=2))
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hicurate",
        description="Audio-visual corpus curation and evaluation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workers=False):
        p.add_argument("--config", help="JSON pipeline config file")
        p.add_argument("--out", required=True, help="output directory")
        if workers:
            p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("stabilize", help="plan and apply stabilized lip crops")
    p.add_argument("manifest")
    common(p, workers=True)
    p.add_argument("--lip-indices", help="JSON file overriding the lip index set")
    p.set_defaults(func=cmd_stabilize)

    p = sub.add_parser("curate", help="score samples and partition the corpus")
    p.add_argument("manifest")
    common(p, workers=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--snr-mode", choices=["reference", "estimate"], default=None)
    p.add_argument("--frozen-stats", help="corpus_stats.json with frozen bounds")
    p.set_defaults(func=cmd_curate)

    p = sub.add_parser("schedule", help="emit the two-stage curriculum schedule")
    p.add_argument("accept_manifest")
    p.add_argument("reject_manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs-stage1", type=int, default=3)
    p.add_argument("--epochs-stage2", type=int, default=5)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("evaluate", help="compute CER/EmbSim/CS over a pairs manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, default=metrics.DEFAULT_ALPHA)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("resampler-check",
                       help="shape, attention and gradient verification report")
    p.add_argument("--n-queries", type=int, default=64)
    p.add_argument("--d-in", type=int, default=12)
    p.add_argument("--d-model", type=int, default=16)
    p.add_argument("--n-heads", type=int, default=2)
    p.add_argument("--d-llm", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, nargs=3, default=[2, 2, 2],
                   metavar=("T", "H", "W"))
    p.set_defaults(func=cmd_resampler_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HicurateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
