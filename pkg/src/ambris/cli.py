"""Command-line entry point.

    ambris <command> --config <path> [--out <dir>] [--beam <n>] [--delta-deg <x>]
                     [--include-direct] [--threads <k>]

Commands: codebook, evaluate, search, map, report. Every failure prints a
single JSON line ``{"error": <type>, "message": <text>}`` on stderr and exits
nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .codebook import build_codebook, compose_weights, phase_grid, write_codebook_csv
from .config import RunConfig, load_config
from .errors import AmbrisError, ConfigError
from .fieldmap import map_peak, reflected_field_map, write_fieldmap_csv, write_fieldmap_pgm
from .metrics import classify_beam, coherent_delta, hotspot_delta
from .search import (
    Quantizer,
    contrast_upper_bound,
    evaluate_channels,
    feedback_search_channels,
    write_result_csv,
    write_transcript,
)

COMMANDS = ("codebook", "evaluate", "search", "map", "report")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _evaluate(cfg: RunConfig, threads: int):
    s = cfg.scenario
    cb = build_codebook(s, cfg.phase_bits)
    result = evaluate_channels(
        cfg.channels, cb, phase_grid(cfg.phases), s.noise_sigma, s.tag_reflection, workers=threads
    )
    return cb, result


def cmd_codebook(cfg: RunConfig, out: Path, **_) -> list[Path]:
    path = out / "codebook.csv"
    write_codebook_csv(build_codebook(cfg.scenario, cfg.phase_bits), path)
    return [path]


def cmd_evaluate(cfg: RunConfig, out: Path, threads: int = 1, **_) -> list[Path]:
    _, result = _evaluate(cfg, threads)
    path = out / "evaluate.csv"
    write_result_csv(result, path)
    return [path]


def cmd_search(cfg: RunConfig, out: Path, **_) -> list[Path]:
    s = cfg.scenario
    range_max = cfg.search_range_max
    if range_max is None:
        range_max = contrast_upper_bound(cfg.channels, s.tag_reflection)
    q = Quantizer(cfg.search_bits, range_max)
    cb = build_codebook(s, cfg.phase_bits)
    result = feedback_search_channels(
        cfg.channels, cb, phase_grid(cfg.phases), q, cfg.budget, s.noise_sigma, s.tag_reflection
    )
    transcript, table = out / "search_transcript.txt", out / "search_result.csv"
    write_transcript(result, transcript)
    write_result_csv(result, table)
    return [transcript, table]


def cmd_map(cfg: RunConfig, out: Path, beam=None, delta_deg=None, include_direct=False,
            threads: int = 1, **_) -> list[Path]:
    s = cfg.scenario
    beam = cfg.map_beam if beam is None else beam
    delta_deg = cfg.map_delta_deg if delta_deg is None else delta_deg
    cb = build_codebook(s, cfg.phase_bits)
    u = compose_weights(cb.beam(beam), math.radians(delta_deg))
    fm = reflected_field_map(
        s, u, cfg.map_grid, cfg.floor_db, include_direct or cfg.include_direct, workers=threads
    )
    csv_path, pgm_path, side = out / "fieldmap.csv", out / "fieldmap.pgm", out / "fieldmap.txt"
    write_fieldmap_csv(fm, csv_path)
    write_fieldmap_pgm(fm, pgm_path, side)
    i, j, peak = map_peak(fm)
    with open(side, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(f"beam={beam}\ndelta_deg={_fmt(delta_deg)}\n")
        fh.write(f"peak_i={i}\npeak_j={j}\npeak_db={_fmt(peak)}\n")
    return [csv_path, pgm_path, side]


def report_lines(cfg: RunConfig, threads: int = 1) -> list[str]:
    s, cs = cfg.scenario, cfg.channels
    cb, r = _evaluate(cfg, threads)
    b = cb.beam(r.best_beam)
    lines = [
        f"best_beam={r.best_beam}",
        f"best_phase={r.best_phase}",
        f"best_delta_deg={_fmt(360.0 * r.best_phase / cfg.phases)}",
        f"best_contrast={_fmt(r.best_contrast)}",
        f"best_ber={_fmt(r.best_ber)}",
        f"ref_contrast={_fmt(r.ref_contrast)}",
        f"ref_ber={_fmt(r.ref_ber)}",
        f"sigma={_fmt(s.noise_sigma)}",
        f"improved={'true' if r.best_ber < r.ref_ber else 'false'}",
    ]
    try:
        bc = classify_beam(cs, b, cfg.eps_hot, cfg.eps_dual, s.tag_reflection)
        lines += [f"beam_class={bc.kind.value}", f"leakage_ratio={_fmt(bc.leakage_ratio)}"]
    except AmbrisError:
        lines += ["beam_class=undefined", "leakage_ratio=undefined"]
    for name, fn in (("hotspot_delta_deg", hotspot_delta), ("coherent_delta_deg", coherent_delta)):
        try:
            lines.append(f"{name}={_fmt(math.degrees(fn(cs, b, s.tag_reflection)))}")
        except AmbrisError:
            lines.append(f"{name}=undefined")
    n_better = int((r.ber < r.ref_ber).sum())
    n_worse = int((r.ber > r.ref_ber).sum())
    lines += [f"pairs_better={n_better}", f"pairs_worse={n_worse}", f"pairs_total={r.ber.size}"]
    return lines


def cmd_report(cfg: RunConfig, out: Path, threads: int = 1, **_) -> list[Path]:
    path = out / "report.txt"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(report_lines(cfg, threads)) + "\n")
    return [path]


HANDLERS = {
    "codebook": cmd_codebook,
    "evaluate": cmd_evaluate,
    "search": cmd_search,
    "map": cmd_map,
    "report": cmd_report,
}


def run_command(cmd: str, cfg: RunConfig, out=None, **options) -> list[Path]:
    """Run one command and return the paths it wrote."""
    if cmd not in HANDLERS:
        raise ConfigError(f"unknown command {cmd!r}")
    out = Path(cfg.output_dir if out is None else out)
    out.mkdir(parents=True, exist_ok=True)
    return HANDLERS[cmd](cfg, out, **options)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"usage: {message}")


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("AMBRIS_THREADS")
    if env is None:
        return 1
    try:
        value = int(env)
    except ValueError:
        raise ConfigError(f"AMBRIS_THREADS: must be an integer (got {env!r})") from None
    if value < 1:
        raise ConfigError(f"AMBRIS_THREADS: must be >= 1 (got {value})")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ambris", description="RIS-assisted ambient backscatter simulator")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    p.add_argument("--beam", type=int, default=None, help="1-based beam index for `map`")
    p.add_argument("--delta-deg", type=float, default=None, help="common phase shift for `map`")
    p.add_argument("--include-direct", action="store_true", help="add the direct source field to `map`")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $AMBRIS_THREADS or 1)")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        threads = _threads(args.threads)
        if threads < 1:
            raise ConfigError(f"--threads: must be >= 1 (got {threads})")
        cfg = load_config(args.config)
        written = run_command(
            args.command,
            cfg,
            out=args.out,
            beam=args.beam,
            delta_deg=args.delta_deg,
            include_direct=args.include_direct,
            threads=threads,
        )
    except AmbrisError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
