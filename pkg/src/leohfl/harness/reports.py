"""CSV tables and SVG line charts for finished runs.

metrics.csv has one row per (run, global round); summary.csv has one row per
evaluation SNR and a PSNR/SSIM column pair per run, read at the final round.
Numbers are written with 6 significant digits.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import IoFailure
from .engine import RunResult


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def _snr_tag(snr: float) -> str:
    return f"{snr:g}dB"


def _gateway_ids(results: Sequence[RunResult]) -> list[int]:
    ids: list[int] = []
    for r in results:
        ids += [g.id for g in r.scenario.gateways if g.id not in ids]
    return ids


def metrics_header(result: RunResult, gateway_ids: Sequence[int] | None = None) -> list[str]:
    sc = result.scenario
    gids = [g.id for g in sc.gateways] if gateway_ids is None else gateway_ids
    cols = ["run", "global_round", "subregion_round", "clock_s", "mean_loss"]
    cols += [f"gw{g}_loss" for g in gids]
    cols += ["mean_epochs", "mean_window_s", "mean_freq_ghz"]
    cols += [f"psnr_{_snr_tag(s)}" for s in sc.eval_snrs_db]
    cols += [f"ssim_{_snr_tag(s)}" for s in sc.eval_snrs_db]
    return cols


def metrics_rows(result: RunResult, gateway_ids: Sequence[int] | None = None) -> list[list[str]]:
    sc = result.scenario
    gids = [g.id for g in sc.gateways] if gateway_ids is None else gateway_ids
    rows = []
    for m in result.metrics:
        epochs = list(m.epochs_executed.values())
        windows = list(m.window_s.values())
        freqs = list(m.freq_hz.values())
        row = [result.label, fmt(m.round), fmt(m.subround_index), fmt(m.clock_s), fmt(m.mean_loss)]
        row += [fmt(m.per_gateway_loss.get(g, math.nan)) for g in gids]
        row += [fmt(np.mean(epochs)) if epochs else "nan",
                fmt(np.mean(windows)) if windows else "nan",
                fmt(np.mean(freqs) / 1e9) if freqs else "nan"]
        row += [fmt(m.global_psnr_db[s]) for s in sc.eval_snrs_db]
        row += [fmt(m.global_ssim[s]) for s in sc.eval_snrs_db]
        rows.append(row)
    return rows


def metrics_table(results: Sequence[RunResult]) -> str:
    """Round-indexed table of every run.

    Gateway loss columns cover every gateway seen in any run (nan where a run
    lacks it); all runs must share the evaluation SNRs.
    """
    gids = _gateway_ids(results)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(metrics_header(results[0], gids))
    for r in results:
        if r.scenario.eval_snrs_db != results[0].scenario.eval_snrs_db:
            raise ValueError("runs with different evaluation SNRs cannot share a table")
        w.writerows(metrics_rows(r, gids))
    return buf.getvalue()


def summary_table(results: Sequence[RunResult]) -> str:
    """Rows = evaluation SNR, columns = PSNR and SSIM of each run's final model."""
    snrs = results[0].scenario.eval_snrs_db
    if any(r.scenario.eval_snrs_db != snrs for r in results):
        raise ValueError("runs with different evaluation SNRs cannot share a table")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["snr_db"]
    for r in results:
        header += [f"{r.label} PSNR", f"{r.label} SSIM"]
    w.writerow(header)
    for s in snrs:
        row = [fmt(s)]
        for r in results:
            row += [fmt(r.final_psnr(s)), fmt(r.final_ssim(s))]
        w.writerow(row)
    return buf.getvalue()


def read_table(path_or_text: str | Path) -> list[dict[str, str]]:
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    return list(csv.DictReader(io.StringIO(text)))


def _plot(results: Sequence[RunResult], which: str, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for r in results:
        rounds = [m.round for m in r.metrics]
        for s in r.scenario.eval_snrs_db:
            series = [(m.global_psnr_db if which == "psnr" else m.global_ssim)[s]
                      for m in r.metrics]
            ax.plot(rounds, series, label=f"{r.label} @ {s:g} dB", linewidth=1.2)
    ax.set_xlabel("global round")
    ax.set_ylabel("PSNR (dB)" if which == "psnr" else "SSIM")
    ax.grid(True, alpha=0.3)
    if len(ax.lines) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "leohfl"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_reports(results: RunResult | Sequence[RunResult], out_dir: str | Path) -> dict[str, Path]:
    """Write metrics.csv, summary.csv, psnr.svg and ssim.svg into `out_dir`."""
    if isinstance(results, RunResult):
        results = [results]
    if not results or not all(r.metrics for r in results):
        raise ValueError("cannot report on an empty log")
    out = Path(out_dir)
    paths = {name: out / name for name in ("metrics.csv", "summary.csv", "psnr.svg", "ssim.svg")}
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths["metrics.csv"].write_text(metrics_table(results))
        paths["summary.csv"].write_text(summary_table(results))
        _plot(results, "psnr", paths["psnr.svg"])
        _plot(results, "ssim", paths["ssim.svg"])
    except OSError as exc:
        raise IoFailure(f"could not write reports to {out}: {exc}") from exc
    return paths


def comparison_summary(named: Mapping[str, RunResult]) -> str:
    """summary_table with explicit column labels."""
    relabeled = []
    for name, r in named.items():
        r = RunResult(r.scenario, r.metrics, r.final_params, r.subrounds, label=name)
        relabeled.append(r)
    return summary_table(relabeled)
