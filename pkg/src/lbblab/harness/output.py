"""CSV, text and SVG emission for coverage reports."""

from __future__ import annotations

import csv
import io
from pathlib import Path as FsPath

from .config import ExperimentConfig
from .experiments import CoverageReport, CoverageRow

__all__ = ["CSV_HEADER", "format_csv", "read_coverage_csv", "render_svg", "emit_outputs"]

CSV_HEADER = ("T", "L", "TD", "coverage", "stderr", "width", "seconds")


def _g(x: float) -> str:
    return f"{x:.6g}"


def format_csv(report: CoverageReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.rows:
        writer.writerow([r.T, r.L, r.TD, _g(r.coverage), _g(r.mc_stderr), _g(r.mean_ci_width),
                         _g(r.wall_seconds)])
    return buf.getvalue()


def read_coverage_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {k: (int(v) if k in ("T", "L", "TD") else float(v)) for k, v in row.items()}
            for row in reader
        ]


def format_summary(report: CoverageReport, config: ExperimentConfig) -> str:
    lines = [
        f"experiment={report.experiment}",
        f"level={report.level:g}",
        f"N={config.N}",
        f"B={config.B}",
        f"master_seed={config.master_seed}",
    ]
    lines += report.notes
    lines.append(f"skipped_cells={len(report.skipped)}")
    for s in report.skipped:
        lines.append(f"skipped T={s.T} L={s.L} TD={s.TD} reason={s.reason}")
    lines.append(f"failed_replications={len(report.failures)}")
    for f in report.failures:
        lines.append(f"failed T={f.T} L={f.L} TD={f.TD} rep={f.rep} seed={f.seed} error={f.error}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# svg

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def render_svg(report: CoverageReport, width: int = 640, height: int = 420) -> str:
    """Coverage against TD, one line per (T, L), with the nominal level dashed."""
    left, right, top, bottom = 60, 150, 30, 50
    pw, ph = width - left - right, height - top - bottom
    series: dict[tuple[int, int], list[CoverageRow]] = {}
    for r in report.rows:
        series.setdefault((r.T, r.L), []).append(r)
    tds = sorted({r.TD for r in report.rows}) or [0, 1]
    x0, x1 = min(tds), max(tds)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    covs = [r.coverage for r in report.rows] + [report.level]
    y0 = max(0.0, min(covs) - 0.05)
    y1 = min(1.0, max(covs) + 0.05)
    if y1 - y0 < 1e-9:
        y0, y1 = 0.0, 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="18" font-size="13">{report.experiment}: coverage vs TD '
        f"(nominal {report.level:g})</text>",
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for td in tds:
        out.append(f'<line x1="{sx(td):.2f}" y1="{top + ph}" x2="{sx(td):.2f}" y2="{top + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{sx(td):.2f}" y="{top + ph + 16}" text-anchor="middle">{td}</text>')
    for i in range(6):
        v = y0 + (y1 - y0) * i / 5
        out.append(f'<line x1="{left - 4}" y1="{sy(v):.2f}" x2="{left}" y2="{sy(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{sy(v) + 4:.2f}" text-anchor="end">{v:.2f}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">TD</text>')
    out.append(
        f'<line x1="{left}" y1="{sy(report.level):.2f}" x2="{left + pw}" y2="{sy(report.level):.2f}" '
        'stroke="gray" stroke-dasharray="4 3"/>'
    )
    for n, ((T, L), rows) in enumerate(sorted(series.items())):
        color = _PALETTE[n % len(_PALETTE)]
        rows = sorted(rows, key=lambda r: r.TD)
        pts = " ".join(f"{sx(r.TD):.2f},{sy(r.coverage):.2f}" for r in rows)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}"/>')
        for r in rows:
            out.append(f'<circle cx="{sx(r.TD):.2f}" cy="{sy(r.coverage):.2f}" r="3" fill="{color}"/>')
        ly = top + 12 + 16 * n
        out.append(f'<circle cx="{left + pw + 16}" cy="{ly - 4}" r="3" fill="{color}"/>')
        out.append(f'<text x="{left + pw + 24}" y="{ly}">T={T}, L={L}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _write(path: FsPath, text: str):
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_outputs(report: CoverageReport, config: ExperimentConfig, out_dir=None) -> list[FsPath]:
    """Write coverage.csv, summary.txt and (optionally) coverage.svg."""
    out = FsPath(out_dir if out_dir is not None else config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = [out / "coverage.csv", out / "summary.txt"]
    _write(written[0], format_csv(report))
    _write(written[1], format_summary(report, config))
    if config.emit_plots:
        written.append(out / "coverage.svg")
        _write(written[-1], render_svg(report))
    return written
