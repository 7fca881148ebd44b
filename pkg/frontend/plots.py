"""Render training curves from a benchmark summary CSV.

Reads ``summary.csv`` (columns ``method,epoch,split,metric,mean,std``) from
the directory produced by a benchmark run and draws one curve per
(method, split): dashed for the training split, solid for the test split,
with a +/- one-std band on the test curve only.

Usage: plots.py --in <results-dir> --out <figure-file> [--metric NAME]
"""

import argparse
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SUMMARY_COLUMNS = ("method", "epoch", "split", "metric", "mean", "std")
METRICS = ("spectral_risk", "misclass")


def read_summary(path):
    """Parse a summary CSV into typed row dicts; schema errors name columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        missing = [c for c in SUMMARY_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"{path}: missing column(s) {missing}")
        extra = [c for c in header if c not in SUMMARY_COLUMNS]
        if extra:
            raise ValueError(f"{path}: unexpected column(s) {extra}")
        pos = {c: header.index(c) for c in SUMMARY_COLUMNS}
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append(
                    {
                        "method": row[pos["method"]],
                        "epoch": int(row[pos["epoch"]]),
                        "split": row[pos["split"]],
                        "metric": row[pos["metric"]],
                        "mean": float(row[pos["mean"]]),
                        "std": float(row[pos["std"]]),
                    }
                )
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: cannot parse numeric fields "
                    f"(columns epoch/mean/std)"
                ) from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _series(rows, method, split):
    pts = sorted(
        ((r["epoch"], r["mean"], r["std"]) for r in rows
         if r["method"] == method and r["split"] == split),
    )
    epochs = [p[0] for p in pts]
    means = [p[1] for p in pts]
    stds = [p[2] for p in pts]
    return epochs, means, stds


def build_figure(rows, metric):
    """One figure: dashed train curves, solid test curves with a std band."""
    keep = [r for r in rows if r["metric"] == metric]
    if not keep:
        available = sorted({r["metric"] for r in rows})
        raise ValueError(
            f"no rows for metric {metric!r}; file contains {available}"
        )
    methods = sorted({r["method"] for r in keep})
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for i, method in enumerate(methods):
        color = f"C{i}"
        epochs, means, _ = _series(keep, method, "train")
        if epochs:
            ax.plot(epochs, means, linestyle="--", color=color,
                    label=f"{method} train")
        epochs, means, stds = _series(keep, method, "test")
        if epochs:
            ax.plot(epochs, means, linestyle="-", color=color,
                    label=f"{method} test")
            lower = [m - s for m, s in zip(means, stds)]
            upper = [m + s for m, s in zip(means, stds)]
            ax.fill_between(epochs, lower, upper, color=color, alpha=0.2,
                            linewidth=0)
    ax.set_xlabel("epoch")
    ax.set_ylabel(metric)
    ax.set_title(f"{metric} by epoch (mean over trials, test ±1 std)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig, ax


def render(in_path, out_path, metric):
    summary = os.path.join(in_path, "summary.csv") if os.path.isdir(in_path) else in_path
    if not os.path.exists(summary):
        raise ValueError(f"{summary}: no such file")
    rows = read_summary(summary)
    fig, _ = build_figure(rows, metric)
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plots.py", description="Plot benchmark training curves from CSV output."
    )
    parser.add_argument("--in", dest="input", required=True,
                        help="results directory (or a summary CSV path)")
    parser.add_argument("--out", dest="output", required=True,
                        help="figure file (extension picks the format)")
    parser.add_argument("--metric", choices=METRICS, default="spectral_risk")
    args = parser.parse_args(argv)
    try:
        render(args.input, args.output, args.metric)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
