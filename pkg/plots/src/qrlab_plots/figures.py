"""Render the lab's figure set from trace and results CSVs.

Four figure kinds are supported:

- ``uncertain-vs-p``: uncertain pairs and per-constraint prune counts as
  functions of the probed blend p (trace CSV).
- ``convergence-trace``: p and the cumulative satisfied / non-satisfied /
  uncertain percentages versus the probe index (trace CSV).
- ``counts-vs-alpha``: satisfied / non-satisfied / uncertain percentages
  versus the constraint coefficient alpha (results CSV).
- ``discovery-vs-alpha``: discovery rate versus alpha (results CSV).

Counts are stored raw in the CSVs and normalized to percent at render time.
Line style encodes the routing mode where both appear: solid for the
single-p mode, dashed for the multiple-p mode. Rendering never touches the
inputs, and a fixed style makes re-renders byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

KINDS = ("uncertain-vs-p", "convergence-trace", "counts-vs-alpha", "discovery-vs-alpha")

STYLE = {
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "lines.markersize": 3.5,
}

COUNT_COLORS = {"N_y": "tab:green", "N_n": "tab:red", "N_u": "tab:blue"}
COUNT_LABELS = {"N_y": "satisfied", "N_n": "non-satisfied", "N_u": "uncertain"}
MODE_STYLES = {"single-p": "-", "multiple-p": "--"}
FALLBACK_STYLES = ("-", "--", ":", "-.")


class FigureError(ValueError):
    """Bad figure specification or malformed input CSV."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: kind, one or more input CSVs, one output image."""

    kind: str
    inputs: tuple[str, ...]
    out: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}, expected one of {KINDS}")
        if not self.inputs:
            raise FigureError("at least one input CSV is required")

    @classmethod
    def make(cls, kind: str, inputs: Sequence[str] | str, out: str) -> "FigureSpec":
        if isinstance(inputs, (str, Path)):
            inputs = (str(inputs),)
        return cls(kind, tuple(str(p) for p in inputs), str(out))


def _load(path: str, required: Iterable[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError as exc:
        raise FigureError(f"{path}: empty CSV") from exc
    missing = [col for col in required if col not in frame.columns]
    if missing:
        raise FigureError(f"{path}: missing columns {missing}")
    if frame.empty:
        raise FigureError(f"{path}: CSV has a header but no rows")
    return frame


def _label(prefix: str, name: str, multi: bool) -> str:
    return f"{Path(prefix).stem}: {name}" if multi else name


def _render_uncertain_vs_p(spec: FigureSpec, ax):
    multi = len(spec.inputs) > 1
    for path in spec.inputs:
        frame = _load(path, ["p", "N_u", "pruned_1", "pruned_2"])
        frame = frame.sort_values("p")
        total = frame[["N_y", "N_n", "N_u"]].sum(axis=1) if {"N_y", "N_n"} <= set(frame.columns) else None
        if total is not None:
            ax.plot(frame["p"], 100.0 * frame["N_u"] / total, "o-", color="tab:green",
                    label=_label(path, "uncertain (%)", multi))
            axr = ax.twinx()
            axr.plot(frame["p"], frame["pruned_1"], ":", color="black",
                     label="pruned by constraint 1")
            axr.plot(frame["p"], frame["pruned_2"], ":", color="gray",
                     label="pruned by constraint 2")
            axr.set_ylabel("pruned pairs")
            axr.legend(loc="upper right")
        else:
            ax.plot(frame["p"], frame["N_u"], "o-", label=_label(path, "uncertain", multi))
    ax.set_xlabel("p")
    ax.set_ylabel("uncertain pairs (%)")
    ax.legend(loc="upper left")
    ax.set_title("Uncertain pairs versus the blend p")


def _render_convergence(spec: FigureSpec, fig):
    axes = fig.subplots(4, 1, sharex=True)
    multi = len(spec.inputs) > 1
    needed = ["probe_idx", "p", "cum_N_y", "cum_N_n", "cum_N_u"]
    for style, path in zip(FALLBACK_STYLES * 4, spec.inputs):
        frame = _load(path, needed)
        total = frame[["cum_N_y", "cum_N_n", "cum_N_u"]].sum(axis=1)
        x = frame["probe_idx"]
        axes[0].plot(x, frame["p"], style, marker="o", color="tab:purple",
                     label=_label(path, "p", multi))
        for ax, col in zip(axes[1:], ("cum_N_y", "cum_N_n", "cum_N_u")):
            key = col.removeprefix("cum_")
            ax.plot(x, 100.0 * frame[col] / total, style, marker="o",
                    color=COUNT_COLORS[key], label=_label(path, COUNT_LABELS[key], multi))
    axes[0].set_ylabel("p")
    for ax, col in zip(axes[1:], ("N_y", "N_n", "N_u")):
        ax.set_ylabel(f"{COUNT_LABELS[col]} (%)")
    axes[-1].set_xlabel("iteration")
    if multi:
        for ax in axes:
            ax.legend(loc="best", fontsize=7)
    axes[0].set_title("Search convergence")


def _mode_groups(frame: pd.DataFrame):
    for (topology, mode), group in frame.groupby(["topology", "mode"], sort=True):
        style = MODE_STYLES.get(str(mode), ":")
        mean = group.groupby("alpha", sort=True).mean(numeric_only=True).reset_index()
        yield topology, mode, style, mean


def _render_counts_vs_alpha(spec: FigureSpec, ax):
    multi = len(spec.inputs) > 1
    needed = ["topology", "mode", "alpha", "N_tot", "N_y", "N_n", "N_u"]
    for path in spec.inputs:
        frame = _load(path, needed)
        for topology, mode, style, mean in _mode_groups(frame):
            for col in ("N_y", "N_n", "N_u"):
                ax.plot(mean["alpha"], 100.0 * mean[col] / mean["N_tot"],
                        style, marker="o", color=COUNT_COLORS[col],
                        label=_label(path, f"{topology} {COUNT_LABELS[col]} ({mode})", multi))
    ax.set_xlabel("alpha")
    ax.set_ylabel("pairs (%)")
    ax.legend(loc="center right", fontsize=6)
    ax.set_title("Pair counts versus the constraint coefficient")


def _render_discovery_vs_alpha(spec: FigureSpec, ax):
    multi = len(spec.inputs) > 1
    needed = ["topology", "mode", "alpha", "R"]
    for path in spec.inputs:
        frame = _load(path, needed)
        colors = {}
        palette = iter(plt.rcParams["axes.prop_cycle"].by_key()["color"])
        for topology, mode, style, mean in _mode_groups(frame):
            if topology not in colors:
                colors[topology] = next(palette)
            ax.plot(mean["alpha"], 100.0 * mean["R"], style, marker="o",
                    color=colors[topology],
                    label=_label(path, f"{topology} ({mode})", multi))
    ax.set_xlabel("alpha")
    ax.set_ylabel("discovery rate (%)")
    ax.legend(loc="lower right", fontsize=7)
    ax.set_title("Discovery rate versus the constraint coefficient")


def render(spec: FigureSpec) -> str:
    """Render one figure and return the output path.

    Inputs are opened read-only; the same inputs and spec always produce the
    same bytes.
    """
    with plt.rc_context(STYLE):
        if spec.kind == "convergence-trace":
            fig = plt.figure(figsize=(6.0, 7.0))
            _render_convergence(spec, fig)
        else:
            fig, ax = plt.subplots(figsize=(6.0, 4.0))
            if spec.kind == "uncertain-vs-p":
                _render_uncertain_vs_p(spec, ax)
            elif spec.kind == "counts-vs-alpha":
                _render_counts_vs_alpha(spec, ax)
            else:
                _render_discovery_vs_alpha(spec, ax)
        fig.tight_layout()
        fig.savefig(spec.out)
        plt.close(fig)
    return spec.out
