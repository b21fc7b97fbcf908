"""SVG projections of sampled limit curves."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .boundary import LimitCurveSample, batch_q_form, chart_forms, chart_indices  # noqa: E402
from .numeric import NumericError  # noqa: E402

# fixed ids and no timestamp keep the SVG byte-identical between runs
_RC = {"svg.hashsalt": "maxrep", "svg.fonttype": "none", "font.size": 9}


def rp1_coordinates(sample: LimitCurveSample) -> np.ndarray:
    """Angle in [0, pi) of the line spanned by each (n = 1) frame."""
    f = sample.frames[:, :, 0]
    return np.mod(np.arctan2(f[:, 1], f[:, 0]), math.pi)


def chart_traces(sample: LimitCurveSample, chart: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """(angles, tr Q) of the samples strictly inside the chart; NaN where Q is undefined."""
    idx = chart_indices(sample, *chart)
    try:
        qs = chart_forms(sample, *chart)
        return sample.angles[idx], np.trace(qs, axis1=1, axis2=2)
    except NumericError:
        pass
    f = sample.frames
    a, b = chart
    tr = np.full(len(idx), np.nan)
    for k, i in enumerate(idx):
        try:
            tr[k] = np.trace(batch_q_form(f[i], f[a], f[b]))
        except np.linalg.LinAlgError:
            continue
    return sample.angles[idx], tr


def plot_limit_curve(sample: LimitCurveSample, path, chart: tuple[int, int] | None = None,
                     title: str | None = None, fmt: str = "svg") -> None:
    """n = 1: angle against the RP^1 coordinate; n >= 2: angle against tr Q in ``chart``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.5, 3.6))
        if sample.n == 1:
            ax.plot(sample.angles, rp1_coordinates(sample), ".", ms=2.5, color="C0")
            ax.set_ylabel(r"line angle in $\mathbb{RP}^1$")
        else:
            if chart is None:
                raise ValueError("a chart is needed for n >= 2")
            ang, tr = chart_traces(sample, chart)
            ax.plot(ang, tr, ".-", ms=2.5, lw=0.6, color="C0")
            # off the maximal locus Q need not be positive
            ax.set_yscale("log" if np.all(tr[np.isfinite(tr)] > 0) else "symlog")
            ax.set_ylabel(r"tr $Q_{\varphi(t)}$ in chart")
            for k in chart:
                ax.axvline(sample.angles[k], color="0.6", lw=0.6, ls="--")
        ax.set_xlabel("circle angle")
        ax.set_xlim(0.0, 2.0 * math.pi)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
        plt.close(fig)
