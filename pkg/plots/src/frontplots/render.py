"""Deterministic figure rendering from parsed CSV data.

Renders are pure functions of the input files: fixed figure size, DPI,
colors, and markers, with PNG metadata pinned so reruns on the same platform
produce byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg", force=True)

from matplotlib.backends.backend_agg import FigureCanvasAgg  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from .schemas import SchemaError, read_front_csv, read_profiles_csv  # noqa: E402

PLOT_KINDS = ("front_scatter", "profile")

_DPI = 150
_FIGSIZE = (6.4, 4.8)
_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
_MARKERS = ("o", "s", "^", "D", "v", "P", "X", "*")
_PNG_METADATA = {"Software": "frontplots"}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple
    labels: tuple
    output: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "output", str(self.output))
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"kind must be one of {PLOT_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input file is required")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.labels)} labels for {len(self.inputs)} inputs"
            )


def _new_axes(three_d=False):
    fig = Figure(figsize=_FIGSIZE, dpi=_DPI)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(projection="3d" if three_d else None)
    return fig, ax


def _save(fig, output):
    fig.savefig(output, format="png", dpi=_DPI, metadata=_PNG_METADATA)
    return output


def plot_fronts(spec):
    """Overlay scatter of one or more front CSVs in objective space.

    All inputs must share the same objective count; 2 gives a flat scatter,
    3 a 3D one. Returns the output path.
    """
    if spec.kind != "front_scatter":
        raise ValueError(f"plot_fronts got a {spec.kind!r} spec")
    fronts = [read_front_csv(path) for path in spec.inputs]
    widths = {f.shape[1] for f in fronts}
    if len(widths) != 1:
        raise SchemaError(
            spec.inputs[0],
            f"inputs mix objective counts {sorted(widths)}; overlays need one",
        )
    (m,) = widths
    if m not in (2, 3):
        raise ValueError(f"can draw 2 or 3 objectives, got m={m}")
    labels = spec.labels or tuple(
        path.rsplit("/", 1)[-1].removesuffix(".csv") for path in spec.inputs
    )
    fig, ax = _new_axes(three_d=(m == 3))
    for i, (front, label) in enumerate(zip(fronts, labels)):
        style = dict(
            s=14,
            color=_COLORS[i % len(_COLORS)],
            marker=_MARKERS[i % len(_MARKERS)],
            label=label,
            linewidths=0.0,
        )
        if m == 2:
            ax.scatter(front[:, 0], front[:, 1], **style)
        else:
            ax.scatter(front[:, 0], front[:, 1], front[:, 2], **style, depthshade=False)
    ax.set_xlabel("f_1")
    ax.set_ylabel("f_2")
    if m == 3:
        ax.set_zlabel("f_3")
    ax.legend(loc="upper right")
    return _save(fig, spec.output)


def plot_profiles(spec, metric=None):
    """Step plot of the performance-profile curves for one metric.

    The single input is a profiles CSV. When it holds several metrics, pick
    one with `metric`. Returns the output path.
    """
    if spec.kind != "profile":
        raise ValueError(f"plot_profiles got a {spec.kind!r} spec")
    if len(spec.inputs) != 1:
        raise ValueError("profile plots read exactly one profiles CSV")
    path = spec.inputs[0]
    by_metric = read_profiles_csv(path)
    if metric is None:
        if len(by_metric) != 1:
            raise ValueError(
                f"{path} holds metrics {sorted(by_metric)}; pick one with --metric"
            )
        metric = next(iter(by_metric))
    if metric not in by_metric:
        raise ValueError(
            f"metric {metric!r} not in {path} (has {sorted(by_metric)})"
        )
    curves = by_metric[metric]
    if spec.labels and len(spec.labels) != len(curves):
        raise ValueError(f"{len(spec.labels)} labels for {len(curves)} curves")
    tau_end = max(float(tau[-1]) for _, tau, _ in curves)
    if tau_end <= 1.0:
        tau_end = 2.0  # degenerate single-tau curves still get a visible run
    fig, ax = _new_axes()
    for i, (solver, tau, rho) in enumerate(curves):
        label = spec.labels[i] if spec.labels else solver
        ax.step(
            list(tau) + [tau_end],
            list(rho) + [float(rho[-1])],
            where="post",
            color=_COLORS[i % len(_COLORS)],
            label=label,
        )
    ax.set_xlabel("tau")
    ax.set_ylabel("rho")
    ax.set_xlim(1.0, tau_end)
    ax.set_ylim(0.0, 1.05)
    ax.set_title(metric)
    ax.legend(loc="lower right")
    return _save(fig, spec.output)
