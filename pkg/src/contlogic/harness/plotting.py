"""PNG figures for suite reports (matplotlib, Agg backend)."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _frac(s: str) -> float:
    return float(Fraction(s))


def _bound_scatter(ax, report):
    xs = [_frac(t["limsup_bound"]) for t in report["trials"]]
    ys = [_frac(t["product_value"]) for t in report["trials"]]
    ax.scatter(xs, ys, s=12, alpha=0.5)
    ax.plot([0, 1], [0, 1], "k--", lw=1)
    ax.set_xlabel("max of factor values over the kernel")
    ax.set_ylabel("value in the reduced product")
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)


def _example_bars(ax, report):
    rs = [t["r"] for t in report["trials"]]
    prod = [_frac(t["product_value"]) for t in report["trials"]]
    factors = [max(_frac(v) for v in t["factor_values"]) for t in report["trials"]]
    xs = range(len(rs))
    ax.bar([x - 0.2 for x in xs], factors, width=0.4, label="largest factor value")
    ax.bar([x + 0.2 for x in xs], prod, width=0.4, label="product value")
    ax.set_xticks(list(xs), rs)
    ax.set_xlabel("r")
    ax.legend()


def _counts(ax, report):
    c = report["counts"]
    ax.bar(["passed", "failed"], [c.get("passed", 0), c.get("failed", 0)], color=["tab:green", "tab:red"])
    ax.set_ylabel("trials")


def write_suite_figure(report: dict, path) -> Path:
    """Draw the figure for ``report`` and save it as PNG at ``path``."""
    fig, ax = plt.subplots(figsize=(5, 4))
    name = report["suite"]
    if name == "conditional-preservation":
        _bound_scatter(ax, report)
    elif name == "example-reproduction":
        _example_bars(ax, report)
    else:
        _counts(ax, report)
    ax.set_title(f"{name}: {report['status']}")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, format="png", dpi=100, metadata={"Software": None})
    plt.close(fig)
    return out


__all__ = ["write_suite_figure"]
