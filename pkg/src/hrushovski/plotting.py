"""Figures for ``verify --figures``; rendered off-screen with the Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .verify import SuiteResult  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_order_matrix(res: SuiteResult, path: Path) -> Path:
    grid = res.data["grid"]
    labels = [f"{p}/{q}" for p, q in grid]
    fig, ax = plt.subplots(figsize=(7.5, 6.5))
    im = ax.imshow(res.data["order_matrix"], cmap="coolwarm", vmin=-1, vmax=1)
    ax.set_xticks(range(len(grid)), labels, rotation=90, fontsize=7)
    ax.set_yticks(range(len(grid)), labels, fontsize=7)
    ax.set_xlabel("second configuration (p'/q')")
    ax.set_ylabel("first configuration (p/q)")
    ax.set_title("order (+1), equivalence (0), reverse (-1) from host copy counts")
    fig.colorbar(im, ax=ax, ticks=[-1, 0, 1])
    return _save(fig, path)


def plot_theta_stages(res: SuiteResult, path: Path) -> Path:
    stages = [s for s in res.data["first_stages"] if s is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    top = max(stages, default=0)
    ax.hist(stages, bins=range(0, top + 2), align="left", rwidth=0.8)
    ax.set_xlabel("first witness stage i with theta_A true from then on")
    ax.set_ylabel("forests A with at most 4 vertices")
    ax.set_xticks(range(0, top + 1))
    return _save(fig, path)


def plot_spencer_sweep(res: SuiteResult, path: Path) -> Path:
    sweep = res.data["sweep"]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [f"({s},{m})" for s, m, _, _ in sweep]
    ys = [fails / pairs for _, _, pairs, fails in sweep]
    ax.bar(xs, ys)
    ax.set_ylim(0, 1)
    ax.set_xlabel("(tree size bound s, multiplicity m) in sweep order")
    ax.set_ylabel("fraction of sampled pairs distinguished at rank 3")
    return _save(fig, path)


def write_figures(results: list[SuiteResult], directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    by_name = {r.suite: r for r in results}
    written = []
    if "interpretation" in by_name:
        written.append(plot_order_matrix(by_name["interpretation"], out / "interpretation_order.png"))
    if "tuniv" in by_name:
        written.append(plot_theta_stages(by_name["tuniv"], out / "tuniv_theta_stages.png"))
    if "spencer" in by_name:
        written.append(plot_spencer_sweep(by_name["spencer"], out / "spencer_sweep.png"))
    return written
