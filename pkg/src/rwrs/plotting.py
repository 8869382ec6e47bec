"""Optional figures drawn from experiment tables (CSV output stays primary)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return path


def _table(result, name):
    for t in result.tables:
        if t.name == name:
            return t
    return None


def _phase(result, out: Path) -> list:
    t = _table(result, "phase_diagram")
    p = np.array([float(x) for x in t.column("p")])
    e = np.array([float(x) for x in t.column("eps")])
    holds = np.array(t.column("criterion_holds"), dtype=float)
    ps, es = np.unique(p), np.unique(e)
    grid = np.zeros((len(es), len(ps)))
    grid[np.searchsorted(es, e), np.searchsorted(ps, p)] = holds
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.imshow(grid, origin="lower", aspect="auto", extent=(ps[0], ps[-1], es[0], es[-1]), cmap="Greys", vmin=0, vmax=1.5)
    ax.axvline(0.8, color="C3", lw=1, label="p = 4/5")
    ax.set_xlabel("p")
    ax.set_ylabel("eps")
    ax.set_title("goodness criterion (shaded where it holds)")
    ax.legend(loc="upper left")
    return [_save(fig, out / "phase_diagram.png")]


def _black_run(result, out: Path) -> list:
    t = _table(result, "black_run")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogx(t.column("n"), t.column("p_black"))
    ax.set_xlabel("n (even)")
    ax.set_ylabel("P(C_0 = B | B^n)")
    return [_save(fig, out / "black_run.png")]


def _bad_probe(result, out: Path) -> list:
    t = _table(result, "bad_probe")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for p in sorted(set(t.column("p"))):
        rows = sorted((r[1], abs(r[8])) for r in t.rows if r[0] == p)
        ax.plot([r[0] for r in rows], [r[1] for r in rows], "o-", label=f"p = {p}")
    ax.set_xlabel("L")
    ax.set_ylabel("|Delta(L)|")
    ax.legend()
    return [_save(fig, out / "bad_probe.png")]


def _mc(result, out: Path) -> list:
    t = _table(result, "mc_calibration")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist([min(z, 6.0) for z in t.column("z")], bins=24, range=(0, 6))
    ax.axvline(4, color="C3", lw=1)
    ax.set_xlabel("|estimate - exact| / stderr")
    ax.set_ylabel("trials")
    return [_save(fig, out / "mc_calibration.png")]


def _sparse(result, out: Path) -> list:
    t = _table(result, "sparse_probe")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = np.arange(len(t.rows))
    rows = t.sorted_rows()
    ax.plot(x, [r[8] for r in rows], "o", label="gap")
    ax.plot(x, [r[9] for r in rows], "_", ms=12, label="(1-eps)(1-p)")
    ax.set_xlabel("instance")
    ax.legend()
    return [_save(fig, out / "sparse_probe.png")]


FIGURES = {"E1": _phase, "E5": _bad_probe, "E6": _black_run, "E8": _sparse, "E10": _mc}


def figures(result, out: Path) -> list:
    """Write the figures available for ``result`` into ``out``; may be empty."""
    fn = FIGURES.get(result.spec.id)
    if fn is None:
        return []
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return fn(result, out)
