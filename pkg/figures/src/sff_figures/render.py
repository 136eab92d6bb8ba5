"""The three figure kinds: rescaled form factor, resonance decay, spacing histogram."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sff-figures"  # deterministic SVG ids

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, load_sff_run, load_spacing_run, load_theory

KINDS = ("sff_loglog", "delta_decay", "spacing_hist")


@dataclass(frozen=True)
class FigureSpec:
    run_dir: Path
    kind: str
    out_path: Path
    theory_path: Path | None = None
    guide_exponent: float = 4.0
    overlays: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _save(fig, out_path: Path):
    out_path.parent.mkdir(parents=True, exist_ok=True)
    kwargs = {}
    if out_path.suffix.lower() == ".svg":
        kwargs["metadata"] = {"Date": None}  # keep re-renders byte-identical
    fig.savefig(out_path, dpi=150, **kwargs)
    plt.close(fig)


def _sff_loglog(spec: FigureSpec):
    meta, data = load_sff_run(spec.run_dir)
    n_dim = meta["derived"]["N"]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for m in sorted(set(int(v) for v in data["m"])):
        sel = data["m"] == m
        ax.plot(data["tau"][sel], data["kappa"][sel], "o-", ms=3, lw=0.8,
                label=rf"$\kappa_{{{m}}}$")
    tau = data["tau"]
    grid = np.geomspace(max(tau.min(), 1e-12), max(tau.max(), 1.0), 64)
    ax.plot(grid, np.minimum(grid, 1.0), "k-", lw=1.2, label="CUE ramp")
    if spec.theory_path is not None:
        theory = load_theory(spec.theory_path)
        for model in sorted(set(theory["model"])):
            sel = theory["model"] == model
            ax.plot(theory["t"][sel] / n_dim, theory["value"][sel] / n_dim,
                    "--", lw=1.0, label=str(model))
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\tau = t/N$")
    ax.set_ylabel(r"$\kappa_m$")
    ax.legend(fontsize=8)
    ens = meta["parameters"]["ensemble"]
    ax.set_title(f"form factor, {ens}, q={meta['parameters']['q']}, L={meta['parameters']['L']}")
    return fig


def _delta_decay(spec: FigureSpec):
    meta, data = load_sff_run(spec.run_dir)
    L = meta["parameters"]["L"]
    sel = (data["m"] == 1) & (data["delta_kappa"] > 0)
    if not np.any(sel):
        raise SchemaError("no rows with positive delta_kappa to plot")
    x = data["t"][sel] / L
    y = data["delta_kappa"][sel]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(x, y, "o", ms=4, label=r"$\Delta\kappa$")
    nu = spec.guide_exponent
    guide_x = np.geomspace(x.min(), x.max(), 64)
    guide = y.max() * (guide_x / x[np.argmax(y)]) ** (-nu)
    ax.plot(guide_x, guide, "k--", lw=1.0, label=rf"$\propto (t/L)^{{-{nu:g}}}$")
    ax.annotate(rf"$\nu = {nu:g}$", xy=(0.7, 0.85), xycoords="axes fraction")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$t/L$")
    ax.set_ylabel(r"$\Delta\kappa$")
    ax.legend(fontsize=8)
    ax.set_title(f"ramp excess decay, q={meta['parameters']['q']}, L={L}")
    return fig


def _spacing_hist(spec: FigureSpec):
    meta, data = load_spacing_run(spec.run_dir)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    width = np.diff(data["s_mid"]).mean() if data["s_mid"].size > 1 else 0.1
    ax.bar(data["s_mid"], data["p_s"], width=width * 0.95, alpha=0.5,
           label=r"$p(s)$")
    overlays = spec.overlays or ("cue", "poisson")
    if "cue" in overlays:
        ax.plot(data["s_mid"], data["p_cue"], "k--", lw=1.2, label="CUE (Wigner)")
    if "poisson" in overlays:
        ax.plot(data["s_mid"], data["p_poisson"], "k:", lw=1.2, label="Poisson")
    ax.set_xlabel(r"$s$")
    ax.set_ylabel(r"$p(s)$")
    ax.legend(fontsize=8)
    ens = meta["parameters"]["ensemble"]
    ax.set_title(
        f"level spacings, {ens}, q={meta['parameters']['q']}, L={meta['parameters']['L']}, "
        f"R={meta['parameters']['realizations']}"
    )
    return fig


def render(spec: FigureSpec) -> Path:
    """Render one figure and write the image; returns the output path."""
    if spec.kind == "sff_loglog":
        fig = _sff_loglog(spec)
    elif spec.kind == "delta_decay":
        fig = _delta_decay(spec)
    else:
        fig = _spacing_hist(spec)
    _save(fig, spec.out_path)
    return spec.out_path
