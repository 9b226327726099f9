"""Figure rendering for solver output.

Renders field snapshots and run diagnostics to image files next to
the delimited output, using a non-interactive backend so runs work on
headless machines.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

plt.rcParams.update({
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
})


def plot_snapshot(table: dict, path, title: str = "", exact: dict | None = None):
    """Render one snapshot (as returned by output.snapshot_table).

    exact, when given, is a dict with keys x, rho, u, P overlaying a
    reference solution.
    """
    fig, axes = plt.subplots(2, 2, figsize=(9.5, 6.5), sharex=True)
    panels = (
        ("rho", "density"),
        ("u", "velocity"),
        ("P", "pressure"),
        ("s", "specific entropy"),
    )
    for ax, (key, label) in zip(axes.flat, panels):
        ax.plot(table["x"], table[key], marker=".", ms=2.5, lw=0.9, label="computed")
        if exact is not None and key in exact:
            ax.plot(exact["x"], exact[key], "k--", lw=1.0, label="exact")
            ax.legend(fontsize=8)
        ax.set_ylabel(label)
    for ax in axes[1]:
        ax.set_xlabel("x")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_diagnostics(diag: dict, path, title: str = ""):
    """Render the per-step diagnostics series (as column arrays)."""
    t = diag["time"]
    fig, axes = plt.subplots(2, 2, figsize=(9.5, 6.5), sharex=True)

    ax = axes[0, 0]
    ax.plot(t, diag["min_entropy"])
    ax.set_ylabel("min specific entropy")

    ax = axes[0, 1]
    for key, label in (
        ("total_mass", "mass"),
        ("total_momentum", "momentum"),
        ("total_energy", "energy"),
    ):
        ref = diag[key][0]
        scale = max(abs(ref), 1e-300)
        ax.plot(t, (diag[key] - ref) / scale, label=label)
    ax.set_ylabel("relative drift of totals")
    ax.legend(fontsize=8)

    ax = axes[1, 0]
    ax.plot(t, diag["min_theta"])
    ax.set_ylabel(r"min limiter factor $\theta$")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("time")

    ax = axes[1, 1]
    ax.plot(t, diag["limited_fraction"])
    ax.set_ylabel("fraction of limited cells")
    ax.set_xlabel("time")

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_profiles(table: dict, path, keys=("rho", "u", "P"), title: str = ""):
    """Render a row of x-profiles for the named columns."""
    fig, axes = plt.subplots(1, len(keys), figsize=(4.0 * len(keys), 3.4))
    for ax, key in zip(axes if len(keys) > 1 else [axes], keys):
        ax.plot(table["x"], table[key])
        ax.set_xlabel("x")
        ax.set_ylabel(key)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_minor_comparison(table: dict, path, title: str = ""):
    """Closed-form vs finite-difference Hessian minors, one marker per
    sampled state, with the identity line for reference."""
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.6))
    pairs = (("q_rr", "fd_q_rr"), ("minor2", "fd_minor2"), ("det", "fd_det"))
    for ax, (closed, fd) in zip(axes, pairs):
        x = table[closed]
        y = table[fd]
        ax.loglog(x, y, ".", ms=3)
        lo = min(x.min(), y.min())
        hi = max(x.max(), y.max())
        ax.loglog([lo, hi], [lo, hi], "k--", lw=0.8)
        ax.set_xlabel(f"closed-form {closed}")
        ax.set_ylabel(fd)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_stability_map(rows: dict, path, title: str = ""):
    """Scatter the (s, v) sweep of an EOS check, colored by convexity."""
    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    ok = rows["convexity_ok"] > 0.5
    ax.scatter(rows["v"][ok], rows["s"][ok], s=12, c="tab:green", label="convex")
    if (~ok).any():
        ax.scatter(
            rows["v"][~ok], rows["s"][~ok], s=12, c="tab:red", label="not convex"
        )
    ax.set_xlabel("specific volume v")
    ax.set_ylabel("specific entropy s")
    ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
