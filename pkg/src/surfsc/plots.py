"""Figure rendering for the CLI report path.

Every function writes one PNG next to the delimited output and returns the
path.  Figures are diagnostics, not data: the CSV/JSON stream stays the
machine-readable contract.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_profile(t, f, path: Path, label: str = "f(t)") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, f, lw=1.5)
    ax.set_xlabel("t (boundary-layer units)")
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_mode(t, u, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, u, lw=1.5)
    ax.set_xlabel("t")
    ax.set_ylabel("u0(t)")
    ax.set_title("ground mode of the shifted half-line oscillator")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_identities(report, path: Path) -> Path:
    names = list(report.residuals)
    values = [max(v, 1e-18) for v in report.residuals.values()]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(names, values)
    ax.set_yscale("log")
    ax.axhline(report.tol, color="r", ls="--", lw=1, label=f"tol={report.tol:g}")
    ax.set_ylabel("scaled residual")
    ax.set_title(f"identity residuals at b={report.b}")
    ax.legend()
    fig.autofmt_xdate(rotation=30)
    return _save(fig, path)


def plot_coeff_sweep(rows, path: Path) -> Path:
    b = [r.b for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(b, [r.c1 for r in rows], "o-")
    ax1.set_xlabel("b")
    ax1.set_ylabel("C1(b)")
    ax1.grid(alpha=0.3)
    ax2.plot(b, [r.c2 for r in rows], "s-", color="tab:orange")
    ax2.set_xlabel("b")
    ax2.set_ylabel("C2(b)")
    ax2.grid(alpha=0.3)
    return _save(fig, path)


def plot_perturbation(diag, path: Path) -> Path:
    eps = np.asarray(diag.eps_list)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(eps, np.asarray(diag.e_star) - diag.e0, "o", label="E*(eps) - E0")
    xs = np.linspace(0.0, eps.max() * 1.05, 100)
    ax1.plot(xs, diag.slope * xs + diag.curvature * xs**2, "-", lw=1,
             label="fitted s*eps + q*eps^2")
    ax1.plot(xs, -diag.k * diag.e_corr * xs, "--", lw=1, label="-k*E_corr*eps")
    ax1.set_xlabel("eps")
    ax1.set_ylabel("energy shift")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.loglog(eps, diag.deviations, "o-")
    ax2.set_xlabel("eps")
    ax2.set_ylabel("|deviation from first order|")
    ax2.grid(alpha=0.3, which="both")
    return _save(fig, path)


def plot_sign_scan(result, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(result.b_scanned, result.c2_scanned, "o-")
    ax.axhline(0.0, color="k", lw=0.8)
    if result.root is not None:
        ax.axvline(result.root, color="r", ls="--", label=f"root ~ {result.root:.4f}")
        ax.legend()
    ax.set_xlabel("b")
    ax.set_ylabel("C2(b)")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_limiting(rows, path: Path) -> Path:
    deltas = [r.delta for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(deltas, [r.rho1 for r in rows], "o-", label="rho1")
    ax.plot(deltas, [r.rho2 for r in rows], "s-", label="rho2")
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_xlabel("1 - b*theta0")
    ax.set_ylabel("scaling ratio")
    ax.invert_xaxis()
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_curve_density(curve, s_values, density, path: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    theta = np.linspace(0.0, 2.0 * math.pi, 1024)
    x, y = curve.point(theta)
    k = curve.curvature(theta)
    sc = ax1.scatter(x, y, c=k, s=4, cmap="viridis")
    ax1.set_aspect("equal")
    ax1.set_title("boundary colored by curvature")
    fig.colorbar(sc, ax=ax1, shrink=0.8)
    ax2.plot(s_values, density, lw=1.5)
    ax2.set_xlabel("arclength s")
    ax2.set_ylabel("quartic mass density")
    ax2.grid(alpha=0.3)
    return _save(fig, path)


def plot_disc_profile(r, g, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(r, g, lw=1.5)
    ax.set_xlabel("r")
    ax.set_ylabel("g(r)")
    ax.set_title("radial disc profile")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_disc_theorem(report, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.eps, report.c2_hat, "o-", label="c2_hat(eps)")
    ax.axhline(report.c2_ref, color="r", ls="--", label="C2 reference")
    ax.set_xlabel("eps")
    ax.set_ylabel("extracted curvature coefficient")
    ax.invert_xaxis()
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)
