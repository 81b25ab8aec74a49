"""Figure rendering for the CLI: every figure lands next to its CSV."""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 120,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    "lines.linewidth": 1.6,
}


def render_run(records, policy, path):
    """Per-vehicle delay and the max delay across slots for one policy."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        slots = [rec.slot for rec in records]
        n_veh = len(records[0].result.delays)
        for k in range(n_veh):
            ax.semilogy(slots, [rec.result.delays[k] for rec in records],
                        alpha=0.6, label=f"vehicle {k}")
        ax.semilogy(slots, [rec.result.max_delay for rec in records],
                    color="black", linewidth=2.4, label="max delay")
        ax.set_xlabel("slot")
        ax.set_ylabel("transmit delay [s]")
        ax.set_title(f"Per-slot transmit delays ({policy})")
        ax.legend(fontsize=8, ncol=2)
        fig.savefig(path)
        plt.close(fig)


def render_trace(rows, path):
    """Bisection bracket trajectory: lower and upper delay bounds per iteration."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        iters = [row[0] for row in rows]
        ax.plot(iters, [row[1] for row in rows], marker="o", markersize=3,
                label="delay lower bound")
        ax.plot(iters, [row[2] for row in rows], marker="s", markersize=3,
                label="delay upper bound")
        ax.set_xlabel("iteration")
        ax.set_ylabel("common delay bracket [s]")
        ax.set_title("Bisection convergence")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)


def render_sweep(rows, boundary_rows, axis, path):
    """Mean max delay per axis value and policy, plus the feasibility boundary.

    rows: (axis_value, policy, seed, max_delay or nan, feasible) tuples.
    boundary_rows: (axis_value, min_feasible_p_max) tuples.
    """
    policies = []
    for row in rows:
        if row[1] not in policies:
            policies.append(row[1])
    values = sorted({row[0] for row in rows})
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for policy in policies:
            means = []
            for value in values:
                samples = [row[3] for row in rows
                           if row[1] == policy and row[0] == value and row[4]]
                means.append(sum(samples) / len(samples) if samples else math.nan)
            ax.plot(values, means, marker="o", markersize=4, label=policy)
        ax.set_yscale("log")
        ax.set_xlabel(axis)
        ax.set_ylabel("mean max delay [s]")
        ax.set_title(f"Max delay vs {axis}")
        if boundary_rows:
            if axis == "p_max":
                ax.axvline(boundary_rows[0][1], color="gray", linestyle="--",
                           label="alg1 feasibility boundary")
            else:
                twin = ax.twinx()
                twin.plot([row[0] for row in boundary_rows],
                          [row[1] for row in boundary_rows],
                          color="gray", linestyle="--", marker="^",
                          markersize=4, label="alg1 min feasible p_max")
                twin.set_ylabel("min feasible p_max [W]")
                twin.legend(loc="upper right", fontsize=8)
        ax.legend(loc="upper left", fontsize=8)
        fig.savefig(path)
        plt.close(fig)
