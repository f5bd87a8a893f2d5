"""Render figure-preset sweeps to PNG next to their CSV data.

Purely cosmetic layer: everything quantitative lives in the CSV; the PNG is
a quick-look rendering of the same rows.  Rows whose status is not ok are
dropped from the curves, except divergent-moment rows, which are drawn with
open markers so regularization-dependent values stay visually distinct.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render(preset, rows, path):
    """Plot one preset's rows and write a PNG to path."""
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    groups = []
    if preset.group_axis is None:
        groups.append((None, rows))
    else:
        seen = {}
        for row in rows:
            seen.setdefault(row.params[preset.group_axis], []).append(row)
        groups.extend(seen.items())
    for key, group in groups:
        xs, ys, flagged_x, flagged_y = [], [], [], []
        for row in group:
            if preset.y_column not in row.outputs:
                continue
            x = row.params[preset.x_axis]
            y = row.outputs[preset.y_column]
            if row.status == "divergent-moment":
                flagged_x.append(x)
                flagged_y.append(y)
            elif row.status == "ok":
                xs.append(x)
                ys.append(y)
        label = None if key is None else f"{preset.group_axis} = {key}"
        line = None
        if xs:
            style = "o-" if len(xs) <= 25 else "-"
            (line,) = ax.plot(xs, ys, style, markersize=4, label=label)
        if flagged_x:
            color = line.get_color() if line is not None else None
            ax.plot(
                flagged_x,
                flagged_y,
                "o",
                markersize=4,
                markerfacecolor="none",
                color=color,
                label=None if line is not None else label,
            )
    if preset.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(preset.x_axis)
    ax.set_ylabel(preset.y_column)
    ax.set_title(preset.title, fontsize=10)
    if preset.group_axis is not None:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
