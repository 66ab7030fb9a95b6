"""Figure rendering for sweep output.

Renders the numeric columns of a sweep against the swept parameter and
writes the figure to a file; the CSV stays the machine-readable contract,
the figure is a convenience by-product of the same rows.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_sweep(parameter, rows, columns, outfile, title=None):
    """Plot each numeric column of `rows` against `parameter`.

    rows are dicts as written to the CSV; non-finite or failed rows are
    skipped per column.  Returns the path written.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [row[parameter] for row in rows]
    for col in columns:
        if col == parameter or col == "error":
            continue
        pts = [(x, row[col]) for x, row in zip(xs, rows)
               if isinstance(row.get(col), (int, float))]
        if not pts:
            continue
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", ms=3.5, lw=1.0, label=col)
    ax.set_xlabel(parameter)
    ax.grid(True, alpha=0.3)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(outfile, dpi=150)
    plt.close(fig)
    return outfile
