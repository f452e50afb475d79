"""Figures for simulate reports: verdict timeline plus class counts."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "ontopret",
}

ROWS = ["TaskOriented", "Deviation", "Deception"]
COLORS = {"Confirmation": "#2a9d8f", "Contradiction": "#e76f51"}


def _cls(curie):
    return curie.rsplit(":", 1)[-1] if curie else None


def plot_report(report: dict, path, title=None):
    """Write a two-panel figure for a report dict (as produced by ``RunReport.to_dict``).

    Left: one marker per event at its timestamp, on the row of its behavior
    class, coloured by interpretation and labelled with any GEMS subtype.
    Right: behavior-class counts.  Output is byte-stable for fixed input.
    """
    verdicts = report["verdicts"]
    with plt.rc_context(STYLE):
        fig, (ax, bx) = plt.subplots(1, 2, figsize=(8.0, 2.8), gridspec_kw={"width_ratios": [3, 1]})
        for interp, color in COLORS.items():
            xs = [v["t"] for v in verdicts if _cls(v["interpretation_class"]) == interp]
            ys = [ROWS.index(_cls(v["behavior_class"])) for v in verdicts if _cls(v["interpretation_class"]) == interp]
            ax.scatter(xs, ys, s=36, color=color, label=interp, zorder=3)
        for v in verdicts:
            tag = _cls(v["gems_subtype"]) or ",".join(v["fired_cues"])
            if tag:
                ax.annotate(tag, (v["t"], ROWS.index(_cls(v["behavior_class"]))),
                            textcoords="offset points", xytext=(0, 7), ha="center", fontsize=7)
        ax.set_yticks(range(len(ROWS)))
        ax.set_yticklabels(ROWS)
        ax.set_ylim(-0.6, len(ROWS) + 0.1)
        ax.set_xlabel("time (s)")
        ax.grid(axis="x", color="0.9", zorder=0)
        ax.legend(loc="upper left", frameon=False, ncol=2)
        ax.set_title(title or f"{report['scenario']} trace")

        counts = report["counts"]["behavior_class"]
        values = [counts.get(f"ontopret:{r}", 0) for r in ROWS]
        bx.barh(range(len(ROWS)), values, color="0.55")
        bx.set_yticks(range(len(ROWS)))
        bx.set_yticklabels([])
        bx.set_xlabel("events")
        bx.set_ylim(-0.6, len(ROWS) + 0.1)
        fig.tight_layout()
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
    return path
