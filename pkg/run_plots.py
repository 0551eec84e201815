#!/usr/bin/env python3
"""Render figures from a delay-consensus trace CSV.  Requires matplotlib."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

TRACE = '/tmp/pytest-of-root/pytest-1/test_plot_emits_script_and_man0/run.csv'
FIGURES = [{'file': 'run_positions_coord1.png', 'title': 'positions (coordinate 1)', 'ylabel': 'position', 'columns': ['q1_1', 'q2_1'], 'labels': ['agent 1', 'agent 2'], 'leader': None, 'reference': None}, {'file': 'run_velocities_coord1.png', 'title': 'velocities (coordinate 1)', 'ylabel': 'velocity', 'columns': ['qdot1_1', 'qdot2_1'], 'labels': ['agent 1', 'agent 2'], 'leader': None, 'reference': 0.022857142857142854}]


def read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    index = {name: k for k, name in enumerate(header)}
    return {name: [float(r[index[name]]) for r in data] for name in header}


def main():
    cols = read_columns(TRACE)
    t = cols["t"]
    out_dir = Path(__file__).resolve().parent
    for fig in FIGURES:
        plt.figure(figsize=(8.0, 4.5))
        for name, label in zip(fig["columns"], fig["labels"]):
            plt.plot(t, cols[name], label=label)
        if fig["leader"] is not None:
            intercept, slope = fig["leader"]
            plt.plot(t, [intercept + slope * x for x in t], "k--", label="leader")
        if fig["reference"] is not None:
            plt.axhline(fig["reference"], color="k", linestyle=":", label="predicted")
        plt.xlabel("time [s]")
        plt.ylabel(fig["ylabel"])
        plt.title(fig["title"])
        plt.legend(loc="best", fontsize=8)
        plt.tight_layout()
        target = out_dir / fig["file"]
        plt.savefig(target, dpi=150)
        plt.close()
        print(f"wrote {target}")


if __name__ == "__main__":
    main()
