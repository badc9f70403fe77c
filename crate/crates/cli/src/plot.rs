//! Generated matplotlib scripts. The script reads the CSV at run time, so it
//! can be rerun after the data is regenerated.

pub fn script(csv: &str, key: &str, x: &str, xlabel: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Throughput against offered load, one line per {key}."""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv:?}
series = defaultdict(lambda: ([], []))
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        xs, ys = series[row[{key:?}]]
        xs.append(float(row[{x:?}]))
        ys.append(float(row["mean_S"]))

fig, ax = plt.subplots(figsize=(6, 4))
for name, (xs, ys) in series.items():
    ax.plot(xs, ys, label=name)
ax.set_xlabel({xlabel:?})
ax.set_ylabel("Throughput S (packets per slot)")
ax.grid(True, alpha=0.3)
ax.legend(fontsize="small")
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#
    )
}

pub fn gain_script(csv: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Maximum throughput against MPR order m."""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv:?}
series = defaultdict(lambda: ([], []))
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        xs, ys = series[row["series"]]
        xs.append(int(row["m"]))
        ys.append(float(row["value"]))

fig, ax = plt.subplots(figsize=(6, 4))
for name, (xs, ys) in series.items():
    style = "--" if name == "additive_prediction" else "-"
    ax.plot(xs, ys, style, marker="o", label=name)
ax.set_xlabel("MPR order m")
ax.set_ylabel("Maximum throughput")
ax.set_xticks(sorted({{m for xs, _ in series.values() for m in xs}}))
ax.grid(True, alpha=0.3)
ax.legend(fontsize="small")
fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#
    )
}
