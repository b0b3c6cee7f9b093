"""Regenerates welch_50.json and correlations_40.json with SciPy.

    python3 gen_stats.py
"""
import json

import numpy as np
from scipy import stats


def welch_cases(rng):
    cases = []
    for i in range(50):
        na, nb = rng.integers(2, 12, size=2)
        a = rng.normal(rng.uniform(40, 90), rng.uniform(0.1, 5), size=na)
        b = rng.normal(rng.uniform(40, 90), rng.uniform(0.1, 5), size=nb)
        if i % 5 == 0:
            b = a + rng.normal(0, 0.3, size=na)  # close means, large p
        a, b = np.round(a, 2), np.round(b, 2)
        r = stats.ttest_ind(a, b, equal_var=False)
        cases.append({"a": a.tolist(), "b": b.tolist(), "t": float(r.statistic), "p": float(r.pvalue)})
    return cases


def correlation_cases(rng):
    cases = []
    for i in range(40):
        n = int(rng.integers(3, 40))
        x = rng.normal(size=n)
        y = 0.6 * x + rng.normal(size=n)
        if i % 4 == 1:
            x, y = np.round(x), np.round(y * 2)  # ties
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        cases.append({
            "x": x.tolist(),
            "y": y.tolist(),
            "pearson": float(stats.pearsonr(x, y).statistic),
            "spearman": float(stats.spearmanr(x, y).statistic),
        })
    return cases


def main():
    rng = np.random.default_rng(7)
    with open("welch_50.json", "w") as f:
        json.dump(welch_cases(rng), f, indent=1)
        f.write("\n")
    with open("correlations_40.json", "w") as f:
        json.dump(correlation_cases(rng), f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
