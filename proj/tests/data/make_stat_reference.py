"""Regenerates stat_reference_cases.inc from SciPy.

Run from this directory: python3 make_stat_reference.py > stat_reference_cases.inc
"""

import numpy as np
from scipy import stats

OPS = {">=": "less", "<=": "greater", "!=": "two-sided"}


def fmt(x):
    return repr(float(x))


def main():
    rng = np.random.default_rng(20240611)
    print("// Generated by make_stat_reference.py (SciPy %s); do not edit." % __import__("scipy").__version__)
    print("// t cases: values, op, c, statistic, p_value")
    print("inline const std::vector<TCase> kTCases = {")
    for _ in range(10):
        n = int(rng.integers(2, 60))
        values = rng.normal(rng.uniform(-50, 150), rng.uniform(0.5, 30), size=n)
        c = float(np.mean(values) + rng.normal(0, np.std(values, ddof=1) / np.sqrt(n) * 2))
        op = str(rng.choice(list(OPS)))
        res = stats.ttest_1samp(values, c, alternative=OPS[op])
        vals = ", ".join(fmt(v) for v in values)
        print(f'    {{{{{vals}}}, "{op}", {fmt(c)}, {fmt(res.statistic)}, {fmt(res.pvalue)}}},')
    print("};")
    print("// z cases: p_hat, n, op, c, statistic, p_value")
    print("inline const std::vector<ZCase> kZCases = {")
    for _ in range(10):
        n = int(rng.integers(50, 5000))
        c = float(rng.uniform(0.05, 0.95))
        p_hat = float(np.clip(c + rng.normal(0, np.sqrt(c * (1 - c) / n) * 2), 0, 1))
        op = str(rng.choice(list(OPS)))
        z = (p_hat - c) / np.sqrt(c * (1 - c) / n)
        if OPS[op] == "less":
            p = stats.norm.cdf(z)
        elif OPS[op] == "greater":
            p = stats.norm.sf(z)
        else:
            p = 2 * stats.norm.sf(abs(z))
        print(f'    {{{fmt(p_hat)}, {n}, "{op}", {fmt(c)}, {fmt(z)}, {fmt(p)}}},')
    print("};")


if __name__ == "__main__":
    main()
