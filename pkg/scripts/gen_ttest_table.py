"""Freeze a high-precision Student-t reference table for the test suite.

Run once: python scripts/gen_ttest_table.py
Writes tests/data/ttest_reference.json with two-sided p-values computed by
mpmath at 40 digits, rounded to 12 significant digits.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40

REPO = Path(__file__).resolve().parent.parent


def p_two_sided(t, df):
    x = mp.mpf(df) / (df + mp.mpf(t) ** 2)
    return mp.betainc(mp.mpf(df) / 2, mp.mpf(1) / 2, 0, x, regularized=True)


def main():
    dfs = [2, 4, 9, 29]
    ts = [i * 0.25 for i in range(50)]  # 0.00 .. 12.25
    table = []
    for df in dfs:
        for t in ts:
            table.append({"t": t, "df": df,
                          "p": float(mp.nstr(p_two_sided(t, df), 12))})

    vectors = []
    cases = [
        ([24.3, 25.5, 26.7, 25.1, 25.9], [20.0, 21.1, 22.4, 20.9, 21.6]),
        ([2.0, 2.0, 2.0, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0, 1.0]),
        ([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]),
        ([10.0, 12.0, 11.0, 13.0, 12.5, 11.5], [9.0, 11.5, 10.0, 12.0, 12.0, 10.5]),
        ([0.5, 0.6, 0.7], [0.4, 0.5, 0.55]),
        ([100.0, 101.0], [99.0, 100.5]),
        ([5.0, 4.0, 6.0, 5.5, 4.5, 5.2, 4.8, 5.9, 4.1, 5.3],
         [4.0, 4.2, 5.1, 5.0, 4.9, 4.6, 4.4, 5.2, 4.0, 4.7]),
        ([-1.0, -2.0, -1.5, -2.5], [1.0, 0.5, 0.8, 1.2]),
        ([3.14, 2.72, 1.62, 4.67, 2.00], [3.0, 2.5, 1.8, 4.5, 2.2]),
        ([25.5] * 4 + [26.0], [21.7] * 4 + [22.0]),
    ]
    for x, y in cases:
        n = len(x)
        d = [a - b for a, b in zip(x, y)]
        mean = mp.fsum(d) / n
        var = mp.fsum((v - mean) ** 2 for v in d) / (n - 1)
        t = mean / mp.sqrt(var / n)
        vectors.append({
            "x": x, "y": y,
            "t": float(mp.nstr(t, 12)),
            "df": n - 1,
            "p": float(mp.nstr(p_two_sided(t, n - 1), 12)),
        })

    out = {"cdf_table": table, "vectors": vectors}
    path = REPO / "tests" / "data" / "ttest_reference.json"
    path.write_text(json.dumps(out, indent=1), encoding="utf-8")
    print(f"wrote {path} ({len(table)} table points, {len(vectors)} vectors)")


if __name__ == "__main__":
    main()
