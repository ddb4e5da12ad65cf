#!/usr/bin/env python3
"""Deterministic generators for the bundled fixture datasets.

Run from the repository root:

    python scripts/gen_fixtures.py

Writes into src/ivda/data/ and prints the reference matrices frozen into
the acceptance tests (computed here with plain numpy formulas, so the test
comparison is independent of the library code paths).
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "ivda" / "data"

MONTHS = ["jan", "feb", "mar", "apr", "may", "jun",
          "jul", "aug", "sep", "oct", "nov", "dec"]


def triangular0_quantile(t):
    return np.where(t <= 0.5, -1.0 + np.sqrt(2.0 * t), 1.0 - np.sqrt(2.0 * (1.0 - t)))


def gen_credit_card():
    rng = np.random.default_rng(20240420)
    names = ["food", "social", "travel", "gas", "clothes"]
    target_c = np.array([26.09, 13.80, 183.97, 24.84, 49.32])
    target_r = np.array([9.15, 10.23, 13.01, 8.96, 11.89])
    sds = np.array([5.5, 3.2, 11.0, 4.5, 7.5])
    corr = np.eye(5)
    pairs = {(0, 4): 0.55, (3, 4): -0.35, (0, 3): -0.25, (0, 1): 0.15,
             (1, 2): 0.10, (2, 4): 0.20, (1, 3): -0.05, (1, 4): 0.10,
             (0, 2): 0.05, (2, 3): 0.00}
    for (i, j), rho in pairs.items():
        corr[i, j] = corr[j, i] = rho
    assert np.all(np.linalg.eigvalsh(corr) > 0)
    cov = corr * np.outer(sds, sds)
    chol = np.linalg.cholesky(cov)

    n = 36
    z = rng.standard_normal((n, 5))
    c = z @ chol.T
    c = c - c.mean(axis=0) + target_c          # exact column means
    r = np.exp(rng.normal(0.0, 0.30, size=(n, 5)))
    r = r * target_r / r.mean(axis=0)          # exact column means, positive

    # shrink deviations (means preserved) until all lower bounds stay positive
    for _ in range(60):
        lower = c - 0.5 * r
        if np.all(lower > 0.5):
            break
        c = target_c + 0.92 * (c - target_c)
        r = target_r + 0.92 * (r - target_r)
    assert np.all(c - 0.5 * r > 0.5)
    assert np.allclose(c.mean(axis=0), target_c, atol=1e-12)
    assert np.allclose(r.mean(axis=0), target_r, atol=1e-12)

    lower = c - 0.5 * r
    upper = c + 0.5 * r

    labels = [f"user{1 + i // 12}:{MONTHS[i % 12]}" for i in range(n)]

    with (DATA / "credit_card_intervals.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["label"]
        for name in names:
            header.extend([f"{name}.lo", f"{name}.hi"])
        writer.writerow(header)
        for i in range(n):
            row = [labels[i]]
            for j in range(5):
                row.extend([repr(float(lower[i, j])), repr(float(upper[i, j]))])
            writer.writerow(row)

    # microdata: the exact endpoints plus symmetric-triangular interior draws
    with (DATA / "credit_card_microdata.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["user", "month", "variable", "value"])
        for i in range(n):
            user, month = labels[i].split(":")
            for j, name in enumerate(names):
                u = triangular0_quantile(rng.uniform(size=12))
                values = [lower[i, j], upper[i, j]] + \
                    list(c[i, j] + 0.5 * r[i, j] * u)
                for v in values:
                    writer.writerow([user, month, name, repr(float(v))])

    # reference matrices, plain numpy, divisor n
    cc = c - c.mean(axis=0)
    rc = r - r.mean(axis=0)
    s_cc = cc.T @ cc / n
    s_rr = rc.T @ rc / n
    s_b = s_cc + s_rr / 24.0
    d = np.sqrt(np.diag(s_b))
    corr_b = s_b / np.outer(d, d)
    rbar = r.mean(axis=0)
    sigma7 = s_cc + np.diag(np.diag(s_rr + np.outer(rbar, rbar))) / 24.0
    d7 = np.sqrt(np.diag(sigma7))
    corr_7 = sigma7 / np.outer(d7, d7)

    print("credit card reference values (freeze in tests):")
    print("barycentre c:", np.array2string(c.mean(axis=0), precision=6, separator=", "))
    print("barycentre r:", np.array2string(rbar, precision=6, separator=", "))
    print("corr_b:")
    print(np.array2string(corr_b, precision=6, separator=", "))
    print("corr_7:")
    print(np.array2string(corr_7, precision=6, separator=", "))


def gen_rtt_summary():
    targets = [-0.14, -0.13, -0.34, -0.58, -0.69, -0.34, -0.17, -0.09]
    balanced = {1, 7}          # probes whose mode signs are balanced
    n = 564
    with (DATA / "rtt_summary.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "variable", "mean", "median", "min", "max"])
        for j, target in enumerate(targets):
            name = f"x{j + 1}"
            if j in balanced:
                pos = n // 2
                up = 0.3
                down = up - 2.0 * target       # mean of +-pattern hits target
                modes = [up] * pos + [-down] * (n - pos)
            else:
                pos = 100
                up = 0.2
                down = (pos * up - n * target) / (n - pos)
                modes = [up] * pos + [-down] * (n - pos)
            assert all(abs(m) < 1.0 for m in modes)
            for h, mo in enumerate(modes):
                # mean 0 and bounds [-1, 1] make the scaled mode equal mo
                writer.writerow([f"t{h:03d}", name, repr(0.0), repr(mo / 3.0),
                                 repr(-1.0), repr(1.0)])


def gen_flights_like():
    rng = np.random.default_rng(20240601)
    carriers = ["AA", "BB"]
    with (DATA / "flights_like_microdata.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "carrier", "variable", "value"])
        for month in range(1, 13):
            for carrier in carriers:
                count = int(rng.integers(40, 61))
                base = 5.0 + 2.0 * np.sin(month / 2.0) + (3.0 if carrier == "BB" else 0.0)
                dep = base + rng.gamma(2.0, 6.0, size=count) - 8.0
                arr = dep + rng.normal(-2.0, 9.0, size=count)
                air = rng.normal(150.0 + 15.0 * (carrier == "BB"), 25.0, size=count)
                dist = air * 7.5 + rng.normal(0.0, 40.0, size=count)
                for name, values in (("dep_delay", dep), ("arr_delay", arr),
                                     ("air_time", air), ("distance", dist)):
                    for v in values:
                        writer.writerow([str(month), carrier, name, repr(float(v))])


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    gen_credit_card()
    gen_rtt_summary()
    gen_flights_like()
    print("fixtures written to", DATA)


if __name__ == "__main__":
    sys.exit(main())
