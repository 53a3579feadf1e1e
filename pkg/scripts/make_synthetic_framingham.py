"""Write a synthetic CSV with the Kaggle framingham.csv column layout.

The values are random draws with roughly similar marginals. It exists only to
smoke-test the pipeline and its runtime when the real file is not at hand;
numbers computed on it say nothing about the real study.

    python scripts/make_synthetic_framingham.py --out data/synthetic_framingham.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

COLUMNS = [
    "male", "age", "education", "currentSmoker", "cigsPerDay", "BPMeds",
    "prevalentStroke", "prevalentHyp", "diabetes", "totChol", "sysBP",
    "diaBP", "BMI", "heartRate", "glucose", "TenYearCHD",
]


def generate(n, seed):
    rng = np.random.default_rng(seed)
    male = rng.random(n) < 0.43
    age = np.clip(rng.normal(49.6, 8.6, n), 32, 70).round()
    smoker = rng.random(n) < 0.49
    bpmeds = rng.random(n) < 0.03
    diabetes = rng.random(n) < 0.026
    chol = np.clip(rng.normal(237, 45, n), 107, 600).round()
    sbp = np.clip(rng.normal(132, 22, n), 83, 295).round(1)
    logit = (
        -8.0 + 0.065 * age + 0.5 * male + 0.25 * smoker + 0.6 * diabetes
        + 0.35 * bpmeds + 0.002 * chol + 0.017 * sbp
    )
    chd = rng.random(n) < 1 / (1 + np.exp(-logit))

    def with_na(values, rate):
        out = [str(v) for v in values]
        for i in np.flatnonzero(rng.random(n) < rate):
            out[i] = "NA"
        return out

    cols = {
        "male": male.astype(int),
        "age": age.astype(int),
        "education": with_na(rng.integers(1, 5, n), 0.025),
        "currentSmoker": smoker.astype(int),
        "cigsPerDay": with_na(np.where(smoker, rng.integers(1, 40, n), 0), 0.007),
        "BPMeds": with_na(bpmeds.astype(int), 0.0125),
        "prevalentStroke": (rng.random(n) < 0.006).astype(int),
        "prevalentHyp": (rng.random(n) < 0.31).astype(int),
        "diabetes": diabetes.astype(int),
        "totChol": with_na(chol.astype(int), 0.012),
        "sysBP": sbp,
        "diaBP": np.clip(rng.normal(83, 12, n), 48, 142).round(1),
        "BMI": with_na(np.clip(rng.normal(25.8, 4.1, n), 15, 57).round(2), 0.0045),
        "heartRate": with_na(np.clip(rng.normal(76, 12, n), 44, 143).astype(int), 0.0003),
        "glucose": with_na(np.clip(rng.normal(82, 24, n), 40, 394).astype(int), 0.09),
        "TenYearCHD": chd.astype(int),
    }
    return [[cols[c][i] for c in COLUMNS] for i in range(n)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/synthetic_framingham.csv")
    ap.add_argument("--rows", type=int, default=4238)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(generate(args.rows, args.seed))
    print(f"wrote {args.rows} synthetic rows to {out}")


if __name__ == "__main__":
    main()
