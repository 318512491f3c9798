"""Write the seeded Gaussian-blob fixture as a CSV the CLI can read.

    python3 scripts/make_blobs_csv.py blobs.csv --samples 100 --features 32
"""

import argparse

from deepvqc.data_io import save_csv
from deepvqc.synthetic import make_blobs


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--features", type=int, default=32)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--separation", type=float, default=3.0)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    ds = make_blobs(a.samples, a.features, a.classes, a.separation, seed=a.seed)
    save_csv(ds, a.out)
    print(f"wrote {a.out}: {ds.n_samples} x {ds.n_features}, {ds.n_classes} classes")


if __name__ == "__main__":
    main()
