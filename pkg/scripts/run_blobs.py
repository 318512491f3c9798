"""Train the 5-qubit, 5-layer classifier on the blob fixture over a grid of
learning rates and print the final accuracies.

    python3 scripts/run_blobs.py --rates 0.01 0.1 0.5 --epochs 200
"""

import argparse
import time

from deepvqc.ansatz import AnsatzConfig
from deepvqc.classifier import ModelConfig, train
from deepvqc.data_io import stratified_split
from deepvqc.preprocess import PreprocessConfig, fit_preprocess
from deepvqc.synthetic import make_blobs


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--rates", type=float, nargs="+", default=[0.01, 0.1, 0.5])
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--layers", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()

    ds = make_blobs(seed=a.seed)
    tr, va = stratified_split(ds, 0.2, a.seed)
    prep = fit_preprocess(tr.features, PreprocessConfig())
    tr, va = tr.with_features(prep.transform(tr.features)), va.with_features(prep.transform(va.features))

    print("rate      train_acc  val_acc  train_cost  seconds")
    for rate in a.rates:
        cfg = ModelConfig(AnsatzConfig(5, a.layers), learning_rate=rate, epochs=a.epochs, init_seed=a.seed)
        t0 = time.perf_counter()
        _, hist = train(tr, va, cfg)
        last = hist.records[-1]
        print(f"{rate:<9g} {last.train_accuracy:9.3f} {last.val_accuracy:8.3f} {last.train_cost:11.4f} "
              f"{time.perf_counter() - t0:8.1f}")


if __name__ == "__main__":
    main()
