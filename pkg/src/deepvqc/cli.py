"""Command-line front end.

    deepvqc ingest     --data brain.csv
    deepvqc preprocess --data brain.csv --pca on --fit-scope all --out runs/prep
    deepvqc train      --data brain.csv --epochs 100 --out runs/train
    deepvqc crossval   --data brain.csv --folds 3 --out runs/cv
    deepvqc gradcheck  --cases 100

Every command accepts ``--config run.json``; explicit flags override values
from the file.  Exit codes: 0 ok, 1 usage, 2 data, 3 numeric tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


from . import __version__
from .ansatz import AnsatzConfig, build_circuit
from .autodiff import oracle_sweep
from .classifier import InitScale, ModelConfig, evaluate, save_checkpoint, train
from .data_io import load_csv, save_csv, stratified_split
from .errors import ContractError, DeepVQCError, ToleranceError
from .evaluation import (
    confusion,
    cross_validate,
    emit_report,
    metrics,
    reference_block,
    resolve_qubits,
    write_curves,
    write_json,
)
from .preprocess import PreprocessConfig, fit_preprocess

log = logging.getLogger("deepvqc")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunConfig:
    data: Optional[str] = None
    label_column: str = "type"
    id_column: str = "samples"
    seed: int = 0
    qubits: Optional[int] = None
    layers: int = 25
    learning_rate: float = 0.01
    epochs: int = 100
    pca: str = "off"
    pca_variance: float = 0.95
    fit_scope: str = "train"
    val_fraction: float = 0.2
    folds: int = 3
    out: Optional[str] = None
    threads: int = 1
    init_scale: str = InitScale.UNIFORM_0_2PI.value
    readout_qubits: tuple = (0, 1, 2, 3, 4)
    # gradcheck
    cases: int = 100
    max_qubits: int = 6
    max_layers: int = 3
    fd_step: float = 1e-5

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ContractError(msg)

        need(self.pca in ("on", "off"), f"--pca must be on|off, got {self.pca!r}")
        need(self.fit_scope in ("train", "all"), f"--fit-scope must be train|all, got {self.fit_scope!r}")
        need(self.layers >= 1, "--layers must be >= 1")
        need(self.epochs >= 1, "--epochs must be >= 1")
        need(self.learning_rate >= 0, "--learning-rate must be >= 0")
        need(0 < self.pca_variance <= 1, "--pca-variance must be in (0, 1]")
        need(0 < self.val_fraction < 1, "--val-fraction must be in (0, 1)")
        need(self.folds >= 2, "--folds must be >= 2")
        need(self.threads >= 1, "--threads must be >= 1")
        need(self.qubits is None or 1 <= self.qubits <= 20, "--qubits must be in 1..20")
        need(self.init_scale in InitScale.__members__, f"unknown --init-scale {self.init_scale!r}")
        need(self.cases >= 1 and self.max_qubits >= 1 and self.max_layers >= 1, "sweep sizes must be >= 1")
        need(self.fd_step > 0, "--fd-step must be > 0")

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d["readout_qubits"] = list(self.readout_qubits)
        # output location is not part of the experiment; leaving it out keeps
        # reports from different directories byte-identical
        d.pop("out")
        return d

    @property
    def out_dir(self) -> Path:
        return Path(self.out or "runs")

    def preprocess_config(self) -> PreprocessConfig:
        return PreprocessConfig(self.pca == "on", self.pca_variance, self.fit_scope)

    def model_config(self, n_qubits: int) -> ModelConfig:
        return ModelConfig(
            AnsatzConfig(n_qubits, self.layers),
            tuple(self.readout_qubits),
            self.learning_rate,
            self.epochs,
            self.seed,
            InitScale(self.init_scale),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_run_flags(p: argparse.ArgumentParser, *, data=True, model=True, split=False, folds=False) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file with RunConfig fields")
    p.add_argument("--out", default=S, help="output directory")
    p.add_argument("--seed", type=int, default=S)
    if data:
        p.add_argument("--data", default=S, help="CuMiDa-style CSV")
        p.add_argument("--label-column", dest="label_column", default=S)
        p.add_argument("--id-column", dest="id_column", default=S)
        p.add_argument("--pca", choices=["on", "off"], default=S)
        p.add_argument("--pca-variance", dest="pca_variance", type=float, default=S)
        p.add_argument("--fit-scope", dest="fit_scope", choices=["train", "all"], default=S)
    if split:
        p.add_argument("--val-fraction", dest="val_fraction", type=float, default=S)
    if folds:
        p.add_argument("--folds", type=int, default=S)
    if model:
        p.add_argument("--qubits", type=int, default=S, help="default: ceil(log2(features)), at least the readout count")
        p.add_argument("--layers", type=int, default=S)
        p.add_argument("--learning-rate", dest="learning_rate", type=float, default=S)
        p.add_argument("--epochs", type=int, default=S)
        p.add_argument("--init-scale", dest="init_scale", choices=[s.value for s in InitScale], default=S)
        p.add_argument("--readout-qubits", dest="readout_qubits", type=_int_list, default=S)
        p.add_argument("--threads", type=int, default=S, help="worker cap; results do not depend on it")


def _int_list(text: str) -> tuple:
    return tuple(int(t) for t in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deepvqc", description="Deep variational quantum classifier for microarray data")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load a CSV and print its summary")
    _add_run_flags(p, model=False)

    p = sub.add_parser("preprocess", help="fit scaling/PCA and write the transformed matrix")
    _add_run_flags(p, model=False, split=True)

    p = sub.add_parser("train", help="train on a stratified split; write checkpoint, curves and report")
    _add_run_flags(p, split=True)

    p = sub.add_parser("crossval", help="stratified k-fold cross-validation")
    _add_run_flags(p, folds=True)

    p = sub.add_parser("gradcheck", help="adjoint / parameter-shift / finite-difference sweep")
    _add_run_flags(p, data=False, model=False)
    p.add_argument("--cases", type=int, default=argparse.SUPPRESS)
    p.add_argument("--max-qubits", dest="max_qubits", type=int, default=argparse.SUPPRESS)
    p.add_argument("--max-layers", dest="max_layers", type=int, default=argparse.SUPPRESS)
    p.add_argument("--fd-step", dest="fd_step", type=float, default=argparse.SUPPRESS)
    p.add_argument("--inject-sign-flip", dest="inject_sign_flip", action="store_true", help=argparse.SUPPRESS)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if getattr(ns, "config", None):
        values.update(json.loads(Path(ns.config).read_text()))
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(values) - fields
    if unknown:
        raise ContractError(f"unknown config keys: {sorted(unknown)}")
    values.update({k: v for k, v in vars(ns).items() if k in fields})
    if "readout_qubits" in values:
        values["readout_qubits"] = tuple(values["readout_qubits"])
    cfg = RunConfig(**values)
    cfg.validate()
    if ns.command != "gradcheck" and cfg.data is None:
        raise ContractError("--data is required")
    return cfg


def _load(cfg: RunConfig):
    return load_csv(cfg.data, cfg.label_column, cfg.id_column)


def _out_dir(cfg: RunConfig) -> Path:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(cfg: RunConfig) -> int:
    ds = _load(cfg)
    summary = ds.summary()
    print(json.dumps(summary))
    if cfg.out is not None:
        write_json({**summary, "config": cfg.echo()}, _out_dir(cfg) / "summary.json")
    return EXIT_OK


def _fit_split(ds, cfg: RunConfig):
    """Stratified split plus preprocessing fitted per fit_scope."""
    train_set, val_set = stratified_split(ds, cfg.val_fraction, cfg.seed)
    rows = ds.features if cfg.fit_scope == "all" else train_set.features
    prep = fit_preprocess(rows, cfg.preprocess_config())
    return train_set, val_set, prep


def cmd_preprocess(cfg: RunConfig) -> int:
    ds = _load(cfg)
    if cfg.fit_scope == "all":
        prep = fit_preprocess(ds.features, cfg.preprocess_config())
    else:
        _, _, prep = _fit_split(ds, cfg)
    reduced = prep.transform(ds.features)
    names = ds.feature_names if prep.pca is None else [f"pc{j}" for j in range(reduced.shape[1])]
    out = _out_dir(cfg)
    prep.extra = {"run_config": cfg.echo()}
    prep.save(out / "preprocess_model.json")
    save_csv(ds.with_features(reduced, names), out / "preprocessed.csv", cfg.label_column, cfg.id_column)
    summary = {
        "n_samples": ds.n_samples,
        "n_input_features": ds.n_features,
        "n_output_features": prep.n_output_features,
    }
    if prep.pca is not None:
        summary["explained_variance"] = float(prep.pca.explained_variance_ratios.sum())
    print(json.dumps(summary))
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    ds = _load(cfg)
    train_set, val_set, prep = _fit_split(ds, cfg)
    train_set = train_set.with_features(prep.transform(train_set.features))
    val_set = val_set.with_features(prep.transform(val_set.features))
    n_qubits = cfg.qubits or resolve_qubits(prep.n_output_features, len(cfg.readout_qubits))
    model_cfg = cfg.model_config(n_qubits)

    def progress(rec):
        log.info(
            "epoch %d  train acc %.3f cost %.4f  val acc %.3f cost %.4f",
            rec.epoch, rec.train_accuracy, rec.train_cost, rec.val_accuracy, rec.val_cost,
        )

    theta, history = train(train_set, val_set, model_cfg, threads=cfg.threads, progress=progress)
    circuit = build_circuit(model_cfg.ansatz)
    tr_cost, tr_acc, _ = evaluate(theta, model_cfg, circuit, train_set.features, train_set.labels, cfg.threads)
    va_cost, va_acc, preds = evaluate(theta, model_cfg, circuit, val_set.features, val_set.labels, cfg.threads)
    cm = confusion(val_set.labels, preds, ds.n_classes)

    out = _out_dir(cfg)
    save_checkpoint(
        out / "checkpoint.json",
        model_cfg,
        theta,
        {"run_config": cfg.echo(), "class_names": ds.class_names, "preprocess": prep.to_dict()},
    )
    emit_report(
        history,
        cm,
        metrics(cm),
        cfg.echo(),
        out,
        class_names=ds.class_names,
        extra={
            "model_config": model_cfg.to_dict(),
            "n_params": circuit.n_params,
            "n_features": prep.n_output_features,
            "train_accuracy": tr_acc,
            "train_cost": tr_cost,
            "val_accuracy": va_acc,
            "val_cost": va_cost,
        },
    )
    print(json.dumps({"train_accuracy": tr_acc, "val_accuracy": va_acc, "train_cost": tr_cost, "val_cost": va_cost}))
    return EXIT_OK


def cmd_crossval(cfg: RunConfig) -> int:
    ds = _load(cfg)
    model_cfg = cfg.model_config(cfg.qubits or resolve_qubits(ds.n_features, len(cfg.readout_qubits)))
    report = cross_validate(
        ds,
        model_cfg,
        cfg.preprocess_config(),
        k=cfg.folds,
        seed=cfg.seed,
        n_qubits=cfg.qubits,
        threads=cfg.threads,
    )
    report["config"] = cfg.echo()
    report["reference"] = reference_block(report["mean_test_accuracy"])
    out = _out_dir(cfg)
    write_json(report, out / "cv_report.json")
    write_curves(report["mean_curves"], out / "cv_curves.csv")
    print(json.dumps({
        "fold_test_sizes": [f["n_test"] for f in report["folds"]],
        "fold_test_accuracies": [f["test_accuracy"] for f in report["folds"]],
        "mean_test_accuracy": report["mean_test_accuracy"],
        "mean_test_cost": report["mean_test_cost"],
    }))
    return EXIT_OK


def cmd_gradcheck(cfg: RunConfig, sign_flip: bool = False) -> int:
    stats = oracle_sweep(cfg.cases, cfg.seed, cfg.max_qubits, cfg.max_layers, cfg.fd_step, sign_flip=sign_flip)
    print(json.dumps(stats))
    if stats["max_adjoint_vs_shift"] > 1e-9:
        raise ToleranceError(
            f"adjoint vs parameter-shift deviation {stats['max_adjoint_vs_shift']:.3e} > 1e-9 "
            f"(seed {cfg.seed}, case {stats['worst_adjoint_case']})"
        )
    if stats["max_shift_vs_finite_diff"] > 1e-6:
        raise ToleranceError(
            f"parameter-shift vs finite-difference deviation {stats['max_shift_vs_finite_diff']:.3e} > 1e-6 "
            f"(seed {cfg.seed}, case {stats['worst_finite_diff_case']})"
        )
    print("gradcheck: pass")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(ns)
    except (ContractError, TypeError, ValueError, OSError) as exc:
        print(f"deepvqc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if ns.command == "ingest":
            return cmd_ingest(cfg)
        if ns.command == "preprocess":
            return cmd_preprocess(cfg)
        if ns.command == "train":
            return cmd_train(cfg)
        if ns.command == "crossval":
            return cmd_crossval(cfg)
        return cmd_gradcheck(cfg, getattr(ns, "inject_sign_flip", False))
    except ToleranceError as exc:
        print(f"deepvqc: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DeepVQCError, OSError) as exc:
        print(f"deepvqc: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
