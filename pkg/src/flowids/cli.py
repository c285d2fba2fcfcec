"""Command-line orchestration: train, evaluate, report, run-all.

A trained model is persisted as one self-describing JSON document
(format version, pipeline settings, encoder, model), next to a manifest
of test-row indices so the exact evaluation fold can be reproduced.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import dataframe as df
from . import forest as rf
from . import linear as lr
from . import metrics as mx
from . import preprocess as pp
from . import report as rp

FORMAT_VERSION = 1

MODEL_TITLES = {"logreg": "Logistic Regression", "rf": "Random Forest"}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    data: str = ""
    drop: list[str] = field(default_factory=lambda: ["id", "attack_cat"])
    categorical: list[str] = field(default_factory=lambda: ["proto", "service", "state"])
    label: str = "label"
    test_fraction: float = 0.2
    seed: int = 42
    model: str = "rf"                  # "logreg" or "rf"
    out: str = "."
    trees: int = 100
    max_iter: int = 10000
    penalty: str = "l2"                # "none", "l1", "l2"
    strength: float | None = None      # None -> 1 / n_train
    max_depth: int | None = None

    def validate(self) -> None:
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test fraction {self.test_fraction} not in (0, 1)")
        if self.model not in MODEL_TITLES:
            raise ValueError(f"unknown model kind {self.model!r}")
        drop, cat = set(self.drop), set(self.categorical)
        overlap = (drop & cat) | (drop & {self.label}) | (cat & {self.label})
        if overlap:
            raise ValueError(
                f"drop/categorical/label sets overlap on {sorted(overlap)}"
            )


def _dump_json(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(name, exc) from exc
            return False

    return _Ctx()


def _load_features(config: PipelineConfig):
    with _stage("load"):
        # Columns that will be dropped are ingested as text so that free-form
        # cells (e.g. attack category names) never hit numeric validation.
        frame = df.load_csv(
            config.data, set(config.categorical) | set(config.drop), config.label
        )
    with _stage("drop"):
        frame = df.drop_columns(frame, config.drop)
    with _stage("split_xy"):
        X_frame, y = df.split_xy(frame)
    return frame, X_frame, y


def cmd_train(config: PipelineConfig) -> int:
    config.validate()
    os.makedirs(config.out, exist_ok=True)
    _, X_frame, y = _load_features(config)
    with _stage("encode"):
        encoder = pp.fit_encoder(X_frame)
        X = pp.transform(encoder, X_frame, pp.UnknownPolicy.STRICT)
    with _stage("split"):
        split = pp.train_test_split(X, y, config.test_fraction, config.seed)
    with _stage("fit"):
        if config.model == "rf":
            fconfig = rf.ForestConfig(
                n_trees=config.trees, seed=config.seed, max_depth=config.max_depth
            )
            model = rf.fit_forest(split.train_X, split.train_y, fconfig)
            model_doc = model.to_dict()
        else:
            lconfig = lr.LogisticConfig(
                penalty=lr.Penalty(config.penalty),
                strength=config.strength,
                max_iterations=config.max_iter,
            )
            model = lr.fit_logistic(split.train_X, split.train_y, lconfig)
            model_doc = model.to_dict()
    with _stage("persist"):
        document = {
            "format_version": FORMAT_VERSION,
            "kind": config.model,
            "pipeline": {
                "drop": config.drop,
                "categorical": config.categorical,
                "label": config.label,
                "test_fraction": config.test_fraction,
                "seed": config.seed,
            },
            "encoder": encoder.to_dict(),
            "model": model_doc,
        }
        _dump_json(document, os.path.join(config.out, "model.json"))
        _dump_json(
            {
                "seed": config.seed,
                "test_fraction": config.test_fraction,
                "n_rows": X.rows,
                "test_indices": split.test_indices.tolist(),
            },
            os.path.join(config.out, "split_manifest.json"),
        )
    return 0


def _load_model_document(path: str):
    with _stage("load_model"):
        doc = _load_json(path)
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {doc.get('format_version')!r}"
            )
        encoder = pp.EncoderModel.from_dict(doc["encoder"])
        if doc["kind"] == "rf":
            model = rf.ForestModel.from_dict(doc["model"])
        elif doc["kind"] == "logreg":
            model = lr.LogisticModel.from_dict(doc["model"])
        else:
            raise ValueError(f"unknown model kind {doc['kind']!r}")
    return doc, encoder, model


def _format_report(report: mx.ClassReport, auc: float) -> str:
    lines = [
        f"{'':>14}{'precision':>11}{'recall':>9}{'f1-score':>10}{'support':>9}",
        "",
    ]
    for c in (0, 1):
        m = report.per_class[c]
        lines.append(
            f"{c:>14}{m.precision:>11.4f}{m.recall:>9.4f}"
            f"{m.f1:>10.4f}{m.support:>9}"
        )
    lines.append("")
    lines.append(f"{'accuracy':>14}{'':>20}{report.accuracy:>10.4f}{report.total:>9}")
    lines.append(
        f"{'macro avg':>14}{report.macro_precision:>11.4f}"
        f"{report.macro_recall:>9.4f}{report.macro_f1:>10.4f}{report.total:>9}"
    )
    lines.append(
        f"{'weighted avg':>14}{report.weighted_precision:>11.4f}"
        f"{report.weighted_recall:>9.4f}{report.weighted_f1:>10.4f}{report.total:>9}"
    )
    lines.append("")
    lines.append(f"accuracy: {report.accuracy!r}")
    lines.append(f"auc: {auc!r}")
    return "\n".join(lines)


def cmd_evaluate(model_path: str, data_path: str, manifest_path: str | None,
                 out_path: str, strict_unknown: bool = False) -> int:
    doc, encoder, model = _load_model_document(model_path)
    pipe = doc["pipeline"]
    config = PipelineConfig(
        data=data_path,
        drop=pipe["drop"],
        categorical=pipe["categorical"],
        label=pipe["label"],
    )
    frame, X_frame, y = _load_features(config)
    policy = (
        pp.UnknownPolicy.STRICT
        if strict_unknown or manifest_path
        else pp.UnknownPolicy.ALL_ZEROS
    )
    with _stage("encode"):
        X = pp.transform(encoder, X_frame, policy)
    if manifest_path:
        with _stage("manifest"):
            manifest = _load_json(manifest_path)
            idx = np.asarray(manifest["test_indices"], dtype=np.int64)
            X = pp.FeatureMatrix(X.values[idx], X.names)
            y = df.LabelVector(y.values[idx])
    with _stage("predict"):
        if doc["kind"] == "rf":
            proba = rf.predict_proba_forest(model, X)
            pred = rf.predict_label_forest(model, X)
        else:
            proba = lr.predict_proba_linear(model, X)
            pred = lr.predict_label_linear(model, X)
    with _stage("metrics"):
        cm = mx.confusion(y, pred)
        report = mx.class_report(y, pred)
        curve = mx.roc(y, proba)
        try:
            correlation = mx.pearson(mx.dummify_for_correlation(frame))
            correlation_doc = correlation.to_dict()
        except df.SchemaError as exc:
            print(f"warning: correlation skipped: {exc}", file=sys.stderr)
            correlation_doc = None
    with _stage("persist"):
        _dump_json(
            {
                "model_kind": doc["kind"],
                "confusion": cm.to_dict(),
                "report": report.to_dict(),
                "roc": curve.to_dict(),
                "correlation": correlation_doc,
            },
            out_path,
        )
    print(f"Classification report ({MODEL_TITLES[doc['kind']]}):")
    print(_format_report(report, curve.auc))
    return 0


def cmd_report(model_path: str, metrics_path: str, out_dir: str) -> int:
    doc, _, model = _load_model_document(model_path)
    with _stage("load_metrics"):
        metrics_doc = _load_json(metrics_path)
    os.makedirs(out_dir, exist_ok=True)
    title = MODEL_TITLES[doc["kind"]]
    with _stage("render"):
        cm = mx.ConfusionMatrix(np.asarray(metrics_doc["confusion"]["counts"]))
        rp.write_figure(cm, rp.FigureSpec(
            rp.FigureKind.CONFUSION_HEATMAP,
            f"Confusion Matrix for {title}",
            os.path.join(out_dir, "confusion.svg"),
        ))
        roc_doc = metrics_doc["roc"]
        curve = mx.RocCurve(
            fpr=np.asarray(roc_doc["fpr"]),
            tpr=np.asarray(roc_doc["tpr"]),
            thresholds=np.asarray(roc_doc["thresholds"]),
            auc=float(roc_doc["auc"]),
        )
        rp.write_figure(curve, rp.FigureSpec(
            rp.FigureKind.ROC_PLOT,
            f"Receiver Operating Characteristic (ROC) Curve for {title}",
            os.path.join(out_dir, "roc.svg"),
        ))
        if doc["kind"] == "rf":
            top = rf.top_k_importances(model.importances, model.feature_names, 10)
            rp.write_figure(top, rp.FigureSpec(
                rp.FigureKind.IMPORTANCE_BARS,
                f"Feature Importances for {title}",
                os.path.join(out_dir, "importances.svg"),
            ))
        else:
            print(
                "warning: importance figure skipped (logistic model has no "
                "impurity importances)",
                file=sys.stderr,
            )
        if metrics_doc.get("correlation") is not None:
            corr = mx.CorrelationMatrix.from_dict(metrics_doc["correlation"])
            rp.write_figure(corr, rp.FigureSpec(
                rp.FigureKind.CORRELATION_HEATMAP,
                "Correlation Heatmap",
                os.path.join(out_dir, "correlation.svg"),
                width=760, height=700,
            ))
        else:
            print("warning: correlation figure skipped (no payload)",
                  file=sys.stderr)
    return 0


def cmd_run_all(config: PipelineConfig) -> int:
    config.validate()
    for kind in ("logreg", "rf"):
        sub = replace(config, model=kind, out=os.path.join(config.out, kind))
        print(f"=== {MODEL_TITLES[kind]} ===")
        rc = cmd_train(sub)
        if rc != 0:
            return rc
        model_path = os.path.join(sub.out, "model.json")
        manifest_path = os.path.join(sub.out, "split_manifest.json")
        metrics_path = os.path.join(sub.out, "metrics.json")
        rc = cmd_evaluate(model_path, sub.data, manifest_path, metrics_path)
        if rc != 0:
            return rc
        rc = cmd_report(model_path, metrics_path, os.path.join(sub.out, "figures"))
        if rc != 0:
            return rc
    return 0


def _read_config_file(path: str) -> dict:
    if path.endswith(".json"):
        return _load_json(path)
    try:
        import tomllib  # Python >= 3.11
    except ImportError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


_CSV_LIST_KEYS = {"drop", "categorical"}


def _merge_config(args: argparse.Namespace) -> PipelineConfig:
    """Defaults < config file < explicit command-line flags."""
    values: dict = {}
    if getattr(args, "config", None):
        file_doc = _read_config_file(args.config)
        for key, value in file_doc.items():
            if key not in PipelineConfig.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = value
    for key in PipelineConfig.__dataclass_fields__:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag.split(",") if key in _CSV_LIST_KEYS else flag
    return PipelineConfig(**values)


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=False, help="input CSV path")
    parser.add_argument("--drop", help="comma-separated columns to drop "
                        "(default id,attack_cat)")
    parser.add_argument("--categorical", help="comma-separated categorical "
                        "columns (default proto,service,state)")
    parser.add_argument("--label", help="label column name (default label)")
    parser.add_argument("--test-fraction", dest="test_fraction", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--trees", type=int, help="forest size (default 100)")
    parser.add_argument("--max-depth", dest="max_depth", type=int)
    parser.add_argument("--max-iter", dest="max_iter", type=int,
                        help="logistic iteration cap (default 10000)")
    parser.add_argument("--penalty", choices=["none", "l1", "l2"])
    parser.add_argument("--lambda", dest="strength", type=float,
                        help="penalty strength (default 1/n_train)")
    parser.add_argument("--config", help="TOML or JSON config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowids",
        description="Intrusion-detection pipeline over labeled flow CSVs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train and persist one model")
    _add_pipeline_flags(p_train)
    p_train.add_argument("--model", choices=["logreg", "rf"])

    p_eval = sub.add_parser("evaluate", help="evaluate a persisted model")
    p_eval.add_argument("--model-file", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--manifest", help="split manifest restricting rows")
    p_eval.add_argument("--metrics-out", default="metrics.json")
    p_eval.add_argument("--strict-unknown", action="store_true",
                        help="error on unseen categories instead of zero blocks")

    p_report = sub.add_parser("report", help="render figures from metrics")
    p_report.add_argument("--model-file", required=True)
    p_report.add_argument("--metrics", required=True)
    p_report.add_argument("--out", required=True)

    p_all = sub.add_parser("run-all", help="train/evaluate/report both models")
    _add_pipeline_flags(p_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            config = _merge_config(args)
            if not config.data:
                parser.error("--data is required (flag or config file)")
            return cmd_train(config)
        if args.command == "evaluate":
            return cmd_evaluate(
                args.model_file, args.data, args.manifest,
                args.metrics_out, args.strict_unknown,
            )
        if args.command == "report":
            return cmd_report(args.model_file, args.metrics, args.out)
        if args.command == "run-all":
            config = _merge_config(args)
            if not config.data:
                parser.error("--data is required (flag or config file)")
            return cmd_run_all(config)
        parser.error(f"unknown command {args.command!r}")
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error [config] {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
