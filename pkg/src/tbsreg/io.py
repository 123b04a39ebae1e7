"""Dataset ingestion, chain persistence and summary serialization.

Chains persist as JSONL: a header record with a format version and the
config echo, then one record per retained draw.  Floats serialize as
shortest round-trip decimals so re-runs are byte-comparable.
"""

import csv
import json
from dataclasses import asdict

import numpy as np

from .model import DataError, Dataset, Variant
from .samplers import ChainOutput, McmcConfig

FORMAT_VERSION = 1


class IngestError(ValueError):
    pass


def ingest_csv(path, response_column, standardize_columns=()):
    """Read a rectangular numeric CSV with a header row into a Dataset.

    Rows with missing cells are dropped (count reported); the requested
    columns and the response are standardized to mean 0, SD 1.  Exactly-zero
    responses are rejected (after standardization, if any).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty CSV") from None
        rows = list(reader)
    if response_column not in header:
        raise IngestError(f"response column {response_column!r} not in header")
    n_cols = len(header)
    kept, dropped = [], 0
    for ri, row in enumerate(rows):
        if len(row) != n_cols:
            raise IngestError(f"row {ri + 2} has {len(row)} cells, expected {n_cols}")
        if any(cell.strip() == "" or cell.strip().upper() in ("NA", "NAN")
               for cell in row):
            dropped += 1
            continue
        parsed = []
        for ci, cell in enumerate(row):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise IngestError(
                    f"non-numeric cell at row {ri + 2}, column {header[ci]!r}: "
                    f"{cell!r}") from None
        kept.append(parsed)
    if len(kept) < 2:
        raise IngestError("fewer than two complete rows after dropping missing")
    arr = np.asarray(kept, dtype=float)
    y_idx = header.index(response_column)
    covariate_names = [h for h in header if h != response_column]
    y = arr[:, y_idx]
    X = np.delete(arr, y_idx, axis=1)

    means = np.zeros(X.shape[1])
    scales = np.ones(X.shape[1])
    for name in standardize_columns:
        if name == response_column:
            continue
        if name not in covariate_names:
            raise IngestError(f"standardize column {name!r} not in header")
        j = covariate_names.index(name)
        sd = float(np.std(X[:, j], ddof=1))
        if sd == 0.0:
            raise IngestError(f"column {name!r} is constant; cannot standardize")
        means[j] = float(np.mean(X[:, j]))
        scales[j] = sd
        X[:, j] = (X[:, j] - means[j]) / sd
    standardized = bool(standardize_columns)
    if response_column in standardize_columns:
        sd = float(np.std(y, ddof=1))
        if sd == 0.0:
            raise IngestError("response is constant; cannot standardize")
        y = (y - float(np.mean(y))) / sd

    zero = np.nonzero(y == 0.0)[0]
    if zero.size:
        raise IngestError(
            f"response is exactly zero at data row {zero[0] + 1}; jitter or "
            "drop such rows before ingestion")
    try:
        data = Dataset(X=X, y=y, standardized=standardized,
                       column_means=means, column_scales=scales)
    except DataError as exc:
        raise IngestError(str(exc)) from exc
    return data, {"dropped_rows": dropped, "covariates": covariate_names}


def _jsonify(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def write_chain_jsonl(chain, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = {
            "format_version": FORMAT_VERSION,
            "variant": chain.variant.value,
            "seed": chain.seed,
            "n_draws": chain.n_draws,
            "acceptance_rates": {k: _jsonify(v)
                                 for k, v in chain.acceptance_rates.items()},
            "config": {k: _jsonify(v) for k, v in asdict(chain.config).items()},
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for k in range(chain.n_draws):
            rec = {key: _jsonify(chain.draws[key][k]) for key in chain.draws}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_chain_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if header.get("format_version") != FORMAT_VERSION:
            raise IngestError(
                f"unsupported chain format {header.get('format_version')}")
        records = [json.loads(line) for line in fh if line.strip()]
    if not records:
        raise IngestError("chain file has no draws")
    draws = {}
    for key in records[0]:
        vals = [rec[key] for rec in records]
        if isinstance(vals[0], list):
            dtype = int if key in ("z", "zg") else float
            draws[key] = np.asarray(vals, dtype=dtype)
        else:
            draws[key] = np.asarray(vals, dtype=float)
    cfg = McmcConfig(**header["config"])
    return ChainOutput(variant=Variant(header["variant"]), draws=draws,
                       acceptance_rates=header["acceptance_rates"],
                       seed=header["seed"], config=cfg)


def write_json(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
