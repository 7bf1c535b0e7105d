"""CSV ingestion and design-matrix encoding.

Categoricals are one-hot encoded with the smallest level dropped as the
reference.  A week index is split into year (``ceil(week / 52)``) and
week-of-year (``(week - 1) % 52 + 1``) categoricals.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

__all__ = ["DataError", "DatasetSchema", "LoadReport", "EncodedDesign", "load_csv", "one_hot", "decode_names", "week_parts"]

DEFAULT_STORE_COLUMN = "iri_key"


class DataError(ValueError):
    """Bad or unusable input data."""


@dataclass(frozen=True)
class DatasetSchema:
    response: str
    numeric_features: tuple = ()
    categorical_features: tuple = ()
    promotion_column: Optional[str] = None
    week_column: Optional[str] = None
    log_transform: tuple = ()
    price_column: Optional[str] = None
    regular_price_column: Optional[str] = None
    store_column: Optional[str] = DEFAULT_STORE_COLUMN

    def __post_init__(self):
        for name in ("numeric_features", "categorical_features", "log_transform"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.response in self.feature_columns:
            raise DataError(f"response {self.response!r} is also listed as a feature")

    @property
    def feature_columns(self) -> tuple:
        cols = list(self.numeric_features) + list(self.categorical_features)
        cols += [c for c in (self.promotion_column, self.week_column) if c]
        return tuple(cols)

    @property
    def used_columns(self) -> tuple:
        cols = [self.response, *self.feature_columns]
        if self.regular_price_column:
            cols.append(self.regular_price_column)
        return tuple(dict.fromkeys(cols))

    @classmethod
    def from_json(cls, path) -> "DatasetSchema":
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise DataError(f"schema file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"schema file {path} is not valid JSON: {exc}") from exc
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise DataError(f"unknown schema keys: {sorted(unknown)}")
        if "response" not in raw:
            raise DataError("schema needs a 'response' entry")
        return cls(**raw)

    @classmethod
    def infer(cls, columns, response: str = "y") -> "DatasetSchema":
        """All non-response columns numeric, except the store identifier."""
        if response not in columns:
            raise DataError(f"response column {response!r} not in data")
        feats = [c for c in columns if c != response and c != DEFAULT_STORE_COLUMN]
        return cls(response=response, numeric_features=tuple(feats))

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass
class LoadReport:
    n_read: int
    n_missing: int
    n_nonpositive_log: int

    @property
    def n_kept(self) -> int:
        return self.n_read - self.n_missing - self.n_nonpositive_log


def load_csv(path, schema: DatasetSchema) -> tuple[pd.DataFrame, LoadReport]:
    """Read the used columns, drop incomplete rows and apply the log transforms."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    cat = set(schema.categorical_features)
    try:
        df = pd.read_csv(path, dtype={c: str for c in cat})
    except pd.errors.EmptyDataError as exc:
        raise DataError(f"{path} is empty") from exc
    missing = [c for c in schema.used_columns if c not in df.columns]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")
    df = df[list(schema.used_columns)]
    n_read = len(df)

    bad = df[[c for c in df.columns if c in cat]].isna().any(axis=1)
    num_cols = [c for c in df.columns if c not in cat]
    for c in num_cols:
        vals = pd.to_numeric(df[c], errors="coerce")
        df[c] = vals
        bad |= ~np.isfinite(vals.to_numpy(dtype=float))
    n_missing = int(bad.sum())
    df = df[~bad]

    nonpos = np.zeros(len(df), dtype=bool)
    for c in schema.log_transform:
        if c in df.columns:
            nonpos |= df[c].to_numpy(dtype=float) <= 0
    df = df[~nonpos].copy()
    for c in schema.log_transform:
        if c in df.columns:
            df[c] = np.log(df[c].to_numpy(dtype=float))
    report = LoadReport(n_read=n_read, n_missing=n_missing, n_nonpositive_log=int(nonpos.sum()))
    if report.n_missing:
        log.warning("dropped %d rows with missing or non-finite values", report.n_missing)
    if report.n_nonpositive_log:
        log.warning("dropped %d rows with non-positive values in log-transformed columns", report.n_nonpositive_log)
    if len(df) == 0:
        raise DataError(f"{path}: no usable rows")
    return df.reset_index(drop=True), report


def week_parts(week):
    """``(year, week_of_year)`` for a 1-based week index, 52 weeks per year."""
    week = np.asarray(week, dtype=int)
    return -(-week // 52), (week - 1) % 52 + 1


@dataclass
class EncodedDesign:
    matrix: np.ndarray
    column_names: list
    levels: dict  # variable -> all levels, reference first
    dropped_reference: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        return self.matrix[:, self.column_names.index(name)]


def _categoricals(df: pd.DataFrame, schema: DatasetSchema) -> dict:
    out = {c: df[c].astype(str).to_numpy() for c in schema.categorical_features}
    if schema.week_column:
        year, woy = week_parts(df[schema.week_column].to_numpy())
        out["year"] = year
        out["week_of_year"] = woy
    return out


def one_hot(
    df: pd.DataFrame,
    schema: DatasetSchema,
    levels: Optional[dict] = None,
    *,
    include_promotion: bool = True,
) -> EncodedDesign:
    """Numeric features, then (promotion), then reference-coded dummies.

    Pass the ``levels`` of a training encoding to encode new rows with the
    same columns; unseen levels then map to the reference.
    """
    numeric = list(schema.numeric_features)
    if include_promotion and schema.promotion_column:
        numeric.append(schema.promotion_column)
    blocks = [df[numeric].to_numpy(dtype=float)] if numeric else []
    names = list(numeric)
    cats = _categoricals(df, schema)
    fitted = levels is None
    levels = {} if levels is None else levels
    dropped = {}
    for var, vals in cats.items():
        if fitted:
            levs = sorted(set(vals.tolist()))
            if len(levs) < 2:
                warnings.warn(f"categorical {var!r} has a single level; dropped", stacklevel=2)
                continue
            levels[var] = levs
        if var not in levels:
            continue
        levs = levels[var]
        dropped[var] = levs[0]
        blocks.append(np.column_stack([(vals == lev).astype(float) for lev in levs[1:]]))
        names += [f"{var}={lev}" for lev in levs[1:]]
    matrix = np.hstack(blocks) if blocks else np.empty((len(df), 0))
    return EncodedDesign(matrix=matrix, column_names=names, levels=levels, dropped_reference=dropped)


def decode_names(column_names, dropped_reference: dict) -> dict:
    """Rebuild ``variable -> levels`` (reference first) from dummy column names."""
    out = {var: [ref] for var, ref in dropped_reference.items()}
    for name in column_names:
        if "=" not in name:
            continue
        var, lev = name.split("=", 1)
        ref = out.setdefault(var, [])
        if ref and isinstance(ref[0], (int, np.integer)):
            lev = int(lev)
        ref.append(lev)
    return out
