"""Linear SoH model over the six circuit-parameter features.

Features are z-scored with training statistics before ordinary least
squares; the scaler lives inside the trained model so prediction takes
raw parameters.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ecm import FEATURE_NAMES, EcmParams
from .errors import RankError, SizeError, UnknownCellError, VersionError

MODEL_SCHEMA_VERSION = 1
N_FEATURES = 6


@dataclass(frozen=True)
class FeatureRow:
    """One training example: circuit parameters plus labels/conditions."""

    params: EcmParams
    soh_frac: float
    soc_frac: Optional[float] = None
    temp_c: Optional[float] = None
    cell_id: str = ""

    def __post_init__(self):
        if not 0.0 < self.soh_frac <= 1.2:
            raise ValueError(f"soh_frac must be in (0, 1.2], got {self.soh_frac}")
        if self.soc_frac is not None and not 0.0 <= self.soc_frac <= 1.0:
            raise ValueError(f"soc_frac must be in [0, 1], got {self.soc_frac}")


@dataclass(frozen=True)
class Metrics:
    """R^2 plus MAE/RMSE in SoH percentage points; r2 is NaN for a
    constant-label evaluation set."""

    r2: float
    mae_pct: float
    rmse_pct: float
    n: int

    def as_dict(self) -> dict:
        return {"r2": self.r2, "mae_pct": self.mae_pct, "rmse_pct": self.rmse_pct, "n": self.n}


@dataclass(frozen=True)
class SohModel:
    beta: np.ndarray
    beta0: float
    feat_mean: np.ndarray
    feat_std: np.ndarray
    train_metrics: Metrics = field(compare=False)

    def __post_init__(self):
        for name in ("beta", "feat_mean", "feat_std"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.beta.shape != (N_FEATURES,):
            raise ValueError(f"beta must have {N_FEATURES} coefficients, got {self.beta.shape}")
        if np.any(self.feat_std <= 0):
            raise ValueError("feat_std components must be positive")


def _design(rows: Sequence[FeatureRow]) -> tuple[np.ndarray, np.ndarray]:
    x = np.array([r.params.as_features() for r in rows], dtype=np.float64)
    y = np.array([r.soh_frac for r in rows], dtype=np.float64)
    return x, y


def train(rows: Sequence[FeatureRow]) -> SohModel:
    """Standardize features and solve ordinary least squares.

    Raises SizeError below 7 rows and RankError for constant feature
    columns or a rank-deficient design matrix.
    """
    if len(rows) < N_FEATURES + 1:
        raise SizeError(f"need at least {N_FEATURES + 1} rows, got {len(rows)}")
    x, y = _design(rows)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    bad = np.flatnonzero(std <= 0)
    if bad.size:
        names = ", ".join(FEATURE_NAMES[j] for j in bad)
        raise RankError(f"constant feature column(s): {names}")
    xs = (x - mean) / std
    a = np.column_stack([xs, np.ones(len(rows))])
    coef, _, rank, _ = np.linalg.lstsq(a, y, rcond=None)
    if rank < N_FEATURES + 1:
        raise RankError(f"standardized design matrix has rank {rank} < {N_FEATURES + 1}")
    beta, beta0 = coef[:N_FEATURES], float(coef[N_FEATURES])
    model = SohModel(
        beta=beta,
        beta0=beta0,
        feat_mean=mean,
        feat_std=std,
        train_metrics=Metrics(r2=math.nan, mae_pct=math.nan, rmse_pct=math.nan, n=len(rows)),
    )
    return SohModel(
        beta=beta,
        beta0=beta0,
        feat_mean=mean,
        feat_std=std,
        train_metrics=evaluate(model, rows),
    )


def predict(m: SohModel, p: EcmParams) -> float:
    """Raw SoH estimate as a fraction; deliberately unclamped."""
    xs = (np.asarray(p.as_features()) - m.feat_mean) / m.feat_std
    return float(m.beta @ xs + m.beta0)


def evaluate(m: SohModel, rows: Sequence[FeatureRow]) -> Metrics:
    if len(rows) < 1:
        raise SizeError("need at least 1 row to evaluate")
    _, y = _design(rows)
    yhat = np.array([predict(m, r.params) for r in rows])
    err = yhat - y
    mae = float(np.mean(np.abs(err))) * 100.0
    rmse = float(np.sqrt(np.mean(err**2))) * 100.0
    ss_res = float(np.sum(err**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # constant labels: SS_tot is zero up to rounding of the repeated value
    r2 = math.nan if np.all(y == y[0]) else 1.0 - ss_res / ss_tot
    return Metrics(r2=r2, mae_pct=mae, rmse_pct=rmse, n=len(rows))


def split(rows: Sequence[FeatureRow], train_frac: float, seed: int):
    """Seeded-shuffle split; both parts are guaranteed non-empty."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    if len(rows) < 2:
        raise SizeError(f"need at least 2 rows to split, got {len(rows)}")
    idx = list(range(len(rows)))
    random.Random(seed).shuffle(idx)
    n_train = int(round(train_frac * len(rows)))
    if n_train == 0 or n_train == len(rows):
        raise SizeError(f"train_frac {train_frac} leaves an empty part for {len(rows)} rows")
    train_rows = [rows[i] for i in idx[:n_train]]
    test_rows = [rows[i] for i in idx[n_train:]]
    return train_rows, test_rows


def split_by_cell(rows: Sequence[FeatureRow], test_cell_ids: Sequence[str]):
    """Hold out every row of the named cells for testing."""
    if not test_cell_ids:
        raise ValueError("test_cell_ids must be non-empty")
    present = {r.cell_id for r in rows}
    missing = sorted(set(test_cell_ids) - present)
    if missing:
        raise UnknownCellError(f"cell id(s) not in rows: {', '.join(missing)}")
    test_set = set(test_cell_ids)
    train_rows = [r for r in rows if r.cell_id not in test_set]
    test_rows = [r for r in rows if r.cell_id in test_set]
    if not train_rows:
        raise SizeError("split leaves no training rows")
    return train_rows, test_rows


def model_to_dict(m: SohModel) -> dict:
    tm = m.train_metrics
    return {
        "beta": [float(b) for b in m.beta],
        "beta0": m.beta0,
        "feat_mean": [float(v) for v in m.feat_mean],
        "feat_std": [float(v) for v in m.feat_std],
        "feature_order": list(FEATURE_NAMES),
        "train_metrics": {
            "r2": None if math.isnan(tm.r2) else tm.r2,
            "mae_pct": tm.mae_pct,
            "rmse_pct": tm.rmse_pct,
            "n": tm.n,
        },
        "schema_version": MODEL_SCHEMA_VERSION,
    }


def model_from_dict(d: dict) -> SohModel:
    version = d.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise VersionError(f"unknown model schema_version {version!r}")
    if d.get("feature_order") != list(FEATURE_NAMES):
        raise VersionError(f"unexpected feature_order {d.get('feature_order')!r}")
    tm = d["train_metrics"]
    metrics = Metrics(
        r2=math.nan if tm["r2"] is None else tm["r2"],
        mae_pct=tm["mae_pct"],
        rmse_pct=tm["rmse_pct"],
        n=tm["n"],
    )
    return SohModel(
        beta=d["beta"],
        beta0=float(d["beta0"]),
        feat_mean=d["feat_mean"],
        feat_std=d["feat_std"],
        train_metrics=metrics,
    )


def save_model(m: SohModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(m), fh, indent=2)


def load_model(path) -> SohModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
