"""Cross-sectional panel pipeline: ingestion, synthetic generation, adjusted
prices, targets, features, daily normalization, ranked labels, calendar
subsampling, temporal split, and sequence windows.

Panel frames use internal column names (date, code, open, high, low, close,
volume, factor, supervised, target); the CSV schema on disk keeps the official
column names.  Dates are ISO strings throughout, so lexicographic order is
chronological.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError
from .seeding import stage_rng

log = logging.getLogger(__name__)

CSV_COLUMNS = [
    "Date",
    "SecuritiesCode",
    "Open",
    "High",
    "Low",
    "Close",
    "Volume",
    "AdjustmentFactor",
    "SupervisionFlag",
    "Target",
]

_CSV_TO_INTERNAL = {
    "Date": "date",
    "SecuritiesCode": "code",
    "Open": "open",
    "High": "high",
    "Low": "low",
    "Close": "close",
    "Volume": "volume",
    "AdjustmentFactor": "factor",
    "SupervisionFlag": "supervised",
    "Target": "target",
}

MOM_WINDOWS = (1, 2, 5, 10, 20)
VOL_WINDOWS = (5, 10, 20)
MEAN_WINDOWS = (5, 10, 20)

FEATURE_NAMES = (
    ["ret1"]
    + [f"mom{n}" for n in MOM_WINDOWS]
    + [f"vol{n}" for n in VOL_WINDOWS]
    + ["dv"]
    + [f"dv_mean{n}" for n in MEAN_WINDOWS]
    + [f"vol_mean{n}" for n in MEAN_WINDOWS]
    + ["log_volume", "log_dv"]
)

BASELINE_FEATURES = ("mom5", "mom20", "vol20")

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


# ---------------------------------------------------------------------------
# synthetic data


@dataclass(frozen=True)
class SynthConfig:
    n_stocks: int = 50
    n_days: int = 300
    rho: float = 0.5  # strength of the persistent per-stock drift
    start: str = "2019-01-04"
    noise_vol: float = 0.02
    drift_scale: float = 0.016
    split_rate: float = 0.002
    supervision_rate: float = 0.001


def generate_synthetic(config: SynthConfig, seed: int) -> pd.DataFrame:
    """Geometric random walks with a hidden per-stock drift.

    Each stock k draws drift mu_k = rho * drift_scale * g_k once; daily log
    returns are mu_k + noise.  With rho > 0 past returns predict future
    returns cross-sectionally, so momentum features carry signal; rho = 0
    leaves pure noise.  Sparse adjustment events (factor 0.5 or 2.0) divide
    the raw close so that the cumulative-factor adjustment reconstructs the
    smooth series, and the official-style Target column is the raw-close
    two-day-ahead return.
    """
    if config.n_stocks < 1 or config.n_days < 3:
        raise DataError(f"need at least 1 stock and 3 days, got {config}")
    rng = stage_rng(seed, "synth")
    dates = [d.strftime("%Y-%m-%d") for d in pd.bdate_range(config.start, periods=config.n_days)]
    codes = 1301 + 4 * np.arange(config.n_stocks)

    drift = config.rho * config.drift_scale * rng.standard_normal(config.n_stocks)
    log_ret = drift[:, None] + config.noise_vol * rng.standard_normal((config.n_stocks, config.n_days))
    base = rng.uniform(50.0, 500.0, config.n_stocks)
    econ = base[:, None] * np.exp(np.cumsum(log_ret, axis=1))

    events = rng.random((config.n_stocks, config.n_days)) < config.split_rate
    events[:, 0] = False
    factor = np.where(events, np.where(rng.random((config.n_stocks, config.n_days)) < 0.5, 0.5, 2.0), 1.0)
    cum_factor = np.cumprod(factor, axis=1)
    close = econ / cum_factor

    spread = 0.002 * rng.standard_normal((config.n_stocks, config.n_days))
    open_ = close * (1.0 + spread)
    hi_pad = np.abs(0.003 * rng.standard_normal((config.n_stocks, config.n_days)))
    lo_pad = np.abs(0.003 * rng.standard_normal((config.n_stocks, config.n_days)))
    high = np.maximum(open_, close) * (1.0 + hi_pad)
    low = np.minimum(open_, close) * (1.0 - lo_pad)

    vol_base = np.exp(rng.normal(13.0, 1.0, config.n_stocks))
    volume = np.maximum(
        1.0, np.round(vol_base[:, None] * np.exp(rng.normal(0.0, 0.5, (config.n_stocks, config.n_days))))
    )
    supervised = rng.random((config.n_stocks, config.n_days)) < config.supervision_rate

    target = np.full_like(close, np.nan)
    target[:, :-2] = (close[:, 2:] - close[:, 1:-1]) / close[:, 1:-1]

    frame = pd.DataFrame(
        {
            "date": np.tile(dates, config.n_stocks),
            "code": np.repeat(codes, config.n_days),
            "open": open_.ravel(),
            "high": high.ravel(),
            "low": low.ravel(),
            "close": close.ravel(),
            "volume": volume.ravel(),
            "factor": factor.ravel(),
            "supervised": supervised.ravel(),
            "target": target.ravel(),
        }
    )
    return frame.sort_values(["date", "code"], kind="stable").reset_index(drop=True)


def write_panel_csv(panel: pd.DataFrame, path) -> None:
    """Emit the official CSV schema; absent targets become empty fields."""
    out = pd.DataFrame(
        {
            "Date": panel["date"],
            "SecuritiesCode": panel["code"],
            "Open": panel["open"],
            "High": panel["high"],
            "Low": panel["low"],
            "Close": panel["close"],
            "Volume": panel["volume"].astype(np.int64),
            "AdjustmentFactor": panel["factor"],
            "SupervisionFlag": np.where(panel["supervised"], "True", "False"),
            "Target": [("" if not math.isfinite(t) else repr(float(t))) for t in panel["target"]],
        }
    )
    out.to_csv(path, index=False)


# ---------------------------------------------------------------------------
# ingestion


def _locate_bad(raw: pd.Series, ok: np.ndarray, path, column: str) -> None:
    if ok.all():
        return
    row = int(np.flatnonzero(~ok)[0])
    # +2: 1-based line numbers and one header line
    raise DataError(f"{path}:{row + 2}: column {column}: cannot parse value {raw.iloc[row]!r}")


def _parse_float(raw: pd.Series, path, column: str, allow_empty: bool) -> np.ndarray:
    values = pd.to_numeric(raw.str.strip(), errors="coerce")
    empty = raw.str.strip() == ""
    ok = values.notna() | (empty if allow_empty else False)
    _locate_bad(raw, ok.to_numpy(), path, column)
    return values.to_numpy(dtype=np.float64)


def load_panel(path, stock_list_path=None) -> pd.DataFrame:
    """Read and validate the official CSV schema into an internal frame.

    When a stock list is given, only securities with Universe0 == True are
    retained.  Bad values fail with file:line locators; duplicate
    (date, code) rows are rejected.
    """
    raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [c for c in CSV_COLUMNS if c not in raw.columns]
    if missing:
        raise DataError(f"{path}: missing required columns {missing}")
    extra = [c for c in raw.columns if c not in CSV_COLUMNS]
    if extra:
        raise DataError(f"{path}: unexpected columns {extra}")

    _locate_bad(raw["Date"], raw["Date"].str.match(_DATE_RE).to_numpy(), path, "Date")
    code = pd.to_numeric(raw["SecuritiesCode"].str.strip(), errors="coerce")
    _locate_bad(raw["SecuritiesCode"], (code.notna() & (code == code.round())).to_numpy(), path, "SecuritiesCode")
    flag_raw = raw["SupervisionFlag"].str.strip()
    _locate_bad(raw["SupervisionFlag"], flag_raw.isin(["True", "False"]).to_numpy(), path, "SupervisionFlag")

    panel = pd.DataFrame(
        {
            "date": raw["Date"],
            "code": code.to_numpy(dtype=np.int64),
            "open": _parse_float(raw["Open"], path, "Open", allow_empty=True),
            "high": _parse_float(raw["High"], path, "High", allow_empty=True),
            "low": _parse_float(raw["Low"], path, "Low", allow_empty=True),
            "close": _parse_float(raw["Close"], path, "Close", allow_empty=False),
            "volume": _parse_float(raw["Volume"], path, "Volume", allow_empty=False),
            "factor": _parse_float(raw["AdjustmentFactor"], path, "AdjustmentFactor", allow_empty=False),
            "supervised": (flag_raw == "True").to_numpy(),
            "target": _parse_float(raw["Target"], path, "Target", allow_empty=True),
        }
    )
    dup = panel.duplicated(subset=["date", "code"])
    if dup.any():
        row = int(np.flatnonzero(dup.to_numpy())[0])
        raise DataError(f"{path}:{row + 2}: duplicate (date, code) row")

    if stock_list_path is not None:
        stocks = pd.read_csv(stock_list_path, dtype=str, keep_default_na=False)
        for column in ("SecuritiesCode", "Universe0"):
            if column not in stocks.columns:
                raise DataError(f"{stock_list_path}: missing required column {column}")
        in_universe = stocks.loc[stocks["Universe0"].str.strip() == "True", "SecuritiesCode"]
        keep = set(pd.to_numeric(in_universe, errors="coerce").dropna().astype(np.int64))
        panel = panel[panel["code"].isin(keep)]

    return panel.sort_values(["date", "code"], kind="stable").reset_index(drop=True)


# ---------------------------------------------------------------------------
# per-security transforms


def adjust_close(panel: pd.DataFrame) -> pd.DataFrame:
    """adj_close = close * cumulative product of past factors (inclusive)."""
    panel = panel.sort_values(["code", "date"], kind="stable").copy()
    panel["adj_close"] = panel["close"] * panel.groupby("code")["factor"].cumprod()
    return panel.sort_values(["date", "code"], kind="stable").reset_index(drop=True)


def compute_target(panel: pd.DataFrame, validate: bool = False, tol: float = 1e-6) -> pd.DataFrame:
    """Raw-close forward return: (close[t+2] - close[t+1]) / close[t+1].

    Undefined on each security's last two dates and wherever close[t+1] is
    not positive.  With validate=True the recomputation is compared against
    any targets already present (tolerance `tol`); otherwise existing targets
    are kept verbatim and only missing ones are filled.
    """
    panel = panel.sort_values(["code", "date"], kind="stable").copy()
    grouped = panel.groupby("code")["close"]
    c1 = grouped.shift(-1)
    c2 = grouped.shift(-2)
    with np.errstate(invalid="ignore", divide="ignore"):
        computed = (c2 - c1) / c1
    computed = computed.where(c1 > 0)

    if "target" in panel.columns and panel["target"].notna().any():
        both = panel["target"].notna() & computed.notna()
        if validate:
            diff = (panel.loc[both, "target"] - computed[both]).abs()
            if (diff > tol).any():
                bad = diff.idxmax()
                raise DataError(
                    f"target mismatch at code {panel.loc[bad, 'code']} date "
                    f"{panel.loc[bad, 'date']}: file {panel.loc[bad, 'target']!r} "
                    f"vs computed {computed[bad]!r}"
                )
        panel["target"] = panel["target"].where(panel["target"].notna(), computed)
    else:
        panel["target"] = computed
    return panel.sort_values(["date", "code"], kind="stable").reset_index(drop=True)


def compute_features(panel: pd.DataFrame) -> pd.DataFrame:
    """Raw per-security features on the panel's own calendar.

    Momentum and volatility come from adj_close; dollar volume uses the raw
    close.  Rolling windows require full length, so early rows hold NaN.
    """
    if "adj_close" not in panel.columns:
        raise DataError("run adjust_close before compute_features")
    panel = panel.sort_values(["code", "date"], kind="stable")
    g = panel.groupby("code", sort=False)
    out = pd.DataFrame({"date": panel["date"], "code": panel["code"]})

    adj = panel["adj_close"]
    ret1 = g["adj_close"].pct_change()
    out["ret1"] = ret1
    for n in MOM_WINDOWS:
        out[f"mom{n}"] = adj / g["adj_close"].shift(n) - 1.0
    ret_by_code = ret1.groupby(panel["code"], sort=False)
    for n in VOL_WINDOWS:
        out[f"vol{n}"] = ret_by_code.rolling(n, min_periods=n).std(ddof=1).reset_index(level=0, drop=True)
    dv = panel["close"] * panel["volume"]
    out["dv"] = dv
    dv_by_code = dv.groupby(panel["code"], sort=False)
    vol_by_code = panel.groupby("code", sort=False)["volume"]
    for n in MEAN_WINDOWS:
        out[f"dv_mean{n}"] = dv_by_code.rolling(n, min_periods=n).mean().reset_index(level=0, drop=True)
        out[f"vol_mean{n}"] = vol_by_code.rolling(n, min_periods=n).mean().reset_index(level=0, drop=True)
    out["log_volume"] = np.log(panel["volume"] + 1.0)
    out["log_dv"] = np.log(dv + 1.0)

    return out[["date", "code"] + FEATURE_NAMES].sort_values(["date", "code"], kind="stable").reset_index(drop=True)


def winsorize_zscore_daily(features: pd.DataFrame) -> tuple[pd.DataFrame, int]:
    """Per (date, feature): clamp to [P1, P99] (linear-interpolated
    percentiles) then z-score with the population standard deviation.

    Zero spread maps to zeros.  Groups with fewer than 3 present values are
    set absent and counted; callers exclude those rows downstream.
    """
    out = features.copy()
    skipped = 0
    values = out[list(FEATURE_NAMES)].to_numpy(dtype=np.float64)
    dates = out["date"].to_numpy()
    order = np.argsort(dates, kind="stable")
    boundaries = np.flatnonzero(np.r_[True, dates[order][1:] != dates[order][:-1], True])
    for b0, b1 in zip(boundaries[:-1], boundaries[1:]):
        rows = order[b0:b1]
        block = values[rows]
        for f in range(block.shape[1]):
            col = block[:, f]
            present = np.isfinite(col)
            n = int(present.sum())
            if n < 3:
                if n:
                    skipped += 1
                col[:] = np.nan
                continue
            lo, hi = np.percentile(col[present], [1.0, 99.0])
            clipped = np.clip(col, lo, hi)
            mu = clipped[present].mean()
            sigma = clipped[present].std()
            col[:] = 0.0 if sigma == 0 else (clipped - mu) / sigma
            col[~present] = np.nan
        values[rows] = block
    if skipped:
        log.warning("normalization skipped %d (date, feature) groups with <3 values", skipped)
    out[list(FEATURE_NAMES)] = values
    return out, skipped


def make_labels(panel: pd.DataFrame, p: int) -> pd.DataFrame:
    """Rank targets per date: top p long (label 1), bottom p short (label 0),
    middle excluded.  Ties break by ascending code; days with fewer than 2p
    ranked rows shrink p to floor(n/2)."""
    if p < 1:
        raise DataError(f"p must be positive, got {p}")
    ranked = panel[panel["target"].notna()].sort_values(
        ["date", "target", "code"], ascending=[True, False, True], kind="stable"
    )
    frames = []
    for date, group in ranked.groupby("date", sort=True):
        n = len(group)
        p_day = min(p, n // 2)
        if p_day == 0:
            continue
        top = group.iloc[:p_day]
        bottom = group.iloc[n - p_day :]
        frames.append(pd.DataFrame({"date": top["date"], "code": top["code"], "label": 1.0}))
        frames.append(pd.DataFrame({"date": bottom["date"], "code": bottom["code"], "label": 0.0}))
    if not frames:
        return pd.DataFrame({"date": pd.Series(dtype=str), "code": pd.Series(dtype=np.int64), "label": pd.Series(dtype=np.float64)})
    return (
        pd.concat(frames)
        .sort_values(["date", "code"], kind="stable")
        .reset_index(drop=True)
    )


# ---------------------------------------------------------------------------
# calendar sampling and splitting


def stride_sample(dates: list[str], k: int) -> list[str]:
    """Every k-th trading date, starting at the first."""
    if k < 1:
        raise DataError(f"stride must be >= 1, got {k}")
    ordered = sorted(set(dates))
    return ordered[::k]


def year_fraction_sample(dates: list[str], alpha: float, seed: int) -> list[str]:
    """Uniform without-replacement sample of round(alpha * n) dates per
    calendar year (round half up), returned sorted."""
    if not 0 < alpha <= 1:
        raise DataError(f"alpha must be in (0, 1], got {alpha}")
    rng = stage_rng(seed, "year-sample")
    ordered = sorted(set(dates))
    kept: list[str] = []
    by_year: dict[str, list[str]] = {}
    for d in ordered:
        by_year.setdefault(d[:4], []).append(d)
    for year in sorted(by_year):
        pool = by_year[year]
        take = int(math.floor(alpha * len(pool) + 0.5))
        take = min(take, len(pool))
        if take:
            picks = rng.choice(len(pool), size=take, replace=False)
            kept.extend(pool[i] for i in sorted(picks))
    return kept


def temporal_split(dates: list[str]) -> tuple[list[str], list[str]]:
    """First ceil(0.8 n) dates train, remainder test; needs n >= 5."""
    ordered = sorted(set(dates))
    n = len(ordered)
    if n < 5:
        raise DataError(f"temporal split needs at least 5 dates, got {n}")
    cut = math.ceil(0.8 * n)
    return ordered[:cut], ordered[cut:]


# ---------------------------------------------------------------------------
# sample sets


@dataclass
class SampleSet:
    """Aligned per-sample arrays; `flat` is the final window row."""

    split: str
    seq_len: int
    feature_names: list[str]
    dates: np.ndarray  # (N,) ISO strings
    codes: np.ndarray  # (N,) int64
    sequences: np.ndarray  # (N, seq_len, F)
    labels: np.ndarray  # (N,) 0/1 or NaN
    targets: np.ndarray = field(default=None)  # (N,) forward returns or NaN
    tradable: np.ndarray = field(default=None)  # (N,) bool
    baseline: np.ndarray = field(default=None)  # (N, 3) raw mom5, mom20, vol20

    def __post_init__(self):
        n = len(self.dates)
        if self.targets is None:
            self.targets = np.full(n, np.nan)
        if self.tradable is None:
            self.tradable = np.ones(n, dtype=bool)
        if self.baseline is None:
            self.baseline = np.full((n, 3), np.nan)

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def flat(self) -> np.ndarray:
        return self.sequences[:, -1, :]


def build_sequences(features: pd.DataFrame, rows: pd.DataFrame, seq_len: int, split: str = "train") -> SampleSet:
    """Assemble windows of seq_len consecutive calendar rows ending at each
    requested (date, code).

    `features` must already be normalized; consecutive means adjacent in the
    feature frame's own (possibly subsampled) sorted date calendar.  Rows
    whose window is incomplete or touches an absent feature are dropped.
    Extra columns of `rows` (label, target, tradable, baseline values) are
    carried through.
    """
    if seq_len < 1:
        raise DataError(f"seq_len must be >= 1, got {seq_len}")
    calendar = np.array(sorted(features["date"].unique()))
    pos_of = {d: i for i, d in enumerate(calendar)}
    n_dates, n_feat = len(calendar), len(FEATURE_NAMES)

    grids: dict[int, np.ndarray] = {}
    valid_from: dict[int, np.ndarray] = {}
    for code, group in features.groupby("code", sort=True):
        grid = np.full((n_dates, n_feat), np.nan)
        idx = group["date"].map(pos_of).to_numpy()
        grid[idx] = group[list(FEATURE_NAMES)].to_numpy(dtype=np.float64)
        ok = np.isfinite(grid).all(axis=1)
        # run[i] = length of the valid streak ending at i
        run = np.zeros(n_dates, dtype=np.int64)
        streak = 0
        for i in range(n_dates):
            streak = streak + 1 if ok[i] else 0
            run[i] = streak
        grids[code] = grid
        valid_from[code] = run

    picked_rows = []
    sequences = []
    for row in rows.itertuples(index=False):
        code = row.code
        if code not in grids or row.date not in pos_of:
            continue
        t = pos_of[row.date]
        if valid_from[code][t] < seq_len:
            continue
        sequences.append(grids[code][t - seq_len + 1 : t + 1])
        picked_rows.append(row)

    n = len(picked_rows)
    get = lambda name, default: np.array(
        [getattr(r, name, default) for r in picked_rows]
    ) if n else np.empty(0)
    seq_arr = np.stack(sequences) if n else np.empty((0, seq_len, n_feat))
    baseline = (
        np.stack([[getattr(r, b, np.nan) for b in BASELINE_FEATURES] for r in picked_rows])
        if n
        else np.empty((0, 3))
    )
    return SampleSet(
        split=split,
        seq_len=seq_len,
        feature_names=list(FEATURE_NAMES),
        dates=np.array([r.date for r in picked_rows], dtype="U10") if n else np.empty(0, dtype="U10"),
        codes=get("code", 0).astype(np.int64) if n else np.empty(0, dtype=np.int64),
        sequences=seq_arr,
        labels=get("label", np.nan).astype(np.float64) if n else np.empty(0),
        targets=get("target", np.nan).astype(np.float64) if n else np.empty(0),
        tradable=get("tradable", True).astype(bool) if n else np.empty(0, dtype=bool),
        baseline=baseline,
    )


def save_samples(path, samples: SampleSet) -> None:
    meta = {
        "split": samples.split,
        "seq_len": samples.seq_len,
        "feature_names": samples.feature_names,
    }
    with open(path, "wb") as fh:
        np.savez(
            fh,
            meta=json.dumps(meta, sort_keys=True),
            dates=samples.dates,
            codes=samples.codes,
            sequences=samples.sequences,
            labels=samples.labels,
            targets=samples.targets,
            tradable=samples.tradable,
            baseline=samples.baseline,
        )


def load_samples(path) -> SampleSet:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        return SampleSet(
            split=meta["split"],
            seq_len=int(meta["seq_len"]),
            feature_names=list(meta["feature_names"]),
            dates=data["dates"],
            codes=data["codes"],
            sequences=data["sequences"],
            labels=data["labels"],
            targets=data["targets"],
            tradable=data["tradable"],
            baseline=data["baseline"],
        )


# ---------------------------------------------------------------------------
# end-to-end preparation


def prepare(
    panel: pd.DataFrame,
    p: int,
    seq_len: int,
    stride: int | None = None,
    fraction: float | None = None,
    seed: int = 0,
) -> tuple[SampleSet, SampleSet, dict]:
    """Subsample the calendar, engineer features, label, split, and window.

    Targets already present in the panel (official values computed on the full
    calendar) are kept; absent ones are recomputed on the active calendar.
    Returns (train samples, test samples, summary stats).  Train samples are
    the labeled rows on train dates; test samples are every row with a target
    on test dates, carrying tradability flags and the raw baseline features.
    """
    if stride is not None and fraction is not None:
        raise DataError("choose stride or fraction subsampling, not both")
    all_dates = sorted(panel["date"].unique())
    if stride is not None:
        kept_dates = stride_sample(all_dates, stride)
    elif fraction is not None:
        kept_dates = year_fraction_sample(all_dates, fraction, seed)
    else:
        kept_dates = all_dates
    panel = panel[panel["date"].isin(set(kept_dates))]

    panel = adjust_close(panel)
    panel = compute_target(panel)
    raw_features = compute_features(panel)
    norm_features, skipped = winsorize_zscore_daily(raw_features)
    labels = make_labels(panel, p)
    train_dates, test_dates = temporal_split(kept_dates)
    train_date_set, test_date_set = set(train_dates), set(test_dates)

    train_rows = labels[labels["date"].isin(train_date_set)]
    train_set = build_sequences(norm_features, train_rows, seq_len, split="train")

    test_rows = panel.loc[
        panel["date"].isin(test_date_set) & panel["target"].notna(),
        ["date", "code", "target", "close", "volume", "supervised"],
    ].copy()
    test_rows["tradable"] = (
        (test_rows["close"] > 0) & (test_rows["volume"] > 0) & ~test_rows["supervised"]
    )
    test_rows = test_rows.merge(labels, on=["date", "code"], how="left")
    test_rows = test_rows.merge(
        raw_features[["date", "code", *BASELINE_FEATURES]], on=["date", "code"], how="left"
    )
    test_set = build_sequences(norm_features, test_rows, seq_len, split="test")

    stats = {
        "n_dates_total": len(all_dates),
        "n_dates_kept": len(kept_dates),
        "n_train_days": len(train_dates),
        "n_test_days": len(test_dates),
        "n_train_samples": len(train_set),
        "n_test_samples": len(test_set),
        "n_long_labels": int((train_set.labels == 1).sum()),
        "n_short_labels": int((train_set.labels == 0).sum()),
        "skipped_norm_groups": skipped,
    }
    return train_set, test_set, stats
