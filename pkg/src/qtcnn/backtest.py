"""Long-short evaluation: daily score ranking, spread returns, annualized
Sharpe with a bootstrap confidence interval, and a plain-text report format
that round-trips losslessly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateSeriesError
from .seeding import stage_rng

TRADING_DAYS_PER_YEAR = 252


def standardize_scores(scores: np.ndarray) -> np.ndarray:
    """Z-score one day's scores with the population standard deviation;
    a spread-free day maps to all zeros."""
    scores = np.asarray(scores, dtype=np.float64)
    sigma = scores.std()
    if sigma == 0:
        return np.zeros_like(scores)
    return (scores - scores.mean()) / sigma


def select_portfolios(scores: np.ndarray, codes: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays of the k long (highest score) and k short (lowest score)
    positions, ties broken by ascending code.  k shrinks to floor(n/2) on
    thin days; a day that cannot fill both legs returns empty arrays.
    """
    if k < 1:
        raise DataError(f"k must be positive, got {k}")
    scores = np.asarray(scores, dtype=np.float64)
    codes = np.asarray(codes)
    n = len(scores)
    k_day = min(k, n // 2)
    if k_day == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    order = np.lexsort((codes, -scores))  # primary: score descending
    return order[:k_day], order[n - k_day :]


def long_short_returns(
    dates: np.ndarray,
    codes: np.ndarray,
    scores: np.ndarray,
    targets: np.ndarray,
    tradable: np.ndarray,
    k: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-day spread: mean target of the long leg minus the short leg.

    Only tradable rows with finite targets participate; days that cannot
    fill both legs are dropped.  Returns (day labels, spread returns) in
    date order.
    """
    dates = np.asarray(dates)
    keep = np.asarray(tradable, dtype=bool) & np.isfinite(targets)
    out_dates, out_returns = [], []
    for day in np.unique(dates):
        rows = np.flatnonzero((dates == day) & keep)
        if rows.size < 2:
            continue
        z = standardize_scores(np.asarray(scores, dtype=np.float64)[rows])
        long_idx, short_idx = select_portfolios(z, np.asarray(codes)[rows], k)
        if long_idx.size == 0:
            continue
        day_targets = np.asarray(targets, dtype=np.float64)[rows]
        out_dates.append(str(day))
        out_returns.append(day_targets[long_idx].mean() - day_targets[short_idx].mean())
    return np.array(out_dates, dtype="U10"), np.array(out_returns, dtype=np.float64)


def sharpe_ratio(returns: np.ndarray, periods_per_year: int = TRADING_DAYS_PER_YEAR) -> float:
    """Annualized mean over sample (ddof=1) standard deviation."""
    returns = np.asarray(returns, dtype=np.float64)
    if returns.size < 2:
        raise DegenerateSeriesError(f"need at least 2 returns, got {returns.size}")
    sigma = returns.std(ddof=1)
    if sigma == 0:
        raise DegenerateSeriesError("zero-variance return series has no Sharpe ratio")
    return float(np.sqrt(periods_per_year) * returns.mean() / sigma)


def bootstrap_ci(returns: np.ndarray, n_boot: int = 1000, seed: int = 0) -> tuple[float, float, float]:
    """Normal-approximation CI from an iid day-resampling bootstrap.

    Degenerate resamples (zero variance) contribute Sharpe 0 rather than
    being redrawn, keeping the procedure deterministic.  Returns
    (sharpe, ci_low, ci_high) with ci = sharpe +/- 1.96 * se.
    """
    returns = np.asarray(returns, dtype=np.float64)
    point = sharpe_ratio(returns)
    rng = stage_rng(seed, "bootstrap")
    n = returns.size
    sharpes = np.empty(n_boot)
    for b in range(n_boot):
        sample = returns[rng.integers(0, n, size=n)]
        sigma = sample.std(ddof=1)
        sharpes[b] = 0.0 if sigma == 0 else np.sqrt(TRADING_DAYS_PER_YEAR) * sample.mean() / sigma
    se = float(sharpes.std())
    return point, point - 1.96 * se, point + 1.96 * se


@dataclass(frozen=True)
class BacktestReport:
    model: str
    k: int
    seed: int
    n_days: int
    sharpe: float
    ci_low: float
    ci_high: float
    config_fingerprint: str
    dates: tuple[str, ...]
    returns: tuple[float, ...]


def run_backtest(
    samples,
    scores: np.ndarray,
    k: int,
    model: str,
    seed: int,
    config_fingerprint: str,
    n_boot: int = 1000,
) -> BacktestReport:
    """Rank -> trade -> aggregate one score vector over a test sample set."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != samples.dates.shape:
        raise DataError(f"scores shape {scores.shape} does not match {samples.dates.shape} samples")
    dates, returns = long_short_returns(
        samples.dates, samples.codes, scores, samples.targets, samples.tradable, k
    )
    if returns.size == 0:
        raise DegenerateSeriesError("no tradable days survived portfolio construction")
    sharpe, lo, hi = bootstrap_ci(returns, n_boot=n_boot, seed=seed)
    return BacktestReport(
        model=model,
        k=k,
        seed=seed,
        n_days=int(returns.size),
        sharpe=sharpe,
        ci_low=lo,
        ci_high=hi,
        config_fingerprint=config_fingerprint,
        dates=tuple(dates.tolist()),
        returns=tuple(float(r) for r in returns),
    )


def format_report(report: BacktestReport) -> str:
    """Stable text rendering: header fields then a date,return table.  Floats
    use repr so parsing the text reproduces the exact values; nothing in the
    output depends on wall-clock time."""
    lines = [
        f"model={report.model}",
        f"k={report.k}",
        f"seed={report.seed}",
        f"n_days={report.n_days}",
        f"sharpe={report.sharpe!r}",
        f"ci_low={report.ci_low!r}",
        f"ci_high={report.ci_high!r}",
        f"config_fingerprint={report.config_fingerprint}",
        "date,return",
    ]
    lines += [f"{d},{r!r}" for d, r in zip(report.dates, report.returns)]
    return "\n".join(lines) + "\n"


def write_report(report: BacktestReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_report(report))


def read_report(path) -> BacktestReport:
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    header: dict[str, str] = {}
    i = 0
    for i, line in enumerate(lines):
        if line == "date,return":
            break
        key, _, value = line.partition("=")
        header[key] = value
    else:
        raise DataError(f"{path}: missing date,return table")
    rows = [line.split(",") for line in lines[i + 1 :]]
    try:
        return BacktestReport(
            model=header["model"],
            k=int(header["k"]),
            seed=int(header["seed"]),
            n_days=int(header["n_days"]),
            sharpe=float(header["sharpe"]),
            ci_low=float(header["ci_low"]),
            ci_high=float(header["ci_high"]),
            config_fingerprint=header["config_fingerprint"],
            dates=tuple(r[0] for r in rows),
            returns=tuple(float(r[1]) for r in rows),
        )
    except (KeyError, ValueError, IndexError) as exc:
        raise DataError(f"{path}: malformed report: {exc}") from exc
