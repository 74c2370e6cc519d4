"""Turn box-count tables into dimension estimates.

A box table holds rows (ell, n, count, method, size) where `count` is a
box count for the n-th graph of a sequence, `size` its vertex count, and
`method` one of Exact / LowerBound / UpperBound / Greedy.  The estimators
realize a double limit: for each ell the row at the largest available n
stands in for the inner limit, and the regression over ell for the outer
one — never the other way around.

Three estimate kinds, all with natural logs and unweighted least squares:

  BoxDim            y = log(count/size) against x = -log(ell)
  Transfinite       y = log(count/size) against x = -ell
  TransfiniteCesaro per ell, the running mean over i of
                    log(count(i+ell)/size(i+ell)) / (-ell); the value at
                    the largest ell is reported, with the last-two
                    difference as the convergence diagnostic.

When a table only brackets the true counts (LowerBound/UpperBound pairs),
both sides are fitted and the slope is reported as the bracket midpoint.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

from .boxing import (METHOD_EXACT, METHOD_GREEDY, METHOD_LOWER, METHOD_UPPER)
from .errors import FormatError, InputError, PreconditionError

KIND_BOX_DIM = "BoxDim"
KIND_TRANSFINITE = "Transfinite"
KIND_CESARO = "TransfiniteCesaro"
FIT_KINDS = (KIND_BOX_DIM, KIND_TRANSFINITE, KIND_CESARO)

_TABLE_METHODS = (METHOD_EXACT, METHOD_LOWER, METHOD_UPPER, METHOD_GREEDY)
TABLE_HEADER = ["ell", "n", "count", "method", "size"]
FITS_HEADER = ["kind", "slope", "intercept", "max_residual",
               "bracket_lo", "bracket_hi"]


@dataclass(frozen=True)
class BoxRow:
    ell: int
    n: int
    count: int
    method: str
    size: int

    def __post_init__(self):
        if self.ell < 2:
            raise InputError(f"ell must be >= 2, got {self.ell}")
        if self.n < 0:
            raise InputError(f"n must be >= 0, got {self.n}")
        if self.count < 1:
            raise InputError(f"count must be >= 1, got {self.count}")
        if self.size < self.count:
            raise InputError(
                f"size {self.size} is smaller than count {self.count}")
        if self.method not in _TABLE_METHODS:
            raise InputError(f"unknown method {self.method!r}")

    @property
    def log_ratio(self) -> float:
        # big-integer safe: never form count/size as a float
        return math.log(self.count) - math.log(self.size)


def validate_box_table(rows: Sequence[BoxRow]) -> None:
    """Cross-row sanity: one Exact value per (ell, n), and the best lower
    bound must not exceed it or the best upper bound."""
    exact: dict[tuple[int, int], int] = {}
    lo: dict[tuple[int, int], int] = {}
    hi: dict[tuple[int, int], int] = {}
    sizes: dict[tuple[int, int], int] = {}
    for row in rows:
        key = (row.ell, row.n)
        if sizes.setdefault(key, row.size) != row.size:
            raise InputError(
                f"conflicting sizes {sizes[key]} and {row.size} "
                f"for ell={row.ell}, n={row.n}")
        if row.method == METHOD_EXACT:
            if key in exact and exact[key] != row.count:
                raise InputError(
                    f"conflicting Exact counts {exact[key]} and {row.count} "
                    f"for ell={row.ell}, n={row.n}")
            exact[key] = row.count
        elif row.method == METHOD_LOWER:
            lo[key] = max(lo.get(key, 0), row.count)
        elif row.method == METHOD_UPPER:
            hi[key] = min(hi.get(key, row.count), row.count)
    for key in set(lo) | set(hi) | set(exact):
        low = lo.get(key, 0)
        high = hi.get(key)
        ex = exact.get(key)
        if ex is not None and (low > ex or (high is not None and ex > high)):
            raise InputError(
                f"bounds ({low}, {high}) do not sandwich the Exact count "
                f"{ex} for ell={key[0]}, n={key[1]}")
        if ex is None and high is not None and low > high:
            raise InputError(
                f"lower bound {low} exceeds upper bound {high} "
                f"for ell={key[0]}, n={key[1]}")


def save_box_table(rows: Sequence[BoxRow], path, append: bool = False) -> None:
    """Write (or extend) a box-table CSV with columns ell,n,count,method,size."""
    fresh = not (append and os.path.exists(path) and os.path.getsize(path) > 0)
    mode = "a" if not fresh else "w"
    with open(path, mode, newline="") as fp:
        writer = csv.writer(fp)
        if fresh:
            writer.writerow(TABLE_HEADER)
        for row in rows:
            writer.writerow([row.ell, row.n, row.count, row.method, row.size])


def load_box_table(path) -> list[BoxRow]:
    rows = []
    with open(path, newline="") as fp:
        reader = csv.reader(fp)
        header = next(reader, None)
        if header != TABLE_HEADER:
            raise FormatError(
                f"{path}: expected header {','.join(TABLE_HEADER)}, "
                f"got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 5:
                raise FormatError(f"{path}:{lineno}: expected 5 columns")
            try:
                rows.append(BoxRow(int(rec[0]), int(rec[1]), int(rec[2]),
                                   rec[3], int(rec[4])))
            except (ValueError, InputError) as exc:
                raise FormatError(f"{path}:{lineno}: {exc}")
    validate_box_table(rows)
    return rows


@dataclass(frozen=True)
class DimensionFit:
    """A fitted estimate.  For the Cesaro kind, points are (ell, value)
    pairs, slope is the value at the largest ell, intercept is unused (0)
    and max_residual is the last-two difference of the value sequence."""

    kind: str
    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    max_residual: float
    bracket: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in FIT_KINDS:
            raise InputError(f"unknown fit kind {self.kind!r}")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not lo <= self.slope <= hi:
                raise InputError(
                    f"slope {self.slope} outside bracket ({lo}, {hi})")

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol

    def looks_linear(self, residual_max: float) -> bool:
        """Whether the fit's worst residual stays under the given threshold
        (the fractal-vs-not verdict knob; callers choose the threshold)."""
        return self.max_residual <= residual_max


def _least_squares(points: Sequence[tuple[float, float]]
                   ) -> tuple[float, float, float]:
    n = len(points)
    mean_x = sum(x for x, _ in points) / n
    mean_y = sum(y for _, y in points) / n
    sxx = sum((x - mean_x) ** 2 for x, _ in points)
    if sxx == 0.0:
        raise InputError("all x values coincide; cannot fit a slope")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in points)
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    resid = max(abs(y - (slope * x + intercept)) for x, y in points)
    return slope, intercept, resid


def _select_rows(rows: Sequence[BoxRow]
                 ) -> tuple[list[tuple[int, float]], list[tuple[int, float]], bool]:
    """Per distinct ell, pick the row(s) at the largest n and reduce them to
    a lower-side and upper-side log-ratio.  Returns (lower, upper, bracketed):
    the two sides coincide unless some ell only has bound pairs."""
    if not rows:
        raise PreconditionError("empty box table")
    validate_box_table(rows)
    by_ell: dict[int, list[BoxRow]] = {}
    for row in rows:
        by_ell.setdefault(row.ell, []).append(row)
    lower = []
    upper = []
    bracketed = False
    for ell in sorted(by_ell):
        group = by_ell[ell]
        top = max(r.n for r in group)
        here = [r for r in group if r.n == top]
        exact = [r for r in here if r.method == METHOD_EXACT]
        if exact:
            y = exact[0].log_ratio
            lower.append((ell, y))
            upper.append((ell, y))
            continue
        lo = [r for r in here if r.method == METHOD_LOWER]
        hi = [r for r in here if r.method == METHOD_UPPER]
        if lo or hi:
            if not (lo and hi):
                side = "an upper" if lo else "a lower"
                raise PreconditionError(
                    f"ell={ell}, n={top}: bound rows without {side} bound")
            size_log = math.log(here[0].size)
            lower.append((ell, math.log(max(r.count for r in lo)) - size_log))
            upper.append((ell, math.log(min(r.count for r in hi)) - size_log))
            bracketed = True
            continue
        greedy = [r for r in here if r.method == METHOD_GREEDY]
        y = min(r.log_ratio for r in greedy)
        lower.append((ell, y))
        upper.append((ell, y))
    return lower, upper, bracketed


def _fit(rows: Sequence[BoxRow], kind: str, to_x) -> DimensionFit:
    lower, upper, bracketed = _select_rows(rows)
    if len(lower) < 3:
        raise PreconditionError(
            f"need at least 3 distinct ell values, got {len(lower)}")
    lo_pts = tuple((to_x(ell), y) for ell, y in lower)
    hi_pts = tuple((to_x(ell), y) for ell, y in upper)
    if not bracketed:
        slope, intercept, resid = _least_squares(lo_pts)
        return DimensionFit(kind, lo_pts, slope, intercept, resid)
    s1, i1, r1 = _least_squares(lo_pts)
    s2, i2, r2 = _least_squares(hi_pts)
    bracket = (min(s1, s2), max(s1, s2))
    return DimensionFit(kind, lo_pts + hi_pts, (s1 + s2) / 2, (i1 + i2) / 2,
                        max(r1, r2), bracket)


def fit_dB(rows: Sequence[BoxRow]) -> DimensionFit:
    """Power-law box dimension: slope of log(count/size) vs -log(ell)."""
    return _fit(rows, KIND_BOX_DIM, lambda ell: -math.log(ell))


def fit_tau(rows: Sequence[BoxRow]) -> DimensionFit:
    """Exponential-decay rate: slope of log(count/size) vs -ell."""
    return _fit(rows, KIND_TRANSFINITE, lambda ell: -float(ell))


_CESARO_PREFERENCE = (METHOD_EXACT, METHOD_LOWER, METHOD_UPPER, METHOD_GREEDY)


def cesaro_values(rows: Sequence[BoxRow]) -> list[tuple[int, float]]:
    """Per ell: mean over i = 1..n of log(count/size)/(-ell) taken from the
    rows (ell, i+ell); the i-range must be complete from 1."""
    validate_box_table(rows)
    by_ell: dict[int, dict[int, BoxRow]] = {}
    for row in rows:
        i = row.n - row.ell
        if i < 1:
            continue
        slot = by_ell.setdefault(row.ell, {})
        old = slot.get(i)
        if old is None or (_CESARO_PREFERENCE.index(row.method)
                           < _CESARO_PREFERENCE.index(old.method)):
            slot[i] = row
    if not by_ell:
        raise PreconditionError("no rows with n > ell in the table")
    out = []
    for ell in sorted(by_ell):
        have = by_ell[ell]
        n = max(have)
        missing = [i for i in range(1, n + 1) if i not in have]
        if missing:
            raise PreconditionError(
                f"ell={ell}: missing row for n={ell + missing[0]} "
                f"(i={missing[0]})")
        total = sum(have[i].log_ratio / (-ell) for i in range(1, n + 1))
        out.append((ell, total / n))
    return out


def fit_tau_cesaro(rows: Sequence[BoxRow]) -> DimensionFit:
    """Cesaro-averaged transfinite estimate (see module docstring)."""
    values = cesaro_values(rows)
    if len(values) < 2:
        raise PreconditionError(
            f"need at least 2 distinct ell values, got {len(values)}")
    slope = values[-1][1]
    diag = abs(values[-1][1] - values[-2][1])
    points = tuple((float(ell), v) for ell, v in values)
    return DimensionFit(KIND_CESARO, points, slope, 0.0, diag)


# ── oscillation diagnostics ──────────────────────────────────────────────


def tau_inner_values(rows: Sequence[BoxRow], ell: int) -> list[tuple[int, float]]:
    """Inner sequence at fixed ell: (n, log(count/size)/(-ell)) over all n."""
    validate_box_table(rows)
    picked: dict[int, BoxRow] = {}
    for row in rows:
        if row.ell != ell:
            continue
        old = picked.get(row.n)
        if old is None or (_CESARO_PREFERENCE.index(row.method)
                           < _CESARO_PREFERENCE.index(old.method)):
            picked[row.n] = row
    if not picked:
        raise PreconditionError(f"no rows with ell={ell}")
    return [(n, picked[n].log_ratio / (-ell)) for n in sorted(picked)]


def segment_spreads(values: Sequence[float], segments: int) -> list[float]:
    """Max minus min inside each of `segments` contiguous chunks."""
    if segments < 1 or len(values) < segments:
        raise InputError("need at least one value per segment")
    out = []
    size = len(values) / segments
    for s in range(segments):
        chunk = values[round(s * size):round((s + 1) * size)]
        out.append(max(chunk) - min(chunk))
    return out


def flags_oscillation(values: Sequence[float], threshold: float,
                      segments: int = 3) -> bool:
    """True when every contiguous chunk spreads by at least the threshold —
    a finite stand-in for 'the sequence keeps oscillating'."""
    return all(s >= threshold for s in segment_spreads(values, segments))


# ── fits CSV ─────────────────────────────────────────────────────────────


def save_fits(fits: Sequence[DimensionFit], path) -> None:
    with open(path, "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(FITS_HEADER)
        for fit in fits:
            lo, hi = ("", "") if fit.bracket is None else \
                (repr(fit.bracket[0]), repr(fit.bracket[1]))
            writer.writerow([fit.kind, repr(fit.slope), repr(fit.intercept),
                             repr(fit.max_residual), lo, hi])


def load_fits(path) -> list[DimensionFit]:
    fits = []
    with open(path, newline="") as fp:
        reader = csv.reader(fp)
        header = next(reader, None)
        if header != FITS_HEADER:
            raise FormatError(
                f"{path}: expected header {','.join(FITS_HEADER)}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 6:
                raise FormatError(f"{path}:{lineno}: expected 6 columns")
            try:
                bracket = None
                if rec[4] or rec[5]:
                    bracket = (float(rec[4]), float(rec[5]))
                fits.append(DimensionFit(rec[0], (), float(rec[1]),
                                         float(rec[2]), float(rec[3]), bracket))
            except (ValueError, InputError) as exc:
                raise FormatError(f"{path}:{lineno}: {exc}")
    return fits
