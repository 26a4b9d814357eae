"""Ingestion of GHCN-Daily fixed-width archives and the station/triplet
selection protocol for the climate study.

The pipeline: parse the station inventory and per-station daily element
files; keep professionally instrumented stations in a target state; build
daily precipitation (PRCP, response) and maximum temperature (TMAX,
covariate) series over a study window; apply completeness gates; form all
(Y, {X1, X2}) triplets from one response station and an unordered pair of
covariate stations; and gate each triplet for mask stationarity, value
drift, and tail heaviness before it enters the benchmark.

Every daily entry is three-state: Absent (the station reported nothing
that day), Missing (an explicit missing sentinel), or an observed value.
Absent days are removed from the analysis range before any percentage is
computed; Missing covariate entries flow into estimation through the
observation mask.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import ConfigError, DataError
from .tailstats import PlateauSettings, detect_plateau, hill_curve

ABSENT, MISSING, OBSERVED = np.int8(0), np.int8(1), np.int8(2)

ELEMENTS = ("PRCP", "TMAX")
MISSING_SENTINEL = -9999
DEFAULT_KEYWORDS = ("airport", "afb", "intl", "weather service", "observatory")
GHCN_BASE_URL = "https://www.ncei.noaa.gov/pub/data/ghcn/daily/"


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------

@dataclass
class Station:
    id: str
    lat: float
    lon: float
    elevation: float
    state: str
    name: str


@dataclass
class ParseIssue:
    line_no: int
    reason: str


@dataclass
class DailyFragment:
    """One month of one element at one station, as parsed from a .dly line:
    parallel day-of-month, value (NaN = missing sentinel) and flag lists for
    the valid calendar days only."""

    station_id: str
    year: int
    month: int
    element: str
    days: np.ndarray
    values: np.ndarray
    mflags: list
    qflags: list
    sflags: list


@dataclass
class DailySeries:
    """An aligned daily series with the three-state status channel.

    values holds NaN wherever status != OBSERVED. Units: mm for PRCP,
    degrees C for TMAX (tenths in the archive, scaled by exactly 1/10).
    """

    station_id: str
    element: str
    dates: np.ndarray  # datetime64[D], strictly increasing
    values: np.ndarray  # float, NaN unless OBSERVED
    status: np.ndarray  # int8 in {ABSENT, MISSING, OBSERVED}

    def __post_init__(self):
        self.dates = np.asarray(self.dates, dtype="datetime64[D]")
        self.values = np.asarray(self.values, dtype=float)
        self.status = np.asarray(self.status, dtype=np.int8)
        if not (self.dates.shape == self.values.shape == self.status.shape):
            raise DataError("dates, values and status must be aligned")
        if self.dates.size > 1 and not np.all(np.diff(self.dates).astype(int) > 0):
            raise DataError("dates must be strictly increasing")
        obs = self.status == OBSERVED
        if not np.all(np.isfinite(self.values[obs])):
            raise DataError("observed values must be finite")

    def restrict(self, keep: np.ndarray) -> "DailySeries":
        return DailySeries(self.station_id, self.element, self.dates[keep], self.values[keep], self.status[keep])

    def at_dates(self, dates: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(values, status) looked up on an arbitrary date vector; dates the
        series does not cover come back Absent."""
        dates = np.asarray(dates, dtype="datetime64[D]")
        values = np.full(dates.shape, np.nan)
        status = np.full(dates.shape, ABSENT, dtype=np.int8)
        pos = np.searchsorted(self.dates, dates)
        inside = (pos < self.dates.size) & (self.dates[np.minimum(pos, self.dates.size - 1)] == dates)
        idx = pos[inside]
        values[inside] = self.values[idx]
        status[inside] = self.status[idx]
        return values, status


@dataclass
class TripletDataset:
    """One benchmark unit: response y on its retained dates, two covariate
    columns x (zero-imputed where unobserved) with masks lam (1 = observed)."""

    name: str
    y_station: str
    x_stations: tuple
    dates: np.ndarray
    y: np.ndarray
    x: np.ndarray  # (n, 2)
    lam: np.ndarray  # (n, 2) int8

    def __post_init__(self):
        n = self.dates.shape[0]
        if not (self.y.shape == (n,) and self.x.shape == (n, 2) and self.lam.shape == (n, 2)):
            raise DataError("triplet components must share the aligned length")


# ---------------------------------------------------------------------------
# fixed-width parsers
# ---------------------------------------------------------------------------

def parse_stations(text: str) -> tuple[list[Station], list[ParseIssue]]:
    """Parse the station inventory. Fixed-width 1-indexed columns: ID 1-11,
    LATITUDE 13-20, LONGITUDE 22-30, ELEVATION 32-37, STATE 39-40,
    NAME 42-71; anything after column 71 is ignored. Malformed lines are
    collected as issues, never raised."""
    stations: list[Station] = []
    issues: list[ParseIssue] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if len(line) < 71:
            issues.append(ParseIssue(line_no, f"line too short ({len(line)} < 71 chars)"))
            continue
        station_id = line[0:11].strip()
        if not station_id:
            issues.append(ParseIssue(line_no, "empty station id"))
            continue
        try:
            lat = float(line[12:20])
            lon = float(line[21:30])
            elevation = float(line[31:37])
        except ValueError:
            issues.append(ParseIssue(line_no, "unparseable latitude/longitude/elevation"))
            continue
        stations.append(
            Station(
                id=station_id,
                lat=lat,
                lon=lon,
                elevation=elevation,
                state=line[38:40].strip(),
                name=line[41:71].strip(),
            )
        )
    return stations, issues


_DLY_MIN_LEN = 21 + 8 * 31


def parse_dly(text: str, elements=ELEMENTS) -> tuple[list[DailyFragment], list[ParseIssue]]:
    """Parse a .dly element file into monthly fragments.

    Per line: ID 1-11, YEAR 12-15, MONTH 16-17, ELEMENT 18-21, then 31
    groups of 8 columns (5-char integer VALUE then MFLAG, QFLAG, SFLAG).
    The -9999 sentinel maps to Missing; PRCP and TMAX values are tenths,
    stored divided by 10; day slots beyond the month's calendar length are
    format filler and dropped; element codes outside `elements` are
    skipped silently; malformed lines are collected as issues."""
    fragments: list[DailyFragment] = []
    issues: list[ParseIssue] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if len(line) < _DLY_MIN_LEN:
            issues.append(ParseIssue(line_no, f"line too short ({len(line)} < {_DLY_MIN_LEN} chars)"))
            continue
        station_id = line[0:11].strip()
        element = line[17:21].strip()
        try:
            year = int(line[11:15])
            month = int(line[15:17])
        except ValueError:
            issues.append(ParseIssue(line_no, "unparseable year/month"))
            continue
        if not station_id:
            issues.append(ParseIssue(line_no, "empty station id"))
            continue
        if not (1 <= month <= 12 and 1 <= year <= 9999):
            issues.append(ParseIssue(line_no, f"invalid year/month {year}-{month}"))
            continue
        if element not in elements:
            continue
        n_days = calendar.monthrange(year, month)[1]
        days, values, mflags, qflags, sflags = [], [], [], [], []
        bad = None
        for d in range(1, 32):
            base = 21 + 8 * (d - 1)
            try:
                value = int(line[base : base + 5])
            except ValueError:
                bad = f"unparseable value in day slot {d}"
                break
            if d > n_days:
                continue
            days.append(d)
            values.append(np.nan if value == MISSING_SENTINEL else value / 10.0)
            mflags.append(line[base + 5])
            qflags.append(line[base + 6])
            sflags.append(line[base + 7])
        if bad is not None:
            issues.append(ParseIssue(line_no, bad))
            continue
        fragments.append(
            DailyFragment(
                station_id=station_id,
                year=year,
                month=month,
                element=element,
                days=np.asarray(days, dtype=int),
                values=np.asarray(values, dtype=float),
                mflags=mflags,
                qflags=qflags,
                sflags=sflags,
            )
        )
    return fragments, issues


def assemble_series(
    fragments: list[DailyFragment],
    station_id: str,
    element: str,
    start: str,
    end: str,
) -> DailySeries:
    """Lay monthly fragments for one (station, element) onto the continuous
    daily range [start, end]: dates no fragment covers stay Absent, the
    missing sentinel becomes Missing, everything else is an observed value."""
    start_d = np.datetime64(start, "D")
    end_d = np.datetime64(end, "D")
    if end_d < start_d:
        raise DataError(f"empty date range {start}..{end}")
    dates = np.arange(start_d, end_d + 1)
    values = np.full(dates.shape, np.nan)
    status = np.full(dates.shape, ABSENT, dtype=np.int8)
    for frag in fragments:
        if frag.station_id != station_id or frag.element != element:
            continue
        month_start = np.datetime64(f"{frag.year:04d}-{frag.month:02d}", "D")
        frag_dates = month_start + (frag.days - 1)
        inside = (frag_dates >= start_d) & (frag_dates <= end_d)
        pos = (frag_dates[inside] - start_d).astype(int)
        vals = frag.values[inside]
        miss = np.isnan(vals)
        status[pos] = np.where(miss, MISSING, OBSERVED)
        values[pos] = np.where(miss, np.nan, vals)
    return DailySeries(station_id, element, dates, values, status)


# ---------------------------------------------------------------------------
# station and series selection
# ---------------------------------------------------------------------------

def filter_stations(
    stations: list[Station],
    state: str | None = None,
    keywords=DEFAULT_KEYWORDS,
    bbox: tuple | None = None,
) -> list[Station]:
    """Keep stations in the target state (or bounding box
    (lat_min, lat_max, lon_min, lon_max)) whose name contains any of the
    institutional keywords, case-insensitively. An empty keyword list keeps
    every geographically matching station."""
    kept = []
    for station in stations:
        geo_ok = True
        if state is not None:
            geo_ok = station.state.upper() == state.upper()
        if not geo_ok and bbox is not None:
            lat_min, lat_max, lon_min, lon_max = bbox
            geo_ok = lat_min <= station.lat <= lat_max and lon_min <= station.lon <= lon_max
        if state is None and bbox is not None:
            lat_min, lat_max, lon_min, lon_max = bbox
            geo_ok = lat_min <= station.lat <= lat_max and lon_min <= station.lon <= lon_max
        if not geo_ok:
            continue
        if keywords:
            lowered = station.name.lower()
            if not any(kw.lower() in lowered for kw in keywords):
                continue
        kept.append(station)
    return kept


@dataclass
class CompletenessResult:
    """Eligibility verdict for one series.

    For a response (PRCP) series: eligible means the Missing share of the
    Absent-free range is at most y_max_missing; retained is the series
    restricted to its fully observed dates. For a covariate (TMAX) series:
    eligible means the not-observed share on the reference dates lies in
    x_missing_range (inclusive); retained is None."""

    station_id: str
    element: str
    eligible: bool
    missing_fraction: float
    retained: DailySeries | None = None


def completeness_filters(
    series: DailySeries,
    date_range: tuple | None = None,
    reference_dates: np.ndarray | None = None,
    y_max_missing: float = 0.01,
    x_missing_range: tuple = (0.05, 0.20),
) -> CompletenessResult:
    """Classify one series per the selection protocol.

    PRCP series: restrict to date_range when given, drop Absent days, and
    require the Missing fraction of what remains to be <= y_max_missing;
    the retained series then also drops the Missing days (with their
    dates). TMAX series: needs reference_dates (the response's retained
    dates); the fraction of those dates without an observed value must lie
    within x_missing_range, bounds included."""
    if series.element == "PRCP":
        sel = series
        if date_range is not None:
            start_d = np.datetime64(date_range[0], "D")
            end_d = np.datetime64(date_range[1], "D")
            sel = series.restrict((series.dates >= start_d) & (series.dates <= end_d))
        present = sel.status != ABSENT
        reduced = sel.restrict(present)
        if reduced.dates.size == 0:
            raise DataError(f"station {series.station_id}: no operational days in range")
        missing_fraction = float(np.mean(reduced.status == MISSING))
        eligible = missing_fraction <= y_max_missing
        retained = reduced.restrict(reduced.status == OBSERVED) if eligible else None
        return CompletenessResult(series.station_id, "PRCP", eligible, missing_fraction, retained)
    if series.element == "TMAX":
        if reference_dates is None:
            raise ConfigError("TMAX eligibility needs the response's retained dates")
        reference_dates = np.asarray(reference_dates, dtype="datetime64[D]")
        if reference_dates.size == 0:
            raise DataError("empty reference date set")
        _, status = series.at_dates(reference_dates)
        missing_fraction = float(np.mean(status != OBSERVED))
        lo, hi = x_missing_range
        return CompletenessResult(series.station_id, "TMAX", lo <= missing_fraction <= hi, missing_fraction)
    raise ConfigError(f"unsupported element {series.element!r}")


def build_triplets(y_eligible: list[DailySeries], x_eligible: list[DailySeries]) -> list[TripletDataset]:
    """Cross every retained response series with every unordered pair of
    distinct covariate series: C(x, 2) * y triplets.

    Covariate values are aligned to the response's dates; entries without
    an observed value get mask 0 and value 0. Any response entry that is
    still not finite is imputed to zero (the retained response is normally
    Missing-free already; the imputation mirrors the documented
    zeros-for-missing-precipitation choice)."""
    triplets: list[TripletDataset] = []
    for y_series in y_eligible:
        y_vals = np.where(np.isfinite(y_series.values), y_series.values, 0.0)
        for a in range(len(x_eligible)):
            for b in range(a + 1, len(x_eligible)):
                cols, masks = [], []
                for xs in (x_eligible[a], x_eligible[b]):
                    vals, status = xs.at_dates(y_series.dates)
                    observed = status == OBSERVED
                    cols.append(np.where(observed, vals, 0.0))
                    masks.append(observed.astype(np.int8))
                name = f"{y_series.station_id}__{x_eligible[a].station_id}__{x_eligible[b].station_id}"
                triplets.append(
                    TripletDataset(
                        name=name,
                        y_station=y_series.station_id,
                        x_stations=(x_eligible[a].station_id, x_eligible[b].station_id),
                        dates=y_series.dates.copy(),
                        y=y_vals.copy(),
                        x=np.column_stack(cols),
                        lam=np.column_stack(masks),
                    )
                )
    return triplets


# ---------------------------------------------------------------------------
# admissibility gates
# ---------------------------------------------------------------------------

def mask_pattern_table(m1, m2, n_windows: int) -> np.ndarray:
    """Haldane-corrected (n_windows x 4) counts of the joint mask patterns
    (0,0), (0,1), (1,0), (1,1) over equal time blocks."""
    m1 = np.asarray(m1).astype(int)
    m2 = np.asarray(m2).astype(int)
    if m1.shape != m2.shape or m1.ndim != 1:
        raise DataError("m1 and m2 must be aligned vectors")
    if n_windows < 2:
        raise ConfigError("need at least 2 windows")
    if m1.size < n_windows:
        raise DataError("degenerate window partition: more windows than observations")
    pattern = 2 * m1 + m2
    counts = np.empty((n_windows, 4))
    for w, idx in enumerate(np.array_split(np.arange(m1.size), n_windows)):
        counts[w] = np.bincount(pattern[idx], minlength=4)[:4]
    return counts + 0.5


def mask_stationarity_chisq(m1, m2, n_windows: int = 4) -> float:
    """Upper-tail p-value of the chi-square homogeneity test on the joint
    mask patterns across time blocks, Haldane-corrected, with
    (n_windows - 1) * 3 degrees of freedom. Stationarity is rejected for
    p < 0.05."""
    counts = mask_pattern_table(m1, m2, n_windows)
    total = counts.sum()
    expected = counts.sum(axis=1, keepdims=True) @ counts.sum(axis=0, keepdims=True) / total
    stat = float(((counts - expected) ** 2 / expected).sum())
    df = (n_windows - 1) * 3
    return float(sps.chi2.sf(stat, df))


def rolling_correlation(x1, x2, window: int = 100, min_joint: int = 10) -> np.ndarray:
    """Pearson correlation over each length-`window` sliding block, using
    only positions where both inputs are finite; blocks with fewer than
    min_joint joint observations (or zero variance) come back NaN."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or x1.ndim != 1:
        raise DataError("x1 and x2 must be aligned vectors")
    n = x1.size
    if n < window:
        raise DataError(f"need at least window={window} points, got {n}")
    out = np.full(n - window + 1, np.nan)
    joint = np.isfinite(x1) & np.isfinite(x2)
    for start in range(out.size):
        sel = slice(start, start + window)
        j = joint[sel]
        if int(j.sum()) < min_joint:
            continue
        a = x1[sel][j]
        b = x2[sel][j]
        da = a - a.mean()
        db = b - b.mean()
        denom = np.sqrt((da @ da) * (db @ db))
        if denom == 0:
            continue
        out[start] = float(da @ db / denom)
    return out


@dataclass(frozen=True)
class AdmissibilitySettings:
    """Gate thresholds for the triplet pipeline. drift_mult or
    corr_range_max set to None disables that sub-gate; the drift pair
    stands in for formal unit-root testing (out of scope)."""

    x_missing_range: tuple = (0.05, 0.20)
    n_windows: int = 4
    stationarity_p_min: float = 0.05
    drift_window: int = 100
    drift_mult: float | None = 3.0
    corr_window: int = 100
    corr_min_joint: int = 10
    corr_range_max: float | None = 1.0
    hill_gamma_min: float = 0.2
    hill_slope_tol: float = 0.005
    hill_var_tol: float = 0.05


@dataclass
class Verdict:
    passed: bool
    failed_gate: str | None
    diagnostics: dict = field(default_factory=dict)


def _rolling_mean_std(y: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    wins = np.lib.stride_tricks.sliding_window_view(y, window)
    return wins.mean(axis=1), wins.std(axis=1, ddof=1)


def admissibility_pipeline(triplet: TripletDataset, settings: AdmissibilitySettings = AdmissibilitySettings()) -> Verdict:
    """Run the gates in order and stop at the first failure:
    completeness (finite response, covariate missingness in range), mask
    stationarity (chi-square p >= threshold), drift (rolling mean of the
    response within drift_mult rolling standard deviations of its global
    mean, and bounded rolling-correlation range between the covariates),
    and tail heaviness (a Hill plateau above hill_gamma_min exists)."""
    diag: dict = {}

    if not np.all(np.isfinite(triplet.y)):
        return Verdict(False, "completeness", {"reason": "non-finite response values"})
    lo, hi = settings.x_missing_range
    miss = 1.0 - triplet.lam.mean(axis=0)
    diag["x_missing"] = miss.tolist()
    if np.any(miss < lo) or np.any(miss > hi):
        return Verdict(False, "completeness", diag | {"reason": "covariate missingness out of range"})

    p_val = mask_stationarity_chisq(triplet.lam[:, 0], triplet.lam[:, 1], settings.n_windows)
    diag["mask_chisq_p"] = p_val
    if p_val < settings.stationarity_p_min:
        return Verdict(False, "mask_stationarity", diag)

    if settings.drift_mult is not None and triplet.y.size >= settings.drift_window:
        rm, rs = _rolling_mean_std(triplet.y, settings.drift_window)
        drift = np.abs(rm - triplet.y.mean())
        # windows with no variability cannot bound drift; treat their
        # allowance as the global scale instead
        allowance = settings.drift_mult * np.where(rs > 0, rs, triplet.y.std() + 1e-12)
        diag["drift_violations"] = int(np.count_nonzero(drift > allowance))
        if diag["drift_violations"] > 0:
            return Verdict(False, "drift", diag)
    if settings.corr_range_max is not None and triplet.y.size >= settings.corr_window:
        x1 = np.where(triplet.lam[:, 0] == 1, triplet.x[:, 0], np.nan)
        x2 = np.where(triplet.lam[:, 1] == 1, triplet.x[:, 1], np.nan)
        rc = rolling_correlation(x1, x2, settings.corr_window, settings.corr_min_joint)
        defined = rc[np.isfinite(rc)]
        if defined.size:
            diag["corr_range"] = float(defined.max() - defined.min())
            if diag["corr_range"] > settings.corr_range_max:
                return Verdict(False, "drift", diag)

    positive = triplet.y[triplet.y > 0]
    k_cap = min(triplet.y.size // 2, positive.size - 1)
    if k_cap < 2:
        return Verdict(False, "heavy_tail", diag | {"reason": "not enough positive responses"})
    hill = hill_curve(triplet.y, k_max=k_cap)
    plateau = detect_plateau(
        hill,
        PlateauSettings(
            slope_tol=settings.hill_slope_tol,
            var_tol=settings.hill_var_tol,
            gamma_min=settings.hill_gamma_min,
        ),
    )
    if plateau is None:
        return Verdict(False, "heavy_tail", diag | {"reason": "no Hill plateau above the tail floor"})
    diag["hill_gamma_mean"] = plateau.gamma_mean
    return Verdict(True, None, diag)


# ---------------------------------------------------------------------------
# CSV forms and the thin archive client
# ---------------------------------------------------------------------------

def write_triplet_csv(triplet: TripletDataset, path) -> None:
    """date, y, x1, x2, m1, m2 with ISO dates; 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,y,x1,x2,m1,m2\n")
        for i in range(triplet.dates.size):
            fh.write(
                f"{triplet.dates[i]},{triplet.y[i]:.17g},{triplet.x[i, 0]:.17g},"
                f"{triplet.x[i, 1]:.17g},{int(triplet.lam[i, 0])},{int(triplet.lam[i, 1])}\n"
            )


def read_triplet_csv(path, name: str | None = None) -> TripletDataset:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != ["date", "y", "x1", "x2", "m1", "m2"]:
            raise DataError(f"{path}: unexpected triplet CSV header {header}")
        dates, ys, x1s, x2s, m1s, m2s = [], [], [], [], [], []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 6:
                raise DataError(f"{path}:{line_no}: expected 6 fields, got {len(parts)}")
            try:
                dates.append(np.datetime64(parts[0], "D"))
                ys.append(float(parts[1]))
                x1s.append(float(parts[2]))
                x2s.append(float(parts[3]))
                m1s.append(int(parts[4]))
                m2s.append(int(parts[5]))
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: {exc}") from exc
    label = name if name is not None else str(path)
    return TripletDataset(
        name=label,
        y_station="",
        x_stations=("", ""),
        dates=np.asarray(dates, dtype="datetime64[D]"),
        y=np.asarray(ys),
        x=np.column_stack([x1s, x2s]).astype(float),
        lam=np.column_stack([m1s, m2s]).astype(np.int8),
    )


def write_series_csv(series_list: list[DailySeries], path) -> None:
    """Long form: station, element, date, value, status (absent/missing/
    observed); value empty unless observed."""
    names = {ABSENT: "absent", MISSING: "missing", OBSERVED: "observed"}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("station,element,date,value,status\n")
        for s in series_list:
            for i in range(s.dates.size):
                val = f"{s.values[i]:.17g}" if s.status[i] == OBSERVED else ""
                fh.write(f"{s.station_id},{s.element},{s.dates[i]},{val},{names[int(s.status[i])]}\n")


def fetch_archive_file(relative_path: str, dest_path, base_url: str = GHCN_BASE_URL, timeout: float = 60.0):
    """Thin download client for the public archive; kept behind this
    interface so the whole pipeline runs on local fixtures and nothing in
    the test suite touches the network."""
    from urllib.request import urlopen

    with urlopen(base_url + relative_path, timeout=timeout) as resp:  # pragma: no cover
        payload = resp.read()
    with open(dest_path, "wb") as fh:  # pragma: no cover
        fh.write(payload)
    return dest_path
