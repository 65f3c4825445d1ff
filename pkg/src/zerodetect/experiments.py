"""Monte-Carlo harness: signal generation, noise injection, trial batches,
false-discovery / error-probability aggregation, and plot-data emission.

Reproducibility contract: every randomized quantity in a batch is a pure
function of the configuration. The matrix comes from its own seed; each
trial's signal and noise come from a stream keyed by (master seed, k, trial
index). Detection itself is deterministic, so all detectors and estimate
sizes in a batch see the same signal and noise realizations per trial; this
makes cross-detector comparisons paired and makes enlarging the estimate a
per-trial improvement, while grid cells stay independently re-runnable.

Measurement convention: the sparse coefficient vector is measured directly
(y = A x + w with x the tone coefficient vector). Tone supports index a
frequency grid of size p, but no transform is inserted between the matrix
and the coefficients.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .core import (
    MeasurementMatrix,
    RngSpec,
    SignalInstance,
    SupportSet,
    read_cmat,
)
from .detectors import ost_topk, zd_groth, zd_ost
from .errors import BadK, BadValue, IncompleteReport, NoGroups
from .matrices import KerdockSpec, attach_groups, build_bernoulli, build_kerdock
from .theory import NOISE_CONVENTIONS

DETECTOR_NAMES = ("zd_ost", "zd_groth", "ost_topk", "ost_topk_full_support")
MATRIX_FAMILIES = ("kerdock", "bernoulli", "file")
SIGNAL_MODELS = ("tone", "group")
FIGURE_IDS = ("1", "2", "3", "4a", "4b")

_Z95 = 1.959963984540054
_FLOAT_FMT = "{:.17g}"


@dataclass(frozen=True)
class UniformAmplitude:
    """Magnitudes drawn uniformly from [lo, hi] (phases are always uniform)."""

    lo: float = 1.0
    hi: float = 1000.0

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise BadValue(f"need 0 < lo <= hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size)


def gen_tone_signal(p: int, k: int, law: UniformAmplitude,
                    rng: np.random.Generator) -> SignalInstance:
    """k-sparse coefficient vector: uniform support, law-distributed magnitudes,
    uniform phases."""
    if not 0 <= k <= p:
        raise BadK(f"need 0 <= k <= p, got k={k}, p={p}")
    x = np.zeros(p, dtype=np.complex128)
    if k > 0:
        support = rng.choice(p, size=k, replace=False)
        mags = law.sample(rng, k)
        phases = rng.uniform(0.0, 2.0 * np.pi, k)
        x[support] = mags * np.exp(1j * phases)
    return SignalInstance.from_vector(x)


def gen_group_signal(q: int, r: int, k: int, law: UniformAmplitude,
                     rng: np.random.Generator) -> SignalInstance:
    """Signal active on k whole groups: every entry of a chosen group is nonzero."""
    if not 0 <= k <= q:
        raise BadK(f"need 0 <= k <= q, got k={k}, q={q}")
    x = np.zeros(q * r, dtype=np.complex128)
    if k > 0:
        groups = rng.choice(q, size=k, replace=False)
        mags = law.sample(rng, k * r)
        phases = rng.uniform(0.0, 2.0 * np.pi, k * r)
        coeffs = (mags * np.exp(1j * phases)).reshape(k, r)
        for row, g in enumerate(groups):
            x[g * r:(g + 1) * r] = coeffs[row]
    return SignalInstance.from_vector(x)


def gen_noise(n: int, sigma2: float, convention: str,
              rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise vector under the configured convention.

    "total": per-entry variance sigma2 (components sigma2/2 each), so
    E||w||^2 = n sigma2. "per_component": each component has variance sigma2.
    """
    if sigma2 < 0:
        raise BadValue("sigma2 must be >= 0")
    if convention not in NOISE_CONVENTIONS:
        raise BadValue(f"unknown noise convention {convention!r}")
    if sigma2 == 0:
        return np.zeros(n, dtype=np.complex128)
    scale = math.sqrt(sigma2 / 2) if convention == "total" else math.sqrt(sigma2)
    parts = rng.standard_normal((2, n))
    return scale * (parts[0] + 1j * parts[1])


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a batch; equal configs give identical output."""

    matrix_family: str = "kerdock"
    kerdock_m: int = 3
    rows: int | None = None
    cols: int | None = None
    matrix_seed: int = 0
    matrix_file: str | None = None
    signal_model: str = "tone"
    amplitude_lo: float = 1.0
    amplitude_hi: float = 1000.0
    sigma2: float = 500.0
    k_grid: tuple[int, ...] = (16, 64, 128, 204)
    theta_grid: tuple[int, ...] = (1, 4, 16, 64)
    trials: int = 5000
    group_size: int | None = None
    detectors: tuple[str, ...] = ("zd_ost",)
    master_seed: int = 0
    noise_convention: str = "total"

    def __post_init__(self):
        if self.matrix_family not in MATRIX_FAMILIES:
            raise BadValue(f"unknown matrix family {self.matrix_family!r}")
        if self.signal_model not in SIGNAL_MODELS:
            raise BadValue(f"unknown signal model {self.signal_model!r}")
        if self.noise_convention not in NOISE_CONVENTIONS:
            raise BadValue(f"unknown noise convention {self.noise_convention!r}")
        if self.trials < 1:
            raise BadValue("trials must be >= 1")
        if self.sigma2 < 0:
            raise BadValue("sigma2 must be >= 0")
        if not self.detectors:
            raise BadValue("at least one detector is required")
        for d in self.detectors:
            if d not in DETECTOR_NAMES:
                raise BadValue(f"unknown detector {d!r}")
        if len(set(self.detectors)) != len(self.detectors):
            raise BadValue("duplicate detectors")
        if self.signal_model == "group" and self.group_size is None:
            raise BadValue("group signals need group_size")
        UniformAmplitude(self.amplitude_lo, self.amplitude_hi)  # range check

    @property
    def amplitude_law(self) -> UniformAmplitude:
        return UniformAmplitude(self.amplitude_lo, self.amplitude_hi)


def build_matrix(config: ExperimentConfig) -> MeasurementMatrix:
    """Construct (or load) the configured measurement matrix, groups attached."""
    if config.matrix_family == "kerdock":
        m = build_kerdock(KerdockSpec(config.kerdock_m))
    elif config.matrix_family == "bernoulli":
        if config.rows is None or config.cols is None:
            raise BadValue("bernoulli family needs rows and cols")
        m = build_bernoulli(config.rows, config.cols, RngSpec(config.matrix_seed))
    else:
        if config.matrix_file is None:
            raise BadValue("file family needs matrix_file")
        entries, _ = read_cmat(config.matrix_file)
        m = MeasurementMatrix(entries)
    if config.group_size is not None:
        m = attach_groups(m, config.group_size)
    return m


class TrialMetrics(NamedTuple):
    fdp: float
    zero_fraction: float  # NaN when the target set is empty
    hit: bool


class FullSupportResult(NamedTuple):
    error: bool  # selected set differs from the true support
    fdp: float


def _top_k_selection(y, m: MeasurementMatrix, k: int) -> tuple[int, ...]:
    if k == 0:
        return ()
    return ost_topk(y, m, k).estimate.indices


def baseline_full_support(y, m: MeasurementMatrix, support: SupportSet) -> FullSupportResult:
    """Oracle-sparsity support recovery: top-k scores versus the true support."""
    k = len(support)
    selected = _top_k_selection(y, m, k)
    if k == 0:
        return FullSupportResult(False, 0.0)
    wrong = len(set(selected) - support.to_set())
    return FullSupportResult(selected != support.indices, wrong / k)


def group_zero_support(signal: SignalInstance, m: MeasurementMatrix) -> SupportSet:
    """Groups of the partition containing no support element of the signal."""
    if m.groups is None:
        raise NoGroups("matrix has no group partition")
    active = {m.groups.group_of_column(i) for i in signal.support.indices}
    return SupportSet.from_indices(
        (g for g in range(1, m.groups.q + 1) if g not in active), m.groups.q
    )


def evaluate_detection(detector: str, theta: int, m: MeasurementMatrix,
                       y: np.ndarray, signal: SignalInstance) -> TrialMetrics:
    """One detection and its metrics against the detector's target set.

    Zero detectors are scored against the zero-support (element- or
    group-level); the top-k baselines are scored against the support, with
    the full-support baseline's hit meaning exact recovery.
    """
    if detector == "zd_ost":
        selected = set(zd_ost(y, m, theta).estimate.indices)
        target = signal.zero_support.to_set()
        used = theta
    elif detector == "zd_groth":
        selected = set(zd_groth(y, m, theta).estimate.indices)
        target = group_zero_support(signal, m).to_set()
        used = theta
    elif detector == "ost_topk":
        selected = set(ost_topk(y, m, theta).estimate.indices)
        target = signal.support.to_set()
        used = theta
    elif detector == "ost_topk_full_support":
        picked = _top_k_selection(y, m, signal.k)
        selected = set(picked)
        target = signal.support.to_set()
        used = signal.k
        inter = len(selected & target)
        fdp = (used - inter) / used if used else 0.0
        zf = inter / len(target) if target else float("nan")
        return TrialMetrics(fdp, zf, picked == signal.support.indices)
    else:
        raise BadValue(f"unknown detector {detector!r}")
    inter = len(selected & target)
    fdp = (used - inter) / used
    zf = inter / len(target) if target else float("nan")
    return TrialMetrics(fdp, zf, inter > 0)


def _gen_trial_signal(config: ExperimentConfig, m: MeasurementMatrix, k: int,
                      rng: np.random.Generator) -> SignalInstance:
    law = config.amplitude_law
    if config.signal_model == "group":
        return gen_group_signal(m.groups.q, m.groups.r, k, law, rng)
    return gen_tone_signal(m.p, k, law, rng)


def effective_theta(config: ExperimentConfig, detector: str, theta: int) -> int:
    """Element detectors on group signals get the matched tone budget theta * r."""
    if config.signal_model == "group" and detector in ("zd_ost", "ost_topk"):
        return theta * config.group_size
    return theta


def run_trial(config: ExperimentConfig, k: int, theta: int, detector: str,
              trial_index: int, matrix: MeasurementMatrix | None = None) -> TrialMetrics:
    """One full pipeline: generate, measure, detect, score.

    theta is the literal estimate size handed to the detector (run_batch
    applies the matched-budget scaling before calling). The signal and noise
    depend only on (master seed, k, trial index).
    """
    m = build_matrix(config) if matrix is None else matrix
    rng = RngSpec(config.master_seed).substream(k, trial_index)
    signal = _gen_trial_signal(config, m, k, rng)
    w = gen_noise(m.n, config.sigma2, config.noise_convention, rng)
    y = m.matrix @ signal.x + w
    return evaluate_detection(detector, theta, m, y, signal)


def wilson_interval(successes: float, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a proportion (successes may be a pseudo-count)."""
    if n < 1:
        raise BadValue("n must be >= 1")
    if not 0 <= successes <= n:
        raise BadValue("successes must lie in [0, n]")
    phat = successes / n
    denom = 1 + z**2 / n
    center = (phat + z**2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z**2 / (4 * n**2)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class BatchCell:
    """Aggregates for one (k, theta, detector) grid point."""

    k: int
    theta: int        # estimate size actually used
    theta_grid: int   # grid value it came from (differs under matched budget)
    detector: str
    trials: int
    fdp_mean: float
    fdp_lo: float
    fdp_hi: float
    zero_fraction_mean: float   # NaN when never defined
    zero_fraction_lo: float
    zero_fraction_hi: float
    zero_fraction_trials: int
    pe: float
    pe_lo: float
    pe_hi: float

    def __post_init__(self):
        for name in ("fdp_mean", "pe"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise BadValue(f"{name} = {v!r} outside [0, 1]")
        zf = self.zero_fraction_mean
        if not (math.isnan(zf) or 0.0 <= zf <= 1.0):
            raise BadValue(f"zero_fraction_mean = {zf!r} outside [0, 1]")


class TrialRecord(NamedTuple):
    k: int
    theta: int
    detector: str
    trial: int
    fdp: float
    zero_fraction: float
    hit: bool


@dataclass(frozen=True, eq=False)
class TrialBatchReport:
    """Per-cell aggregates (optionally per-trial rows) for one batch run."""

    config: ExperimentConfig
    p: int
    q: int | None
    cells: tuple[BatchCell, ...]
    per_trial: tuple[TrialRecord, ...] | None = None

    def cell(self, k: int, theta_grid: int, detector: str) -> BatchCell:
        for c in self.cells:
            if (c.k, c.theta_grid, c.detector) == (k, theta_grid, detector):
                return c
        raise IncompleteReport(
            f"no cell for k={k}, theta={theta_grid}, detector={detector}"
        )


def _validate_grids(config: ExperimentConfig, m: MeasurementMatrix) -> None:
    q = m.groups.q if m.groups is not None else None
    if config.signal_model == "group":
        if m.groups is None:
            raise NoGroups("group signals need a partitioned matrix")
        k_limit = q
    else:
        k_limit = m.p
    for k in config.k_grid:
        if not 0 <= k <= k_limit:
            raise BadK(f"k={k} outside [0, {k_limit}]")
    for det in config.detectors:
        if det == "zd_groth" and m.groups is None:
            raise NoGroups("zd_groth needs a partitioned matrix")
        limit = q if det == "zd_groth" else m.p
        for theta in config.theta_grid:
            eff = effective_theta(config, det, theta)
            if not 1 <= eff <= limit:
                raise BadValue(
                    f"theta={theta} gives estimate size {eff} outside [1, {limit}] for {det}"
                )


def run_batch(config: ExperimentConfig, keep_trials: bool = False) -> TrialBatchReport:
    """Sweep the (k, theta, detector) grid; deterministic given the config.

    Signals and noise are generated once per (k, trial) and shared by every
    detector and estimate size, exactly as run_trial would regenerate them.
    """
    m = build_matrix(config)
    _validate_grids(config, m)
    combos = [
        (det, tg, effective_theta(config, det, tg))
        for det in config.detectors
        for tg in config.theta_grid
    ]

    sums: dict[tuple[int, int, str], dict] = {}
    records: list[TrialRecord] = []
    for k in config.k_grid:
        for det, tg, _ in combos:
            sums[(k, tg, det)] = {"fdp": 0.0, "zf": 0.0, "zf_n": 0, "hits": 0}
        for t in range(config.trials):
            rng = RngSpec(config.master_seed).substream(k, t)
            signal = _gen_trial_signal(config, m, k, rng)
            w = gen_noise(m.n, config.sigma2, config.noise_convention, rng)
            y = m.matrix @ signal.x + w
            for det, tg, eff in combos:
                metrics = evaluate_detection(det, eff, m, y, signal)
                acc = sums[(k, tg, det)]
                acc["fdp"] += metrics.fdp
                if not math.isnan(metrics.zero_fraction):
                    acc["zf"] += metrics.zero_fraction
                    acc["zf_n"] += 1
                acc["hits"] += bool(metrics.hit)
                if keep_trials:
                    records.append(
                        TrialRecord(k, eff, det, t, metrics.fdp,
                                    metrics.zero_fraction, metrics.hit)
                    )

    cells = []
    n = config.trials
    for k in config.k_grid:
        for tg in config.theta_grid:
            for det in config.detectors:
                acc = sums[(k, tg, det)]
                eff = effective_theta(config, det, tg)
                fdp_lo, fdp_hi = wilson_interval(acc["fdp"], n)
                if acc["zf_n"]:
                    zf_mean = acc["zf"] / acc["zf_n"]
                    zf_lo, zf_hi = wilson_interval(acc["zf"], acc["zf_n"])
                else:
                    zf_mean = zf_lo = zf_hi = float("nan")
                misses = n - acc["hits"]
                pe_lo, pe_hi = wilson_interval(misses, n)
                cells.append(BatchCell(
                    k=k, theta=eff, theta_grid=tg, detector=det, trials=n,
                    fdp_mean=acc["fdp"] / n, fdp_lo=fdp_lo, fdp_hi=fdp_hi,
                    zero_fraction_mean=zf_mean, zero_fraction_lo=zf_lo,
                    zero_fraction_hi=zf_hi, zero_fraction_trials=acc["zf_n"],
                    pe=misses / n, pe_lo=pe_lo, pe_hi=pe_hi,
                ))
    q = m.groups.q if m.groups is not None else None
    return TrialBatchReport(
        config=config, p=m.p, q=q, cells=tuple(cells),
        per_trial=tuple(records) if keep_trials else None,
    )


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _FLOAT_FMT.format(float(v))


def write_report_csv(report: TrialBatchReport, path) -> None:
    """All cells of a batch as one CSV table."""
    cols = ("k", "theta", "theta_grid", "detector", "trials",
            "fdp_mean", "fdp_lo", "fdp_hi",
            "zero_fraction_mean", "zero_fraction_lo", "zero_fraction_hi",
            "zero_fraction_trials", "pe", "pe_lo", "pe_hi")
    lines = [",".join(cols)]
    for c in report.cells:
        lines.append(",".join(
            c.detector if name == "detector" else _fmt(getattr(c, name))
            for name in cols
        ))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_trials_csv(report: TrialBatchReport, path) -> None:
    if report.per_trial is None:
        raise IncompleteReport("batch was run without keep_trials")
    lines = ["k,theta,detector,trial,fdp,zero_fraction,hit"]
    for r in report.per_trial:
        lines.append(
            f"{r.k},{r.theta},{r.detector},{r.trial},"
            f"{_fmt(r.fdp)},{_fmt(r.zero_fraction)},{_fmt(r.hit)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _zero_domain_size(report: TrialBatchReport, detector: str, k: int) -> int:
    """Size of the relevant zero-support for substitution decisions."""
    cfg = report.config
    if detector == "zd_groth":
        return report.q - k
    if cfg.signal_model == "group":
        return report.p - k * cfg.group_size
    return report.p - k


def _figure_metric(report: TrialBatchReport, figure_id: str, cell: BatchCell):
    """(value, lo, hi, metric label) for one cell under the figure's convention."""
    if figure_id == "1":
        if cell.theta > _zero_domain_size(report, cell.detector, cell.k):
            return (cell.zero_fraction_mean, cell.zero_fraction_lo,
                    cell.zero_fraction_hi, "zero_fraction")
        return (cell.fdp_mean, cell.fdp_lo, cell.fdp_hi, "fdp")
    if figure_id in ("2", "3"):
        return (cell.pe, cell.pe_lo, cell.pe_hi, "pe")
    return (cell.fdp_mean, cell.fdp_lo, cell.fdp_hi, "fdp")  # 4a / 4b


def emit_plotdata(report: TrialBatchReport, figure_id, out_dir) -> list[Path]:
    """One CSV per (detector, theta) curve plus a manifest mapping the curves.

    Figure conventions: 1 plots the false-discovery proportion, substituting
    the recovered zero fraction wherever theta exceeds the zero-support size;
    2 and 3 plot the error probability (3 additionally emits the
    full-support baseline's false-discovery curve); 4a and 4b plot the
    false-discovery proportion of the group detector against the matched-
    budget element detector.
    """
    fid = str(figure_id)
    if fid not in FIGURE_IDS:
        raise BadValue(f"unknown figure id {figure_id!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    curves: dict[tuple[str, int], list[BatchCell]] = {}
    for cell in report.cells:
        curves.setdefault((cell.detector, cell.theta_grid), []).append(cell)
    expected_k = tuple(report.config.k_grid)
    for key, cells in curves.items():
        if tuple(c.k for c in cells) != expected_k:
            raise IncompleteReport(f"curve {key} does not cover the k grid")

    written: list[Path] = []
    manifest = ["file,detector,theta,metric"]

    def emit_curve(cells: list[BatchCell], label: str, metric_override: str | None):
        det, theta_eff = cells[0].detector, cells[0].theta
        path = out / f"fig{fid}_{label}_theta{theta_eff}.csv"
        lines = ["k,value,ci_lo,ci_hi"]
        metric_name = None
        for c in cells:
            if metric_override == "fdp":
                v, lo, hi, metric_name = c.fdp_mean, c.fdp_lo, c.fdp_hi, "fdp"
            else:
                v, lo, hi, metric_name = _figure_metric(report, fid, c)
            lines.append(f"{c.k},{_fmt(v)},{_fmt(lo)},{_fmt(hi)}")
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
        written.append(path)
        if fid == "1":
            metric_name = "fdp_or_zero_fraction"
        manifest.append(f"{path.name},{det},{theta_eff},{metric_name}")

    for (det, _), cells in sorted(curves.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        emit_curve(cells, det, None)
        if fid == "3" and det == "ost_topk_full_support":
            emit_curve(cells, det + "_fdp", "fdp")

    manifest_path = out / f"fig{fid}_manifest.csv"
    manifest_path.write_text("\n".join(manifest) + "\n", encoding="ascii")
    written.append(manifest_path)
    return written


# ---------------------------------------------------------------------------
# flat key = value config files

_GRID_KEYS = ("k_grid", "theta_grid", "detectors")
_INT_KEYS = ("kerdock_m", "rows", "cols", "matrix_seed", "trials",
             "group_size", "master_seed")
_FLOAT_KEYS = ("amplitude_lo", "amplitude_hi", "sigma2")
_STR_KEYS = ("matrix_family", "matrix_file", "signal_model", "noise_convention")
CONFIG_KEYS = _GRID_KEYS + _INT_KEYS + _FLOAT_KEYS + _STR_KEYS


def parse_experiment_config(path) -> ExperimentConfig:
    """Read a flat `key = value` file ('#' comments allowed); unknown keys error."""
    overrides: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadValue(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise BadValue(f"line {lineno}: unknown configuration key {key!r}")
        if key in overrides:
            raise BadValue(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_KEYS:
                overrides[key] = int(value)
            elif key in _FLOAT_KEYS:
                overrides[key] = float(value)
            elif key == "detectors":
                overrides[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key in _GRID_KEYS:
                overrides[key] = tuple(int(v) for v in value.split(",") if v.strip())
            else:
                overrides[key] = value
        except ValueError as exc:
            raise BadValue(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    return ExperimentConfig(**overrides)
