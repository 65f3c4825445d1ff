"""Zero-detection by one-step thresholding, plus the top-k baselines.

All detectors correlate the measurements with every column (score vector
|a_i^H y|, or block norms ||A_i^H y||_2 in the group variant) and keep the
theta smallest scores; the baselines keep the largest. Ties break toward the
smaller index so results are reproducible. Columns are unit-norm by the
MeasurementMatrix invariant, so scores are never renormalized.
"""

from dataclasses import dataclass

import numpy as np

from .core import MeasurementMatrix, SupportSet, hermitian_apply
from .errors import BadValue, NoGroups, ThetaOutOfRange


@dataclass(frozen=True, eq=False)
class DetectionResult:
    """Selected index set plus the full score vector that produced it.

    ranking lists the selected 1-based indices in selection order (best
    first); estimate is the same set sorted by index. The score vector is
    retained so downstream reports can re-rank without re-running detection.
    """

    estimate: SupportSet
    scores: np.ndarray
    theta: int
    mode: str  # "element" | "group"
    ranking: tuple[int, ...]

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        if self.mode not in ("element", "group"):
            raise BadValue(f"unknown detection mode {self.mode!r}")
        if len(self.estimate) != self.theta or len(self.ranking) != self.theta:
            raise BadValue("estimate size does not match theta")
        if tuple(sorted(self.ranking)) != self.estimate.indices:
            raise BadValue("ranking and estimate disagree")


def _check_theta(theta: int, limit: int, what: str) -> None:
    if not isinstance(theta, int) or not 1 <= theta <= limit:
        raise ThetaOutOfRange(f"theta must be in 1..{limit} ({what}), got {theta}")


def _ascending_selection(scores: np.ndarray, theta: int) -> np.ndarray:
    # stable sort keeps equal scores in index order (smaller index wins)
    return np.argsort(scores, kind="stable")[:theta]


def _descending_selection(scores: np.ndarray, theta: int) -> np.ndarray:
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return order[:theta]


def _result(selection: np.ndarray, scores: np.ndarray, theta: int, mode: str,
            domain: int) -> DetectionResult:
    ranking = tuple(int(i) + 1 for i in selection)
    return DetectionResult(
        estimate=SupportSet.from_zero_based(selection, domain),
        scores=scores,
        theta=theta,
        mode=mode,
        ranking=ranking,
    )


def zd_ost(y, m: MeasurementMatrix, theta: int) -> DetectionResult:
    """Keep the theta columns with the smallest correlation magnitudes."""
    _check_theta(theta, m.p, "columns")
    scores = np.abs(hermitian_apply(m, y))
    return _result(_ascending_selection(scores, theta), scores, theta, "element", m.p)


def zd_groth(y, m: MeasurementMatrix, theta: int) -> DetectionResult:
    """Keep the theta groups with the smallest block correlation norms."""
    if m.groups is None:
        raise NoGroups("group thresholding needs a group partition")
    q, r = m.groups.q, m.groups.r
    _check_theta(theta, q, "groups")
    s = hermitian_apply(m, y)
    scores = np.linalg.norm(s.reshape(q, r), axis=1)
    return _result(_ascending_selection(scores, theta), scores, theta, "group", q)


def ost_topk(y, m: MeasurementMatrix, theta: int) -> DetectionResult:
    """Baseline: keep the theta LARGEST correlation magnitudes (ties to low index)."""
    _check_theta(theta, m.p, "columns")
    scores = np.abs(hermitian_apply(m, y))
    return _result(_descending_selection(scores, theta), scores, theta, "element", m.p)
