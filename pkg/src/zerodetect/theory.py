"""Closed-form guarantee calculators: signal statistics, sparsity and error
bounds for single-zero detection, and the group-detection analogues.

All logarithms are natural. Calculators return validity flags instead of
raising when a hypothesis fails, so sweeps can mark regions where a guarantee
simply does not apply.

Noise convention: the package default is circular complex Gaussian noise with
total per-entry variance sigma^2 (each real/imag component has variance
sigma^2 / 2), giving E||w||^2 = n sigma^2. The alternative, variance sigma^2
per component (E||w||^2 = 2 n sigma^2), is selectable everywhere a convention
argument appears, because published model statements are split between the
two readings.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import SignalInstance
from .errors import BadValue, EmptySupport

NOISE_CONVENTIONS = ("total", "per_component")


def noise_energy_per_measurement(sigma: float, convention: str) -> float:
    """E|w_t|^2 for one measurement entry under the given convention."""
    if convention == "total":
        return sigma**2
    if convention == "per_component":
        return 2 * sigma**2
    raise BadValue(f"unknown noise convention {convention!r}")


@dataclass(frozen=True)
class BoundParams:
    """Free constants of the guarantee calculators, validated at construction.

    a > 1 and t in (0, 1) drive the single-zero bounds (c1 = 32/t,
    c2 = 800/(1-t), c = 16 (2 + 1/a)^2); c1 >= 2 and c2 in (0, 1) drive the
    group bounds; c_mu and c_nu are the group-coherence-property constants.
    """

    mu0: float
    sigma: float
    a: float = 2.0
    t: float = 0.5
    c1: float = 2.0
    c2: float = 0.5
    c_mu: float = 1.0
    c_nu: float = 1.0

    def __post_init__(self):
        checks = [
            (self.mu0 > 0, "mu0 must be > 0"),
            (self.sigma > 0, "sigma must be > 0"),
            (self.a > 1, "a must be > 1"),
            (0 < self.t < 1, "t must be in (0, 1)"),
            (self.c1 >= 2, "c1 must be >= 2"),
            (0 < self.c2 < 1, "c2 must be in (0, 1)"),
            (self.c_mu > 0, "c_mu must be > 0"),
            (self.c_nu > 0, "c_nu must be > 0"),
        ]
        for ok, msg in checks:
            if not ok:
                raise BadValue(msg)


@dataclass(frozen=True, eq=False)
class SignalStats:
    """SNR, per-entry largest-to-average ratios, and the minimum SNR.

    sorted_magnitudes holds |x_(1)| >= ... >= |x_(k)|; lar[m-1] is
    |x_(m)|^2 / (||x||^2 / k), so the lar entries are nonincreasing and sum
    to k.
    """

    snr: float
    snr_min: float
    lar: np.ndarray
    x_min: float
    sorted_magnitudes: np.ndarray

    def __post_init__(self):
        lar = np.asarray(self.lar, dtype=float)
        mags = np.asarray(self.sorted_magnitudes, dtype=float)
        lar.setflags(write=False)
        mags.setflags(write=False)
        object.__setattr__(self, "lar", lar)
        object.__setattr__(self, "sorted_magnitudes", mags)
        k = lar.shape[0]
        if k < 1:
            raise EmptySupport("statistics need at least one nonzero entry")
        if np.any(np.diff(lar) > 1e-12):
            raise BadValue("largest-to-average ratios must be nonincreasing")
        if abs(float(lar.sum()) - k) > 1e-8 * max(k, 1):
            raise BadValue("largest-to-average ratios must sum to k")

    @property
    def k(self) -> int:
        return int(self.lar.shape[0])


def stats_from_magnitudes(magnitudes, sigma: float, n: int,
                          convention: str = "total") -> SignalStats:
    """Signal statistics from the nonzero magnitudes alone (order irrelevant)."""
    mags = np.sort(np.abs(np.asarray(magnitudes, dtype=float)))[::-1]
    k = mags.shape[0]
    if k < 1:
        raise EmptySupport("statistics need at least one nonzero entry")
    if np.any(mags <= 0):
        raise BadValue("magnitudes must be positive")
    if sigma <= 0:
        raise BadValue("sigma must be > 0")
    if n < 1:
        raise BadValue("n must be >= 1")
    energy = float(np.sum(mags**2))
    snr = energy / (n * noise_energy_per_measurement(sigma, convention))
    lar = mags**2 / (energy / k)
    x_min = float(mags[-1])
    return SignalStats(snr, x_min**2 / sigma**2, lar, x_min, mags)


def signal_stats(signal: SignalInstance, sigma: float, n: int,
                 convention: str = "total") -> SignalStats:
    """Signal statistics relative to n noisy measurements at noise level sigma.

    SNR = ||x||^2 / E||w||^2 with E||w||^2 = n * (per-entry noise energy);
    SNR_min = x_min^2 / sigma^2 regardless of convention.
    """
    if signal.k < 1:
        raise EmptySupport("signal has empty support")
    return stats_from_magnitudes(
        np.abs(signal.x[signal.support.to_zero_based()]), sigma, n, convention
    )


class Epsilon0(NamedTuple):
    value: float
    hypothesis_ok: bool  # tied to SNR_min > 16 log p


def epsilon0(snr_min: float, snr: float, p: int) -> Epsilon0:
    """Largest usable orthogonality slack: (sqrt(SNR_min) - 4 sqrt(log p)) / (2 sqrt(SNR)).

    May be <= 0; the flag records whether the hypothesis SNR_min > 16 log p
    holds (the value is positive exactly when it does).
    """
    if snr <= 0:
        raise BadValue("snr must be > 0")
    if snr_min < 0:
        raise BadValue("snr_min must be >= 0")
    if p < 2:
        raise BadValue("p must be >= 2")
    log_p = math.log(p)
    value = (math.sqrt(snr_min) - 4 * math.sqrt(log_p)) / (2 * math.sqrt(snr))
    return Epsilon0(value, snr_min > 16 * log_p)


class SparsityBound(NamedTuple):
    value: float
    vacuous: bool  # eps0 <= 4 (2 + 1/a) mu0, making the bound 0


def sparsity_bound(params: BoundParams, eps0: float, nu: float, p: int) -> SparsityBound:
    """Admissible sparsity for the single-zero error bound.

    min{ ((eps0 - 4 (2 + 1/a) mu0) / nu)^2 , p / (1 + a) }; returns 0 with a
    flag when the first term's numerator is not positive.
    """
    if nu <= 0:
        raise BadValue("nu must be > 0")
    if p < 1:
        raise BadValue("p must be >= 1")
    gap = eps0 - 4 * (2 + 1 / params.a) * params.mu0
    if gap <= 0:
        return SparsityBound(0.0, True)
    first = (gap / nu) ** 2
    second = p / (1 + params.a)
    return SparsityBound(min(first, second), False)


class PeBound(NamedTuple):
    alpha: float
    c: float           # 16 (2 + 1/a)^2
    valid: bool        # alpha > 1
    bound: float       # sqrt(2/pi)/p + 4 p^(1-alpha), nan when invalid
    bound_with_log_factor: float  # sqrt(2/pi)/(p sqrt(log p)) + 4 p^(1-alpha)


def pe_bound(params: BoundParams, eps0: float, k: int, nu: float, p: int) -> PeBound:
    """Single-zero error probability bound and its exponent alpha.

    alpha = (eps0 - sqrt(k) nu)^2 / (c mu0^2) with c = 16 (2 + 1/a)^2. The
    bound applies only when alpha > 1. Both the plain form and the form
    retaining the (log p)^(-1/2) factor on the first term are reported.
    """
    if k < 0:
        raise BadValue("k must be >= 0")
    if nu < 0:
        raise BadValue("nu must be >= 0")
    if p < 2:
        raise BadValue("p must be >= 2")
    c = 16 * (2 + 1 / params.a) ** 2
    alpha = (eps0 - math.sqrt(k) * nu) ** 2 / (c * params.mu0**2)
    valid = alpha > 1
    if not valid:
        return PeBound(alpha, c, False, float("nan"), float("nan"))
    tail = 4 * p ** (1 - alpha)
    plain = math.sqrt(2 / math.pi) / p + tail
    logged = math.sqrt(2 / math.pi) / (p * math.sqrt(math.log(p))) + tail
    return PeBound(alpha, c, True, plain, logged)


class ElementFdpBound(NamedTuple):
    m: int
    bound: float       # (k - m) / theta
    threshold: float   # max{c1 k log p / (n SNR), c2 mu^2 log p}


def fdp_bound_elementwise(stats: SignalStats, params: BoundParams, mu: float,
                          k: int, n: int, p: int, theta: int) -> ElementFdpBound:
    """False-discovery bound for element-wise zero detection.

    m is the largest index whose largest-to-average ratio meets the
    threshold, with c1 = 32/t and c2 = 800/(1-t); the bound is (k - m)/theta.
    """
    if k != stats.k:
        raise BadValue(f"k={k} does not match the statistics (k={stats.k})")
    if theta < 1:
        raise BadValue("theta must be >= 1")
    if n < 1 or p < 2:
        raise BadValue("need n >= 1 and p >= 2")
    if mu < 0:
        raise BadValue("mu must be >= 0")
    c1 = 32 / params.t
    c2 = 800 / (1 - params.t)
    log_p = math.log(p)
    threshold = max(c1 * k * log_p / (n * stats.snr), c2 * mu**2 * log_p)
    m = int(np.count_nonzero(stats.lar >= threshold))
    return ElementFdpBound(m, (k - m) / theta, threshold)


class GroupConstants(NamedTuple):
    c3: float
    mu_gate: bool            # c_mu < 1/c3
    nu_gate: bool            # c_nu <= sqrt(c1) c2 c3
    size_gate: bool | None   # c1 r k <= n, None when (r, k, n) not supplied


def group_guarantee_constants(params: BoundParams, r: int | None = None,
                              k: int | None = None, n: int | None = None) -> GroupConstants:
    """The constant c3 = 32 sqrt(2e) (2 c1 - 1) / ((1 - c2)(c1 - 1)) and its gates."""
    c1, c2 = params.c1, params.c2
    c3 = 32 * math.sqrt(2 * math.e) * (2 * c1 - 1) / ((1 - c2) * (c1 - 1))
    size_gate = None
    if r is not None and k is not None and n is not None:
        if r < 1 or k < 0 or n < 1:
            raise BadValue("need r >= 1, k >= 0, n >= 1")
        size_gate = c1 * r * k <= n
    return GroupConstants(
        c3,
        params.c_mu < 1 / c3,
        params.c_nu <= math.sqrt(c1) * c2 * c3,
        size_gate,
    )


class GroupFdpBound(NamedTuple):
    m: int
    bound: float            # (k - m) / theta
    threshold: float        # c3 mu_g ||x||_2 sqrt(log q) + 2 sigma sqrt(2 log q + (r/2) log 2)
    success_floor: float    # 1 - (1 + e^2) / q
    success_floor_product: float  # (1 - 1/q)(1 - e^2/q)


def fdp_bound_groupwise(group_norms: np.ndarray, sigma: float, mu_g: float,
                        q: int, r: int, c3: float, theta: int) -> GroupFdpBound:
    """False-discovery bound for group zero detection.

    group_norms must be the nonincreasing block norms ||x_(1)||_2 >= ...;
    m is the largest index whose norm meets the threshold. Both forms of the
    success-probability floor are reported (they differ by o(1/q)).
    """
    norms = np.asarray(group_norms, dtype=float)
    if norms.ndim != 1 or norms.shape[0] < 1:
        raise BadValue("group_norms must be a nonempty vector")
    if np.any(np.diff(norms) > 1e-12):
        raise BadValue("group norms must be sorted nonincreasing")
    if sigma < 0 or mu_g < 0:
        raise BadValue("sigma and mu_g must be >= 0")
    if q < 2 or r < 1 or theta < 1:
        raise BadValue("need q >= 2, r >= 1, theta >= 1")
    k = norms.shape[0]
    x_norm = float(np.sqrt(np.sum(norms**2)))
    log_q = math.log(q)
    threshold = c3 * mu_g * x_norm * math.sqrt(log_q) + 2 * sigma * math.sqrt(
        2 * log_q + (r / 2) * math.log(2)
    )
    m = int(np.count_nonzero(norms >= threshold))
    e2 = math.e**2
    return GroupFdpBound(
        m,
        (k - m) / theta,
        threshold,
        1 - (1 + e2) / q,
        (1 - 1 / q) * (1 - e2 / q),
    )


class NoiseThresholds(NamedTuple):
    element: float               # 2 sigma sqrt(log p)
    group: float | None          # 2 sigma sqrt(2 log q + (r/2) log 2)


def noise_thresholds(sigma: float, p: int, q: int | None = None,
                     r: int | None = None) -> NoiseThresholds:
    """High-probability noise-correlation thresholds for elements and groups."""
    if sigma <= 0:
        raise BadValue("sigma must be > 0")
    if p < 1:
        raise BadValue("p must be >= 1")
    element = 2 * sigma * math.sqrt(math.log(p))
    group = None
    if q is not None and r is not None:
        if q < 1 or r < 1:
            raise BadValue("need q >= 1 and r >= 1")
        group = 2 * sigma * math.sqrt(2 * math.log(q) + (r / 2) * math.log(2))
    return NoiseThresholds(element, group)


class Chi2TailBound(NamedTuple):
    value: float
    clamped: bool  # raw value exceeded 1


def chi2_tail_bound(tau: float, sigma: float, r: int, q: int = 1) -> Chi2TailBound:
    """Chernoff bound on P{max over q blocks of ||G_i^H w||_2 > tau}.

    Per block the bound is exp(-tau^2 / (4 sigma^2)) * 2^(r/2); the union
    over q blocks multiplies by q. At tau = 2 sigma sqrt(2 log q + (r/2) log 2)
    the union bound equals exactly 1/q. Clamped to [0, 1] with a flag.
    """
    if tau <= 0 or sigma <= 0:
        raise BadValue("tau and sigma must be > 0")
    if r < 1 or q < 1:
        raise BadValue("need r >= 1 and q >= 1")
    raw = q * math.exp(-(tau**2) / (4 * sigma**2)) * 2 ** (r / 2)
    return Chi2TailBound(min(raw, 1.0), raw > 1.0)
