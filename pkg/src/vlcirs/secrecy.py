"""Secrecy-rate lower bound for the peak-limited optical wiretap channel.

With peak amplitude ``A``, noise variance ``sigma^2`` and DC gains ``h_B``
(Bob) and ``h_E`` (Eve)::

    R = 1/2 ln[(6 A^2 h_B^2 + 3 pi e sigma^2) / (pi e A^2 h_E^2 + 3 pi e sigma^2)]

in nats per channel use.  The bound is negative when Eve's channel is too
strong; :func:`secrecy_rate_lb` clamps it at zero and
:func:`secrecy_rate_raw` keeps the sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from vlcirs.errors import GeometryError, ValidationError
from vlcirs.radiometry import irs_gains_for_spots, los_gain
from vlcirs.reference import REFERENCE_LOS_BOB
from vlcirs.scenario import ChannelGains, Scenario

__all__ = [
    "NoiseFit",
    "SecrecyInputs",
    "SpotEvaluation",
    "evaluate_spot",
    "fit_noise_variance",
    "invert_noise_variance",
    "reference_gain_calibration",
    "secrecy_of_spot",
    "secrecy_of_spots",
    "secrecy_rate_array",
    "secrecy_rate_lb",
    "secrecy_rate_raw",
    "secrecy_without_irs",
]

PI_E = math.pi * math.e


@dataclass(frozen=True)
class SecrecyInputs:
    """Validated arguments of the bound."""

    gain_bob: float
    gain_eve: float
    peak: float
    noise_variance: float

    def __post_init__(self):
        for name in ("gain_bob", "gain_eve", "noise_variance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be finite and non-negative, got {value!r}")
        if not (math.isfinite(self.peak) and self.peak > 0):
            raise ValidationError(f"peak must be strictly positive, got {self.peak!r}")

    def log_terms(self) -> tuple[float, float]:
        a2 = self.peak**2
        num = 6.0 * a2 * self.gain_bob**2 + 3.0 * PI_E * self.noise_variance
        den = PI_E * a2 * self.gain_eve**2 + 3.0 * PI_E * self.noise_variance
        return num, den


def secrecy_rate_raw(h_bob: float, h_eve: float, peak: float, noise_variance: float) -> float:
    """Unclamped bound; ``-inf``/``+inf`` when one side of the ratio vanishes."""
    num, den = SecrecyInputs(h_bob, h_eve, peak, noise_variance).log_terms()
    if num == 0 and den == 0:
        raise ValidationError("secrecy ratio is 0/0: both gains and the noise variance are zero")
    if den == 0:
        return math.inf
    if num == 0:
        return -math.inf
    return 0.5 * math.log(num / den)


def secrecy_rate_lb(h_bob: float, h_eve: float, peak: float, noise_variance: float) -> float:
    """Secrecy-rate lower bound clamped at zero, nats per channel use."""
    return max(0.0, secrecy_rate_raw(h_bob, h_eve, peak, noise_variance))


def secrecy_rate_array(h_bob, h_eve, peak: float, noise_variance, clamp: bool = True) -> np.ndarray:
    """Vectorised bound (no validation); used for fitting."""
    h_bob = np.asarray(h_bob, dtype=float)
    h_eve = np.asarray(h_eve, dtype=float)
    a2 = peak**2
    num = 6.0 * a2 * h_bob**2 + 3.0 * PI_E * noise_variance
    den = PI_E * a2 * h_eve**2 + 3.0 * PI_E * noise_variance
    raw = 0.5 * np.log(num / den)
    return np.maximum(raw, 0.0) if clamp else raw


def invert_noise_variance(h_bob, h_eve, rate, peak: float) -> np.ndarray:
    """Noise variance that makes the raw bound equal ``rate`` (closed form).

    Solves the bound for ``sigma^2``; undefined (NaN) where ``rate = 0``.
    The result may be negative when the triple is inconsistent with any
    physical noise level.
    """
    h_bob = np.asarray(h_bob, dtype=float)
    h_eve = np.asarray(h_eve, dtype=float)
    e2r = np.exp(2.0 * np.asarray(rate, dtype=float))
    a2 = peak**2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (6.0 * a2 * h_bob**2 - e2r * PI_E * a2 * h_eve**2) / (3.0 * PI_E * (e2r - 1.0))
    return np.where(e2r != 1.0, out, np.nan)


@dataclass(frozen=True)
class NoiseFit:
    noise_variance: float
    residuals: np.ndarray
    kept: np.ndarray
    rounds: int

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)))


def fit_noise_variance(h_bob, h_eve, rate, peak: float, trim: float | None = 5e-3, upper: float = 1e-3) -> NoiseFit:
    """Least-squares fit of ``sigma^2`` to ``(h_bob, h_eve, rate)`` triples.

    The residual is taken on the clamped rate.  With ``trim`` set, points
    whose residual exceeds it are dropped and the fit is repeated until the
    kept set stops changing (trimmed least squares).  ``residuals`` are
    reported for every point at the final estimate.
    """
    h_bob = np.asarray(h_bob, dtype=float)
    h_eve = np.asarray(h_eve, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if not (h_bob.shape == h_eve.shape == rate.shape) or h_bob.size == 0:
        raise ValidationError("need equally sized, nonempty gain and rate arrays")
    kept = np.ones(rate.shape, dtype=bool)
    # residuals are tiny near the optimum, so work in units of 1e-6 A^2
    scale = 1e-6

    def solve(mask):
        def loss(s):
            return float(np.sum((secrecy_rate_array(h_bob[mask], h_eve[mask], peak, s * scale) - rate[mask]) ** 2))

        res = minimize_scalar(loss, bounds=(0.0, upper / scale), method="bounded", options={"xatol": 1e-12})
        return float(res.x) * scale

    rounds = 0
    while True:
        rounds += 1
        sigma2 = solve(kept)
        resid = secrecy_rate_array(h_bob, h_eve, peak, sigma2) - rate
        if trim is None:
            break
        new = np.abs(resid) <= trim
        if not new.any() or np.array_equal(new, kept) or rounds > 20:
            break
        kept = new
    return NoiseFit(sigma2, resid, kept, rounds)


def reference_gain_calibration(sc: Scenario) -> float:
    """Factor mapping the raw LoS gain of Bob onto the reference curve value."""
    return REFERENCE_LOS_BOB / los_gain(sc, sc.bob)


@dataclass(frozen=True)
class SpotEvaluation:
    """Calibrated gains of both users and the resulting bound."""

    bob: ChannelGains
    eve: ChannelGains
    rate: float
    raw_rate: float


def _rate_from(sc: Scenario, bob: ChannelGains, eve: ChannelGains) -> SpotEvaluation:
    raw = secrecy_rate_raw(bob.total, eve.total, sc.peak, sc.noise_variance)
    return SpotEvaluation(bob, eve, max(0.0, raw), raw)


def _los_pair(sc: Scenario) -> tuple[float, float]:
    return los_gain(sc, sc.bob), los_gain(sc, sc.eve)


def secrecy_of_spots(sc: Scenario, spots) -> np.ndarray:
    """Secrecy rate for each reflected spot; ``-inf`` where no orientation exists."""
    spots = np.atleast_2d(np.asarray(spots, dtype=float))
    los_b, los_e = _los_pair(sc)
    irs = irs_gains_for_spots(sc, spots, [sc.bob, sc.eve])
    out = np.full(spots.shape[0], -np.inf)
    for k, (irs_b, irs_e) in enumerate(irs):
        if np.isnan(irs_b):
            continue
        bob = ChannelGains(los_b, irs_b).scaled(sc.gain_scale)
        eve = ChannelGains(los_e, irs_e).scaled(sc.gain_scale)
        out[k] = _rate_from(sc, bob, eve).rate
    return out


def secrecy_of_spot(sc: Scenario, q) -> float:
    """Objective of the spot search: the bound with every mirror aimed at ``q``."""
    return float(secrecy_of_spots(sc, [q])[0])


def evaluate_spot(sc: Scenario, q) -> SpotEvaluation:
    """Gains and bound for the spot ``q``; ``q=None`` means no mirror array."""
    los_b, los_e = _los_pair(sc)
    if q is None:
        irs_b = irs_e = 0.0
    else:
        irs_b, irs_e = irs_gains_for_spots(sc, [q], [sc.bob, sc.eve])[0]
        if np.isnan(irs_b):
            raise GeometryError(f"no mirror orientation reflects the source onto {tuple(q)}")
    bob = ChannelGains(los_b, irs_b).scaled(sc.gain_scale)
    eve = ChannelGains(los_e, irs_e).scaled(sc.gain_scale)
    return _rate_from(sc, bob, eve)


def secrecy_without_irs(sc: Scenario) -> float:
    """The bound with only the direct links."""
    return evaluate_spot(sc, None).rate
