"""Streaming accuracy statistics and evaluation metrics.

Covers the sliding and fading estimators of prediction accuracy, the
four significance tests used to detect overfitting (postquential
accuracy exceeding prequential accuracy), and the fading macro-F1
confusion matrix used to score runs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_FADING_FACTOR = 0.995
DEFAULT_WINDOW_SIZE = 200
DEFAULT_EVAL_FADING = 0.99

# One-sided 99% critical values: normal quantile for the t-style paired
# test, and the two-proportion z-test threshold.
T_TEST_CRITICAL = 2.326
Z_TEST_CRITICAL = 2.576


class TrackerKind(Enum):
    SLIDING = "sliding"
    FADING = "fading"


class SlidingTracker:
    """Binary accuracy over the last ``window_size`` outcomes.

    While the window is warming up the mean divides by the number of
    observations actually present, not the full window size.
    """

    def __init__(self, window_size: int = DEFAULT_WINDOW_SIZE):
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        self.window_size = window_size
        self.window: deque[int] = deque()
        self.correct_sum = 0
        self.count = 0

    def update(self, correct) -> None:
        value = 1 if correct else 0
        if len(self.window) == self.window_size:
            self.correct_sum -= self.window.popleft()
        self.window.append(value)
        self.correct_sum += value
        self.count += 1

    def mean_var(self) -> tuple[float, float, float]:
        """(mean, variance, effective sample size); variance is mu*(1-mu)."""
        filled = len(self.window)
        if filled == 0:
            raise ValueError("tracker has no observations")
        mu = self.correct_sum / filled
        return mu, mu * (1.0 - mu), float(filled)

    def reset(self) -> None:
        self.window.clear()
        self.correct_sum = 0
        self.count = 0


class FadingTracker:
    """Binary accuracy with exponentially decayed sums.

    Every stored sum is multiplied by the fading factor before each
    update, so old outcomes lose weight; with factor 1 the sums cover
    the whole stream.
    """

    def __init__(self, fading_factor: float = DEFAULT_FADING_FACTOR):
        if not 0.0 <= fading_factor <= 1.0:
            raise ValueError("fading_factor must be in [0, 1]")
        self.fading_factor = fading_factor
        self.faded_count = 0.0
        self.faded_correct = 0.0
        self.count = 0

    def update(self, correct) -> None:
        f = self.fading_factor
        self.faded_count = f * self.faded_count + 1.0
        self.faded_correct = f * self.faded_correct + (1.0 if correct else 0.0)
        self.count += 1

    def mean_var(self) -> tuple[float, float, float]:
        if self.count == 0:
            raise ValueError("tracker has no observations")
        mu = self.faded_correct / self.faded_count
        return mu, mu * (1.0 - mu), self.faded_count

    def reset(self) -> None:
        self.faded_count = 0.0
        self.faded_correct = 0.0
        self.count = 0


def make_tracker(kind: TrackerKind,
                 window_size: int = DEFAULT_WINDOW_SIZE,
                 fading_factor: float = DEFAULT_FADING_FACTOR):
    if kind is TrackerKind.SLIDING:
        return SlidingTracker(window_size)
    return FadingTracker(fading_factor)


class PairedDifferenceTracker:
    """Mean and variance of per-point post-minus-pre correctness.

    Differences live in {-1, 0, 1}; the variance comes from the decayed
    (or windowed) sums of D and D squared, clamped at zero against
    rounding.
    """

    def __init__(self, kind: TrackerKind = TrackerKind.FADING,
                 window_size: int = DEFAULT_WINDOW_SIZE,
                 fading_factor: float = DEFAULT_FADING_FACTOR):
        if not 0.0 <= fading_factor <= 1.0:
            raise ValueError("fading_factor must be in [0, 1]")
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        self.kind = kind
        self.window_size = window_size
        self.fading_factor = fading_factor
        self.window: deque[int] = deque()
        self.sum_d = 0.0
        self.sum_d2 = 0.0
        self.faded_count = 0.0
        self.count = 0

    def update(self, difference: int) -> None:
        if difference not in (-1, 0, 1):
            raise ValueError("difference must be -1, 0, or 1")
        if self.kind is TrackerKind.SLIDING:
            if len(self.window) == self.window_size:
                old = self.window.popleft()
                self.sum_d -= old
                self.sum_d2 -= old * old
            self.window.append(difference)
            self.sum_d += difference
            self.sum_d2 += difference * difference
        else:
            f = self.fading_factor
            self.faded_count = f * self.faded_count + 1.0
            self.sum_d = f * self.sum_d + difference
            self.sum_d2 = f * self.sum_d2 + difference * difference
        self.count += 1

    def mean_var(self) -> tuple[float, float, float]:
        if self.count == 0:
            raise ValueError("tracker has no observations")
        if self.kind is TrackerKind.SLIDING:
            n_eff = float(len(self.window))
        else:
            n_eff = self.faded_count
        mu = self.sum_d / n_eff
        var = max(self.sum_d2 / n_eff - mu * mu, 0.0)
        return mu, var, n_eff

    def reset(self) -> None:
        self.window.clear()
        self.sum_d = 0.0
        self.sum_d2 = 0.0
        self.faded_count = 0.0
        self.count = 0


@dataclass(frozen=True)
class TestStatistics:
    """The raw quantities behind the z and t comparisons."""

    mean_difference: float
    pooled_proportion: float
    pooled_std_error: float
    z_score: float
    t_statistic: float


def sum_variance_test(mu_pre: float, var_pre: float,
                      mu_post: float, var_post: float) -> bool:
    """Post beats pre by more than the root of the summed variances."""
    return (mu_post - mu_pre) > math.sqrt(var_post + var_pre)


def sum_stddev_test(mu_pre: float, var_pre: float,
                    mu_post: float, var_post: float) -> bool:
    """Post beats pre by more than the summed standard deviations."""
    return (mu_post - mu_pre) > math.sqrt(var_post) + math.sqrt(var_pre)


def t_test(mu: float, var: float, n_eff: float) -> bool:
    """One-sided test of the paired difference mean being above zero.

    With zero variance the statistic degenerates to the sign of the
    mean (its continuity limit).
    """
    if n_eff <= 0:
        raise ValueError("n_eff must be positive")
    sd = math.sqrt(var)
    if sd == 0.0:
        return mu > 0.0
    return math.sqrt(n_eff) * mu / sd > T_TEST_CRITICAL


def z_test(mu_pre: float, n_pre: float, mu_post: float, n_post: float) -> bool:
    """Pooled two-proportion z-test, one-sided in the overfitting direction."""
    n = min(n_pre, n_post)
    if n <= 0:
        raise ValueError("sample sizes must be positive")
    difference = mu_post - mu_pre
    pooled = (mu_pre + mu_post) / 2.0
    std_error = math.sqrt(max(2.0 * pooled * (1.0 - pooled) / n, 0.0))
    if std_error == 0.0:
        return difference > 0.0
    return difference / std_error > Z_TEST_CRITICAL


def describe_tests(pre: tuple[float, float, float],
                   post: tuple[float, float, float],
                   diff: tuple[float, float, float]) -> TestStatistics:
    """Assemble the z and t internals from (mean, variance, n) triples."""
    mu_pre, _, n_pre = pre
    mu_post, _, n_post = post
    mu_d, var_d, n_d = diff
    a = mu_post - mu_pre
    p = (mu_pre + mu_post) / 2.0
    n = min(n_pre, n_post)
    b = math.sqrt(max(2.0 * p * (1.0 - p) / n, 0.0)) if n > 0 else 0.0
    if b > 0.0:
        z = a / b
    else:
        z = math.inf if a > 0 else (-math.inf if a < 0 else 0.0)
    sd = math.sqrt(var_d)
    if sd > 0.0 and n_d > 0:
        t = math.sqrt(n_d) * mu_d / sd
    else:
        t = math.inf if mu_d > 0 else (-math.inf if mu_d < 0 else 0.0)
    return TestStatistics(a, p, b, z, t)


class FadingConfusionMatrix:
    """Confusion counts decayed before every increment.

    With fading factor 1 this is the plain cumulative confusion matrix.
    """

    def __init__(self, label_count: int, fading_factor: float = DEFAULT_EVAL_FADING):
        if label_count < 2:
            raise ValueError("label_count must be >= 2")
        if not 0.0 <= fading_factor <= 1.0:
            raise ValueError("fading_factor must be in [0, 1]")
        self.label_count = label_count
        self.fading_factor = fading_factor
        self.matrix = np.zeros((label_count, label_count), dtype=np.float64)
        self.updates = 0

    def update(self, true_label: int, predicted_label: int) -> None:
        if not (0 <= true_label < self.label_count
                and 0 <= predicted_label < self.label_count):
            raise ValueError("labels out of range")
        self.matrix *= self.fading_factor
        self.matrix[true_label, predicted_label] += 1.0
        self.updates += 1

    def macro_f1(self) -> float:
        """Unweighted mean of per-label F1 over labels with any mass.

        A label with empty row and column never appeared and is
        excluded; a zero F1 denominator scores zero for that label.
        """
        if self.updates == 0:
            raise ValueError("confusion matrix has no observations")
        m = self.matrix
        tp = np.diag(m).copy()
        row = m.sum(axis=1)
        col = m.sum(axis=0)
        denom = 2.0 * tp + (row - tp) + (col - tp)
        f1 = np.zeros(self.label_count)
        positive = denom > 0.0
        f1[positive] = 2.0 * tp[positive] / denom[positive]
        seen = (row > 0.0) | (col > 0.0)
        return float(f1[seen].mean())

    def reset(self) -> None:
        self.matrix[:, :] = 0.0
        self.updates = 0
