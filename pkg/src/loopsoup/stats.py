"""Statistical tests backing the acceptance suite.

Thin wrappers over scipy that return a uniform :class:`TestReport` record:
name, statistic, p-value or z-score, sample sizes, and pass/fail at the
declared level.  The suite runs every test at level 0.01 as stated by each
criterion and additionally reports the Bonferroni-adjusted verdict for the
whole batch, which is the robustness margin against seed-to-seed flakes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import SparseTable, TooFewSamples

__all__ = [
    "TestReport",
    "ks_test",
    "ks_two_sample",
    "poisson_dispersion",
    "chi2_independence",
    "z_score_report",
    "interval_report",
    "summarize",
]

ALPHA = 0.01


@dataclass(frozen=True)
class TestReport:
    name: str
    statistic: float
    p_value: float | None = None
    z_score: float | None = None
    n: tuple = ()
    passed: bool = False
    alpha: float = ALPHA
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "z_score": self.z_score,
            "n": list(self.n),
            "passed": bool(self.passed),
            "alpha": self.alpha,
        }
        if self.details:
            out["details"] = self.details
        return out

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        bits = [f"{tag}  {self.name}"]
        if self.p_value is not None:
            bits.append(f"p={self.p_value:.4g}")
        if self.z_score is not None:
            bits.append(f"z={self.z_score:+.2f}")
        bits.append(f"stat={self.statistic:.6g}")
        return "  ".join(bits)


def ks_test(samples, cdf, name: str, alpha: float = ALPHA, **details) -> TestReport:
    """One-sample Kolmogorov-Smirnov test against a cdf callable."""
    samples = np.asarray(samples)
    if samples.size < 100:
        raise TooFewSamples(f"{name}: KS needs at least 100 samples")
    stat, p = sps.kstest(samples, cdf)
    return TestReport(
        name=name,
        statistic=float(stat),
        p_value=float(p),
        n=(samples.size,),
        passed=bool(p > alpha),
        alpha=alpha,
        details=details,
    )


def ks_two_sample(a, b, name: str, alpha: float = ALPHA, **details) -> TestReport:
    a = np.asarray(a)
    b = np.asarray(b)
    if min(a.size, b.size) < 100:
        raise TooFewSamples(f"{name}: KS needs at least 100 samples per side")
    stat, p = sps.ks_2samp(a, b)
    return TestReport(
        name=name,
        statistic=float(stat),
        p_value=float(p),
        n=(a.size, b.size),
        passed=bool(p > alpha),
        alpha=alpha,
        details=details,
    )


def poisson_dispersion(counts, name: str, alpha: float = ALPHA, **details) -> TestReport:
    """Variance-to-mean ratio with its normal-approximation z-score."""
    counts = np.asarray(counts, dtype=float)
    n = counts.size
    if n < 1000:
        raise TooFewSamples(f"{name}: dispersion test needs at least 1000 counts")
    mean = counts.mean()
    disp = counts.var(ddof=1) / mean
    z = (disp - 1.0) * math.sqrt((n - 1) / 2.0)
    p = 2.0 * (1.0 - sps.norm.cdf(abs(z)))
    return TestReport(
        name=name,
        statistic=float(disp),
        p_value=float(p),
        z_score=float(z),
        n=(n,),
        passed=bool(p > alpha),
        alpha=alpha,
        details=details,
    )


def chi2_independence(table, name: str, alpha: float = ALPHA, **details) -> TestReport:
    table = np.asarray(table, dtype=float)
    res = sps.chi2_contingency(table, correction=False)
    if np.min(res.expected_freq) < 5.0:
        raise SparseTable(f"{name}: expected cell counts below 5")
    return TestReport(
        name=name,
        statistic=float(res.statistic),
        p_value=float(res.pvalue),
        n=(int(table.sum()),),
        passed=bool(res.pvalue > alpha),
        alpha=alpha,
        details=details,
    )


def z_score_report(
    observed: float,
    expected: float,
    stderr: float,
    name: str,
    sigmas: float = 3.0,
    n: tuple = (),
    **details,
) -> TestReport:
    """Pass when the observation lies within ``sigmas`` standard errors."""
    z = (observed - expected) / stderr if stderr > 0 else math.inf
    details = {"observed": observed, "expected": expected, "stderr": stderr, **details}
    return TestReport(
        name=name,
        statistic=float(observed),
        z_score=float(z),
        n=n,
        passed=bool(abs(z) <= sigmas),
        details=details,
    )


def interval_report(
    value: float, lo: float, hi: float, name: str, n: tuple = (), **details
) -> TestReport:
    details = {"lo": lo, "hi": hi, **details}
    return TestReport(
        name=name,
        statistic=float(value),
        n=n,
        passed=bool(lo <= value <= hi),
        details=details,
    )


def summarize(reports, budget_alpha: float = ALPHA) -> dict:
    """Suite summary with the Bonferroni verdict across all p-valued tests.

    ``bonferroni_ok`` is true when no p-valued test rejects at
    ``budget_alpha / m``; non-p tests (z-score and interval checks) count
    through their stated pass flags.
    """
    reports = list(reports)
    p_tests = [r for r in reports if r.p_value is not None]
    m = max(len(p_tests), 1)
    bonferroni_ok = all(r.p_value >= budget_alpha / m for r in p_tests) and all(
        r.passed for r in reports if r.p_value is None
    )
    return {
        "total": len(reports),
        "passed": sum(r.passed for r in reports),
        "failed": sum(not r.passed for r in reports),
        "bonferroni_alpha": budget_alpha / m,
        "bonferroni_ok": bool(bonferroni_ok),
    }


def reports_to_json(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2)
