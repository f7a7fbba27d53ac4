"""Preference-judgment statistics.

Groups multi-select judgments over the five scaling factors into the four
preference groups (smaller / larger / original / no preference), and tests
for differences between matched binary options with Cochran's Q plus
pairwise post-hoc McNemar tests under Bonferroni correction.

The post-hoc test is pairwise McNemar rather than a rank-based Dunn test:
the judgments are matched binary responses, for which McNemar is the
defined pairwise companion of Cochran's Q.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DegenerateTableError, UnknownOptionError

__all__ = [
    "SCALING_OPTIONS",
    "PreferenceGroup",
    "JudgmentTable",
    "TestReport",
    "group_preference",
    "group_percentages",
    "cochran_q",
    "p_value_chi2",
    "pairwise_posthoc",
    "analyze_table",
]

# The scaling-study option vocabulary: area multipliers shown to users.
SCALING_OPTIONS = (0.5, 0.67, 1.0, 1.5, 2.0)
_SMALLER = frozenset((0.5, 0.67))
_LARGER = frozenset((1.5, 2.0))

# Discordant-pair count below which the pairwise McNemar test switches to
# the exact binomial computation.
EXACT_MCNEMAR_MAX_DISCORDANT = 25


class PreferenceGroup(enum.Enum):
    SMALLER = "smaller"
    LARGER = "larger"
    ORIGINAL = "original"
    NO_PREFERENCE = "no_preference"


def group_preference(chosen) -> PreferenceGroup:
    """Assign a multi-select judgment over the scaling options to a group.

    SMALLER when every chosen factor shrinks the box ({0.5}, {0.67} or
    both), LARGER when every chosen factor grows it ({1.5}, {2.0} or both),
    ORIGINAL when exactly the unscaled box was chosen, NO_PREFERENCE for
    every other combination.

    Raises:
        UnknownOptionError: The selection is empty or includes a value
            outside the five scaling factors.
    """
    selected = frozenset(chosen)
    if not selected:
        raise UnknownOptionError("selection set must be non-empty")
    unknown = selected - frozenset(SCALING_OPTIONS)
    if unknown:
        raise UnknownOptionError(f"unknown scaling options: {sorted(unknown)}")
    if selected <= _SMALLER:
        return PreferenceGroup.SMALLER
    if selected <= _LARGER:
        return PreferenceGroup.LARGER
    if selected == frozenset((1.0,)):
        return PreferenceGroup.ORIGINAL
    return PreferenceGroup.NO_PREFERENCE


def group_percentages(selections) -> dict[PreferenceGroup, float]:
    """Percentage of judgments falling into each preference group."""
    counts = {group: 0 for group in PreferenceGroup}
    n = 0
    for chosen in selections:
        counts[group_preference(chosen)] += 1
        n += 1
    if n == 0:
        raise UnknownOptionError("no judgments to group")
    return {group: 100.0 * c / n for group, c in counts.items()}


@dataclass(frozen=True)
class JudgmentTable:
    """Binary participants-x-options selection matrix.

    Rows are matched judgments (one per participant and task), columns are
    the candidate options; a cell is 1 iff that option was selected.
    """

    matrix: np.ndarray
    options: tuple[str, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64)
        if m.ndim != 2:
            raise ValueError("judgment table must be two-dimensional")
        if m.shape[0] < 2 or m.shape[1] < 2:
            raise ValueError("judgment table needs at least 2 rows and 2 columns")
        if not np.isin(m, (0, 1)).all():
            raise ValueError("judgment table entries must be 0 or 1")
        if len(self.options) != m.shape[1]:
            raise ValueError("one option label per column required")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows, options) -> "JudgmentTable":
        return cls(matrix=np.asarray(rows, dtype=np.int64), options=tuple(options))

    @classmethod
    def from_csv(cls, path) -> "JudgmentTable":
        """Read a table from CSV: header row of option labels, then one 0/1
        row per judgment."""
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty CSV") from None
            rows = [[int(cell) for cell in row] for row in reader if row]
        return cls.from_rows(rows, header)


@dataclass(frozen=True)
class TestReport:
    """Cochran's Q omnibus result plus Bonferroni-adjusted pairwise tests."""

    statistic: float
    degrees_of_freedom: int
    p_value: float
    pairwise: dict[tuple[str, str], float]


def cochran_q(table: JudgmentTable) -> tuple[float, int]:
    """Cochran's Q statistic and its degrees of freedom (k - 1).

    Q = (k-1) * [k * sum(Cj^2) - (sum Cj)^2] / (k * sum(Ri) - sum(Ri^2))
    with Cj the column sums and Ri the row sums. Rows with all-equal entries
    contribute nothing.

    Raises:
        DegenerateTableError: Every row is constant, making Q undefined.
    """
    m = table.matrix
    k = m.shape[1]
    col = m.sum(axis=0).astype(np.int64)
    row = m.sum(axis=1).astype(np.int64)
    denominator = int(k * row.sum() - (row**2).sum())
    if denominator == 0:
        raise DegenerateTableError(
            "every row is constant; Cochran's Q is undefined (0/0)"
        )
    numerator = (k - 1) * int(k * (col**2).sum() - col.sum() ** 2)
    return numerator / denominator, k - 1


def p_value_chi2(q: float, df: int) -> float:
    """Upper-tail chi-square probability via the regularized incomplete
    gamma function (scipy's gammaincc; absolute error well under 1e-10)."""
    if q < 0:
        raise ValueError(f"statistic must be >= 0, got {q}")
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    return float(special.gammaincc(df / 2.0, q / 2.0))


def _mcnemar_p(col_a: np.ndarray, col_b: np.ndarray) -> float:
    """Two-sided McNemar p-value for one column pair.

    Uses the exact binomial test when the discordant count is small and the
    uncorrected chi-square approximation (b-c)^2/(b+c) otherwise. Identical
    columns carry no information and report p = 1.
    """
    b = int(np.sum((col_a == 1) & (col_b == 0)))
    c = int(np.sum((col_a == 0) & (col_b == 1)))
    n = b + c
    if n == 0:
        return 1.0
    if n < EXACT_MCNEMAR_MAX_DISCORDANT:
        low = min(b, c)
        tail = sum(math.comb(n, i) for i in range(low + 1)) / 2**n
        return min(1.0, 2.0 * tail)
    statistic = (b - c) ** 2 / n
    return p_value_chi2(statistic, 1)


def pairwise_posthoc(
    table: JudgmentTable, method: str = "mcnemar"
) -> dict[tuple[str, str], float]:
    """Bonferroni-adjusted p-values for every column pair.

    Each of the k(k-1)/2 pairwise McNemar p-values is multiplied by the
    number of comparisons and capped at 1.
    """
    if method != "mcnemar":
        raise ValueError(f"unknown pairwise test {method!r}")
    m = table.matrix
    k = m.shape[1]
    n_pairs = k * (k - 1) // 2
    adjusted: dict[tuple[str, str], float] = {}
    for i in range(k):
        for j in range(i + 1, k):
            raw = _mcnemar_p(m[:, i], m[:, j])
            key = (table.options[i], table.options[j])
            adjusted[key] = min(1.0, n_pairs * raw)
    return adjusted


def analyze_table(table: JudgmentTable) -> TestReport:
    """Omnibus Cochran's Q with chi-square p-value and post-hoc pairwise
    McNemar tests under Bonferroni correction."""
    q, df = cochran_q(table)
    return TestReport(
        statistic=q,
        degrees_of_freedom=df,
        p_value=p_value_chi2(q, df),
        pairwise=pairwise_posthoc(table),
    )
