"""Template correlation of output matrices, learning curves and recall statistics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import stats

LEARNING_STEPS = range(1, 10)
RECALL_STEPS = range(11, 21)


def template_correlation(a: np.ndarray, b: np.ndarray, return_flag: bool = False):
    """Pearson correlation of two binary output matrices, flattened.

    Computed from integer counts, so ``a`` against itself gives exactly 1.0
    and against its complement exactly -1.0.  A constant matrix (all 0 or
    all 1) has no variance; the coefficient is then 0 and, with
    ``return_flag=True``, the second return value is ``True``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    x = a.ravel().astype(bool)
    y = b.ravel().astype(bool)
    if not (np.array_equal(x, a.ravel()) and np.array_equal(y, b.ravel())):
        raise ValueError("template_correlation expects binary matrices")
    n = x.size
    nx = int(np.count_nonzero(x))
    ny = int(np.count_nonzero(y))
    nxy = int(np.count_nonzero(x & y))
    var = (nx * (n - nx)) * (ny * (n - ny))
    if var == 0:
        return (0.0, True) if return_flag else 0.0
    r = (n * nxy - nx * ny) / math.sqrt(var)
    r = min(1.0, max(-1.0, r))
    return (r, False) if return_flag else r


@dataclass
class Summary:
    mean: float
    std: float
    n: int

    @classmethod
    def of(cls, values: Sequence[float]) -> "Summary":
        v = np.asarray(values, dtype=float)
        std = float(v.std(ddof=1)) if v.size > 1 else 0.0
        return cls(float(v.mean()) if v.size else float("nan"), std, int(v.size))


def _by_condition(records) -> Dict[str, list]:
    groups: Dict[str, list] = {}
    for r in sorted(records, key=lambda r: (r.condition, r.seed)):
        groups.setdefault(r.condition, []).append(r)
    return groups


def _check_outputs(record, steps: Iterable[int]) -> None:
    need = max(steps)
    if record.outputs.shape[0] < need:
        raise ValueError(
            f"run seed={record.seed} condition={record.condition}: has {record.outputs.shape[0]} "
            f"presentation steps, needs {need}"
        )


def learning_samples(records, p: int) -> Tuple[List[float], int]:
    values, degenerate = [], 0
    for r in records:
        _check_outputs(r, LEARNING_STEPS)
        for l in range(r.outputs.shape[1]):
            c, flag = template_correlation(r.outputs[p - 1, l], r.learned[l], return_flag=True)
            values.append(c)
            degenerate += flag
    return values, degenerate


def learning_curve(records) -> Dict[str, Dict[int, Summary]]:
    """Per condition: correlation of o_l(p) with the learned template k_l, p = 1..9."""
    out: Dict[str, Dict[int, Summary]] = {}
    for cond, recs in _by_condition(records).items():
        out[cond] = {p: Summary.of(learning_samples(recs, p)[0]) for p in LEARNING_STEPS}
    return out


def recall_samples(records) -> Dict[str, list]:
    """Recall-phase correlations split into ``same`` (k_l vs o_l) and ``different`` (k_m vs o_l, m != l).

    ``same_by_stimulus`` groups the same-case values per stimulus index.
    """
    same, diff, degenerate = [], [], 0
    n_stim = records[0].outputs.shape[1] if records else 0
    by_stim: List[List[float]] = [[] for _ in range(n_stim)]
    for r in records:
        _check_outputs(r, RECALL_STEPS)
        for p in RECALL_STEPS:
            for l in range(n_stim):
                o = r.outputs[p - 1, l]
                for m in range(n_stim):
                    c, flag = template_correlation(r.learned[m], o, return_flag=True)
                    degenerate += flag
                    if m == l:
                        same.append(c)
                        by_stim[l].append(c)
                    else:
                        diff.append(c)
    return {"same": same, "different": diff, "same_by_stimulus": by_stim, "degenerate": degenerate}


@dataclass
class Discrimination:
    same: Summary
    different: Summary
    t_stat: float
    anova_f: float
    degenerate: int

    @property
    def gap(self) -> float:
        return self.same.mean - self.different.mean


def discrimination_stats(records) -> Dict[str, Discrimination]:
    """Per condition: same vs different recall correlations, Welch t and one-way ANOVA F over stimuli.

    Only test statistics are reported; no p-values.
    """
    out: Dict[str, Discrimination] = {}
    for cond, recs in _by_condition(records).items():
        s = recall_samples(recs)
        same, diff = np.asarray(s["same"]), np.asarray(s["different"])
        with np.errstate(all="ignore"):
            t = float(stats.ttest_ind(same, diff, equal_var=False).statistic)
            groups = [g for g in s["same_by_stimulus"] if len(g)]
            f = float(stats.f_oneway(*groups).statistic) if len(groups) > 1 else float("nan")
        out[cond] = Discrimination(Summary.of(same), Summary.of(diff), t, f, s["degenerate"])
    return out


@dataclass
class CorrelationReport:
    curve: Dict[str, Dict[int, Summary]]
    discrimination: Dict[str, Discrimination]
    header: List[str] = field(default_factory=list)

    @classmethod
    def from_records(cls, records, header: Sequence[str] = ()) -> "CorrelationReport":
        records = list(records)
        return cls(learning_curve(records), discrimination_stats(records), list(header))

    def write(self, out_dir: str | Path) -> None:
        out_dir = Path(out_dir)
        with open(out_dir / "curve.csv", "w", newline="") as fh:
            for line in self.header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["condition", "p", "mean", "std", "n"])
            for cond, curve in self.curve.items():
                for p, s in curve.items():
                    w.writerow([cond, p, repr(s.mean), repr(s.std), s.n])
        with open(out_dir / "discrimination.csv", "w", newline="") as fh:
            for line in self.header:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["condition", "case", "mean", "std", "n", "t_stat"])
            for cond, d in self.discrimination.items():
                w.writerow([cond, "same", repr(d.same.mean), repr(d.same.std), d.same.n, repr(d.t_stat)])
                w.writerow([cond, "different", repr(d.different.mean), repr(d.different.std), d.different.n, repr(d.t_stat)])
        (out_dir / "summary.txt").write_text(self.summary())

    def summary(self) -> str:
        lines = [f"# {h}" for h in self.header]
        lines.append("Learning phase: correlation of o_l(p) with k_l = o_l(10)")
        for cond, curve in self.curve.items():
            vals = "  ".join(f"p{p}={s.mean:.3f}" for p, s in curve.items())
            lines.append(f"  {cond:<11} {vals}")
        lines.append("Recall phase: correlation with learned templates")
        for cond, d in self.discrimination.items():
            lines.append(
                f"  {cond:<11} same={d.same.mean:.3f}±{d.same.std:.3f} (n={d.same.n})  "
                f"different={d.different.mean:.3f}±{d.different.std:.3f} (n={d.different.n})  "
                f"gap={d.gap:.3f}  Welch t={d.t_stat:.2f}  ANOVA F={d.anova_f:.2f}  "
                f"degenerate={d.degenerate}"
            )
        return "\n".join(lines) + "\n"
