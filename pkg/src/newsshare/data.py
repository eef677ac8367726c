"""Tabulated exposure/share counts to fit-ready observations.

Two CSV layouts are read:

``domain_id,bias,truth,group,exposures,shares[,extreme]``
    one row per (domain, belief group) cell.  ``truth`` may be left blank
    when a justification file supplies it.

``domain_id,color,fraction``
    one row per fact-check justification; ``fraction`` is the position
    inside the color's numeric range and defaults to the midpoint.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError, ValidationError
from .fitting import Observation
from .model import BELIEF_CENTERS, GROUPS

TRUTH_RANGES = {
    "black": (0.0, 0.1),
    "red": (0.1, 0.2),
    "orange": (0.2, 0.3),
    "yellow": (0.3, 0.6),
    "green": (0.6, 0.8),
}
MAX_TRUTH_SCORE = 0.8

# Lower edge of each category; ties go to the upper bin.
TRUTH_CATEGORIES = (
    ("very_low", 0.0),
    ("low", 0.1),
    ("mixed", 0.3),
    ("high", 0.5),
    ("very_high", 0.7),
)

RECORD_FIELDS = ("domain_id", "bias", "truth", "group", "exposures", "shares", "extreme")
JUSTIFICATION_FIELDS = ("domain_id", "color", "fraction")


def truthfulness_score(justifications) -> float:
    """Mean of the per-justification scores.

    Each item is ``(color, fraction)`` or just ``color``; a missing fraction
    means the middle of the color's range.
    """
    items = list(justifications)
    if not items:
        raise ValidationError("at least one justification is required")
    scores = []
    for item in items:
        if isinstance(item, str):
            color, frac = item, None
        else:
            color, frac = item
        try:
            lo, hi = TRUTH_RANGES[color.lower()]
        except KeyError:
            raise ValidationError(f"unknown truthfulness color {color!r}") from None
        if frac is None:
            frac = 0.5
        if not (0.0 <= frac <= 1.0):
            raise ValidationError(f"fraction must lie in [0, 1], got {frac!r}")
        scores.append(lo + frac * (hi - lo))
    return math.fsum(scores) / len(scores)


def truthfulness_category(t: float) -> str:
    if not (0.0 <= t <= MAX_TRUTH_SCORE):
        raise ValidationError(f"truthfulness score must lie in [0, {MAX_TRUTH_SCORE}], got {t!r}")
    label = TRUTH_CATEGORIES[0][0]
    for name, lower in TRUTH_CATEGORIES:
        # Compare with a little slack so 0.1 + 0.2 still lands on 0.3's bin.
        if t >= lower - 1e-12:
            label = name
    return label


def belief_center(group: str) -> float:
    try:
        return BELIEF_CENTERS[GROUPS.index(group)]
    except ValueError:
        raise ValidationError(f"unknown belief group {group!r}; expected one of {', '.join(GROUPS)}") from None


@dataclass
class DomainRecord:
    """Counts for one news domain, keyed by belief group.

    ``counts`` maps a group name to ``(exposures, shares)``.  Records for
    extreme-activity readers are kept separate with ``extreme=True``.
    """

    domain_id: str
    bias: float
    truth: float
    counts: dict = field(default_factory=dict)
    extreme: bool = False

    def __post_init__(self):
        if not (-1.0 <= self.bias <= 1.0):
            raise ValidationError(f"{self.domain_id}: bias must lie in [-1, 1], got {self.bias!r}")
        if not (0.0 <= self.truth <= 1.0):
            raise ValidationError(f"{self.domain_id}: truth must lie in [0, 1], got {self.truth!r}")
        for group, (exp, sh) in self.counts.items():
            belief_center(group)
            if exp < 0 or sh < 0:
                raise ValidationError(f"{self.domain_id}/{group}: counts must be non-negative")
            if sh > exp:
                raise ValidationError(f"{self.domain_id}/{group}: shares ({sh}) exceed exposures ({exp})")


def build_observations(records) -> list:
    """One observation per (domain, group) cell with at least one exposure."""
    out = []
    for rec in records:
        if not isinstance(rec, DomainRecord):
            raise ValidationError(f"expected DomainRecord, got {type(rec).__name__}")
        for group in GROUPS:
            if group not in rec.counts:
                continue
            exposures, shares = rec.counts[group]
            if exposures == 0:
                continue
            out.append(
                Observation(
                    bias=rec.bias,
                    truth=rec.truth,
                    belief=belief_center(group),
                    exposures=int(exposures),
                    shares=int(shares),
                    extreme_flag=rec.extreme,
                )
            )
    return out


# -- CSV ---------------------------------------------------------------------


def _read_rows(path, required):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("file is empty", line=1, path=path)
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise DataError(f"missing column(s) {', '.join(missing)}", line=1, path=path)
        rows = [(reader.line_num, row) for row in reader]
    if not rows:
        raise DataError("no data rows", line=2, path=path)
    return rows


def _number(text, kind, line, path, name):
    try:
        return kind(text)
    except (TypeError, ValueError):
        raise DataError(f"column {name!r}: cannot parse {text!r} as {kind.__name__}", line=line, path=path) from None


def read_justifications(path) -> dict:
    """Truthfulness score per domain from a justification CSV."""
    per_domain: dict = {}
    for line, row in _read_rows(path, JUSTIFICATION_FIELDS):
        frac_text = (row.get("fraction") or "").strip()
        frac = None if frac_text == "" else _number(frac_text, float, line, path, "fraction")
        color = (row["color"] or "").strip().lower()
        if color not in TRUTH_RANGES:
            raise DataError(f"unknown color {row['color']!r}", line=line, path=path)
        if frac is not None and not (0.0 <= frac <= 1.0):
            raise DataError(f"fraction {frac!r} outside [0, 1]", line=line, path=path)
        per_domain.setdefault(row["domain_id"], []).append((color, frac))
    return {dom: truthfulness_score(items) for dom, items in per_domain.items()}


def read_records(path, truth_by_domain=None) -> list:
    """Domain records from a cell-per-row CSV.

    ``truth_by_domain`` (for example from :func:`read_justifications`)
    overrides the ``truth`` column.  Records keep file order.
    """
    truth_by_domain = truth_by_domain or {}
    records: dict = {}
    for line, row in _read_rows(path, RECORD_FIELDS[:-1]):
        dom = row["domain_id"]
        if not dom:
            raise DataError("empty domain_id", line=line, path=path)
        bias = _number(row["bias"], float, line, path, "bias")
        if dom in truth_by_domain:
            truth = truth_by_domain[dom]
        else:
            truth = _number(row["truth"], float, line, path, "truth")
        group = (row["group"] or "").strip()
        if group not in GROUPS:
            raise DataError(f"unknown group {group!r}", line=line, path=path)
        exp = _number(row["exposures"], int, line, path, "exposures")
        sh = _number(row["shares"], int, line, path, "shares")
        extreme_text = (row.get("extreme") or "0").strip().lower()
        if extreme_text not in ("0", "1", "true", "false"):
            raise DataError(f"column 'extreme': expected 0/1, got {extreme_text!r}", line=line, path=path)
        extreme = extreme_text in ("1", "true")
        if not (-1.0 <= bias <= 1.0):
            raise DataError(f"bias {bias!r} outside [-1, 1]", line=line, path=path)
        if not (0.0 <= truth <= 1.0):
            raise DataError(f"truth {truth!r} outside [0, 1]", line=line, path=path)
        if exp < 0 or sh < 0 or sh > exp:
            raise DataError(f"invalid counts exposures={exp} shares={sh}", line=line, path=path)
        key = (dom, extreme)
        rec = records.get(key)
        if rec is None:
            rec = records[key] = DomainRecord(dom, bias, truth, {}, extreme)
        elif rec.bias != bias or rec.truth != truth:
            raise DataError(f"domain {dom!r} has inconsistent bias/truth across rows", line=line, path=path)
        if group in rec.counts:
            raise DataError(f"duplicate group {group!r} for domain {dom!r}", line=line, path=path)
        rec.counts[group] = (exp, sh)
    return list(records.values())


def write_records(path, records):
    """Inverse of :func:`read_records`; floats are written with ``repr`` so they round-trip."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for rec in records:
            for group in GROUPS:
                if group in rec.counts:
                    exp, sh = rec.counts[group]
                    w.writerow([rec.domain_id, repr(float(rec.bias)), repr(float(rec.truth)), group, exp, sh, int(rec.extreme)])


def load_observations(path, justifications=None) -> list:
    truth = read_justifications(justifications) if justifications else None
    return build_observations(read_records(path, truth))
