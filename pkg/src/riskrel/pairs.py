"""Positive-pair construction for contrastive training.

Two complementary views over risk-section paragraphs:

* chronological — two same-firm paragraphs that mention an identical
  calendar date (quarter-end accounting dates excluded) form a pair, with
  every date mention deleted from both sides so the encoder cannot match
  on the dates themselves;
* lexical — two overlapping spans of a single paragraph form a pair,
  exploiting the boilerplate phrasing of annual reports.

All generation is deterministic given the corpus, the seed and the config.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import DEFAULT_MIN_TOKENS, FirmCorpus, Paragraph
from .errors import InsufficientPairs

CHRONOLOGICAL = "chronological"
LEXICAL = "lexical"
VIEWS = (CHRONOLOGICAL, LEXICAL)

DEFAULT_MIN_SPAN = 32
DEFAULT_OVERLAP_CAP = 128
DEFAULT_MAX_PAIRS_PER_PARAGRAPH = 1

# Quarter/fiscal period boundaries repeat in every filing and carry no
# event signal, so they never justify a chronological pair.
ACCOUNTING_DATES = frozenset({(3, 31), (6, 30), (9, 30), (12, 31)})

_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
}


@dataclass(frozen=True)
class DateMention:
    """A date expression found in a paragraph's token stream."""

    paragraph_id: str
    token_span: tuple[int, int]  # half-open [start, end)
    normalized: str              # ISO YYYY-MM-DD, day 01 when absent
    is_accounting: bool


@dataclass(frozen=True)
class PositivePair:
    """A training pair: two token views of related text."""

    view: str
    left_tokens: tuple[str, ...]
    right_tokens: tuple[str, ...]
    provenance: tuple[str, ...]
    seed_info: tuple[int, int] | None = None  # lexical (i, j) draw, 1-indexed


def _valid_date(year: int, month: int, day: int) -> str | None:
    try:
        return datetime.date(year, month, day).isoformat()
    except ValueError:
        return None


def _is_year(tok: str) -> bool:
    return len(tok) == 4 and tok.isdigit()


def detect_date_tokens(paragraph: Paragraph) -> list[DateMention]:
    """Scan a tokenized paragraph for date expressions.

    Recognized forms (over tokens, longest match first):
    "july 8 , 2024", "july 2024", "07/08/2024" and "2024-07-08".
    Bare years are deliberately not dates. Unparseable near-dates
    (e.g. february 30) are ignored.
    """
    return scan_tokens(paragraph.tokens, paragraph.id)


def scan_tokens(tokens: Sequence[str], paragraph_id: str = "") -> list[DateMention]:
    """Token-level date scanner behind :func:`detect_date_tokens`."""
    mentions: list[DateMention] = []
    n = len(tokens)
    i = 0
    while i < n:
        tok = tokens[i]
        hit: tuple[int, str] | None = None  # (span end, iso)

        if tok in _MONTHS:
            month = _MONTHS[tok]
            # MonthName D , YYYY
            if (i + 3 < n and tokens[i + 1].isdigit() and len(tokens[i + 1]) <= 2
                    and tokens[i + 2] == "," and _is_year(tokens[i + 3])):
                iso = _valid_date(int(tokens[i + 3]), month, int(tokens[i + 1]))
                if iso:
                    hit = (i + 4, iso)
            # MonthName YYYY
            if hit is None and i + 1 < n and _is_year(tokens[i + 1]):
                iso = _valid_date(int(tokens[i + 1]), month, 1)
                if iso:
                    hit = (i + 2, iso)
        elif (tok.isdigit() and len(tok) <= 2 and i + 4 < n
                and tokens[i + 1] == "/" and tokens[i + 2].isdigit()
                and len(tokens[i + 2]) <= 2 and tokens[i + 3] == "/"
                and _is_year(tokens[i + 4])):
            # MM/DD/YYYY
            iso = _valid_date(int(tokens[i + 4]), int(tok), int(tokens[i + 2]))
            if iso:
                hit = (i + 5, iso)
        elif (_is_year(tok) and i + 4 < n
                and tokens[i + 1] == "-" and tokens[i + 2].isdigit()
                and len(tokens[i + 2]) <= 2 and tokens[i + 3] == "-"
                and tokens[i + 4].isdigit() and len(tokens[i + 4]) <= 2):
            # YYYY-MM-DD
            iso = _valid_date(int(tok), int(tokens[i + 2]), int(tokens[i + 4]))
            if iso:
                hit = (i + 5, iso)

        if hit is None:
            i += 1
            continue
        end, iso = hit
        month_day = (int(iso[5:7]), int(iso[8:10]))
        mentions.append(DateMention(
            paragraph_id=paragraph_id,
            token_span=(i, end),
            normalized=iso,
            is_accounting=month_day in ACCOUNTING_DATES,
        ))
        i = end
    return mentions


def _strip_date_tokens(tokens: Sequence[str]) -> tuple[str, ...]:
    """Delete every date-mention span, repeating until none remain.

    Deletion can juxtapose tokens into a new date pattern ("december"
    followed by a freed year token), so the scan runs to a fixpoint.
    """
    current = tuple(tokens)
    while True:
        mentions = scan_tokens(current)
        if not mentions:
            return current
        drop = set()
        for m in mentions:
            drop.update(range(*m.token_span))
        current = tuple(t for k, t in enumerate(current) if k not in drop)


def build_chronological_pairs(corpus: FirmCorpus,
                              min_tokens: int = DEFAULT_MIN_TOKENS) -> list[PositivePair]:
    """Pair same-firm paragraphs that share a non-accounting date.

    All date mentions are removed from both sides before the pair is
    emitted; pairs whose either side drops below ``min_tokens`` are
    discarded. One pair per unordered paragraph-id pair.
    """
    mentions_by_para = {p.id: detect_date_tokens(p) for p in corpus.paragraphs}

    by_date: dict[str, list[Paragraph]] = {}
    for p in corpus.paragraphs:
        dates = {m.normalized for m in mentions_by_para[p.id] if not m.is_accounting}
        for d in sorted(dates):
            by_date.setdefault(d, []).append(p)

    stripped: dict[str, tuple[str, ...]] = {}
    pairs: list[PositivePair] = []
    seen: set[tuple[str, str]] = set()
    for date in sorted(by_date):
        group = by_date[date]
        for a_idx in range(len(group)):
            for b_idx in range(a_idx + 1, len(group)):
                left, right = sorted((group[a_idx], group[b_idx]), key=lambda p: p.id)
                key = (left.id, right.id)
                if left.id == right.id or key in seen:
                    continue
                seen.add(key)
                for p in (left, right):
                    if p.id not in stripped:
                        stripped[p.id] = _strip_date_tokens(p.tokens)
                if (len(stripped[left.id]) < min_tokens
                        or len(stripped[right.id]) < min_tokens):
                    continue
                pairs.append(PositivePair(
                    view=CHRONOLOGICAL,
                    left_tokens=stripped[left.id],
                    right_tokens=stripped[right.id],
                    provenance=key,
                ))
    return pairs


def build_lexical_pairs(paragraphs: Iterable[Paragraph], rng_seed: int,
                        min_span: int = DEFAULT_MIN_SPAN,
                        max_pairs_per_paragraph: int = DEFAULT_MAX_PAIRS_PER_PARAGRAPH,
                        overlap_cap: int = DEFAULT_OVERLAP_CAP,
                        stats: dict | None = None) -> list[PositivePair]:
    """Build overlapping-span pairs from single paragraphs.

    For tokens [w_1..w_n], indices i < j are drawn and the pair is
    ([w_1..w_j], [w_i..w_n]); the spans overlap on [w_i..w_j]. Paragraphs
    with fewer than 2*min_span tokens are skipped silently (counted under
    ``stats["skipped_short"]`` when a dict is passed). Deterministic for a
    fixed seed and paragraph order.
    """
    if min_span < 2:
        raise ValueError("min_span must be >= 2")
    rng = np.random.default_rng(rng_seed)
    pairs: list[PositivePair] = []
    skipped = 0
    for p in paragraphs:
        n = len(p.tokens)
        if n < 2 * min_span:
            skipped += 1
            continue
        drawn: set[tuple[int, int]] = set()
        for _ in range(max_pairs_per_paragraph):
            # 1-indexed draw: i in [min_span, n-min_span], j in (i, min(i+cap, n-1)]
            i = int(rng.integers(min_span, n - min_span + 1))
            j_hi = min(i + overlap_cap, n - 1)
            if j_hi < i + 1:
                continue
            j = int(rng.integers(i + 1, j_hi + 1))
            if (i, j) in drawn:
                continue
            drawn.add((i, j))
            pairs.append(PositivePair(
                view=LEXICAL,
                left_tokens=p.tokens[:j],
                right_tokens=p.tokens[i - 1:],
                provenance=(p.id,),
                seed_info=(i, j),
            ))
    if stats is not None:
        stats["skipped_short"] = stats.get("skipped_short", 0) + skipped
    return pairs


def split_train_val(pairs: Sequence[PositivePair], train_count: int,
                    val_count: int, rng_seed: int) -> tuple[list[PositivePair], list[PositivePair]]:
    """Seeded disjoint train/validation split, per view.

    ``train_count``/``val_count`` apply to each view present. No source
    paragraph id appears in both splits of the same view; validation
    candidates touching a training paragraph are passed over.
    """
    rng = np.random.default_rng(rng_seed)
    by_view: dict[str, list[PositivePair]] = {}
    for pair in pairs:
        by_view.setdefault(pair.view, []).append(pair)

    train: list[PositivePair] = []
    val: list[PositivePair] = []
    for view in sorted(by_view):
        view_pairs = by_view[view]
        if len(view_pairs) < train_count + val_count:
            raise InsufficientPairs(
                f"view {view}: {len(view_pairs)} pairs available, "
                f"{train_count}+{val_count} requested")
        order = rng.permutation(len(view_pairs))
        shuffled = [view_pairs[k] for k in order]
        view_train = shuffled[:train_count]
        train_ids = {pid for pair in view_train for pid in pair.provenance}
        view_val = []
        for pair in shuffled[train_count:]:
            if len(view_val) == val_count:
                break
            if any(pid in train_ids for pid in pair.provenance):
                continue
            view_val.append(pair)
        if len(view_val) < val_count:
            raise InsufficientPairs(
                f"view {view}: only {len(view_val)} validation pairs are "
                f"paragraph-disjoint from the training split, {val_count} requested")
        train.extend(view_train)
        val.extend(view_val)
    return train, val


def write_pairs(pairs: Iterable[PositivePair], path: str | Path) -> int:
    """Write pairs as line-delimited JSON records. Returns the count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            record = {
                "view": pair.view,
                "left_tokens": list(pair.left_tokens),
                "right_tokens": list(pair.right_tokens),
                "provenance": list(pair.provenance),
            }
            if pair.seed_info is not None:
                record["seed_info"] = list(pair.seed_info)
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_pairs(path: str | Path) -> list[PositivePair]:
    """Read pairs written by :func:`write_pairs`."""
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            seed_info = rec.get("seed_info")
            pairs.append(PositivePair(
                view=rec["view"],
                left_tokens=tuple(rec["left_tokens"]),
                right_tokens=tuple(rec["right_tokens"]),
                provenance=tuple(rec["provenance"]),
                seed_info=tuple(seed_info) if seed_info is not None else None,
            ))
    return pairs
