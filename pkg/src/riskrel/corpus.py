"""Filing ingestion: markup stripping, risk-section extraction, paragraph segmentation.

Raw annual-report text (one file per firm and fiscal year) is cleaned of
HTML/XBRL markup and tables, split into "Item"-labelled sections, and the
risk sections are segmented into tokenized paragraphs. All functions here
are pure; the same input always produces the same paragraphs and ids.
"""

from __future__ import annotations

import html
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import EmptyCorpus

DEFAULT_MIN_TOKENS = 20
DEFAULT_SECTIONS = ("1A", "7A")

# Tags whose boundaries mark a paragraph break once markup is gone.
_BLOCK_TAGS = r"p|div|br|tr|li|h[1-6]|blockquote|section|article"

_TABLE_RE = re.compile(r"<table\b[^>]*>(?:(?!<table\b).)*?</table\s*>",
                       re.IGNORECASE | re.DOTALL)
_BLOCK_TAG_RE = re.compile(rf"</?(?:{_BLOCK_TAGS})\b[^>]*>?", re.IGNORECASE)
# Any remaining tag-like run, including unterminated ones ("<em unclosed...").
_TAG_RE = re.compile(r"<[/!?a-zA-Z][^>]*>?")
_XML_DECL_RE = re.compile(r"<\?[^>]*\?>")

_TOKEN_RE = re.compile(r"[^\W\d_]+|\d+|[^\w\s]|_")

# "Item 1A", "ITEM 7A.", "Item 7A —" ... optional punctuation after the code.
_ITEM_HEADING_RE = re.compile(r"\bitem\s+(\d{1,2})([a-z])?\b\s*[.:;\-–—]?\s*",
                              re.IGNORECASE)


@dataclass(frozen=True)
class Paragraph:
    """One risk-section paragraph with provenance.

    ``tokens`` is always exactly ``tokenize(text)``; the id encodes
    (firm, year, section, ordinal) and is unique within a corpus.
    """

    id: str
    firm_id: str
    year: int
    section: str
    text: str
    tokens: tuple[str, ...]

    @staticmethod
    def make_id(firm_id: str, year: int, section: str, ordinal: int) -> str:
        return f"{firm_id}:{year}:{section}:{ordinal:04d}"


@dataclass
class Filing:
    """A cleaned filing for one firm-year with its extracted sections."""

    firm_id: str
    fiscal_year: int
    raw_text: str
    sections: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.firm_id:
            raise ValueError("firm_id must be non-empty")
        if not 1990 <= self.fiscal_year <= 2100:
            raise ValueError(f"fiscal_year {self.fiscal_year} out of range [1990, 2100]")


@dataclass
class FirmCorpus:
    """All risk-section paragraphs of one firm."""

    firm_id: str
    paragraphs: list[Paragraph]

    @property
    def count(self) -> int:
        return len(self.paragraphs)


def tokenize(text: str) -> list[str]:
    """Lowercase word-level tokenization.

    Splits on whitespace, emits punctuation characters as standalone tokens
    and keeps digit runs intact, so "Net loss, 2023." becomes
    ["net", "loss", ",", "2023", "."].
    """
    return _TOKEN_RE.findall(text.lower())


def strip_markup(raw: str) -> str:
    """Remove HTML/XBRL tags and tables from raw filing text.

    Table elements are dropped with their contents, remaining tags are
    stripped (block-level tag boundaries become paragraph breaks), entity
    references are decoded, and whitespace runs collapse to single spaces.
    Runs of two or more newlines survive as one blank-line paragraph break.
    """
    text = raw.replace("\r\n", "\n").replace("\r", "\n")

    # Innermost-first so nested tables disappear completely.
    prev = None
    while prev != text:
        prev = text
        text = _TABLE_RE.sub(" ", text)

    text = _XML_DECL_RE.sub(" ", text)
    text = _BLOCK_TAG_RE.sub("\n\n", text)
    text = _TAG_RE.sub(" ", text)
    # Entity decoding can resurrect tag-like sequences ("&lt;b&gt;");
    # strip once more so no '<'+letter survives, but never double-decode.
    text = html.unescape(text)
    text = _TAG_RE.sub(" ", text)

    paragraphs = [re.sub(r"\s+", " ", part).strip()
                  for part in re.split(r"\s*\n\s*\n\s*", text)]
    return "\n\n".join(p for p in paragraphs if p)


def extract_sections(cleaned: str) -> dict[str, str]:
    """Extract "Item <code>" sections from markup-free filing text.

    Each section runs from its heading to the next Item heading. Only
    sections 1A and 7A are returned; absent headings are simply omitted.
    When a heading occurs more than once (tables of contents repeat them),
    the occurrence with the longest body wins.
    """
    matches = list(_ITEM_HEADING_RE.finditer(cleaned))
    found: dict[str, str] = {}
    best_len: dict[str, int] = {}
    for idx, m in enumerate(matches):
        code = m.group(1) + (m.group(2) or "").upper()
        if code not in DEFAULT_SECTIONS:
            continue
        end = matches[idx + 1].start() if idx + 1 < len(matches) else len(cleaned)
        body = cleaned[m.end():end].strip()
        if len(body) > best_len.get(code, -1):
            found[code] = body
            best_len[code] = len(body)
    return found


def segment_paragraphs(section: str, firm_id: str, year: int, label: str,
                       min_tokens: int = DEFAULT_MIN_TOKENS) -> list[Paragraph]:
    """Split section text on blank lines into tokenized paragraphs.

    Fragments with fewer than ``min_tokens`` tokens (headings, page numbers)
    are discarded; ordinals are assigned in document order over the kept
    paragraphs.
    """
    paragraphs = []
    ordinal = 0
    for block in re.split(r"\n\s*\n", section):
        text = block.strip()
        if not text:
            continue
        tokens = tokenize(text)
        if len(tokens) < min_tokens:
            continue
        paragraphs.append(Paragraph(
            id=Paragraph.make_id(firm_id, year, label, ordinal),
            firm_id=firm_id,
            year=year,
            section=label,
            text=text,
            tokens=tuple(tokens),
        ))
        ordinal += 1
    return paragraphs


def ingest_filing(firm_id: str, year: int, raw_text: str,
                  sections: Iterable[str] = DEFAULT_SECTIONS,
                  min_tokens: int = DEFAULT_MIN_TOKENS) -> tuple[Filing, list[Paragraph]]:
    """Clean one raw filing and segment its requested sections."""
    cleaned = strip_markup(raw_text)
    extracted = extract_sections(cleaned)
    wanted = {label: extracted[label] for label in sections if label in extracted}
    filing = Filing(firm_id=firm_id, fiscal_year=year, raw_text=cleaned,
                    sections=wanted)
    paragraphs: list[Paragraph] = []
    for label in sections:
        if label in wanted:
            paragraphs.extend(segment_paragraphs(wanted[label], firm_id, year,
                                                 label, min_tokens=min_tokens))
    return filing, paragraphs


def ingest_directory(root: str | Path, sections: Iterable[str] = DEFAULT_SECTIONS,
                     min_tokens: int = DEFAULT_MIN_TOKENS) -> list[Paragraph]:
    """Ingest a ``<root>/<ticker>/<year>.txt`` tree of raw filings.

    Firms and years are processed in sorted order so the output is stable.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"filing root is not a directory: {root}")
    paragraphs: list[Paragraph] = []
    for firm_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for filing_path in sorted(firm_dir.glob("*.txt")):
            if not filing_path.stem.isdigit():
                raise ValueError(
                    f"filing name must be <year>.txt, got: {filing_path}")
            year = int(filing_path.stem)
            raw = filing_path.read_text(encoding="utf-8")
            _, paras = ingest_filing(firm_dir.name, year, raw,
                                     sections=sections, min_tokens=min_tokens)
            paragraphs.extend(paras)
    return paragraphs


def group_by_firm(paragraphs: Iterable[Paragraph]) -> dict[str, FirmCorpus]:
    """Group paragraphs into per-firm corpora, firms in sorted order."""
    grouped: dict[str, list[Paragraph]] = {}
    for p in paragraphs:
        grouped.setdefault(p.firm_id, []).append(p)
    return {firm: FirmCorpus(firm_id=firm, paragraphs=plist)
            for firm, plist in sorted(grouped.items())}


def write_paragraphs(paragraphs: Iterable[Paragraph], path: str | Path) -> int:
    """Write paragraphs as line-delimited JSON records. Returns the count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for p in paragraphs:
            record = {"id": p.id, "firm": p.firm_id, "year": p.year,
                      "section": p.section, "text": p.text,
                      "tokens": list(p.tokens)}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n


def read_paragraphs(path: str | Path) -> list[Paragraph]:
    """Read paragraphs written by :func:`write_paragraphs`."""
    paragraphs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            paragraphs.append(Paragraph(
                id=rec["id"], firm_id=rec["firm"], year=int(rec["year"]),
                section=rec["section"], text=rec["text"],
                tokens=tuple(rec["tokens"]),
            ))
    if not paragraphs:
        raise EmptyCorpus(f"no paragraph records in {path}")
    return paragraphs
