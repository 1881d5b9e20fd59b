"""Corpus module: markup stripping, section extraction, segmentation, tokenization."""

import re

import pytest

from riskrel import corpus
from riskrel.corpus import (
    extract_sections,
    segment_paragraphs,
    strip_markup,
    tokenize,
)


# --- tokenize ---

def test_tokenize_splits_punctuation_and_keeps_digit_runs():
    assert tokenize("Net loss, 2023.") == ["net", "loss", ",", "2023", "."]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_hyphenated_term():
    assert tokenize("COVID-19") == ["covid", "-", "19"]


def test_tokenize_lowercases():
    assert tokenize("Supply CHAIN Risk") == ["supply", "chain", "risk"]


@pytest.mark.parametrize("text", [
    "Revenue fell 12.5% ($4,200) in Q3; see note 7(a).",
    "naïve café — résumé!",
    "a\tb\nc   d",
    "x<y & y>z",
    "",
    "ITEM 1A. Risk Factors: cyber-attacks, COVID-19, and more...",
])
def test_tokenize_idempotent_on_joined_output(text):
    once = tokenize(text)
    assert tokenize(" ".join(once)) == once


# --- strip_markup ---

def test_strip_markup_removes_simple_tag():
    assert strip_markup("<p>Risk factors</p>") == "Risk factors"


def test_strip_markup_identity_on_plain_text():
    assert strip_markup("plain text") == "plain text"


def test_strip_markup_drops_table_contents():
    assert strip_markup("a<table><tr><td>1</td></tr></table>b") == "a b"


def test_strip_markup_drops_nested_tables():
    raw = "x<table><tr><td><table><tr><td>inner</td></tr></table></td></tr></table>y"
    assert strip_markup(raw) == "x y"


def test_strip_markup_decodes_entities():
    assert strip_markup("risk &amp; reward &mdash; both") == "risk & reward — both"


def test_strip_markup_no_tag_like_residue_after_entity_decoding():
    out = strip_markup("a &lt;b&gt; c &lt;table&gt;d&lt;/table&gt; e")
    assert re.search(r"<[A-Za-z]", out) is None


def test_strip_markup_handles_unterminated_tag():
    out = strip_markup("before <em unterminated")
    assert re.search(r"<[A-Za-z]", out) is None
    assert out.startswith("before")


def test_strip_markup_removes_xml_declaration_and_comments():
    raw = '<?xml version="1.0"?><!-- header --><p>body text</p>'
    assert strip_markup(raw) == "body text"


def test_strip_markup_preserves_paragraph_breaks():
    out = strip_markup("first block\n\n\nsecond   block\nsame paragraph")
    assert out == "first block\n\nsecond block same paragraph"


def test_strip_markup_block_tags_become_breaks():
    out = strip_markup("<p>one</p><p>two</p>")
    assert out == "one\n\ntwo"


@pytest.mark.parametrize("raw", [
    "<div>a</div><script>x<y</script>",
    "&amp;lt;tag&amp;gt;",
    "<table><tr><td>only table</td></tr></table>",
    "<p>text with 5 < 6 math</p>",
])
def test_strip_markup_invariant_no_open_angle_letter(raw):
    assert re.search(r"<[A-Za-z]", strip_markup(raw)) is None


# --- extract_sections ---

def test_extract_sections_basic_1a():
    text = "Item 1A. Risk Factors X Y Z Item 1B. Other"
    assert extract_sections(text) == {"1A": "Risk Factors X Y Z"}


def test_extract_sections_no_headings():
    assert extract_sections("no headings anywhere in this text") == {}


def test_extract_sections_case_insensitive_dash():
    text = "ITEM 7A — Market Risk body Item 8"
    assert extract_sections(text) == {"7A": "Market Risk body"}


def test_extract_sections_both_sections():
    text = ("Item 1. Business stuff Item 1A. Risk Factors risk body here "
            "Item 2. Properties Item 7A. Market Risk quant body Item 8. Financials")
    out = extract_sections(text)
    assert out["1A"] == "Risk Factors risk body here"
    assert out["7A"] == "Market Risk quant body"


def test_extract_sections_prefers_longest_duplicate():
    # Table-of-contents style repetition: the real section wins.
    text = "Item 1A. Item 2. Item 1A. Risk Factors full body of the section Item 2. rest"
    out = extract_sections(text)
    assert out["1A"] == "Risk Factors full body of the section"


def test_extract_sections_values_contain_no_item_headings():
    text = ("Item 1A. Risk Factors alpha beta Item 1B. unresolved Item 7A. "
            "Market gamma delta Item 8. done")
    for value in extract_sections(text).values():
        assert not re.search(r"\bitem\s+\d{1,2}[a-z]?\b", value, re.IGNORECASE)


# --- segment_paragraphs ---

def _words(n, prefix="tok"):
    return " ".join(f"{prefix}{chr(97 + i // 26)}{chr(97 + i % 26)}"
                    for i in range(n))


def test_segment_two_blocks():
    section = _words(25) + "\n\n" + _words(25, "other")
    paragraphs = segment_paragraphs(section, "ACME", 2023, "1A")
    assert [p.id for p in paragraphs] == ["ACME:2023:1A:0000", "ACME:2023:1A:0001"]


def test_segment_drops_short_fragment():
    assert segment_paragraphs(_words(5), "ACME", 2023, "1A") == []


def test_segment_tokens_match_tokenize():
    block = _words(40)
    (p,) = segment_paragraphs(block, "ACME", 2023, "1A")
    assert list(p.tokens) == tokenize(block)
    assert p.text == block


def test_segment_deterministic():
    section = _words(30) + "\n\n" + _words(30, "b")
    a = segment_paragraphs(section, "X", 2020, "7A")
    b = segment_paragraphs(section, "X", 2020, "7A")
    assert a == b


def test_segment_min_tokens_configurable():
    section = _words(10)
    assert len(segment_paragraphs(section, "X", 2020, "1A", min_tokens=10)) == 1
    assert len(segment_paragraphs(section, "X", 2020, "1A", min_tokens=11)) == 0


# --- fixture-level invariants ---

def test_fixture_paragraph_tokens_invariant(fixture_paragraphs):
    for p in fixture_paragraphs:
        assert list(p.tokens) == tokenize(p.text)


def test_fixture_paragraph_ids_unique(fixture_paragraphs):
    ids = [p.id for p in fixture_paragraphs]
    assert len(ids) == len(set(ids))


def test_fixture_only_risk_sections(fixture_paragraphs):
    assert {p.section for p in fixture_paragraphs} == {"1A", "7A"}


def test_ingest_directory_deterministic(fixture_manifest, fixture_paragraphs):
    again = corpus.ingest_directory(fixture_manifest.filings_dir)
    assert again == fixture_paragraphs


def test_filing_validation_rejects_bad_years():
    with pytest.raises(ValueError):
        corpus.Filing(firm_id="X", fiscal_year=1800, raw_text="t")
    with pytest.raises(ValueError):
        corpus.Filing(firm_id="", fiscal_year=2020, raw_text="t")


def test_paragraph_roundtrip_jsonl(tmp_path, fixture_paragraphs):
    path = tmp_path / "paragraphs.jsonl"
    n = corpus.write_paragraphs(fixture_paragraphs, path)
    assert n == len(fixture_paragraphs)
    assert corpus.read_paragraphs(path) == list(fixture_paragraphs)


def test_read_paragraphs_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(corpus.EmptyCorpus):
        corpus.read_paragraphs(path)


def test_ingest_rejects_non_year_filenames(tmp_path):
    (tmp_path / "ACME").mkdir()
    (tmp_path / "ACME" / "notes.txt").write_text("not a filing")
    with pytest.raises(ValueError, match="notes.txt"):
        corpus.ingest_directory(tmp_path)
