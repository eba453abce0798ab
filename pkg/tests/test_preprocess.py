import re

import pytest
from hypothesis import given, settings, strategies as st

from cwemap.preprocess import (
    Gazetteer,
    cleanup,
    load_gazetteer,
    load_stopwords,
    segment_sentences,
    tokenize,
)


def apply_report(report):
    """Independent reconstruction: delete reported spans, normalize whitespace."""
    kept = list(report.input)
    for (start, end), _cat in report.removed:
        for i in range(start, end):
            kept[i] = None
    return " ".join("".join(c for c in kept if c is not None).split())


class TestCleanup:
    def test_plugin_example(self):
        gaz = Gazetteer(["WordPress", "CallRail"])
        rep = cleanup("XSS in CallRail plugin <= 0.4.9 at WordPress, see https://x.y", gaz)
        removed_texts = {rep.input[s:e] for (s, e), _ in rep.removed}
        assert removed_texts == {"CallRail", "0.4.9", "WordPress", "https://x.y"}
        assert "CallRail" not in rep.output
        assert "0.4.9" not in rep.output

    def test_no_match_identity(self):
        gaz = Gazetteer(["WordPress"])
        text = "An attacker can overflow the server"
        rep = cleanup(text, gaz)
        assert rep.output == text
        assert rep.removed == ()

    def test_vendor_phrase_and_version(self):
        # span check against an independent scanner (str.find based)
        gaz = Gazetteer(["Apache Mina SSHD"])
        text = "addressed in Apache Mina SSHD 2.7.0"
        rep = cleanup(text, gaz)
        assert rep.output == "addressed in"
        expected = {
            (text.find("Apache Mina SSHD"), text.find("Apache Mina SSHD") + len("Apache Mina SSHD")): "gazetteer",
            (text.find("2.7.0"), text.find("2.7.0") + len("2.7.0")): "version",
        }
        assert {span: cat for span, cat in rep.removed} == expected

    def test_categories(self):
        gaz = Gazetteer(["Foo Suite"])
        text = ("Contact admin@example.com or see https://example.com/x. "
                "Foo Suite 1.4.x at host.example.org wrote /etc/app/conf. "
                "Also CVE-2020-1234 applies.")
        rep = cleanup(text, gaz)
        cats = {cat for _, cat in rep.removed}
        assert {"email", "url", "gazetteer", "version", "domain", "filepath",
                "cve_id"} <= cats

    def test_output_equals_input_minus_spans(self):
        gaz = load_gazetteer()
        text = ("A flaw in Microsoft SQL Server 15.0.2 and WordPress plugins, "
                "tracked as CVE-2021-9999, see https://nvd.example.gov/detail")
        rep = cleanup(text, gaz)
        assert rep.output == apply_report(rep)

    def test_empty_input(self):
        assert cleanup("", Gazetteer([])).output == ""

    def test_idempotent_simple(self):
        gaz = load_gazetteer()
        text = "Overflow in Apache Tomcat 9.0.1, fixed in 9.0.2, see https://a.io/x"
        once = cleanup(text, gaz)
        twice = cleanup(once.output, gaz)
        assert twice.output == once.output
        assert twice.removed == ()

    def test_phrase_joined_by_inner_removal(self):
        # deleting the version makes the phrase contiguous; the fixpoint pass
        # still removes it
        gaz = Gazetteer(["Apache Tomcat"])
        rep = cleanup("runs Apache 9.0.1 Tomcat builds", gaz)
        assert rep.output == "runs builds"


PATTERN_SNIPPETS = [
    "https://example.com/a/b",
    "www.example.org",
    "1.2.3",
    "0.4.x",
    "CVE-2020-12345",
    "user@example.net",
    "/usr/local/bin",
    "WordPress",
    "Apache Mina SSHD",
]

words = st.lists(
    st.text(alphabet="abcdefghij", min_size=1, max_size=8), min_size=0, max_size=8)


@settings(max_examples=150, deadline=None)
@given(words=words, injected=st.lists(st.sampled_from(PATTERN_SNIPPETS), max_size=4),
       data=st.data())
def test_cleanup_idempotence_property(words, injected, data):
    gaz = Gazetteer(["WordPress", "Apache Mina SSHD"])
    parts = list(words)
    for snippet in injected:
        parts.insert(data.draw(st.integers(0, len(parts))), snippet)
    text = " ".join(parts)
    once = cleanup(text, gaz)
    twice = cleanup(once.output, gaz)
    assert twice.output == once.output
    assert once.output == apply_report(once)


class TestTokenize:
    def test_stopword_removal(self):
        assert tokenize("The SQL injection") == ["sql", "injection"]

    def test_empty(self):
        assert tokenize("") == []

    def test_oracle_tokenizer(self, stopwords):
        # independent reference: char-walk tokenizer
        text = ("A remote attacker could execute arbitrary code via a crafted "
                "HTTP request; see the 2.0 release notes, file /tmp/x.")

        def reference(s):
            out, cur = [], []
            for ch in s.lower():
                if ch.isalnum():
                    cur.append(ch)
                elif cur:
                    out.append("".join(cur))
                    cur = []
            if cur:
                out.append("".join(cur))
            return [t for t in out if t not in stopwords]

        assert sorted(tokenize(text)) == sorted(reference(text))

    def test_no_pattern_tokens_after_cleanup(self, gazetteer):
        text = ("Issue in WordPress 4.2.1, see https://example.com/adv and "
                "mail admin@example.com about /etc/passwd/file")
        cleaned = cleanup(text, gazetteer).output
        toks = tokenize(cleaned)
        url_like = re.compile(r"^(https?|www|com|org)$")
        assert not any(url_like.match(t) for t in toks)
        assert not any(re.match(r"^\d+$", t) for t in toks)

    def test_shipped_stopword_list_size(self, stopwords):
        assert 150 <= len(stopwords) <= 200


class TestSegmentation:
    def test_two_sentences(self):
        text = "An attacker can overflow the server. It was addressed in 2.7.0."
        assert len(segment_sentences(text)) == 2

    def test_no_split_inside_version(self):
        text = "Upgrade to version 1.4.3 when available."
        assert segment_sentences(text) == [text]

    def test_abbreviation_guard(self):
        text = "Some products, e.g. Foo, are affected."
        assert len(segment_sentences(text)) == 1

    def test_lowercase_continuation_not_split(self):
        text = "Fixed in v2. see advisory."
        assert len(segment_sentences(text)) == 1

    def test_empty(self):
        assert segment_sentences("") == []

    def test_character_preservation(self):
        text = ("A vulnerability in sshd-core of Apache Mina SSHD allows an "
                "attacker to overflow the server causing an OutOfMemory error. "
                "This issue affects the SFTP and port forwarding features of "
                "Apache Mina SSHD version 2.0.0 and later versions. It was "
                "addressed in Apache Mina SSHD 2.7.0")
        segs = segment_sentences(text)
        assert len(segs) == 3
        assert "".join("".join(s.split()) for s in segs) == "".join(text.split())

    def test_released_corpus_mean_sentences(self, records):
        counts = [len(segment_sentences(r.text)) for r in records]
        mean = sum(counts) / len(counts)
        assert abs(mean - 3.69) <= 0.5

    def test_collated_cwe_mean_sentences(self, catalog):
        counts = [len(c.sentences) for c in catalog.collate_all()]
        mean = sum(counts) / len(counts)
        assert abs(mean - 8.2) <= 1.0


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet="abcDEF .!?()'\"0123456789\n\t", max_size=200))
def test_segmentation_preserves_non_whitespace(text):
    segs = segment_sentences(text)
    assert "".join("".join(s.split()) for s in segs) == "".join(text.split())


class TestGazetteer:
    def test_longest_match_first(self):
        gaz = Gazetteer(["Apache", "Apache Mina SSHD"])
        rep = cleanup("uses Apache Mina SSHD here", gaz)
        spans = [(rep.input[s:e], cat) for (s, e), cat in rep.removed]
        assert spans == [("Apache Mina SSHD", "gazetteer")]

    def test_case_insensitive(self):
        gaz = Gazetteer(["WordPress"])
        assert cleanup("runs wordpress here", gaz).output == "runs here"

    def test_word_boundaries(self):
        gaz = Gazetteer(["Edge"])
        assert cleanup("knowledge of Edge cases", gaz).output == "knowledge of cases"

    def test_empty_phrase_rejected(self):
        with pytest.raises(ValueError):
            Gazetteer(["ok", "  "])

    def test_shipped_gazetteer_loads(self, gazetteer):
        assert len(gazetteer) > 50
        assert "WordPress" in gazetteer
