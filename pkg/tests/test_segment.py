import json
import random

from fspgen import segment
from fspgen.segment import (
    DedupIndex,
    FilterVerdict,
    ParagraphRecord,
    dedup_key,
    filter_paragraph,
    split_sentences,
)

from conftest import DATA_DIR


def load_cases():
    with open(DATA_DIR / "segmentation_cases.json", encoding="utf-8") as fh:
        return json.load(fh)


def test_segmentation_fixture():
    # Hand-labeled before implementation; see tests/write_segmentation_fixture.py.
    cases = load_cases()
    total = sum(len(c["sentences"]) for c in cases)
    assert total >= 200
    for case in cases:
        assert split_sentences(case["text"]) == case["sentences"], case["text"]


def test_split_plain_pair():
    assert split_sentences("Jim is here. He left.") == ["Jim is here.", "He left."]


def test_split_empty():
    assert split_sentences("") == []
    assert split_sentences("   ") == []


def test_split_never_drops_characters():
    rng = random.Random(0)
    texts = [c["text"] for c in load_cases()]
    words = ["alpha", "Dr.", "beta?", "U.S.", "gamma!", "(delta.)", "3.14", "'eh.'"]
    for _ in range(300):
        texts.append(" ".join(rng.choice(words) for _ in range(rng.randint(1, 30))))
    for text in texts:
        joined = " ".join(split_sentences(text))
        assert " ".join(joined.split()) == " ".join(text.split()), text


def test_dedup_key_normalization():
    assert dedup_key("Hello  World") == dedup_key("hello world")
    assert dedup_key("café") == dedup_key("café")  # NFC
    assert dedup_key("x") == dedup_key("x")


def test_dedup_key_distinct_texts():
    rng = random.Random(1)
    alphabet = "abcdefghijklmnopqrstuvwxyz "
    keys = set()
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(1000))
        keys.add(dedup_key(text))
    assert len(keys) == 200


def test_dedup_key_stable_value():
    # Frozen so accidental hash changes (which would break cross-run dedup
    # comparisons) are caught.
    assert dedup_key("x") == dedup_key("X ")
    assert dedup_key("x") == 5395104992458594383


def rec(sentences, article="a", index=0):
    return ParagraphRecord(article_id=article, paragraph_index=index, sentences=sentences)


def test_filter_single_sentence():
    verdict = filter_paragraph(rec(["Only one sentence here."]), DedupIndex())
    assert verdict == FilterVerdict(kept=False, reason=segment.SINGLE_SENTENCE)


def test_filter_short_first():
    verdict = filter_paragraph(rec(["ab.", "Then more text follows."]), DedupIndex())
    assert verdict.reason == segment.SHORT_FIRST


def test_filter_non_alphabetic_first():
    verdict = filter_paragraph(rec(["###!!!", "Real text follows here."]), DedupIndex())
    assert verdict.reason == segment.NON_ALPHABETIC_FIRST


def test_filter_duplicate_second_submission():
    dedup = DedupIndex()
    sentences = ["A fine first sentence.", "And a body sentence."]
    assert filter_paragraph(rec(sentences), dedup).kept
    verdict = filter_paragraph(rec(sentences, article="b"), dedup)
    assert verdict.reason == segment.DUPLICATE


def test_filter_order_short_before_nonalpha():
    # "#!" is both short and non-alphabetic; the fixed order says short_first.
    verdict = filter_paragraph(rec(["#!", "Body text follows here."]), DedupIndex())
    assert verdict.reason == segment.SHORT_FIRST


def test_filter_kept_properties():
    dedup = DedupIndex()
    verdict = filter_paragraph(
        rec(["This lead is long enough.", "So is the body."]), dedup
    )
    assert verdict == FilterVerdict(kept=True, reason=segment.KEPT)
    assert len(dedup) == 1


def test_filter_idempotent_on_fresh_index():
    sentences = ["A proper lead sentence.", "A proper body sentence."]
    assert filter_paragraph(rec(sentences), DedupIndex()).kept
    assert filter_paragraph(rec(sentences), DedupIndex()).kept


def test_rejected_paragraph_not_registered():
    dedup = DedupIndex()
    filter_paragraph(rec(["ab.", "Body text."]), dedup)
    assert len(dedup) == 0


def test_kept_paragraphs_satisfy_invariants():
    rng = random.Random(2)
    dedup = DedupIndex()
    leads = ["Ok.", "ab.", "####", "A good lead sentence."]
    bodies = [[], ["And a body."], ["Body one.", "Body two."]]
    for i in range(500):
        sentences = [rng.choice(leads)] + rng.choice(bodies) + [f"Unique tail {i}."]
        verdict = filter_paragraph(rec(sentences, index=i), dedup)
        if verdict.kept:
            assert len(sentences) >= 2
            first = sentences[0].strip()
            assert len(first) > 3
            assert any(ch.isalpha() for ch in first)
