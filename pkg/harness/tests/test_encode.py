import pytest
import torch

from fspharness.data import (
    OverlongOptionsError,
    collate,
    encode_rendered,
    encode_sample,
    sample_tokens,
)
from fspharness.vocab import CLS_ID, PAD_ID, SEP_ID, UNK_ID, Vocab, tokenize


def small_vocab():
    streams = [
        tokenize("alpha bravo charlie delta echo foxtrot golf hotel india."),
        tokenize("one two three four five."),
    ]
    return Vocab.build(streams, n_model=4)


def record(options, text):
    return {"options": options, "label": 0, "text": text}


def test_tokenize_specials_atomic():
    tokens = tokenize("[CLS] (A) Alpha bravo. (B) [PAD] [SEP] text [SEP]")
    assert tokens[0] == "[CLS]"
    assert tokens[1] == "(A)"
    assert "[PAD]" in tokens
    assert tokens.count("[SEP]") == 2
    assert "alpha" in tokens  # words lowercase


def test_tokenize_digits_split():
    assert tokenize("4821") == ["4", "8", "2", "1"]


def test_tokenize_apostrophes():
    assert tokenize("It's fine.") == ["it's", "fine", "."]


def test_vocab_unknown_maps_to_unk():
    vocab = small_vocab()
    assert vocab.id("zebra") == UNK_ID
    assert vocab.id("alpha") != UNK_ID


def test_vocab_round_trip(tmp_path):
    vocab = small_vocab()
    vocab.save(tmp_path / "vocab.json")
    loaded = Vocab.load(tmp_path / "vocab.json")
    assert loaded.itos == vocab.itos


def test_encode_sample_structure():
    vocab = small_vocab()
    example = encode_sample(
        record(["alpha bravo.", "[PAD]", "charlie.", "[PAD]"], "delta echo."),
        vocab,
        max_tokens=64,
        sample_id="s0",
    )
    ids = example.ids.tolist()
    assert ids[0] == CLS_ID
    assert ids.count(SEP_ID) == 2
    assert ids[-1] == SEP_ID
    # stored "[PAD]" options become the tokenizer's pad id
    assert ids.count(PAD_ID) == 2


def test_encode_sample_truncates_text_only():
    vocab = small_vocab()
    options = ["alpha.", "[PAD]", "bravo.", "[PAD]"]
    long_text = "echo " * 300
    full = encode_sample(record(options, "echo."), vocab, 512, "a")
    head_len = len(sample_tokens(record(options, ""))) - 1  # minus trailing sep
    clipped = encode_sample(record(options, long_text), vocab, 64, "b")
    assert len(clipped.ids) == 64
    # option block identical in both encodings
    assert clipped.ids.tolist()[:head_len] == full.ids.tolist()[:head_len]


def test_encode_sample_overlong_options_fatal():
    vocab = small_vocab()
    options = ["alpha bravo charlie delta echo foxtrot golf hotel india."] * 4
    with pytest.raises(OverlongOptionsError, match="s9"):
        encode_sample(record(options, "text."), vocab, max_tokens=16, sample_id="s9")


def test_encode_rendered_matches_sample_encoding():
    vocab = small_vocab()
    rendered = "[CLS] (A) alpha bravo. (B) [PAD] (C) charlie. (D) [PAD] [SEP] delta echo. [SEP]"
    via_string = encode_rendered(rendered, 0, vocab, 64, "r0")
    via_record = encode_sample(
        record(["alpha bravo.", "[PAD]", "charlie.", "[PAD]"], "delta echo."), vocab, 64, "r0"
    )
    assert via_string.ids.tolist() == via_record.ids.tolist()


def test_encode_rendered_requires_markers():
    vocab = small_vocab()
    with pytest.raises(ValueError):
        encode_rendered("no markers here", 0, vocab, 64, "x")


def test_collate_pads_and_masks():
    vocab = small_vocab()
    a = encode_sample(record(["alpha.", "[PAD]"], "bravo."), vocab, 64, "a")
    b = encode_sample(record(["alpha charlie delta.", "[PAD]"], "bravo echo."), vocab, 64, "b")
    ids, mask, labels = collate([a, b])
    assert ids.shape == mask.shape
    assert ids.shape[1] == max(len(a.ids), len(b.ids))
    assert mask[0].sum().item() == len(a.ids)
    assert (ids[0, len(a.ids):] == PAD_ID).all()
    assert labels.tolist() == [0, 0]
    assert ids.dtype == torch.long
