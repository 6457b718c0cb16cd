import pytest
import torch
import torch.nn.functional as F

from fspharness.data import collate, encode_sample
from fspharness.model import MaskedEncoder
from fspharness.tune import HarnessConfig, _mask_tokens, load_checkpoint, save_checkpoint
from fspharness.vocab import Vocab, tokenize


def toy_setup(n_model=8):
    streams = [tokenize("alpha bravo charlie delta echo foxtrot golf hotel.")]
    vocab = Vocab.build(streams, n_model=n_model)
    model = MaskedEncoder.from_preset("tiny", vocab_size=len(vocab), n_model=n_model, max_len=64)
    return vocab, model


def batch_for(vocab, n_model=8):
    rng_texts = [
        ("alpha bravo.", 0),
        ("charlie delta.", 3),
        ("echo foxtrot.", 5),
        ("golf hotel.", 1),
    ]
    examples = []
    for text, label in rng_texts:
        record = {
            "options": ["alpha.", "bravo.", "charlie.", "delta.", "[PAD]", "[PAD]", "[PAD]", "[PAD]"],
            "label": label,
            "text": text,
        }
        examples.append(encode_sample(record, vocab, 64, f"t{label}"))
    return collate(examples)


def test_cls_logits_width_is_n_model():
    vocab, model = toy_setup(n_model=8)
    ids, mask, _ = batch_for(vocab)
    logits = model.cls_logits(ids, mask)
    assert logits.shape == (4, 8)


def test_single_step_reduces_loss():
    torch.manual_seed(0)
    vocab, model = toy_setup()
    ids, mask, labels = batch_for(vocab)
    optimizer = torch.optim.AdamW(model.parameters(), lr=3e-4)
    model.train()
    loss_before = F.cross_entropy(model.cls_logits(ids, mask), labels)
    loss_before.backward()
    optimizer.step()
    model.eval()
    with torch.no_grad():
        loss_after = F.cross_entropy(model.cls_logits(ids, mask), labels)
    assert loss_after.item() < loss_before.item()


def test_mlm_masking_shapes_and_targets():
    torch.manual_seed(1)
    vocab, model = toy_setup()
    ids, mask, _ = batch_for(vocab)
    generator = torch.Generator().manual_seed(2)
    corrupted, targets = _mask_tokens(ids, mask, len(vocab), 0.5, generator)
    assert corrupted.shape == ids.shape
    changed = targets != -100
    assert changed.any()
    # targets hold the original ids exactly where selected
    assert (targets[changed] == ids[changed]).all()
    # batch padding is never selected
    assert not changed[mask == 0].any()


def test_checkpoint_round_trip(tmp_path):
    vocab, model = toy_setup()
    cfg = HarnessConfig(model="tiny", n_model=8, max_tokens=64)
    save_checkpoint(model, vocab, cfg, tmp_path / "ckpt", extra={"validation_accuracy": 0.5})
    loaded, loaded_vocab, payload = load_checkpoint(tmp_path / "ckpt")
    assert loaded_vocab.itos == vocab.itos
    assert payload["harness"]["n_model"] == 8
    ids, mask, _ = batch_for(vocab)
    with torch.no_grad():
        model.eval()
        assert torch.allclose(model.cls_logits(ids, mask), loaded.cls_logits(ids, mask))


def test_unknown_preset_rejected():
    with pytest.raises(ValueError):
        MaskedEncoder.from_preset("huge", vocab_size=100, n_model=20)
