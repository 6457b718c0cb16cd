"""Compact masked-LM encoder with a fixed-width classification head.

The classification head always has n_model outputs; task class counts never
change the network. The MLM head shares the token embedding matrix.
"""

from __future__ import annotations

import torch
import torch.nn as nn

PRESETS = {
    "tiny": dict(d_model=128, n_layers=2, n_heads=4, d_ff=256),
    "small": dict(d_model=256, n_layers=4, n_heads=4, d_ff=512),
    "base": dict(d_model=384, n_layers=6, n_heads=6, d_ff=1024),
}


class MaskedEncoder(nn.Module):
    def __init__(
        self,
        vocab_size: int,
        n_model: int = 20,
        d_model: int = 256,
        n_layers: int = 4,
        n_heads: int = 4,
        d_ff: int = 512,
        max_len: int = 512,
        dropout: float = 0.1,
    ):
        super().__init__()
        self.config = dict(
            vocab_size=vocab_size,
            n_model=n_model,
            d_model=d_model,
            n_layers=n_layers,
            n_heads=n_heads,
            d_ff=d_ff,
            max_len=max_len,
            dropout=dropout,
        )
        self.tok_emb = nn.Embedding(vocab_size, d_model, padding_idx=0)
        self.pos_emb = nn.Embedding(max_len, d_model)
        self.dropout = nn.Dropout(dropout)
        layer = nn.TransformerEncoderLayer(
            d_model,
            n_heads,
            dim_feedforward=d_ff,
            dropout=dropout,
            batch_first=True,
            norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, n_layers)
        self.norm = nn.LayerNorm(d_model)
        self.mlm_bias = nn.Parameter(torch.zeros(vocab_size))
        self.cls_head = nn.Linear(d_model, n_model)

    @classmethod
    def from_preset(cls, name: str, vocab_size: int, n_model: int, max_len: int = 512):
        if name not in PRESETS:
            raise ValueError(f"unknown model preset {name!r}; choose from {sorted(PRESETS)}")
        return cls(vocab_size=vocab_size, n_model=n_model, max_len=max_len, **PRESETS[name])

    def encode(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        hidden = self.dropout(self.tok_emb(ids) + self.pos_emb(positions))
        hidden = self.encoder(hidden, src_key_padding_mask=mask == 0)
        return self.norm(hidden)

    def mlm_logits(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        hidden = self.encode(ids, mask)
        return hidden @ self.tok_emb.weight.t() + self.mlm_bias

    def cls_logits(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        hidden = self.encode(ids, mask)
        return self.cls_head(hidden[:, 0])

    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())
