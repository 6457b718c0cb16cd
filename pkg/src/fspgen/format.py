"""Render samples and task inputs into the single-string model format.

The rendered shape is::

    [CLS] (A) option0 (B) option1 ... (T) option19 [SEP] text [SEP]

with configurable index-indicator symbols and marker strings. Inference inputs
put the verbalized class names at slots 0..N_L-1 in class order (no shuffling),
followed by pad markers, so a prefix argmax over the logits stays meaningful.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .sampler import PAD_OPTION, FspSample

ALPHABET = "alphabet"
NUMERIC = "numeric"
CONSTANT = "constant"
CUSTOM = "custom"
SCHEME_KINDS = (ALPHABET, NUMERIC, CONSTANT, CUSTOM)

TEMPLATE_PLACEHOLDER = "[]"


class SymbolExhaustionError(ValueError):
    """Raised when a scheme cannot supply enough distinct indicator symbols."""


@dataclass
class IndicatorScheme:
    kind: str = ALPHABET
    custom_symbols: list[str] | None = None

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown indicator scheme {self.kind!r}")
        if self.kind == CUSTOM and not self.custom_symbols:
            raise ValueError("custom scheme requires custom_symbols")

    def symbols(self, count: int) -> list[str]:
        if self.kind == ALPHABET:
            if count > len(string.ascii_uppercase):
                raise SymbolExhaustionError(
                    f"alphabet scheme supports at most 26 options, got {count}"
                )
            return list(string.ascii_uppercase[:count])
        if self.kind == NUMERIC:
            return [str(i) for i in range(count)]
        if self.kind == CONSTANT:
            return ["0"] * count
        if len(self.custom_symbols) < count:
            raise SymbolExhaustionError(
                f"custom scheme has {len(self.custom_symbols)} symbols, need {count}"
            )
        return list(self.custom_symbols[:count])


@dataclass
class MarkerSet:
    cls: str = "[CLS]"
    sep: str = "[SEP]"
    pad: str = "[PAD]"

    def __post_init__(self):
        markers = (self.cls, self.sep, self.pad)
        if any(not m for m in markers):
            raise ValueError("marker strings must be non-empty")
        if len(set(markers)) != 3:
            raise ValueError("marker strings must be mutually distinct")


@dataclass
class TaskSpec:
    class_names: list[str]
    template: str | None = None
    verbalizers: list[str] | None = None
    n_model: int = 20

    def __post_init__(self):
        n_labels = len(self.class_names)
        if n_labels < 2:
            raise ValueError("a task needs at least 2 classes")
        if n_labels > self.n_model:
            raise ValueError(
                f"task has {n_labels} classes but the model width is {self.n_model}"
            )
        if self.verbalizers is not None and len(self.verbalizers) != n_labels:
            raise ValueError("one verbalizer per class required")
        if self.verbalizers is None and self.template is None:
            raise ValueError("provide a template or an explicit verbalizer list")

    @property
    def n_labels(self) -> int:
        return len(self.class_names)


def verbalize(spec: TaskSpec) -> list[str]:
    """Turn class names into option strings, preserving class order."""
    if spec.verbalizers is not None:
        return list(spec.verbalizers)
    if spec.template.count(TEMPLATE_PLACEHOLDER) != 1:
        raise ValueError(
            f"template must contain exactly one {TEMPLATE_PLACEHOLDER!r} placeholder"
        )
    return [spec.template.replace(TEMPLATE_PLACEHOLDER, name) for name in spec.class_names]


def render_input(
    options: list[str], text: str, scheme: IndicatorScheme, markers: MarkerSet
) -> str:
    """Assemble the final input string from an already-complete option list."""
    symbols = scheme.symbols(len(options))
    blocks = " ".join(f"({sym}) {opt}" for sym, opt in zip(symbols, options))
    return f"{markers.cls} {blocks} {markers.sep} {text} {markers.sep}"


def render_tuning(
    sample: FspSample, scheme: IndicatorScheme, markers: MarkerSet
) -> str:
    """Render a tuning sample; stored pad markers map to the configured pad string."""
    options = [markers.pad if opt == PAD_OPTION else opt for opt in sample.options]
    return render_input(options, sample.text, scheme, markers)


def render_inference(
    text: str, spec: TaskSpec, scheme: IndicatorScheme, markers: MarkerSet
) -> str:
    """Render a zero-shot input: verbalizers in class order, then trailing pads."""
    options = verbalize(spec)
    options += [markers.pad] * (spec.n_model - len(options))
    return render_input(options, text, scheme, markers)


def parse_rendered(
    rendered: str, scheme: IndicatorScheme, markers: MarkerSet, n_model: int
) -> tuple[list[str], str]:
    """Recover (options, text) from a rendered string.

    Assumes option and text contents are free of marker and indicator
    substrings, which holds for anything this module rendered from clean text.
    """
    prefix = f"{markers.cls} "
    if not rendered.startswith(prefix):
        raise ValueError("rendered string does not start with the cls marker")
    body = rendered[len(prefix) :]
    sep_token = f" {markers.sep} "
    cut = body.find(sep_token)
    if cut < 0:
        raise ValueError("rendered string has no options/text separator")
    blob, text_part = body[:cut], body[cut + len(sep_token) :]
    suffix = f" {markers.sep}"
    if not text_part.endswith(suffix):
        raise ValueError("rendered string does not end with the sep marker")
    text = text_part[: -len(suffix)]

    symbols = scheme.symbols(n_model)
    head = f"({symbols[0]}) "
    if not blob.startswith(head):
        raise ValueError("options blob does not start with the first indicator")
    options: list[str] = []
    pos = len(head)
    for i in range(1, n_model):
        token = f" ({symbols[i]}) "
        nxt = blob.find(token, pos)
        if nxt < 0:
            raise ValueError(f"indicator {symbols[i]!r} not found while parsing")
        options.append(blob[pos:nxt])
        pos = nxt + len(token)
    options.append(blob[pos:])
    return options, text
