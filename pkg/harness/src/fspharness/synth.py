"""Synthetic fixture corpora for the toy end-to-end loop.

Writes the dataset CLI's input formats: an article corpus (multi-paragraph,
distinct leads, so hard negatives exist), a review corpus whose lead sentences
are sentiment verdicts (many item-free, matching the zero-shot verbalizer
style), a held-out balanced sentiment slice, and the binary task file.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

POSITIVE_ADJ = ["great", "wonderful", "excellent", "superb", "fantastic", "delightful", "reliable", "impressive"]
NEGATIVE_ADJ = ["terrible", "awful", "dreadful", "disappointing", "shoddy", "miserable", "defective", "useless"]

ITEMS = {
    "Kitchen": ["kettle", "blender", "skillet", "toaster", "grinder", "whisk"],
    "Audio": ["headphones", "speaker", "earbuds", "turntable", "amplifier", "microphone"],
    "Books": ["novel", "atlas", "biography", "cookbook", "anthology", "field guide"],
    "Tools": ["drill", "wrench", "sander", "clamp", "chisel", "torque driver"],
    "Garden": ["trowel", "pruner", "sprinkler", "planter", "shears", "wheelbarrow"],
}

# Item-free verdicts mirror the inference verbalizers; item-bearing ones force
# the model past pure keyword matching.
BARE_LEADS = ["It's {adj}.", "Truly {adj}.", "Simply {adj}.", "Honestly {adj}."]
ITEM_LEADS = [
    "This {item} is {adj}.",
    "A {adj} {item} overall.",
    "What a {adj} {item}.",
    "The {item} proved {adj}.",
]

POSITIVE_BODY = [
    "The {part} felt sturdy and the finish looked superb.",
    "It worked flawlessly every single day.",
    "Setup was quick and the results were excellent.",
    "I recommend this {item} to everyone who asks.",
    "Performance stayed wonderful even after heavy use.",
    "The {part} exceeded all of my expectations.",
    "Using it has been a delightful experience.",
]
NEGATIVE_BODY = [
    "The {part} felt flimsy and the finish looked shoddy.",
    "It failed miserably within the first week.",
    "Setup was confusing and the results were dreadful.",
    "I warned everyone who asked about this {item}.",
    "Performance turned awful after light use.",
    "The {part} fell far short of my expectations.",
    "Using it has been a frustrating experience.",
]
PARTS = ["handle", "casing", "motor", "lid", "base", "cord", "binding", "blade"]

TOPICS = {
    "river": ["water", "valley", "bridge", "current", "bank", "ford"],
    "castle": ["tower", "wall", "moat", "garrison", "gate", "keep"],
    "railway": ["track", "signal", "station", "freight", "junction", "viaduct"],
    "harbor": ["quay", "tide", "vessel", "cargo", "mooring", "breakwater"],
    "forest": ["pine", "canopy", "trail", "ranger", "clearing", "coppice"],
    "glacier": ["ice", "moraine", "crevasse", "melt", "ridge", "cirque"],
    "market": ["stall", "trader", "square", "produce", "auction", "charter"],
    "archive": ["ledger", "folio", "vault", "index", "charter", "scribe"],
}
PLACES = [
    "Aldermoor", "Briarcliff", "Caldwick", "Dunmere", "Eastholt", "Fenwater",
    "Garrowby", "Hartsfell", "Ironcombe", "Kirlowes", "Marrowgate", "Nethercote",
    "Ollerbrook", "Pennymarsh", "Ravensworth", "Selbourne", "Thornholme", "Westonbury",
]
ARTICLE_LEADS = [
    "{place} is a noted {topic} site in the province.",
    "The {word} at {place} dates from the charter years.",
    "{place} gained prominence after the {topic} survey.",
    "Early maps mark {place} beside the great {word}.",
    "A restored {word} anchors the {topic} grounds of {place}.",
]

TASK_SENTIMENT = {
    "name": "binary_sentiment",
    "class_names": ["negative", "positive"],
    "verbalizers": ["It's terrible.", "It's great."],
}


def _spell(number: int) -> str:
    digits = "zero one two three four five six seven eight nine".split()
    return " ".join(digits[int(d)] for d in str(number))


def review_record(rng: random.Random, index: int, positive: bool) -> dict:
    category = rng.choice(list(ITEMS))
    item = rng.choice(ITEMS[category])
    adj = rng.choice(POSITIVE_ADJ if positive else NEGATIVE_ADJ)
    if rng.random() < 0.4:
        lead = rng.choice(BARE_LEADS).format(adj=adj)
    else:
        lead = rng.choice(ITEM_LEADS).format(item=item, adj=adj)
    bank = POSITIVE_BODY if positive else NEGATIVE_BODY
    body = [
        s.format(item=item, part=rng.choice(PARTS))
        for s in rng.sample(bank, rng.randint(2, 3))
    ]
    body.append(f"Order {_spell(index)} closes this note.")
    return {
        "category": category,
        "text": " ".join([lead] + body),
        "body": " ".join(body),
        "sentiment": int(positive),
    }


def article_record(rng: random.Random, index: int, paragraphs: tuple[int, int]) -> dict:
    place = f"{rng.choice(PLACES)} {_spell(index)}"
    topic = rng.choice(list(TOPICS))
    words = TOPICS[topic]
    paras = []
    for k in range(rng.randint(*paragraphs)):
        lead = ARTICLE_LEADS[k % len(ARTICLE_LEADS)].format(
            place=place, topic=topic, word=rng.choice(words)
        )
        body = [
            f"The {rng.choice(words)} near {place} draws surveyors each season.",
            f"Entry {_spell(index)} part {_spell(k)} lists the {topic} holdings.",
        ]
        paras.append(" ".join([lead] + body))
    return {"id": f"syn-{index:06d}", "title": place, "paragraphs": paras}


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def make_corpus(
    out_dir: str | Path,
    n_articles: int = 7000,
    n_reviews: int = 30_000,
    eval_size: int = 500,
    seed: int = 17,
) -> dict[str, Path]:
    """Write all fixture files; eval reviews are disjoint from tuning reviews."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    articles = [article_record(rng, i, paragraphs=(2, 4)) for i in range(n_articles)]

    half_eval = eval_size // 2
    labels = [i % 2 == 0 for i in range(n_reviews)]
    eval_labels = [True] * half_eval + [False] * (eval_size - half_eval)
    reviews = [review_record(rng, i, labels[i]) for i in range(n_reviews)]
    held_out = [
        review_record(rng, n_reviews + i, eval_labels[i]) for i in range(eval_size)
    ]
    rng.shuffle(held_out)

    paths = {
        "articles": write_jsonl(out_dir / "articles.jsonl", articles),
        "reviews": write_jsonl(
            out_dir / "reviews.jsonl",
            [{"category": r["category"], "text": r["text"]} for r in reviews],
        ),
        "sentiment_eval": write_jsonl(
            out_dir / "sentiment_eval.jsonl",
            [{"text": r["body"], "label": r["sentiment"]} for r in held_out],
        ),
    }
    task_path = out_dir / "task_sentiment.json"
    task_path.write_text(json.dumps(TASK_SENTIMENT, indent=2) + "\n", "utf-8")
    paths["task"] = task_path
    return paths
