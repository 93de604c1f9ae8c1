"""Reader for the prompt-pair JSON-lines files written by `clozeqa augment`.

This is the format a trainer consumes: each line holds one `ori` or `aug`
pair with `input` (answer slot masked) and `target` (answer filled in).
"""

import gzip
import json
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

REQUIRED_KEYS = ("id", "kind", "template", "input", "target", "question", "answer",
                 "context", "span", "entity_id", "source_qid")
KINDS = ("ori", "aug")
TEMPLATES = ("gotta", "what", "random")


@dataclass(frozen=True)
class PromptRecord:
    id: str
    kind: str
    template: str
    input: str
    target: str
    question: str
    answer: str
    context: str
    span: Optional[Tuple[int, int]]
    entity_id: Optional[str]
    source_qid: str


def _open(path):
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def _record(obj, where):
    missing = [k for k in REQUIRED_KEYS if k not in obj]
    if missing:
        raise ValueError(f"{where}: missing keys {missing}")
    if obj["kind"] not in KINDS:
        raise ValueError(f"{where}: unknown kind {obj['kind']!r}")
    if obj["template"] not in TEMPLATES:
        raise ValueError(f"{where}: unknown template {obj['template']!r}")
    span = obj["span"]
    if obj["kind"] == "aug":
        if span is None:
            raise ValueError(f"{where}: aug pair without span")
        span = (int(span["start"]), int(span["end"]))
    elif span is not None:
        raise ValueError(f"{where}: ori pair with a span")
    return PromptRecord(
        id=obj["id"], kind=obj["kind"], template=obj["template"], input=obj["input"],
        target=obj["target"], question=obj["question"], answer=obj["answer"],
        context=obj["context"], span=span, entity_id=obj["entity_id"],
        source_qid=obj["source_qid"])


def read_prompt_pairs(path) -> Iterator[PromptRecord]:
    """Yields validated records in file order; raises ValueError on bad lines."""
    with _open(path) as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
            yield _record(obj, f"{path}:{lineno}")


def split_by_kind(records) -> Tuple[List[PromptRecord], List[PromptRecord]]:
    """(ori, aug) lists, each in file order."""
    ori, aug = [], []
    for r in records:
        (ori if r.kind == "ori" else aug).append(r)
    return ori, aug
