"""Token-bounded text chunking with exact reconstruction.

Tokens are whitespace-delimited by default; the splitter is pluggable for
callers with a model-specific tokenizer. Each chunk keeps the separators it
came with, so concatenating the chunk texts in index order reproduces the
source document byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

DEFAULT_CHUNK_LIMIT = 6000

_PIECE = re.compile(r"\s*\S+")


@dataclass(frozen=True)
class Chunk:
    index: int
    text: str
    token_count: int


def whitespace_pieces(text: str) -> list[str]:
    """Split into one piece per token, each keeping its leading whitespace.

    Trailing whitespace is attached to the final piece. Concatenation of the
    pieces equals the input; a custom splitter must preserve that property.
    """
    pieces = _PIECE.findall(text)
    consumed = sum(len(p) for p in pieces)
    if pieces and consumed < len(text):
        pieces[-1] += text[consumed:]
    return pieces


def count_tokens(text: str, counter: Callable[[str], int] | None = None) -> int:
    """Token count of a text under the default or a supplied counter."""
    if counter is not None:
        return counter(text)
    return len(text.split())


def chunk_text(
    doc: str,
    limit: int = DEFAULT_CHUNK_LIMIT,
    splitter: Callable[[str], list[str]] = whitespace_pieces,
) -> list[Chunk]:
    """Greedily pack tokens into chunks of exactly `limit` tokens.

    Every chunk except possibly the last carries exactly `limit` tokens.
    An empty document yields no chunks; a whitespace-only document yields a
    single zero-token chunk so reconstruction still holds.
    """
    if limit < 1:
        raise ValueError("chunk limit must be >= 1")
    if not doc:
        return []
    pieces = splitter(doc)
    if not pieces:
        return [Chunk(index=0, text=doc, token_count=0)]
    chunks = []
    for start in range(0, len(pieces), limit):
        batch = pieces[start : start + limit]
        chunks.append(
            Chunk(index=len(chunks), text="".join(batch), token_count=len(batch))
        )
    return chunks
