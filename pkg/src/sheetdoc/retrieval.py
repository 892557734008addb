"""Documentation retrieval: chunking, embedding, top-k search, RAG prompts.

Chunking respects paragraph boundaries ("\\n\\n" separators are kept with
the preceding text) and hard-splits oversized paragraphs into windows that
overlap by a fixed number of characters, so the original document can be
reconstructed from the chunks. The default embedder is a deterministic
TF-IDF model (vocabulary from the fitted corpus, L2-normalized vectors);
remote embedders plug in behind the same two-method interface. Retrieval
is an exact cosine scan — the corpora here are a few thousand chunks at
most.
"""

from __future__ import annotations

import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyIndexError, FitError
from .prompting import ChatMessage, PromptBundle, PromptSettings, estimate_tokens
from .errors import PromptSizeError

logger = logging.getLogger(__name__)

DEFAULT_MAX_CHARS = 2000
DEFAULT_OVERLAP = 200
DEFAULT_TOP_K = 10

_WORD = re.compile(r"[a-z0-9][a-z0-9_.@-]*")

RAG_INSTRUCTION = (
    "Generate JavaScript code that performs the requested spreadsheet task. "
    "Use the provided API documentation; answer with code only."
)


@dataclass(frozen=True)
class DocChunk:
    id: str
    source_doc: str
    text: str
    vector: tuple[float, ...] | None = None
    continuation: bool = False  # True when this chunk repeats overlap chars

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("chunk text must be non-empty")


@dataclass
class ChunkIndex:
    chunks: list[DocChunk]
    embedder_id: str
    dimension: int
    embedder: object | None = field(default=None, repr=False)


def _split_paragraphs(text: str) -> list[str]:
    """Split on blank-line boundaries, keeping separators attached to the
    preceding piece so concatenation reconstructs the text."""
    pieces: list[str] = []
    start = 0
    for match in re.finditer(r"\n\s*\n", text):
        pieces.append(text[start:match.end()])
        start = match.end()
    if start < len(text):
        pieces.append(text[start:])
    return [p for p in pieces if p]


def chunk_documents(docs: list[tuple[str, str]], max_chars: int = DEFAULT_MAX_CHARS,
                    overlap_chars: int = DEFAULT_OVERLAP) -> list[DocChunk]:
    """Chunk (name, text) documents into pieces of at most max_chars."""
    if not max_chars > overlap_chars >= 0:
        raise ValueError("need max_chars > overlap_chars >= 0")
    chunks: list[DocChunk] = []
    for name, text in docs:
        if not text:
            continue
        pending = ""
        parts: list[tuple[str, bool]] = []

        def flush() -> None:
            nonlocal pending
            if pending:
                parts.append((pending, False))
                pending = ""

        for paragraph in _split_paragraphs(text):
            if len(pending) + len(paragraph) <= max_chars:
                pending += paragraph
                continue
            flush()
            if len(paragraph) <= max_chars:
                pending = paragraph
                continue
            step = max_chars - overlap_chars
            start = 0
            first = True
            while start < len(paragraph):
                window = paragraph[start:start + max_chars]
                parts.append((window, not first))
                if start + max_chars >= len(paragraph):
                    break
                start += step
                first = False
        flush()
        for position, (piece, continuation) in enumerate(parts):
            chunks.append(DocChunk(
                id=f"{name}#{position:04d}",
                source_doc=name,
                text=piece,
                continuation=continuation,
            ))
    return chunks


def reconstruct_documents(chunks: list[DocChunk],
                          overlap_chars: int = DEFAULT_OVERLAP) -> dict[str, str]:
    """Rebuild each source document from its chunks (the chunking inverse)."""
    docs: dict[str, str] = {}
    for chunk in sorted(chunks, key=lambda c: (c.source_doc, c.id)):
        piece = chunk.text[overlap_chars:] if chunk.continuation else chunk.text
        docs[chunk.source_doc] = docs.get(chunk.source_doc, "") + piece
    return docs


# ------------------------------------------------------------------ TF-IDF


def _terms(text: str) -> list[str]:
    return _WORD.findall(text.lower())


class TfidfEmbedder:
    """Deterministic TF-IDF embedding: idf = ln((1+N)/(1+df)) + 1, vectors
    L2-normalized. Query-time terms outside the fitted vocabulary embed to
    the zero vector (with a warning)."""

    def __init__(self) -> None:
        self.vocabulary: dict[str, int] = {}
        self.idf: list[float] = []

    @property
    def embedder_id(self) -> str:
        return "tfidf-v1"

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def fit(self, texts: list[str]) -> TfidfEmbedder:
        doc_freq: dict[str, int] = {}
        for text in texts:
            for term in set(_terms(text)):
                doc_freq[term] = doc_freq.get(term, 0) + 1
        if not doc_freq:
            raise FitError("no vocabulary: all documents tokenized to nothing")
        self.vocabulary = {term: i for i, term in enumerate(sorted(doc_freq))}
        n_docs = len(texts)
        self.idf = [0.0] * len(self.vocabulary)
        for term, index in self.vocabulary.items():
            self.idf[index] = math.log((1 + n_docs) / (1 + doc_freq[term])) + 1.0
        return self

    def embed(self, texts: list[str]) -> list[tuple[float, ...]]:
        if not self.vocabulary:
            raise FitError("embedder is not fitted")
        vectors: list[tuple[float, ...]] = []
        for text in texts:
            vector = [0.0] * len(self.vocabulary)
            known = 0
            for term in _terms(text):
                index = self.vocabulary.get(term)
                if index is None:
                    continue
                vector[index] += self.idf[index]
                known += 1
            norm = math.sqrt(math.fsum(v * v for v in vector))
            if norm == 0.0:
                if known == 0:
                    logger.warning("text has no in-vocabulary terms; embedding to zeros")
            else:
                vector = [v / norm for v in vector]
            vectors.append(tuple(vector))
        return vectors


def build_index(chunks: list[DocChunk], embedder: TfidfEmbedder | None = None) -> ChunkIndex:
    """Fit (for TF-IDF) and embed all chunks into a searchable index."""
    if not chunks:
        raise EmptyIndexError("cannot index zero chunks")
    if embedder is None:
        embedder = TfidfEmbedder().fit([c.text for c in chunks])
    vectors = embedder.embed([c.text for c in chunks])
    stored = [DocChunk(c.id, c.source_doc, c.text, tuple(v), c.continuation)
              for c, v in zip(chunks, vectors)]
    return ChunkIndex(stored, embedder.embedder_id, embedder.dimension, embedder)


def _cosine(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    # Stored vectors are L2-normalized, so the dot product is the cosine;
    # still guard against zero vectors.
    dot = math.fsum(x * y for x, y in zip(a, b))
    return dot


def retrieve(index: ChunkIndex, query: str, k: int = DEFAULT_TOP_K) -> list[tuple[DocChunk, float]]:
    """Top-k chunks by cosine similarity, descending; ties break by chunk
    id ascending; k larger than the index returns everything, sorted."""
    if not index.chunks:
        raise EmptyIndexError("index has no chunks")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if index.embedder is None:
        raise EmptyIndexError("index has no embedder attached")
    query_vector = index.embedder.embed([query])[0]
    scored = [(chunk, _cosine(query_vector, chunk.vector)) for chunk in index.chunks]
    scored.sort(key=lambda pair: (-pair[1], pair[0].id))
    return scored[:k]


# ------------------------------------------------------------- persistence


def save_index(index: ChunkIndex, path: str | Path) -> None:
    doc = {
        "embedder_id": index.embedder_id,
        "dimension": index.dimension,
        "chunks": [
            {"id": c.id, "source_doc": c.source_doc, "text": c.text,
             "vector": list(c.vector or ()),
             **({"continuation": True} if c.continuation else {})}
            for c in index.chunks
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_index(path: str | Path) -> ChunkIndex:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    chunks = [
        DocChunk(c["id"], c["source_doc"], c["text"], tuple(c["vector"]),
                 bool(c.get("continuation", False)))
        for c in doc["chunks"]
    ]
    index = ChunkIndex(chunks, doc["embedder_id"], int(doc["dimension"]))
    if index.embedder_id.startswith("tfidf"):
        # TF-IDF state is a pure function of the stored chunk texts; refit.
        index.embedder = TfidfEmbedder().fit([c.text for c in chunks])
    return index


# -------------------------------------------------------------- RAG prompt


def assemble_rag_prompt(task: str, retrieved: list[DocChunk],
                        few_shot: list[tuple[str, str]],
                        settings: PromptSettings = PromptSettings()) -> PromptBundle:
    """Three parts, in order: few-shot exemplars, retrieved context, task."""
    messages: list[ChatMessage] = [ChatMessage("developer", RAG_INSTRUCTION)]
    for shot_task, shot_code in few_shot:
        messages.append(ChatMessage("user", shot_task))
        messages.append(ChatMessage("assistant", shot_code))
    if retrieved:
        context = "\n\n".join(chunk.text for chunk in retrieved)
    else:
        context = "(no documentation retrieved)"
    messages.append(ChatMessage(
        "user", f"Here is relevant API documentation:\n{context}\n\nTask: {task}"))
    estimated = estimate_tokens("".join(m.content for m in messages))
    if estimated > settings.context_budget_tokens:
        raise PromptSizeError(estimated, settings.context_budget_tokens)
    return PromptBundle(
        messages=tuple(messages),
        shot_count=len(few_shot),
        temperature=settings.temperature,
        max_new_tokens=settings.max_new_tokens,
        timeout_seconds=settings.timeout_seconds,
    )
