"""Query-level classifier contract: builtin naive Bayes or a subprocess.

The engine only ever needs a mapping from a batch of texts to class
probability vectors. The builtin backend is a multinomial naive-Bayes
bag-of-words model, enough for desk-scale runs; arbitrary models plug in
through a newline-delimited JSON pipe protocol (see ExternalClassifier).

Every handle caches responses keyed by token sequence: neighborhoods
revisit the same texts across rounds and explicands, and corpus-wide
classification for prototype selection is reused across explanations.
"""

from __future__ import annotations

import json
import logging
import math
import queue
import shlex
import subprocess
import threading
from typing import Sequence

from .corpus import TokenSeq, tokenize
from .errors import ClassifierProtocolError, TrainingDataError

log = logging.getLogger(__name__)

Prediction = tuple[float, ...]

_SUM_TOLERANCE = 1e-3


class ClassifierHandle:
    """Base class: batching, response cache, and the common interface."""

    class_count: int = 2

    def __init__(self):
        self._cache: dict[TokenSeq, Prediction] = {}

    def classify_batch(self, texts: Sequence[TokenSeq]) -> list[Prediction]:
        """One prediction per input, order preserved; backend sees only cache misses."""
        texts = [tuple(t) for t in texts]
        misses = []
        for t in texts:
            if t not in self._cache and t not in misses:
                misses.append(t)
        if misses:
            fresh = self._classify_uncached(misses)
            if len(fresh) != len(misses):
                raise ClassifierProtocolError(
                    f"backend returned {len(fresh)} predictions for {len(misses)} texts"
                )
            for t, probs in zip(misses, fresh):
                self._cache[t] = probs
        return [self._cache[t] for t in texts]

    def classify_one(self, tokens: TokenSeq) -> Prediction:
        return self.classify_batch([tokens])[0]

    def _classify_uncached(self, texts: list[TokenSeq]) -> list[Prediction]:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class NaiveBayesClassifier(ClassifierHandle):
    """Multinomial naive Bayes over bags of words, add-one smoothing."""

    def __init__(self, labels, class_doc_counts, token_counts, total_tokens):
        super().__init__()
        self.labels = list(labels)
        self.class_doc_counts = list(class_doc_counts)
        self.token_counts = [dict(tc) for tc in token_counts]
        self.total_tokens = list(total_tokens)
        self.vocabulary = set()
        for tc in self.token_counts:
            self.vocabulary.update(tc)
        self.class_count = len(self.labels)

    def _classify_uncached(self, texts):
        total_docs = sum(self.class_doc_counts)
        vocab_size = len(self.vocabulary)
        out = []
        for tokens in texts:
            logp = []
            for c in range(self.class_count):
                lp = math.log(self.class_doc_counts[c] / total_docs)
                denom = self.total_tokens[c] + vocab_size
                for token in tokens:
                    if token in self.vocabulary:
                        lp += math.log((self.token_counts[c].get(token, 0) + 1) / denom)
                logp.append(lp)
            peak = max(logp)
            unnorm = [math.exp(lp - peak) for lp in logp]
            z = sum(unnorm)
            out.append(tuple(u / z for u in unnorm))
        return out

    def describe(self) -> str:
        return f"builtin naive-bayes ({self.class_count} classes, |V|={len(self.vocabulary)})"

    def save(self, path: str):
        payload = {
            "format": "xprob-naive-bayes",
            "version": 1,
            "labels": self.labels,
            "class_doc_counts": self.class_doc_counts,
            "token_counts": self.token_counts,
            "total_tokens": self.total_tokens,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True)

    @classmethod
    def load(cls, path: str) -> "NaiveBayesClassifier":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("format") != "xprob-naive-bayes":
            raise ClassifierProtocolError(f"{path!r} is not a builtin model file")
        return cls(
            labels=payload["labels"],
            class_doc_counts=payload["class_doc_counts"],
            token_counts=payload["token_counts"],
            total_tokens=payload["total_tokens"],
        )


def train_builtin(labeled: Sequence[tuple[str, str]]) -> NaiveBayesClassifier:
    """Train the builtin model on (label, raw text) pairs.

    Labels are sorted to assign class indices, so for "0"/"1" sentiment
    data class 0 is negative and class 1 positive.
    """
    if len(labeled) < 10:
        raise TrainingDataError(f"need at least 10 examples, got {len(labeled)}")
    labels = sorted({label for label, _ in labeled})
    if len(labels) < 2:
        raise TrainingDataError(f"need at least 2 distinct labels, got {labels}")
    class_of = {label: idx for idx, label in enumerate(labels)}
    class_doc_counts = [0] * len(labels)
    token_counts: list[dict[str, int]] = [{} for _ in labels]
    total_tokens = [0] * len(labels)
    for label, text in labeled:
        c = class_of[label]
        class_doc_counts[c] += 1
        for token in tokenize(text):
            token_counts[c][token] = token_counts[c].get(token, 0) + 1
            total_tokens[c] += 1
    return NaiveBayesClassifier(labels, class_doc_counts, token_counts, total_tokens)


class ExternalClassifier(ClassifierHandle):
    """Subprocess backend speaking newline-delimited JSON over stdin/stdout.

    Handshake: the child prints {"classes": <int>} on startup. Each
    request is {"id": <uint64>, "texts": [<string>, ...]}; the child
    answers {"id": <same>, "probs": [[<float>, ...], ...]} with one row
    per text. Rows whose probabilities do not sum to 1 within 1e-3 are
    rejected; smaller drift is renormalized with a warning. One child
    process serves the whole session; concurrent callers are serialized.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 30.0):
        super().__init__()
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self._lock = threading.Lock()
        self._next_id = 0
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()
        handshake = self._read_message("handshake")
        if "classes" not in handshake or int(handshake["classes"]) < 2:
            raise ClassifierProtocolError(f"bad handshake from {self.command}: {handshake}")
        self.class_count = int(handshake["classes"])

    def _pump(self):
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _read_message(self, what: str) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise ClassifierProtocolError(
                f"classifier process timed out after {self.timeout}s awaiting {what}"
            ) from None
        if line is None:
            raise ClassifierProtocolError(f"classifier process exited while awaiting {what}")
        try:
            return json.loads(line)
        except json.JSONDecodeError as exc:
            raise ClassifierProtocolError(f"bad JSON in {what}: {line!r}") from exc

    def _classify_uncached(self, texts):
        with self._lock:
            request_id = self._next_id
            self._next_id += 1
            payload = {"id": request_id, "texts": [" ".join(t) for t in texts]}
            try:
                assert self._proc.stdin is not None
                self._proc.stdin.write(json.dumps(payload) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ClassifierProtocolError(
                    f"classifier process unreachable for batch id={request_id}: {exc}"
                ) from exc
            response = self._read_message(f"response to batch id={request_id}")
        if response.get("id") != request_id:
            raise ClassifierProtocolError(
                f"response id {response.get('id')} does not match request id {request_id}"
            )
        rows = response.get("probs")
        if not isinstance(rows, list) or len(rows) != len(texts):
            raise ClassifierProtocolError(
                f"batch id={request_id}: expected {len(texts)} probability rows"
            )
        return [self._check_row(row, request_id) for row in rows]

    def _check_row(self, row, request_id: int) -> Prediction:
        if len(row) != self.class_count:
            raise ClassifierProtocolError(
                f"batch id={request_id}: row has {len(row)} entries, expected {self.class_count}"
            )
        total = sum(row)
        if abs(total - 1.0) > _SUM_TOLERANCE:
            raise ClassifierProtocolError(
                f"batch id={request_id}: probabilities sum to {total:.6f}"
            )
        if abs(total - 1.0) > 1e-6:
            log.warning(
                "renormalizing external prediction summing to %.6f (batch id=%d)",
                total,
                request_id,
            )
            return tuple(p / total for p in row)
        return tuple(float(p) for p in row)

    def describe(self) -> str:
        return f"cmd:{' '.join(self.command)}"

    def close(self):
        if self._proc.poll() is None:
            try:
                if self._proc.stdin is not None:
                    self._proc.stdin.close()
                self._proc.terminate()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()


def open_classifier(spec: str, timeout: float = 30.0) -> ClassifierHandle:
    """Build a handle from a spec string: builtin:<model-path> or cmd:<command>."""
    if spec.startswith("builtin:"):
        return NaiveBayesClassifier.load(spec[len("builtin:") :])
    if spec.startswith("cmd:"):
        return ExternalClassifier(spec[len("cmd:") :], timeout=timeout)
    raise ClassifierProtocolError(
        f"classifier spec must start with 'builtin:' or 'cmd:', got {spec!r}"
    )
