"""Long-running wire-protocol server.

Reads one JSON request per stdin line ({"id", "text", "kind"}), decodes up
to `beams` target sequences with the kind's generator, splits them on the
';' convention, scores every distinct phrase with the cross-encoder, and
writes one JSON response line ({"id", "candidates": [{"phrase", "score"}]}),
flushing after each. Malformed request lines produce an error record on
stderr and processing continues; EOF on stdin exits cleanly.
"""

from __future__ import annotations

import json
import sys

from .generator import GeneratorBundle
from .scorer import ScorerBundle
from .vocab import word_tokens


def _parse_phrases(sequences: list[str]) -> list[str]:
    phrases: list[str] = []
    seen: set[str] = set()
    for sequence in sequences:
        for part in sequence.split(";"):
            phrase = part.strip()
            key = " ".join(word_tokens(phrase))
            if phrase and key and key not in seen:
                seen.add(key)
                phrases.append(phrase)
    return phrases


def serve(
    generators: dict[str, GeneratorBundle],
    scorer: ScorerBundle,
    stdin=None,
    stdout=None,
    stderr=None,
    beams: int = 5,
) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr

    def log_error(record: dict) -> None:
        print(json.dumps(record, ensure_ascii=False), file=stderr, flush=True)

    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            doc_id = request["id"]
            text = request["text"]
            kind = request["kind"]
            if not isinstance(doc_id, str) or not isinstance(text, str):
                raise TypeError("'id' and 'text' must be strings")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            log_error({"error": f"malformed request line: {exc}"})
            continue
        generator = generators.get(kind)
        if generator is None:
            # keep the one-response-per-request contract, but say why it is empty
            log_error({"error": f"no generator loaded for kind {kind!r}", "id": doc_id})
            print(json.dumps({"id": doc_id, "candidates": []}), file=stdout, flush=True)
            continue
        phrases = _parse_phrases(generator.generate_sequences(text, n=beams))
        scores = scorer.score(text, phrases)
        ranked = sorted(zip(phrases, scores), key=lambda pair: (-pair[1], pair[0]))
        response = {
            "id": doc_id,
            "candidates": [{"phrase": p, "score": s} for p, s in ranked],
        }
        print(json.dumps(response, ensure_ascii=False), file=stdout, flush=True)
    return 0
