"""Frequency-ranked word list with trie lookups.

The on-disk format is one `word<TAB>count` pair per line; `#` starts a
comment and blank lines are skipped. Counts are raw corpus occurrence
counts; probabilities are only ever formed relative to a candidate set, so
the list never needs global normalization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

log = logging.getLogger(__name__)

DEFAULT_CAP = 50_000

_TERMINAL = "$"  # trie marker; never a letter


class LexiconError(ValueError):
    pass


@dataclass
class Lexicon:
    counts: dict[str, int] = field(default_factory=dict)
    _trie: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._trie and self.counts:
            for w in self.counts:
                self._insert(w)

    def _insert(self, word: str) -> None:
        node = self._trie
        for c in word:
            node = node.setdefault(c, {})
        node[_TERMINAL] = True

    def __contains__(self, word: str) -> bool:
        return word in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self) -> Iterator[str]:
        return iter(self.counts)

    def count(self, word: str) -> int:
        return self.counts[word]

    def word_prob(self, word: str, candidates: Iterable[str]) -> float:
        """Word frequency normalized over a candidate set (all must be in the lexicon)."""
        cands = list(candidates)
        if not cands:
            raise LexiconError("empty candidate set")
        total = 0
        for w in cands:
            if w not in self.counts:
                raise LexiconError(f"candidate not in lexicon: {w!r}")
            total += self.counts[w]
        if word not in cands:
            raise LexiconError(f"word not in candidate set: {word!r}")
        return self.counts[word] / total

    def prefix_search(self, prefix: str) -> list[str]:
        """All words starting with the prefix, alphabetical."""
        node = self._trie
        for c in prefix:
            node = node.get(c)
            if node is None:
                return []
        out: list[str] = []
        self._collect(node, prefix, out)
        return out

    def _collect(self, node: dict, acc: str, out: list[str]) -> None:
        for key in sorted(node):
            if key == _TERMINAL:
                out.append(acc)
            else:
                self._collect(node[key], acc + key, out)

    def constrained_words(self, letter_sets: list[set[str]] | list[frozenset[str]]) -> list[str]:
        """Words of exactly len(letter_sets) letters whose i-th letter is in the
        i-th set. Equivalent to enumerating every combination and filtering,
        but walks the trie so long inputs stay cheap."""
        out: list[str] = []
        self._constrained(self._trie, letter_sets, 0, "", out, prefixes_only=False)
        return out

    def constrained_completions(self, letter_sets: list[set[str]] | list[frozenset[str]]) -> list[str]:
        """Words whose first len(letter_sets) letters match the sets, any length."""
        out: list[str] = []
        self._constrained(self._trie, letter_sets, 0, "", out, prefixes_only=True)
        return out

    def _constrained(self, node: dict, sets: list, depth: int, acc: str,
                     out: list[str], prefixes_only: bool) -> None:
        if depth == len(sets):
            if prefixes_only:
                self._collect(node, acc, out)
            elif _TERMINAL in node:
                out.append(acc)
            return
        for c in sorted(sets[depth]):
            child = node.get(c)
            if child is not None:
                self._constrained(child, sets, depth + 1, acc + c, out, prefixes_only)


def parse_lexicon_lines(lines: Iterable[str], cap: int = DEFAULT_CAP) -> Lexicon:
    counts: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"line {lineno}: expected word<TAB>count, got {raw.rstrip()!r}")
        word, count_s = parts[0].strip(), parts[1].strip()
        try:
            count = int(count_s)
        except ValueError:
            raise LexiconError(f"line {lineno}: bad count {count_s!r}") from None
        if count < 0:
            raise LexiconError(f"line {lineno}: negative count")
        if not word or any(not ("a" <= c <= "z") for c in word):
            log.warning("lexicon line %d: dropping word with characters outside a-z: %r", lineno, word)
            continue
        counts[word] = counts.get(word, 0) + count  # duplicates accumulate
    if len(counts) > cap:
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:cap]
        counts = dict(ranked)
    return Lexicon(counts=counts)


def load_lexicon(path: str | Path, cap: int = DEFAULT_CAP) -> Lexicon:
    with open(path, encoding="utf-8") as f:
        return parse_lexicon_lines(f, cap=cap)


def save_lexicon(path: str | Path, lexicon: Lexicon) -> None:
    lines = [f"{w}\t{c}" for w, c in sorted(lexicon.counts.items(), key=lambda kv: (-kv[1], kv[0]))]
    Path(path).write_text("\n".join(lines) + "\n")


def builtin_lexicon_path() -> Path:
    return Path(__file__).parent / "data" / "words.txt"


def builtin_lexicon(cap: int = DEFAULT_CAP) -> Lexicon:
    return load_lexicon(builtin_lexicon_path(), cap=cap)
