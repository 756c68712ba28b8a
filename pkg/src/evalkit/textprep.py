"""Text preparation: tokenization, stopword filtering and intent standardization.

Tokenization is explicit and configurable because every token-based metric
depends on it; a TokenSeq carries the config that produced it so results stay
auditable. Standardization replaces entity-like spans (numbers, hex literals,
quoted strings, register names) in natural-language intents with dense "var#"
placeholders and is inverted by destandardization on model output.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import ConfigError

logger = logging.getLogger(__name__)

TOKENIZER_MODES = ("whitespace", "code-punct", "char")

NEWLINE_TOKEN = "\n"

_WS = re.compile(r"[ \t\f\v]+")
# word runs | operator runs | any other single non-space character
_CODE_CHUNK = re.compile(r"[A-Za-z0-9_]+|[+\-*/%=!<>&|^~]+|\S")


@dataclass(frozen=True)
class TokenizerConfig:
    """How raw text is turned into tokens.

    mode "whitespace" splits on runs of spaces/tabs; newlines either act as
    whitespace or emit a NEWLINE_TOKEN per newline_is_token. mode "code-punct"
    additionally splits commas, brackets and operator runs into standalone
    tokens. mode "char" emits one token per character and ignores
    newline_is_token.
    """

    mode: str = "whitespace"
    newline_is_token: bool = False
    lowercase: bool = False

    def __post_init__(self) -> None:
        if self.mode not in TOKENIZER_MODES:
            raise ConfigError(f"unknown tokenizer mode {self.mode!r}")


# Defaults: code snippets keep case and newline structure; intents are folded.
CODE_TOKENIZER = TokenizerConfig(mode="whitespace", newline_is_token=True)
INTENT_TOKENIZER = TokenizerConfig(mode="whitespace", lowercase=True)


@dataclass(frozen=True)
class TokenSeq(Sequence):
    """An ordered, non-empty-token sequence plus the config that produced it."""

    tokens: tuple[str, ...]
    config: TokenizerConfig

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def __iter__(self):
        return iter(self.tokens)


def tokenize(text: str, cfg: TokenizerConfig) -> TokenSeq:
    """Split text into a TokenSeq according to cfg. Empty text yields no tokens."""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    if cfg.lowercase:
        text = text.lower()
    if cfg.mode == "char":
        return TokenSeq(tuple(text), cfg)

    out: list[str] = []
    for k, segment in enumerate(text.split("\n")):
        if k and cfg.newline_is_token:
            out.append(NEWLINE_TOKEN)
        if cfg.mode == "whitespace":
            out.extend(t for t in _WS.split(segment) if t)
        else:  # code-punct
            out.extend(_CODE_CHUNK.findall(segment))
    return TokenSeq(tuple(out), cfg)


@dataclass(frozen=True)
class StopwordList:
    """Set of lowercase words to drop from intents."""

    words: frozenset[str]

    def __post_init__(self) -> None:
        if not self.words:
            raise ConfigError("stopword list is empty")

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "StopwordList":
        return cls(frozenset(w.strip().lower() for w in words if w.strip()))

    @classmethod
    def from_file(cls, path) -> "StopwordList":
        words = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if line:
                    words.append(line)
        if not words:
            raise ConfigError(f"stopword file {path} contains no words")
        return cls.from_words(words)


def filter_stopwords(seq: TokenSeq, stop: StopwordList) -> TokenSeq:
    """Drop tokens whose lowercase form is a stopword; order preserved."""
    kept = tuple(t for t in seq.tokens if t.lower() not in stop.words)
    return TokenSeq(kept, seq.config)


_PLACEHOLDER = re.compile(r"\bvar(\d+)\b")


@dataclass(frozen=True)
class StandardizationMap:
    """Ordered placeholder -> literal pairs for one intent.

    Placeholders are dense ("var0", "var1", ...) and the mapping is injective:
    repeated occurrences of the same literal share one placeholder.
    """

    entries: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for i, (ph, lit) in enumerate(self.entries):
            if ph != f"var{i}":
                raise ValueError(f"placeholder {ph!r} breaks dense var0.. numbering")
            if not lit:
                raise ValueError(f"placeholder {ph!r} maps to an empty literal")
        literals = [lit for _, lit in self.entries]
        if len(set(literals)) != len(literals):
            raise ValueError("placeholder map is not injective")

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def compile_rules(
    rules: Sequence[tuple[str, re.Pattern | str]]
) -> list[tuple[str, re.Pattern]]:
    """Compile (name, regex) pairs, rejecting bad patterns with a ConfigError.

    Already-compiled patterns pass through unchanged (flags preserved). Rules
    that can match the empty string are rejected: they would standardize
    nothing while stalling the left-to-right scan.
    """
    compiled = []
    for name, pattern in rules:
        if not isinstance(pattern, re.Pattern):
            try:
                pattern = re.compile(pattern)
            except re.error as exc:
                raise ConfigError(f"rule {name!r}: invalid regex: {exc}") from exc
        if pattern.fullmatch(""):
            raise ConfigError(f"rule {name!r}: regex matches the empty string")
        compiled.append((name, pattern))
    return compiled


# Built-in entity rules, in priority order. Quoted strings go first so hex or
# decimal literals inside quotes are captured whole.
DEFAULT_RULES: tuple[tuple[str, str], ...] = (
    ("quoted-string", r"\"[^\"]*\"|'[^']*'"),
    ("hex-literal", r"0[xX][0-9a-fA-F]+"),
    ("decimal-literal", r"(?<![\w.])\d+(?:\.\d+)?(?![\w.])"),
    ("register-name", r"(?i:\b(?:[er]?(?:ax|bx|cx|dx|si|di|bp|sp)|[abcd][lh]|[er]?ip|r(?:8|9|1[0-5])[dwb]?)\b)"),
)


def load_rules(path) -> list[tuple[str, re.Pattern]]:
    """Read an ordered name=regex rules file ('#' starts a comment line)."""
    rules = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected name=regex, got {line!r}")
            name, pattern = line.split("=", 1)
            rules.append((name.strip(), pattern.strip()))
    if not rules:
        raise ConfigError(f"rules file {path} contains no rules")
    return compile_rules(rules)


def standardize(
    intent: str, rules: Sequence[tuple[str, re.Pattern | str]]
) -> tuple[str, StandardizationMap]:
    """Replace entity spans in `intent` with var0, var1, ... placeholders.

    Matching is left-to-right, first-match-wins: at each position the earliest
    match starts a replacement; among rules matching at the same position the
    one listed first wins. Identical literals reuse their placeholder. Returns
    the rewritten intent plus the map needed to invert the rewrite.
    """
    compiled = compile_rules(rules)
    out: list[str] = []
    entries: list[str] = []  # literals in order of first appearance
    index: dict[str, int] = {}
    pos = 0
    while pos < len(intent):
        best: re.Match | None = None
        for _, pattern in compiled:
            m = pattern.search(intent, pos)
            if m is not None and (best is None or m.start() < best.start()):
                best = m
        if best is None:
            out.append(intent[pos:])
            break
        out.append(intent[pos : best.start()])
        literal = best.group()
        if literal not in index:
            index[literal] = len(entries)
            entries.append(literal)
        out.append(f"var{index[literal]}")
        pos = best.end()
    smap = StandardizationMap(tuple((f"var{i}", lit) for i, lit in enumerate(entries)))
    return "".join(out), smap


def destandardize(snippet: str, smap: StandardizationMap) -> str:
    """Replace every known var# placeholder in `snippet` with its literal.

    Placeholders without a map entry are left intact and logged; replacement is
    single-pass, so literals containing "var#" are never re-expanded.
    """
    mapping = smap.as_dict()
    unknown: list[str] = []

    def sub(m: re.Match) -> str:
        ph = m.group()
        if ph in mapping:
            return mapping[ph]
        unknown.append(ph)
        return ph

    result = _PLACEHOLDER.sub(sub, snippet)
    if unknown:
        logger.warning("destandardize: no mapping for %s", ", ".join(sorted(set(unknown))))
    return result
