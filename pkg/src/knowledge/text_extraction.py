import re
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType

from ..config import DEFAULT_STOPWORDS_PATH, DEFAULT_SUFFIX_RULES_PATH, setup_logging

# Configure logging for the text extraction module
logger = setup_logging()

URL_PATTERN = re.compile(r"^(?:[a-z][a-z0-9+.-]*://|www\.)\S*$")
SEPARATOR_PATTERN = re.compile(r"[\W_]+")
REPLACEMENT_CHAR = "\ufffd"


@dataclass(frozen=True)
class SuffixRule:
    suffix: str
    replacement: str
    min_token_len: int

    def applies_to(self, token):
        return len(token) >= self.min_token_len and token.endswith(self.suffix)

    def apply(self, token):
        return token[: len(token) - len(self.suffix)] + self.replacement


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple = ()
    # Number of characters replaced while decoding invalid UTF-8 input
    decode_errors: int = 0

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class ConceptCounts:
    counts: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        cleaned = {c: int(n) for c, n in dict(self.counts).items() if n > 0}
        object.__setattr__(self, "counts", MappingProxyType(cleaned))

    @property
    def total(self):
        return sum(self.counts.values())

    def __bool__(self):
        return bool(self.counts)

    def __contains__(self, concept_id):
        return concept_id in self.counts


@dataclass(frozen=True)
class LabelIndex:
    entries: MappingProxyType
    max_label_len: int

    def __len__(self):
        return len(self.entries)

    def lookup(self, tokens):
        return self.entries.get(tuple(tokens), frozenset())


def load_stopwords(path=DEFAULT_STOPWORDS_PATH):
    """Read a one-word-per-line stop word file into a lowercase set."""
    with open(path, "r", encoding="utf-8") as f:
        words = {line.strip().lower() for line in f if line.strip() and not line.startswith("#")}
    logger.debug(f"[TextExtraction] Loaded {len(words)} stop words from {path}")
    return frozenset(words)


def load_suffix_rules(path=DEFAULT_SUFFIX_RULES_PATH):
    """
    Read ordered suffix rules, one `suffix<TAB>replacement<TAB>min_token_len` per line.

    Returns:
        tuple[SuffixRule, ...]: Rules in file order; the first matching rule wins.
    """
    rules = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[0]:
                raise ValueError(f"Malformed suffix rule on line {line_number} of {path}: {line!r}")
            rules.append(SuffixRule(parts[0], parts[1], int(parts[2])))
    logger.debug(f"[TextExtraction] Loaded {len(rules)} suffix rules from {path}")
    return tuple(rules)


def normalize_token(token, rules):
    for rule in rules:
        if rule.applies_to(token):
            return rule.apply(token)
    return token


def decode_utf8(data):
    """
    Decode UTF-8 bytes, replacing invalid sequences with U+FFFD.

    Returns:
        tuple[str, int]: The text and the number of replacements made
        (replacement characters already present in the input are not counted).
    """
    data = bytes(data)
    decoded = data.decode("utf-8", errors="replace")
    replaced = decoded.count(REPLACEMENT_CHAR) - data.decode("utf-8", errors="ignore").count(REPLACEMENT_CHAR)
    return decoded, replaced


def normalize(text, stopwords=frozenset(), rules=()):
    """
    Turn raw text into normalized tokens.

    Lowercases, drops URL tokens, strips '#'/'@' (keeping the word), splits on
    punctuation, removes stop words and applies the first matching suffix rule.

    Args:
        text (str | bytes): Raw tweet or publication text; bytes are decoded as UTF-8.
        stopwords (set[str]): Lowercase words to drop.
        rules (Sequence[SuffixRule]): Ordered suffix rules.

    Returns:
        TokenSequence: The normalized tokens.
    """
    decode_errors = 0
    if isinstance(text, (bytes, bytearray)):
        text, decode_errors = decode_utf8(text)
        if decode_errors:
            logger.warning(f"[TextExtraction] Replaced {decode_errors} invalid UTF-8 sequences")

    tokens = []
    for raw in (text or "").lower().split():
        if URL_PATTERN.match(raw):
            continue
        for piece in SEPARATOR_PATTERN.split(raw.lstrip("#@")):
            if not piece or piece in stopwords:
                continue
            tokens.append(normalize_token(piece, rules))
    return TokenSequence(tuple(tokens), decode_errors)


def build_label_index(taxonomy, stopwords=frozenset(), rules=()):
    """
    Index every concept label by its normalized token sequence.

    Args:
        taxonomy (Taxonomy): Source of labels.
        stopwords (set[str]): Same stop words used for the texts.
        rules (Sequence[SuffixRule]): Same suffix rules used for the texts.

    Returns:
        LabelIndex: Mapping from token tuples to the set of concept ids carrying that label.
    """
    entries = {}
    dropped = 0
    for concept in taxonomy:
        for label in sorted(concept.labels):
            key = normalize(label, stopwords, rules).tokens
            if not key:
                dropped += 1
                logger.warning(
                    f"[TextExtraction] Label '{label}' of concept '{concept.id}' normalizes to nothing, dropped"
                )
                continue
            entries.setdefault(key, set()).add(concept.id)

    index = LabelIndex(
        entries=MappingProxyType({key: frozenset(ids) for key, ids in entries.items()}),
        max_label_len=max((len(key) for key in entries), default=0),
    )
    logger.info(
        f"[TextExtraction] Built label index with {len(index)} labels "
        f"(longest {index.max_label_len} tokens, {dropped} dropped)"
    )
    return index


def find_label_spans(tokens, index):
    """
    Scan tokens left to right taking the longest label match at each position.

    Returns:
        list[tuple[int, int, frozenset]]: Non-overlapping (start, end, concept ids) spans.
    """
    tokens = tuple(tokens)
    spans = []
    position = 0
    while position < len(tokens):
        longest = min(index.max_label_len, len(tokens) - position)
        for length in range(longest, 0, -1):
            concept_ids = index.entries.get(tokens[position:position + length])
            if concept_ids:
                spans.append((position, position + length, concept_ids))
                position += length
                break
        else:
            position += 1
    return spans


def extract_concepts(tokens, index):
    """
    Count concept occurrences in a token sequence via gazetteer matching.

    Each matched label adds one to every concept it belongs to, so counts of
    synonymous labels aggregate on their concept.

    Args:
        tokens (TokenSequence | Sequence[str]): Normalized tokens.
        index (LabelIndex): The label index.

    Returns:
        ConceptCounts: Per-concept counts.
    """
    counts = Counter()
    for _, _, concept_ids in find_label_spans(tokens, index):
        for concept_id in concept_ids:
            counts[concept_id] += 1
    return ConceptCounts(dict(counts))


@dataclass(frozen=True)
class ConceptExtractor:
    """Bundles the normalization resources with a label index for repeated use."""

    index: LabelIndex
    stopwords: frozenset = frozenset()
    rules: tuple = ()

    @classmethod
    def from_taxonomy(cls, taxonomy, stopwords=frozenset(), rules=()):
        return cls(build_label_index(taxonomy, stopwords, rules), frozenset(stopwords), tuple(rules))

    def tokens(self, text):
        return normalize(text, self.stopwords, self.rules)

    def counts(self, text):
        return extract_concepts(self.tokens(text), self.index)
