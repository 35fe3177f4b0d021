import json
from datetime import date, datetime
from pathlib import Path

from ..config import LDA_INFER_ITERATIONS, setup_logging
from ..errors import CorpusError, ProfilingError
from ..knowledge.text_extraction import decode_utf8
from ..profiling.profile import ConceptProfile, ProfileMethod
from ..profiling.temporal import TimePoint, days_since_epoch
from ..profiling.topic_model import infer
from ..profiling.weighting import compute_doc_stats, doc_weights
from .converter import clean_markup
from .digest import derive_seed
from .models import ContentMode, CorpusDocument, SocialItem

# Configure logging for the corpus module
logger = setup_logging()

MIN_YEAR = 1800


def read_jsonl(path, replaced=None):
    """
    Yield (line_number, record or None, error or None) for each non-blank line.

    Invalid UTF-8 is replaced with U+FFFD. The number of replacements per line is
    stored in `replaced` when a dict is given, and the total is logged once the file is read.
    """
    replaced = {} if replaced is None else replaced
    with open(path, "rb") as f:
        for line_number, raw in enumerate(f, start=1):
            line, count = decode_utf8(raw)
            if count:
                replaced[line_number] = count
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                yield line_number, None, f"malformed JSON ({e.msg})"
                continue
            if not isinstance(record, dict):
                yield line_number, None, "record is not a JSON object"
                continue
            yield line_number, record, None

    if replaced:
        logger.warning(
            f"[Corpus] Replaced {sum(replaced.values())} invalid UTF-8 sequences on "
            f"{len(replaced)} lines of {path}"
        )


def load_corpus(path, content_mode=ContentMode.ALL, max_year=None):
    """
    Load and validate the publication corpus.

    In TITLE mode the full text is discarded here, before any profiling sees it.

    Args:
        path (str | Path): JSONL file of {"id", "title", "fulltext"?, "year"} records.
        content_mode (ContentMode): ALL keeps full texts, TITLE drops them.
        max_year (int | None): Latest plausible publication year, usually the run's "now".

    Returns:
        list[CorpusDocument]: Documents in file order.

    Raises:
        CorpusError: Listing every invalid line.
    """
    content_mode = ContentMode(content_mode)
    start_time = datetime.now()
    documents = []
    seen = set()
    problems = []

    for line_number, record, error in read_jsonl(path):
        if error:
            problems.append((line_number, error))
            continue

        doc_id = str(record.get("id") or "").strip()
        title = clean_markup(str(record.get("title") or "")).strip()
        year = record.get("year")
        if not doc_id:
            problems.append((line_number, "missing id"))
            continue
        if doc_id in seen:
            problems.append((line_number, f"duplicate id '{doc_id}'"))
            continue
        if not title:
            problems.append((line_number, f"document '{doc_id}' has no title"))
            continue
        if isinstance(year, bool) or not isinstance(year, int):
            problems.append((line_number, f"document '{doc_id}' has no integer year"))
            continue
        if year < MIN_YEAR or (max_year is not None and year > max_year):
            problems.append((line_number, f"document '{doc_id}' has implausible year {year}"))
            continue

        fulltext = None
        if content_mode is ContentMode.ALL and record.get("fulltext"):
            fulltext = clean_markup(str(record["fulltext"])).strip() or None

        seen.add(doc_id)
        documents.append(CorpusDocument(id=doc_id, title=title, year=year, fulltext=fulltext))

    if problems:
        logger.error(f"[Corpus] {len(problems)} invalid lines in {path}")
        raise CorpusError(f"Invalid corpus file {path}", problems)
    if not documents:
        logger.warning(f"[Corpus] Corpus file {path} is empty")

    execution_time = datetime.now() - start_time
    logger.info(
        f"[Corpus] Loaded {len(documents)} documents ({content_mode.value}) from {path} "
        f"in {execution_time.total_seconds():.2f} seconds"
    )
    return documents


def _parse_time(record):
    if "days" in record and record["days"] is not None:
        days = record["days"]
        if isinstance(days, bool) or not isinstance(days, int):
            raise ValueError(f"'days' must be an integer, got {days!r}")
        return TimePoint.item_days(days)
    if "date" in record and record["date"] is not None:
        return TimePoint.item_days(days_since_epoch(date.fromisoformat(str(record["date"]))))
    raise ValueError("missing 'date' or 'days'")


def _load_social_items(path, now=None):
    items = []
    seen = set()
    problems = []
    now_days = days_since_epoch(now) if now is not None else None

    for line_number, record, error in read_jsonl(path):
        if error:
            problems.append((line_number, error))
            continue
        item_id = str(record.get("id") or "").strip()
        user = str(record.get("user") or "").strip()
        if not item_id or not user:
            problems.append((line_number, "missing id or user"))
            continue
        if item_id in seen:
            problems.append((line_number, f"duplicate item id '{item_id}'"))
            continue
        try:
            time = _parse_time(record)
        except ValueError as e:
            problems.append((line_number, f"malformed timestamp for item '{item_id}': {e}"))
            continue
        if now_days is not None and time.value > now_days:
            problems.append((line_number, f"item '{item_id}' is dated after {now.isoformat()}"))
            continue

        seen.add(item_id)
        items.append(
            SocialItem(id=item_id, user=user, text=clean_markup(str(record.get("text") or "")), time=time)
        )

    if problems:
        logger.error(f"[Corpus] {len(problems)} invalid lines in {path}")
        raise CorpusError(f"Invalid social item file {path}", problems)
    return items


def load_items(path, now=None):
    """
    Load users' social media items grouped per user.

    Args:
        path (str | Path): JSONL file of {"id", "user", "text", "date" | "days"} records.
        now (date | None): Reference date; items after it are rejected.

    Returns:
        dict[str, list[SocialItem]]: Items per user (users sorted), each list sorted by time then id.
    """
    grouped = {}
    for item in _load_social_items(path, now):
        grouped.setdefault(item.user, []).append(item)
    streams = {
        user: sorted(items, key=lambda item: (item.time.value, item.id))
        for user, items in sorted(grouped.items())
    }
    logger.info(
        f"[Corpus] Loaded {sum(len(s) for s in streams.values())} items of {len(streams)} users from {path}"
    )
    return streams


def load_item_pool(path, now=None):
    """Load the background item pool as a flat list sorted by item id."""
    pool = sorted(_load_social_items(path, now), key=lambda item: item.id)
    logger.info(f"[Corpus] Loaded background pool of {len(pool)} items from {path}")
    return pool


def count_corpus(corpus, extractor):
    """Concept counts of every document's text, keyed by document id."""
    return {doc.id: extractor.counts(doc.text) for doc in corpus}


def profile_corpus(
    corpus,
    method,
    extractor=None,
    taxonomy=None,
    model=None,
    stats=None,
    doc_counts=None,
    seed=0,
    infer_iterations=LDA_INFER_ITERATIONS,
):
    """
    Build a profile for every document of the corpus.

    Args:
        corpus (Sequence[CorpusDocument]): Documents of one content mode.
        method (ProfileMethod): CFIDF, HCFIDF or LDA.
        extractor (ConceptExtractor | None): Tokenizer and label index.
        taxonomy (Taxonomy | None): Required for HCFIDF.
        model (TopicModel | None): Required for LDA.
        stats (DocCorpusStats | None): Document frequencies; computed from the corpus when omitted.
        doc_counts (Mapping[str, ConceptCounts] | None): Precomputed concept counts.
        seed (int): Base seed for per-document LDA inference.
        infer_iterations (int): LDA inference sweeps.

    Returns:
        dict[str, ConceptProfile]: Profiles by document id; documents without concepts keep empty profiles.
    """
    method = ProfileMethod(method)
    start_time = datetime.now()

    if method is ProfileMethod.LDA:
        if model is None or extractor is None:
            raise ProfilingError("LDA document profiling needs a topic model and an extractor")
        profiles = {
            doc.id: infer(
                model, extractor.tokens(doc.text).tokens, infer_iterations, derive_seed(seed, "doc", doc.id)
            ).to_profile(doc.id)
            for doc in corpus
        }
    else:
        if method is ProfileMethod.HCFIDF and taxonomy is None:
            raise ProfilingError("HCF-IDF document profiling needs a taxonomy")
        if doc_counts is None:
            if extractor is None:
                raise ProfilingError("Concept profiling needs an extractor or precomputed counts")
            doc_counts = count_corpus(corpus, extractor)
        stats = stats or compute_doc_stats(doc_counts)
        profiles = {
            doc.id: doc_weights(method, doc_counts[doc.id], stats, taxonomy, subject=doc.id)
            for doc in corpus
        }

    empty = sum(1 for profile in profiles.values() if not profile)
    execution_time = datetime.now() - start_time
    logger.info(
        f"[Corpus] Profiled {len(profiles)} documents with {method.value} "
        f"({empty} empty) in {execution_time.total_seconds():.2f} seconds"
    )
    return profiles


def save_profiles(path, profiles):
    """Write profiles as JSONL, one {subject, method, weights} object per line, sorted by subject."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for subject in sorted(profiles):
            f.write(profiles[subject].to_json() + "\n")
    logger.debug(f"[Corpus] Saved {len(profiles)} profiles to {path}")


def load_profiles(path):
    profiles = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                profile = ConceptProfile.from_json(line)
                profiles[profile.subject] = profile
    return profiles
