import math
from dataclasses import dataclass
from datetime import date
from enum import Enum

from ..config import TAU_DOC_YEARS, TAU_SOCIAL_DAYS, THRESH_DOC_YEARS, THRESH_SOCIAL_DAYS, setup_logging
from ..errors import DecayError
from .profile import ConceptProfile, ProfileMethod

# Configure logging for the temporal module
logger = setup_logging()

EPOCH = date(1970, 1, 1)


class TimeKind(str, Enum):
    ITEM_DAYS = "ITEM_DAYS"
    DOC_YEAR = "DOC_YEAR"


class DecayKind(str, Enum):
    SLIDING_WINDOW = "SLIDING_WINDOW"
    EXPONENTIAL = "EXPONENTIAL"


@dataclass(frozen=True, order=True)
class TimePoint:
    """A social item timestamp (days since 1970-01-01) or a document's publication year."""

    kind: TimeKind
    value: int

    @classmethod
    def item_days(cls, days):
        return cls(TimeKind.ITEM_DAYS, int(days))

    @classmethod
    def from_date(cls, day):
        return cls(TimeKind.ITEM_DAYS, (day - EPOCH).days)

    @classmethod
    def doc_year(cls, year):
        return cls(TimeKind.DOC_YEAR, int(year))


def days_since_epoch(day):
    return (day - EPOCH).days


@dataclass(frozen=True)
class DecaySpec:
    kind: DecayKind
    now: date
    thresh_social_days: float = THRESH_SOCIAL_DAYS
    thresh_doc_years: float = THRESH_DOC_YEARS
    tau_social_days: float = TAU_SOCIAL_DAYS
    tau_doc_years: float = TAU_DOC_YEARS

    def __post_init__(self):
        object.__setattr__(self, "kind", DecayKind(self.kind))
        for name in ("thresh_social_days", "thresh_doc_years", "tau_social_days", "tau_doc_years"):
            if not getattr(self, name) > 0:
                raise DecayError(f"Decay constant {name} must be > 0, got {getattr(self, name)}")

    @classmethod
    def from_constants(cls, kind, now, constants):
        return cls(
            kind=kind,
            now=now,
            thresh_social_days=constants.thresh_social_days,
            thresh_doc_years=constants.thresh_doc_years,
            tau_social_days=constants.tau_social_days,
            tau_doc_years=constants.tau_doc_years,
        )

    @property
    def now_days(self):
        return days_since_epoch(self.now)

    @property
    def now_year(self):
        return self.now.year


def age_of(spec, t):
    """Age of `t` relative to spec.now, in days for items and whole years for documents."""
    if t.kind is TimeKind.ITEM_DAYS:
        age = spec.now_days - t.value
    else:
        age = spec.now_year - t.value
    if age < 0:
        raise DecayError(f"Time point {t.kind.value}={t.value} lies in the future of {spec.now.isoformat()}")
    return age


def decay_factor(spec, t):
    """
    Temporal weight of a social item or document.

    Args:
        spec (DecaySpec): Decay function, reference date and constants.
        t (TimePoint): Item day or document year.

    Returns:
        float: Sliding window gives 1.0 up to the threshold age and 0.0 beyond it;
        exponential gives exp(-age / tau) with the unit-matched mean-life.

    Raises:
        DecayError: If `t` is later than spec.now.
    """
    age = age_of(spec, t)
    item = t.kind is TimeKind.ITEM_DAYS
    if spec.kind is DecayKind.SLIDING_WINDOW:
        threshold = spec.thresh_social_days if item else spec.thresh_doc_years
        return 1.0 if age <= threshold else 0.0
    tau = spec.tau_social_days if item else spec.tau_doc_years
    return math.exp(-age / tau)


def aggregate_user_profile(per_item, spec, subject="", method=ProfileMethod.CFIDF):
    """
    Sum decayed item weights into the user profile.

    Args:
        per_item (Sequence[tuple[ConceptProfile, TimePoint]]): Per-item weight fragments and timestamps.
        spec (DecaySpec): Decay to apply to the item timestamps.
        subject (str): User id stored on the result.
        method (ProfileMethod): Method of the result when `per_item` is empty.

    Returns:
        ConceptProfile: w(c, I_u) = sum_i f(t_i) * w'(c, i); empty if every contribution is zero.

    Raises:
        DecayError: On LDA fragments or fragments of mixed methods.
    """
    methods = {fragment.method for fragment, _ in per_item}
    if len(methods) > 1:
        raise DecayError(f"Cannot aggregate fragments of mixed methods {sorted(m.value for m in methods)}")
    if methods:
        method = methods.pop()
    if ProfileMethod(method) is ProfileMethod.LDA:
        raise DecayError("LDA user profiles are not built from decayed item weights")

    weights = {}
    for fragment, t in per_item:
        factor = decay_factor(spec, t)
        if factor == 0.0:
            continue
        for concept_id, weight in fragment.weights.items():
            weights[concept_id] = weights.get(concept_id, 0.0) + factor * weight

    return ConceptProfile(subject, method, weights)


def decay_document(profile, t_d, spec):
    """
    Decay factor of a candidate document, applied at similarity time.

    Returns:
        tuple[bool, float]: (kept, factor); kept is False iff the factor is 0.
    """
    if t_d.kind is not TimeKind.DOC_YEAR:
        raise DecayError(f"Document '{profile.subject}' needs a DOC_YEAR time point, got {t_d.kind.value}")
    factor = decay_factor(spec, t_d)
    return factor > 0.0, factor
