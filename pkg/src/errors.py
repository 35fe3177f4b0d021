"""Exception hierarchy shared by every component."""


class RecommenderError(Exception):
    """Base class for all errors raised by the recommender."""


class ConfigError(RecommenderError):
    pass


class TaxonomyError(RecommenderError):
    def __init__(self, message, concept_id=None):
        super().__init__(message)
        self.concept_id = concept_id


class ProfilingError(RecommenderError):
    pass


class TopicModelError(RecommenderError):
    pass


class DecayError(RecommenderError):
    pass


class RankingError(RecommenderError):
    pass


class MethodMismatchError(RankingError):
    pass


class UnservableError(RankingError):
    """The user has no profile under a strategy (e.g. nothing inside the sliding window)."""

    reason = "empty_profile"


class NoCandidatesError(RankingError):
    """No candidate document survived filtering for a strategy."""

    reason = "no_candidates"


class EvaluationError(RecommenderError):
    pass


class CorpusError(RecommenderError):
    def __init__(self, message, problems=None):
        self.problems = list(problems or [])
        if self.problems:
            details = "; ".join(f"line {line}: {text}" for line, text in self.problems[:10])
            more = f" (+{len(self.problems) - 10} more)" if len(self.problems) > 10 else ""
            message = f"{message}: {details}{more}"
        super().__init__(message)
