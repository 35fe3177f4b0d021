import json
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType


class ProfileMethod(str, Enum):
    CFIDF = "CFIDF"
    HCFIDF = "HCFIDF"
    LDA = "LDA"

    @property
    def is_concept_based(self):
        return self is not ProfileMethod.LDA


@dataclass(frozen=True)
class ConceptProfile:
    """
    Sparse nonnegative weights over concepts (CF-IDF, HCF-IDF) or topics (LDA).

    Zero weights are dropped at construction; negative or non-finite weights are rejected.
    """

    subject: str
    method: ProfileMethod
    weights: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        method = ProfileMethod(self.method)
        weights = {}
        for key, value in dict(self.weights).items():
            value = float(value)
            if not value >= 0 or value == float("inf"):
                raise ValueError(f"Profile '{self.subject}' has invalid weight {value!r} for '{key}'")
            if value > 0:
                weights[key] = value
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "weights", MappingProxyType(weights))

    def __bool__(self):
        return bool(self.weights)

    def __len__(self):
        return len(self.weights)

    def scaled(self, factor):
        return ConceptProfile(self.subject, self.method, {k: v * factor for k, v in self.weights.items()})

    def to_json(self):
        return json.dumps(
            {"subject": self.subject, "method": self.method.value, "weights": dict(sorted(self.weights.items()))},
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line):
        record = json.loads(line)
        return cls(record["subject"], ProfileMethod(record["method"]), record["weights"])
