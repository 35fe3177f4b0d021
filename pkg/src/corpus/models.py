from dataclasses import dataclass
from enum import Enum

from ..profiling.temporal import TimePoint


class ContentMode(str, Enum):
    ALL = "ALL"
    TITLE = "TITLE"


@dataclass(frozen=True)
class CorpusDocument:
    id: str
    title: str
    year: int
    fulltext: str | None = None

    @property
    def time(self):
        return TimePoint.doc_year(self.year)

    @property
    def text(self):
        """Title and full text joined; in TITLE mode the full text is already gone."""
        if self.fulltext:
            return f"{self.title}\n{self.fulltext}"
        return self.title


@dataclass(frozen=True)
class SocialItem:
    id: str
    user: str
    text: str
    time: TimePoint
