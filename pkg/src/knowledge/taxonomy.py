import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from ..config import setup_logging
from ..errors import TaxonomyError

# Configure logging for the taxonomy module
logger = setup_logging()


@dataclass(frozen=True)
class Concept:
    id: str
    pref_label: str
    alt_labels: frozenset = field(default_factory=frozenset)
    parents: frozenset = field(default_factory=frozenset)

    @property
    def labels(self):
        return {self.pref_label, *self.alt_labels}


class Taxonomy:
    """
    An immutable, validated poly-hierarchical knowledge base.

    The hierarchy is held as a directed graph with edges from parent to child.
    Levels are 1 for roots and 1 + the shortest distance to any root otherwise.
    Construct through `build_taxonomy` or `load_taxonomy`, which validate first.
    """

    def __init__(self, concepts, graph):
        self._concepts = concepts
        self._graph = graph
        self._levels = _levels(graph)
        self._order = tuple(nx.lexicographical_topological_sort(graph))
        self._nodes_per_level = dict(sorted(Counter(self._levels.values()).items()))

    def __len__(self):
        return len(self._concepts)

    def __contains__(self, concept_id):
        return concept_id in self._concepts

    def __iter__(self):
        return iter(self._concepts.values())

    @property
    def concepts(self):
        return dict(self._concepts)

    @property
    def graph(self):
        """A read-only view of the parent -> child graph."""
        return self._graph.copy(as_view=True)

    @property
    def nodes_per_level(self):
        return dict(self._nodes_per_level)

    @property
    def topological_order(self):
        """Concept ids ordered so every parent precedes its children; ties break on the smaller id."""
        return self._order

    @property
    def has_edges(self):
        return self._graph.number_of_edges() > 0

    @property
    def max_level(self):
        return max(self._nodes_per_level, default=0)

    def concept(self, concept_id):
        self._require(concept_id)
        return self._concepts[concept_id]

    def level_of(self, concept_id):
        self._require(concept_id)
        return self._levels[concept_id]

    def nodes_at_level(self, level):
        return self._nodes_per_level.get(level, 0)

    def children_of(self, concept_id):
        self._require(concept_id)
        return set(self._graph.successors(concept_id))

    def parents_of(self, concept_id):
        self._require(concept_id)
        return set(self._graph.predecessors(concept_id))

    def ancestors_of(self, concept_ids):
        """Return every concept reachable upwards from `concept_ids`, excluding the inputs themselves."""
        concept_ids = set(concept_ids)
        seen = set()
        for concept_id in concept_ids:
            seen |= nx.ancestors(self._graph, concept_id)
        return seen - concept_ids

    def _require(self, concept_id):
        if concept_id not in self._concepts:
            raise TaxonomyError(f"Unknown concept id '{concept_id}'", concept_id)


def _validate(concepts):
    for concept in concepts.values():
        for parent in sorted(concept.parents):
            if parent not in concepts:
                raise TaxonomyError(
                    f"Concept '{concept.id}' references missing parent '{parent}'", concept.id
                )


def _build_graph(concepts):
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(concepts))
    for concept in concepts.values():
        graph.add_edges_from((parent, concept.id) for parent in concept.parents)

    try:
        cycle = nx.find_cycle(graph)
    except nx.NetworkXNoCycle:
        return graph
    member = min(node for edge in cycle for node in edge[:2])
    raise TaxonomyError(f"Cycle detected in parent links involving concept '{member}'", member)


def _levels(graph):
    # Shortest distance from any root; every node of a DAG is reachable from some root
    roots = [node for node in graph if graph.in_degree(node) == 0]
    if not roots:
        return {}
    distances = nx.multi_source_dijkstra_path_length(graph, roots)
    return {node: int(distance) + 1 for node, distance in distances.items()}


def build_taxonomy(records):
    """
    Build and validate a taxonomy from concept records.

    Args:
        records (Iterable[dict]): Dicts with 'id', 'pref_label', optional 'alt_labels' and 'parents'.

    Returns:
        Taxonomy: The validated taxonomy with levels precomputed.

    Raises:
        TaxonomyError: On duplicate ids, empty labels, dangling parents or cycles.
    """
    concepts = {}
    for record in records:
        concept_id = str(record.get("id", "")).strip()
        if not concept_id:
            raise TaxonomyError("Concept without an id", None)
        if concept_id in concepts:
            raise TaxonomyError(f"Duplicate concept id '{concept_id}'", concept_id)

        pref_label = " ".join(str(record.get("pref_label") or "").split())
        if not pref_label:
            raise TaxonomyError(f"Concept '{concept_id}' has an empty pref_label", concept_id)

        alt_labels = frozenset(
            label for label in (" ".join(str(a).split()) for a in record.get("alt_labels", []))
            if label
        )
        concepts[concept_id] = Concept(
            id=concept_id,
            pref_label=pref_label,
            alt_labels=alt_labels - {pref_label},
            parents=frozenset(str(p) for p in record.get("parents", [])),
        )

    _validate(concepts)
    return Taxonomy(concepts, _build_graph(concepts))


def load_taxonomy(path):
    """
    Load a taxonomy from its JSON document.

    Args:
        path (str | Path): File of the form {"concepts": [{"id", "pref_label", "alt_labels", "parents"}]}.

    Returns:
        Taxonomy: The validated taxonomy.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise TaxonomyError(f"Taxonomy file {path} is not valid JSON: {e}")

    if not isinstance(document, dict) or not isinstance(document.get("concepts"), list):
        raise TaxonomyError(f"Taxonomy file {path} must contain a 'concepts' list")

    taxonomy = build_taxonomy(document["concepts"])
    logger.info(
        f"[Taxonomy] Loaded {len(taxonomy)} concepts over {taxonomy.max_level} levels from {path}"
    )
    logger.debug(f"[Taxonomy] Nodes per level: {taxonomy.nodes_per_level}")
    return taxonomy


def load_synonym_table(path):
    """
    Read a two-column `concept_id<TAB>label` synonym file.

    Returns:
        list[tuple[str, str]]: The pairs in file order; blank lines are skipped.
    """
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n\r")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise TaxonomyError(f"Malformed synonym line {line_number} in {path}: {line!r}")
            pairs.append((parts[0].strip(), parts[1].strip()))
    logger.info(f"[Taxonomy] Read {len(pairs)} synonym pairs from {path}")
    return pairs


def merge_synonyms(taxonomy, table):
    """
    Add synonymous labels (e.g. from redirect dumps) to concepts.

    Args:
        taxonomy (Taxonomy): The source taxonomy; it is not modified.
        table (Iterable[tuple[str, str]]): (concept id, label) pairs.

    Returns:
        Taxonomy: A taxonomy with the extra alt_labels; ids, edges and levels are unchanged.
    """
    additions = {}
    for concept_id, label in table:
        if concept_id not in taxonomy:
            raise TaxonomyError(f"Synonym table references unknown concept '{concept_id}'", concept_id)
        label = " ".join(label.split())
        if label:
            additions.setdefault(concept_id, set()).add(label)

    if not additions:
        return taxonomy

    concepts = taxonomy.concepts
    added = 0
    for concept_id, labels in additions.items():
        concept = concepts[concept_id]
        new_labels = labels - concept.labels
        if new_labels:
            added += len(new_labels)
            concepts[concept_id] = Concept(
                id=concept.id,
                pref_label=concept.pref_label,
                alt_labels=concept.alt_labels | new_labels,
                parents=concept.parents,
            )

    logger.info(f"[Taxonomy] Merged {added} new synonym labels into {len(additions)} concepts")
    return Taxonomy(concepts, nx.DiGraph(taxonomy.graph))
