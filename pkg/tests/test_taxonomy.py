import json
import random
from collections import Counter, deque

import networkx as nx
import pytest

from src.errors import TaxonomyError
from src.knowledge.taxonomy import build_taxonomy, load_synonym_table, load_taxonomy, merge_synonyms
from tests.conftest import concept


def _random_dag(n, seed):
    rng = random.Random(seed)
    records = []
    for i in range(n):
        parents = []
        if i > 0 and rng.random() < 0.85:
            parents = sorted({f"c{rng.randrange(i)}" for _ in range(rng.randint(1, 2))})
        records.append(concept(f"c{i}", f"label {i}", parents))
    return records


def _bfs_levels(records):
    children = {r["id"]: [] for r in records}
    for r in records:
        for p in r["parents"]:
            children[p].append(r["id"])
    levels = {r["id"]: 1 for r in records if not r["parents"]}
    queue = deque(levels)
    while queue:
        current = queue.popleft()
        for child in children[current]:
            if child not in levels:
                levels[child] = levels[current] + 1
                queue.append(child)
    return levels


class TestBuildTaxonomy:
    def test_single_root(self):
        taxonomy = build_taxonomy([concept("root", "root")])
        assert taxonomy.level_of("root") == 1
        assert taxonomy.nodes_per_level == {1: 1}

    def test_web_levels(self, web_taxonomy):
        assert web_taxonomy.level_of("www") == 1
        assert web_taxonomy.level_of("ws") == 2
        assert web_taxonomy.nodes_at_level(3) == 4
        assert web_taxonomy.nodes_at_level(4) == 0
        assert web_taxonomy.max_level == 3

    def test_web_children(self, web_taxonomy):
        assert web_taxonomy.children_of("www") == {"ws", "wm"}
        assert web_taxonomy.children_of("sr") == set()

    def test_diamond_uses_shortest_path(self):
        taxonomy = build_taxonomy([
            concept("root", "root"),
            concept("x", "x label", ["root"]),
            concept("y", "y label", ["root"]),
            concept("w", "w label", ["y"]),
            concept("z", "z label", ["x", "w"]),
        ])
        assert taxonomy.level_of("z") == 3

    def test_cycle_names_a_member(self):
        with pytest.raises(TaxonomyError) as info:
            build_taxonomy([concept("a", "a label", ["b"]), concept("b", "b label", ["a"])])
        assert info.value.concept_id in {"a", "b"}

    def test_dangling_parent(self):
        with pytest.raises(TaxonomyError, match="missing parent 'ghost'"):
            build_taxonomy([concept("a", "a label", ["ghost"])])

    def test_duplicate_id(self):
        with pytest.raises(TaxonomyError, match="Duplicate"):
            build_taxonomy([concept("a", "one"), concept("a", "two")])

    def test_empty_label(self):
        with pytest.raises(TaxonomyError) as info:
            build_taxonomy([concept("a", "   ")])
        assert info.value.concept_id == "a"

    @pytest.mark.parametrize("seed", range(5))
    def test_levels_match_bfs(self, seed):
        records = _random_dag(50, seed)
        taxonomy = build_taxonomy(records)
        expected = _bfs_levels(records)
        assert {c.id: taxonomy.level_of(c.id) for c in taxonomy} == expected
        assert taxonomy.nodes_per_level == dict(sorted(Counter(expected.values()).items()))

    @pytest.mark.parametrize("seed", range(3))
    def test_children_are_transposed_parents(self, seed):
        records = _random_dag(50, seed)
        taxonomy = build_taxonomy(records)
        for record in records:
            expected = {r["id"] for r in records if record["id"] in r["parents"]}
            assert taxonomy.children_of(record["id"]) == expected

    def test_topological_order_puts_parents_first(self):
        taxonomy = build_taxonomy(_random_dag(50, 11))
        position = {c: i for i, c in enumerate(taxonomy.topological_order)}
        for c in taxonomy:
            for parent in c.parents:
                assert position[parent] < position[c.id]

    def test_topological_order_ignores_record_order(self):
        records = _random_dag(40, 5)
        forward = build_taxonomy(records)
        backward = build_taxonomy(records[::-1])
        assert forward.topological_order == backward.topological_order

    def test_topological_ties_break_on_id(self):
        taxonomy = build_taxonomy([
            concept("b", "b label"),
            concept("a", "a label"),
            concept("c", "c label", ["b"]),
        ])
        assert taxonomy.topological_order == ("a", "b", "c")

    def test_self_parent_is_a_cycle(self):
        with pytest.raises(TaxonomyError, match="Cycle") as info:
            build_taxonomy([concept("root", "root"), concept("a", "a label", ["a", "root"])])
        assert info.value.concept_id == "a"

    def test_graph_edges_point_to_children(self, web_taxonomy):
        graph = web_taxonomy.graph
        assert set(graph.successors("www")) == {"ws", "wm"}
        assert graph.number_of_nodes() == len(web_taxonomy)
        with pytest.raises(nx.NetworkXError):
            graph.add_edge("sr", "www")

    def test_ancestors(self, web_taxonomy):
        assert web_taxonomy.ancestors_of({"sr"}) == {"ws", "www"}
        assert web_taxonomy.ancestors_of({"sr", "ws"}) == {"www"}

    def test_unknown_concept(self, web_taxonomy):
        with pytest.raises(TaxonomyError):
            web_taxonomy.level_of("nope")


class TestLoading:
    def test_load_is_deterministic(self, tmp_path, web_records):
        path = tmp_path / "taxonomy.json"
        path.write_text(json.dumps({"concepts": web_records}), encoding="utf-8")
        first, second = load_taxonomy(path), load_taxonomy(path)
        assert first.concepts == second.concepts
        assert first.topological_order == second.topological_order

    def test_malformed_document(self, tmp_path):
        path = tmp_path / "taxonomy.json"
        path.write_text('{"nodes": []}', encoding="utf-8")
        with pytest.raises(TaxonomyError):
            load_taxonomy(path)

    def test_synonym_table(self, tmp_path):
        path = tmp_path / "synonyms.tsv"
        path.write_text("sr\trecommender systems\n\nws\tweb search\n", encoding="utf-8")
        assert load_synonym_table(path) == [("sr", "recommender systems"), ("ws", "web search")]


class TestMergeSynonyms:
    def test_adds_label(self):
        taxonomy = build_taxonomy([concept("tel", "Telecommunications industry")])
        merged = merge_synonyms(taxonomy, [("tel", "Telephone companies")])
        assert merged.concept("tel").labels == {"Telecommunications industry", "Telephone companies"}
        assert taxonomy.concept("tel").labels == {"Telecommunications industry"}

    def test_empty_table_is_identity(self, web_taxonomy):
        assert merge_synonyms(web_taxonomy, []).concepts == web_taxonomy.concepts

    def test_idempotent(self, web_taxonomy):
        once = merge_synonyms(web_taxonomy, [("sr", "recommender")])
        twice = merge_synonyms(once, [("sr", "recommender")])
        assert twice.concept("sr").labels == once.concept("sr").labels

    def test_keeps_structure(self, web_taxonomy):
        merged = merge_synonyms(web_taxonomy, [("la", "hyperlink analysis")])
        assert merged.nodes_per_level == web_taxonomy.nodes_per_level
        assert merged.children_of("wm") == web_taxonomy.children_of("wm")
        assert merged.topological_order == web_taxonomy.topological_order

    def test_unknown_id(self, web_taxonomy):
        with pytest.raises(TaxonomyError) as info:
            merge_synonyms(web_taxonomy, [("missing", "label")])
        assert info.value.concept_id == "missing"
