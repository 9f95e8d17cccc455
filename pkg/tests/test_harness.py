"""Tests for classification, streaming verification, and the study suites."""

import itertools

import pytest

from qfactor.graphs import (
    Graph,
    GuardExceeded,
    complete,
    parse_graph6,
    random_graph,
    write_graph6,
)
from qfactor.extremal import build_gstar, threshold_q
from qfactor.spectra import perron_q
from qfactor.harness import (
    CLASSIFICATIONS,
    GUARD_ENV,
    Guards,
    TheoremOutcome,
    agreement_study,
    check_theorem_instance,
    identity_suite,
    lemma_suite,
    max_theorem_delta,
    odd_compositions,
    recognize_gstar,
    sharpness_probe,
    verify_stream,
)

# A connected order-8 graph with delta = 2 and no even factor: a complete
# bipartite K_{2,3} bridged by one edge to a triangle.  Its q exceeds no
# threshold at the default eps, but with eps large enough to disable the
# threshold test it exercises the counterexample branch honestly.
FACTORLESS = "G]o_GK"


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


# ---------------------------------------------------------------------------
# Brute-force isomorphism oracle for the recognizer cross-check
# ---------------------------------------------------------------------------


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count:
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    n = g.n
    hdeg = h.degrees()
    gdeg = g.degrees()
    mapping = [-1] * n
    used = [False] * n

    def extend(v: int) -> bool:
        if v == n:
            return True
        for w in range(n):
            if used[w] or gdeg[v] != hdeg[w]:
                continue
            ok = True
            for u in range(v):
                if (g.rows[v] >> u & 1) != (h.rows[w] >> mapping[u] & 1):
                    ok = False
                    break
            if ok:
                mapping[v] = w
                used[w] = True
                if extend(v + 1):
                    return True
                used[w] = False
                mapping[v] = -1
        return False

    return extend(0)


def brute_force_gstar_match(g: Graph):
    """Reference recognizer: try every admissible parameter pair."""
    n = g.n
    if n % 2 == 1:
        return None
    for delta in range(2, n // 2):
        if n > 2 * delta and is_isomorphic(g, build_gstar(n, delta)):
            return (n, delta)
    return None


def permuted(g: Graph, perm) -> Graph:
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


class TestRecognizer:
    def test_canonical_instances(self):
        for n, delta in [(6, 2), (8, 2), (10, 2), (14, 3), (20, 4)]:
            assert recognize_gstar(build_gstar(n, delta)) == (n, delta)

    def test_rejects_near_misses(self):
        g = build_gstar(8, 2)
        plus = g.add_edges([(2, 7)])  # connect the isolated cell to the clique
        assert recognize_gstar(plus) is None
        minus = g.remove_edges([g.edges()[0]])
        assert recognize_gstar(minus) is None
        assert recognize_gstar(complete(8)) is None
        assert recognize_gstar(cycle(8)) is None

    def test_relabeling_invariance(self):
        g = build_gstar(8, 2)
        for perm in itertools.islice(itertools.permutations(range(8)), 0, 720, 97):
            assert recognize_gstar(permuted(g, list(perm))) == (8, 2)

    def test_matches_brute_force_on_small_orders(self):
        # Oracle cross-check on every graph the backtracker can afford:
        # permuted extremal graphs, their one-edge perturbations, and a
        # seeded random population of orders 4..8.
        cases = []
        for n, delta in [(6, 2), (8, 2), (8, 3)]:
            try:
                base = build_gstar(n, delta)
            except ValueError:
                continue
            cases.append(base)
            cases.append(permuted(base, list(range(n))[::-1]))
            non_edges = [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if not base.has_edge(u, v)
            ]
            if non_edges:
                cases.append(base.add_edges([non_edges[0]]))
            cases.append(base.remove_edges([base.edges()[-1]]))
        for n in (4, 6, 8):
            for seed in range(25):
                cases.append(random_graph(n, 0.5, seed=seed))
        for g in cases:
            assert recognize_gstar(g) == brute_force_gstar_match(g), write_graph6(g)


# ---------------------------------------------------------------------------
# Classification ladder
# ---------------------------------------------------------------------------


class TestMaxTheoremDelta:
    def test_values(self):
        assert max_theorem_delta(6) == 1
        assert max_theorem_delta(7) == 2
        assert max_theorem_delta(8) == 2
        assert max_theorem_delta(14) == 3
        assert max_theorem_delta(21) == 4


class TestCheckTheoremInstance:
    def test_not_applicable_reasons(self):
        assert check_theorem_instance(Graph.empty(3)).classification == "not_applicable"
        assert "even" in check_theorem_instance(cycle(7)).note
        assert "disconnected" in check_theorem_instance(Graph.empty(8)).note
        path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        assert "minimum degree" in check_theorem_instance(path).note

    def test_complete_graph_confirmed_with_capped_delta(self):
        out = check_theorem_instance(complete(8))
        assert out.classification == "confirmed_factor"
        assert out.delta == 2  # min degree 7 capped by (8+7)//7
        assert out.witness["kind"] == "even_factor"
        assert out.q == pytest.approx(14.0, abs=1e-9)
        assert out.threshold == pytest.approx(threshold_q(8, 2), abs=1e-12)

    def test_cycle_below_threshold(self):
        out = check_theorem_instance(cycle(8))
        assert out.classification == "below_threshold"
        assert out.q == pytest.approx(4.0, abs=1e-9)
        assert out.witness is None

    def test_extremal_match(self):
        out = check_theorem_instance(build_gstar(8, 2))
        assert out.classification == "extremal_match"
        assert out.witness is None
        assert out.q == pytest.approx(out.threshold, abs=1e-9)

    def test_counterexample_with_disabled_threshold(self):
        g = parse_graph6(FACTORLESS)
        out = check_theorem_instance(g, eps=1e6)
        assert out.classification == "counterexample"
        assert out.witness["kind"] == "blocking_set"
        assert out.witness["vertices"] == [0, 1]

    def test_factorless_graph_is_below_threshold_at_default_eps(self):
        out = check_theorem_instance(parse_graph6(FACTORLESS))
        assert out.classification == "below_threshold"

    def test_confirmed_by_criterion_when_certificate_guard_blocked(self):
        out = check_theorem_instance(complete(8), guards=Guards(cert_order=4))
        assert out.classification == "confirmed_factor"
        assert out.witness["kind"] == "criterion"

    def test_undecided_when_both_guards_blocked(self):
        out = check_theorem_instance(
            complete(8), guards=Guards(subset_order=4, cert_order=4)
        )
        assert out.classification == "undecided"
        assert "guard" in out.note

    def test_undecided_when_criterion_fails_and_certificate_blocked(self):
        g = parse_graph6(FACTORLESS)
        out = check_theorem_instance(g, eps=1e6, guards=Guards(cert_order=4))
        assert out.classification == "undecided"
        assert "certificate" in out.note

    def test_classification_vocabulary(self):
        assert set(CLASSIFICATIONS) == {
            "not_applicable",
            "below_threshold",
            "confirmed_factor",
            "extremal_match",
            "counterexample",
            "undecided",
        }

    def test_as_row_shape(self):
        row = TheoremOutcome("below_threshold", 4.0, 12.0, 2).as_row("Ghello")
        assert row["graph6"] == "Ghello"
        assert "note" not in row


# ---------------------------------------------------------------------------
# Streaming verification
# ---------------------------------------------------------------------------


class TestVerifyStream:
    LINES = ["GhCGKC", "", "G~~~~{", "G~~~}?", "!!bogus!!"]

    def test_counts_errors_and_order(self):
        report = verify_stream(self.LINES)
        assert report["total"] == 4
        assert report["counts"]["below_threshold"] == 1
        assert report["counts"]["confirmed_factor"] == 1
        assert report["counts"]["extremal_match"] == 1
        assert report["errors"] == 1
        assert [row["line"] for row in report["items"]] == [1, 3, 4, 5]
        error_row = report["items"][-1]
        assert error_row["line"] == 5 and "error" in error_row
        assert report["counterexamples"] == []

    def test_jobs_invariance(self):
        lines = [write_graph6(random_graph(9, 0.5, seed=s)) for s in range(12)]
        assert verify_stream(lines) == verify_stream(lines, jobs=3)

    def test_counterexample_listed(self):
        report = verify_stream([FACTORLESS], eps=1e6)
        assert report["counts"]["counterexample"] == 1
        assert report["counterexamples"] == [FACTORLESS]


# ---------------------------------------------------------------------------
# Sharpness probe
# ---------------------------------------------------------------------------


class TestSharpnessProbe:
    def test_8_2(self):
        probe = sharpness_probe(8, 2, guards=Guards(cert_order=20, cert_edges=400))
        assert probe["q"] == pytest.approx(probe["threshold"], abs=1e-9)
        assert probe["meets_threshold"] is True
        assert probe["join_cell"] == [0, 1]
        assert probe["criterion_holds"] is False
        assert probe["blocking_set"] == [0, 1]
        assert probe["blocking_set_is_join_cell"] is True
        assert probe["has_even_factor"] is True
        assert len(probe["even_factor"]) == 14
        # Every single-edge deletion drops the radius below the threshold.
        assert probe["deletions_above_threshold"] == 0
        assert all(not row["ge_threshold"] for row in probe["deletions"])
        # Additions only increase the radius.
        assert probe["additions_above_threshold"] == len(probe["additions"])
        assert all(row["q"] > probe["q"] for row in probe["additions"])
        assert all(row["is_extremal_graph"] is False for row in probe["additions"])

    def test_without_perturbations(self):
        probe = sharpness_probe(
            14, 3, guards=Guards(cert_order=20, cert_edges=400), perturbations=False
        )
        assert "additions" not in probe and "deletions" not in probe
        assert probe["meets_threshold"] is True
        assert probe["has_even_factor"] is True
        assert probe["blocking_set"] == [0, 1, 2]
        assert probe["blocking_set_is_join_cell"] is True


# ---------------------------------------------------------------------------
# Helpers and configuration
# ---------------------------------------------------------------------------


class TestHelpers:
    def test_odd_compositions(self):
        assert list(odd_compositions(6, 2)) == [(1, 5), (3, 3)]
        assert list(odd_compositions(9, 3)) == [(1, 1, 7), (1, 3, 5), (3, 3, 3)]
        assert list(odd_compositions(5, 2)) == []  # parity mismatch
        assert list(odd_compositions(10, 2, minimum=3)) == [(3, 7), (5, 5)]

    def test_guards_from_env(self, monkeypatch):
        monkeypatch.delenv(GUARD_ENV, raising=False)
        assert Guards.from_env() == Guards()
        base = Guards(subset_order=5)
        assert Guards.from_env(base) == base
        monkeypatch.setenv(GUARD_ENV, "1")
        assert Guards.from_env(base) == Guards.unlocked()
        monkeypatch.setenv(GUARD_ENV, "0")
        assert Guards.from_env(base) == base


# ---------------------------------------------------------------------------
# Study suites (reduced grids for speed; full grids run in acceptance)
# ---------------------------------------------------------------------------


class TestSuites:
    def test_lemma_suite_passes(self):
        report = lemma_suite(seed=0, max_n=12, max_s=3, pairs=20)
        assert report["all_passed"] is True
        sections = {
            "clique_redistribution",
            "edge_monotonicity",
            "quotient_radius",
            "eigenvector_cells",
            "cell_ordering",
        }
        assert sections <= set(report)
        for name in sections:
            assert report[name]["passed"] is True, name
        assert report["clique_redistribution"]["violations"] == 0
        assert report["edge_monotonicity"]["violations"] == 0
        assert report["quotient_radius"]["all_equitable"] is True
        assert report["quotient_radius"]["max_root_vs_perron"] < 1e-8

    def test_identity_suite_passes(self):
        report = identity_suite(max_delta=4)
        assert report["all_passed"] is True
        sections = {
            "difference_identity",
            "f_positivity",
            "large_join_below_threshold",
            "surgery_chain",
            "layered_dominates",
            "root_semantics",
        }
        assert sections <= set(report)
        for name in sections:
            assert report[name]["passed"] is True, name
        assert report["difference_identity"]["mismatches"] == []
        assert report["f_positivity"]["min_value"] >= 3


class TestAgreementStudy:
    def test_n2_exhaustive(self):
        report = agreement_study(2)
        assert report["total"] == 2
        assert report["counts"] == {
            "both_yes": 0,
            "both_no": 0,
            "criterion_yes_factor_no": 2,
            "criterion_no_factor_yes": 0,
        }
        assert report["criterion_matches_factor"] == 0

    def test_n4_exhaustive(self):
        report = agreement_study(4)
        assert report["total"] == 64
        assert report["counts"] == {
            "both_yes": 1,
            "both_no": 54,
            "criterion_yes_factor_no": 0,
            "criterion_no_factor_yes": 9,
        }

    def test_sampled_mode(self):
        report = agreement_study(8, samples=30, p=0.6, seed=7)
        assert report["mode"] == "sampled"
        assert report["total"] == 30
        assert sum(report["counts"].values()) == 30
        # Determinism under the same seed.
        assert agreement_study(8, samples=30, p=0.6, seed=7) == report

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError):
            agreement_study(5)

    def test_enum_guard(self):
        with pytest.raises(GuardExceeded):
            agreement_study(8, guards=Guards(enum_order=7))
