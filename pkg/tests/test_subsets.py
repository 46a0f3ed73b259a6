import math

import numpy as np
import pytest

from rtool.annotate import WordProperties
from rtool.subsets import (
    VariantResiduals,
    build_candidates,
    iterative_search,
    observation_masks,
    under_over_decompose,
    write_subset_csv,
)


def _props(pos="RB", pos_class="other", ne=False, dlt=0, ce=0, **flags):
    return WordProperties(
        pos_category=pos,
        pos_class=pos_class,
        is_named_entity=ne,
        dlt_cost=dlt,
        embedding_depth=1,
        ends_center_embedding_len=ce,
        before_sentential_clause=flags.get("before_sentential_clause", False),
        ends_first_conjunct=flags.get("ends_first_conjunct", False),
        ends_first_conjunct_np=flags.get("ends_first_conjunct_np", False),
        begins_adjectival_np=flags.get("begins_adjectival_np", False),
    )


class TestCandidates:
    def test_fixture_candidate_count_matches_manifest(self, annotated_fixture):
        _, _, _, props = annotated_fixture
        candidates = build_candidates(props)
        fine = {p.pos_category for p in props.values()}
        assert len(fine) == 14
        # fine POS + 8 coarse classes + NE + DLT + center-embedding + 4 flags
        assert len(candidates) == len(fine) + 8 + 1 + 1 + 1 + 4
        names = [c.name for c in candidates]
        assert len(set(names)) == len(names)

    def test_structural_candidates_present_even_when_empty(self):
        # corpus with no coordination at all
        props = {i: _props() for i in range(10)}
        names = {c.name for c in build_candidates(props)}
        assert "ends_first_conjunct" in names
        assert "ends_first_conjunct_np" in names
        masks = observation_masks(
            build_candidates(props), props, np.arange(10)
        )
        assert masks["ends_first_conjunct"].sum() == 0

    def test_named_entity_candidate_matches_manifest(self, annotated_fixture, annot_manifest):
        corp, _, _, props = annotated_fixture
        cand = [c for c in build_candidates(props) if c.name == "named_entity"][0]
        flagged = {i for i, p in props.items() if cand.matches(p)}
        want = set()
        for (doc, sid), tokens in corp.sentences():
            rows = annot_manifest["sentences"][str(sid)]
            for tok, row in zip(tokens, rows):
                if row[3]:
                    want.add(tok.corpus_word_idx)
        assert flagged == want

    def test_threshold_candidates(self, annotated_fixture):
        _, _, _, props = annotated_fixture
        by_name = {c.name: c for c in build_candidates(props)}
        dlt3 = {i for i, p in props.items() if by_name["dlt_cost>=3"].matches(p)}
        assert dlt3 == {i for i, p in props.items() if p.dlt_cost >= 3}
        ce4 = {i for i, p in props.items() if by_name["center_embedding_end>=4"].matches(p)}
        assert ce4 == {i for i, p in props.items() if p.ends_center_embedding_len >= 4}
        assert dlt3 and ce4


class TestUnderOver:
    def test_hand_example(self):
        stats = under_over_decompose(np.array([0.3, -0.4]), np.array([5.0, 7.0]))
        assert stats.sse_under == pytest.approx(0.09)
        assert stats.mean_surprisal_bits_under == pytest.approx(5.0)
        assert stats.sse_over == pytest.approx(0.16)
        assert stats.mean_surprisal_bits_over == pytest.approx(7.0)
        assert (stats.n_under, stats.n_over) == (1, 1)

    def test_one_sided(self):
        stats = under_over_decompose(np.array([0.5, 0.1]), np.array([1.0, 2.0]))
        assert stats.sse_over == 0.0
        assert stats.n_over == 0
        assert math.isnan(stats.mean_surprisal_bits_over)

    def test_exact_zero_excluded(self):
        stats = under_over_decompose(np.array([0.0, 0.2, -0.2]), np.array([1.0, 2.0, 3.0]))
        assert stats.n_under == 1 and stats.n_over == 1
        assert stats.sse_under == pytest.approx(0.04)
        assert stats.sse_over == pytest.approx(0.04)


def planted_inputs():
    """100 words x 6 observations; words 0-19 are a steep planted subset
    (class:noun), 20-34 a shallower one (named_entity), the rest background
    with a mild negative slope."""
    props = {}
    for w in range(100):
        if w < 20:
            props[w] = _props(pos="NN", pos_class="noun")
        elif w < 35:
            # named entities sharing the background POS, so only the
            # named_entity candidate isolates them
            props[w] = _props(ne=True)
        else:
            props[w] = _props()
    word_idx = np.repeat(np.arange(100), 6)
    sign = np.where(np.arange(600) % 2 == 0, 1.0, -1.0)
    lnppl = [1.0, 2.0, 3.0, 4.0]
    variants = []
    for i, x in enumerate(lnppl):
        mag = np.empty(600)
        in_a = word_idx < 20
        in_b = (word_idx >= 20) & (word_idx < 35)
        mag[in_a] = 0.9 - 0.15 * x
        mag[in_b] = 0.8 - 0.08 * x
        mag[~(in_a | in_b)] = 0.6 - 0.02 * x
        variants.append(
            VariantResiduals(
                name=f"v{i}",
                ln_perplexity=x,
                residuals=sign * mag,
                surprisal_bits=(word_idx + 1) / 10.0,
            )
        )
    return variants, props, word_idx


class TestIterativeSearch:
    def test_planted_subsets_found_in_order(self):
        variants, props, word_idx = planted_inputs()
        candidates = build_candidates(props)
        result = iterative_search(variants, candidates, props, word_idx, k=5)
        names = [r.subset.name for r in result.reports]
        assert names[0] == "class:noun"
        assert names[1] == "named_entity"
        assert result.reports[0].slope_fit.slope < result.reports[1].slope_fit.slope < 0
        assert result.reports[0].iteration == 1
        assert result.reports[1].iteration == 2

    def test_selection_is_deterministic(self, tmp_path):
        outs = []
        for rep in range(2):
            variants, props, word_idx = planted_inputs()
            result = iterative_search(variants, candidates=build_candidates(props),
                                      properties=props, word_idx_per_obs=word_idx, k=5)
            path = tmp_path / f"run{rep}.csv"
            write_subset_csv(result, variants, str(path))
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_reports_are_disjoint(self):
        variants, props, word_idx = planted_inputs()
        result = iterative_search(variants, build_candidates(props), props, word_idx, k=5)
        masks = observation_masks(
            [r.subset for r in result.reports], props, word_idx
        )
        # reconstruct selection masks accounting for removal order
        remaining = np.ones(600, dtype=bool)
        seen = np.zeros(600, dtype=bool)
        for r in result.reports:
            m = masks[r.subset.name] & remaining
            assert not (m & seen).any()
            assert m.sum() == r.n_points
            seen |= m
            remaining &= ~m

    def test_sse_identity(self):
        variants, props, word_idx = planted_inputs()
        result = iterative_search(variants, build_candidates(props), props, word_idx, k=3)
        for report in result.reports:
            for v in variants:
                st = report.per_variant[v.name]
                # no exact-zero residuals in this fixture
                assert st.sse_under + st.sse_over == pytest.approx(
                    report.n_points * st.mse, abs=1e-9
                )

    def test_corpus_slope_less_steep_than_first_selection(self):
        variants, props, word_idx = planted_inputs()
        from rtool.trend import slope_test

        result = iterative_search(variants, build_candidates(props), props, word_idx, k=1)
        lnppl = [v.ln_perplexity for v in variants]
        whole = slope_test(
            lnppl, [float(np.mean(v.residuals**2)) for v in variants], "negative"
        )
        assert whole.slope > result.reports[0].slope_fit.slope

    def test_floor_blocks_small_candidates(self):
        variants, props, word_idx = planted_inputs()
        # demand subsets larger than 25% of the corpus: only background is big enough,
        # and after its removal nothing else qualifies
        result = iterative_search(
            variants, build_candidates(props), props, word_idx, min_frac=0.25, k=5
        )
        assert result.stop_reason == "no eligible subset"
        assert all(r.n_points > 0.25 * 600 for r in result.reports)

    def test_all_below_floor_stops_immediately(self):
        variants, props, word_idx = planted_inputs()
        result = iterative_search(
            variants, build_candidates(props), props, word_idx, min_frac=0.99, k=5
        )
        assert result.reports == ()
        assert result.stop_reason == "no eligible subset"

    def test_needs_three_variants(self):
        variants, props, word_idx = planted_inputs()
        with pytest.raises(ValueError, match="3 variants"):
            iterative_search(variants[:2], build_candidates(props), props, word_idx)

    def test_empty_candidates_rejected(self):
        variants, props, word_idx = planted_inputs()
        with pytest.raises(ValueError, match="candidate"):
            iterative_search(variants, [], props, word_idx)

    def test_min_frac_uses_original_denominator(self):
        # 12% planted subset A; floor 0.1: A eligible at iteration 1. After
        # removing A, a 10.5%-of-original candidate B must still be eligible
        # because the denominator stays the original corpus size.
        props = {}
        for w in range(200):
            if w < 24:
                props[w] = _props(pos="NN", pos_class="noun")
            elif w < 45:
                props[w] = _props(pos="JJ", pos_class="adjective")
            else:
                props[w] = _props()
        word_idx = np.repeat(np.arange(200), 1)
        sign = np.where(np.arange(200) % 2 == 0, 1.0, -1.0)
        variants = []
        for i, x in enumerate([1.0, 2.0, 3.0]):
            mag = np.empty(200)
            mag[word_idx < 24] = 1.0 - 0.2 * x
            mag[(word_idx >= 24) & (word_idx < 45)] = 0.9 - 0.1 * x
            mag[word_idx >= 45] = 0.5 - 0.01 * x
            variants.append(
                VariantResiduals(f"v{i}", x, sign * mag, np.ones(200))
            )
        result = iterative_search(
            variants, build_candidates(props), props, word_idx, min_frac=0.1, k=2
        )
        names = [r.subset.name for r in result.reports]
        assert names == ["class:noun", "class:adjective"]
