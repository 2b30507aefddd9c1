import pytest
from hypothesis import given
from hypothesis import strategies as st

from promptforge.rouge import RougeScore, lcs_length, rouge_l, tokenize

words = st.lists(st.sampled_from(["alpha", "beta", "gamma", "delta", "eps"]), max_size=12)


class TestTokenize:
    def test_lowercases_and_splits(self):
        assert tokenize("The CAT sat") == ["the", "cat", "sat"]

    def test_punctuation_becomes_boundaries(self):
        assert tokenize("it's done, really—done!") == ["it", "s", "done", "really", "done"]

    def test_digits_kept(self):
        assert tokenize("route 66 opens") == ["route", "66", "opens"]

    def test_empty_and_whitespace(self):
        assert tokenize("") == []
        assert tokenize("   \t\n") == []

    def test_collapsed_runs(self):
        assert tokenize("a   ,,,   b") == ["a", "b"]


class TestLcsLength:
    @pytest.mark.parametrize("a,b,expected", [
        ([], [], 0),
        (["x"], [], 0),
        (["a", "b", "c"], ["a", "b", "c"], 3),
        (["a", "b", "c"], ["a", "c"], 2),
        (["a", "b", "c", "d"], ["b", "d"], 2),
        (["a", "b"], ["c", "d"], 0),
        (["x", "a", "y", "b"], ["a", "b", "x", "y"], 2),
    ])
    def test_cases(self, a, b, expected):
        assert lcs_length(a, b) == expected

    @given(words, words)
    def test_symmetric(self, a, b):
        assert lcs_length(a, b) == lcs_length(b, a)

    @given(words, words)
    def test_bounded_by_shorter(self, a, b):
        assert 0 <= lcs_length(a, b) <= min(len(a), len(b))

    @given(words)
    def test_identity(self, a):
        assert lcs_length(a, a) == len(a)

    @given(words, words)
    def test_concat_superset(self, a, b):
        # a is a subsequence of a+b, so the LCS against a is all of a
        assert lcs_length(a, a + b) == len(a)


class TestRougeL:
    def test_identical(self):
        score = rouge_l("the cat sat", "the cat sat")
        assert score == RougeScore(1.0, 1.0, 1.0)

    def test_candidate_subsequence(self):
        # LCS 3; candidate 3 tokens, reference 4 tokens
        score = rouge_l("the cat sat", "the cat was sat")
        assert score.precision == 1.0
        assert score.recall == 0.75
        assert score.f1 == pytest.approx(6 / 7, abs=1e-15)

    def test_disjoint(self):
        assert rouge_l("alpha beta", "gamma delta") == RougeScore(0.0, 0.0, 0.0)

    def test_empty_candidate(self):
        assert rouge_l("", "some reference") == RougeScore(0.0, 0.0, 0.0)

    def test_empty_reference(self):
        assert rouge_l("some words", "") == RougeScore(0.0, 0.0, 0.0)

    def test_case_and_punctuation_insensitive(self):
        assert rouge_l("The cat, sat!", "the CAT sat").f1 == 1.0

    @given(words, words)
    def test_scores_bounded(self, a, b):
        score = rouge_l(" ".join(a), " ".join(b))
        for value in (score.precision, score.recall, score.f1):
            assert 0.0 <= value <= 1.0

    @given(words, words)
    def test_swap_transposes_precision_recall(self, a, b):
        fwd = rouge_l(" ".join(a), " ".join(b))
        rev = rouge_l(" ".join(b), " ".join(a))
        assert fwd.precision == rev.recall
        assert fwd.recall == rev.precision
        assert fwd.f1 == pytest.approx(rev.f1, abs=1e-15)

    @given(words)
    def test_identity_property(self, a):
        text = " ".join(a)
        expected = RougeScore(1.0, 1.0, 1.0) if a else RougeScore(0.0, 0.0, 0.0)
        assert rouge_l(text, text) == expected

    def test_harmonic_mean_formula(self):
        score = rouge_l("alpha beta gamma delta", "alpha beta")
        # LCS 2: precision 2/4, recall 2/2
        assert score.precision == 0.5
        assert score.recall == 1.0
        assert score.f1 == pytest.approx(2 * 0.5 * 1.0 / 1.5, abs=1e-15)


class TestRougeScoreType:
    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            RougeScore(1.5, 0.0, 0.0)
        with pytest.raises(ValueError):
            RougeScore(0.0, -0.1, 0.0)
