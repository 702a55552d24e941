import itertools
import random

import pytest

from gridclass.errors import SignatureError
from gridclass.grid import (
    GriddedPermutation,
    Permutation,
    all_words,
    parse_permutation,
    signed_from_text,
    word_to_gridded_permutation,
    word_to_permutation,
)
from gridclass.mso import (
    acyclicity,
    basis_check_sentence,
    basis_element_sentence,
    contains_copy,
    formula_to_text,
    geom_sentence,
    gridding_constraints,
    interpret,
    min_gridding_sentence,
    model_check,
    normal_form_sentence,
    origin_order,
    parse_formula,
    relativize,
    simple_sentence,
    skew_indecomposable_sentence,
    sum_indecomposable_sentence,
    unique_word_sentence,
)
from gridclass.mso.structures import FiniteStructure
from gridclass.mso.syntax import (
    And, Bottom, Eq, Exists, Forall, In, LetterAt, Less, Not, Or, Top,
    free_variables, node_count,
)
from gridclass.oracle import (
    brute_members,
    brute_minimal_gridding,
    is_simple,
    is_skew_indecomposable,
    is_sum_indecomposable,
    valid_griddings,
)

from .naive_mso import naive_check
from .formula_gen import random_sentence

P = parse_permutation


def perm_st(p):
    return FiniteStructure.from_permutation(p if isinstance(p, Permutation) else P(p))


def word_st(letters):
    return FiniteStructure.from_word(letters)


class TestGriddingConstraints:
    def test_single_cell_increasing(self):
        s = signed_from_text("1")
        f = gridding_constraints(s)
        assert model_check(perm_st("12"), f, {"X1": {0, 1}})
        assert not model_check(perm_st("21"), f, {"X1": {0, 1}})

    def test_hat_gridding(self):
        s = signed_from_text("1 -1")
        f = gridding_constraints(s)
        assert model_check(perm_st("132"), f, {"X1": {0}, "X2": {1, 2}})
        assert not model_check(perm_st("132"), f, {"X1": {1}, "X2": {0, 2}})
        # non-partition rejected
        assert not model_check(perm_st("132"), f, {"X1": {0, 1, 2}, "X2": {2}})


class TestOriginOrder:
    def test_same_cell_by_value(self):
        s = signed_from_text("1")
        d = origin_order(s)
        env = {"X1": {0, 1}, "x": 0, "y": 1}
        assert model_check(perm_st("12"), d, env)
        assert not model_check(perm_st("12"), d, {"X1": {0, 1}, "x": 1, "y": 0})

    def test_same_row_distinct_cells(self):
        s = signed_from_text("1 -1")
        d = origin_order(s)
        # points 0 in cell 1, 1 in cell 2, same row, row sign +: lower value first
        assert model_check(perm_st("12"), d, {"X1": {0}, "X2": {1}, "x": 0, "y": 1})

    def test_unrelated_cells_never_related(self):
        s = signed_from_text("1 0 / 0 1")
        d = origin_order(s)
        for x, y in [(0, 1), (1, 0)]:
            assert not model_check(
                perm_st("12"), d, {"X1": {0}, "X2": {1}, "x": x, "y": y})


class TestAcyclicity:
    def test_empty_relation(self):
        f = acyclicity(Bottom())
        assert model_check(perm_st("123"), f)

    def test_two_cycle_rejected(self):
        # edge relation: everything related to everything else
        edge = Not(Eq("x", "y"))
        f = acyclicity(edge)
        assert not model_check(perm_st("12"), f)

    def test_successor_chain_fine(self):
        # succ in the position order: x < y and nothing strictly between
        between = Exists("m", False, And((Less("<1", "x", "m"), Less("<1", "m", "y"))))
        succ = And((Less("<1", "x", "y"), Not(between)))
        f = acyclicity(succ)
        assert model_check(perm_st("1234"), f)

    def test_agrees_with_naive_on_tiny(self):
        edge = Less("<1", "x", "y")
        f = acyclicity(edge)
        for p in ["1", "12", "21", "132"]:
            assert model_check(perm_st(p), f) == naive_check(perm_st(p), f)


class TestGeomSentence:
    def test_matches_oracle_small(self, small_matrix):
        geom = geom_sentence(small_matrix)
        for n in range(0, 5):
            members = brute_members(small_matrix, n)
            for vals in itertools.permutations(range(1, n + 1)):
                p = Permutation(vals)
                assert model_check(perm_st(p), geom) == (p in members)

    def test_hat_length_three(self):
        geom = geom_sentence(signed_from_text("1 -1"))
        sat = {"".join(map(str, vals))
               for vals in itertools.permutations((1, 2, 3))
               if model_check(perm_st(Permutation(vals)), geom)}
        assert sat == {"123", "132", "231", "321"}

    def test_zero_matrix(self):
        geom = geom_sentence(signed_from_text("0"))
        assert model_check(perm_st(P("")), geom)
        assert not model_check(perm_st("1"), geom)

    def test_refined_eight_cell_matches_oracle(self):
        s = signed_from_text("1 1 / 1 -1")
        geom = geom_sentence(s)
        members = brute_members(s, 4)
        for vals in itertools.permutations(range(1, 5)):
            p = Permutation(vals)
            assert model_check(perm_st(p), geom) == (p in members)


class TestMinGridding:
    def test_unique_gridding_always_minimal(self):
        s = signed_from_text("1")
        f = min_gridding_sentence(s)
        g = GriddedPermutation(P("123"), (1, 1, 1))
        assert model_check(FiniteStructure.from_gridded(g), f)

    def test_side_by_side(self):
        s = signed_from_text("1 1")
        f = min_gridding_sentence(s)
        g_min = GriddedPermutation(P("12"), (1, 1))
        g_other = GriddedPermutation(P("12"), (2, 2))
        assert model_check(FiniteStructure.from_gridded(g_min), f)
        assert not model_check(FiniteStructure.from_gridded(g_other), f)

    def test_exactly_one_minimal_gridding_per_member(self, small_matrix):
        f = min_gridding_sentence(small_matrix)
        for n in range(1, 5):
            for p in brute_members(small_matrix, n):
                gs = valid_griddings(small_matrix, p)
                flags = [model_check(FiniteStructure.from_gridded(g), f) for g in gs]
                assert sum(flags) == 1
                assert gs[flags.index(True)] == brute_minimal_gridding(small_matrix, p)


class TestClassicSentences:
    def test_sum_indecomposable(self):
        f = sum_indecomposable_sentence()
        assert not model_check(perm_st("12"), f)
        assert model_check(perm_st("21"), f)
        for n in range(0, 6):
            for vals in itertools.permutations(range(1, n + 1)):
                p = Permutation(vals)
                assert model_check(perm_st(p), f) == is_sum_indecomposable(p), p

    def test_skew_indecomposable(self):
        f = skew_indecomposable_sentence()
        for n in range(0, 5):
            for vals in itertools.permutations(range(1, n + 1)):
                p = Permutation(vals)
                assert model_check(perm_st(p), f) == is_skew_indecomposable(p), p

    def test_simple(self):
        f = simple_sentence()
        assert model_check(perm_st("2413"), f)
        assert not model_check(perm_st("132"), f)
        # two-point intervals must be caught even without a betweenness witness
        assert not model_check(perm_st("123"), f)
        for n in range(0, 6):
            for vals in itertools.permutations(range(1, n + 1)):
                p = Permutation(vals)
                assert model_check(perm_st(p), f) == is_simple(p), p

    def test_contains_copy(self):
        f = contains_copy(P("21"))
        assert model_check(perm_st("312"), f)
        assert not model_check(perm_st("123"), f)
        for target in ["2413", "1234", "4321"]:
            for pat in ["1", "12", "21", "132", "231"]:
                from gridclass.grid import contains_pattern
                assert model_check(perm_st(target), contains_copy(P(pat))) == \
                    contains_pattern(P(target), P(pat))

    def test_basis_check(self):
        s = signed_from_text("1")
        assert model_check(perm_st("21"), basis_check_sentence([P("21")], s))
        assert not model_check(perm_st("21"), basis_check_sentence([], s))
        assert model_check(perm_st("123"), basis_check_sentence([], s))


class TestBasisElementSentence:
    def test_minimal_non_members(self):
        s = signed_from_text("1")
        f = basis_element_sentence(s)
        assert model_check(perm_st("21"), f)
        assert not model_check(perm_st("321"), f)   # deletions contain 21
        assert not model_check(perm_st("123"), f)   # member
        assert not model_check(perm_st("213"), f)   # contains 21 after one deletion

    def test_matches_oracle(self):
        from gridclass.oracle import brute_basis
        s = signed_from_text("1 -1")
        f = basis_element_sentence(s)
        basis = brute_basis(s, 4)
        for n in range(1, 5):
            for vals in itertools.permutations(range(1, n + 1)):
                p = Permutation(vals)
                assert model_check(perm_st(p), f) == (p in basis), p


class TestNormalForm:
    def test_no_independence_accepts_everything(self):
        s = signed_from_text("1 1")
        f = normal_form_sentence(s)
        for n in range(0, 5):
            for w in all_words(s, n):
                assert model_check(word_st(w), f)

    def test_diagonal_rejects_out_of_order(self):
        s = signed_from_text("1 0 / 0 1")
        f = normal_form_sentence(s)
        assert model_check(word_st((1, 2)), f)
        assert not model_check(word_st((2, 1)), f)

    def test_selects_one_word_per_gridding(self, small_matrix):
        f = normal_form_sentence(small_matrix)
        for n in range(0, 5):
            images = {}
            for w in all_words(small_matrix, n):
                g = word_to_gridded_permutation(small_matrix, w)
                key = (g.perm.values, g.cell_of)
                images.setdefault(key, []).append(w)
            for key, words in images.items():
                chosen = [w for w in words if model_check(word_st(w), f)]
                assert len(chosen) == 1
                assert chosen[0] == min(words)


class TestInterpret:
    def test_rejects_word_formulas(self):
        s = signed_from_text("1")
        with pytest.raises(SignatureError):
            interpret(Less("<", "x", "y"), s)

    def test_totality_survives(self):
        s = signed_from_text("1")
        total = Forall("x", False, Forall("y", False, Or((
            Less("<1", "x", "y"), Less("<1", "y", "x"), Eq("x", "y")))))
        f = interpret(total, s)
        for n in range(0, 4):
            for w in all_words(s, n):
                assert model_check(word_st(w), f)

    def test_soundness_for_geom_and_friends(self, small_matrix):
        sentences = [geom_sentence(small_matrix), sum_indecomposable_sentence(),
                     simple_sentence()]
        for theta in sentences:
            theta_w = interpret(theta, small_matrix)
            for n in range(0, 5):
                for w in all_words(small_matrix, n):
                    assert model_check(word_st(w), theta_w) == \
                        model_check(perm_st(word_to_permutation(small_matrix, w)), theta)

    def test_soundness_for_min_sentence(self, small_matrix):
        theta = min_gridding_sentence(small_matrix)
        theta_w = interpret(theta, small_matrix)
        for n in range(0, 4):
            for w in all_words(small_matrix, n):
                g = word_to_gridded_permutation(small_matrix, w)
                assert model_check(word_st(w), theta_w) == \
                    model_check(FiniteStructure.from_gridded(g), theta)

    def test_geom_interpretation_is_universally_true(self, small_matrix):
        f = interpret(geom_sentence(small_matrix), small_matrix)
        for n in range(0, 5):
            for w in all_words(small_matrix, n):
                assert model_check(word_st(w), f)


class TestUniqueWordSentence:
    def test_counts_match_members(self, small_matrix):
        f = unique_word_sentence(small_matrix)
        for n in range(0, 5):
            count = sum(1 for w in all_words(small_matrix, n)
                        if model_check(word_st(w), f))
            assert count == len(brute_members(small_matrix, n))

    def test_single_cell_one_word_per_length(self):
        s = signed_from_text("1")
        f = unique_word_sentence(s)
        for n in range(0, 5):
            assert sum(1 for w in all_words(s, n) if model_check(word_st(w), f)) == 1


class TestRelativize:
    def test_relativized_geom_checks_substructure(self):
        s = signed_from_text("1")
        rel = relativize(geom_sentence(s), "R")
        # 321 restricted to one point is increasing
        assert model_check(perm_st("321"), rel, {"R": {1}})
        assert not model_check(perm_st("321"), rel, {"R": {0, 2}})


class TestModelCheckerCore:
    def test_vacuous_universal_on_empty(self):
        assert model_check(perm_st(P("")), Forall("x", False, Bottom()))

    def test_signature_mismatch(self):
        with pytest.raises(SignatureError):
            model_check(perm_st("12"), Less("<", "x", "y"), {"x": 0, "y": 1})
        with pytest.raises(SignatureError):
            model_check(word_st((1,)), Less("<1", "x", "y"), {"x": 0, "y": 0})
        with pytest.raises(SignatureError):
            model_check(perm_st("12"), LetterAt("x", frozenset({1})), {"x": 0})

    def test_unbound_variable(self):
        with pytest.raises(SignatureError):
            model_check(perm_st("12"), Less("<1", "x", "y"), {"x": 0})

    def test_budget_cap_on_domain(self):
        from gridclass.errors import Budget, BudgetExceededError
        with pytest.raises(BudgetExceededError):
            model_check(perm_st(Permutation.identity(5)), Top(),
                        budget=Budget(max_domain=4))

    def test_matches_naive_on_random_sentences(self):
        rng = random.Random(20250809)
        letters = (1, 2)
        words = [w for n in range(0, 4)
                 for w in itertools.product(letters, repeat=n)]
        for _ in range(150):
            f = random_sentence(rng, letters, max_depth=3)
            for w in words:
                st = word_st(w)
                assert model_check(st, f) == naive_check(st, f), formula_to_text(f)

    def test_matches_naive_on_gridding_fragments(self):
        s = signed_from_text("1 -1")
        mon = gridding_constraints(s)
        for p in ["12", "21", "132"]:
            st = perm_st(p)
            n = st.size
            for x1 in itertools.chain([frozenset()], (frozenset(c) for k in range(1, n + 1)
                                       for c in itertools.combinations(range(n), k))):
                x2 = frozenset(range(n)) - x1
                env = {"X1": x1, "X2": x2}
                assert model_check(st, mon, env) == naive_check(st, mon, env)


class TestSerialization:
    def test_round_trip(self):
        s = signed_from_text("1 -1")
        for f in [geom_sentence(s), min_gridding_sentence(s),
                  normal_form_sentence(s), simple_sentence(),
                  sum_indecomposable_sentence(), contains_copy(P("231")),
                  basis_check_sentence([P("21"), P("312")], s)]:
            text = formula_to_text(f)
            assert parse_formula(text) == f
            assert formula_to_text(parse_formula(text)) == text

    def test_builders_deterministic(self):
        s1 = signed_from_text("1 -1")
        s2 = signed_from_text("1 -1")
        assert geom_sentence(s1) == geom_sentence(s2)
        assert formula_to_text(unique_word_sentence(s1)) == \
            formula_to_text(unique_word_sentence(s2))

    def test_node_count_and_free_vars(self):
        f = Exists("x", False, And((In("x", "X"), Top())))
        assert node_count(f) == 4
        fo, so = free_variables(f)
        assert fo == frozenset() and so == frozenset({"X"})
