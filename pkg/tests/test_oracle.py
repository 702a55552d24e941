import itertools

from gridclass.grid import Permutation, contains_pattern, parse_permutation, signed_from_text
from gridclass.oracle import (
    brute_basis,
    brute_gridded,
    brute_member_counts,
    brute_members,
    brute_minimal_gridding,
    brute_simple,
    is_simple,
    is_skew_indecomposable,
    is_sum_indecomposable,
    run_report,
    valid_griddings,
)

P = parse_permutation


def names(perms):
    return sorted("".join(map(str, p.values)) for p in perms)


class TestMembers:
    def test_increasing(self):
        s = signed_from_text("1")
        assert brute_members(s, 3) == {P("123")}

    def test_hat(self):
        s = signed_from_text("1 -1")
        assert names(brute_members(s, 3)) == ["123", "132", "231", "321"]

    def test_stacked_increasing(self):
        s = signed_from_text("1 / 1")
        # includes 132: the top-cell point may fall between the two
        # bottom-cell points horizontally
        assert names(brute_members(s, 3)) == ["123", "132", "213", "231", "312"]
        assert [len(brute_members(s, n)) for n in range(1, 6)] == [1, 2, 5, 12, 27]

    def test_vertical_opposite_signs_doubles(self):
        s = signed_from_text("-1 / 1")
        assert [len(brute_members(s, n)) for n in range(1, 6)] == [1, 2, 4, 8, 16]

    def test_downward_closed(self, small_matrix):
        members4 = brute_members(small_matrix, 4)
        members3 = brute_members(small_matrix, 3)
        from gridclass.grid import all_deletions
        for p in members4:
            for d in all_deletions(p):
                assert d in members3


class TestGridded:
    def test_gridded_vs_plain_counts_diverge(self):
        s = signed_from_text("1 1")
        assert len(brute_gridded(s, 2)) == 4
        assert len(brute_members(s, 2)) == 2

    def test_counts_pass(self):
        s = signed_from_text("1 -1")
        plain, gridded = brute_member_counts(s, 4)
        assert plain == [1, 1, 2, 4, 8]
        assert gridded[:3] == [1, 2, 4]


class TestBasis:
    def test_increasing_basis(self):
        assert brute_basis(signed_from_text("1"), 4) == {P("21")}

    def test_decreasing_basis(self):
        assert brute_basis(signed_from_text("-1"), 4) == {P("12")}

    def test_hat_basis(self):
        assert names(brute_basis(signed_from_text("1 -1"), 6)) == ["213", "312"]


class TestGriddings:
    def test_three_griddings_of_12_side_by_side(self):
        s = signed_from_text("1 1")
        gs = valid_griddings(s, P("12"))
        assert [g.cell_of for g in gs] == [(1, 1), (1, 2), (2, 2)]
        assert brute_minimal_gridding(s, P("12")).cell_of == (1, 1)

    def test_no_gridding_for_non_member(self):
        s = signed_from_text("1")
        assert brute_minimal_gridding(s, P("21")) is None


class TestSimple:
    def test_small_counts(self):
        assert names(brute_simple(2)) == ["12", "21"]
        assert brute_simple(3) == set()
        assert names(brute_simple(4)) == ["2413", "3142"]

    def test_size_two_intervals_are_caught(self):
        assert not is_simple(P("123"))
        assert not is_simple(P("132"))
        assert is_simple(P("2413"))
        assert is_simple(P("1"))
        assert is_simple(P("12"))

    def test_simple_of_five(self):
        assert len(brute_simple(5)) == 6


class TestIndecomposable:
    def test_sum(self):
        assert not is_sum_indecomposable(P("12"))
        assert is_sum_indecomposable(P("21"))
        assert is_sum_indecomposable(P("231"))
        assert not is_sum_indecomposable(P("132"))

    def test_skew(self):
        assert not is_skew_indecomposable(P("21"))
        assert is_skew_indecomposable(P("12"))


class TestReport:
    def test_report_shape(self):
        s = signed_from_text("1 -1")
        rep = run_report(s, 4)
        data = rep.to_json()
        assert data["member_counts"] == [1, 1, 2, 4, 8]
        assert data["minimal_non_members"] == ["2 1 3", "3 1 2"]
        assert "elapsed_seconds" not in data
        assert run_report(s, 2, with_timing=True).elapsed_seconds is not None
