# /tests/test_projective.py

from itertools import combinations

import numpy as np
import pytest

from pg_fold.errors import GeometryError
from pg_fold.geometry import ProjParams, build_space, incidence_graph, phi
from pg_fold.geometry.projective import Flat, points_in

# --- Test Fixtures ---

@pytest.fixture(scope="module")
def fano():
    """P(2, GF(2)), the Fano plane."""
    return build_space(ProjParams(2, 2))


@pytest.fixture(scope="module")
def p5():
    """P(5, GF(2)): 63 points, each on 31 hyperplanes."""
    return build_space(ProjParams(5, 2))


# --- Test Cases ---

class TestCounting:
    """Tests for phi and the cardinalities of a space."""

    def test_phi_values(self):
        assert phi(5, 0, 2) == 63
        assert phi(5, 1, 2) == 651
        assert phi(3, 1, 2) == 35
        assert phi(2, 0, 3) == 13

    def test_phi_rejects_bad_arguments(self):
        with pytest.raises(GeometryError):
            phi(2, 3, 2)
        with pytest.raises(GeometryError):
            phi(2, 1, 1)

    def test_p5_counts(self, p5):
        assert p5.N == 63
        assert p5.degree == 31
        assert p5.incidence_matrix.sum(axis=0).tolist() == [31] * 63
        assert p5.incidence_matrix.sum(axis=1).tolist() == [31] * 63

    def test_space_over_gf3(self):
        space = build_space(ProjParams(3, 3))
        assert space.N == 40
        assert space.degree == 13

    def test_rejects_non_prime_power(self):
        with pytest.raises(GeometryError):
            ProjParams(2, 6)


class TestIncidence:
    """Tests for point-hyperplane incidence through the trace."""

    def test_fano_lines(self, fano):
        lines = {frozenset(fano.hyperplane_points(b)) for b in range(7)}
        translates = {frozenset((x + s) % 7 for x in (0, 1, 3)) for s in range(7)}
        assert lines == translates

    def test_incidence_is_circulant(self, p5):
        matrix = p5.incidence_matrix
        assert np.array_equal(np.roll(np.roll(matrix, 1, axis=0), -1, axis=1), matrix)

    def test_incident_matches_hyperplane_points(self, fano):
        for b in range(7):
            points = set(fano.hyperplane_points(b))
            for x in range(7):
                assert fano.incident(x, b) == (x in points)

    def test_incidence_graph(self, fano):
        graph = incidence_graph(fano)
        assert graph.num_edges == 21
        assert list(graph.edges) == sorted(graph.edges)
        for x in range(7):
            assert len(graph.point_edges(x)) == 3


class TestFlats:
    """Tests for span, join and the duality counts."""

    def test_subfield_orbit_is_a_plane(self, p5):
        plane = p5.span([0, 9, 18])
        assert plane.dim == 2
        assert plane.points == (0, 9, 18, 27, 36, 45, 54)
        assert len(p5.hyperplanes_containing(plane.points)) == 7

    def test_line_through_two_points(self, p5):
        line = p5.span([0, 21])
        assert line.points == (0, 21, 42)
        assert len(p5.hyperplanes_containing(line.points)) == 15
        assert p5.hyperplanes_through_count(2) == 15

    def test_lines_in_a_three_flat(self, p5):
        h0, h1 = p5.hyperplane_points(0), p5.hyperplane_points(1)
        solid = tuple(sorted(set(h0) & set(h1)))
        assert len(solid) == 15
        assert p5.is_flat(solid)
        assert len(p5.hyperplanes_containing(solid)) == 3
        lines = {p5.span(pair).points for pair in combinations(solid, 2)}
        assert len(lines) == 35
        assert all(len(line) == 3 for line in lines)

    def test_join_of_two_lines(self, p5):
        a = p5.span([0, 21])
        b = p5.span([1, 22])
        joined = p5.join(a, b)
        assert joined.dim == 3
        assert len(joined) == points_in(4, 2)
        assert a.issubset(joined) and b.issubset(joined)

    def test_shift_preserves_flatness(self, p5):
        plane = p5.span([0, 9, 18])
        moved = p5.shift(plane, 5)
        assert moved.points == tuple(sorted((x + 5) % 63 for x in plane.points))
        assert p5.is_flat(moved.points)
        assert moved.isdisjoint(plane)

    def test_non_flat_set(self, p5):
        assert not p5.is_flat([0, 1])

    def test_empty_span_is_rejected(self, p5):
        with pytest.raises(GeometryError):
            p5.span([])

    def test_flat_membership(self):
        flat = Flat(1, (0, 21, 42))
        assert 21 in flat and 5 not in flat
