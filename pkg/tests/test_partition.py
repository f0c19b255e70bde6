# /tests/test_partition.py

from dataclasses import replace

import pytest

from pg_fold.errors import PartitionError
from pg_fold.geometry import (
    CarrierStrategy,
    FoldCase,
    FoldParams,
    ProjParams,
    build_partition,
    build_space,
    coset_point_partition,
    degree_profile,
    dual_degree_profile,
    verify_spread_lemmas,
)

# --- Test Fixtures ---

@pytest.fixture(scope="module")
def p5():
    return build_space(ProjParams(5, 2))


@pytest.fixture(scope="module")
def p5_planes(p5):
    """P(5, GF(2)) split into 9 planes (odd case)."""
    return build_partition(p5, 2)


@pytest.fixture(scope="module")
def p5_lines(p5):
    """P(5, GF(2)) split into 21 lines (even factorable case, t = 3)."""
    return build_partition(p5, 1)


# --- Test Cases ---

class TestFoldParams:
    """Tests for the m+1 = (k+1)·t factorisation."""

    def test_derived_counts(self, p5):
        fp = FoldParams.for_space(p5, 1)
        assert (fp.t, fp.num_blocks, fp.points_per_block) == (3, 21, 3)
        assert fp.case == FoldCase.EVEN_FACTORABLE
        assert fp.carriers_per_block == 5
        assert fp.carrier_dim == 3

        fp = FoldParams.for_space(p5, 2)
        assert (fp.t, fp.num_blocks, fp.points_per_block) == (2, 9, 7)
        assert fp.case == FoldCase.ODD
        assert fp.carrier_dim == 2

    def test_non_divisible_block_dim(self, p5):
        with pytest.raises(PartitionError, match="割り切りません") as excinfo:
            FoldParams.for_space(p5, 3)
        assert excinfo.value.details == {'m_plus_1': 6, 'k_plus_1': 4}

    def test_block_dim_out_of_range(self, p5):
        with pytest.raises(PartitionError):
            FoldParams.for_space(p5, 5)


class TestCosetPartition:
    """Tests for the point spread built from subfield cosets."""

    def test_planes(self, p5):
        blocks = coset_point_partition(p5, 2)
        assert len(blocks) == 9
        assert blocks[0].points == (0, 9, 18, 27, 36, 45, 54)
        for i, block in enumerate(blocks):
            assert block.points == tuple(sorted(i + 9 * j for j in range(7)))
            assert block.dim == 2

    def test_lines(self, p5):
        blocks = coset_point_partition(p5, 1)
        assert len(blocks) == 21
        for i, block in enumerate(blocks):
            assert block.points == (i, i + 21, i + 42)

    def test_blocks_cover_every_point_once(self, p5):
        points = [x for block in coset_point_partition(p5, 1) for x in block.points]
        assert sorted(points) == list(range(63))


class TestCarriers:
    """Tests for carrier construction and hyperplane groups."""

    def test_odd_case_carriers_are_blocks(self, p5_planes):
        assert p5_planes.carriers == p5_planes.blocks
        assert all(len(g) == 7 for g in p5_planes.hyperplane_blocks)

    def test_even_case_is_equivariant(self, p5_lines):
        assert p5_lines.is_equivariant
        for block, carrier in zip(p5_lines.blocks, p5_lines.carriers):
            assert block.issubset(carrier)
            assert carrier.dim == 3
        assert all(len(g) == 3 for g in p5_lines.hyperplane_blocks)

    def test_hyperplane_groups_partition_hyperplanes(self, p5_lines):
        hyperplanes = sorted(h for g in p5_lines.hyperplane_blocks for h in g)
        assert hyperplanes == list(range(63))

    def test_matching_strategy(self, p5):
        partition = build_partition(p5, 1, CarrierStrategy.MATCHING)
        assert len(partition.carriers) == 21
        assert len({c.points for c in partition.carriers}) == 21
        for block, carrier in zip(partition.blocks, partition.carriers):
            assert block.issubset(carrier)
        report = verify_spread_lemmas(p5, partition)
        for name in ('disjoint_cover', 'closure', 'inside_or_disjoint', 'group_size', 'hyperplanes_through_block',
                     'carriers_per_block', 'carrier_intersections', 'off_carrier_incidence'):
            assert report[name].passed, name

    def test_gf3_space(self):
        space = build_space(ProjParams(3, 3))
        partition = build_partition(space, 1)
        assert partition.num_blocks == 10
        profile = degree_profile(space, partition.blocks, partition.carriers, partition.hyperplane_blocks)
        assert profile.d == (4,) + (1,) * 9


class TestDegreeProfile:
    """Tests for the per-round incidence counts."""

    def test_planes_profile(self, p5, p5_planes):
        profile = degree_profile(p5, p5_planes.blocks, p5_planes.carriers)
        assert profile.d == (7,) + (3,) * 8
        assert profile.uniform
        assert profile.round_lengths == profile.d

    def test_lines_profile(self, p5, p5_lines):
        profile = degree_profile(p5, p5_lines.blocks, p5_lines.carriers, p5_lines.hyperplane_blocks)
        assert profile.uniform
        assert profile.d[0] == 3
        assert sorted(profile.d[1:]) == [1] * 16 + [3] * 4
        assert profile.total == 31

    def test_small_space_profile(self):
        space = build_space(ProjParams(3, 2))
        partition = build_partition(space, 1)
        profile = degree_profile(space, partition.blocks, partition.carriers)
        assert profile.d == (3, 1, 1, 1, 1)

    def test_dual_profile_matches_point_profile(self, p5, p5_planes):
        dual = dual_degree_profile(p5, p5_planes)
        assert dual.uniform
        assert dual.total == 31
        assert sorted(dual.d) == sorted((7,) + (3,) * 8)


class TestSpreadLemmas:
    """Tests for exhaustive verification of the structural lemmas."""

    def test_planes_pass(self, p5, p5_planes):
        report = verify_spread_lemmas(p5, p5_planes)
        assert report.passed, report.to_dict()
        assert "7 + 3·(9-1) = 31" in report['degree_identity'].detail

    def test_lines_pass(self, p5, p5_lines):
        report = verify_spread_lemmas(p5, p5_lines)
        assert report.passed, report.to_dict()
        assert report['block_pair_spans'].passed
        assert report['carrier_intersections'].detail == "|T_a ∩ T_b| = 3"

    def test_gf3_identity(self):
        space = build_space(ProjParams(3, 3))
        report = verify_spread_lemmas(space, build_partition(space, 1))
        assert report.passed
        assert "4 + 1·(10-1) = 13" in report['degree_identity'].detail

    def test_tampered_partition_is_reported(self, p5, p5_planes):
        groups = list(p5_planes.hyperplane_blocks)
        groups[0], groups[1] = groups[1], groups[0]
        broken = replace(p5_planes, hyperplane_blocks=tuple(groups))
        report = verify_spread_lemmas(p5, broken)
        assert not report.passed
        assert not report['off_carrier_incidence'].passed
        with pytest.raises(KeyError):
            report['no_such_lemma']


class TestLargerSpaces:
    """Acceptance geometries with a few hundred points."""

    def test_p7_profile(self):
        space = build_space(ProjParams(7, 2))
        partition = build_partition(space, 3)
        assert partition.num_blocks == 17
        profile = degree_profile(space, partition.blocks, partition.carriers)
        assert profile.d == (15,) + (7,) * 16

    def test_p8_properties(self):
        space = build_space(ProjParams(8, 2))
        partition = build_partition(space, 2)
        assert partition.num_blocks == 73
        assert partition.is_equivariant
        assert all(len(g) == 7 for g in partition.hyperplane_blocks)
        for block in partition.blocks:
            assert sum(1 for c in partition.carriers if block.issubset(c)) == 9
        profile = degree_profile(space, partition.blocks, partition.carriers, partition.hyperplane_blocks)
        assert profile.uniform
        assert profile.d[0] == 7
        assert sorted(profile.d[1:]) == [3] * 64 + [7] * 8
