# /tests/test_folding.py

import json
from collections import Counter
from fractions import Fraction

import pytest

from pg_fold.errors import PlanError
from pg_fold.folding import (
    canonical_json,
    fold_plan,
    from_document,
    load_document,
    parse_document,
    save_document,
    swap_edge_memory,
    swap_unit_slots,
    to_document,
)
from pg_fold.geometry import CarrierStrategy
from pg_fold.simulation import check_plan

# --- Test Fixtures ---

@pytest.fixture(scope="module")
def planes_plan():
    """P(5, GF(2)) folded onto 9 units (planes)."""
    return fold_plan(5, 2, 2)


@pytest.fixture(scope="module")
def lines_plan():
    """P(5, GF(2)) folded onto 21 units (lines)."""
    return fold_plan(5, 2, 1)


@pytest.fixture(scope="module")
def planes_doc(planes_plan):
    return to_document(planes_plan)


# --- Test Cases ---

class TestMemoryMap:
    """Tests for edge placement."""

    @pytest.mark.parametrize("k, units, size", [(2, 9, 217), (1, 21, 93)])
    def test_memory_shape(self, k, units, size, planes_plan, lines_plan):
        plan = planes_plan if k == 2 else lines_plan
        mm = plan.memory_map
        assert (mm.num_memories, mm.mem_size) == (units, size)
        assert len(mm.entries) == 1953
        per_mem = Counter(mem for _, _, mem, _ in mm.entries)
        assert set(per_mem.values()) == {size}

    def test_edges_live_with_their_hyperplane_group(self, planes_plan):
        group_of = planes_plan.partition.group_of_hyperplane(63)
        for p, h, mem, _ in planes_plan.memory_map.entries:
            assert mem == group_of[h]

    def test_smallest_space(self):
        plan = fold_plan(1, 2, 0)
        assert plan.num_units == 3
        assert plan.memory_map.mem_size == 1
        assert check_plan(plan).passed

    def test_locate_unknown_edge(self, planes_plan):
        with pytest.raises(PlanError):
            planes_plan.memory_map.locate((0, 1000))


class TestPhase1Schedule:
    """Tests for the rotating point-phase schedule."""

    def test_planes_slots(self, planes_plan):
        phase1 = planes_plan.phase1
        assert phase1.slots_per_unit == 217
        assert all(len(slots) == 217 for slots in phase1.units)
        assert phase1.idle_slots == 0
        assert planes_plan.utilization == Fraction(1)
        assert planes_plan.fold_factor == 7

    def test_lines_slots(self, lines_plan):
        assert lines_plan.phase1.slots_per_unit == 93
        assert lines_plan.fold_factor == 3

    def test_small_space_slots(self):
        plan = fold_plan(3, 2, 1)
        assert plan.num_units == 5
        assert plan.phase1.slots_per_unit == 21

    def test_rotation(self, planes_plan):
        phase1 = planes_plan.phase1
        for unit, slots in enumerate(phase1.units):
            for s in slots:
                _, j, _ = phase1.locate_slot(s.slot)
                assert s.mem == (unit + j) % 9

    def test_no_memory_is_shared_within_a_slot(self, lines_plan):
        by_slot = Counter()
        for slots in lines_plan.phase1.units:
            for s in slots:
                by_slot[(s.slot, s.mem)] += 1
        assert max(by_slot.values()) == 1

    def test_counter_addressing(self, lines_plan):
        gen = lines_plan.address_gen
        for mem in range(lines_plan.memory_map.num_memories):
            assert gen.replay_counter(mem) == tuple(range(93))

    def test_cycles(self):
        plain = fold_plan(5, 2, 2, overlap=False)
        overlapped = fold_plan(5, 2, 2, overlap=True)
        assert plain.phase1.cycles == 434
        assert overlapped.phase1.cycles == 248
        assert plain.phase1.write_cycle(0) == 31
        assert overlapped.phase1.read_cycle(40) == 40
        assert plain.phase1.read_cycle(40) == 71


class TestPhase2Schedule:
    """Tests for the local hyperplane-phase schedule."""

    def test_tasks_are_local_and_cover_memory(self, planes_plan):
        mm = planes_plan.memory_map
        for unit, tasks in enumerate(planes_plan.phase2.units):
            assert [t.hyperplane for t in tasks] == sorted(planes_plan.partition.hyperplane_blocks[unit])
            addrs = sorted(a for t in tasks for a in t.addrs)
            assert addrs == list(range(mm.mem_size))
            for task in tasks:
                assert all(mm.edge_at(unit, a)[1] == task.hyperplane for a in task.addrs)

    def test_lut(self, planes_plan):
        gen = planes_plan.address_gen
        task = planes_plan.phase2.units[0][0]
        assert gen.lookup(0, task.hyperplane, 0) == task.addrs[0]
        assert planes_plan.lut[(task.hyperplane, 3)] == task.addrs[3]
        with pytest.raises(PlanError):
            gen.lookup(1, task.hyperplane, 0)

    def test_cycles(self, planes_plan):
        assert planes_plan.phase2.slots_per_unit == 217
        assert planes_plan.phase2.cycles == 434


class TestSummary:
    """Tests for the plan summary shown by the CLI."""

    def test_summary(self, planes_plan):
        summary = planes_plan.summary()
        assert summary['units'] == 9
        assert summary['memories'] == {'count': 9, 'size': 217}
        assert summary['degree_profile'] == [7] + [3] * 8
        assert summary['utilization'] == [1, 1]
        assert summary['case'] == 'odd'


class TestPlanDocument:
    """Tests for plan.json serialisation and validation."""

    def test_canonical_round_trip(self, planes_doc, tmp_path):
        path = tmp_path / "plan.json"
        save_document(planes_doc, path)
        text = path.read_text(encoding='utf-8')
        assert canonical_json(load_document(path)) == text
        assert json.loads(text)['schema'] == "pgfold-plan/1"

    def test_generation_is_deterministic(self, planes_doc):
        assert canonical_json(to_document(fold_plan(5, 2, 2))) == canonical_json(planes_doc)

    def test_reloaded_plan_verifies(self, planes_doc):
        plan = from_document(parse_document(canonical_json(planes_doc)))
        report = check_plan(plan)
        assert report.passed, report.failed

    def test_schema_violation_reports_path(self, planes_doc):
        data = json.loads(canonical_json(planes_doc))
        data['memories']['size'] = "217"
        with pytest.raises(PlanError) as excinfo:
            parse_document(json.dumps(data))
        assert excinfo.value.details['path'] == 'memories.size'

    def test_unknown_field_is_rejected(self, planes_doc):
        data = json.loads(canonical_json(planes_doc))
        data['extra'] = 1
        with pytest.raises(PlanError, match="extra"):
            parse_document(json.dumps(data))

    def test_missing_file(self, tmp_path):
        with pytest.raises(PlanError, match="読み込めません"):
            load_document(tmp_path / "missing.json")

    def test_matching_plan_verifies(self):
        plan = fold_plan(5, 2, 1, strategy=CarrierStrategy.MATCHING)
        report = check_plan(plan)
        assert report.passed, report.failed
        assert plan.phase1.reads == 1953
        assert plan.phase1.idle_slots == plan.num_units * plan.phase1.slots_per_unit - 1953


class TestGeneralizedPlans:
    """Plans for the odd, non-binary and t = 3 geometries pass every static check."""

    @pytest.mark.parametrize("m, q, k, units, size", [
        (3, 2, 1, 5, 21),
        (3, 3, 1, 10, 52),
        (7, 2, 3, 17, 1905),
        (8, 2, 2, 73, 1785),
    ])
    def test_all_checks_pass(self, m, q, k, units, size):
        plan = fold_plan(m, q, k)
        report = check_plan(plan)
        assert report.passed, report.failed
        assert plan.num_units == plan.memory_map.num_memories == units
        assert plan.memory_map.mem_size == size
        assert plan.phase1.idle_slots == 0
        assert plan.utilization == Fraction(1)


class TestFaultInjection:
    """Static verification must flag every injected fault."""

    @pytest.mark.parametrize("seed", range(25))
    def test_swap_edge_memory_is_detected(self, planes_doc, seed):
        bad, fault = swap_edge_memory(planes_doc, seed)
        report = check_plan(from_document(bad))
        assert not report.passed
        assert 'residency' in report.failed, fault

    @pytest.mark.parametrize("seed", range(25))
    def test_swap_unit_slots_is_detected(self, planes_doc, seed):
        bad, fault = swap_unit_slots(planes_doc, seed)
        report = check_plan(from_document(bad))
        assert not report.passed, fault
        assert {'rotation', 'counter', 'point_coverage'} & set(report.failed)
