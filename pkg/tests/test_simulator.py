# /tests/test_simulator.py

import numpy as np
import pytest

from pg_fold.errors import ScheduleConflictError
from pg_fold.folding import fold_plan, from_document, swap_edge_memory, swap_unit_slots, to_document
from pg_fold.geometry import ProjParams, build_space, incidence_graph
from pg_fold.simulation import (
    AccessOp,
    EdgeState,
    Phase,
    UpdateRule,
    get_kernel,
    list_kernels,
    random_edge_state,
    run_folded,
    run_reference,
)

# --- Test Fixtures ---

_GEOMETRIES = {
    'p5_planes': (5, 2, 2),
    'p5_lines': (5, 2, 1),
    'p3_lines': (3, 2, 1),
    'p3_gf3': (3, 3, 1),
    'p7_solids': (7, 2, 3),
    'p8_planes': (8, 2, 2),
}

_plans = {}


def _plan(name):
    if name not in _plans:
        _plans[name] = fold_plan(*_GEOMETRIES[name])
    return _plans[name]


@pytest.fixture(scope="module")
def planes_plan():
    return _plan('p5_planes')


# --- Test Cases ---

class TestKernels:
    """Tests for the kernel registry and reduction semantics."""

    def test_registry(self):
        assert list_kernels() == ['sum', 'xor']

    def test_get_kernel_with_update_rule(self):
        kernel = get_kernel('xor-add', width=8)
        assert kernel.update_rule == UpdateRule.ADD
        assert kernel.mask == 0xFF
        assert kernel.update(0b1010, 0b0110) == 0b1100

    def test_unknown_kernel(self):
        with pytest.raises(ValueError, match="見つかりません"):
            get_kernel('max')
        with pytest.raises(ValueError, match="更新規則"):
            get_kernel('sum-mul')

    @pytest.mark.parametrize("name", ['xor', 'sum'])
    def test_reduce_is_order_independent(self, name):
        kernel = get_kernel(name)
        rng = np.random.default_rng(7)
        values = [int(v) for v in rng.integers(0, 1 << 16, size=31)]
        shuffled = [values[i] for i in rng.permutation(31)]
        assert kernel.reduce(values) == kernel.reduce(shuffled)
        assert kernel.reduce([]) == kernel.identity


class TestReference:
    """Tests for the fully parallel reference execution."""

    def test_zero_iterations_is_identity(self, planes_plan):
        kernel = get_kernel('xor')
        init = random_edge_state(planes_plan.graph, kernel, 3)
        assert run_reference(planes_plan.graph, kernel, init, 0) == init

    def test_degree_one_space_is_fixed(self):
        graph = incidence_graph(build_space(ProjParams(1, 2)))
        kernel = get_kernel('xor')
        init = EdgeState.filled(graph.num_edges, 1)
        final = run_reference(graph, kernel, init, 1)
        assert final.values == [1, 1, 1]
        assert final.iteration == 1

    def test_point_phase_sums(self, planes_plan):
        kernel = get_kernel('sum')
        init = EdgeState.filled(planes_plan.graph.num_edges, 1)
        after = run_reference(planes_plan.graph, kernel, init, 1, phases=(Phase.POINT,))
        assert set(after.values) == {31}
        both = run_reference(planes_plan.graph, kernel, init, 1)
        assert set(both.values) == {31 * 31}

    def test_rejects_wrong_length(self, planes_plan):
        with pytest.raises(ValueError):
            run_reference(planes_plan.graph, get_kernel('sum'), EdgeState.filled(5, 0), 1)


class TestFoldedExecution:
    """The folded machine must reproduce the reference bit for bit."""

    @pytest.mark.parametrize("geometry", list(_GEOMETRIES))
    @pytest.mark.parametrize("kernel_name", ['xor-assign', 'sum-assign'])
    @pytest.mark.parametrize("seed", [1, 42])
    @pytest.mark.parametrize("iters", [1, 3])
    def test_matches_reference(self, geometry, kernel_name, seed, iters):
        plan = _plan(geometry)
        kernel = get_kernel(kernel_name)
        init = random_edge_state(plan.graph, kernel, seed)
        final, trace = run_folded(plan, kernel, init, iters, seed=seed)
        assert final == run_reference(plan.graph, kernel, init, iters)
        assert trace.conflict_free
        assert trace.idle_slots == 0
        assert trace.final_state == final

    @pytest.mark.parametrize("kernel_name", ['xor-add', 'sum-add'])
    def test_add_rule_matches_reference(self, kernel_name):
        plan = _plan('p5_lines')
        kernel = get_kernel(kernel_name)
        init = random_edge_state(plan.graph, kernel, 2)
        final, _ = run_folded(plan, kernel, init, 3)
        assert final == run_reference(plan.graph, kernel, init, 3)

    def test_full_width_xor_words(self):
        plan = fold_plan(5, 2, 2)
        kernel = get_kernel('xor', width=64)
        init = random_edge_state(plan.graph, kernel, 42)
        assert all(0 <= v < 1 << 64 for v in init.values)
        assert max(init.values) >= 1 << 63
        final, _ = run_folded(plan, kernel, init, 1)
        assert final == run_reference(plan.graph, kernel, init, 1)

    def test_overlapped_timing_matches_reference(self):
        plan = fold_plan(5, 2, 2, overlap=True)
        kernel = get_kernel('xor-add')
        init = random_edge_state(plan.graph, kernel, 11)
        final, _ = run_folded(plan, kernel, init, 2)
        assert final == run_reference(plan.graph, kernel, init, 2)

    def test_trace_records(self, planes_plan, tmp_path):
        kernel = get_kernel('sum')
        init = random_edge_state(planes_plan.graph, kernel, 5)
        _, trace = run_folded(planes_plan, kernel, init, 1, keep_trace=True, seed=5)
        reads = [r for r in trace.records if r.op == AccessOp.READ]
        writes = [r for r in trace.records if r.op == AccessOp.WRITE]
        assert len(reads) == len(writes) == 2 * 1953
        assert trace.idle_slots == 0
        stats = trace.summary()['accesses']['overall_statistics']
        assert stats['total_reads'] == 2 * 1953
        assert stats['utilization'] == [1, 1]
        per_phase = trace.summary()['accesses']['phase_breakdown']
        assert per_phase == {
            'hyperplane': {'reads': 1953, 'writes': 1953},
            'point': {'reads': 1953, 'writes': 1953},
        }

        path = tmp_path / "trace.csv"
        trace.write_csv(path)
        lines = path.read_text(encoding='utf-8').splitlines()
        assert lines[0] == "slot,unit,mem,addr,op,edge_point,edge_hyperplane"
        assert len(lines) == 1 + 4 * 1953


class TestFaultDetection:
    """Injected faults must stop the folded machine."""

    @pytest.mark.parametrize("seed", range(10))
    def test_swapped_edge_memory_collides(self, planes_plan, seed):
        bad, _ = swap_edge_memory(to_document(planes_plan), seed)
        plan = from_document(bad)
        kernel = get_kernel('xor')
        with pytest.raises(ScheduleConflictError, match="アドレス衝突"):
            run_folded(plan, kernel, random_edge_state(plan.graph, kernel, 0), 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_swapped_unit_slots_conflict(self, planes_plan, seed):
        bad, _ = swap_unit_slots(to_document(planes_plan), seed)
        plan = from_document(bad)
        kernel = get_kernel('xor')
        with pytest.raises(ScheduleConflictError) as excinfo:
            run_folded(plan, kernel, random_edge_state(plan.graph, kernel, 0), 1)
        assert 'slot' in excinfo.value.details
