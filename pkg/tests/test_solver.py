"""Solver behavior on the hand instances.

Frozen expectations derived before implementation:

* decay ceiling 2 * n * lam**m * eps at n=4, lam=0.5, eps=0.3, m=5:
  8 * 0.3 / 32 = 0.075 exactly.
* the affine instance contracts toward x = y = 3/7 (linear solve, see
  test_mappings); its iterate error shrinks by at least 3/8 per step, so
  sixty iterations at tolerance 1e-10 are ample.
* chain4 reaches (0, 0) in two steps from (0, 3): y walks 3 -> 1 -> 0.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainfix.cli import build_config, run_hypothesis_suite
from chainfix.errors import DomainError
from chainfix.instances import generate_finite_instance, load_instance
from chainfix.mappings import expression_map
from chainfix.solver import (
    SolveConfig,
    collapse_check,
    decay_bound,
    picard_solve,
    residual,
    uniqueness_probe,
    verify_decay_bound,
)
from chainfix.spaces import BoxSpace


def solve_instance(path):
    inst = load_instance(path)
    suite = run_hypothesis_suite(inst)
    cfg = build_config(inst, suite)
    return inst, cfg, picard_solve(inst.cmap, inst.x0, inst.y0, cfg)


class TestDecayBound:
    def test_frozen_value(self):
        assert decay_bound(4, 0.5, 0.3, 5) == 0.075

    def test_monotone_decreasing_in_m(self):
        values = [decay_bound(3, 0.7, 1.0, m) for m in range(20)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_input_validation(self):
        with pytest.raises(DomainError):
            decay_bound(0, 0.5, 0.3, 1)
        with pytest.raises(DomainError):
            decay_bound(1, 1.0, 0.3, 1)
        with pytest.raises(DomainError):
            decay_bound(1, 0.5, 0.0, 1)
        with pytest.raises(DomainError):
            decay_bound(1, 0.5, 0.3, -1)


class TestPicard:
    def test_l1_converges_to_three_sevenths(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        assert res.converged
        assert res.iterations_used <= 60
        c = 3.0 / 7.0
        assert abs(res.x[0] - c) <= 1e-10
        assert abs(res.y[0] - c) <= 1e-10

    def test_l1_gap_within_twice_tolerance(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        assert res.gap <= 2.0 * cfg.residual_tolerance

    def test_chain4_two_steps(self, chain4_path):
        inst, cfg, res = solve_instance(chain4_path)
        assert res.converged
        assert res.iterations_used == 2
        assert (res.x, res.y) == (0, 0)
        assert res.residual == 0.0

    def test_trace_rows_carry_step_identity(self, l1_path):
        # the step recorded at row m+1 is the residual recorded at row m
        inst, cfg, res = solve_instance(l1_path)
        for prev, cur in zip(res.trace, res.trace[1:]):
            assert cur.eta_step == prev.residual

    def test_trace_residual_contracts_per_step(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        lam = cfg.lam
        rows = [r for r in res.trace if r.residual > cfg.residual_tolerance]
        for prev, cur in zip(rows, rows[1:]):
            assert cur.residual <= lam * prev.residual + 1e-15

    def test_trace_can_be_disabled(self, l1_path):
        inst = load_instance(l1_path)
        cfg = SolveConfig(record_trace=False, max_iterations=60)
        res = picard_solve(inst.cmap, inst.x0, inst.y0, cfg)
        assert res.converged
        assert res.trace == ()

    def test_exhaustion_reports_last_iterate(self, l1_path):
        inst = load_instance(l1_path)
        cfg = SolveConfig(residual_tolerance=1e-10, max_iterations=3)
        res = picard_solve(inst.cmap, inst.x0, inst.y0, cfg)
        assert res.status == "max-iterations-exhausted"
        assert res.iterations_used == 3
        assert res.residual == residual(inst.cmap, res.x, res.y)

    def test_escape_reports_divergence(self):
        box = BoxSpace((0.0,), (1.0,))
        cmap = expression_map(box, ["x + y"])  # leaves the box quickly
        res = picard_solve(cmap, (0.5,), (0.75,), SolveConfig())
        assert res.status == "diverged-from-box"
        assert math.isinf(res.residual)

    def test_fixed_pair_requires_convergence(self, l1_path):
        inst = load_instance(l1_path)
        cfg = SolveConfig(residual_tolerance=1e-10, max_iterations=2)
        res = picard_solve(inst.cmap, inst.x0, inst.y0, cfg)
        with pytest.raises(DomainError):
            res.fixed_pair

    def test_bound_rows_recorded_when_certified(self, chain4_path):
        inst, cfg, res = solve_instance(chain4_path)
        assert cfg.lambda_certified
        assert not res.bound_advisory
        assert res.bound_check
        for row in res.bound_check:
            assert row.observed < row.bound

    def test_monotone_trajectories_when_certified(self, chain4_path):
        inst, cfg, res = solve_instance(chain4_path)
        leq = inst.space.leq
        xs = [r.x for r in res.trace]
        ys = [r.y for r in res.trace]
        assert all(leq(a, b) for a, b in zip(xs, xs[1:]))
        assert all(leq(b, a) for a, b in zip(ys, ys[1:]))

    @given(st.integers(min_value=0, max_value=300))
    @settings(max_examples=30, deadline=None)
    def test_generated_instances_step_identity(self, seed):
        inst = generate_finite_instance(seed)
        cfg = SolveConfig(
            residual_tolerance=inst.params.tolerance,
            max_iterations=inst.params.max_iterations,
        )
        res = picard_solve(inst.cmap, inst.x0, inst.y0, cfg)
        for prev, cur in zip(res.trace, res.trace[1:]):
            assert cur.eta_step == prev.residual


class TestDecayReport:
    def test_chain4_streams_stay_below_ceiling(self, chain4_path):
        inst = load_instance(chain4_path)
        suite = run_hypothesis_suite(inst)
        cfg = build_config(inst, suite)
        fx = inst.cmap.apply(inst.x0, inst.y0)
        fy = inst.cmap.apply(inst.y0, inst.x0)
        rep = verify_decay_bound(
            inst.cmap,
            (inst.x0, inst.y0),
            (fx, fy),
            cfg,
            horizon=20,
            mixed_monotone=True,
            contraction=True,
        )
        assert rep.all_below_bound is True
        assert rep.uncertified == ()
        assert rep.rows[0].observed == 8.0  # d(0,0) + d(3,1)
        assert rep.final_observed == 0.0

    def test_uncertified_hypotheses_are_listed(self, chain4_path):
        inst = load_instance(chain4_path)
        cfg = SolveConfig(lam=0.5, epsilon=10.0, chain_n=1)
        fx = inst.cmap.apply(inst.x0, inst.y0)
        fy = inst.cmap.apply(inst.y0, inst.x0)
        rep = verify_decay_bound(
            inst.cmap, (inst.x0, inst.y0), (fx, fy), cfg, horizon=5
        )
        assert "mixed-monotone" in rep.uncertified
        assert "uniform-local-contraction" in rep.uncertified

    def test_no_bound_without_lambda(self, chain4_path):
        inst = load_instance(chain4_path)
        cfg = SolveConfig()  # no lam, epsilon, chain_n
        fx = inst.cmap.apply(inst.x0, inst.y0)
        fy = inst.cmap.apply(inst.y0, inst.x0)
        rep = verify_decay_bound(
            inst.cmap, (inst.x0, inst.y0), (fx, fy), cfg, horizon=5
        )
        assert rep.all_below_bound is None
        assert all(math.isnan(r.bound) for r in rep.rows)


class TestUniqueness:
    def test_comparable_fixed_pairs_distinct(self, f1_path):
        inst = load_instance(f1_path)
        cfg = SolveConfig(residual_tolerance=1e-9)
        verdict = uniqueness_probe(
            inst.cmap, (0, 1), (1, 0), config=cfg
        )
        assert verdict.verdict == "distinct"
        assert verdict.case == "directly-comparable"
        assert verdict.eta == 2.0

    def test_converged_pair_matches_exact_fixed_point(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        c = (3.0 / 7.0,)
        verdict = uniqueness_probe(
            inst.cmap, (res.x, res.y), (c, c),
            config=SolveConfig(residual_tolerance=cfg.residual_tolerance),
        )
        assert verdict.verdict == "same"

    def test_incomparable_pairs_without_witness_inconclusive(
        self, antichain2_path
    ):
        inst = load_instance(antichain2_path)
        cfg = SolveConfig(residual_tolerance=1e-9)
        verdict = uniqueness_probe(inst.cmap, (0, 0), (1, 1), config=cfg)
        assert verdict.verdict == "inconclusive"
        assert verdict.case == "no-witness"

    def test_witness_must_link_both_pairs(self, antichain2_path):
        inst = load_instance(antichain2_path)
        cfg = SolveConfig(residual_tolerance=1e-9)
        with pytest.raises(DomainError):
            uniqueness_probe(
                inst.cmap, (0, 0), (1, 1), witness=(0, 1), config=cfg
            )

    def test_rejects_nonfixed_input(self, f1_path):
        inst = load_instance(f1_path)
        cfg = SolveConfig(residual_tolerance=1e-9)
        with pytest.raises(DomainError):
            uniqueness_probe(inst.cmap, (2, 2), (0, 0), config=cfg)


class TestCollapse:
    def test_l1_collapses_on_comparable_seeds(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        verdict = collapse_check(
            res, "comparable-seeds", inst.space,
            x0=inst.x0, y0=inst.y0, pair_bounds=False,
            residual_tolerance=cfg.residual_tolerance,
        )
        assert verdict.verdict == "holds"
        assert verdict.gap <= 2e-10

    def test_f1_fixed_pair_does_not_collapse(self, f1_path):
        # contraction fails on f1, and the solve lands on (0, 1): gap 1
        inst, cfg, res = solve_instance(f1_path)
        verdict = collapse_check(
            res, "comparable-seeds", inst.space,
            x0=inst.x0, y0=inst.y0, pair_bounds=True,
            residual_tolerance=cfg.residual_tolerance,
        )
        assert verdict.verdict == "violated"
        assert verdict.gap == 1.0

    def test_not_applicable_without_pair_bounds(self, antichain2_path):
        inst, cfg, res = solve_instance(antichain2_path)
        verdict = collapse_check(
            res, "pair-bounds", inst.space,
            x0=inst.x0, y0=inst.y0, pair_bounds=False,
            residual_tolerance=cfg.residual_tolerance,
        )
        assert verdict.verdict == "not-applicable"

    def test_unknown_mode_rejected(self, l1_path):
        inst, cfg, res = solve_instance(l1_path)
        with pytest.raises(DomainError):
            collapse_check(
                res, "nonsense", inst.space,
                x0=inst.x0, y0=inst.y0, pair_bounds=False,
                residual_tolerance=1e-10,
            )
