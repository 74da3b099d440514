import io
import json
import math

import numpy as np
import pytest

from mugroup.bench import (
    CSV_HEADER,
    DEFAULT_T_SU,
    ExperimentConfig,
    Scenario,
    build_schedule,
    run_experiment,
    run_runtime_comparison,
    slot_rotation,
    system_throughput,
    write_csv,
)
from mugroup.errors import ConfigurationError
from mugroup.grouping import GroupingSolution, enumerate_partitions, objective

from conftest import FixtureOracle, random_oracle


class TestSchedule:
    def test_six_station_rotation(self):
        sol = GroupingSolution(((0,), (1, 2), (3, 4, 5)), 6)
        sched = build_schedule(sol, t_su=DEFAULT_T_SU)
        rotations = [slot_rotation(s) for s in sched.slots]
        assert rotations == [
            (0,), (1, 2), (2, 1), (3, 4, 5), (4, 5, 3), (5, 3, 4)]

    def test_all_single_users(self):
        sol = GroupingSolution(((0,), (1,), (2,)), 3)
        sched = build_schedule(sol)
        assert len(sched.slots) == 3
        assert [s.primary_user for s in sched.slots] == [0, 1, 2]

    def test_group_air_time_scales_with_size(self):
        sol = GroupingSolution(((0, 1, 2),), 3)
        sched = build_schedule(sol, t_su=2.0)
        assert len(sched.slots) == 3
        assert sum(s.duration for s in sched.slots) == 3 * 2.0

    def test_each_user_primary_exactly_once(self):
        sol = GroupingSolution(((0, 3), (1, 2, 4), (5,)), 6)
        sched = build_schedule(sol)
        primaries = sorted(s.primary_user for s in sched.slots)
        assert primaries == list(range(6))
        for group in sol.groups:
            air = sum(s.duration for s in sched.slots if s.group == group)
            assert air == pytest.approx(len(group) * sched.t_su)


class TestSystemThroughput:
    def test_definition(self):
        oracle = FixtureOracle({(0,): 2.0, (1, 2): 3.0}, num_users=3)
        sol = GroupingSolution(((0,), (1, 2)), 3)
        assert system_throughput(sol, oracle) == pytest.approx(8.0 / 3.0)

    def test_all_single_equal_rates(self):
        oracle = FixtureOracle({(0,): 5.0, (1,): 5.0}, num_users=2)
        sol = GroupingSolution(((0,), (1,)), 2)
        assert system_throughput(sol, oracle) == 5.0

    def test_argmax_matches_objective_argmax(self):
        rng = np.random.default_rng(0)
        oracle = random_oracle(rng, 5, 2)
        parts = list(enumerate_partitions(5, 2))
        by_tput = max(parts, key=lambda p: system_throughput(
            GroupingSolution(p, 5), oracle))
        by_obj = max(parts, key=lambda p: objective(p, oracle))
        assert by_tput == by_obj


def small_config(**overrides):
    base = dict(
        scenario=Scenario.USER_SWEEP,
        m_values=(5,),
        nu_values=(2,),
        algorithms=("full_search", "blossom", "gma", "zfs", "sus", "random"),
        seeds=(0, 1, 2),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRunExperiment:
    def test_rows_are_well_formed(self):
        rows = run_experiment(small_config())
        assert len(rows) == 6
        by_alg = {r.algorithm: r for r in rows}
        assert by_alg["full_search"].ratio_to_opt == pytest.approx(1.0)
        for r in rows:
            assert r.seed_count == 3
            assert r.ratio_to_opt <= 1.0 + 1e-9
            assert r.p10_mbps <= r.mean_mbps <= r.p90_mbps + 1e-9

    def test_pairing_solver_matches_full_search_at_cap_two(self):
        rows = run_experiment(small_config(m_values=(4, 6)))
        for m in (4, 6):
            at_m = {r.algorithm: r for r in rows if r.m == m}
            assert at_m["blossom"].mean_mbps == at_m["full_search"].mean_mbps
            assert at_m["blossom"].ratio_to_opt == pytest.approx(1.0)

    def test_rho_sweep_grid(self):
        cfg = small_config(scenario=Scenario.RHO_SWEEP,
                           m_values=(6,), nu_values=(3,),
                           rho_values=(0.0, 0.5, 1.0),
                           correlated_users=3,
                           algorithms=("full_search", "random"),
                           seeds=(0, 1))
        rows = run_experiment(cfg)
        assert len(rows) == 6
        assert sorted({r.rho for r in rows}) == [0.0, 0.5, 1.0]

    def test_csv_deterministic_except_runtime(self):
        cfg = small_config(seeds=(3, 4))
        buf_a, buf_b = io.StringIO(), io.StringIO()
        write_csv(run_experiment(cfg), buf_a)
        write_csv(run_experiment(cfg), buf_b)

        def strip_runtime(text):
            return [line.rsplit(",", 1)[0] for line in text.splitlines()]

        assert strip_runtime(buf_a.getvalue()) == strip_runtime(buf_b.getvalue())
        assert buf_a.getvalue().splitlines()[0] == CSV_HEADER

    def test_channel_file_source(self, tmp_path):
        from mugroup.channel import CorrelatedRicianSpec, generate_rician, write_channels

        path = tmp_path / "chan.txt"
        write_channels(generate_rician(CorrelatedRicianSpec(
            num_users=8, num_tx_antennas=4, seed=5)), path)
        cfg = small_config(channel_file=str(path), m_values=(5,),
                           algorithms=("gma", "random"))
        rows = run_experiment(cfg)
        assert {r.algorithm for r in rows} == {"gma", "random"}
        assert all(math.isnan(r.ratio_to_opt) for r in rows)


class TestConfigValidation:
    def test_empty_seeds(self):
        with pytest.raises(ConfigurationError):
            small_config(seeds=()).validate()

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigurationError):
            small_config(algorithms=("gma", "simulated_annealing")).validate()

    def test_nu_above_antennas(self):
        with pytest.raises(ConfigurationError):
            small_config(nu_values=(5,)).validate()

    def test_missing_channel_file(self):
        with pytest.raises(ConfigurationError):
            small_config(channel_file="/nonexistent/chan.txt").validate()

    def test_cap_blocks_full_search_upfront(self):
        with pytest.raises(ConfigurationError):
            small_config(m_values=(14,), nu_values=(3,), num_tx_antennas=4,
                         partition_cap=10_000).validate()

    def test_from_json_round_trip(self, tmp_path):
        raw = {
            "scenario": "rho_sweep",
            "m_values": [6],
            "nu_values": [3],
            "rho_values": [0.0, 0.5],
            "correlated_users": 3,
            "channel": {"num_tx_antennas": 4, "k_factor_db": 0.0},
            "phy": {"total_power": 50.0, "rate_mode": "shannon"},
            "algorithms": ["gma", "random"],
            "seeds": [0, 1],
            "output": "out.csv",
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(raw))
        cfg = ExperimentConfig.from_json(path)
        assert cfg.scenario is Scenario.RHO_SWEEP
        assert cfg.rho_values == (0.0, 0.5)
        assert cfg.phy.total_power == 50.0
        assert cfg.output == "out.csv"

    def test_from_json_bad_scenario(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_json(json.dumps({"scenario": "bogus"}))


@pytest.fixture(scope="module")
def rows():
    cfg = ExperimentConfig(
        scenario=Scenario.RUNTIME_SWEEP,
        m_values=(6,),
        nu_values=(3,),
        algorithms=("full_search", "gma", "random"),
        seeds=(0, 1),
    )
    return run_runtime_comparison(cfg)


class TestRuntimeComparison:
    def test_random_is_zero_db(self, rows):
        random_row = next(r for r in rows if r.algorithm == "random")
        assert random_row.runtime_db_vs_random == pytest.approx(0.0)

    def test_other_algorithms_have_finite_db(self, rows):
        for r in rows:
            if not r.skipped:
                assert math.isfinite(r.runtime_db_vs_random)

    def test_full_search_skip_marker_above_cap(self):
        cfg = ExperimentConfig(
            scenario=Scenario.RUNTIME_SWEEP,
            m_values=(9,),
            nu_values=(3,),
            algorithms=("full_search", "random"),
            seeds=(0,),
            partition_cap=100,
        )
        rows = run_runtime_comparison(cfg)
        full = next(r for r in rows if r.algorithm == "full_search")
        assert full.skipped
        assert math.isnan(full.runtime_ms)
        buf = io.StringIO()
        write_csv(rows, buf)
        line = next(l for l in buf.getvalue().splitlines() if "full_search" in l)
        assert line.endswith(",")  # empty runtime cell marks the skip

    def test_wrong_scenario_rejected(self):
        with pytest.raises(ConfigurationError):
            run_runtime_comparison(small_config())
