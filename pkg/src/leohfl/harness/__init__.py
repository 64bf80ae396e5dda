from .engine import (RoundMetrics, RunResult, ScheduleStats, Simulation, SubroundRecord, Workload,
                     build_workload, evaluate, run, run_single_gateway, sample_energy,
                     schedule_only, schedule_statistics)
from .scenario import (DataConfig, OrbitSpec, Scenario, bundled_scenario, default_scenario,
                       load_scenario, reference_gateways, reference_orbits, save_scenario,
                       scenario_from_dict, scenario_to_dict)
from .reports import emit_reports, metrics_table, read_table, summary_table
