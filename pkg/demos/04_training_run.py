"""
A short hierarchical training run
=================================

Train the toy semantic-communication autoencoder across the constellation,
compare with each gateway training alone, and write the report files.
Takes a minute or so on one CPU core.
"""

import sys
from leohfl.aggregation import AggregatorConfig
from leohfl.harness import default_scenario, emit_reports, run, run_single_gateway

rounds = int(sys.argv[1]) if len(sys.argv) > 1 else 15
sc = default_scenario(global_rounds=rounds, eval_snrs_db=(1.0, 5.0, 11.0))

# What each satellite holds after the skewed Dirichlet split
from leohfl.harness import build_workload
print("samples per satellite:", [len(s) for s in build_workload(sc).shards])

fedsel = run(sc)
fedavg = run(sc.with_overrides(aggregator=AggregatorConfig("fedavg")))
single = run_single_gateway(sc)

for m in fedsel.metrics[::5]:
    print(f"round {m.round:3d}  clock {m.clock_s:7.0f} s  loss {m.mean_loss:.4f}  "
          f"PSNR@5dB {m.global_psnr_db[5.0]:.2f}")

for r in [fedsel, fedavg, *single.values()]:
    print(f"{r.label:10s} final PSNR " +
          "  ".join(f"{s:g} dB: {r.final_psnr(s):.2f}" for s in sc.eval_snrs_db))

paths = emit_reports([fedsel, fedavg, *single.values()], "demo_results")
print("wrote", ", ".join(str(p) for p in paths.values()))
