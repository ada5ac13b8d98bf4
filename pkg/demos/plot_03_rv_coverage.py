"""
Coverage of realized volatility intervals
=========================================

Monte Carlo coverage of the symmetric bootstrap interval for realized
volatility. The target is the exact finite-T mean of RV. A reduced
replication count keeps the run short; raise ``N`` and ``B`` for the full grid.
"""

from lbblab.harness import ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    experiment="rv_coverage",
    T_list=(1000,),
    L_list=(2, 3, 4),
    TD_list=(25, 50, 100),
    N=100,
    B=200,
    threads=4,
)
report = run_experiment(cfg)

print(f"nominal level {report.level}")
for r in report.rows:
    print(f"T={r.T} L={r.L} TD={r.TD:>3}  coverage={r.coverage:.3f} +- {r.mc_stderr:.3f}")
