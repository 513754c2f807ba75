"""
Parameter sweeps and seed averaging
===================================

Sweeps rerun one scenario with a single field stepped across a value list,
every value for every seed. Per-value results are combined with the
arithmetic mean and one summary row per value lands in sweep_summary.csv.

The shell equivalent (including the shipped experiment presets)::

    sim sweep --config grid.conf --axis saw.copies --values 2,4,8 --seeds 1,2
    sim sweep --config grid.conf --preset bandwidth
    sim presets list
"""

from importlib import resources
from pathlib import Path

from dtnsim import harness

config_path = Path(str(resources.files("dtnsim"))) / "data" / "scenarios" / "grid.conf"
base = harness.load_scenario(config_path)

# keep the demo quick: two copy budgets, two seeds
spec = harness.SweepSpec(axis="saw.copies", values=("2", "8"), base=base, seeds=(1, 2))
result = harness.run_sweep(spec, Path("demo_out/sweep"))

print(f"swept {spec.axis} over {[row.value for row in result.rows]} "
      f"x seeds {spec.effective_seeds()}")
for row in result.rows:
    s = row.stats
    print(f"  {spec.axis}={row.value}: relayed={s.relayed:.1f} "
          f"delivered={s.delivered:.1f} delivery_prob={s.delivery_prob:.3f}")

summary = result.out_dir / "sweep_summary.csv"
print(f"\nsummary at {summary}:")
print(summary.read_text())

print("shipped experiment presets:")
for preset in harness.list_presets():
    print(f"  {preset.name}: {preset.axis} = {', '.join(preset.values)}")

print("\nfigures: feed one or more sweep_summary.csv files to the companion")
print("plotting tool, e.g.")
print(f"  simplot --metric delivery_prob --out deliveries.png {summary}")
