"""Monte Carlo regime statistics and SVG rendering of bundled fixtures.

Run:  python demos/simulation_and_rendering.py
Outputs land in demos/out/.
"""

import pathlib

from scert import ExperimentConfig, run_experiment, summarize
from scert.cli import CSV_HEADER, load_fixture, record_to_csv_row
from scert.certificates import s_certificate
from scert.ensemble import ensemble_classifier
from scert.render import render_svg

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

print("== random-simplex ensembles (reduced draw count for the demo) ==")
config = ExperimentConfig(k=4, member_counts=(2, 3, 4), draws=200, seed=7)
records = run_experiment(config)
summary = summarize(records)
print(f"draws: {summary.n_records}")
print(f"gap regimes under uniform weights: gain {summary.fraction_gain:.3f}, "
      f"inconclusive {summary.fraction_inconclusive:.3f}, "
      f"loss {summary.fraction_loss:.3f}")
print(f"fraction beating the best member with tuned weights: "
      f"{summary.fraction_optimized_above_best:.3f}")
print(f"gap-bound violations: {summary.bound_violations}")

csv_path = OUT / "simulation.csv"
csv_path.write_text(
    "\n".join([CSV_HEADER] + [record_to_csv_row(r) for r in records]) + "\n")
print(f"wrote {csv_path}")

print("\n== rendering fixture certificates ==")
for name in ("appendix-c3-cw.json", "fig6.json"):
    problem = load_fixture(name)
    layers = []
    if problem.is_ensemble:
        spec = problem.to_ensemble()
        mode = spec.members[0].smoothness.mode
        for j, m in enumerate(spec.members):
            layers.append((f"member-{j}", s_certificate(m, mode)))
        layers.append(("ensemble", s_certificate(ensemble_classifier(spec), mode)))
    else:
        m = problem.classifier()
        layers.append(("certificate", s_certificate(m, m.smoothness.mode)))
    svg_path = OUT / (name.replace(".json", ".svg"))
    svg_path.write_text(render_svg(layers, problem.window))
    print(f"wrote {svg_path}")
