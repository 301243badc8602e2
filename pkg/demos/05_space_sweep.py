# A full experiment: several algorithms over a space grid, CSV plus SVG.
# Run with: python demos/05_space_sweep.py [outdir]
import sys
from pathlib import Path

from layersketch import AlgoSpec, ExperimentPlan, ZipfSpec, run_experiment, summarize
from layersketch.plotting import emit_plot

out = Path(sys.argv[1] if len(sys.argv) > 1 else "sweep_out")
out.mkdir(exist_ok=True)

plan = ExperimentPlan(
    algorithms=[AlgoSpec("cm"), AlgoSpec("cs"), AlgoSpec("cs-nonneg"), AlgoSpec("practical"),
                AlgoSpec("learned-cs"), AlgoSpec("learned-layered")],
    spaces=[300, 1000, 3000],
    dataset=ZipfSpec(100_000, 100_000),
    trials=5,
)
reports = run_experiment(plan, out / "sweep.csv")
for (algo, space), (mean, std) in summarize(reports).items():
    print(f"{algo:>16} B={space:<5} {mean:10.1f} +- {std:.1f}")

emit_plot(out / "sweep.csv", "space", out / "sweep.svg")
print("wrote", out / "sweep.csv", "and", out / "sweep.svg")
# the same run from the shell:
#   layersketch run --n 100000 --algo cm --algo cs --space 300 --space 1000 --out sweep.csv
#   layersketch plot --csv sweep.csv --out sweep.svg
