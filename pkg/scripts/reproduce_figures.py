#!/usr/bin/env python3
"""Run the three headline experiments and drop their CSVs under results/.

Outputs:
  results/cdf/cdf_raw.csv, cdf_points.csv   sum-rate CDF, alpha in {1e-2, 1, 1e2}
  results/sweep_g/sweep_g.csv               sum rate vs region size, L = 15
  results/sweep_g_l3/sweep_g.csv            same sweep with L = 3
  results/sweep_l/sweep_l.csv               sum rate vs path count, G = 36

Trial counts are configurable; 500 matches the acceptance setup.
"""

import argparse
import tempfile
from pathlib import Path

from flexprecode import cli
from flexprecode.experiments import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/desk.cfg")
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    load_config(args.config)  # fail fast on a bad config
    out = Path(args.out)
    common = ["--config", args.config, "--trials", str(args.trials),
              "--workers", str(args.workers)]

    cli.main(["cdf", *common, "--out", str(out / "cdf")])
    cli.main(["sweep-g", *common, "--alpha", "1.0",
              "--values", "9,16,25,36,49,64,81,100", "--out", str(out / "sweep_g")])
    cli.main(["sweep-l", *common, "--alpha", "1.0",
              "--values", "3,6,9,12,15", "--out", str(out / "sweep_l")])

    # second region sweep with sparse channels (L = 3)
    base = Path(args.config).read_text(encoding="utf-8")
    lines = [ln for ln in base.splitlines() if not ln.strip().startswith("num_paths")]
    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as tmp:
        tmp.write("\n".join(lines) + "\nnum_paths = 3\n")
        sparse_cfg = tmp.name
    cli.main(["sweep-g", "--config", sparse_cfg, "--trials", str(args.trials),
              "--workers", str(args.workers), "--alpha", "1.0",
              "--values", "9,16,25,36,49,64,81,100", "--out", str(out / "sweep_g_l3")])


if __name__ == "__main__":
    main()
