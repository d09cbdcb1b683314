"""Run the property suite for several seeds and write one JSON report per seed.

    python3 scripts/run_suite.py --seeds 0 1 2 --out reports/
"""

import argparse
from pathlib import Path

from qhamming import suite
from qhamming.config import RunConfig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--out", type=Path, default=Path("reports"))
    ap.add_argument("--dim-cap", type=int, default=4096)
    args = ap.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for seed in args.seeds:
        config = RunConfig(seed=seed, dim_cap=args.dim_cap)
        results = suite.run_suite(config)
        (args.out / f"suite_seed{seed}.json").write_text(suite.report_json(results, config) + "\n")
        bad = [r.name for r in results if not r.ok]
        failed += bool(bad)
        print(f"seed {seed}: {'all pass' if not bad else 'FAIL ' + ', '.join(bad)}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
