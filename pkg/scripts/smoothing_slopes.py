"""Heat and Herz smoothing exponents: fitted log-log slopes against their targets."""
import argparse
import math
from pathlib import Path

import numpy as np

from herzlab import GridSpec, TLParams, build_dyadic_system
from herzlab.verify.checks import check_heat_smoothing, check_herz_smoothing
from herzlab.verify.families import random_band_weighted


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", default="out/smoothing")
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)

    g = GridSpec(1, 8 * math.pi, 8192)
    rep = check_heat_smoothing(
        random_band_weighted(g, 0.5, args.seed), 0.5, [0.5, 1.0], list(np.logspace(-4, -2, 8)),
        TLParams.make(2, 2, 0, 0.5, 2), build_dyadic_system(g),
    )
    rep.to_csv(out / "heat_smoothing.csv")
    rep.to_json(out / "heat_smoothing.json")
    print(rep.summary_line())

    g2 = GridSpec(1, 10.0, 2**16)
    for i, tup in enumerate([(4, 2, 0, 0), (2, 2, -0.25, 0.25), (2, 2, 0, 0)]):
        rep = check_herz_smoothing(g2, *tup)
        rep.to_csv(out / f"herz_smoothing_{i}.csv")
        print(rep.summary_line(), "target", rep.expected["slope"].target)


if __name__ == "__main__":
    main()
