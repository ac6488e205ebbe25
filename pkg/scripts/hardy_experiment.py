"""Worst-case Hardy constants over random sequences, including longer windows."""
import argparse
from pathlib import Path

from herzlab.verify.checks import check_hardy_sequences


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--output", default="out/hardy")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for tag, lengths in (("short", (8, 16, 32, 64)), ("long", (64, 128, 256, 512))):
        rep = check_hardy_sequences(lengths=lengths, trials=args.trials, seed=args.seed)
        rep.to_csv(out / f"hardy_{tag}.csv")
        rep.to_json(out / f"hardy_{tag}.json")
        print(tag, rep.summary_line())


if __name__ == "__main__":
    main()
