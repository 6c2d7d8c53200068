"""Attribute-paradox fraction as a function of the degree-attribute coupling.

For each target correlation, generate a heavy-tailed graph, measure the
achieved Pearson R and both paradox fractions, and write one CSV row.

    python3 scripts/sweep_degree_corr.py --n 20000 --targets=-0.1,0,0.1 --out sweep.csv
"""

import argparse
import csv
import sys

from paradoxlab.metrics import correlate_degree_attribute, paradox_fraction_attribute, paradox_fraction_degree
from paradoxlab.synth import ConfigurationModel, Mono, PreferentialAttachment, SynthSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--model", choices=["pa", "config"], default="pa")
    ap.add_argument("--targets", default="-0.2,-0.1,0,0.05,0.1,0.15,0.2,0.3")
    ap.add_argument("--homophily-rounds", type=int, default=0)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    degree_model = PreferentialAttachment(5) if args.model == "pa" else ConfigurationModel(2.5, 2)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["target", "seed", "pearson_r", "degree_paradox", "attribute_paradox"])
    for target in (float(t) for t in args.targets.split(",")):
        for seed in range(args.seeds):
            spec = SynthSpec(args.n, degree_model, Mono(0.0, 0.2), target, args.homophily_rounds, seed)
            g = generate(spec)
            w.writerow([
                target,
                seed,
                f"{correlate_degree_attribute(g).pearson_r:.4f}",
                f"{paradox_fraction_degree(g):.4f}",
                f"{paradox_fraction_attribute(g):.4f}",
            ])
            fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
