#!/usr/bin/env python3
"""Print the exact finite-size trend of a word's expected trace next to its
limit, optionally with a Monte Carlo column.

The word is given as JSON (inline or a file path), the same format the CLI
uses:
    {"k": 1, "letters": [{"sigma": [2,1], "eps": "1"},
                         {"sigma": [2,1], "eps": "*"}],
     "etas": [[1], [1]]}
"""

import argparse
import math

import numpy as np

from tensorflat.moments import word_phi
from tensorflat.perms import Permutation, embed_join
from tensorflat.tensors import phi_N, sample_tensor, word_eval
from tensorflat.traffic import full_trace_expect


def folded_letters(w):
    """Absorb the interleaved permutation operators into the flattenings so
    the plain expected-trace oracle applies."""
    ident = Permutation.identity(w.k)
    out = []
    for letter, mu in zip(w.letters, w.etas):
        if letter.eps == "1":
            out.append((embed_join(ident, mu.inverse()) * letter.sigma, "1"))
        else:
            out.append((embed_join(mu.inverse(), ident) * letter.sigma, "*"))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--word", required=True)
    ap.add_argument("--sizes", default="4,6,8,10")
    ap.add_argument("--model", default="complex_ginibre")
    ap.add_argument("--trials", type=int, default=0, help="0 disables Monte Carlo")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    from tensorflat.cli import load_word, parse_model

    w = load_word(args.word)
    model = parse_model(args.model)
    limit = complex(word_phi(w, model.c, model.c_prime))
    print(f"limit phi = {limit.real:+.8f}{limit.imag:+.8f}j")
    header = f"{'N':>5} {'exact':>22} {'|gap|':>12}"
    if args.trials:
        header += f" {'monte carlo':>22} {'3 SE':>10}"
    print(header)
    spec = [(le.sigma, le.eps, eta) for le, eta in zip(w.letters, w.etas)]
    word = folded_letters(w)
    for N in (int(s) for s in args.sizes.split(",")):
        exact = full_trace_expect(word, w.k, N, model)
        line = (
            f"{N:5d} {exact.real:+.8f}{exact.imag:+.8f}j {abs(exact - limit):12.3e}"
        )
        if args.trials:
            samples = np.array(
                [
                    phi_N(word_eval(sample_tensor(model, N, w.k, args.seed, t), spec).data)
                    for t in range(args.trials)
                ]
            )
            se = math.hypot(
                samples.real.std(ddof=1), samples.imag.std(ddof=1)
            ) / math.sqrt(args.trials)
            mean = samples.mean()
            line += f" {mean.real:+.8f}{mean.imag:+.8f}j {3 * se:10.3e}"
        print(line)


if __name__ == "__main__":
    main()
