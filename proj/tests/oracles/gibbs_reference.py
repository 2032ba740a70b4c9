#!/usr/bin/env python3
"""Naive collapsed Gibbs reference for LDA.

Recomputes every count from the full assignment vector for each token, so it
shares nothing with the incremental bookkeeping in the C++ sampler. The only
shared contract is the random stream: MT19937 seeded with init_genrand(seed)
and 53-bit doubles built from two 32-bit draws, which is what
numpy.random.RandomState.random_sample produces.

Prints the topic assignments after initialisation and after each sweep.
"""
import json
import sys

import numpy as np


def run(docs, V, K, alpha, beta, seed, sweeps):
    rng = np.random.RandomState(seed)
    z = []
    for doc in docs:
        row = []
        for _ in doc:
            row.append(min(K - 1, int(rng.random_sample() * K)))
        z.append(row)
    trace = [[list(r) for r in z]]
    for _ in range(sweeps):
        for d, doc in enumerate(docs):
            for i, w in enumerate(doc):
                weights = []
                for k in range(K):
                    ndk = sum(1 for j, t in enumerate(z[d]) if j != i and t == k)
                    nkw = 0
                    nk = 0
                    for dd, ddoc in enumerate(docs):
                        for jj, ww in enumerate(ddoc):
                            if dd == d and jj == i:
                                continue
                            if z[dd][jj] == k:
                                nk += 1
                                if ww == w:
                                    nkw += 1
                    weights.append((ndk + alpha) * (nkw + beta) / (nk + V * beta))
                total = 0.0
                cumulative = []
                for p in weights:
                    total += p
                    cumulative.append(total)
                u = rng.random_sample() * total
                chosen = K - 1
                for k, c in enumerate(cumulative):
                    if c > u:
                        chosen = k
                        break
                z[d][i] = chosen
        trace.append([list(r) for r in z])
    return trace


CASES = {
    "toy3": dict(docs=[[0, 1, 2, 0], [2, 3, 3], [1, 4, 0, 4, 2]],
                 V=5, K=2, alpha=0.5, beta=0.1, seed=12345, sweeps=1),
    "small45": dict(docs=[[0, 1, 2, 3, 0, 1, 2, 3, 0],
                          [4, 5, 6, 7, 4, 5, 6, 7, 4],
                          [0, 4, 1, 5, 2, 6, 3, 7, 0],
                          [0, 0, 1, 1, 2, 2, 3, 3, 4],
                          [7, 7, 6, 6, 5, 5, 4, 4, 3]],
                    V=8, K=3, alpha=0.2, beta=0.01, seed=7, sweeps=2),
}

if __name__ == "__main__":
    names = sys.argv[1:] or sorted(CASES)
    for name in names:
        print(name, json.dumps(run(**CASES[name])))
