#!/usr/bin/env python3
"""Straight-line scalar walk through the whole classifier pipeline at its
smallest size: 2 sensors, 4 timesteps, one causal conv kernel (k=2), one
recurrent unit, direct 2-class head. Every number is written out so the
C++ path can be checked end to end against plain arithmetic."""
import math


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def main():
    x = [[0.5, -1.0], [1.5, 0.25], [-0.75, 2.0], [0.0, 1.0]]

    # conv: K[n][j], one kernel, k=2, bias 0.1
    K = [[0.8, -0.3], [0.5, 0.7]]
    kb = 0.1
    seq = []
    for t in range(4):
        acc = kb
        for n in range(2):
            for j in range(2):
                if t - j >= 0:
                    acc += K[n][j] * x[t - j][n]
        seq.append(max(0.0, acc))
    print("conv_seq", [repr(v) for v in seq])

    # recurrent unit: weights [w_in, w_hidden]
    wr, br = [0.4, -0.6], 0.05
    wu, bu = [-0.3, 0.2], -0.1
    wc, bc = [0.9, 0.5], 0.0
    h = 0.0
    for y in seq:
        r = sigmoid(wr[0] * y + wr[1] * h + br)
        u = sigmoid(wu[0] * y + wu[1] * h + bu)
        c = math.tanh(wc[0] * y + wc[1] * (r * h) + bc)
        h = u * h + (1.0 - u) * c
    print("h_last", repr(h))

    # direct head: logits = h * W + b, then softmax
    W = [1.2, -0.8]
    b = [-0.05, 0.15]
    z = [h * W[k] + b[k] for k in range(2)]
    m = max(z)
    e = [math.exp(v - m) for v in z]
    s = sum(e)
    probs = [v / s for v in e]
    print("probs", [repr(p) for p in probs])


if __name__ == "__main__":
    main()
