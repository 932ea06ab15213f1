"""Independent numpy reference for the sketch-and-solve relative-residual means.

Estimates the population mean relative residual per (input family, multiplier,
h) by averaging over several independent problem instances and many
multipliers. The acceptance suite freezes these numbers as regression targets.

    python3 reference_means.py --m 4096 --d 50 --instances 8 --trials 100
"""
import argparse
import json

import numpy as np

H8 = np.array([[1.0]])
for _ in range(3):
    H8 = np.block([[H8, H8], [H8, -H8]])


def illcond(rng, m, d):
    sig = np.array([10.0 ** (5 - j) if j <= 14 else 1e-10 for j in range(1, d + 1)])
    u, _ = np.linalg.qr(rng.standard_normal((m, d)))
    v, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return (u * sig) @ v.T


def rhs(rng, a):
    d, m = a.shape[1], a.shape[0]
    aw = a @ rng.standard_normal(d)
    v = rng.standard_normal(m)
    return aw / np.linalg.norm(aw) + 0.001 * v / np.linalg.norm(v)


def lsq(a, b):
    q, r = np.linalg.qr(a)
    return np.linalg.solve(r, q.T @ b)


def sketch(rng, kind, s, mm):
    m = mm.shape[0]
    if kind == "gaussian":
        return (rng.standard_normal((s, m)) / np.sqrt(s)) @ mm
    if kind == "perm":
        return mm[rng.permutation(m)[:s]]
    if kind == "block-perm":
        mp = -(-m // s) * s
        pi = rng.permutation(mp)[:m]
        out = np.zeros((s, mm.shape[1]))
        np.add.at(out, pi % s, mm)
        return out / np.sqrt(mp // s)
    if kind == "asph":
        mp = -(-m // 8) * 8
        k = mp // 8
        padded = np.zeros((mp, mm.shape[1]))
        padded[:m] = mm
        signs = rng.choice([-1.0, 1.0], size=mp)
        blocks = (padded * signs[:, None]).reshape(8, k, -1)
        full = np.einsum("ab,bkc->akc", H8, blocks).reshape(mp, -1)
        return full[rng.permutation(mp)[:s]] / np.sqrt(8.0)
    raise ValueError(kind)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--m", type=int, default=4096)
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--instances", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=20240607)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    kinds = ["gaussian", "perm", "block-perm", "asph"]
    out = {}
    for family in ["gaussian", "illcond"]:
        acc = {(k, h): [] for k in kinds for h in range(2, 7)}
        for _ in range(args.instances):
            if family == "gaussian":
                a = rng.standard_normal((args.m, args.d))
            else:
                a = illcond(rng, args.m, args.d)
            b = rhs(rng, a)
            r0 = np.linalg.norm(a @ lsq(a, b) - b)
            mm = np.column_stack([a, b])
            for k in kinds:
                for h in range(2, 7):
                    s = args.d * h
                    for _ in range(args.trials):
                        fm = sketch(rng, k, s, mm)
                        x = lsq(fm[:, :-1], fm[:, -1])
                        acc[(k, h)].append(np.linalg.norm(a @ x - b) / r0)
        for (k, h), v in acc.items():
            v = np.array(v)
            out[f"{family},{k},{h}"] = {
                "mean": float(v.mean()),
                "std": float(v.std(ddof=1)),
                "sem": float(v.std(ddof=1) / np.sqrt(len(v))),
            }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
