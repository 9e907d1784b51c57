"""Independent reference values for the acceptance fixtures.

Reimplements the generators (SplitMix64-seeded xoshiro256++, exact
fractional parts via Fraction, radical inverse) and the statistics with
numpy, without using any of the Rust code. Prints the values that the
acceptance suite freezes.
"""

from fractions import Fraction
import math

import numpy as np

MASK = (1 << 64) - 1


def splitmix64(state):
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK


def uniform(seed, n):
    sm = splitmix64(seed)
    s = [next(sm) for _ in range(4)]
    out = np.empty(n)
    for i in range(n):
        result = (rotl((s[0] + s[3]) & MASK, 23) + s[0]) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        out[i] = (result >> 11) * 2.0**-53
    return out


def kronecker(alpha, n):
    a = Fraction(alpha)
    out = np.empty(n)
    for i in range(1, n + 1):
        p = a * i
        out[i - 1] = float(p - math.floor(p))
    return out


def vdc(base, n):
    out = np.empty(n)
    for i in range(1, n + 1):
        rev, den, m = 0, 1, i
        while m:
            rev = rev * base + m % base
            den *= base
            m //= base
        out[i - 1] = float(Fraction(rev, den))
    return out


def pair_counts(x, s_max):
    """Ordered-pair counts #{l != m : ||x_l - x_m|| < s/N} for s = 1..s_max."""
    n = len(x)
    xs = np.sort(x)
    thr = np.arange(1, s_max + 1) / n
    t_max = thr[-1]
    # hist[j] counts unordered pairs whose distance first falls below thr[j]
    hist = np.zeros(s_max + 1, dtype=np.int64)

    def add(w):
        hist[:] += np.bincount(np.searchsorted(thr, w, side="right"), minlength=s_max + 1)

    d = 1
    while d < n:
        a = xs[d:] - xs[:-d]
        keep = a < t_max
        if not keep.any():
            break
        add(a[keep])
        d += 1
    near_last = d
    d = n - 1
    while d >= near_last and d >= 1:
        w = 1.0 - (xs[d:] - xs[:-d])
        keep = w < t_max
        if not keep.any():
            break
        add(w[keep])
        d -= 1
    return 2 * np.cumsum(hist[:s_max])


def f_value(counts, n, s):
    c = counts[:s]
    return float(np.max(np.abs(c / (2.0 * np.arange(1, s + 1)) - n)))


def d_star(x):
    xs = np.sort(x)
    n = len(xs)
    i = np.arange(1, n + 1, dtype=float)
    best = max(float(np.max(xs - (i - 1.0) / n)), float(np.max(i / n - xs)))
    return best, n * best


def k_upper(n):
    k = 0
    while (k + 1) ** 5 <= n * n:
        k += 1
    return k


def select_k(x):
    n = len(x)
    top = k_upper(n)
    cap = min(top, next(k for k in range(1, top + 1) if (2 * k) ** 5 >= n * n))
    counts = pair_counts(x, cap * cap)
    for k in range(1, top + 1):
        f = f_value(counts, n, k * k)
        if (2 * k) ** 5 >= n * n or (f > 0 and n / f <= k):
            return k, f
    raise SystemExit("no feasible K")


def bound(x):
    n = len(x)
    k, f = select_k(x)
    h = 5.0 * max(n**0.8, math.sqrt(n * f))
    ds, nds = d_star(x)
    return k, f, h, ds, nds


def main():
    u = uniform(42, 100_000)
    print("uniform seed 42 first values", [float(v) for v in u[:3]])
    c = pair_counts(u, 10)
    print("uniform 1e5 counts s=1..10", list(map(int, c)))
    print("  max |R/2s - 1|", max(abs(c[s - 1] / (2.0 * s * 100_000) - 1.0) for s in range(1, 11)))

    golden = (math.sqrt(5.0) - 1.0) / 2.0
    for n in (1000, 10_000, 100_000):
        x = kronecker(golden, n)
        c = pair_counts(x, 8)
        dev = max(abs(c[s - 1] / (2.0 * s * n) - 1.0) for s in range(1, 9))
        print(f"kronecker N={n} counts", list(map(int, c)), f"max dev {dev!r}")

    for name, x in (("uniform42 1e5", u), ("vdc2 2^16", vdc(2, 1 << 16))):
        k, f, h, ds, nds = bound(x)
        print(f"bound {name}: k={k} f={f!r} h={h!r} d_star={ds!r} n_d_star={nds!r}")

    for n in (1000, 10_000, 100_000, 1_000_000):
        ds, _ = d_star(u if n == 100_000 else uniform(42, n))
        print(f"d_star uniform42 N={n}: {ds!r}")


if __name__ == "__main__":
    main()
