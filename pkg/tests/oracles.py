"""Independent brute-force oracles shared by the test modules.

Everything here is deliberately written the slow, definitional way (scalar
loops, quadrature, exhaustive enumeration) and never reuses library code
paths beyond basic containers, so a library bug cannot hide in its own
oracle.
"""

import math

import numpy as np


def scalar_euclidean(a, b):
    acc = 0.0
    for x, y in zip(a, b):
        acc += (x - y) * (x - y)
    return math.sqrt(acc)


def adaptive_simpson(f, a, b, tol=1e-12, depth=60):
    """Classic recursive adaptive Simpson quadrature."""

    def simpson(lo, hi):
        mid = 0.5 * (lo + hi)
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi)), mid

    def recurse(lo, hi, whole, d):
        left, lm = simpson(lo, 0.5 * (lo + hi))
        right, rm = simpson(0.5 * (lo + hi), hi)
        if d <= 0 or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, 0.5 * (lo + hi), left, d - 1) + recurse(
            0.5 * (lo + hi), hi, right, d - 1
        )

    whole, _ = simpson(a, b)
    return recurse(a, b, whole, depth)


def beta_cdf_quadrature(a, b, x, tol=1e-13):
    """I_x(a, b) by integrating the Beta density directly."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_norm = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)

    def dens(u):
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return math.exp(ln_norm + (a - 1.0) * math.log(u) + (b - 1.0) * math.log1p(-u))

    return adaptive_simpson(dens, 0.0, x, tol=tol)


def f_survival_quadrature(f_stat, d1, d2):
    """P(F > f) via the Beta-density quadrature oracle."""
    x = d2 / (d2 + d1 * f_stat)
    return beta_cdf_quadrature(d2 / 2.0, d1 / 2.0, x)


def t_two_sided_quadrature(t, df):
    x = df / (df + t * t)
    return beta_cdf_quadrature(df / 2.0, 0.5, x)


def pearson_r(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x - x.mean(), y - y.mean()
    denom = math.sqrt(float((xm * xm).sum()) * float((ym * ym).sum()))
    if denom == 0.0:
        return 0.0
    return float((xm * ym).sum()) / denom


def interval_membership(ts, intervals):
    """Linear per-row, per-interval scan."""
    out = np.zeros(len(ts), dtype=np.int64)
    for i, t in enumerate(ts):
        for s, e in intervals:
            if s <= t < e:
                out[i] = 1
                break
    return out


def pair_counts(a, b):
    """Count agreeing/disagreeing pairs between two labelings by explicit
    O(n^2) enumeration."""
    n = len(a)
    n11 = n10 = n01 = n00 = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_a = a[i] == a[j]
            same_b = b[i] == b[j]
            if same_a and same_b:
                n11 += 1
            elif same_a:
                n10 += 1
            elif same_b:
                n01 += 1
            else:
                n00 += 1
    return n11, n10, n01, n00


def ari_bruteforce(a, b):
    """ARI from explicit pair enumeration plus the contingency adjustment."""
    n = len(a)
    from collections import Counter

    nij = Counter(zip(a, b))
    ai = Counter(a)
    bj = Counter(b)

    def c2(x):
        return x * (x - 1) / 2.0

    index = sum(c2(v) for v in nij.values())
    sum_a = sum(c2(v) for v in ai.values())
    sum_b = sum(c2(v) for v in bj.values())
    total = c2(n)
    expected = sum_a * sum_b / total if total else 0.0
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0
    return (index - expected) / (maximum - expected)


def nmi_bruteforce(a, b, average="mean"):
    """Plug-in MI / normalized entropies from an explicit joint histogram."""
    from collections import Counter

    n = len(a)
    nij = Counter(zip(a, b))
    ai = Counter(a)
    bj = Counter(b)
    mi = 0.0
    for (u, v), c in nij.items():
        p = c / n
        mi += p * math.log(p * n * n / (ai[u] * bj[v]))
    ha = -sum((c / n) * math.log(c / n) for c in ai.values())
    hb = -sum((c / n) * math.log(c / n) for c in bj.values())
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if mi <= 0.0:
        return 0.0
    if average == "mean":
        denom = 0.5 * (ha + hb)
    elif average == "min":
        denom = min(ha, hb)
    elif average == "max":
        denom = max(ha, hb)
    else:
        denom = math.sqrt(ha * hb)
    return mi / denom if denom > 0 else 0.0


def silhouette_bruteforce(X, labels):
    """Definitional silhouette, noise (-1) excluded entirely. The scalar
    distance matrix is built once; the per-point means stay definitional."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    keep = labels >= 0
    X = X[keep]
    labels = labels[keep]
    clusters = sorted(set(labels.tolist()))
    if len(clusters) < 2:
        raise ValueError("need >= 2 clusters")
    n = len(X)
    D = [[scalar_euclidean(X[i], X[j]) for j in range(n)] for i in range(n)]
    scores = []
    for i in range(n):
        own = labels[i]
        own_size = int((labels == own).sum())
        if own_size <= 1:
            scores.append(0.0)
            continue
        a = float(np.mean([D[i][j] for j in range(n) if j != i and labels[j] == own]))
        b = math.inf
        for c in clusters:
            if c == own:
                continue
            b = min(b, float(np.mean([D[i][j] for j in range(n) if labels[j] == c])))
        denom = max(a, b)
        scores.append(0.0 if denom == 0.0 else (b - a) / denom)
    return float(np.mean(scores))


def dbscan_bruteforce(X, eps, min_pts):
    """Naive reference DBSCAN: explicit neighborhoods, index-ordered seed
    scan, FIFO expansion. Matches the standard core/border/noise semantics
    with border points claimed by the first cluster that reaches them."""
    X = np.asarray(X, dtype=float)
    n = len(X)
    neigh = []
    for i in range(n):
        d = np.sqrt(((X - X[i]) ** 2).sum(axis=1))
        neigh.append([j for j in range(n) if d[j] <= eps])
    core = [len(neigh[i]) >= min_pts for i in range(n)]
    labels = np.full(n, -1, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        queue = [i]
        while queue:
            p = queue.pop(0)
            for q in neigh[p]:
                if labels[q] == -1:
                    labels[q] = cluster
                    if core[q]:
                        queue.append(q)
        cluster += 1
    return labels, np.asarray(core, dtype=bool)


def mst_weight_kruskal(W):
    """Total MST weight of a dense symmetric weight matrix, by Kruskal."""
    n = W.shape[0]
    edges = sorted(
        (W[i, j], i, j) for i in range(n) for j in range(i + 1, n)
    )
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = 0.0
    used = 0
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += w
            used += 1
            if used == n - 1:
                break
    return total


def partitions_equal(a, b):
    """True when two labelings induce the same partition (up to renaming)."""
    a = np.asarray(a)
    b = np.asarray(b)
    fwd = {}
    bwd = {}
    for x, y in zip(a.tolist(), b.tolist()):
        if fwd.setdefault(x, y) != y:
            return False
        if bwd.setdefault(y, x) != x:
            return False
    return True
