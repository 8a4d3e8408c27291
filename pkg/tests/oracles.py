"""Independent brute-force oracles used only by the test suite.

Everything here is deliberately naive: double loops, full boundary matrices,
exhaustive enumeration. The library must agree with these on small inputs.
"""

import itertools
import math

import numpy as np


def double_loop_distances(points):
    n = len(points)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for a, b in zip(points[i], points[j]):
                s += (a - b) ** 2
            out[i, j] = math.sqrt(s)
    return out


def brute_force_simplices(D, max_dim, cap=None):
    """Every vertex subset of size <= max_dim+1 with diameter <= cap,
    as (verts, dim, diam) sorted in filtration order."""
    n = D.shape[0]
    if cap is None:
        cap = float(D.max())
    out = []
    for k in range(max_dim + 1):
        for comb in itertools.combinations(range(n), k + 1):
            diam = max((D[a][b] for a, b in itertools.combinations(comb, 2)), default=0.0)
            if diam <= cap:
                out.append((tuple(comb), k, float(diam)))
    out.sort(key=lambda t: (t[2], t[1], t[0]))
    return out


def gf2_rank(M):
    """Rank over the two-element field by Gaussian elimination."""
    M = np.array(M, dtype=bool)
    if M.size == 0:
        return 0
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivots = np.nonzero(M[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        if p != r:
            M[[r, p]] = M[[p, r]]
        below = np.nonzero(M[r + 1:, c])[0] + r + 1
        M[below] ^= M[r]
        r += 1
    return r


def boundary_matrix(lo, hi):
    """F2 boundary of the hi simplices over the lo simplices (vertex tuples)."""
    index = {s: i for i, s in enumerate(lo)}
    M = np.zeros((len(lo), len(hi)), dtype=bool)
    for j, s in enumerate(hi):
        for drop in range(len(s)):
            M[index[s[:drop] + s[drop + 1:]], j] = True
    return M


def betti_via_ranks(simplices, t, max_dim):
    """Betti numbers of the subcomplex at diameter t by rank-nullity."""
    by_dim = {d: [verts for verts, k, diam in simplices if k == d and diam <= t]
              for d in range(max_dim + 2)}
    betti = []
    for d in range(max_dim + 1):
        c_d = len(by_dim[d])
        if c_d == 0:
            betti.append(0)
            continue
        rank_down = 0 if d == 0 else gf2_rank(boundary_matrix(by_dim[d - 1], by_dim[d]))
        upper = by_dim.get(d + 1, [])
        rank_up = gf2_rank(boundary_matrix(by_dim[d], upper)) if upper else 0
        betti.append(c_d - rank_down - rank_up)
    return betti


def textbook_reduction(simplices):
    """Classic left-to-right column reduction of the full boundary matrix.

    simplices: (verts, dim, diam) in filtration order. Returns the sorted
    interval list [(dim, birth, death)], death=inf for essentials, with
    zero-persistence intervals dropped.
    """
    pos = {s[0]: i for i, s in enumerate(simplices)}
    N = len(simplices)
    cols = []
    for verts, dim, diam in simplices:
        if dim == 0:
            cols.append(set())
        else:
            cols.append({pos[verts[:k] + verts[k + 1:]] for k in range(len(verts))})
    low_owner = {}
    pairs = []
    for j in range(N):
        col = cols[j]
        while col:
            low = max(col)
            owner = low_owner.get(low)
            if owner is None:
                low_owner[low] = j
                pairs.append((low, j))
                break
            col ^= cols[owner]
    creator_paired = {i for i, _ in pairs}
    destroyers = {j for _, j in pairs}
    intervals = []
    for i, j in pairs:
        birth, death = simplices[i][2], simplices[j][2]
        if birth != death:
            intervals.append((simplices[i][1], birth, death))
    for j in range(N):
        if j not in destroyers and j not in creator_paired:
            intervals.append((simplices[j][1], simplices[j][2], math.inf))
    return sorted(intervals)


def _min_match_cost(A, B, p):
    """Exhaustive minimum of sum(cost^p) matching interval tuples (birth, death)
    of A against B, any interval free to take its diagonal cost pers/2."""
    best = math.inf

    def diag(iv):
        return (iv[1] - iv[0]) / 2.0

    def rec(i, used, acc):
        nonlocal best
        if acc >= best:
            return
        if i == len(A):
            rest = acc + sum(diag(B[j]) ** p for j in range(len(B)) if not used & (1 << j))
            best = min(best, rest)
            return
        rec(i + 1, used, acc + diag(A[i]) ** p)
        for j in range(len(B)):
            if not used & (1 << j):
                c = max(abs(A[i][0] - B[j][0]), abs(A[i][1] - B[j][1]))
                rec(i + 1, used | (1 << j), acc + c ** p)

    rec(0, 0, 0.0)
    return best


def _min_birth_match(A, B, p):
    if not A:
        return 0.0
    best = math.inf
    for perm in itertools.permutations(range(len(B))):
        cost = sum(abs(A[i][0] - B[j][0]) ** p for i, j in enumerate(perm))
        best = min(best, cost)
    return best


def exhaustive_wasserstein(b1, b2, p=2.0, dims=None, policy="truncate"):
    """Brute-force p-Wasserstein distance over all matchings."""
    if dims is None:
        dims = range(b1.max_dimension)
    total = 0.0
    for d in dims:
        A = [iv for iv in b1.intervals if iv.dimension == d]
        B = [iv for iv in b2.intervals if iv.dimension == d]
        Af = [(iv.birth, iv.death) for iv in A if not math.isinf(iv.death)]
        Bf = [(iv.birth, iv.death) for iv in B if not math.isinf(iv.death)]
        Ae = [(iv.birth, iv.death) for iv in A if math.isinf(iv.death)]
        Be = [(iv.birth, iv.death) for iv in B if math.isinf(iv.death)]
        total += _min_match_cost(Af, Bf, p)
        if policy == "truncate":
            At = [(b, max(b1.enclosing_diameter, b)) for b, _ in Ae]
            Bt = [(b, max(b2.enclosing_diameter, b)) for b, _ in Be]
            total += _min_match_cost(At, Bt, p)
        else:
            if len(Ae) != len(Be):
                return math.inf
            total += _min_birth_match(Ae, Be, p)
    return total ** (1.0 / p)
