"""Compiled inner loops for tree growth.

The tree builder keeps, per node, a (p, m) matrix of sample indices where row
r lists the node's samples sorted by feature r. Scanning then needs no
sorting, and partitioning preserves the sorted order of every row.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def scan_node(XT, y, sidx, rows, msl):
    """Best split over the candidate feature rows of a presorted node.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. The split maximizing the sum-of-squared-error reduction wins;
    ties break on smaller feature index, then smaller threshold within the
    feature (rows ascend and positions ascend, so the first maximum wins —
    and the choice survives monotone feature transforms). Returns
    (row, split_pos, threshold, reduction) with row == -1 when no split has
    positive reduction.
    """
    m = sidx.shape[1]
    tot1 = 0.0
    tot2 = 0.0
    for i in range(m):
        v = y[sidx[0, i]]
        tot1 += v
        tot2 += v * v
    sse_parent = tot2 - tot1 * tot1 / m

    best_row = -1
    best_pos = -1
    best_red = 0.0
    best_thr = np.inf
    for ri in range(rows.shape[0]):
        r = rows[ri]
        s1 = 0.0
        s2 = 0.0
        prev_x = XT[r, sidx[r, 0]]
        for i in range(m - 1):
            v = y[sidx[r, i]]
            s1 += v
            s2 += v * v
            nxt_x = XT[r, sidx[r, i + 1]]
            k = i + 1
            if nxt_x > prev_x and k >= msl and m - k >= msl:
                s1r = tot1 - s1
                red = sse_parent - (s2 - s1 * s1 / k) - ((tot2 - s2) - s1r * s1r / (m - k))
                if red > best_red:
                    best_red = red
                    best_thr = (prev_x + nxt_x) / 2.0
                    best_pos = k
                    best_row = r
            prev_x = nxt_x
    return best_row, best_pos, best_thr, best_red


@njit(cache=True, nogil=True)
def partition_node(sidx, row, k, flag):
    """Split a presorted node at position k of feature `row`.

    `flag` is a caller-owned boolean workspace over the sample-index space;
    it is restored to all-False before returning. Both halves keep every
    row's sort order (stable partition).
    """
    p, m = sidx.shape
    for i in range(k):
        flag[sidx[row, i]] = True
    left = np.empty((p, k), dtype=sidx.dtype)
    right = np.empty((p, m - k), dtype=sidx.dtype)
    for r in range(p):
        a = 0
        b = 0
        for i in range(m):
            s = sidx[r, i]
            if flag[s]:
                left[r, a] = s
                a += 1
            else:
                right[r, b] = s
                b += 1
    for i in range(k):
        flag[sidx[row, i]] = False
    return left, right
