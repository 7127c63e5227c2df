"""Compiled inner loops for flooding and grayscale reconstruction.

Both kernels work on flat arrays with 8-connectivity.  Geodesic path
lengths are tracked as integer step counts ``(straight, diagonal)`` and
compared through the canonical float ``straight + diagonal * sqrt(2)``, so
results do not depend on float summation order and the pure-Python test
oracles can reproduce them bit for bit.

Flood sweep semantics (shared with the oracle in the test suite):

* levels are processed in ascending order; a pixel becomes eligible once
  the sweep reaches its level;
* eligible pixels are settled in order of (chamfer distance to the nearest
  labeled pixel, flat row-major index); distance restarts at zero on every
  labeled pixel;
* a settling pixel adjacent to two distinct labels becomes a watershed
  pixel (label 0); watershed pixels never relay the flood;
* in auto mode, eligible pixels no flood can reach form new basins, one
  label per 8-connected component, discovered in row-major order;
* in marker mode no basins are created: unreachable pixels stay label 0.
"""
from __future__ import annotations

import numpy as np
from numba import njit

SQRT2 = 1.4142135623730951

# 8-neighborhood in fixed row-major order; third column flags diagonal steps.
_NEIGH = np.array(
    [
        [-1, -1, 1],
        [-1, 0, 0],
        [-1, 1, 1],
        [0, -1, 0],
        [0, 1, 0],
        [1, -1, 1],
        [1, 0, 0],
        [1, 1, 1],
    ],
    dtype=np.int64,
)


@njit(cache=True)
def _heap_swap(keys, idxs, a, b):
    keys[a], keys[b] = keys[b], keys[a]
    idxs[a], idxs[b] = idxs[b], idxs[a]


@njit(cache=True)
def _heap_less(keys, idxs, a, b):
    if keys[a] < keys[b]:
        return True
    if keys[a] > keys[b]:
        return False
    return idxs[a] < idxs[b]


@njit(cache=True)
def _heap_push(keys, idxs, size, key, idx):
    i = size
    keys[i] = key
    idxs[i] = idx
    while i > 0:
        p = (i - 1) >> 1
        if _heap_less(keys, idxs, i, p):
            _heap_swap(keys, idxs, i, p)
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(keys, idxs, size):
    key = keys[0]
    idx = idxs[0]
    size -= 1
    keys[0] = keys[size]
    idxs[0] = idxs[size]
    i = 0
    while True:
        l = 2 * i + 1
        m = i
        if l < size and _heap_less(keys, idxs, l, m):
            m = l
        r = l + 1
        if r < size and _heap_less(keys, idxs, r, m):
            m = r
        if m == i:
            break
        _heap_swap(keys, idxs, i, m)
        i = m
    return key, idx, size


@njit(cache=True)
def flood_sweep(levels, seeds, create_minima, nrows, ncols):
    """Level-synchronous flooding; see module docstring for the contract.

    levels : int32[nrows*ncols], values in [0, n_levels]
    seeds  : int32[nrows*ncols], 0 = free, >0 = fixed marker label
    Returns (labels int32, watershed uint8, n_labels).
    """
    n_pix = nrows * ncols
    label = seeds.copy()
    assigned = np.zeros(n_pix, dtype=np.uint8)
    ws = np.zeros(n_pix, dtype=np.uint8)
    n_labels = 0
    for i in range(n_pix):
        if seeds[i] > 0:
            assigned[i] = 1
            if seeds[i] > n_labels:
                n_labels = seeds[i]

    dkey = np.full(n_pix, np.inf, dtype=np.float64)
    dna = np.zeros(n_pix, dtype=np.int32)
    dnb = np.zeros(n_pix, dtype=np.int32)

    # counting sort by level gives row-major order inside each level
    max_lev = 0
    for i in range(n_pix):
        if levels[i] > max_lev:
            max_lev = levels[i]
    starts = np.zeros(max_lev + 2, dtype=np.int64)
    for i in range(n_pix):
        starts[levels[i] + 1] += 1
    for l in range(1, max_lev + 2):
        starts[l] += starts[l - 1]
    bucket = np.empty(n_pix, dtype=np.int64)
    pos = starts.copy()
    for i in range(n_pix):
        l = levels[i]
        bucket[pos[l]] = i
        pos[l] += 1

    cap = 12 * n_pix + 64
    hkeys = np.empty(cap, dtype=np.float64)
    hidxs = np.empty(cap, dtype=np.int64)
    hsize = 0
    bfs_queue = np.empty(n_pix, dtype=np.int64)

    for lev in range(max_lev + 1):
        # seed pixels of this level from already labeled neighbors
        for bi in range(starts[lev], starts[lev + 1]):
            pix = bucket[bi]
            if assigned[pix]:
                continue
            r = pix // ncols
            c = pix % ncols
            for k in range(8):
                nr = r + _NEIGH[k, 0]
                nc = c + _NEIGH[k, 1]
                if nr < 0 or nr >= nrows or nc < 0 or nc >= ncols:
                    continue
                q = nr * ncols + nc
                if assigned[q] and ws[q] == 0:
                    na = 1 - _NEIGH[k, 2]
                    nb = _NEIGH[k, 2]
                    key = na + nb * SQRT2
                    if key < dkey[pix]:
                        dkey[pix] = key
                        dna[pix] = na
                        dnb[pix] = nb
                        hsize = _heap_push(hkeys, hidxs, hsize, key, pix)

        # drain: settle in (distance, index) order with the meet rule
        while hsize > 0:
            key, pix, hsize = _heap_pop(hkeys, hidxs, hsize)
            if assigned[pix] or key > dkey[pix]:
                continue
            r = pix // ncols
            c = pix % ncols
            first_lab = 0
            distinct = 0
            for k in range(8):
                nr = r + _NEIGH[k, 0]
                nc = c + _NEIGH[k, 1]
                if nr < 0 or nr >= nrows or nc < 0 or nc >= ncols:
                    continue
                q = nr * ncols + nc
                if assigned[q] and ws[q] == 0 and label[q] > 0:
                    if first_lab == 0:
                        first_lab = label[q]
                        distinct = 1
                    elif label[q] != first_lab:
                        distinct = 2
                        break
            assigned[pix] = 1
            if distinct >= 2:
                ws[pix] = 1
                continue
            label[pix] = first_lab
            for k in range(8):
                nr = r + _NEIGH[k, 0]
                nc = c + _NEIGH[k, 1]
                if nr < 0 or nr >= nrows or nc < 0 or nc >= ncols:
                    continue
                q = nr * ncols + nc
                if assigned[q] == 0 and levels[q] <= lev:
                    cna = dna[pix] + (1 - _NEIGH[k, 2])
                    cnb = dnb[pix] + _NEIGH[k, 2]
                    ckey = cna + cnb * SQRT2
                    if ckey < dkey[q]:
                        dkey[q] = ckey
                        dna[q] = cna
                        dnb[q] = cnb
                        hsize = _heap_push(hkeys, hidxs, hsize, ckey, q)

        # unreached pixels of this level: new basins (auto mode only)
        if create_minima:
            for bi in range(starts[lev], starts[lev + 1]):
                pix = bucket[bi]
                if assigned[pix]:
                    continue
                n_labels += 1
                head = 0
                tail = 0
                bfs_queue[tail] = pix
                tail += 1
                assigned[pix] = 1
                label[pix] = n_labels
                while head < tail:
                    x = bfs_queue[head]
                    head += 1
                    r = x // ncols
                    c = x % ncols
                    for k in range(8):
                        nr = r + _NEIGH[k, 0]
                        nc = c + _NEIGH[k, 1]
                        if nr < 0 or nr >= nrows or nc < 0 or nc >= ncols:
                            continue
                        q = nr * ncols + nc
                        if assigned[q] == 0 and levels[q] <= lev:
                            assigned[q] = 1
                            label[q] = n_labels
                            bfs_queue[tail] = q
                            tail += 1

    return label, ws, n_labels


@njit(cache=True)
def reconstruct_core(marker, mask, nrows, ncols):
    """Grayscale reconstruction by 8-connected downhill priority propagation.

    Requires marker <= mask pointwise; returns the unique fixed point of
    pointwise-min(8-neighborhood dilation, mask) iterated from the marker.
    """
    n_pix = nrows * ncols
    val = marker.copy()
    cap = 4 * n_pix + 64
    hkeys = np.empty(cap, dtype=np.float64)
    hidxs = np.empty(cap, dtype=np.int64)
    hsize = 0
    for i in range(n_pix):
        hsize = _heap_push(hkeys, hidxs, hsize, -val[i], i)
    while hsize > 0:
        nkey, pix, hsize = _heap_pop(hkeys, hidxs, hsize)
        v = -nkey
        if v < val[pix]:
            continue
        r = pix // ncols
        c = pix % ncols
        for k in range(8):
            nr = r + _NEIGH[k, 0]
            nc = c + _NEIGH[k, 1]
            if nr < 0 or nr >= nrows or nc < 0 or nc >= ncols:
                continue
            q = nr * ncols + nc
            nv = v if v < mask[q] else mask[q]
            if nv > val[q]:
                val[q] = nv
                hsize = _heap_push(hkeys, hidxs, hsize, -nv, q)
    return val
