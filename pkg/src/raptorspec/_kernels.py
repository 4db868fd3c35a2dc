"""Jitted hot loop for erasure-channel simulation.

Over an erasure channel, both decodability and the entire
peel-then-inactivate trajectory depend only on WHICH output symbols
arrive, never on their values: the solved system's matrix is fixed by the
received-position pattern and the right-hand side only feeds back into the
recovered bits. So the simulation kernel works purely on bit patterns and
must mirror the reference solver's pivot policy step for step (same stack
discipline, same tie-breaking) for its inactivation counts to be
bit-identical to gf2.solve_with_inactivation; a property test pins that
equivalence.
"""
from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["decode_pattern", "simulate_point"]

_U64_ONE = np.uint64(1)


@njit(cache=True, nogil=True, inline="always")
def _ctz(w):
    # index of the lowest set bit; w & (~w+1) is a power of two, which
    # float64 represents exactly up to 2^63, so log2 is exact
    return int(np.log2(np.float64(w & (~w + _U64_ONE))))


@njit(cache=True, nogil=True)
def _peel_core(sup, m_eq, h, nwords, deg, occ, adj_start, adj_cur, adj_flat, stack, state, sym, symrow):
    """Peel/inactivate on the pattern system held in sup[:m_eq].

    Mirrors the reference solver: LIFO stack of degree-1 equations seeded
    in increasing index order; on stall, inactivate the unresolved variable
    with the largest initial occurrence count (ties to the lowest index) --
    occurrence counts of unresolved variables never change, so the initial
    counts stay valid throughout. Returns (unique, inactivations).

    Trashes sup, deg, sym and the other work arrays.
    """
    # degrees, occurrence counts
    for v in range(h):
        occ[v] = 0
    for i in range(m_eq):
        d = 0
        for wi in range(nwords):
            w = sup[i, wi]
            base = wi << 6
            while w:
                b = base + _ctz(w)
                occ[b] += 1
                d += 1
                w &= w - _U64_ONE
        deg[i] = d

    # adjacency lists, CSR layout, equation indices ascending per variable
    adj_start[0] = 0
    for v in range(h):
        adj_start[v + 1] = adj_start[v] + occ[v]
        adj_cur[v] = adj_start[v]
    for i in range(m_eq):
        for wi in range(nwords):
            w = sup[i, wi]
            base = wi << 6
            while w:
                b = base + _ctz(w)
                adj_flat[adj_cur[b]] = i
                adj_cur[b] += 1
                w &= w - _U64_ONE

    for v in range(h):
        state[v] = 0
    for i in range(m_eq):
        for wi in range(sym.shape[1]):
            sym[i, wi] = 0

    sp = 0
    for i in range(m_eq):
        if deg[i] == 1:
            stack[sp] = i
            sp += 1

    n_slots = 0
    while True:
        while sp > 0:
            sp -= 1
            i = stack[sp]
            if deg[i] != 1:
                continue
            v = -1
            for wi in range(nwords):
                if sup[i, wi]:
                    v = (wi << 6) + _ctz(sup[i, wi])
                    break
            state[v] = 1
            for wi in range(sym.shape[1]):
                symrow[wi] = sym[i, wi]
                sym[i, wi] = 0
            for wi in range(nwords):
                sup[i, wi] = 0
            deg[i] = 0
            vw = v >> 6
            vb = _U64_ONE << np.uint64(v & 63)
            for a in range(adj_start[v], adj_start[v + 1]):
                t = adj_flat[a]
                if t == i:
                    continue
                sup[t, vw] ^= vb
                deg[t] -= 1
                for wi in range(sym.shape[1]):
                    sym[t, wi] ^= symrow[wi]
                if deg[t] == 1:
                    stack[sp] = t
                    sp += 1
        # stall: inactivate the busiest unresolved variable
        best = -1
        best_occ = 0
        for v in range(h):
            if state[v] == 0 and occ[v] > best_occ:
                best = v
                best_occ = occ[v]
        if best < 0:
            break
        state[best] = 2
        sw = n_slots >> 6
        sb = _U64_ONE << np.uint64(n_slots & 63)
        vw = best >> 6
        vb = _U64_ONE << np.uint64(best & 63)
        for a in range(adj_start[best], adj_start[best + 1]):
            t = adj_flat[a]
            sup[t, vw] ^= vb
            deg[t] -= 1
            sym[t, sw] ^= sb
            if deg[t] == 1:
                stack[sp] = t
                sp += 1
        n_slots += 1

    for v in range(h):
        if state[v] == 0:
            return False, n_slots  # variable in no equation: ambiguous

    # rank of the residual constraints over the inactivation slots,
    # in-place elimination on the sym rows
    rank = 0
    sword = (n_slots + 63) >> 6
    for s in range(n_slots):
        sw = s >> 6
        sb = _U64_ONE << np.uint64(s & 63)
        pivot = -1
        for i in range(rank, m_eq):
            if sym[i, sw] & sb:
                pivot = i
                break
        if pivot < 0:
            continue
        for wi in range(sword):
            tmp = sym[rank, wi]
            sym[rank, wi] = sym[pivot, wi]
            sym[pivot, wi] = tmp
        for i in range(m_eq):
            if i != rank and (sym[i, sw] & sb):
                for wi in range(sword):
                    sym[i, wi] ^= sym[rank, wi]
        rank += 1
    return rank == n_slots, n_slots


@njit(cache=True, nogil=True)
def decode_pattern(parity, cols, received, h):
    """Pattern-only decode of one erasure pattern; test hook.

    parity: (h-k, nwords) uint64 rows; cols: (n, nwords) uint64, row c =
    support of output symbol c over the h intermediate positions;
    received: int64 array of received position indices.
    Returns (unique, inactivations).
    """
    hk = parity.shape[0]
    nwords = cols.shape[1]
    m_eq = hk + received.shape[0]
    sup = np.zeros((m_eq, nwords), dtype=np.uint64)
    for r in range(hk):
        for wi in range(nwords):
            sup[r, wi] = parity[r, wi]
    for idx in range(received.shape[0]):
        c = received[idx]
        for wi in range(nwords):
            sup[hk + idx, wi] = cols[c, wi]

    deg = np.zeros(m_eq, dtype=np.int32)
    occ = np.zeros(h, dtype=np.int32)
    adj_start = np.zeros(h + 1, dtype=np.int32)
    adj_cur = np.zeros(h, dtype=np.int32)
    total = 0
    for i in range(m_eq):
        for wi in range(nwords):
            w = sup[i, wi]
            while w:
                total += 1
                w &= w - _U64_ONE
    adj_flat = np.zeros(total, dtype=np.int32)
    stack = np.zeros(total + m_eq + 8, dtype=np.int32)
    state = np.zeros(h, dtype=np.uint8)
    sym = np.zeros((m_eq, (h + 63) >> 6), dtype=np.uint64)
    symrow = np.zeros((h + 63) >> 6, dtype=np.uint64)
    return _peel_core(
        sup, m_eq, h, nwords, deg, occ, adj_start, adj_cur, adj_flat, stack, state, sym, symrow
    )


@njit(cache=True, nogil=True)
def simulate_point(parity, cols, h, eps, target_errors, max_words, seed):
    """Simulate one (code, erasure probability) cell.

    Draws i.i.d. erasure patterns, decodes each in the pattern domain, and
    stops at target_errors decoding failures or max_words transmitted
    words. Seeds numba's thread-local RNG on entry, so results depend only
    on the arguments, never on the thread schedule.
    Returns (words, errors, inactivation_sum) with the sum taken over all
    attempts.
    """
    np.random.seed(seed)
    hk = parity.shape[0]
    n = cols.shape[0]
    nwords = cols.shape[1]
    m_max = hk + n

    sup = np.zeros((m_max, nwords), dtype=np.uint64)
    deg = np.zeros(m_max, dtype=np.int32)
    occ = np.zeros(h, dtype=np.int32)
    adj_start = np.zeros(h + 1, dtype=np.int32)
    adj_cur = np.zeros(h, dtype=np.int32)
    max_bits = hk * h + 0
    for c in range(n):
        d = 0
        for wi in range(nwords):
            w = cols[c, wi]
            while w:
                d += 1
                w &= w - _U64_ONE
        max_bits += d
    adj_flat = np.zeros(max_bits, dtype=np.int32)
    stack = np.zeros(max_bits + m_max + 8, dtype=np.int32)
    state = np.zeros(h, dtype=np.uint8)
    sym = np.zeros((m_max, (h + 63) >> 6), dtype=np.uint64)
    symrow = np.zeros((h + 63) >> 6, dtype=np.uint64)

    words = 0
    errors = 0
    inact_sum = 0
    while words < max_words and errors < target_errors:
        words += 1
        m_eq = hk
        for r in range(hk):
            for wi in range(nwords):
                sup[r, wi] = parity[r, wi]
        for c in range(n):
            if np.random.random() >= eps:
                for wi in range(nwords):
                    sup[m_eq, wi] = cols[c, wi]
                m_eq += 1
        ok, inact = _peel_core(
            sup, m_eq, h, nwords, deg, occ, adj_start, adj_cur, adj_flat, stack, state, sym, symrow
        )
        inact_sum += inact
        if not ok:
            errors += 1
    return words, errors, inact_sum
