"""Compiled engine for the evolutionary loop.

This mirrors `evolve.run_reference` exactly: same xoshiro256** stream, same
draw order (parent index, then one double per bit), same canonical archive
ordering (insertions append, evictions swap-from-last in descending position
order).  Tests assert bit-identical behavior between the two engines.

Archive layout: fitness keys are lo * (n + 1) + tz, genomes live in a
key-indexed matrix, and `members` lists the live keys for O(1) uniform
parent sampling.  Dominance structure of LOTZ_k keeps the bookkeeping flat:

* feasible offspring are never dominated and only evict infeasible members;
* at most one infeasible member exists per LeadingOnes value, so a
  "dominated?" query for an infeasible offspring is a suffix scan over the
  best TrailingZeros value stored per LeadingOnes value.

Per-position one-counts, the running total imbalance, and (for the sorted
measure) a histogram of imbalance values are patched incrementally on
same-fitness swaps and recounted on the rare insert/evict events.
"""
from __future__ import annotations

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
U7 = np.uint64(7)
U9 = np.uint64(9)
U5 = np.uint64(5)
U11 = np.uint64(11)
U17 = np.uint64(17)
U19 = np.uint64(19)
U27 = np.uint64(27)
U30 = np.uint64(30)
U31 = np.uint64(31)
U32 = np.uint64(32)
U45 = np.uint64(45)
U57 = np.uint64(57)
MASK32 = np.uint64(0xFFFFFFFF)
TWO32 = np.uint64(0x100000000)
INV53 = 1.0 / 9007199254740992.0
ONE_U8 = np.uint8(1)


@njit(cache=True, inline="always")
def _next_u64(s):
    s1 = s[1]
    x = s1 * U5
    result = ((x << U7) | (x >> U57)) * U9
    t = s1 << U17
    s[2] ^= s[0]
    s[3] ^= s1
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = (s[3] << U45) | (s[3] >> U19)
    return result


@njit(cache=True, inline="always")
def _seed_state(seed):
    s = np.empty(4, np.uint64)
    state = seed
    for i in range(4):
        state = state + GOLDEN
        z = state
        z = (z ^ (z >> U30)) * MIX1
        z = (z ^ (z >> U27)) * MIX2
        s[i] = z ^ (z >> U31)
    return s


@njit(cache=True, inline="always")
def _next_below(s, bound):
    b = np.uint64(bound)
    x = _next_u64(s) >> U32
    m = x * b
    low = m & MASK32
    if low < b:
        threshold = (TWO32 - b) % b
        while low < threshold:
            x = _next_u64(s) >> U32
            m = x * b
            low = m & MASK32
    return np.int64(m >> U32)


@njit(cache=True, inline="always")
def _lo_tz(bits, n):
    lo = 0
    while lo < n and bits[lo] == 1:
        lo += 1
    tz = 0
    while tz < n and bits[n - 1 - tz] == 0:
        tz += 1
    return lo, tz


@njit(cache=True)
def _recount(n1, mu, hist, use_hist):
    if use_hist:
        hist[:] = 0
    total = 0
    for i in range(n1.shape[0]):
        b = 2 * n1[i] - mu
        if b < 0:
            b = -b
        total += b
        if use_hist:
            hist[b] += 1
    return total


@njit(cache=True)
def run_kernel(n, k, measure, stop_at, seed, max_iters, init, front_size, opt_total):
    """One trial; measure: 0=none, 1=total, 2=sorted; stop_at: 0=optimum, 1=cover.

    Returns (iters_to_cover, iters_to_opt, imbalance_at_cover, capped, mu,
    covered, total_imbalance, member_keys, genome_matrix, one_counts); the
    iteration fields use -1 for "not reached".
    """
    nn = n + 1
    nkeys = nn * nn
    floor = n - k
    cap = front_size + n + 2

    s = _seed_state(seed)

    geno = np.zeros((nkeys, n), np.uint8)
    present = np.zeros(nkeys, np.uint8)
    mpos = np.zeros(nkeys, np.int64)
    members = np.zeros(cap, np.int64)
    n1 = np.zeros(n, np.int64)
    ftz_max = np.full(nn, -1, np.int64)
    itz = np.full(nn, -1, np.int64)
    hist = np.zeros(cap + 2, np.int64)
    net = np.zeros(cap + 2, np.int64)
    touched = np.zeros(2 * n, np.int64)
    diff_idx = np.empty(n, np.int64)
    diff_old = np.empty(n, np.int64)
    diff_new = np.empty(n, np.int64)
    y = np.empty(n, np.uint8)
    mu = 0
    covered = 0
    inv_n = 1.0 / n
    use_hist = measure == 2

    # ---- initial population ----
    if init.shape[0] == 0:
        for i in range(n):
            if (_next_u64(s) >> U11) * INV53 < 0.5:
                y[i] = 1
            else:
                y[i] = 0
        lo, tz = _lo_tz(y, n)
        key = lo * nn + tz
        mu, covered = _insert(
            key, y, lo, tz, floor, geno, present, mpos, members, mu, n1, ftz_max, itz, covered
        )
    else:
        for r in range(init.shape[0]):
            row = init[r]
            lo, tz = _lo_tz(row, n)
            key = lo * nn + tz
            if present[key] == 1:
                raise ValueError("duplicate fitness vector in initial population")
            mu, covered = _insert(
                key, row, lo, tz, floor, geno, present, mpos, members, mu, n1, ftz_max, itz, covered
            )
    total = _recount(n1, mu, hist, use_hist)

    iters_to_cover = np.int64(-1)
    iters_to_opt = np.int64(-1)
    imb_at_cover = np.int64(-1)
    if covered == front_size:
        iters_to_cover = 0
        imb_at_cover = total
        if total == opt_total:
            iters_to_opt = 0

    t = np.int64(0)
    while True:
        if stop_at == 1:
            if iters_to_cover >= 0:
                break
        elif iters_to_opt >= 0:
            break
        if t >= max_iters:
            break
        t += 1

        # parent selection and standard bit mutation
        pkey = members[_next_below(s, mu)]
        for i in range(n):
            bit = geno[pkey, i]
            if (_next_u64(s) >> U11) * INV53 < inv_n:
                bit = bit ^ ONE_U8
            y[i] = bit
        lo, tz = _lo_tz(y, n)
        key = lo * nn + tz

        if present[key] == 1:
            # same fitness vector in the archive: diversity tie-break
            ndiff = 0
            for i in range(n):
                if y[i] != geno[key, i]:
                    b_old = 2 * n1[i] - mu
                    if b_old < 0:
                        b_old = -b_old
                    if y[i] == 1:
                        b_new = 2 * (n1[i] + 1) - mu
                    else:
                        b_new = 2 * (n1[i] - 1) - mu
                    if b_new < 0:
                        b_new = -b_new
                    diff_idx[ndiff] = i
                    diff_old[ndiff] = b_old
                    diff_new[ndiff] = b_new
                    ndiff += 1
            if ndiff > 0:
                accept = True
                if measure == 1:
                    delta = 0
                    for j in range(ndiff):
                        delta += diff_new[j] - diff_old[j]
                    accept = delta <= 0
                elif measure == 2:
                    # net histogram change; the largest touched imbalance
                    # value with a nonzero net decides the lexicographic
                    # comparison of the descending-sorted vectors
                    ntouch = 0
                    for j in range(ndiff):
                        v = diff_old[j]
                        if net[v] == 0:
                            touched[ntouch] = v
                            ntouch += 1
                        net[v] -= 1
                        v = diff_new[j]
                        if net[v] == 0:
                            touched[ntouch] = v
                            ntouch += 1
                        net[v] += 1
                    vmax = np.int64(-1)
                    for j in range(ntouch):
                        v = touched[j]
                        if net[v] != 0 and v > vmax:
                            vmax = v
                    accept = vmax < 0 or net[vmax] < 0
                    for j in range(ntouch):
                        net[touched[j]] = 0
                if accept:
                    for j in range(ndiff):
                        i = diff_idx[j]
                        if y[i] == 1:
                            n1[i] += 1
                        else:
                            n1[i] -= 1
                        geno[key, i] = y[i]
                        total += diff_new[j] - diff_old[j]
                        if use_hist:
                            hist[diff_old[j]] -= 1
                            hist[diff_new[j]] += 1
        else:
            feasible = lo + tz >= floor
            if not feasible:
                # dominated iff some member has lo' >= lo and tz' >= tz
                dominated = False
                for lo2 in range(lo, nn):
                    if ftz_max[lo2] >= tz or itz[lo2] >= tz:
                        dominated = True
                        break
                if dominated:
                    continue
            # evict infeasible members the offspring dominates
            ndel = 0
            for pos in range(mu):
                mk = members[pos]
                mlo = mk // nn
                mtz = mk % nn
                if mlo + mtz >= floor:
                    continue
                if mlo <= lo and mtz <= tz:
                    diff_idx[ndel] = pos
                    ndel += 1
            for j in range(ndel - 1, -1, -1):
                pos = diff_idx[j]
                mk = members[pos]
                for i in range(n):
                    n1[i] -= geno[mk, i]
                present[mk] = 0
                itz[mk // nn] = -1
                mu -= 1
                lk = members[mu]
                members[pos] = lk
                mpos[lk] = pos
            mu, covered = _insert(
                key, y, lo, tz, floor, geno, present, mpos, members, mu, n1, ftz_max, itz, covered
            )
            total = _recount(n1, mu, hist, use_hist)

        if iters_to_cover < 0 and covered == front_size:
            iters_to_cover = t
            imb_at_cover = total
        if iters_to_cover >= 0 and iters_to_opt < 0 and total == opt_total:
            iters_to_opt = t

    if stop_at == 1:
        capped = 0 if iters_to_cover >= 0 else 1
    else:
        capped = 0 if iters_to_opt >= 0 else 1

    return (
        iters_to_cover,
        iters_to_opt,
        imb_at_cover,
        capped,
        mu,
        covered,
        total,
        members[:mu].copy(),
        geno,
        n1,
    )


@njit(cache=True)
def _insert(key, bits, lo, tz, floor, geno, present, mpos, members, mu, n1, ftz_max, itz, covered):
    geno[key, :] = bits
    present[key] = 1
    mpos[key] = mu
    members[mu] = key
    mu += 1
    for i in range(bits.shape[0]):
        n1[i] += bits[i]
    if lo + tz >= floor:
        covered += 1
        if tz > ftz_max[lo]:
            ftz_max[lo] = tz
    else:
        itz[lo] = tz
    return mu, covered


@njit(cache=True)
def rng_stream(seed, count):
    """Raw xoshiro256** outputs, for cross-checking against the Python RNG."""
    s = _seed_state(seed)
    out = np.empty(count, np.uint64)
    for i in range(count):
        out[i] = _next_u64(s)
    return out


@njit(cache=True)
def bounded_stream(seed, bound, count):
    """Bounded draws, for cross-checking Lemire rejection behavior."""
    s = _seed_state(seed)
    out = np.empty(count, np.int64)
    for i in range(count):
        out[i] = _next_below(s, bound)
    return out


@njit(cache=True)
def mutation_flip_stats(seed, n, reps):
    """Per-mutation flip counts and per-position flip totals.

    Uses the exact per-bit draw sequence of the run engines, so the measured
    distribution is the one the algorithm actually samples from.
    """
    s = _seed_state(seed)
    counts = np.empty(reps, np.int64)
    per_pos = np.zeros(n, np.int64)
    inv_n = 1.0 / n
    for r in range(reps):
        c = 0
        for i in range(n):
            if (_next_u64(s) >> U11) * INV53 < inv_n:
                c += 1
                per_pos[i] += 1
        counts[r] = c
    return counts, per_pos
