"""Compiled main loop for CDCLSolver (random branching, no observer).

A line-by-line port of the pure-Python engine: same watch order, same
conflict analysis, same PRNG stream. Statistics and verdicts are identical;
tests compare the two backends run for run.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_M1 = U64(0x2545F4914F6CDD1D)

# status / error codes returned by the kernel
UNSAT, SAT, UNKNOWN = 0, 1, 2
ERR_NOT_ASSERTING, ERR_NOT_FALSIFIED, ERR_NON_DECISION = 10, 11, 12


@njit(cache=True)
def _next(state):
    x = state[0]
    x ^= x >> U64(12)
    x ^= x << U64(25)
    x ^= x >> U64(27)
    state[0] = x
    return x * _M1


@njit(cache=True)
def _run(
    nv, lits, end, wflat, woff, value, level, reason, trail, trail_len,
    free, free_pos, nfree, scheme, minimize, policy, restart_base, restart_factor,
    rng_state, max_conflicts,
):
    # stats: restarts conflicts decisions props learned_count learned_lits
    stats = np.zeros(6, np.int64)
    # watch lists: one segment per literal inside a shared pool; a full
    # segment is moved to the end of the pool with doubled capacity
    wbeg = np.zeros(2 * nv, np.int64)
    wcap = np.zeros(2 * nv, np.int64)
    wn = np.zeros(2 * nv, np.int64)
    wtop = 0
    for lit in range(2 * nv):
        wcap[lit] = max(4, 2 * (woff[lit + 1] - woff[lit]))
        wtop += wcap[lit]
    wpool = np.empty(2 * wtop, np.int32)
    wtop = 0
    for lit in range(2 * nv):
        cnt = woff[lit + 1] - woff[lit]
        wbeg[lit] = wtop
        wpool[wtop : wtop + cnt] = wflat[woff[lit] : woff[lit + 1]]
        wn[lit] = cnt
        wtop += wcap[lit]
    trail_lim = np.zeros(nv + 1, np.int64)
    ntl = 0
    qhead = 0
    seen = np.zeros(nv, np.bool_)
    learnt = np.zeros(nv + 1, np.int32)
    to_clear = np.zeros(nv + 1, np.int32)
    stack = np.zeros(nv + 1, np.int32)
    out = np.zeros(nv + 1, np.int32)
    restart_limit = float(restart_base)
    since_restart = 0
    status = UNKNOWN

    while True:
        # ---- propagate
        confl = -1
        dl = ntl
        while qhead < trail_len:
            false_lit = trail[qhead] ^ 1
            qhead += 1
            wb = wbeg[false_lit]
            n_ws = wn[false_lit]
            i = 0
            j = 0
            while i < n_ws:
                cid = wpool[wb + i]
                i += 1
                s = cid
                ln = lits[s - 1]
                if lits[s] == false_lit:
                    lits[s] = lits[s + 1]
                    lits[s + 1] = false_lit
                first = lits[s]
                if value[first] == 1:
                    wpool[wb + j] = cid
                    j += 1
                    continue
                moved = False
                for t in range(2, ln):
                    lit = lits[s + t]
                    if value[lit] != -1:
                        lits[s + 1] = lit
                        lits[s + t] = false_lit
                        if wn[lit] == wcap[lit]:
                            ncap = 2 * wcap[lit]
                            if wtop + ncap > wpool.shape[0]:
                                grown = np.empty(2 * (wtop + ncap), np.int32)
                                grown[:wtop] = wpool[:wtop]
                                wpool = grown
                            wpool[wtop : wtop + wn[lit]] = wpool[wbeg[lit] : wbeg[lit] + wn[lit]]
                            wbeg[lit] = wtop
                            wcap[lit] = ncap
                            wtop += ncap
                        wpool[wbeg[lit] + wn[lit]] = cid
                        wn[lit] += 1
                        moved = True
                        break
                if moved:
                    continue
                wpool[wb + j] = cid
                j += 1
                if value[first] == -1:
                    confl = cid
                    while i < n_ws:
                        wpool[wb + j] = wpool[wb + i]
                        j += 1
                        i += 1
                    break
                value[first] = 1
                value[first ^ 1] = -1
                v = first >> 1
                level[v] = dl
                reason[v] = cid
                trail[trail_len] = first
                trail_len += 1
                # free-pool removal
                pi = free_pos[v]
                nfree -= 1
                last = free[nfree]
                if last != v:
                    free[pi] = last
                    free_pos[last] = pi
                stats[3] += 1
            wn[false_lit] = j
            if confl >= 0:
                break
        if confl >= 0:
            qhead = trail_len

        if confl >= 0:
            stats[1] += 1
            if ntl == 0:
                status = UNSAT
                break
            # ---- analyze
            nl = 0
            if scheme == 0:
                nl = 1
                path = 0
                p = -1
                idx = trail_len - 1
                while True:
                    s = confl
                    ln = lits[s - 1]
                    for t in range(0 if p == -1 else 1, ln):
                        q = lits[s + t]
                        v = q >> 1
                        if not seen[v] and level[v] > 0:
                            seen[v] = True
                            if level[v] >= dl:
                                path += 1
                            else:
                                learnt[nl] = q
                                nl += 1
                    while not seen[trail[idx] >> 1]:
                        idx -= 1
                    p = trail[idx]
                    idx -= 1
                    seen[p >> 1] = False
                    path -= 1
                    if path == 0:
                        break
                    confl = reason[p >> 1]
                learnt[0] = p ^ 1
                if minimize:
                    abstract = 0
                    for t in range(1, nl):
                        abstract |= 1 << (level[learnt[t] >> 1] & 31)
                    ntc = 0
                    for t in range(nl):
                        to_clear[ntc] = learnt[t]
                        ntc += 1
                    out[0] = learnt[0]
                    no = 1
                    for t in range(1, nl):
                        lit0 = learnt[t]
                        keep = reason[lit0 >> 1] == -1
                        if not keep:
                            # recursive redundancy check
                            top = ntc
                            sp = 0
                            stack[sp] = lit0
                            sp += 1
                            red = True
                            while sp > 0 and red:
                                sp -= 1
                                q = stack[sp]
                                r = reason[q >> 1]
                                s = r
                                for u in range(1, lits[s - 1]):
                                    lit = lits[s + u]
                                    v = lit >> 1
                                    if not seen[v] and level[v] > 0:
                                        if reason[v] != -1 and ((1 << (level[v] & 31)) & abstract) != 0:
                                            seen[v] = True
                                            stack[sp] = lit
                                            sp += 1
                                            if ntc == to_clear.shape[0]:
                                                grown = np.zeros(2 * ntc, np.int32)
                                                grown[:ntc] = to_clear
                                                to_clear = grown
                                            to_clear[ntc] = lit
                                            ntc += 1
                                        else:
                                            for x in range(top, ntc):
                                                seen[to_clear[x] >> 1] = False
                                            ntc = top
                                            red = False
                                            break
                            keep = not red
                        if keep:
                            out[no] = lit0
                            no += 1
                    for t in range(ntc):
                        seen[to_clear[t] >> 1] = False
                    for t in range(no):
                        learnt[t] = out[t]
                    nl = no
                for t in range(nl):
                    seen[learnt[t] >> 1] = False
            else:
                pending = 0
                s = confl
                for t in range(lits[s - 1]):
                    q = lits[s + t]
                    v = q >> 1
                    if not seen[v] and level[v] > 0:
                        seen[v] = True
                        pending += 1
                nl = 1
                head = -1
                idx = trail_len - 1
                while pending > 0:
                    lit = trail[idx]
                    idx -= 1
                    v = lit >> 1
                    if not seen[v]:
                        continue
                    seen[v] = False
                    pending -= 1
                    r = reason[v]
                    if r == -1:
                        if level[v] == dl:
                            head = lit ^ 1
                        else:
                            learnt[nl] = lit ^ 1
                            nl += 1
                        continue
                    s = r
                    for t in range(1, lits[s - 1]):
                        q = lits[s + t]
                        u = q >> 1
                        if not seen[u] and level[u] > 0:
                            seen[u] = True
                            pending += 1
                learnt[0] = head
            bj = 0
            if nl > 1:
                best = 1
                for t in range(2, nl):
                    if level[learnt[t] >> 1] > level[learnt[best] >> 1]:
                        best = t
                tmp = learnt[1]
                learnt[1] = learnt[best]
                learnt[best] = tmp
                bj = level[learnt[1] >> 1]
            # ---- invariants
            at_top = 0
            for t in range(nl):
                if level[learnt[t] >> 1] == dl:
                    at_top += 1
            if at_top != 1 or learnt[0] < 0 or level[learnt[0] >> 1] != dl:
                return ERR_NOT_ASSERTING, stats
            for t in range(nl):
                if value[learnt[t]] != -1:
                    return ERR_NOT_FALSIFIED, stats
            if scheme == 1:
                for t in range(nl):
                    if reason[learnt[t] >> 1] != -1:
                        return ERR_NON_DECISION, stats
            stats[4] += 1
            stats[5] += nl
            since_restart += 1
            if policy == 0:
                restart = True
            elif policy == 1:
                restart = since_restart >= restart_limit
                if restart:
                    restart_limit *= restart_factor
            else:
                restart = False
            target = bj
            if restart:
                stats[0] += 1
                since_restart = 0
                target = 0
            # ---- cancel_until(target)
            if ntl > target:
                stop = trail_lim[target]
                for t in range(trail_len - 1, stop - 1, -1):
                    lit = trail[t]
                    value[lit] = 0
                    value[lit ^ 1] = 0
                    v = lit >> 1
                    reason[v] = -1
                    free_pos[v] = nfree
                    free[nfree] = v
                    nfree += 1
                trail_len = stop
                ntl = target
                if qhead > stop:
                    qhead = stop
            # ---- attach learnt (clauses live inline as [len, lit, lit, ...])
            if end + nl + 1 > lits.shape[0]:
                g3 = np.zeros(2 * (end + nl + 1), np.int32)
                g3[:end] = lits[:end]
                lits = g3
            lits[end] = nl
            cid = end + 1
            for t in range(nl):
                lits[cid + t] = learnt[t]
            end = cid + nl
            if nl >= 2:
                for t in range(2):
                    lit = learnt[t]
                    if wn[lit] == wcap[lit]:
                        ncap = 2 * wcap[lit]
                        if wtop + ncap > wpool.shape[0]:
                            grown = np.empty(2 * (wtop + ncap), np.int32)
                            grown[:wtop] = wpool[:wtop]
                            wpool = grown
                        wpool[wtop : wtop + wn[lit]] = wpool[wbeg[lit] : wbeg[lit] + wn[lit]]
                        wbeg[lit] = wtop
                        wcap[lit] = ncap
                        wtop += ncap
                    wpool[wbeg[lit] + wn[lit]] = cid
                    wn[lit] += 1
            if nl == 1 or not restart:
                a = learnt[0]
                value[a] = 1
                value[a ^ 1] = -1
                v = a >> 1
                level[v] = ntl
                reason[v] = cid
                trail[trail_len] = a
                trail_len += 1
                pi = free_pos[v]
                nfree -= 1
                last = free[nfree]
                if last != v:
                    free[pi] = last
                    free_pos[last] = pi
            if max_conflicts >= 0 and stats[1] >= max_conflicts:
                break
            continue
        if nfree == 0:
            status = SAT
            break
        stats[2] += 1
        trail_lim[ntl] = trail_len
        ntl += 1
        r = _next(rng_state)
        pick = ((r >> U64(32)) * U64(nfree)) >> U64(32)
        v = free[np.int64(pick)]
        a = 2 * v
        value[a] = 1
        value[a ^ 1] = -1
        level[v] = ntl
        reason[v] = -1
        trail[trail_len] = a
        trail_len += 1
        pi = free_pos[v]
        nfree -= 1
        last = free[nfree]
        if last != v:
            free[pi] = last
            free_pos[last] = pi
    return status, stats


def run(solver, scheme: int, minimize: bool, policy: int):
    """Run the compiled loop from a freshly initialised CDCLSolver.

    Returns (status code, stats array, value array).
    """
    nv = solver.num_vars
    refs = []
    flat = []
    for c in solver.clauses:
        flat.append(len(c))
        refs.append(len(flat))
        flat.extend(c)
    lits = np.zeros(max(16, 2 * len(flat)), np.int32)
    lits[: len(flat)] = flat
    wcounts = [len(w) for w in solver.watches]
    woff = np.zeros(2 * nv + 1, np.int64)
    if nv:
        woff[1:] = np.cumsum(wcounts)
    wflat = np.array([refs[cid] for w in solver.watches for cid in w] or [0], np.int32)
    value = np.array(solver.value, np.int8)
    level = np.array(solver.level, np.int64)
    reason = np.array([refs[r] if r >= 0 else -1 for r in solver.reason], np.int64)
    trail = np.zeros(nv + 1, np.int32)
    trail[: len(solver.trail)] = solver.trail
    free = np.zeros(nv + 1, np.int64)
    free[: len(solver.free)] = solver.free
    free_pos = np.array(solver.free_pos, np.int64)
    rng_state = np.array([solver.rng.state], np.uint64)
    cfg = solver.config
    status, stats = _run(
        nv, lits, len(flat), wflat, woff, value, level, reason, trail, len(solver.trail),
        free, free_pos, len(solver.free), scheme, minimize, policy, cfg.restart_base,
        float(cfg.restart_factor), rng_state, -1 if cfg.max_conflicts is None else cfg.max_conflicts,
    )
    return int(status), stats, value
