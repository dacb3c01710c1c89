"""Numeric inner loops.

Everything here sticks to plain arrays and scalars so each function compiles
under numba when available and still runs unmodified as interpreted numpy
(see _jit). Matroid structure is passed positionally: kind 0 is graphic
(num_vertices, eu, ev), kind 1 is capacitated partition (block_id, caps);
a uniform matroid is a single-block partition.

Batch sampling (realization matrices, cut bits) is vectorized numpy on the
caller side; kernels consume precomputed matrices.
"""

import numpy as np

from ._jit import jit_kernel, BACKEND, NUMBA_ENABLED

KIND_GRAPHIC = 0
KIND_PARTITION = 1


@jit_kernel
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@jit_kernel
def greedy_select(kind, num_vertices, eu, ev, block_id, caps,
                  order, take, values):
    """Greedy feasible selection in arrival order.

    Accepts item order[j] when take of it is set and it keeps the selection
    independent. Returns (total value, accepted mask).
    """
    n = take.size
    accepted = np.zeros(n, np.bool_)
    total = 0.0
    if kind == KIND_GRAPHIC:
        parent = np.arange(num_vertices)
        for j in range(order.size):
            e = order[j]
            if not take[e]:
                continue
            ru = _find(parent, eu[e])
            rv = _find(parent, ev[e])
            if ru != rv:
                parent[ru] = rv
                accepted[e] = True
                total += values[e]
    else:
        used = np.zeros(caps.size, np.int64)
        for j in range(order.size):
            e = order[j]
            if not take[e]:
                continue
            b = block_id[e]
            if used[b] < caps[b]:
                used[b] += 1
                accepted[e] = True
                total += values[e]
    return total, accepted


@jit_kernel
def max_weight_select(kind, num_vertices, eu, ev, block_id, caps, weights):
    """Max-weight independent set: greedy by decreasing weight, ties toward
    the lower index, zero-weight items left out."""
    order = np.argsort(-weights, kind='mergesort')
    take = weights > 0.0
    return greedy_select(kind, num_vertices, eu, ev, block_id, caps,
                         order, take, weights)


@jit_kernel
def exact_reduce(kind, num_vertices, eu, ev, block_id, caps,
                 offsets, sup_values, sup_probs):
    """Enumerate the product outcome space.

    Returns (expected max-weight value, per-item membership probability of
    the max-weight selection). Caller guards the outcome-count cap.
    """
    n = offsets.size - 1
    p = np.zeros(n)
    values = np.zeros(n)
    idx = np.zeros(n, np.int64)
    opt = 0.0
    for i in range(n):
        values[i] = sup_values[offsets[i]]
    while True:
        prob = 1.0
        for i in range(n):
            prob *= sup_probs[offsets[i] + idx[i]]
        total, accepted = max_weight_select(
            kind, num_vertices, eu, ev, block_id, caps, values)
        opt += prob * total
        for i in range(n):
            if accepted[i]:
                p[i] += prob
        # odometer step
        pos = n - 1
        while pos >= 0:
            idx[pos] += 1
            if offsets[pos] + idx[pos] < offsets[pos + 1]:
                values[pos] = sup_values[offsets[pos] + idx[pos]]
                break
            idx[pos] = 0
            values[pos] = sup_values[offsets[pos]]
            pos -= 1
        if pos < 0:
            break
    return opt, p


@jit_kernel
def rule_value_exact(kind, num_vertices, eu, ev, block_id, caps,
                     cons, pass_probs, cond_values, order):
    """Exact expected online value of a fixed threshold rule.

    cons lists the items with positive pass probability, sorted by arrival
    position. Enumerates all pass patterns; the accepted set depends only on
    the pattern, so each accepted item contributes its conditional value.
    """
    m = cons.size
    n = pass_probs.size
    take = np.zeros(n, np.bool_)
    total = 0.0
    for mask in range(1 << m):
        prob = 1.0
        for j in range(m):
            e = cons[j]
            if mask & (1 << j):
                prob *= pass_probs[e]
                take[e] = True
            else:
                prob *= 1.0 - pass_probs[e]
                take[e] = False
        if prob > 0.0:
            value, _ = greedy_select(kind, num_vertices, eu, ev,
                                     block_id, caps, order, take, cond_values)
            total += prob * value
    return total


@jit_kernel
def connect_probability(num_vertices, eu, ev, members, probs, tu, tv):
    """Probability that an independent activation of `members` (item i active
    with probability probs[i]) connects vertices tu and tv."""
    m = members.size
    parent = np.empty(num_vertices, np.int64)
    total = 0.0
    for mask in range(1 << m):
        prob = 1.0
        for j in range(m):
            e = members[j]
            if mask & (1 << j):
                prob *= probs[e]
            else:
                prob *= 1.0 - probs[e]
        if prob == 0.0:
            continue
        for v in range(num_vertices):
            parent[v] = v
        for j in range(m):
            if mask & (1 << j):
                e = members[j]
                ru = _find(parent, eu[e])
                rv = _find(parent, ev[e])
                if ru != rv:
                    parent[ru] = rv
        if _find(parent, tu) == _find(parent, tv):
            total += prob
    return total


@jit_kernel
def _cut_objective(num_vertices, eu, ev, heads, p, t, in_a, members):
    """Objective of one vertex cut: sum over crossing edges of
    p*t*(1 - blocking probability within the crossing set)."""
    n = heads.size
    m = 0
    for i in range(n):
        tail = eu[i] if heads[i] == ev[i] else ev[i]
        if in_a[tail] and not in_a[heads[i]]:
            members[m] = i
            m += 1
    total = 0.0
    others = np.empty(n, np.int64)
    for j in range(m):
        i = members[j]
        k = 0
        for jj in range(m):
            if jj != j:
                others[k] = members[jj]
                k += 1
        b = connect_probability(num_vertices, eu, ev, others[:k], p,
                                eu[i], ev[i])
        total += p[i] * t[i] * (1.0 - b)
    return total


@jit_kernel
def expected_cut_objective(num_vertices, eu, ev, heads, p, t, assign):
    """Average cut objective over uniform completions of a partial side
    assignment (per vertex: 1 side A, 0 side B, -1 undecided)."""
    free = np.empty(num_vertices, np.int64)
    f = 0
    for v in range(num_vertices):
        if assign[v] < 0:
            free[f] = v
            f += 1
    in_a = np.zeros(num_vertices, np.bool_)
    for v in range(num_vertices):
        in_a[v] = assign[v] == 1
    members = np.empty(heads.size, np.int64)
    total = 0.0
    for mask in range(1 << f):
        for j in range(f):
            in_a[free[j]] = bool(mask & (1 << j))
        total += _cut_objective(num_vertices, eu, ev, heads, p, t,
                                in_a, members)
    return total / (1 << f)


@jit_kernel
def mc_online_graphic(num_vertices, eu, ev, order, thresholds, atom_pass,
                      values, coin_u, consider):
    """Online trials for a graphic instance under a common arrival order.

    values, coin_u, consider are (trials, n) matrices; the threshold of a
    non-considered item is treated as infinite. Returns (per-trial values,
    per-trial accepted masks).
    """
    trials = values.shape[0]
    n = values.shape[1]
    out = np.empty(trials)
    accepted = np.zeros((trials, n), np.bool_)
    parent = np.empty(num_vertices, np.int64)
    for tr in range(trials):
        for v in range(num_vertices):
            parent[v] = v
        total = 0.0
        for j in range(n):
            e = order[j]
            if not consider[tr, e]:
                continue
            x = values[tr, e]
            if x > thresholds[e] or (x == thresholds[e]
                                     and coin_u[tr, e] < atom_pass[e]):
                ru = _find(parent, eu[e])
                rv = _find(parent, ev[e])
                if ru != rv:
                    parent[ru] = rv
                    accepted[tr, e] = True
                    total += x
        out[tr] = total
    return out, accepted


@jit_kernel
def mc_online_partition(block_id, caps, order, thresholds, atom_pass,
                        values, coin_u, consider):
    """Online trials for a partition-constrained instance."""
    trials = values.shape[0]
    n = values.shape[1]
    out = np.empty(trials)
    accepted = np.zeros((trials, n), np.bool_)
    used = np.empty(caps.size, np.int64)
    for tr in range(trials):
        for b in range(caps.size):
            used[b] = 0
        total = 0.0
        for j in range(n):
            e = order[j]
            if not consider[tr, e]:
                continue
            x = values[tr, e]
            if x > thresholds[e] or (x == thresholds[e]
                                     and coin_u[tr, e] < atom_pass[e]):
                b = block_id[e]
                if used[b] < caps[b]:
                    used[b] += 1
                    accepted[tr, e] = True
                    total += x
        out[tr] = total
    return out, accepted


@jit_kernel
def mc_max_weight(kind, num_vertices, eu, ev, block_id, caps, values):
    """Max-weight selection value per realization row, plus per-item counts
    of membership in the selection."""
    trials = values.shape[0]
    n = values.shape[1]
    out = np.empty(trials)
    counts = np.zeros(n, np.int64)
    for tr in range(trials):
        total, accepted = max_weight_select(
            kind, num_vertices, eu, ev, block_id, caps, values[tr])
        out[tr] = total
        for i in range(n):
            if accepted[i]:
                counts[i] += 1
    return out, counts
