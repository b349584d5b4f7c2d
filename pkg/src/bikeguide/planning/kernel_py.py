"""Pure-Python A* kernel over bitmask-encoded problems.

Reference implementation of the search contract; the compiled kernel in
_kernel.pyx mirrors it operation for operation so both backends return
identical plans. Priorities are (f, insertion-sequence): with actions
pre-sorted lexicographically, ties resolve the same way on every run.

The heuristic is hmax computed on the delete-relaxed problem; it is
admissible and consistent, so the first goal expansion is optimal.
With use_hmax=False the search degrades to uniform-cost.
"""

from __future__ import annotations

from heapq import heappop, heappush

INF = float("inf")

BACKEND_NAME = "pure"


def _mask_bits(mask: int, num_fluents: int) -> list:
    return [i for i in range(num_fluents) if mask >> i & 1]


def _hmax(state_mask: int, num_fluents: int, pre_bits, add_bits, costs,
          goal_bits):
    val = [0 if state_mask >> i & 1 else INF for i in range(num_fluents)]
    num_actions = len(costs)
    changed = True
    while changed:
        changed = False
        for a in range(num_actions):
            worst = 0
            for p in pre_bits[a]:
                v = val[p]
                if v == INF:
                    worst = INF
                    break
                if v > worst:
                    worst = v
            if worst == INF:
                continue
            ca = costs[a] + worst
            for q in add_bits[a]:
                if ca < val[q]:
                    val[q] = ca
                    changed = True
    h = 0
    for gbit in goal_bits:
        v = val[gbit]
        if v == INF:
            return INF
        if v > h:
            h = v
    return h


def solve(num_fluents: int, pre_masks, add_masks, del_masks, costs,
          start_mask: int, goal_mask: int, use_hmax: bool = True):
    """A* search; returns (action index list, scaled cost) or None."""
    num_actions = len(pre_masks)
    pre_bits = [_mask_bits(m, num_fluents) for m in pre_masks]
    add_bits = [_mask_bits(m, num_fluents) for m in add_masks]
    goal_bits = _mask_bits(goal_mask, num_fluents)
    not_dels = [~m for m in del_masks]

    def h(s: int):
        if not use_hmax:
            return 0
        return _hmax(s, num_fluents, pre_bits, add_bits, costs, goal_bits)

    h0 = h(start_mask)
    if h0 == INF:
        return None
    g = {start_mask: 0}
    parent = {}
    closed = set()
    heap = [(h0, 0, start_mask)]
    seq = 1

    while heap:
        _, _, s = heappop(heap)
        if s in closed:
            continue
        closed.add(s)
        if s & goal_mask == goal_mask:
            path = []
            cur = s
            while cur in parent:
                prev, act = parent[cur]
                path.append(act)
                cur = prev
            path.reverse()
            return path, g[s]
        gs = g[s]
        for a in range(num_actions):
            pre = pre_masks[a]
            if s & pre != pre:
                continue
            ns = (s & not_dels[a]) | add_masks[a]
            if ns in closed:
                continue
            ng = gs + costs[a]
            old = g.get(ns)
            if old is not None and old <= ng:
                continue
            hn = h(ns)
            if hn == INF:
                continue
            g[ns] = ng
            parent[ns] = (s, a)
            heappush(heap, (ng + hn, seq, ns))
            seq += 1
    return None
