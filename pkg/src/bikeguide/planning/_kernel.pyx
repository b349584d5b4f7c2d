# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled A* kernel; behaviourally identical to kernel_py.solve.

Same expansion order, same (f, insertion-sequence) tie-breaking, same
hmax heuristic, so both backends return byte-identical plans. States are
packed into 64-bit words; the open list, g-values and parents live in C
arrays. Only state interning goes through a Python dict (bytes keys).
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy
from cpython.bytes cimport PyBytes_FromStringAndSize

ctypedef unsigned long long u64
ctypedef long long i64

cdef i64 INF64 = (<i64>1) << 62

BACKEND_NAME = "compiled"


cdef struct Heap:
    i64* f
    i64* seq
    int* idx
    Py_ssize_t size
    Py_ssize_t cap


cdef int heap_init(Heap* h, Py_ssize_t cap) except -1:
    h.f = <i64*>malloc(cap * sizeof(i64))
    h.seq = <i64*>malloc(cap * sizeof(i64))
    h.idx = <int*>malloc(cap * sizeof(int))
    if h.f == NULL or h.seq == NULL or h.idx == NULL:
        raise MemoryError()
    h.size = 0
    h.cap = cap
    return 0


cdef void heap_free(Heap* h) noexcept:
    free(h.f)
    free(h.seq)
    free(h.idx)


cdef inline bint heap_less(Heap* h, Py_ssize_t a, Py_ssize_t b) noexcept:
    if h.f[a] != h.f[b]:
        return h.f[a] < h.f[b]
    return h.seq[a] < h.seq[b]


cdef inline void heap_swap(Heap* h, Py_ssize_t a, Py_ssize_t b) noexcept:
    cdef i64 tf = h.f[a]
    cdef i64 ts = h.seq[a]
    cdef int ti = h.idx[a]
    h.f[a] = h.f[b]; h.seq[a] = h.seq[b]; h.idx[a] = h.idx[b]
    h.f[b] = tf; h.seq[b] = ts; h.idx[b] = ti


cdef int heap_push(Heap* h, i64 f, i64 seq, int idx) except -1:
    cdef Py_ssize_t i, up
    if h.size == h.cap:
        h.cap = h.cap * 2
        h.f = <i64*>realloc(h.f, h.cap * sizeof(i64))
        h.seq = <i64*>realloc(h.seq, h.cap * sizeof(i64))
        h.idx = <int*>realloc(h.idx, h.cap * sizeof(int))
        if h.f == NULL or h.seq == NULL or h.idx == NULL:
            raise MemoryError()
    i = h.size
    h.f[i] = f; h.seq[i] = seq; h.idx[i] = idx
    h.size += 1
    while i > 0:
        up = (i - 1) >> 1
        if heap_less(h, i, up):
            heap_swap(h, i, up)
            i = up
        else:
            break
    return 0


cdef void heap_pop(Heap* h, i64* f_out, int* idx_out) noexcept:
    cdef Py_ssize_t i = 0, left, right, best
    f_out[0] = h.f[0]
    idx_out[0] = h.idx[0]
    h.size -= 1
    if h.size == 0:
        return
    h.f[0] = h.f[h.size]; h.seq[0] = h.seq[h.size]; h.idx[0] = h.idx[h.size]
    while True:
        left = 2 * i + 1
        right = left + 1
        best = i
        if left < h.size and heap_less(h, left, best):
            best = left
        if right < h.size and heap_less(h, right, best):
            best = right
        if best == i:
            break
        heap_swap(h, i, best)
        i = best


cdef i64 hmax_eval(u64* state, int W, int F, int A,
                   int* pre_flat, int* pre_off,
                   int* add_flat, int* add_off,
                   i64* costs,
                   int* goal_bits, int n_goal,
                   i64* val) noexcept:
    cdef int i, a, k, p, q
    cdef i64 worst, ca, v, h
    cdef bint changed = True
    for i in range(F):
        if state[i >> 6] >> (i & 63) & 1:
            val[i] = 0
        else:
            val[i] = INF64
    while changed:
        changed = False
        for a in range(A):
            worst = 0
            for k in range(pre_off[a], pre_off[a + 1]):
                p = pre_flat[k]
                v = val[p]
                if v >= INF64:
                    worst = INF64
                    break
                if v > worst:
                    worst = v
            if worst >= INF64:
                continue
            ca = costs[a] + worst
            for k in range(add_off[a], add_off[a + 1]):
                q = add_flat[k]
                if ca < val[q]:
                    val[q] = ca
                    changed = True
    h = 0
    for k in range(n_goal):
        v = val[goal_bits[k]]
        if v >= INF64:
            return INF64
        if v > h:
            h = v
    return h


cdef inline i64 h_of(u64* state, int W, int F, int A,
                     int* pre_flat, int* pre_off, int* add_flat, int* add_off,
                     i64* costs, int* goal_bits, int n_goal, i64* val,
                     bint use_hmax) noexcept:
    if not use_hmax:
        return 0
    return hmax_eval(state, W, F, A, pre_flat, pre_off, add_flat, add_off,
                     costs, goal_bits, n_goal, val)


def solve(int num_fluents, list pre_masks, list add_masks, list del_masks,
          list costs, object start_mask, object goal_mask,
          bint use_hmax=True):
    """A* search; returns (action index list, scaled cost) or None."""
    cdef int A = len(pre_masks)
    cdef int W = (num_fluents + 63) >> 6
    cdef int F = num_fluents

    cdef u64* pre_w = NULL
    cdef u64* add_w = NULL
    cdef u64* del_w = NULL
    cdef u64* goal_w = NULL
    cdef i64* cost_arr = NULL
    cdef i64* val_buf = NULL
    cdef int* pre_off = NULL
    cdef int* add_off = NULL
    cdef int* pre_flat = NULL
    cdef int* add_flat = NULL
    cdef int* goal_bits = NULL
    cdef int n_goal = 0

    cdef Py_ssize_t cap_states = 1024
    cdef Py_ssize_t num_states = 0
    cdef u64* states = NULL
    cdef i64* g = NULL
    cdef int* par_state = NULL
    cdef int* par_action = NULL
    cdef char* closed = NULL
    cdef u64* scratch = NULL

    cdef Heap heap
    cdef bint heap_ready = False

    cdef int a, w, i, k, total_pre, total_add
    cdef object m, key, found
    cdef u64 word_mask = <u64>0xFFFFFFFFFFFFFFFFULL
    cdef i64 h0, seq, fcur, gs, ng, hn
    cdef int sidx, nidx
    cdef bint is_goal, appl
    cdef list path
    cdef dict intern = {}

    if W == 0:
        W = 1

    try:
        pre_w = <u64*>malloc(<size_t>A * W * sizeof(u64))
        add_w = <u64*>malloc(<size_t>A * W * sizeof(u64))
        del_w = <u64*>malloc(<size_t>A * W * sizeof(u64))
        goal_w = <u64*>malloc(W * sizeof(u64))
        cost_arr = <i64*>malloc((A if A else 1) * sizeof(i64))
        val_buf = <i64*>malloc((F if F > 0 else 1) * sizeof(i64))
        pre_off = <int*>malloc((A + 1) * sizeof(int))
        add_off = <int*>malloc((A + 1) * sizeof(int))
        states = <u64*>malloc(<size_t>cap_states * W * sizeof(u64))
        g = <i64*>malloc(cap_states * sizeof(i64))
        par_state = <int*>malloc(cap_states * sizeof(int))
        par_action = <int*>malloc(cap_states * sizeof(int))
        closed = <char*>malloc(cap_states * sizeof(char))
        scratch = <u64*>malloc(W * sizeof(u64))
        if (pre_w == NULL or add_w == NULL or del_w == NULL or goal_w == NULL
                or cost_arr == NULL or val_buf == NULL or pre_off == NULL
                or add_off == NULL or states == NULL or g == NULL
                or par_state == NULL or par_action == NULL or closed == NULL
                or scratch == NULL):
            raise MemoryError()
        heap_init(&heap, 1024)
        heap_ready = True

        # --- encode masks into words ---
        for a in range(A):
            m = pre_masks[a]
            for w in range(W):
                pre_w[a * W + w] = <u64>(m & word_mask)
                m = m >> 64
            m = add_masks[a]
            for w in range(W):
                add_w[a * W + w] = <u64>(m & word_mask)
                m = m >> 64
            m = del_masks[a]
            for w in range(W):
                del_w[a * W + w] = <u64>(m & word_mask)
                m = m >> 64
            cost_arr[a] = <i64>costs[a]
        m = goal_mask
        for w in range(W):
            goal_w[w] = <u64>(m & word_mask)
            m = m >> 64

        # --- flatten bit lists for hmax ---
        total_pre = 0
        total_add = 0
        for a in range(A):
            pre_off[a] = total_pre
            add_off[a] = total_add
            for i in range(F):
                if pre_w[a * W + (i >> 6)] >> (i & 63) & 1:
                    total_pre += 1
                if add_w[a * W + (i >> 6)] >> (i & 63) & 1:
                    total_add += 1
        pre_off[A] = total_pre
        add_off[A] = total_add
        pre_flat = <int*>malloc((total_pre if total_pre else 1) * sizeof(int))
        add_flat = <int*>malloc((total_add if total_add else 1) * sizeof(int))
        if pre_flat == NULL or add_flat == NULL:
            raise MemoryError()
        total_pre = 0
        total_add = 0
        for a in range(A):
            for i in range(F):
                if pre_w[a * W + (i >> 6)] >> (i & 63) & 1:
                    pre_flat[total_pre] = i
                    total_pre += 1
                if add_w[a * W + (i >> 6)] >> (i & 63) & 1:
                    add_flat[total_add] = i
                    total_add += 1
        for i in range(F):
            if goal_w[i >> 6] >> (i & 63) & 1:
                n_goal += 1
        goal_bits = <int*>malloc((n_goal if n_goal else 1) * sizeof(int))
        if goal_bits == NULL:
            raise MemoryError()
        k = 0
        for i in range(F):
            if goal_w[i >> 6] >> (i & 63) & 1:
                goal_bits[k] = i
                k += 1

        # --- intern the start state ---
        m = start_mask
        for w in range(W):
            scratch[w] = <u64>(m & word_mask)
            m = m >> 64
        memcpy(states, scratch, W * sizeof(u64))
        intern[PyBytes_FromStringAndSize(<char*>scratch, W * sizeof(u64))] = 0
        g[0] = 0
        par_state[0] = -1
        par_action[0] = -1
        closed[0] = 0
        num_states = 1

        h0 = h_of(scratch, W, F, A, pre_flat, pre_off, add_flat, add_off,
                  cost_arr, goal_bits, n_goal, val_buf, use_hmax)
        if h0 >= INF64:
            return None
        heap_push(&heap, h0, 0, 0)
        seq = 1

        while heap.size > 0:
            heap_pop(&heap, &fcur, &sidx)
            if closed[sidx]:
                continue
            closed[sidx] = 1
            is_goal = True
            for w in range(W):
                if states[sidx * W + w] & goal_w[w] != goal_w[w]:
                    is_goal = False
                    break
            if is_goal:
                path = []
                i = sidx
                while par_state[i] >= 0:
                    path.append(par_action[i])
                    i = par_state[i]
                path.reverse()
                return path, g[sidx]
            gs = g[sidx]
            for a in range(A):
                appl = True
                for w in range(W):
                    if states[sidx * W + w] & pre_w[a * W + w] != pre_w[a * W + w]:
                        appl = False
                        break
                if not appl:
                    continue
                for w in range(W):
                    scratch[w] = (states[sidx * W + w] & ~del_w[a * W + w]) | add_w[a * W + w]
                key = PyBytes_FromStringAndSize(<char*>scratch, W * sizeof(u64))
                found = intern.get(key)
                if found is None:
                    nidx = <int>num_states
                    if num_states == cap_states:
                        cap_states = cap_states * 2
                        states = <u64*>realloc(states, <size_t>cap_states * W * sizeof(u64))
                        g = <i64*>realloc(g, cap_states * sizeof(i64))
                        par_state = <int*>realloc(par_state, cap_states * sizeof(int))
                        par_action = <int*>realloc(par_action, cap_states * sizeof(int))
                        closed = <char*>realloc(closed, cap_states * sizeof(char))
                        if (states == NULL or g == NULL or par_state == NULL
                                or par_action == NULL or closed == NULL):
                            raise MemoryError()
                    memcpy(states + nidx * W, scratch, W * sizeof(u64))
                    g[nidx] = -1
                    par_state[nidx] = -1
                    par_action[nidx] = -1
                    closed[nidx] = 0
                    intern[key] = nidx
                    num_states += 1
                else:
                    nidx = <int>found
                if closed[nidx]:
                    continue
                ng = gs + cost_arr[a]
                if g[nidx] >= 0 and g[nidx] <= ng:
                    continue
                hn = h_of(scratch, W, F, A, pre_flat, pre_off, add_flat,
                          add_off, cost_arr, goal_bits, n_goal, val_buf,
                          use_hmax)
                if hn >= INF64:
                    continue
                g[nidx] = ng
                par_state[nidx] = sidx
                par_action[nidx] = a
                heap_push(&heap, ng + hn, seq, nidx)
                seq += 1
        return None
    finally:
        if heap_ready:
            heap_free(&heap)
        free(pre_w); free(add_w); free(del_w); free(goal_w)
        free(cost_arr); free(val_buf)
        free(pre_off); free(add_off)
        free(pre_flat); free(add_flat); free(goal_bits)
        free(states); free(g); free(par_state); free(par_action); free(closed)
        free(scratch)
