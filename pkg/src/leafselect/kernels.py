"""Array kernels for the hot paths.

Trees are stored as a rotation array ``nbrs`` of shape ``(N, W)`` (``W >= 3``,
padded with -1) listing each node's neighbours counterclockwise, plus a degree
vector ``deg``.  Neighbourhoods use CSR layout: the neighbourhood of the marked
leaf ``marked[k]`` is ``nh_nodes[nh_ptr[k]:nh_ptr[k + 1]]``, sorted ascending.

Every function here is plain Python over numpy arrays and gets compiled by
numba unless ``LEAFSELECT_NO_JIT`` is set (see ``_jit``).  Kernels return a
``work`` counter where the caller certifies running time by step counts.
"""
import numpy as np

from ._jit import kernel

UNLABELED = 0
L_NODE = 1
C_NODE = 2
J_NODE = 3

COMPLETED = 0
DELIMITER_HIT = 1
EXHAUSTED = 2

KIND_L = 0
KIND_FIVE = 1


# ---------------------------------------------------------------------------
# leaf order
# ---------------------------------------------------------------------------

@kernel
def face_walk(nbrs, deg):
    """Cyclic leaf order of the single face, starting at the lowest-id leaf.

    Arriving at a node from ``x`` we leave through the successor of ``x`` in
    its counterclockwise rotation.  Returns ``(order, darts_walked)``.
    """
    N = deg.shape[0]
    n = 0
    start = -1
    for v in range(N):
        if deg[v] == 1:
            n += 1
            if start < 0:
                start = v
    order = np.empty(n, np.int64)
    if n == 0:
        return order, 0
    order[0] = start
    k = 1
    prev = start
    cur = nbrs[start, 0]
    work = 1
    limit = 2 * N + 2
    while cur != start and work < limit:
        work += 1
        d = deg[cur]
        if d == 1:
            if k < n:
                order[k] = cur
            k += 1
            nxt = nbrs[cur, 0]
        else:
            j = 0
            while j < d and nbrs[cur, j] != prev:
                j += 1
            nxt = nbrs[cur, (j + 1) % d]
        prev = cur
        cur = nxt
    return order, work


# ---------------------------------------------------------------------------
# contraction, labels, spines, components
# ---------------------------------------------------------------------------

@kernel
def steiner_contract(nbrs, deg, is_marked):
    """Prune unmarked leaves until every leaf is marked, then smooth.

    Returns ``(alive, is_tu, tu_nbr, tu_first, tu_deg, work)``.  ``is_tu``
    flags the nodes of the contracted tree (marked leaves and Steiner nodes
    of degree 3).  ``tu_nbr[v]`` lists the contracted-tree neighbours of such
    a node in rotation order and ``tu_first[v]`` the first original node on
    the path towards each of them.
    """
    N = deg.shape[0]
    sdeg = deg.copy()
    alive = np.ones(N, np.bool_)
    queue = np.empty(N, np.int64)
    qh = 0
    qt = 0
    for v in range(N):
        if deg[v] == 1 and not is_marked[v]:
            queue[qt] = v
            qt += 1
    while qh < qt:
        x = queue[qh]
        qh += 1
        alive[x] = False
        for j in range(deg[x]):
            y = nbrs[x, j]
            if alive[y]:
                sdeg[y] -= 1
                if sdeg[y] == 1 and not is_marked[y]:
                    queue[qt] = y
                    qt += 1
    work = N + qt
    is_tu = np.zeros(N, np.bool_)
    for v in range(N):
        if alive[v] and (is_marked[v] or sdeg[v] == 3):
            is_tu[v] = True
    tu_nbr = np.full((N, 3), -1, np.int64)
    tu_first = np.full((N, 3), -1, np.int64)
    tu_deg = np.zeros(N, np.int64)
    for v in range(N):
        if not is_tu[v]:
            continue
        k = 0
        for j in range(deg[v]):
            y = nbrs[v, j]
            if not alive[y]:
                continue
            prev = v
            cur = y
            while not is_tu[cur]:
                nxt = -1
                for jj in range(deg[cur]):
                    w = nbrs[cur, jj]
                    if w != prev and alive[w]:
                        nxt = w
                        break
                prev = cur
                cur = nxt
                work += 1
            if k < 3:
                tu_nbr[v, k] = cur
                tu_first[v, k] = y
            k += 1
        tu_deg[v] = k
    return alive, is_tu, tu_nbr, tu_first, tu_deg, work


@kernel
def classify_nodes(is_tu, tu_nbr, tu_deg, is_marked):
    """L/C/J labels from the number of contracted-tree leaves next to a node.

    Returns ``(label, lab_leaf, n_internal, degenerate)``; ``lab_leaf`` holds
    the (up to two) marked leaves that gave a node its label.
    """
    N = is_tu.shape[0]
    label = np.zeros(N, np.int64)
    lab_leaf = np.full((N, 2), -1, np.int64)
    n_internal = 0
    degenerate = False
    for v in range(N):
        if not is_tu[v] or is_marked[v]:
            continue
        n_internal += 1
        cnt = 0
        for j in range(tu_deg[v]):
            w = tu_nbr[v, j]
            if is_marked[w]:
                if cnt < 2:
                    lab_leaf[v, cnt] = w
                cnt += 1
        if cnt == 2:
            label[v] = L_NODE
        elif cnt == 1:
            label[v] = C_NODE
        elif cnt == 0:
            label[v] = J_NODE
        else:
            degenerate = True
    if n_internal < 2:
        degenerate = True
    return label, lab_leaf, n_internal, degenerate


@kernel
def _inner_pair(v, tu_nbr, is_marked):
    a = -1
    b = -1
    for j in range(3):
        w = tu_nbr[v, j]
        if w >= 0 and not is_marked[w]:
            if a < 0:
                a = w
            else:
                b = w
    return a, b


@kernel
def _tu_index(v, w, tu_nbr):
    for j in range(3):
        if tu_nbr[v, j] == w:
            return j
    return -1


@kernel
def find_spines(label, lab_leaf, tu_nbr, tu_first, is_marked):
    """Maximal runs of C-nodes, oriented from the smaller-id delimiter.

    Returns ``(spine_ptr, spine_nodes, spine_delim, side, c_prev, c_next,
    work)``.  ``side[c]`` is 0 when the C-node's leaf follows the anchor-side
    neighbour in the rotation, 1 otherwise; ``c_prev[c]``/``c_next[c]`` are
    the original neighbours of ``c`` on the path towards the anchor / far
    side of its spine.
    """
    N = label.shape[0]
    n_c = 0
    for v in range(N):
        if label[v] == C_NODE:
            n_c += 1
    spine_nodes = np.empty(n_c, np.int64)
    spine_ptr = np.zeros(n_c + 1, np.int64)
    spine_delim = np.full((n_c, 2), -1, np.int64)
    side = np.full(N, -1, np.int64)
    c_prev = np.full(N, -1, np.int64)
    c_next = np.full(N, -1, np.int64)
    seen = np.zeros(N, np.bool_)
    n_sp = 0
    pos = 0
    work = 0
    for v in range(N):
        if label[v] != C_NODE or seen[v]:
            continue
        a, b = _inner_pair(v, tu_nbr, is_marked)
        # walk towards ``a`` until leaving the run of C-nodes
        p = v
        c = a
        while label[c] == C_NODE:
            x, y = _inner_pair(c, tu_nbr, is_marked)
            nxt = x if x != p else y
            p = c
            c = nxt
            work += 1
        d1 = c
        end = p
        # collect the run from ``end`` towards the other delimiter
        start = pos
        spine_nodes[pos] = end
        pos += 1
        seen[end] = True
        p = d1
        c = end
        d2 = -1
        while True:
            x, y = _inner_pair(c, tu_nbr, is_marked)
            nxt = x if x != p else y
            work += 1
            if label[nxt] != C_NODE:
                d2 = nxt
                break
            spine_nodes[pos] = nxt
            pos += 1
            seen[nxt] = True
            p = c
            c = nxt
        if d1 > d2:
            i = start
            j = pos - 1
            while i < j:
                t = spine_nodes[i]
                spine_nodes[i] = spine_nodes[j]
                spine_nodes[j] = t
                i += 1
                j -= 1
            t = d1
            d1 = d2
            d2 = t
        spine_delim[n_sp, 0] = d1
        spine_delim[n_sp, 1] = d2
        n_sp += 1
        spine_ptr[n_sp] = pos
        for i in range(start, pos):
            c = spine_nodes[i]
            before = d1 if i == start else spine_nodes[i - 1]
            after = d2 if i == pos - 1 else spine_nodes[i + 1]
            jb = _tu_index(c, before, tu_nbr)
            ja = _tu_index(c, after, tu_nbr)
            c_prev[c] = tu_first[c, jb]
            c_next[c] = tu_first[c, ja]
            leaf = lab_leaf[c, 0]
            if tu_nbr[c, (jb + 1) % 3] == leaf:
                side[c] = 0
            else:
                side[c] = 1
    return (spine_ptr[:n_sp + 1], spine_nodes, spine_delim[:n_sp], side,
            c_prev, c_next, work)


@kernel
def build_components(label, lab_leaf, tu_nbr, tu_first, is_marked, mpos,
                     spine_ptr, spine_nodes, side, c_prev, c_next):
    """Component table: one row per L-component, then per 5-component.

    Columns: ``kind``, ``core`` (L-node or first C-node), ``far`` (last
    C-node or -1), ``rep`` (representative leaf), ``delim``/``dleaf`` (the
    delimiting nodes and the leaf selected when each is visited), ``cut``
    (the edges separating the component from the rest of the tree).
    Returns the table and the number of ungrouped C-nodes.
    """
    N = label.shape[0]
    n_l = 0
    for v in range(N):
        if label[v] == L_NODE:
            n_l += 1
    n_sp = spine_ptr.shape[0] - 1
    n_five = 0
    ungrouped = 0
    for s in range(n_sp):
        ln = spine_ptr[s + 1] - spine_ptr[s]
        n_five += ln // 5
        ungrouped += ln % 5
    K = n_l + n_five
    kind = np.empty(K, np.int64)
    core = np.empty(K, np.int64)
    far = np.full(K, -1, np.int64)
    rep = np.empty(K, np.int64)
    delim = np.full((K, 2), -1, np.int64)
    dleaf = np.full((K, 2), -1, np.int64)
    cut = np.full((K, 4), -1, np.int64)
    k = 0
    for v in range(N):
        if label[v] != L_NODE:
            continue
        a = lab_leaf[v, 0]
        b = lab_leaf[v, 1]
        if mpos[b] < mpos[a]:
            t = a
            a = b
            b = t
        kind[k] = KIND_L
        core[k] = v
        rep[k] = a
        delim[k, 0] = v
        dleaf[k, 0] = b
        for j in range(3):
            w = tu_nbr[v, j]
            if w >= 0 and not is_marked[w]:
                cut[k, 0] = v
                cut[k, 1] = tu_first[v, j]
        k += 1
    for s in range(n_sp):
        lo = spine_ptr[s]
        hi = spine_ptr[s + 1]
        g = lo
        while g + 5 <= hi:
            cnt0 = 0
            for i in range(g, g + 5):
                if side[spine_nodes[i]] == 0:
                    cnt0 += 1
            want = 0 if cnt0 >= 3 else 1
            q = -1
            mid = -1
            t = -1
            for i in range(g, g + 5):
                c = spine_nodes[i]
                if side[c] != want:
                    continue
                if q < 0:
                    q = c
                elif mid < 0:
                    mid = c
                elif t < 0:
                    t = c
            kind[k] = KIND_FIVE
            core[k] = spine_nodes[g]
            far[k] = spine_nodes[g + 4]
            rep[k] = lab_leaf[mid, 0]
            delim[k, 0] = q
            delim[k, 1] = t
            dleaf[k, 0] = lab_leaf[q, 0]
            dleaf[k, 1] = lab_leaf[t, 0]
            cut[k, 0] = spine_nodes[g]
            cut[k, 1] = c_prev[spine_nodes[g]]
            cut[k, 2] = spine_nodes[g + 4]
            cut[k, 3] = c_next[spine_nodes[g + 4]]
            k += 1
            g += 5
    return kind, core, far, rep, delim, dleaf, cut, ungrouped


@kernel
def flood_components(nbrs, deg, core, cut):
    """Component id of every node (-1 outside all components)."""
    N = deg.shape[0]
    comp = np.full(N, -1, np.int64)
    stack = np.empty(N, np.int64)
    for k in range(core.shape[0]):
        top = 0
        stack[0] = core[k]
        comp[core[k]] = k
        while top >= 0:
            v = stack[top]
            top -= 1
            for j in range(deg[v]):
                w = nbrs[v, j]
                if comp[w] == k:
                    continue
                if (v == cut[k, 0] and w == cut[k, 1]) or (v == cut[k, 2] and w == cut[k, 3]):
                    continue
                comp[w] = k
                top += 1
                stack[top] = w
    return comp


@kernel
def component_deltas(order, is_marked, comp, n_comp):
    """Longest run of consecutive unmarked leaves inside each component.

    Runs are taken in the cyclic leaf order and break at marked leaves and
    at leaves of other components.
    """
    n = order.shape[0]
    delta = np.zeros(n_comp, np.int64)
    if n == 0:
        return delta
    # rotate so that the scan starts right after a run boundary
    start = 0
    for i in range(n):
        v = order[i]
        if is_marked[v]:
            start = i
            break
    run = 0
    cur = -1
    for t in range(1, n + 1):
        v = order[(start + t) % n]
        k = comp[v]
        if is_marked[v] or k < 0:
            run = 0
            cur = -1
            continue
        if k == cur:
            run += 1
        else:
            cur = k
            run = 1
        if run > delta[k]:
            delta[k] = run
    return delta


# ---------------------------------------------------------------------------
# budgeted traversal and selection
# ---------------------------------------------------------------------------

@kernel
def _member(arr, lo, hi, x):
    a = lo
    b = hi
    while a < b:
        mid = (a + b) // 2
        if arr[mid] < x:
            a = mid + 1
        else:
            b = mid
    return a < hi and arr[a] == x


@kernel
def traverse(nbrs, deg, start, nh_nodes, lo, hi, d0, d1, budget,
             seen, token, st_node, st_from, st_k):
    """Depth-first walk of one neighbourhood, at most ``budget`` first visits.

    Children are taken in rotation order after the arrival edge.  Delimiters
    are checked when a node is visited.  Returns ``(outcome, hit, steps)``.
    """
    seen[start] = token
    steps = 1
    if start == d0 or start == d1:
        return DELIMITER_HIT, start, steps
    top = 0
    st_node[0] = start
    st_from[0] = -1
    st_k[0] = 0
    while top >= 0:
        v = st_node[top]
        dv = deg[v]
        if st_from[top] < 0:
            if st_k[top] >= dv:
                top -= 1
                continue
            j = st_k[top]
        else:
            if st_k[top] >= dv - 1:
                top -= 1
                continue
            j = (st_from[top] + 1 + st_k[top]) % dv
        st_k[top] += 1
        w = nbrs[v, j]
        if seen[w] == token:
            continue
        if not _member(nh_nodes, lo, hi, w):
            continue
        if steps == budget:
            return EXHAUSTED, -1, steps
        steps += 1
        seen[w] = token
        if w == d0 or w == d1:
            return DELIMITER_HIT, w, steps
        a = 0
        while nbrs[w, a] != v:
            a += 1
        top += 1
        st_node[top] = w
        st_from[top] = a
        st_k[top] = 0
    return COMPLETED, -1, steps


@kernel
def select_components(nbrs, deg, midx, nh_ptr, nh_nodes, kind, rep, delim,
                      dleaf, z):
    """Run the per-component traversal and apply the selection rule.

    Returns ``(outcome, hit, steps, chosen)`` per component; ``chosen`` is
    -1 when the budget ran out.
    """
    N = deg.shape[0]
    K = kind.shape[0]
    outcome = np.empty(K, np.int64)
    hit = np.full(K, -1, np.int64)
    steps = np.empty(K, np.int64)
    chosen = np.full(K, -1, np.int64)
    seen = np.full(N, -1, np.int64)
    st_node = np.empty(N, np.int64)
    st_from = np.empty(N, np.int64)
    st_k = np.empty(N, np.int64)
    for k in range(K):
        leaf = rep[k]
        i = midx[leaf]
        budget = 4 * z if kind[k] == KIND_L else 10 * z
        out, h, s = traverse(nbrs, deg, leaf, nh_nodes, nh_ptr[i], nh_ptr[i + 1],
                             delim[k, 0], delim[k, 1], budget, seen, k,
                             st_node, st_from, st_k)
        outcome[k] = out
        hit[k] = h
        steps[k] = s
        if out == COMPLETED:
            chosen[k] = leaf
        elif out == DELIMITER_HIT:
            if h == delim[k, 0]:
                chosen[k] = dleaf[k, 0]
            else:
                chosen[k] = dleaf[k, 1]
    return outcome, hit, steps, chosen


@kernel
def isolated_leaf(nh_ptr, nh_nodes, n_nodes):
    """First marked index whose neighbourhood meets no other neighbourhood.

    Returns ``(index or -1, work)``.
    """
    m = nh_ptr.shape[0] - 1
    count = np.zeros(n_nodes, np.int64)
    work = 0
    for t in range(nh_ptr[m]):
        count[nh_nodes[t]] += 1
        work += 1
    for k in range(m):
        ok = True
        for t in range(nh_ptr[k], nh_ptr[k + 1]):
            work += 1
            if count[nh_nodes[t]] > 1:
                ok = False
                break
        if ok:
            return k, work
    return -1, work


# ---------------------------------------------------------------------------
# validation and verification
# ---------------------------------------------------------------------------

@kernel
def tree_ok(nbrs, deg):
    """True when ``(nbrs, deg)`` is a proper tree with symmetric rotations."""
    N = deg.shape[0]
    if N < 2 or nbrs.shape[1] < 3:
        return False
    twice = 0
    for v in range(N):
        d = deg[v]
        if d != 1 and d != 3:
            return False
        twice += d
        for j in range(d):
            w = nbrs[v, j]
            if w < 0 or w >= N or w == v:
                return False
            for jj in range(j):
                if nbrs[v, jj] == w:
                    return False
            back = False
            for jj in range(deg[w]):
                if nbrs[w, jj] == v:
                    back = True
            if not back:
                return False
    if twice != 2 * (N - 1):
        return False
    seen = np.zeros(N, np.bool_)
    stack = np.empty(N, np.int64)
    stack[0] = 0
    seen[0] = True
    top = 0
    count = 1
    while top >= 0:
        v = stack[top]
        top -= 1
        for j in range(deg[v]):
            w = nbrs[v, j]
            if not seen[w]:
                seen[w] = True
                count += 1
                top += 1
                stack[top] = w
    return count == N


@kernel
def check_neighborhoods(nbrs, deg, marked, nh_ptr, nh_nodes, cyc):
    """Per-neighbourhood shape checks plus the consecutive-disjointness test.

    ``cyc`` lists marked indices in cyclic leaf order.  Returns
    ``(has_leaf, connected, deg2_witness, overlap_witness)`` where
    ``deg2_witness[k]`` is a node of degree 2 inside neighbourhood ``k`` (or
    -1) and ``overlap_witness[i]`` a node shared by the neighbourhoods of
    ``cyc[i]`` and ``cyc[i + 1]`` (or -1).
    """
    N = deg.shape[0]
    m = marked.shape[0]
    stamp = np.full(N, -1, np.int64)
    has_leaf = np.ones(m, np.bool_)
    connected = np.ones(m, np.bool_)
    deg2 = np.full(m, -1, np.int64)
    for k in range(m):
        lo = nh_ptr[k]
        hi = nh_ptr[k + 1]
        for t in range(lo, hi):
            stamp[nh_nodes[t]] = k
        twice_edges = 0
        for t in range(lo, hi):
            x = nh_nodes[t]
            c = 0
            for j in range(deg[x]):
                if stamp[nbrs[x, j]] == k:
                    c += 1
            twice_edges += c
            if c == 2 and deg2[k] < 0:
                deg2[k] = x
        if twice_edges // 2 != (hi - lo) - 1:
            connected[k] = False
        if stamp[marked[k]] != k:
            has_leaf[k] = False
    overlap = np.full(m, -1, np.int64)
    if m >= 2:
        stamp2 = np.full(N, -1, np.int64)
        pairs = m if m > 2 else 1
        for i in range(pairs):
            a = cyc[i]
            b = cyc[(i + 1) % m]
            for t in range(nh_ptr[a], nh_ptr[a + 1]):
                stamp2[nh_nodes[t]] = i
            for t in range(nh_ptr[b], nh_ptr[b + 1]):
                if stamp2[nh_nodes[t]] == i:
                    overlap[i] = nh_nodes[t]
                    break
    return has_leaf, connected, deg2, overlap


@kernel
def count_conflicts(nbrs, deg, nh_ptr, nh_nodes, sel):
    """Number of shared nodes and of bridging edges among selected leaves.

    ``sel`` holds marked indices.  Bridging edges are counted once per
    direction.
    """
    N = deg.shape[0]
    owner = np.full(N, -1, np.int64)
    shared = 0
    for s in range(sel.shape[0]):
        k = sel[s]
        for t in range(nh_ptr[k], nh_ptr[k + 1]):
            x = nh_nodes[t]
            if owner[x] >= 0 and owner[x] != s:
                shared += 1
            owner[x] = s
    bridges = 0
    for s in range(sel.shape[0]):
        k = sel[s]
        for t in range(nh_ptr[k], nh_ptr[k + 1]):
            x = nh_nodes[t]
            for j in range(deg[x]):
                y = nbrs[x, j]
                if owner[y] >= 0 and owner[y] != owner[x]:
                    bridges += 1
    return shared, bridges


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

@kernel
def subdivide_edges(nbrs, deg, ea, eb, n_edges, next_id, lo, u_edge, u_flip):
    """Insert one new leaf per random draw by subdividing an edge.

    Only edges with index ``>= lo`` are eligible; the edges created stay in
    that range.  Returns the new ``(n_edges, next_id)``.
    """
    for t in range(u_edge.shape[0]):
        e = lo + int(u_edge[t] * (n_edges - lo))
        if e >= n_edges:
            e = n_edges - 1
        a = ea[e]
        b = eb[e]
        w = next_id
        x = next_id + 1
        next_id += 2
        for j in range(deg[a]):
            if nbrs[a, j] == b:
                nbrs[a, j] = w
        for j in range(deg[b]):
            if nbrs[b, j] == a:
                nbrs[b, j] = w
        nbrs[w, 0] = a
        if u_flip[t] < 0.5:
            nbrs[w, 1] = b
            nbrs[w, 2] = x
        else:
            nbrs[w, 1] = x
            nbrs[w, 2] = b
        deg[w] = 3
        nbrs[x, 0] = w
        deg[x] = 1
        eb[e] = w
        ea[n_edges] = w
        eb[n_edges] = b
        n_edges += 1
        ea[n_edges] = w
        eb[n_edges] = x
        n_edges += 1
    return n_edges, next_id


@kernel
def caterpillar(n, k, sides):
    """Path of ``k`` internal nodes carrying ``n`` leaves in total.

    The two end nodes carry two leaves each, every other path node one leaf
    on side ``sides[i]``; leftover leaves (``n > k + 2``) are not placed here.
    Path edges come first in the returned edge arrays.
    """
    N = 2 * n - 2
    nbrs = np.full((N, 3), -1, np.int64)
    deg = np.zeros(N, np.int64)
    ea = np.empty(N - 1, np.int64)
    eb = np.empty(N - 1, np.int64)
    ne = 0
    for i in range(k - 1):
        ea[ne] = i
        eb[ne] = i + 1
        ne += 1
    nxt = k
    if k == 1:
        for j in range(3):
            nbrs[0, j] = nxt
            nbrs[nxt, 0] = 0
            deg[nxt] = 1
            ea[ne] = 0
            eb[ne] = nxt
            ne += 1
            nxt += 1
        deg[0] = 3
        return nbrs, deg, ea, eb, ne, nxt
    for i in range(k):
        if i == 0:
            l1 = nxt
            l2 = nxt + 1
            nxt += 2
            nbrs[i, 0] = l1
            nbrs[i, 1] = l2
            nbrs[i, 2] = 1
            for l in (l1, l2):
                nbrs[l, 0] = i
                deg[l] = 1
                ea[ne] = i
                eb[ne] = l
                ne += 1
        elif i == k - 1:
            l1 = nxt
            l2 = nxt + 1
            nxt += 2
            nbrs[i, 0] = i - 1
            nbrs[i, 1] = l1
            nbrs[i, 2] = l2
            for l in (l1, l2):
                nbrs[l, 0] = i
                deg[l] = 1
                ea[ne] = i
                eb[ne] = l
                ne += 1
        else:
            l1 = nxt
            nxt += 1
            nbrs[i, 0] = i - 1
            if sides[i] == 0:
                nbrs[i, 1] = l1
                nbrs[i, 2] = i + 1
            else:
                nbrs[i, 1] = i + 1
                nbrs[i, 2] = l1
            nbrs[l1, 0] = i
            deg[l1] = 1
            ea[ne] = i
            eb[ne] = l1
            ne += 1
        deg[i] = 3
    return nbrs, deg, ea, eb, ne, nxt


@kernel
def balanced(n):
    """Minimal-depth proper tree: leaves split in halves around a root edge."""
    N = 2 * n - 2
    nbrs = np.full((N, 3), -1, np.int64)
    deg = np.zeros(N, np.int64)
    st_v = np.empty(N, np.int64)
    st_p = np.empty(N, np.int64)
    st_k = np.empty(N, np.int64)
    st_v[0] = 0
    st_p[0] = 1
    st_k[0] = (n + 1) // 2
    st_v[1] = 1
    st_p[1] = 0
    st_k[1] = n // 2
    top = 1
    nxt = 2
    while top >= 0:
        v = st_v[top]
        p = st_p[top]
        k = st_k[top]
        top -= 1
        nbrs[v, 0] = p
        if k == 1:
            deg[v] = 1
            continue
        c1 = nxt
        c2 = nxt + 1
        nxt += 2
        nbrs[v, 1] = c1
        nbrs[v, 2] = c2
        deg[v] = 3
        top += 1
        st_v[top] = c2
        st_p[top] = v
        st_k[top] = k // 2
        top += 1
        st_v[top] = c1
        st_p[top] = v
        st_k[top] = (k + 1) // 2
    return nbrs, deg


@kernel
def grow_neighborhoods(nbrs, deg, morder, targets, rand):
    """Grow one proper neighbourhood per marked leaf, in cyclic order.

    Each neighbourhood starts at its leaf, then takes the leaf's neighbour,
    then repeatedly expands a random neighbourhood leaf of tree degree 3 by
    both of its outside neighbours, so every intermediate set is a proper
    subtree.  Nodes of the two cyclically adjacent neighbourhoods are off
    limits; a neighbour not grown yet is reserved as its bare leaf.
    Returns CSR arrays indexed by position in ``morder``.
    """
    N = deg.shape[0]
    m = morder.shape[0]
    cap = 0
    for i in range(m):
        cap += targets[i] + 1
    nh_ptr = np.zeros(m + 1, np.int64)
    nh_nodes = np.empty(cap, np.int64)
    cur = np.full(N, -1, np.int64)
    prevtok = np.full(N, -1, np.int64)
    first = np.zeros(N, np.bool_)
    cand = np.empty(N, np.int64)
    R = rand.shape[0]
    r = 0
    pos = 0
    for i in range(m):
        leaf = morder[i]
        nxt_leaf = morder[(i + 1) % m]
        prv_leaf = morder[(i - 1) % m]
        start = pos
        nh_nodes[pos] = leaf
        pos += 1
        cur[leaf] = i
        size = 1
        nc = 0
        if targets[i] > 1:
            y = nbrs[leaf, 0]
            ok = True
            if m > 1:
                if i == m - 1:
                    ok = not first[y]
                else:
                    ok = y != nxt_leaf
                if i == 0:
                    ok = ok and y != prv_leaf
                else:
                    ok = ok and prevtok[y] != i - 1
            if ok:
                cur[y] = i
                nh_nodes[pos] = y
                pos += 1
                size += 1
                if deg[y] == 3:
                    cand[nc] = y
                    nc += 1
        while size < targets[i] and nc > 0:
            t = int(rand[r % R] * nc)
            r += 1
            if t >= nc:
                t = nc - 1
            x = cand[t]
            cand[t] = cand[nc - 1]
            nc -= 1
            ok = True
            for j in range(3):
                y = nbrs[x, j]
                if cur[y] == i or m == 1:
                    continue
                if i == m - 1:
                    if first[y]:
                        ok = False
                elif y == nxt_leaf:
                    ok = False
                if i == 0:
                    if y == prv_leaf:
                        ok = False
                elif prevtok[y] == i - 1:
                    ok = False
            if not ok:
                continue
            for j in range(3):
                y = nbrs[x, j]
                if cur[y] == i:
                    continue
                cur[y] = i
                nh_nodes[pos] = y
                pos += 1
                size += 1
                if deg[y] == 3:
                    cand[nc] = y
                    nc += 1
        nh_nodes[start:pos] = np.sort(nh_nodes[start:pos])
        nh_ptr[i + 1] = pos
        for t in range(start, pos):
            prevtok[nh_nodes[t]] = i
            if i == 0:
                first[nh_nodes[t]] = True
    return nh_ptr, nh_nodes[:pos].copy()
