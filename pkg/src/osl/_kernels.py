"""Numeric kernels behind the lattice and propagation code.

Every kernel has two implementations with identical signatures: a numba
``@njit`` version and a pure-numpy version. The numba set is used when numba
imports and ``OSL_NUMBA`` is not set to a false value (``0``, ``false``,
``no``, ``off``). Both sets stay importable as :data:`numba_kernels` and
:data:`numpy_kernels` so the benchmark can time them side by side.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _numba_requested() -> bool:
    flag = os.environ.get("OSL_NUMBA", "1").strip().lower()
    return flag not in {"0", "false", "no", "off"}


# ---------------------------------------------------------------------------
# pure numpy
# ---------------------------------------------------------------------------

def np_reflexive_closure(adj, topo):
    """Reachability (including self) of a DAG given a topological order."""
    n = adj.shape[0]
    reach = np.eye(n, dtype=np.bool_)
    for v in topo[::-1]:
        kids = np.flatnonzero(adj[v])
        if kids.size:
            reach[v] |= reach[kids].any(axis=0)
    return reach


def np_bound_table(leq, order):
    """Least-upper-bound table of the order ``leq``; -1 marks a missing bound.

    ``order`` must be a linear extension of ``leq``. The first upper bound met
    along it is minimal, so it is the lub iff every upper bound lies above it.
    """
    n = leq.shape[0]
    out = np.full((n, n), -1, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    leq_by_rank = leq[:, order]
    for a in range(n):
        ub = leq[a][None, :] & leq  # row b: upper bounds of {a, b}
        ub_ranked = leq_by_rank[a][None, :] & leq_by_rank
        has = ub_ranked.any(axis=1)
        first = order[np.argmax(ub_ranked, axis=1)]
        ok = has & ~(ub & ~leq[first]).any(axis=1)
        out[a, ok] = first[ok]
    return out


def np_rbp_update(row, obs_up, sit_up, n_sit, weight, out):
    ids = (obs_up[:, None] * n_sit + sit_up[None, :]).ravel()
    hit = ids[row[ids] < weight]
    row[hit] = weight
    out[: hit.size] = hit
    return hit.size, ids.size


def np_scatter_max(n_sit, rec_obs, rec_sit, rec_w, leq_o, leq_s, out):
    """Fill ``out`` with max weight over records whose node lies below each node."""
    n_obs = leq_o.shape[0]
    out[:] = 0.0
    step = max(1, 200_000 // max(1, out.size))
    for lo in range(0, rec_obs.size, step):
        hi = lo + step
        below = leq_o[rec_obs[lo:hi]][:, :, None] & leq_s[rec_sit[lo:hi]][:, None, :]
        vals = np.where(below.reshape(below.shape[0], n_obs * n_sit),
                        rec_w[lo:hi, None], 0.0)
        np.maximum(out, vals.max(axis=0), out=out)


def np_comparable_pairs(a_obs, a_sit, b_obs, b_sit, leq_o, leq_s):
    up = leq_o[a_obs][:, b_obs] & leq_s[a_sit][:, b_sit]
    down = leq_o[b_obs][:, a_obs].T & leq_s[b_sit][:, a_sit].T
    ia, ib = np.nonzero(up | down)
    return ia.astype(np.int64), ib.astype(np.int64)


numpy_kernels = SimpleNamespace(
    name="numpy",
    reflexive_closure=np_reflexive_closure,
    bound_table=np_bound_table,
    rbp_update=np_rbp_update,
    scatter_max=np_scatter_max,
    comparable_pairs=np_comparable_pairs,
)


# ---------------------------------------------------------------------------
# numba
# ---------------------------------------------------------------------------

numba_kernels = None

if numba is not None:
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def nb_reflexive_closure(adj, topo):
        n = adj.shape[0]
        reach = np.zeros((n, n), dtype=np.bool_)
        for k in range(n - 1, -1, -1):
            v = topo[k]
            reach[v, v] = True
            for c in range(n):
                if adj[v, c]:
                    for x in range(n):
                        if reach[c, x]:
                            reach[v, x] = True
        return reach

    @njit
    def nb_bound_table(leq, order):
        n = leq.shape[0]
        out = np.full((n, n), -1, dtype=np.int64)
        for a in range(n):
            for b in range(a, n):
                first = -1
                for k in range(n):
                    u = order[k]
                    if leq[a, u] and leq[b, u]:
                        first = u
                        break
                if first < 0:
                    continue
                ok = True
                for u in range(n):
                    if leq[a, u] and leq[b, u] and not leq[first, u]:
                        ok = False
                        break
                if ok:
                    out[a, b] = first
                    out[b, a] = first
        return out

    @njit
    def nb_rbp_update(row, obs_up, sit_up, n_sit, weight, out):
        count = 0
        visits = 0
        for i in range(obs_up.shape[0]):
            base = obs_up[i] * n_sit
            for j in range(sit_up.shape[0]):
                node = base + sit_up[j]
                visits += 1
                if row[node] < weight:
                    row[node] = weight
                    out[count] = node
                    count += 1
        return count, visits

    @njit
    def nb_scatter_max(n_sit, rec_obs, rec_sit, rec_w, leq_o, leq_s, out):
        n_obs = leq_o.shape[0]
        out[:] = 0.0
        for r in range(rec_obs.shape[0]):
            o = rec_obs[r]
            s = rec_sit[r]
            w = rec_w[r]
            for o2 in range(n_obs):
                if not leq_o[o, o2]:
                    continue
                for s2 in range(n_sit):
                    if leq_s[s, s2]:
                        node = o2 * n_sit + s2
                        if out[node] < w:
                            out[node] = w

    @njit
    def nb_comparable_pairs(a_obs, a_sit, b_obs, b_sit, leq_o, leq_s):
        na = a_obs.shape[0]
        nb = b_obs.shape[0]
        hits = np.zeros((na, nb), dtype=np.bool_)
        total = 0
        for i in range(na):
            for j in range(nb):
                oa, sa, ob, sb = a_obs[i], a_sit[i], b_obs[j], b_sit[j]
                if (leq_o[oa, ob] and leq_s[sa, sb]) or (leq_o[ob, oa] and leq_s[sb, sa]):
                    hits[i, j] = True
                    total += 1
        ia = np.empty(total, dtype=np.int64)
        ib = np.empty(total, dtype=np.int64)
        k = 0
        for i in range(na):
            for j in range(nb):
                if hits[i, j]:
                    ia[k] = i
                    ib[k] = j
                    k += 1
        return ia, ib

    numba_kernels = SimpleNamespace(
        name="numba",
        reflexive_closure=nb_reflexive_closure,
        bound_table=nb_bound_table,
        rbp_update=nb_rbp_update,
        scatter_max=nb_scatter_max,
        comparable_pairs=nb_comparable_pairs,
    )


active = numba_kernels if (numba_kernels is not None and _numba_requested()) else numpy_kernels
BACKEND = active.name
