"""Hot numeric loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports and ``MDSELECT_DISABLE_NUMBA`` is
unset (or ``0``). Both implementations are importable directly as
``<name>_numpy`` / ``<name>_numba`` so tests and benchmarks can compare them.
"""

import os

import numpy as np

_FLAG = os.environ.get("MDSELECT_DISABLE_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV
BACKEND = "numba" if USE_NUMBA else "numpy"

# floor for pooled tail masses that round to <= 0
_TINY = 1e-300


def _njit(fn):
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------------
# per-class term counts  l_ic
# --------------------------------------------------------------------------


def class_term_counts_numpy(labels, indptr, indices, data, n_classes, n_features):
    out = np.zeros((n_classes, n_features), dtype=np.int64)
    rows = np.repeat(labels, np.diff(indptr))
    np.add.at(out, (rows, indices), data)
    return out


def _class_term_counts(labels, indptr, indices, data, n_classes, n_features):
    out = np.zeros((n_classes, n_features), dtype=np.int64)
    for d in range(labels.shape[0]):
        c = labels[d]
        for j in range(indptr[d], indptr[d + 1]):
            out[c, indices[j]] += data[j]
    return out


class_term_counts_numba = _njit(_class_term_counts)


# --------------------------------------------------------------------------
# greedy maximum-J forward selection (two classes)
# --------------------------------------------------------------------------


def greedy_j_numpy(p1, p2, total1, total2, rtol):
    m = p1.shape[0]
    order = np.empty(m, dtype=np.int64)
    steps = np.empty(m, dtype=np.float64)
    free = np.ones(m, dtype=bool)
    log1, log2 = np.log(p1), np.log(p2)
    own_all = (p1 - p2) * (log1 - log2)
    rest1, rest2, base = total1, total2, 0.0
    for k in range(m):
        cand = np.flatnonzero(free)
        own = own_all[cand]
        if cand.size > 1:
            u = np.maximum(rest1 - p1[cand], _TINY)
            v = np.maximum(rest2 - p2[cand], _TINY)
            score = (base + own) + (u - v) * (np.log(u) - np.log(v))
        else:
            score = (base + own) + 0.0
        best = score.max()
        pick = np.argmax(score >= best - rtol * max(1.0, abs(best)))
        j = cand[pick]
        order[k] = j
        steps[k] = score[pick]
        free[j] = False
        base += own_all[j]
        rest1 -= p1[j]
        rest2 -= p2[j]
    return order, steps


def _greedy_j(p1, p2, total1, total2, rtol):
    m = p1.shape[0]
    order = np.empty(m, dtype=np.int64)
    steps = np.empty(m, dtype=np.float64)
    free = np.ones(m, dtype=np.bool_)
    own_all = (p1 - p2) * (np.log(p1) - np.log(p2))
    score = np.empty(m, dtype=np.float64)
    rest1, rest2, base = total1, total2, 0.0
    for k in range(m):
        last = k == m - 1
        best = -np.inf
        for i in range(m):
            if not free[i]:
                continue
            s = base + own_all[i]
            if last:
                s = s + 0.0
            else:
                u = max(rest1 - p1[i], _TINY)
                v = max(rest2 - p2[i], _TINY)
                s = s + (u - v) * (np.log(u) - np.log(v))
            score[i] = s
            if s > best:
                best = s
        thresh = best - rtol * max(1.0, abs(best))
        j = -1
        for i in range(m):
            if free[i] and score[i] >= thresh:
                j = i
                break
        order[k] = j
        steps[k] = score[j]
        free[j] = False
        base += own_all[j]
        rest1 -= p1[j]
        rest2 -= p2[j]
    return order, steps


greedy_j_numba = _njit(_greedy_j)


# --------------------------------------------------------------------------
# two-bin per-feature scores: {p_ic, 1 - p_ic} against {q_ic, 1 - q_ic}
# --------------------------------------------------------------------------


def _xlogxy_numpy(x, y):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(x / y), 0.0)


def two_bin_kl_sum_numpy(theta, q):
    """Sum over classes of KL between two-bin splits, one score per feature."""
    terms = _xlogxy_numpy(theta, q) + _xlogxy_numpy(1.0 - theta, 1.0 - q)
    out = np.zeros(theta.shape[1])
    for c in range(theta.shape[0]):
        out = out + terms[c]
    return out


def _two_bin_kl_sum(theta, q):
    n, m = theta.shape
    out = np.zeros(m)
    for c in range(n):
        for i in range(m):
            p, r = theta[c, i], q[c, i]
            a = p * np.log(p / r) if p > 0 else 0.0
            p1, r1 = 1.0 - p, 1.0 - r
            b = p1 * np.log(p1 / r1) if p1 > 0 else 0.0
            out[i] = out[i] + (a + b)
    return out


two_bin_kl_sum_numba = _njit(_two_bin_kl_sum)


def two_bin_nu_j_numpy(theta, q, length):
    """Sum over classes of the Pearson + Neyman noncentrality of two-bin splits."""
    d2 = (theta - q) ** 2
    terms = (d2 / q + d2 / (1.0 - q)) + (d2 / theta + d2 / (1.0 - theta))
    out = np.zeros(theta.shape[1])
    for c in range(theta.shape[0]):
        out = out + 0.5 * length * terms[c]
    return out


def _two_bin_nu_j(theta, q, length):
    n, m = theta.shape
    out = np.zeros(m)
    for c in range(n):
        for i in range(m):
            p, r = theta[c, i], q[c, i]
            d2 = (p - r) ** 2
            t = (d2 / r + d2 / (1.0 - r)) + (d2 / p + d2 / (1.0 - p))
            out[i] = out[i] + 0.5 * length * t
    return out


two_bin_nu_j_numba = _njit(_two_bin_nu_j)


def _pick(name):
    impl = globals()[f"{name}_numba"] if USE_NUMBA else None
    return impl if impl is not None else globals()[f"{name}_numpy"]


class_term_counts = _pick("class_term_counts")
greedy_j = _pick("greedy_j")
two_bin_kl_sum = _pick("two_bin_kl_sum")
two_bin_nu_j = _pick("two_bin_nu_j")
