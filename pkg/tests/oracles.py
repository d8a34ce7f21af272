"""Independent reference computations used to freeze expected values."""
import itertools

import numpy as np

US, AS, UI, AI = 0, 1, 2, 3


def node_transition_row(state, q, gamma, u, v):
    """One-node next-state law read off the MMC update equations, given the
    probability ``q`` of escaping infection this step."""
    row = np.zeros(4)
    if state == US:
        row[US], row[AS] = 1 - v, v
    elif state == UI:
        row[UI], row[AI] = 1 - v, v
    elif state == AS:
        row[US], row[AS] = q * u, q * (1 - u)
        row[UI], row[AI] = (1 - q) * u, (1 - q) * (1 - u)
    else:
        row[US], row[AS] = gamma * u, gamma * (1 - u)
        row[UI], row[AI] = (1 - gamma) * u, (1 - gamma) * (1 - u)
    return row


def path2_transition_matrix(beta, gamma, u, v):
    """16x16 joint one-step transition matrix of a 2-node path, by enumeration.

    Joint state index is ``4 * s0 + s1``. Given the time-t pair, the two nodes
    move independently; each node's escape probability is ``1 - beta`` when the
    other node is AI and 1 otherwise.
    """
    P = np.zeros((16, 16))
    for s0, s1 in itertools.product(range(4), repeat=2):
        q0 = 1 - beta if s1 == AI else 1.0
        q1 = 1 - beta if s0 == AI else 1.0
        r0 = node_transition_row(s0, q0, gamma, u, v)
        r1 = node_transition_row(s1, q1, gamma, u, v)
        for t0, t1 in itertools.product(range(4), repeat=2):
            P[4 * s0 + s1, 4 * t0 + t1] = r0[t0] * r1[t1]
    return P


def dense_lambda_max(g):
    """Largest adjacency eigenvalue by full dense symmetric eigendecomposition."""
    A = np.zeros((g.n, g.n))
    e = g.edges()
    A[e[:, 0], e[:, 1]] = 1
    A[e[:, 1], e[:, 0]] = 1
    return float(np.linalg.eigvalsh(A)[-1])


def classical_sis_fixed_point(adj_lists, beta, gamma, iters=200_000, tol=1e-15):
    """Two-state SIS MMC, p_i <- p_i (1 - gamma) + (1 - p_i)(1 - q_i), iterated
    from p = 1 with plain Python loops."""
    n = len(adj_lists)
    p = [1.0] * n
    for _ in range(iters):
        new = []
        for i in range(n):
            q = 1.0
            for j in adj_lists[i]:
                q *= 1 - beta * p[j]
            new.append(p[i] * (1 - gamma) + (1 - p[i]) * (1 - q))
        delta = max(abs(a - b) for a, b in zip(new, p))
        p = new
        if delta < tol:
            break
    return p
