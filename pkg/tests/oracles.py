"""Independent reference computations used by the kernel and acceptance tests."""
import numpy as np

from qlinsys.numkernel import sigma_max_at


def kron_rowmajor_oracle(a, b, c):
    """Direct solve of AX + XB + C = 0 with row-major vectorization."""
    n, p = c.shape
    op = np.kron(a, np.eye(p)) + np.kron(np.eye(n), b.T)
    return np.linalg.solve(op, -c.reshape(-1)).reshape(n, p)


def power_iteration_radius(a, iters=4000):
    x = np.ones(a.shape[0], dtype=complex)
    est = 0.0
    for _ in range(iters):
        y = a @ x
        est = np.linalg.norm(y) / np.linalg.norm(x)
        if est == 0.0:
            return 0.0
        x = y / np.linalg.norm(y)
    return est


def scalar_care_root(a, w, q):
    """Stabilizing root of 2 Re(a) x + w x^2 + q = 0."""
    ar = a.real
    if w == 0:
        return -q / (2 * ar)
    return (-ar - np.sqrt(ar * ar - w * q)) / w


def grid_hinf(f, g, h, k, lo=-3, hi=3, num=4000):
    """Dense +/- omega grid with local golden-section refinement around the peak."""
    w = np.concatenate([-np.logspace(hi, lo, num), [0.0], np.logspace(lo, hi, num)])
    vals = np.array([sigma_max_at(f, g, h, k, x) for x in w])
    i = int(np.argmax(vals))
    left, right = w[max(i - 1, 0)], w[min(i + 1, len(w) - 1)]
    phi = (np.sqrt(5) - 1) / 2
    for _ in range(80):
        m1 = right - phi * (right - left)
        m2 = left + phi * (right - left)
        if sigma_max_at(f, g, h, k, m1) > sigma_max_at(f, g, h, k, m2):
            right = m2
        else:
            left = m1
    return max(vals[i], sigma_max_at(f, g, h, k, 0.5 * (left + right)))
