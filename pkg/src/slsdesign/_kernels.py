"""Hot loops over design points.

Each kernel has a numba implementation and a pure-numpy one.  The numba
path is used when numba imports and ``SLSDESIGN_DISABLE_NUMBA`` is unset
(or set to ``0``/``false``/``no``); otherwise the numpy path is selected.
Both paths are always importable so they can be compared directly.
"""

import os

import numpy as np

_FLAG = os.environ.get("SLSDESIGN_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def moments_numpy(points, masses):
    """Return ``G = sum p_i x_i x_i^T`` and ``g = sum p_i x_i``."""
    G = points.T @ (masses[:, None] * points)
    g = masses @ points
    return G, g


def quadratic_psi_numpy(points, g, M, t):
    """Return ``(1-t) x_i^T M x_i + t (x_i-g)^T M (x_i-g)`` for every row."""
    centred = points - g
    plain = np.einsum("ij,jk,ik->i", points, M, points)
    shifted = np.einsum("ij,jk,ik->i", centred, M, centred)
    return (1.0 - t) * plain + t * shifted


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def moments_numba(points, masses):
        n, q = points.shape
        G = np.zeros((q, q))
        g = np.zeros(q)
        for i in range(n):
            p = masses[i]
            if p == 0.0:
                continue
            for a in range(q):
                xa = points[i, a]
                if xa == 0.0:
                    continue
                g[a] += p * xa
                for b in range(q):
                    G[a, b] += p * xa * points[i, b]
        return G, g

    @numba.njit(cache=True)
    def quadratic_psi_numba(points, g, M, t):
        n, q = points.shape
        out = np.empty(n)
        x = np.empty(q)
        e = np.empty(q)
        for i in range(n):
            for a in range(q):
                x[a] = points[i, a]
                e[a] = x[a] - g[a]
            plain = 0.0
            shifted = 0.0
            for a in range(q):
                mx = 0.0
                me = 0.0
                for b in range(q):
                    mx += M[a, b] * x[b]
                    me += M[a, b] * e[b]
                plain += x[a] * mx
                shifted += e[a] * me
            out[i] = (1.0 - t) * plain + t * shifted
        return out

    @numba.njit(cache=True)
    def class_solve_numba(q, sizes, pi0, t, use_a, delta, max_iter, renormalize,
                          mass_floor, trace_every, singular_rtol):
        """Multiplicative iteration on per-class masses of a binary space.

        Returns ``(pi, iterations, gap, phi, status, trace)`` with status 0 for
        converged, 1 for iteration cap, 2 for singular H.
        """
        pi = pi0.copy()
        reps = np.zeros((q, q))
        for j in range(q):
            for a in range(j + 1):
                reps[j, a] = 1.0
        cap = max_iter // trace_every + 3
        trace = np.empty((cap, 3))
        ntrace = 0
        psi = np.empty(q)
        gap = np.inf
        phi = -np.inf
        h = 0
        while True:
            diag = 0.0
            off = 0.0
            mean = 0.0
            for j in range(1, q + 1):
                w = pi[j - 1] * sizes[j - 1]
                if w == 0.0:
                    continue
                mean += w * j / q
                scale = w * j / (q * (q - 1))
                diag += scale * (q - j)
                off += scale * (j - 1)
            H = np.full((q, q), off - t * mean * mean)
            for a in range(q):
                H[a, a] += diag
            eig = np.linalg.eigvalsh(H)
            if eig[0] < singular_rtol * (1.0 + eig[q - 1]):
                return pi, h, gap, phi, 2, trace[:ntrace]
            L = np.linalg.cholesky(H)
            inv = np.linalg.inv(H)
            inv = 0.5 * (inv + inv.T)
            if use_a:
                M = inv @ inv
                bound = 0.0
                for a in range(q):
                    bound += inv[a, a]
                phi = -bound
            else:
                M = inv
                bound = float(q)
                phi = 0.0
                for a in range(q):
                    phi += 2.0 * np.log(L[a, a])
            gap = -np.inf
            for j in range(q):
                plain = 0.0
                shifted = 0.0
                for a in range(q):
                    mx = 0.0
                    me = 0.0
                    for b in range(q):
                        mx += M[a, b] * reps[j, b]
                        me += M[a, b] * (reps[j, b] - mean)
                    plain += reps[j, a] * mx
                    shifted += (reps[j, a] - mean) * me
                psi[j] = (1.0 - t) * plain + t * shifted
                if psi[j] - bound > gap:
                    gap = psi[j] - bound
            done = gap <= delta
            if h % trace_every == 0 or done or h == max_iter:
                trace[ntrace, 0] = h
                trace[ntrace, 1] = phi
                trace[ntrace, 2] = gap
                ntrace += 1
            if done:
                return pi, h, gap, phi, 0, trace[:ntrace]
            if h == max_iter:
                return pi, h, gap, phi, 1, trace[:ntrace]
            total = 0.0
            for j in range(q):
                pi[j] = pi[j] * psi[j] / bound
                if pi[j] < mass_floor:
                    pi[j] = mass_floor
                total += sizes[j] * pi[j]
            if renormalize or mass_floor > 0.0:
                for j in range(q):
                    pi[j] /= total
            h += 1

else:  # pragma: no cover
    moments_numba = moments_numpy
    quadratic_psi_numba = quadratic_psi_numpy
    class_solve_numba = None


USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"

# moments is a weighted Gram product that BLAS already does faster than the
# jitted loop (see benchmarks/bench_kernels.py), so both backends use numpy
moments = moments_numpy
quadratic_psi = quadratic_psi_numba if USE_NUMBA else quadratic_psi_numpy
