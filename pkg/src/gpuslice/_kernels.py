"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``GPUSLICE_DISABLE_NUMBA`` is
unset (or "0"). Both paths perform the same floating-point operations per
element; only reductions may differ in summation order.
"""
import os

import numpy as np

OK, ERR_NEGATIVE, ERR_NONFINITE = 0, 1, 2


def _numba_requested():
    return os.environ.get("GPUSLICE_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no")


# ---------------------------------------------------------------- numpy path


def adaptive_alloc_numpy(floors, priorities, rates, capacity):
    out = np.zeros(rates.shape[0])
    if not np.all(np.isfinite(rates)):
        return out, ERR_NONFINITE
    if np.any(rates < 0):
        return out, ERR_NEGATIVE
    demand = rates * floors / priorities
    total = demand.sum()
    if total == 0.0:
        return out, OK
    g = np.maximum(floors, demand / total * capacity)
    allocated = g.sum()
    if allocated > capacity:
        g = g / allocated * capacity
    return g, OK


def simulate_queues_numpy(arrivals, alloc, throughput, dt, delta, q0):
    n_steps, n = arrivals.shape
    served = np.empty((n_steps, n))
    queue = np.empty((n_steps, n))
    latency = np.empty((n_steps, n))
    q = q0.astype(np.float64).copy()
    for t in range(n_steps):
        g = alloc[t]
        q = q + arrivals[t]
        s = np.minimum(q, g * throughput * dt)
        q = q - s
        served[t] = s
        queue[t] = q
        latency[t] = q / (np.maximum(g, delta) * throughput)
    return served, queue, latency


# ---------------------------------------------------------------- numba path

HAVE_NUMBA = False
try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

if HAVE_NUMBA:

    @nb.njit(cache=True)
    def adaptive_alloc_numba(floors, priorities, rates, capacity):
        n = rates.shape[0]
        out = np.zeros(n)
        total = 0.0
        for i in range(n):
            r = rates[i]
            if not np.isfinite(r):
                return np.zeros(n), ERR_NONFINITE
            if r < 0.0:
                return np.zeros(n), ERR_NEGATIVE
            d = r * floors[i] / priorities[i]
            out[i] = d
            total += d
        if total == 0.0:
            return np.zeros(n), OK
        allocated = 0.0
        for i in range(n):
            g = max(floors[i], out[i] / total * capacity)
            out[i] = g
            allocated += g
        if allocated > capacity:
            for i in range(n):
                out[i] = out[i] / allocated * capacity
        return out, OK

    @nb.njit(cache=True)
    def simulate_queues_numba(arrivals, alloc, throughput, dt, delta, q0):
        n_steps, n = arrivals.shape
        served = np.empty((n_steps, n))
        queue = np.empty((n_steps, n))
        latency = np.empty((n_steps, n))
        q = q0.astype(np.float64).copy()
        for t in range(n_steps):
            for i in range(n):
                g = alloc[t, i]
                qi = q[i] + arrivals[t, i]
                s = min(qi, g * throughput[i] * dt)
                qi = qi - s
                q[i] = qi
                served[t, i] = s
                queue[t, i] = qi
                latency[t, i] = qi / (max(g, delta) * throughput[i])
        return served, queue, latency

    @nb.njit(cache=True)
    def time_adaptive_reps(floors, priorities, rates, capacity, reps):
        # Runs the kernel back to back inside compiled code so the timing
        # excludes interpreter dispatch; the checksum keeps the loop alive.
        acc = 0.0
        for _ in range(reps):
            g, _status = adaptive_alloc_numba(floors, priorities, rates, capacity)
            acc += g[0]
        return acc

else:  # pragma: no cover
    adaptive_alloc_numba = None
    simulate_queues_numba = None
    time_adaptive_reps = None


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if HAVE_NUMBA and _numba_requested() else "numpy"


def get_kernels(name=None):
    """Return ``(adaptive_alloc, simulate_queues)`` for ``name`` (default: active backend)."""
    name = name or backend()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return adaptive_alloc_numba, simulate_queues_numba
    if name == "numpy":
        return adaptive_alloc_numpy, simulate_queues_numpy
    raise ValueError(f"unknown backend {name!r}")
