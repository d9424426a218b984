"""Bit-mask kernels for periodic Ising spin chains.

A configuration of ``n`` spins is an integer ``c`` in ``[0, 2**n)``;
bit ``j`` set means spin ``j`` points down (``sigma_j = -1``), so config
0 is the all-up state.  The chain energy is

    E(c) = -h * sum_j sigma_j  -  J * sum_j sigma_j sigma_{j+1}

with periodic neighbours.  These enumeration loops are the hot path of
the package (they scale as ``2**n``), so they are compiled with numba
when it is importable.  Set ``SPINENGINE_NO_NUMBA=1`` to force the
pure-numpy fallback; ``ACTIVE_BACKEND`` records which path was picked.
"""

from __future__ import annotations

import os

import numpy as np

_CHUNK = 1 << 20  # configs per numpy block, keeps transient arrays ~8 MB


def _use_numba() -> bool:
    return os.environ.get("SPINENGINE_NO_NUMBA", "") in ("", "0")


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _config_sums_np(configs: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Magnetization and bond sums for an array of config integers."""
    mask = np.uint64((1 << n) - 1)
    c = configs.astype(np.uint64)
    down = np.bitwise_count(c).astype(np.int64)
    rot = ((c >> np.uint64(1)) | ((c & np.uint64(1)) << np.uint64(n - 1))) & mask
    flips = np.bitwise_count(c ^ rot).astype(np.int64)
    return n - 2 * down, n - 2 * flips


def _ising_energies_np(n: int, j: float, h: float) -> np.ndarray:
    size = 1 << n
    out = np.empty(size, dtype=np.float64)
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        configs = np.arange(start, stop, dtype=np.uint64)
        msum, bsum = _config_sums_np(configs, n)
        out[start:stop] = -h * msum - j * bsum
    return out


def _ground_state_stats_np(n: int, j: float, h: float, tol: float) -> tuple[float, int]:
    size = 1 << n
    e0 = np.inf
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        configs = np.arange(start, stop, dtype=np.uint64)
        msum, bsum = _config_sums_np(configs, n)
        e0 = min(e0, float(np.min(-h * msum - j * bsum)))
    count = 0
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        configs = np.arange(start, stop, dtype=np.uint64)
        msum, bsum = _config_sums_np(configs, n)
        count += int(np.count_nonzero(-h * msum - j * bsum <= e0 + tol))
    return e0, count


def _gibbs_table_stats_np(energies: np.ndarray, beta: float) -> tuple[float, float, float]:
    emin = float(np.min(energies))
    shifted = energies - emin
    weights = np.exp(-beta * shifted)
    z = float(np.sum(weights))
    u_shift = float(np.dot(weights, shifted)) / z
    logz_shift = float(np.log(z))
    entropy = beta * u_shift + logz_shift
    return logz_shift, u_shift, entropy


NUMPY_IMPLS = {
    "ising_energies": _ising_energies_np,
    "ground_state_stats": _ground_state_stats_np,
    "gibbs_table_stats": _gibbs_table_stats_np,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

NUMBA_IMPLS = {}

try:
    from numba import njit

    @njit(cache=True)
    def _ising_energies_nb(n, j, h):  # pragma: no cover - exercised via alias
        size = 1 << n
        out = np.empty(size, dtype=np.float64)
        for c in range(size):
            m = 0
            b = 0
            prev = 1 - 2 * ((c >> (n - 1)) & 1)
            for site in range(n):
                s = 1 - 2 * ((c >> site) & 1)
                m += s
                b += s * prev
                prev = s
            out[c] = -h * m - j * b
        return out

    @njit(cache=True)
    def _ground_state_stats_nb(n, j, h, tol):  # pragma: no cover
        size = 1 << n
        e0 = 1e300
        count = 0
        for c in range(size):
            m = 0
            b = 0
            prev = 1 - 2 * ((c >> (n - 1)) & 1)
            for site in range(n):
                s = 1 - 2 * ((c >> site) & 1)
                m += s
                b += s * prev
                prev = s
            e = -h * m - j * b
            if e < e0 - tol:
                e0 = e
                count = 1
            elif e <= e0 + tol:
                count += 1
        return e0, count

    @njit(cache=True)
    def _gibbs_table_stats_nb(energies, beta):  # pragma: no cover
        emin = energies[0]
        for i in range(energies.shape[0]):
            if energies[i] < emin:
                emin = energies[i]
        z = 0.0
        acc = 0.0
        for i in range(energies.shape[0]):
            d = energies[i] - emin
            w = np.exp(-beta * d)
            z += w
            acc += w * d
        u_shift = acc / z
        logz_shift = np.log(z)
        return logz_shift, u_shift, beta * u_shift + logz_shift

    NUMBA_IMPLS = {
        "ising_energies": _ising_energies_nb,
        "ground_state_stats": _ground_state_stats_nb,
        "gibbs_table_stats": _gibbs_table_stats_nb,
    }
except ImportError:  # numba not installed; numpy path only
    pass


if NUMBA_IMPLS and _use_numba():
    ACTIVE_BACKEND = "numba"
    _active = NUMBA_IMPLS
else:
    ACTIVE_BACKEND = "numpy"
    _active = NUMPY_IMPLS


def ising_energies(n: int, j: float, h: float) -> np.ndarray:
    """Energy of every configuration of the periodic chain, indexed by bitmask."""
    if not 1 <= n <= 24:
        raise ValueError(f"chain length {n} outside supported range 1..24")
    return _active["ising_energies"](n, float(j), float(h))


def ground_state_stats(n: int, j: float, h: float, tol: float) -> tuple[float, int]:
    """Minimum energy and number of configurations within ``tol`` of it."""
    if not 1 <= n <= 24:
        raise ValueError(f"chain length {n} outside supported range 1..24")
    e0, count = _active["ground_state_stats"](n, float(j), float(h), float(tol))
    return float(e0), int(count)


def gibbs_table_stats(energies: np.ndarray, beta: float) -> tuple[float, float, float]:
    """Stable ``(logZ_shifted, mean_shifted_energy, entropy)`` of a level table.

    ``logZ_shifted`` is ``log Z + beta * min(energies)``; the caller can
    recover the full log-partition as ``logZ_shifted - beta * emin``.
    """
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    logz_shift, u_shift, entropy = _active["gibbs_table_stats"](energies, float(beta))
    return float(logz_shift), float(u_shift), float(entropy)


def warm_up() -> None:
    """Trigger jit compilation of the active kernels on tiny inputs."""
    ising_energies(2, 1.0, 0.5)
    ground_state_stats(2, 1.0, 0.5, 1e-9)
    gibbs_table_stats(np.array([0.0, 1.0]), 1.0)
