"""Exact thermodynamics of the periodic Ising chain, finite and infinite.

Everything reduces to the two transfer-matrix eigenvalues

    lambda_pm = e^a cosh b  +-  sqrt(e^{2a} sinh^2 b + e^{-2a}),

with a = beta*J and b = beta*h.  Instead of evaluating log(lambda_+)
directly, each quantity is split into an exact ground-part (linear in a
and b) plus a reduced remainder built from bounded exponentials.  The
split keeps entropies, magnetization deficits, and relative-entropy
densities accurate to full relative precision even where they are of
order exp(-beta*gap) ~ 1e-300, which direct evaluation would lose to
cancellation.  Two reductions cover the phase diagram: a polarized
reference (all spins up) where 2a + |b| >= 0 and a staggered reference
elsewhere.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels

_LOG2 = math.log(2.0)


class _Core(NamedTuple):
    """Reduced transfer-matrix data at (a, |b|); see module docstring.

    ``ra``/``rb`` give the reference log-scale r = ra*a + rb*|b| (the
    negative ground energy in units of beta), ``delta = log lambda_+ - r``,
    and ``delta_a``/``delta_b`` its partials with respect to a and |b|.
    ``one_minus_m`` is the exact complement of the magnetization in the
    polarized branch (it equals ``1 - (rb + delta_b)`` there).
    """

    ra: np.ndarray
    rb: np.ndarray
    delta: np.ndarray
    delta_a: np.ndarray
    delta_b: np.ndarray
    one_minus_m: np.ndarray


def _core(a, babs) -> _Core:
    a = np.asarray(a, dtype=np.float64)
    babs = np.asarray(babs, dtype=np.float64)
    a, babs = np.broadcast_arrays(a, babs)
    shape = a.shape
    a = np.ravel(a).astype(np.float64)
    babs = np.ravel(babs).astype(np.float64)
    ra = np.empty_like(a)
    rb = np.empty_like(a)
    delta = np.empty_like(a)
    delta_a = np.empty_like(a)
    delta_b = np.empty_like(a)
    omm = np.empty_like(a)

    pol = (2.0 * a + babs) >= 0.0
    if np.any(pol):
        ap, bp = a[pol], babs[pol]
        q = np.exp(-2.0 * bp)
        p = np.exp(-2.0 * (2.0 * ap + bp))
        omq = -np.expm1(-2.0 * bp)
        root = np.sqrt(0.25 * omq * omq + p)
        inner = 0.5 * (1.0 + q) + root
        half = root + 0.5 * omq
        delta[pol] = np.log1p(p / half)
        delta_a[pol] = -2.0 * p / (root * inner)
        # subtraction-free magnetization complement: equals
        # (q + (p - q*omq/2)/root)/inner but stays exact when p << omq^2
        one_minus_m = p * (q + half) / (root * half * inner)
        omm[pol] = one_minus_m
        delta_b[pol] = -one_minus_m
        ra[pol] = 1.0
        rb[pol] = 1.0

    stag = ~pol
    if np.any(stag):
        an, bn = a[stag], babs[stag]
        q = np.exp(-2.0 * bn)
        g1 = np.exp(2.0 * an + bn + np.log1p(q) - _LOG2)
        with np.errstate(divide="ignore"):
            log_sinh = bn + np.log(-np.expm1(-2.0 * bn)) - _LOG2
        g2 = np.exp(2.0 * an + log_sinh)
        hyp = np.hypot(g2, 1.0)
        inner = g1 + hyp
        delta[stag] = np.log1p(g1 + g2 * g2 / (1.0 + hyp))
        delta_a[stag] = (2.0 * g1 + 2.0 * g2 * g2 / hyp) / inner
        delta_b[stag] = g2 * (1.0 + g1 / hyp) / inner
        omm[stag] = 1.0 - delta_b[stag]
        ra[stag] = -1.0
        rb[stag] = 0.0

    return _Core(*(x.reshape(shape) for x in (ra, rb, delta, delta_a, delta_b, omm)))


def _check_beta(beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if np.any(~np.isfinite(beta)) or np.any(beta <= 0):
        raise ValueError("inverse temperature must be positive and finite")
    return beta


def _maybe_float(x, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return float(x)
    return x


def log_lambda_plus(beta, j, h):
    """Stable ``log`` of the dominant transfer-matrix eigenvalue."""
    beta = _check_beta(beta)
    a = beta * np.asarray(j, dtype=np.float64)
    b = beta * np.asarray(h, dtype=np.float64)
    core = _core(a, np.abs(b))
    out = core.ra * a + core.rb * np.abs(b) + core.delta
    return _maybe_float(out, beta, j, h)


def free_energy_density(beta, j, h):
    """Free energy per site of the infinite chain."""
    beta = _check_beta(beta)
    a = beta * np.asarray(j, dtype=np.float64)
    b = beta * np.asarray(h, dtype=np.float64)
    core = _core(a, np.abs(b))
    e0 = -(np.asarray(j, dtype=np.float64) * core.ra + np.abs(h) * core.rb)
    out = e0 - core.delta / beta
    return _maybe_float(out, beta, j, h)


def entropy_density(beta, j, h):
    """Entropy per site, cancellation-free down to ~1e-300."""
    beta = _check_beta(beta)
    a = beta * np.asarray(j, dtype=np.float64)
    babs = beta * np.abs(np.asarray(h, dtype=np.float64))
    core = _core(a, babs)
    out = core.delta - a * core.delta_a - babs * core.delta_b
    return _maybe_float(out, beta, j, h)


def internal_energy_density(beta, j, h):
    """Mean energy per site ``-J <ss'> - h <s>``."""
    beta = _check_beta(beta)
    j = np.asarray(j, dtype=np.float64)
    habs = np.abs(np.asarray(h, dtype=np.float64))
    core = _core(beta * j, beta * habs)
    e0 = -(j * core.ra + habs * core.rb)
    out = e0 - j * core.delta_a - habs * core.delta_b
    return _maybe_float(out, beta, j, h)


def magnetization_density(beta, j, h):
    """Per-site magnetization ``<sigma> = -df/dh`` (odd in the field)."""
    beta = _check_beta(beta)
    h = np.asarray(h, dtype=np.float64)
    core = _core(beta * np.asarray(j, dtype=np.float64), beta * np.abs(h))
    out = np.sign(h) * (core.rb + core.delta_b)
    return _maybe_float(out, beta, j, h)


def entropy_density_dh(beta, j, h):
    """Field derivative of the entropy density, in closed form.

    Evaluates ``-beta^2 e^{-a} (h cosh b + 2J sinh b) / R^3`` with
    ``R^2 = e^{2a} sinh^2 b + e^{-2a}``, rewritten through logarithms so
    large ``beta*J`` or ``beta*h`` neither overflow nor lose the sign
    change at the entropy-maximizing field.
    """
    beta = _check_beta(beta)
    j = np.asarray(j, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    a = beta * j
    babs = beta * np.abs(h)
    q = np.exp(-2.0 * babs)
    omq = -np.expm1(-2.0 * babs)
    with np.errstate(divide="ignore"):
        log_sinh = babs + np.log(omq) - _LOG2
    log_r = 0.5 * np.logaddexp(2.0 * a + 2.0 * log_sinh, -2.0 * a)
    bracket = h * (1.0 + q) + 2.0 * j * np.sign(h) * omq
    out = -beta * beta * np.exp(-a + babs - _LOG2 - 3.0 * log_r) * bracket
    return _maybe_float(out, beta, j, h)


def optimal_field(beta: float, j: float, tol: float = 1e-13) -> float:
    """Entropy-maximizing field of the infinite chain at fixed (beta, J).

    Zero unless the coupling is antiferromagnetic with ``2|J|beta > 1``;
    then the unique positive solution of ``h = 2|J| tanh(beta h)``,
    located by bisection.
    """
    beta = float(_check_beta(beta))
    j = float(j)
    if j >= 0 or 2.0 * abs(j) * beta <= 1.0:
        return 0.0
    jj = 2.0 * abs(j)
    lo, hi = 0.0, jj

    def shifted(x):
        return x - jj * math.tanh(beta * x)

    # slope at 0 is 1 - 2|J|beta < 0, slope at 2|J| positive: root bracketed
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if shifted(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def relative_entropy_density(beta_state, beta_ref, j, h_state, h_ref):
    """Per-site ``D(omega_state || omega_ref)`` between infinite-chain Gibbs states.

    Both states share the coupling ``j``; the reference fixes its own
    inverse temperature and field.  ``math.inf`` fields mark a fully
    polarized (pure product) state: matched markers contribute zero,
    a pure reference against a mixed state gives ``math.inf``.
    """
    bs = float(_check_beta(beta_state))
    br = float(_check_beta(beta_ref))
    j = float(j)
    hs = float(h_state)
    hr = float(h_ref)
    if bs == br and hs == hr:
        return 0.0

    state_inf = math.isinf(hs)
    ref_inf = math.isinf(hr)
    if state_inf and ref_inf:
        return 0.0 if hs == hr else math.inf
    if ref_inf:
        return math.inf
    if state_inf:
        # fully polarized product state: energy density -hr*sign(hs) - j,
        # zero entropy, so D/N = beta_ref*(u_pure - f_ref)
        core_r = _core(br * j, br * abs(hr))
        e0_r = -(j * float(core_r.ra) + abs(hr) * float(core_r.rb))
        sgn = 1.0 if hs > 0 else -1.0
        e_pure = -hr * sgn - j
        return br * (e_pure - e0_r) + float(core_r.delta)

    core_s = _core(bs * j, bs * abs(hs))
    core_r = _core(br * j, br * abs(hr))
    sgn_s = math.copysign(1.0, hs)
    ra_s, rb_s = float(core_s.ra), float(core_s.rb) * sgn_s
    ra_r, rb_r = float(core_r.ra), float(core_r.rb) * math.copysign(1.0, hr)
    # exact O(1) offset from differing reference phases; zero when they match
    offset = -j * (ra_s - ra_r) + hr * (rb_r - rb_s)
    u_excess = -j * float(core_s.delta_a) - abs(hs) * float(core_s.delta_b)
    dm = float(core_s.delta_b) * sgn_s
    entropy_s = float(core_s.delta) - bs * j * float(core_s.delta_a) \
        - bs * abs(hs) * float(core_s.delta_b)
    value = br * (offset + u_excess + (hs - hr) * dm + float(core_r.delta) / br) \
        - entropy_s
    return max(value, 0.0)


def transfer_matrix_logZ(n_sites: int, j, h, beta):
    """Exact ``log Z`` of the finite periodic chain from both eigenvalues."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    beta = _check_beta(beta)
    a = beta * np.asarray(j, dtype=np.float64)
    b = beta * np.asarray(h, dtype=np.float64)
    babs = np.abs(b)
    core = _core(a, babs)
    log_lp = core.ra * a + core.rb * babs + core.delta

    aabs = np.abs(a)
    with np.errstate(divide="ignore"):
        log_2sinh = 2.0 * aabs + np.log(-np.expm1(-4.0 * aabs))
    # log|lambda_-| - log lambda_+ = log(2|sinh 2a|) - 2 log lambda_+,
    # assembled so the reference parts cancel in exact arithmetic
    t = log_2sinh - 2.0 * (core.ra * a + core.rb * babs) - 2.0 * core.delta
    ratio_exp = n_sites * t  # log of (|lambda_-|/lambda_+)^N

    sign_neg = np.where(a > 0, 1.0, np.where(a < 0, (-1.0) ** (n_sites % 2), 0.0))
    with np.errstate(over="ignore", divide="ignore"):
        r = np.exp(ratio_exp)
        correction = np.where(
            sign_neg >= 0,
            np.log1p(np.where(sign_neg > 0, r, 0.0)),
            np.log(-np.expm1(np.minimum(ratio_exp, -0.0))),
        )
    out = n_sites * log_lp + correction
    return _maybe_float(out, j, h, beta)


def ground_state_degeneracy(n_sites: int, j: float, h: float,
                            tol: float = None) -> tuple[int, float]:
    """Exact ground-state degeneracy and ground energy by full enumeration.

    Enumerates all 2^N configurations (N <= 24); energies within ``tol``
    of the minimum count as degenerate.  The default tolerance scales
    with the parameter magnitude so integer-valued spectra at integer
    (J, h) never split under rounding.
    """
    if tol is None:
        tol = 1e-9 * max(1.0, abs(j), abs(h))
    e0, count = kernels.ground_state_stats(n_sites, j, h, tol)
    return count, e0


# ---------------------------------------------------------------------------
# finite-chain Gibbs tables
# ---------------------------------------------------------------------------

def chain_table(n_sites: int, j: float, h: float) -> np.ndarray:
    """Energy table of the finite chain, indexed by spin bitmask."""
    return kernels.ising_energies(n_sites, j, h)


def table_logz(energies: np.ndarray, beta: float) -> float:
    logz_shift, _, _ = kernels.gibbs_table_stats(energies, beta)
    return logz_shift - beta * float(np.min(energies))


def table_entropy(energies: np.ndarray, beta: float) -> float:
    _, _, entropy = kernels.gibbs_table_stats(energies, beta)
    return entropy


def table_internal_energy(energies: np.ndarray, beta: float) -> float:
    _, u_shift, _ = kernels.gibbs_table_stats(energies, beta)
    return float(np.min(energies)) + u_shift


def diag_relative_entropy(energies_state: np.ndarray, beta_state: float,
                          energies_ref: np.ndarray, beta_ref: float) -> float:
    """``D(omega_state || omega_ref)`` for two aligned diagonal Hamiltonians.

    Uses ``D = beta_ref (Tr rho H_ref - F_ref) - S(rho)`` with both terms
    shifted by the reference ground energy, so the extensive parts cancel
    before any subtraction happens.
    """
    es = np.asarray(energies_state, dtype=np.float64)
    er = np.asarray(energies_ref, dtype=np.float64)
    if es.shape != er.shape:
        raise ValueError("energy tables must be aligned")
    ws = np.exp(-beta_state * (es - np.min(es)))
    populations = ws / np.sum(ws)
    er_shift = er - np.min(er)
    logz_shift_r, _, _ = kernels.gibbs_table_stats(er, beta_ref)
    _, _, entropy_s = kernels.gibbs_table_stats(es, beta_state)
    cross = float(np.dot(populations, er_shift))
    return max(beta_ref * cross + logz_shift_r - entropy_s, 0.0)
