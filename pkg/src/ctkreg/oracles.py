"""Independent numerical oracles for the closed-form kernels and covariances.

Everything here is deliberately dumb and slow: adaptive Gauss-Kronrod
quadrature of the defining integrals, truncated geometric series for the
periodized kernels, and panelized Gauss-Legendre quadrature of the raw
output-covariance integral. The closed forms in ctkreg.kernels and
ctkreg.covariance are tested against these, never the other way around.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .kernels import DcKernel, kappa_g, kappa_gd
from .signals import SampledSignal

SERIES_MAX_TERMS = 10_000
SERIES_RELTOL = 1e-14


class QuadratureError(RuntimeError):
    """Raised when the adaptive integrator cannot certify the tolerance."""


def _checked_quad(fn, lo, hi, points=None, epsabs=1e-12, epsrel=1e-10, scale=1.0):
    val, err = quad(fn, lo, hi, points=points, epsabs=epsabs, epsrel=epsrel, limit=200)
    if err > 1e-7 * max(abs(val), scale):
        raise QuadratureError(
            f"integral over [{lo}, {hi}] did not converge (estimate {val}, error {err})"
        )
    return val


def quad_kernel_interval(k: DcKernel, tau: float, lo: float, hi: float) -> float:
    """int over tau2 in [lo, hi] of kappa_g(tau, tau2), adaptive."""
    if hi < lo:
        raise ValueError("empty interval")
    if hi == lo:
        return 0.0
    pts = [tau] if lo < tau < hi else None
    return _checked_quad(lambda t2: kappa_g(k, tau, t2), lo, hi, points=pts, scale=k.lam or 1.0)


def quad_kernel_rect(k: DcKernel, t_lo: float, t_hi: float, t2_lo: float, t2_hi: float) -> float:
    """Double integral of kappa_g over a rectangle, adaptive in both variables."""
    if t_hi <= t_lo or t2_hi <= t2_lo:
        return 0.0

    def outer(t):
        pts = [t] if t2_lo < t < t2_hi else None
        val, _ = quad(
            lambda t2: kappa_g(k, t, t2), t2_lo, t2_hi, points=pts,
            epsabs=1e-13, epsrel=1e-11, limit=200,
        )
        return val

    return _checked_quad(outer, t_lo, t_hi, scale=k.lam or 1.0)


def quad_fourier_moment(k: DcKernel, period: float, n: int, n2: int) -> complex:
    """Quadrature of the kappa_gp double Fourier moment (uses the series kernel)."""
    w0 = 2 * np.pi / period

    def outer(t, part):
        def inner(t2):
            v = series_kappa_gp(k, period, t, t2) * np.exp(
                -1j * n * w0 * t + 1j * n2 * w0 * t2
            )
            return v.real if part == "re" else v.imag

        val, _ = quad(inner, 0.0, period, points=[t], epsabs=1e-12, epsrel=1e-10, limit=200)
        return val

    re = _checked_quad(lambda t: outer(t, "re"), 0.0, period, scale=k.lam or 1.0)
    im = _checked_quad(lambda t: outer(t, "im"), 0.0, period, scale=k.lam or 1.0)
    return re + 1j * im


def quad_fourier_cross(k: DcKernel, period: float, tau: float, n2: int) -> complex:
    """Quadrature of int_0^P kappa_ggp(tau, t2) e^{+j n2 w0 t2} dt2."""
    w0 = 2 * np.pi / period
    kink = tau % period
    pts = [kink] if 0 < kink < period else None

    def part(sel):
        def fn(t2):
            v = series_kappa_ggp(k, period, tau, t2) * np.exp(1j * n2 * w0 * t2)
            return v.real if sel == "re" else v.imag

        return _checked_quad(fn, 0.0, period, points=pts, scale=k.lam or 1.0)

    return part("re") + 1j * part("im")


def _tail_count(rate: float, period: float) -> int:
    """Number of geometric terms until the tail bound drops below SERIES_RELTOL."""
    n = int(np.ceil(-np.log(SERIES_RELTOL) / (rate * period))) + 2
    if n > SERIES_MAX_TERMS:
        raise QuadratureError(
            f"series needs {n} terms (rate*period = {rate * period:.3g} too small)"
        )
    return n


def series_kappa_gp(k: DcKernel, period: float, tau: float, tau2: float) -> float:
    m = _tail_count(2 * k.alpha, period)
    shifts = np.arange(m) * period
    return float(
        np.sum(kappa_g(k, tau + shifts[:, None], tau2 + shifts[None, :]))
    )


def series_kappa_ggp(k: DcKernel, period: float, tau: float, tau2: float) -> float:
    m = _tail_count(k.alpha, period)
    shifts = np.arange(m) * period
    return float(np.sum(kappa_g(k, tau, tau2 + shifts)))


def series_kappa_gdp(k: DcKernel, ts: float, n_period: int, s: int, s2: int) -> float:
    m = _tail_count(2 * k.alpha, n_period * ts)
    shifts = np.arange(m) * n_period
    return float(
        np.sum(kappa_gd(k, ts, s + shifts[:, None], s2 + shifts[None, :]))
    )


def series_kappa_ggdp(k: DcKernel, ts: float, n_period: int, tau: float, s2: int) -> float:
    from .kernels import kappa_ggd

    m = _tail_count(k.alpha, n_period * ts)
    shifts = np.arange(m) * n_period
    return float(np.sum(kappa_ggd(k, ts, tau, s2 + shifts)))


def quadrature_oracle(k: DcKernel, region, integrand: str = "kappa_g", **kw):
    """Adaptive integration of a kernel integrand over an interval or rectangle.

    ``region`` is (lo, hi) for the single integral (with ``tau`` keyword) or
    ((lo, hi), (lo2, hi2)) for the double integral. Non-convergence raises
    QuadratureError rather than returning a silent value.
    """
    if integrand != "kappa_g":
        raise ValueError(f"unknown integrand selector {integrand!r}")
    region = tuple(region)
    if len(region) == 2 and np.isscalar(region[0]):
        return quad_kernel_interval(k, kw["tau"], region[0], region[1])
    (lo, hi), (lo2, hi2) = region
    return quad_kernel_rect(k, lo, hi, lo2, hi2)


# ---------------------------------------------------------------------------
# Brute-force quadrature of the raw output covariance
#   Sigma_y0[i, j] = int int u(t_i - tau) u(t_j - tau2) kappa(tau, tau2)
# for small N, used to validate the covariance builders end to end.
# ---------------------------------------------------------------------------

def _panel_nodes(edges: np.ndarray, order: int):
    """Gauss-Legendre nodes/weights on each panel, flattened."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo = edges[:-1]
    width = np.diff(edges)
    nodes = (lo[:, None] + width[:, None] * (x[None, :] + 1) / 2).ravel()
    weights = (width[:, None] * w[None, :] / 2).ravel()
    return nodes, weights


def covariance_quadrature(
    u_eval,
    k: DcKernel,
    t_grid: np.ndarray,
    ts: float,
    cross_taus=(),
    order: int = 12,
):
    """Direct quadrature of the output covariance and cross rows.

    ``u_eval`` maps a time array to input values (any intersample/past
    behavior). The integration domain is truncated where the kernel envelope
    e^{-alpha tau} falls below 1e-13 relative; panels are aligned to the
    sampling grid so held inputs are smooth within each panel.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    n_out = t_grid.size
    t_max = 30.0 / k.alpha
    m = int(np.ceil(t_max / ts))
    edges = np.arange(m + 1) * ts
    nodes, weights = _panel_nodes(edges, order)
    g = order

    # input weight rows: W[i, q] = u(t_i - nodes[q]) * weights[q]
    uw = np.empty((n_out, nodes.size))
    for i, t in enumerate(t_grid):
        uw[i] = np.asarray(u_eval(t - nodes)) * weights

    # kernel on the full node grid, diagonal-panel blocks zeroed (they hold
    # the |tau - tau2| kink and are integrated separately on triangles)
    big = np.asarray(kappa_g(k, nodes[:, None], nodes[None, :]))
    for p in range(m):
        big[p * g:(p + 1) * g, p * g:(p + 1) * g] = 0.0
    sigma = uw @ big @ uw.T

    # diagonal panels: split at the tau = tau2 line, nested Gauss-Legendre
    x, w = np.polynomial.legendre.leggauss(order)
    for p in range(m):
        lo = edges[p]
        outer_nodes = lo + (edges[p + 1] - lo) * (x + 1) / 2
        outer_w = (edges[p + 1] - lo) * w / 2
        tri = np.zeros((n_out, n_out))
        for a, (ta, wa) in enumerate(zip(outer_nodes, outer_w)):
            inner_nodes = lo + (ta - lo) * (x + 1) / 2
            inner_w = (ta - lo) * w / 2
            kv = np.asarray(kappa_g(k, ta, inner_nodes)) * inner_w
            ui = np.empty(n_out)
            for i, t in enumerate(t_grid):
                ui[i] = np.asarray(u_eval(np.array([t - ta]))).reshape(-1)[0]
            uin = np.empty((n_out, order))
            for j, t in enumerate(t_grid):
                uin[j] = np.asarray(u_eval(t - inner_nodes))
            tri += wa * np.outer(ui, uin @ kv)
        sigma += tri + tri.T

    cross = {}
    for tau in cross_taus:
        kv = np.asarray(kappa_g(k, tau, nodes))
        # refine around the kink at tau2 = tau
        row = uw @ kv
        if 0 < tau < edges[-1]:
            p = min(int(tau // ts), m - 1)
            seg_lo, seg_hi = edges[p], edges[p + 1]
            seg_nodes, seg_w = _panel_nodes(np.array([seg_lo, seg_hi]), order)
            # remove the smooth-panel estimate and redo it split at tau
            for j, t in enumerate(t_grid):
                old = np.sum(
                    np.asarray(u_eval(t - seg_nodes)) * seg_w
                    * np.asarray(kappa_g(k, tau, seg_nodes))
                )
                n1, w1 = _panel_nodes(np.array([seg_lo, tau]), order)
                n2_, w2 = _panel_nodes(np.array([tau, seg_hi]), order)
                new = np.sum(
                    np.asarray(u_eval(t - n1)) * w1 * np.asarray(kappa_g(k, tau, n1))
                ) + np.sum(
                    np.asarray(u_eval(t - n2_)) * w2 * np.asarray(kappa_g(k, tau, n2_))
                )
                row[j] += new - old
        cross[tau] = row
    return sigma, cross


def zoh_signal_eval(sig: SampledSignal):
    from .signals import eval_zoh

    return lambda t: eval_zoh(sig, t)


def bl_signal_eval(sig: SampledSignal):
    from .signals import eval_bl

    def fn(t):
        t = np.atleast_1d(t)
        return np.asarray(eval_bl(sig, t))

    return fn
