"""Hot numeric kernels: torus grid scans and greedy separation.

Two implementations of each kernel are kept in lockstep: a numba @njit
version and a pure-numpy fallback.  Selection is by the ALGDYN_BACKEND
environment variable ("numba", "numpy", or "auto"; default auto picks
numba when importable).  Both paths accumulate terms in the same sorted
order so results agree to the last few ulps; tests pin the two paths
against each other.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("ALGDYN_BACKEND", "auto").strip().lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(f"ALGDYN_BACKEND must be auto|numba|numpy, got {_REQUESTED!r}")

_HAVE_NUMBA = False
if _REQUESTED in ("auto", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise RuntimeError("ALGDYN_BACKEND=numba but numba is not importable")

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


# -- |f^| on a uniform grid ------------------------------------------------


def _grid_abs_values_np(exps: np.ndarray, coefs: np.ndarray, m: int, offset: float) -> np.ndarray:
    """|sum_t c_t exp(2 pi i n_t . theta)| on the grid theta = (j+offset)/m, C order."""
    nterms, d = exps.shape
    axis = (np.arange(m) + offset) / m
    acc = np.zeros((m,) * d, dtype=np.complex128)
    for t in range(nterms):
        phase = np.zeros((m,) * d, dtype=np.float64)
        for i in range(d):
            shape = [1] * d
            shape[i] = m
            phase = phase + exps[t, i] * axis.reshape(shape)
        acc = acc + coefs[t] * np.exp(2j * np.pi * phase)
    return np.abs(acc).ravel()


def _make_grid_abs_values_nb():
    @njit(cache=True)
    def _grid_abs_values_nb(exps, coefs, m, offset):  # pragma: no cover - jit
        nterms, d = exps.shape
        npts = 1
        for _ in range(d):
            npts *= m
        out = np.empty(npts, dtype=np.float64)
        two_pi = 2.0 * np.pi
        coords = np.empty(d, dtype=np.int64)
        for p in range(npts):
            rem = p
            for i in range(d - 1, -1, -1):
                coords[i] = rem % m
                rem //= m
            s_re = 0.0
            s_im = 0.0
            for t in range(nterms):
                ang = 0.0
                for i in range(d):
                    ang += exps[t, i] * ((coords[i] + offset) / m)
                ang *= two_pi
                s_re += coefs[t] * np.cos(ang)
                s_im += coefs[t] * np.sin(ang)
            out[p] = np.sqrt(s_re * s_re + s_im * s_im)
        return out

    return _grid_abs_values_nb


# -- greedy separated subfamily -------------------------------------------


def _greedy_separated_np(vals: np.ndarray, eps: float) -> np.ndarray:
    """Greedy maximal subfamily of rows pairwise (., eps)-separated.

    Rows are tuples of torus coordinates (reals mod 1); two rows are
    separated when some coordinate differs by more than eps on the circle.
    Returns the indices kept, in scan order.
    """
    n = vals.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    kept = [0]
    for i in range(1, n):
        diff = vals[i] - vals[kept]
        diff -= np.round(diff)
        if np.all(np.max(np.abs(diff), axis=1) > eps):
            kept.append(i)
    return np.array(kept, dtype=np.int64)


def _make_greedy_separated_nb():
    @njit(cache=True)
    def _greedy_separated_nb(vals, eps):  # pragma: no cover - jit
        n, w = vals.shape
        kept = np.empty(n, dtype=np.int64)
        nkept = 0
        if n == 0:
            return kept[:0]
        kept[0] = 0
        nkept = 1
        for i in range(1, n):
            ok = True
            for jj in range(nkept):
                j = kept[jj]
                best = 0.0
                for t in range(w):
                    x = vals[i, t] - vals[j, t]
                    x = x - np.round(x)
                    if x < 0.0:
                        x = -x
                    if x > best:
                        best = x
                if best <= eps:
                    ok = False
                    break
            if ok:
                kept[nkept] = i
                nkept += 1
        return kept[:nkept]

    return _greedy_separated_nb


if BACKEND == "numba":
    _grid_abs_values_impl = _make_grid_abs_values_nb()
    _greedy_separated_impl = _make_greedy_separated_nb()
else:
    _grid_abs_values_impl = _grid_abs_values_np
    _greedy_separated_impl = _greedy_separated_np


def grid_abs_values(exps, coefs, m: int, offset: float = 0.0) -> np.ndarray:
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coefs = np.ascontiguousarray(coefs, dtype=np.float64)
    if exps.ndim != 2 or exps.shape[0] != coefs.shape[0]:
        raise ValueError("exps must be (terms, d) matching coefs")
    return _grid_abs_values_impl(exps, coefs, int(m), float(offset))


def greedy_separated(vals, eps: float) -> np.ndarray:
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    if vals.ndim != 2:
        raise ValueError("vals must be 2-d")
    return _greedy_separated_impl(vals, float(eps))


def backend_variants():
    """Both implementations of each kernel, for benchmarks and cross-checks."""
    variants = {
        "grid_abs_values": {"numpy": _grid_abs_values_np},
        "greedy_separated": {"numpy": _greedy_separated_np},
    }
    if _HAVE_NUMBA:
        variants["grid_abs_values"]["numba"] = _make_grid_abs_values_nb()
        variants["greedy_separated"]["numba"] = _make_greedy_separated_nb()
    return variants


def warmup() -> str:
    """Trigger jit compilation on tiny inputs; returns the active backend."""
    e = np.array([[1], [0]], dtype=np.int64)
    c = np.array([1.0, -2.0])
    grid_abs_values(e, c, 4, 0.0)
    greedy_separated(np.array([[0.0], [0.4]]), 0.1)
    return BACKEND
