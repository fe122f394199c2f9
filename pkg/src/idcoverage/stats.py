"""Empirical characteristic functions, covariances, and CF distances.

All reductions run in a fixed deterministic order (numpy pairwise sums over
contiguous chunks processed sequentially), so estimates are reproducible to
the bit for a given sample matrix regardless of how the samples themselves
were produced.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import PreconditionError

_CHUNK_ELEMENTS = 10_000_000


@dataclass
class EmpiricalCF:
    thetas: np.ndarray = field(repr=False)   # (M, n) evaluation points
    estimates: np.ndarray = field(repr=False)  # (M,) complex
    n_samples: int = 0
    stderr: np.ndarray = field(repr=False, default=None)


def theta_product_grid(per_coordinate):
    """Cartesian product of per-coordinate theta values, as an (M, n) array."""
    rows = list(product(*[np.asarray(g, dtype=float) for g in per_coordinate]))
    return np.array(rows, dtype=float)


def empirical_cf(samples, thetas):
    """Mean of exp(i theta . row) over sample rows, with component stderrs.

    The standard error reported per point is the larger of the real and
    imaginary component standard errors (conservative, and never above
    2/sqrt(N) since both components live in [-1, 1]).
    """
    samples = np.atleast_1d(np.asarray(samples, dtype=float))
    if samples.ndim == 1:
        samples = samples[:, None]
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.ndim == 1:
        thetas = thetas[:, None]
    n, m = samples.shape[0], thetas.shape[0]
    if n < 1:
        raise PreconditionError("need at least one sample row")
    if thetas.shape[1] != samples.shape[1]:
        raise PreconditionError("theta dimension must match sample columns")
    sum_c = np.zeros(m)
    sum_s = np.zeros(m)
    sum_c2 = np.zeros(m)
    sum_s2 = np.zeros(m)
    chunk = max(1, _CHUNK_ELEMENTS // max(m, 1))
    for lo in range(0, n, chunk):
        inner = samples[lo : lo + chunk] @ thetas.T
        c = np.cos(inner)
        s = np.sin(inner)
        sum_c += c.sum(axis=0)
        sum_s += s.sum(axis=0)
        sum_c2 += (c * c).sum(axis=0)
        sum_s2 += (s * s).sum(axis=0)
    est = (sum_c + 1j * sum_s) / n
    if n > 1:
        var_c = np.maximum(sum_c2 - sum_c**2 / n, 0.0) / (n - 1)
        var_s = np.maximum(sum_s2 - sum_s**2 / n, 0.0) / (n - 1)
        stderr = np.sqrt(np.maximum(var_c, var_s) / n)
    else:
        stderr = np.zeros(m)
    return EmpiricalCF(thetas=thetas, estimates=est, n_samples=n, stderr=stderr)


def empirical_cov(samples, pairs):
    """Unbiased sample covariance for each (k, l) column pair, with stderr."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if n < 2:
        raise PreconditionError("need at least two sample rows")
    out = []
    for k, l in pairs:
        x = samples[:, k] - samples[:, k].mean()
        y = samples[:, l] - samples[:, l].mean()
        cross = x * y
        cov = cross.sum() / (n - 1)
        stderr = cross.std(ddof=1) / np.sqrt(n)
        out.append((float(cov), float(stderr)))
    return out


def cf_distance(emp, analytic):
    """(sup, rms) modulus distance between estimates and analytic values."""
    analytic = np.asarray(analytic, dtype=complex)
    if analytic.shape != emp.estimates.shape:
        raise PreconditionError("analytic grid does not match the empirical grid")
    diff = np.abs(emp.estimates - analytic)
    return float(diff.max()), float(np.sqrt(np.mean(diff**2)))


def cf_report(emp, distances=None):
    """JSON-ready report: grid, per-point estimates, optional distances."""
    report = {
        "grid": emp.thetas.tolist(),
        "n_samples": int(emp.n_samples),
        "estimates": [
            {
                "theta": emp.thetas[i].tolist(),
                "re": float(emp.estimates[i].real),
                "im": float(emp.estimates[i].imag),
                "stderr": float(emp.stderr[i]),
            }
            for i in range(emp.thetas.shape[0])
        ],
    }
    if distances is not None:
        report["distances"] = {"sup": distances[0], "l2": distances[1]}
    return report
