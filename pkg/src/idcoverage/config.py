"""JSON run configurations -> domain objects.

Every builder takes the parsed JSON fragment plus a dotted path used in
error messages, so a bad field is reported by its location in the file.
"""

import numpy as np

from . import corr, levy, onoff, stats


class ConfigError(ValueError):
    """A configuration field is missing or invalid."""


def _kind(d, path, allowed):
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object, got {type(d).__name__}")
    kind = d.get("kind")
    if kind not in allowed:
        raise ConfigError(f"{path}.kind: expected one of {sorted(allowed)}, got {kind!r}")
    return kind


def _get(d, field, path, default=None, required=False):
    if field not in d:
        if required:
            raise ConfigError(f"{path}.{field}: required field is missing")
        return default
    return d[field]


def _wrap(path, builder, *args, **kwargs):
    try:
        return builder(*args, **kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def mark_from_config(d, path="marks"):
    kind = _kind(d, path, {"point_mass", "discrete", "normal"})
    if kind == "point_mass":
        return _wrap(path, levy.MarkDistribution, "point_mass",
                     value=_get(d, "value", path, required=True))
    if kind == "discrete":
        return _wrap(path, levy.MarkDistribution, "discrete",
                     values=_get(d, "values", path, required=True),
                     probs=_get(d, "probs", path, required=True))
    return _wrap(path, levy.MarkDistribution, "normal",
                 mean=_get(d, "mean", path, 0.0),
                 variance=_get(d, "variance", path, required=True))


def measure_from_config(d, path="measure"):
    kind = _kind(d, path, {"atomic", "reciprocal"})
    if kind == "atomic":
        return _wrap(path, levy.LevyMeasure, "atomic",
                     locations=_get(d, "locations", path, required=True),
                     masses=_get(d, "masses", path, required=True))
    return _wrap(path, levy.reciprocal_measure, _get(d, "b", path, required=True))


def law_from_config(d, path="law"):
    kind = _kind(d, path, {"gaussian", "poisson", "compound_poisson", "gamma",
                           "spectrally_positive"})
    if kind == "gaussian":
        return _wrap(path, levy.gaussian, _get(d, "beta", path, 0.0),
                     _get(d, "sigma2", path, required=True))
    if kind == "poisson":
        return _wrap(path, levy.poisson, _get(d, "rate", path, required=True))
    if kind == "compound_poisson":
        mark = mark_from_config(_get(d, "mark", path, required=True), f"{path}.mark")
        return _wrap(path, levy.compound_poisson,
                     _get(d, "rate", path, required=True), mark)
    if kind == "gamma":
        return levy.gamma_law()
    measure = measure_from_config(_get(d, "measure", path, required=True), f"{path}.measure")
    return _wrap(path, levy.spectrally_positive, measure,
                 trunc_eps=_get(d, "trunc_eps", path, 1e-6))


def service_from_config(d, path="service"):
    kind = _kind(d, path, {"exponential", "deterministic", "pareto_truncated", "discrete"})
    if kind == "exponential":
        return _wrap(path, corr.ServiceDistribution, "exponential",
                     rate=_get(d, "rate", path, required=True))
    if kind == "deterministic":
        return _wrap(path, corr.ServiceDistribution, "deterministic",
                     value=_get(d, "value", path, required=True))
    if kind == "pareto_truncated":
        return _wrap(path, corr.ServiceDistribution, "pareto_truncated",
                     shape=_get(d, "shape", path, required=True),
                     scale=_get(d, "scale", path, required=True))
    return _wrap(path, corr.ServiceDistribution, "discrete",
                 values=_get(d, "values", path, required=True),
                 probs=_get(d, "probs", path, required=True))


def structure_from_config(d, path="structure"):
    kind = _kind(d, path, {"exponential", "power", "integrated_tail", "mixture"})
    if kind == "exponential":
        return _wrap(path, corr.exponential_structure, _get(d, "mu", path, required=True))
    if kind == "power":
        return _wrap(path, corr.power_structure, _get(d, "alpha", path, required=True))
    if kind == "integrated_tail":
        svc = service_from_config(_get(d, "service", path, required=True), f"{path}.service")
        return corr.integrated_tail_structure(svc)
    comps = _get(d, "components", path, required=True)
    if not isinstance(comps, list) or not comps:
        raise ConfigError(f"{path}.components: expected a nonempty list")
    built = []
    for i, comp in enumerate(comps):
        w = _get(comp, "weight", f"{path}.components[{i}]", required=True)
        sub = structure_from_config(
            _get(comp, "structure", f"{path}.components[{i}]", required=True),
            f"{path}.components[{i}].structure")
        built.append((w, sub))
    return _wrap(path, corr.mixture_structure, built)


def array_from_config(d, path="array"):
    kind = _kind(d, path, {"power_example", "explicit"})
    mu = _get(d, "mu", path, required=True)
    if kind == "power_example":
        return _wrap(path, onoff.OnOffArraySpec, "power_example", mu,
                     alpha_exp=_get(d, "alpha", path, required=True),
                     b=_get(d, "b", path, required=True))
    rows = _get(d, "rows", path, required=True)
    if not isinstance(rows, dict):
        raise ConfigError(f"{path}.rows: expected an object keyed by row size")
    try:
        rows = {int(k): [tuple(p) for p in v] for k, v in rows.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.rows: {exc}") from exc
    return _wrap(path, onoff.OnOffArraySpec, "explicit", mu, rows=rows)


def grid_from_config(seq, path="grid"):
    if not isinstance(seq, (list, tuple)) or not seq:
        raise ConfigError(f"{path}: expected a nonempty list of epochs")
    return _wrap(path, corr.TimeGrid, tuple(seq))


def thetas_from_config(d, n, path=""):
    """Explicit theta vectors under "thetas", or a per-coordinate product
    grid under "theta_grid" (a single list is broadcast to all coordinates)."""
    loc = f"{path}thetas" if "thetas" in d else f"{path}theta_grid"
    if "thetas" in d:
        rows = d["thetas"]
        if not isinstance(rows, list) or not rows:
            raise ConfigError(f"{loc}: expected a nonempty list")
        if not isinstance(rows[0], list):
            rows = [[v] for v in rows] if n == 1 else [rows]
        arr = np.asarray(rows, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != n:
            raise ConfigError(f"{loc}: each theta vector must have length {n}")
        return arr
    if "theta_grid" in d:
        per = d["theta_grid"]
        if isinstance(per[0], (int, float)):
            per = [per] * n
        if len(per) != n:
            raise ConfigError(f"{loc}: need one coordinate grid per epoch ({n})")
        return stats.theta_product_grid(per)
    raise ConfigError(f"{path}thetas/theta_grid: one of the two is required")
