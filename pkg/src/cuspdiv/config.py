"""Run configuration: documented defaults, strict validation, dotted overrides.

The config is a JSON tree; unknown keys are rejected by name, every leaf is
type-checked, and command-line overrides address leaves via dotted paths
(values parsed as JSON, falling back to raw strings).
"""

import copy
import json


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "domain": {"gamma": 2.0, "k": 1, "m": 0},
    "quadrature": {"N": 48, "grading": 3.0},
    "tolerances": {
        "residual": 1e-2,        # divergence residual targets
        "quadrature": 1e-5,      # rule self-consistency checks
        "identity": 1e-10,       # exact algebraic identities
    },
    "divsolve": {
        "beta": -1.0,
        "eta": 0.0,
        "p": 2.0,
        "probes": 20,
        "h_fd": 5e-3,
        "probe_margin": 0.05,
        "norm_N": 16,
        "refine_factor": 1.4,
        "seed": 7,
        "ratio_drift_tol": 0.2,
    },
    "hardy": {
        "N": 48,
        "grading": 3.0,
        "kappas": [0.0, 0.5, -0.5],
        "ps": [1.5, 2.0, 3.0],
        "n_bumps": 10,
        "seed": 42,
        "slack": 1.05,
    },
    "infsup": {
        "levels": 3,
        "eps0": 0.1,
        "base_layers": 24,
        "base_cross": 6,
        "stability_ratio": 0.9,
        "cases": [
            {"gamma": 2.0, "exponent": 0.0, "expect": "decreasing"},
            {"gamma": 2.0, "exponent": 2.0, "expect": "stable"},
            {"gamma": 1.0, "exponent": 0.0, "expect": "stable"},
        ],
    },
    "korn": {
        "levels": 3,
        "eps0": 0.003,
        "base_layers": 96,
        "base_cross": 4,
        "ball_center": [0.7, 0.0],
        "ball_radius": 0.25,
        "stability_tol": 0.10,
        "cases": [
            {"gamma": 2.0, "beta": 0.0, "right_exponent": 0.0,
             "expect": "increasing"},
            {"gamma": 2.0, "beta": 0.0, "right_exponent": None,
             "expect": "stable"},
            {"gamma": 1.0, "beta": 0.0, "right_exponent": None,
             "expect": "stable"},
        ],
    },
    "counterexample": {
        "N": 64,
        "grading": 3.0,
        "refine_N": 96,
        "n_bumps": 5,
        "bump_rule_N": 96,
        "seed": 7,
        "value_tol": 1e-2,
        "identity_tol": 1e-3,
        "truncation_growth": 5.0,
    },
    "apcheck": {
        "mu_min": -8.0,
        "mu_max": 8.0,
        "mu_points": 50,
        "ps": [1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
        "dims": [[2, 0], [3, 0], [3, 1], [4, 0], [4, 1], [4, 2],
                 [5, 0], [5, 1], [5, 2], [5, 3],
                 [6, 0], [6, 1], [6, 2], [6, 3], [6, 4],
                 [7, 0], [7, 1], [7, 2], [7, 3], [7, 4]],
    },
    "scan_beta": {
        "points": 7,
        "margin_frac": 0.04,
        "p": 2.0,
        "eta_offset": 0.0,
        "N": 24,
        "norm_N": 10,
        "probes": 5,
        "seed": 3,
    },
    "lift_check": {
        "N": 32,
        "grading": 3.0,
        "tol": 1e-6,
        "cases": [{"n_prime": 1, "s": 1.0}, {"n_prime": 1, "s": 0.5},
                  {"n_prime": 2, "s": 1.0}, {"n_prime": 2, "s": 0.5}],
    },
    "output": {"dir": "reports"},
    "threads": 1,
}

_NUM = (int, float)

SCHEMA = {
    "domain": {"gamma": _NUM, "k": int, "m": int},
    "quadrature": {"N": int, "grading": _NUM},
    "tolerances": {"residual": _NUM, "quadrature": _NUM, "identity": _NUM},
    "divsolve": {"beta": _NUM, "eta": _NUM, "p": _NUM, "probes": int,
                 "h_fd": _NUM, "probe_margin": _NUM, "norm_N": int,
                 "refine_factor": _NUM, "seed": int, "ratio_drift_tol": _NUM},
    "hardy": {"N": int, "grading": _NUM, "kappas": list, "ps": list,
              "n_bumps": int, "seed": int, "slack": _NUM},
    "infsup": {"levels": int, "eps0": _NUM, "base_layers": int,
               "base_cross": int, "stability_ratio": _NUM, "cases": list},
    "korn": {"levels": int, "eps0": _NUM, "base_layers": int,
             "base_cross": int, "ball_center": list, "ball_radius": _NUM,
             "stability_tol": _NUM, "cases": list},
    "counterexample": {"N": int, "grading": _NUM, "refine_N": int,
                       "n_bumps": int, "bump_rule_N": int, "seed": int,
                       "value_tol": _NUM, "identity_tol": _NUM,
                       "truncation_growth": _NUM},
    "apcheck": {"mu_min": _NUM, "mu_max": _NUM, "mu_points": int,
                "ps": list, "dims": list},
    "scan_beta": {"points": int, "margin_frac": _NUM, "p": _NUM,
                  "eta_offset": _NUM, "N": int, "norm_N": int,
                  "probes": int, "seed": int},
    "lift_check": {"N": int, "grading": _NUM, "tol": _NUM, "cases": list},
    "output": {"dir": str},
    "threads": (int, type(None)),
}


def _validate(node, schema, path):
    if not isinstance(node, dict):
        raise ConfigError(f"config node {path or '<root>'} must be an object")
    for key, val in node.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key: {where}")
        expect = schema[key]
        if isinstance(expect, dict):
            _validate(val, expect, where)
        else:
            if expect is _NUM or expect == _NUM:
                ok = isinstance(val, _NUM) and not isinstance(val, bool)
            elif isinstance(expect, tuple):
                ok = isinstance(val, expect) and not isinstance(val, bool)
            elif expect is int:
                ok = isinstance(val, int) and not isinstance(val, bool)
            else:
                ok = isinstance(val, expect)
            if not ok:
                raise ConfigError(
                    f"config key {where} has wrong type "
                    f"{type(val).__name__}: {val!r}")


def _merge(base, update, path=""):
    for key, val in update.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict) and isinstance(val, dict):
            _merge(base[key], val, where)
        else:
            base[key] = val


def load_config(path=None, overrides=()):
    """Defaults, then the config file, then dotted overrides; validated."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(user, dict):
            raise ConfigError("config file must hold a JSON object")
        _merge(cfg, user)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        dotted, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = dotted.split(".")
        for part in parts[:-1]:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError(f"unknown config key: {dotted}")
            node = node[part]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key: {dotted}")
        node[parts[-1]] = value
    _validate(cfg, SCHEMA, "")
    return cfg
