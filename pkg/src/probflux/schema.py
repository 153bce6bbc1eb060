"""JSON schemas for run configurations and for the JSON documents the CLI emits."""

from __future__ import annotations

COMMANDS = ("solve", "check", "mc", "limiters", "convergence", "gds", "fnn-approx")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_posint = {"type": "integer", "minimum": 1}
_seed = {"type": "integer", "minimum": 0}
_nullable_num = {"type": ["number", "null"]}


def _obj(props: dict, required: tuple = ()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_profile = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["sine", "gauss", "riemann", "constant"]},
        "period": _pos,
        "amplitude": _num,
        "offset": _num,
        "center": _num,
        "width": _pos,
        "u_left": _num,
        "u_right": _num,
        "x_jump": _num,
        "value": _num,
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_network = _obj(
    {
        "alpha0": _num,
        "nodes": {
            "type": "array",
            "items": _obj({"alpha": _num, "y": {"type": "array", "items": _num, "minItems": 1}, "beta": _num},
                          ("alpha", "y", "beta")),
        },
    },
    ("nodes",),
)

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "probflux run configuration",
    **_obj(
        {
            "command": {"enum": list(COMMANDS)},
            "scheme": _obj(
                {
                    "name": {"enum": ["centered-euler", "lax-friedrichs", "upwind", "lax-wendroff", "limiter"]},
                    "a": _num,
                    "limiters": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                    "averaging": {"enum": ["mean", "cell"]},
                },
                ("name",),
            ),
            "problem": _obj(
                {"law": {"enum": ["advection", "burgers"]}, "a": _num, "u0": _profile},
            ),
            "grid": {
                "type": "object",
                "properties": {
                    "mode": {"enum": ["cone", "periodic"]},
                    "n": _posint,
                    "m": {"type": "integer", "minimum": 5},
                    "h": _pos,
                    "tau": _pos,
                    "x0": _num,
                    "t0": _num,
                },
                "required": ["mode", "h", "tau"],
                "additionalProperties": False,
                "allOf": [
                    {"if": {"properties": {"mode": {"const": "cone"}}}, "then": {"required": ["n"]}},
                    {"if": {"properties": {"mode": {"const": "periodic"}}}, "then": {"required": ["m"]}},
                ],
            },
            "steps": {"type": "integer", "minimum": 0},
            "mc": _obj(
                {"n_paths": _posint, "seed": _seed, "layer": {"type": "integer", "minimum": 0},
                 "index": {"type": "integer", "minimum": 0}, "workers": _posint},
                ("n_paths",),
            ),
            "convergence": _obj(
                {"levels": {"type": "array", "items": {"type": "integer", "minimum": 5}, "minItems": 2},
                 "horizon": _pos, "lambda": _pos, "length": _pos},
                ("levels", "horizon", "lambda"),
            ),
            "limiters": _obj({"v": _num, "gamma2": {"type": "number", "maximum": 0},
                              "gamma3": {"type": "number", "minimum": 0}, "lambda": _pos}, ("v",)),
            "gds": _obj(
                {"v0": {"enum": ["zero", "const", "mean-coupled"]}, "v0_value": _num, "h0": _num,
                 "slow_step": _pos, "substeps": _posint, "n_slow": {"type": "integer", "minimum": 0}},
                ("v0", "slow_step", "substeps", "n_slow"),
            ),
            "fnn": _obj(
                {
                    "network": _network,
                    "target": _obj(
                        {"kind": {"enum": ["constant", "gaussian", "network"]}, "value": _num,
                         "center": {"type": "array", "items": _num}, "width": _pos, "amplitude": _num,
                         "network": _network},
                        ("kind",),
                    ),
                    "box": {"type": "array", "minItems": 1,
                            "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}},
                    "n_samples": {"type": "integer", "minimum": 2},
                    "seed": _seed,
                    "workers": _posint,
                },
                ("network", "target", "box", "n_samples"),
            ),
            "output": _obj({"path": {"type": "string"}, "format": {"enum": ["csv", "json"]}}),
        },
        ("command",),
    ),
}


def _table(columns: dict) -> dict:
    return _obj({"lambda": _nullable_num, "rows": {"type": "array", "items": _obj(columns, tuple(columns))}},
                ("lambda", "rows"))


OUTPUT_SCHEMAS = {
    "check": _obj(
        {
            "scheme": {"type": "string"},
            "velocity": _num,
            "lambda": _num,
            "tau": _num,
            "h": _num,
            "probabilistic": {"type": "boolean"},
            "violated_entries": {"type": "array",
                                 "items": {"type": "array", "prefixItems": [{"type": "integer"}, _num],
                                           "minItems": 2, "maxItems": 2}},
            "cfl_bound": _nullable_num,
            "weights": {"type": "array", "items": _num, "minItems": 5, "maxItems": 5},
            "drift": _num,
            "second_moment": _num,
            "covariance": _num,
            "v_mc": _num,
            "local_residual": _num,
            "local_residual_plus_v": _num,
            "local_residual_minus_v": _num,
            "global_residual": _num,
            "flux_sum": _num,
            "landau_constant": _num,
            "limiter_feasible": {"type": ["boolean", "null"]},
            "covariance_nonnegative": {"type": "boolean"},
            "covariance_bound": _nullable_num,
        },
        ("scheme", "lambda", "probabilistic", "violated_entries", "cfl_bound", "weights"),
    ),
    "mc": _obj(
        {"estimate": _num, "std_error": _nullable_num, "deterministic_value": _num, "z_score": _nullable_num,
         "n_paths": _posint, "seed": _seed, "layer": {"type": "integer"}, "index": {"type": "integer"},
         "lambda": _num},
        ("estimate", "std_error", "deterministic_value", "z_score", "lambda"),
    ),
    "limiters": _obj(
        {"v": _num, "gamma1": _num, "gamma2": _num, "gamma3": _num, "gamma4": _num,
         "residual_gamma1": _num, "residual_gamma4": _num, "equality_residual": _num,
         "cfl_bound": _nullable_num, "limiter_feasible": {"type": ["boolean", "null"]}, "lambda": _nullable_num},
        ("gamma1", "gamma4", "residual_gamma1", "residual_gamma4", "cfl_bound", "lambda"),
    ),
    "fnn-approx": _obj(
        {"estimate": _num, "std_error": _nullable_num, "n_samples": _posint, "seed": _seed,
         "lambda": _nullable_num},
        ("estimate", "std_error", "lambda"),
    ),
    "solve": _table({"layer": {"type": "integer"}, "i": {"type": "integer"}, "x": _num, "t": _num, "u": _num,
                     "lambda": _num}),
    "convergence": _table({"m": {"type": "integer"}, "h": _num, "steps": {"type": "integer"},
                           "l1_error": _num, "observed_order": _nullable_num, "lambda": _num}),
    "gds": _table({"tau": _num, "h_slow": _num, "mu_mean": _num, "mu_min": _num, "mu_max": _num,
                   "lambda": _num}),
}
