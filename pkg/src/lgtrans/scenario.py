"""JSON scenario files for ``lgtrans evaluate``.

A scenario names the atom, the beam, the initial and final states and a
multipole cutoff. Version "1" layout::

    {
      "version": "1",
      "atom": {"mass_fraction_e": 0.000544, "charge": 1.0},
      "beam": {"winding": 1, "k_w0": 40, "eps": {"-1": 0, "0": 1, "+1": 0}},
      "initial": {"cm": {"N": 6, "M": 0}, "electronic": {"n": 1, "l": 0, "m": 0}},
      "final":   {"cm": {"N": 6, "M": 1}, "electronic": {"n": 2, "l": 1, "m": 0}},
      "w_ratio": 1e-4,
      "k_scale": 0.001,
      "max_multipole": 2
    }

Complex numbers are given as a bare real or a ``[re, im]`` pair. The
polarization is either ``eps`` (spherical components) or ``cartesian``
(``x``, ``y``, ``z``). A missing final ``K`` is filled in from axial
momentum conservation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import jsonschema

from .errors import DomainError
from .model import AtomSpec, BeamConfig, CMState, ElectronicState
from .transitions import (
    DIMENSIONAL_PREFACTOR,
    REDUCED_PREFACTOR,
    TransitionResult,
    conservation_check,
    enumerate_channels,
    matrix_element,
)

__all__ = ["SCHEMA", "Scenario", "ScenarioError", "load_scenario", "parse_scenario", "evaluate"]

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}
_POS = {"type": "number", "exclusiveMinimum": 0}


def _obj(props: dict, required=()):
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


_CM = _obj({"N": {"type": "integer", "minimum": 0}, "M": {"type": "integer"}, "K": {"type": "number"}}, ("N", "M"))
_ELECTRONIC = _obj(
    {
        "n": {"type": "integer", "minimum": 1},
        "l": {"type": "integer", "minimum": 0},
        "m": {"type": "integer"},
        "bohr_radius": _POS,
    },
    ("n", "l", "m"),
)
_STATE = _obj({"cm": _CM, "electronic": _ELECTRONIC}, ("cm", "electronic"))

SCHEMA = _obj(
    {
        "version": {"const": "1"},
        "atom": _obj(
            {
                "mass_fraction_e": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "mass_fraction_n": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "charge": {"type": "number"},
            }
        ),
        "beam": {
            **_obj(
                {
                    "winding": {"type": "integer"},
                    "k_w0": _POS,
                    "amplitude": _POS,
                    "eps": _obj({"-1": _COMPLEX, "0": _COMPLEX, "+1": _COMPLEX}),
                    "cartesian": _obj({"x": _COMPLEX, "y": _COMPLEX, "z": _COMPLEX}),
                    "normalize": {"type": "boolean"},
                },
                ("winding",),
            ),
            "not": {"required": ["eps", "cartesian"]},
        },
        "initial": _STATE,
        "final": _STATE,
        "w_ratio": _POS,
        "k_scale": _POS,
        "max_multipole": {"type": "integer", "minimum": 1},
        "emission": {"type": "boolean"},
        "output": _obj({"include_zero": {"type": "boolean"}, "factors": {"type": "boolean"}}),
    },
    ("version", "beam", "initial", "final"),
)


class ScenarioError(ValueError):
    """Invalid scenario; ``problems`` holds (json path, message) pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


@dataclass(frozen=True)
class Scenario:
    atom: AtomSpec
    beam: BeamConfig
    e_i: ElectronicState
    e_f: ElectronicState
    cm_i: CMState
    cm_f: CMState
    w_ratio: float = 1e-4
    k_scale: float = 1e-3
    max_multipole: int = 2
    emission: bool = False
    include_zero: bool = False
    factors: bool = False
    raw: dict = field(default_factory=dict, compare=False, repr=False)


def _complex(v) -> complex:
    return complex(v) if not isinstance(v, list) else complex(v[0], v[1])


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _build(problems, path, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (DomainError, ValueError, TypeError) as exc:
        problems.append((path, str(exc)))
        return None


def parse_scenario(doc) -> Scenario:
    """Validate a decoded JSON document and build the domain objects."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        raise ScenarioError([(_json_path(e.absolute_path), e.message) for e in errors])

    problems: list[tuple[str, str]] = []
    a = doc.get("atom", {})
    atom = _build(problems, "$.atom", AtomSpec, **a)

    b = doc["beam"]
    kw = {"k_w0": float(b.get("k_w0", 40.0)), "amplitude": float(b.get("amplitude", 1.0))}
    if "cartesian" in b:
        c = b["cartesian"]
        beam = _build(
            problems,
            "$.beam.cartesian",
            BeamConfig.from_cartesian,
            b["winding"],
            _complex(c.get("x", 0)),
            _complex(c.get("y", 0)),
            _complex(c.get("z", 0)),
            **kw,
        )
    else:
        e = b.get("eps", {"-1": 0, "0": 0, "+1": 1})
        eps = tuple(_complex(e.get(key, 0)) for key in ("-1", "0", "+1"))
        beam = _build(problems, "$.beam", BeamConfig, b["winding"], eps=eps, **kw)
    if beam is not None and b.get("normalize", False):
        beam = _build(problems, "$.beam.eps", beam.normalized)

    w_ratio = float(doc.get("w_ratio", 1e-4))
    emission = bool(doc.get("emission", False))
    states = {}
    for key in ("initial", "final"):
        s = doc[key]
        el = s["electronic"]
        states[key, "e"] = _build(
            problems,
            f"$.{key}.electronic",
            ElectronicState.hydrogenic,
            el["n"],
            el["l"],
            el["m"],
            el.get("bohr_radius", 1.0),
        )
    cm_i_doc, cm_f_doc = doc["initial"]["cm"], doc["final"]["cm"]
    cm_i = _build(problems, "$.initial.cm", CMState, cm_i_doc["N"], cm_i_doc["M"], cm_i_doc.get("K", 0.0), w_ratio)
    K_f = cm_f_doc.get("K")
    if K_f is None and cm_i is not None and beam is not None:
        K_f = cm_i.K + (-beam.k_w0 if emission else beam.k_w0)
    cm_f = _build(problems, "$.final.cm", CMState, cm_f_doc["N"], cm_f_doc["M"], K_f or 0.0, w_ratio)
    if problems:
        raise ScenarioError(problems)

    out = doc.get("output", {})
    return Scenario(
        atom=atom,
        beam=beam,
        e_i=states["initial", "e"],
        e_f=states["final", "e"],
        cm_i=cm_i,
        cm_f=cm_f,
        w_ratio=w_ratio,
        k_scale=float(doc.get("k_scale", 1e-3)),
        max_multipole=int(doc.get("max_multipole", 2)),
        emission=emission,
        include_zero=bool(out.get("include_zero", False)),
        factors=bool(out.get("factors", False)),
        raw=doc,
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError([("$", f"cannot read scenario file: {exc}")]) from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError([("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")]) from exc
    return parse_scenario(doc)


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _result_dict(res: TransitionResult, with_factors: bool) -> dict:
    d = res.to_dict()
    if with_factors:
        d["factors"] = {
            k: (_pair(v) if isinstance(v, complex) else float(v)) for k, v in sorted(res.factors.items())
        }
    return d


def evaluate(sc: Scenario) -> dict:
    """Every channel up to the multipole cutoff, per-branch sums and the total."""
    results = [
        matrix_element(sc.atom, sc.beam, sc.e_i, sc.e_f, sc.cm_i, sc.cm_f, ch, sc.k_scale, sc.emission)
        for ch in enumerate_channels(sc.beam.winding, sc.max_multipole)
    ]
    branches = {}
    for branch in (1, 2):
        amp = sum((r.amplitude for r in results if r.channel.branch == branch), 0j)
        branches[str(branch)] = {"amplitude": _pair(amp), "probability": abs(amp) ** 2}
    total = sum((r.amplitude for r in results), 0j)
    return {
        "version": "1",
        "units": {
            "reduced_prefactor": REDUCED_PREFACTOR,
            "dimensional_prefactor": DIMENSIONAL_PREFACTOR,
            "note": "amplitudes are in reduced units; multiply by dimensional_prefactor * e * w0 for physical units",
        },
        "resolved": {
            "K_i": sc.cm_i.K,
            "K_f": sc.cm_f.K,
            "eps": {key: _pair(sc.beam.eps_of(s)) for key, s in (("-1", -1), ("0", 0), ("+1", 1))},
        },
        "channels": [
            _result_dict(r, sc.factors) for r in results if sc.include_zero or r.amplitude != 0
        ],
        "branches": branches,
        "total": {"amplitude": _pair(total), "probability": abs(total) ** 2},
        "conservation": conservation_check(results).to_dict(),
    }
