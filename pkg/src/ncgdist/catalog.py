"""Registry of closed-form distance formulas, addressable by string id.

Each entry takes a JSON-like parameter dict and returns a JSON-serializable
value; infinite distances are reported as the string ``"infinite"``.
Complex numbers may be given as ``[re, im]`` pairs, Bloch points as ``[x, y, z]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bundle, closed_forms as cf, moyal
from .algebra import BlochPoint


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    formula_ref: str
    params: dict          # name -> short description
    evaluate: Callable[[dict], object]
    realizer: str | None = None   # name of the triple builder realizing it, if any

    def describe(self) -> dict:
        return {"id": self.id, "formula_ref": self.formula_ref, "params": self.params,
                "realizer": self.realizer}


def encode(x):
    """JSON-friendly value: ``inf`` becomes ``"infinite"``, tuples become lists."""
    if isinstance(x, (tuple, list)):
        return [encode(v) for v in x]
    if isinstance(x, dict):
        return {k: encode(v) for k, v in x.items()}
    if isinstance(x, (float, np.floating)):
        return "infinite" if math.isinf(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _get(p: dict, name: str):
    if name not in p:
        raise ValueError(f"missing parameter '{name}'")
    return p[name]


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError("complex numbers must be [re, im] pairs")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _cvec(x) -> np.ndarray:
    return np.array([_complex(v) for v in x])


def _bloch(x) -> BlochPoint:
    if len(x) != 3:
        raise ValueError("Bloch points are [x, y, z]")
    return BlochPoint(*map(float, x))


def _f(p, name) -> float:
    return float(_get(p, name))


def _i(p, name) -> int:
    v = _get(p, name)
    if int(v) != v:
        raise ValueError(f"parameter '{name}' must be an integer")
    return int(v)


def _inf_or_float(x) -> float:
    return math.inf if x in ("inf", "infinite", None) else float(x)


def _four_point(p):
    params = cf.FourPointParams(_f(p, "d1"), _inf_or_float(p.get("d2", "inf")), _f(p, "d3"),
                                _f(p, "d4"), _inf_or_float(p.get("d5", "inf")), _f(p, "d6"))
    return cf.four_point_special(params, printed=bool(p.get("printed", False)))


def _star(p):
    r = cf.star_resistances(_f(p, "a"), _f(p, "b"), _f(p, "c"))
    return {"r": list(r), "R": list(cf.triangle_resistances(*r))}


def _qparams(p) -> moyal.QuantumLengthParams:
    return moyal.QuantumLengthParams(_f(p, "lambda_p"), _i(p, "m"), _i(p, "n"),
                                     _complex(p.get("kappa", 0)), _complex(p.get("kappa_t", 0)))


def _bundle_params(p) -> bundle.CircleBundleParams:
    return bundle.CircleBundleParams(tuple(_get(p, "R")), tuple(_get(p, "omega")),
                                     tuple(_get(p, "phi")), int(p.get("k", 0)),
                                     float(p.get("tau0", 0.0)))


_ENTRIES = [
    CatalogEntry("two_point", "two-point space: 1/|m|", {"m": "complex coupling"},
                 lambda p: math.inf if _complex(_get(p, "m")) == 0 else 1.0 / abs(_complex(p["m"])),
                 "two_point_triple"),
    CatalogEntry("three_point", "three-point space closed form", {
        "D12": "coupling", "D13": "coupling", "D23": "coupling"},
        lambda p: cf.three_point_distance(cf.ThreePointParams(_f(p, "D12"), _f(p, "D13"), _f(p, "D23"))),
        "graph_triple"),
    CatalogEntry("three_point_inverse", "three-point couplings from distances",
                 {"a": "d(1,2)", "b": "d(1,3)", "c": "d(2,3)"},
                 lambda p: vars(cf.three_point_inverse(_f(p, "a"), _f(p, "b"), _f(p, "c"))),
                 "graph_triple"),
    CatalogEntry("star_triangle", "star and triangle resistances",
                 {"a": "d(1,2)", "b": "d(1,3)", "c": "d(2,3)"}, _star),
    CatalogEntry("four_point", "four-point cycle with D13 = D24 = 0", {
        "d1": "1/D12", "d3": "1/D14", "d4": "1/D23", "d6": "1/D34",
        "printed": "optional bool, evaluate the uncorrected variant"}, _four_point, "graph_triple"),
    CatalogEntry("complete_graph", "complete graph: sqrt(2/N)/|k|", {"N": "points", "k": "weight"},
                 lambda p: cf.complete_graph_distance(_i(p, "N"), _f(p, "k")), "graph_triple"),
    CatalogEntry("cut_link", "complete graph with one link removed: sqrt(2/(N-2))/|k|",
                 {"N": "points", "k": "weight"},
                 lambda p: cf.cut_link_distance(_i(p, "N"), _f(p, "k")), "graph_triple"),
    CatalogEntry("graph_geodesic", "shortest path with edge length 1/|D|",
                 {"weights": "symmetric matrix", "i": "index", "j": "index"},
                 lambda p: cf.graph_geodesic_length(np.array(_get(p, "weights"), float),
                                                    _i(p, "i"), _i(p, "j"))),
    CatalogEntry("m2_eigen", "M_2 with diagonal D: chord distance over |d1 - d2|",
                 {"d1": "eigenvalue", "d2": "eigenvalue", "p": "Bloch point", "q": "Bloch point"},
                 lambda p: cf.m2_eigen_distance(_f(p, "d1"), _f(p, "d2"), _bloch(_get(p, "p")),
                                                _bloch(_get(p, "q"))), "m2_diagonal_triple"),
    CatalogEntry("moyal_ball", "two-level truncated plane on the Bloch ball",
                 {"theta": "deformation", "p": "Bloch point", "q": "Bloch point"},
                 lambda p: cf.moyal_ball_distance(_f(p, "theta"), _bloch(_get(p, "p")),
                                                  _bloch(_get(p, "q"))), "truncated_moyal_triple"),
    CatalogEntry("sphere_point", "projective space plus a point",
                 {"v": "complex vector", "xi": "unit vector", "zeta": "unit vector"},
                 lambda p: cf.sphere_point_distance(cf.SpherePointParams(
                     _cvec(_get(p, "v")), _cvec(_get(p, "xi")), _cvec(_get(p, "zeta")))),
                 "sphere_point_triple"),
    CatalogEntry("pythagoras", "product bounds (sqrt(d1^2 + d2^2), d1 + d2)",
                 {"d1": "distance", "d2": "distance"},
                 lambda p: cf.pythagoras_bounds(_f(p, "d1"), _f(p, "d2")), "product_triples"),
    CatalogEntry("far_classes", "holonomy classes mod 2 pi", {"theta": "list of holonomy angles"},
                 lambda p: dict(zip(("classes", "n_c"), bundle.far_classes(_get(p, "theta"))))),
    CatalogEntry("fiber_n2", "fiber chord form, two directions",
                 {"R": "sqrt(R1 R2)", "omega": "holonomy ratio", "Xi": "fiber coordinate"},
                 lambda p: bundle.fiber_distance_n2(_f(p, "R"), _f(p, "omega"), _f(p, "Xi"))),
    CatalogEntry("fiber_general", "fiber distance: pi * trace norm of S_k",
                 {"R": "weights (sum 2)", "omega": "holonomy ratios", "phi": "phases", "k": "winding"},
                 lambda p: bundle.fiber_distance_general(_bundle_params(p))),
    CatalogEntry("horizontal_fiber", "horizontal length 2 k pi", {"k": "winding"},
                 lambda p: bundle.horizontal_fiber_distance(_i(p, "k"))),
    CatalogEntry("torus_n2", "torus maximization over the base triangle", {
        "R": "sqrt(R1 R2)", "z_xi": "(R1 - R2)/2", "omega": "holonomy ratio", "k": "winding",
        "tau0": "base point", "phi": "phase"},
        lambda p: bundle.torus_distance_n2(_f(p, "R"), _f(p, "z_xi"), _f(p, "omega"), _i(p, "k"),
                                           _f(p, "tau0"), _f(p, "phi"))),
    CatalogEntry("moyal_eigen", "oscillator eigenstates: sqrt(theta/2) sum 1/sqrt(k)",
                 {"theta": "deformation", "m": "level", "n": "level"},
                 lambda p: moyal.moyal_eigenstate_distance(_f(p, "theta"), _i(p, "m"), _i(p, "n"))),
    CatalogEntry("translation", "translated states: |kappa|", {"kappa": "complex translation"},
                 lambda p: moyal.translation_distance(_complex(_get(p, "kappa")))),
    CatalogEntry("quantum_sq_length", "squared quantum length 2E_m + 2E_n + |dkappa|^2",
                 {"lambda_p": "length scale", "m": "level", "n": "level",
                  "kappa": "translation", "kappa_t": "translation"},
                 lambda p: moyal.quantum_sq_length(_qparams(p))),
    CatalogEntry("modified_quantum_length", "sqrt(|d_L2 - 4 sqrt(E_m E_n)|)",
                 {"lambda_p": "length scale", "m": "level", "n": "level",
                  "kappa": "translation", "kappa_t": "translation"},
                 lambda p: moyal.modified_quantum_length(_qparams(p))),
    CatalogEntry("doubled_plane", "two-sheeted plane: sqrt(t^2 + 1/Lambda^2)",
                 {"translation": "distance on one sheet", "Lambda": "sheet coupling"},
                 lambda p: moyal.doubled_plane_distance(_f(p, "translation"), _f(p, "Lambda"))),
]

REGISTRY: dict[str, CatalogEntry] = {e.id: e for e in _ENTRIES}

# command aliases for the bundle and moyal subcommands
ALIASES = {("bundle", "fiber"): "fiber_general", ("bundle", "fiber_n2"): "fiber_n2",
           ("bundle", "torus"): "torus_n2", ("moyal", "eigen"): "moyal_eigen",
           ("moyal", "qlength"): "modified_quantum_length",
           ("moyal", "sqlength"): "quantum_sq_length"}


def list_entries() -> list[dict]:
    return [e.describe() for e in _ENTRIES]


def evaluate(entry_id: str, params: dict):
    """Evaluate a registry entry; raises ``KeyError`` for an unknown id."""
    if entry_id not in REGISTRY:
        raise KeyError(entry_id)
    if not isinstance(params, dict):
        raise ValueError("parameters must be a JSON object")
    return encode(REGISTRY[entry_id].evaluate(params))
