"""Decide pseudoloops versus hardness for finite digraphs with a symmetry group."""

import json

from ._loopsmith import (
    Digraph,
    GuardError,
    Instance,
    ParseError,
    PermGroup,
    PreconditionError,
    ShapeError,
    alpha_classes,
    check_finitises,
    check_siggerscrap,
    directed_cycle,
    euclid_hammer,
    find_siggers,
    generate,
    orbit_quotient,
    swap_instance,
    symmetric_k3,
)
from ._loopsmith import analyze_json as _analyze_json
from ._loopsmith import verify_json as _verify_json


def analyze(graph, group=None):
    """Certificate for the instance as a dict (kind "pseudoloop" or "hardness")."""
    if group is None:
        group = PermGroup.trivial(graph.n)
    return json.loads(_analyze_json(graph, group))


def verify(graph, group, certificate):
    """(ok, reasons) for a certificate given as a dict or a JSON string."""
    text = certificate if isinstance(certificate, str) else json.dumps(certificate)
    ok, reasons = _verify_json(graph, group, text)
    return ok, list(reasons)


__all__ = [
    "Digraph",
    "GuardError",
    "Instance",
    "ParseError",
    "PermGroup",
    "PreconditionError",
    "ShapeError",
    "alpha_classes",
    "analyze",
    "check_finitises",
    "check_siggerscrap",
    "directed_cycle",
    "euclid_hammer",
    "find_siggers",
    "generate",
    "orbit_quotient",
    "swap_instance",
    "symmetric_k3",
    "verify",
]
