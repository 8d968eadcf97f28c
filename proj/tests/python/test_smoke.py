import json

import pytest

import loopsmith as ls


def test_pseudoloop():
    g = ls.Digraph(2, [(0, 1), (1, 0)])
    gp = ls.PermGroup(2, [[1, 0]])
    cert = ls.analyze(g, gp)
    assert cert["kind"] == "pseudoloop"
    assert ls.verify(g, gp, cert) == (True, [])


def test_hardness_and_tampering():
    k3 = ls.symmetric_k3()
    cert = ls.analyze(k3.graph, k3.group)
    assert cert["kind"] == "hardness"
    assert len(cert["sigma"]) >= 2
    ok, reasons = ls.verify(k3.graph, k3.group, cert)
    assert ok and reasons == []
    cert["sigma"] = [sum(cert["sigma"], [])]
    ok, reasons = ls.verify(k3.graph, k3.group, json.dumps(cert))
    assert not ok
    assert "sigma-not-proper-or-mismatch" in reasons


def test_preconditions():
    with pytest.raises(ls.PreconditionError):
        ls.analyze(ls.Digraph(3, [(0, 1), (1, 2)]))
    c3 = ls.directed_cycle(3)
    with pytest.raises(ls.PreconditionError):
        ls.analyze(c3.graph, c3.group)


def test_swap_instance():
    inst = ls.swap_instance()
    assert len(inst.group.orbits()) == 3
    assert len(ls.alpha_classes(inst.graph, inst.group)) == 6
    ok, violations = ls.check_finitises(inst.graph, inst.group)
    assert ok and violations == []
    q = ls.orbit_quotient(inst.graph, inst.group)
    assert q["loop_witness"] is None
    assert sorted(q["quotient"].edges()) == [(0, 1), (0, 2), (1, 0), (2, 1)]
    assert ls.check_siggerscrap(inst.graph, inst.group)["ok"]


def test_siggers_search():
    assert ls.find_siggers(ls.directed_cycle(3).graph) is not None
    assert ls.find_siggers(ls.symmetric_k3().graph) is None
    with pytest.raises(ls.GuardError):
        ls.find_siggers(ls.swap_instance().graph)


def test_json_round_trip_and_generation():
    a = ls.generate(7, mode="covering", n_min=4, n_max=8)
    b = ls.Instance.from_json(a.to_json())
    assert a.to_json() == b.to_json()
    assert ls.generate(7, mode="covering", n_min=4, n_max=8).to_json() == a.to_json()
    with pytest.raises(ls.ParseError):
        ls.Instance.from_json('{"n": 3, "edges": [[0, 1]], "generators": [[1, 2, 0]]}')
    with pytest.raises(ValueError):
        ls.generate(1, mode="nope")


def test_euclid():
    s, t = ls.euclid_hammer(3, 4, 13)
    assert s > 0 and t > 0 and 3 * s + 4 * t == 13
