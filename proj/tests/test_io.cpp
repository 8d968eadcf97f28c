#include "doctest.h"
#include "loopsmith/corpus.hpp"
#include "loopsmith/io.hpp"
#include "loopsmith/pipeline.hpp"

using namespace loopsmith;

TEST_CASE("instance round trip") {
    Instance sw = swap_instance();
    sw.fixtures["U"] = KaryRel::from_tuples(6, 1, {{0}, {3}});
    std::string text = instance_to_json(sw);
    Instance back = instance_from_json(text);
    CHECK(back.name == sw.name);
    CHECK(back.g == sw.g);
    CHECK(back.gp.generators() == sw.gp.generators());
    CHECK(back.fixtures.at("U") == sw.fixtures.at("U"));
    CHECK(instance_to_json(back) == text);
    CHECK(text.back() == '\n');
}

TEST_CASE("malformed instances") {
    CHECK_THROWS_AS(instance_from_json("{"), ParseError);
    CHECK_THROWS_AS(instance_from_json("[]"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"edges": []})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": 2, "edges": [[0, 2]]})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": 2, "edges": [[0]]})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": 2, "edges": [], "generators": [[0, 0]]})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": 3, "edges": [[0, 1]], "generators": [[1, 2, 0]]})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": "3", "edges": []})"), ParseError);
    CHECK_THROWS_AS(instance_from_json(R"({"n": 2, "edges": [], "fixtures": {"U": {"arity": 1, "tuples": [[5]]}}})"),
                    ParseError);
    CHECK_NOTHROW(instance_from_json(R"({"n": 2, "edges": [[0, 1], [1, 0]], "generators": [[1, 0]]})"));
}

TEST_CASE("certificate round trip") {
    Instance k3 = symmetric_k3();
    Certificate c = run_master(k3.g, k3.gp);
    std::string text = certificate_to_json(c);
    Certificate back = certificate_from_json(text);
    CHECK(back.kind == c.kind);
    CHECK(back.script == c.script);
    CHECK(back.sigma == c.sigma);
    CHECK(back.classes == c.classes);
    CHECK(back.component == c.component);
    CHECK(back.trace == c.trace);
    CHECK(back.digests == c.digests);
    CHECK(certificate_to_json(back) == text);
    CHECK(verify_certificate(k3.g, k3.gp, back).ok);

    Digraph ab(2, {{0, 1}, {1, 0}});
    Certificate p = run_master(ab, PermGroup(2, {{1, 0}}));
    Certificate pb = certificate_from_json(certificate_to_json(p));
    CHECK(pb.kind == Certificate::Kind::Pseudoloop);
    CHECK(pb.edge == p.edge);
    CHECK(pb.orbit == p.orbit);

    CHECK_THROWS_AS(certificate_from_json(R"({"kind": "other"})"), ParseError);
    CHECK_THROWS_AS(certificate_from_json(R"({"kind": "pseudoloop", "orbit": 0, "edge": [1]})"), ParseError);
}

TEST_CASE("script round trip") {
    PPScript s;
    s.add_primitive("E", PrimKind::Edge, {});
    s.add_primitive("W0", PrimKind::OrbitUnion, {0});
    PPFormula f;
    f.num_vars = 2;
    f.free = {1};
    f.add("W0", {0});
    f.add("E", {0, 1});
    f.params.push_back({0, 0});
    s.add_formula("F", f);
    s.output = "F";
    PPScript back = script_from_json(script_to_json(s));
    CHECK(back == s);
    CHECK_THROWS_AS(script_from_json(R"({"defs": [{"name": "X", "arity": 1}], "output": "X"})"), ParseError);
    CHECK_THROWS_AS(
        script_from_json(R"({"defs": [{"name": "X", "arity": 1, "prim": {"kind": "nope", "args": []}}], "output": "X"})"),
        ParseError);
    CHECK_THROWS_AS(
        script_from_json(
            R"({"defs": [{"name": "X", "arity": 1, "formula": {"free": [3], "num_vars": 1, "atoms": []}}], "output": "X"})"),
        ParseError);
}

TEST_CASE("generation is deterministic") {
    GenParams p{4, 7, 0.4, GroupMode::Sampled};
    CHECK(instance_to_json(generate(11, p)) == instance_to_json(generate(11, p)));
    GenParams c{4, 8, 0.4, GroupMode::Covering, 2};
    Instance a = generate(12, c);
    CHECK(instance_to_json(a) == instance_to_json(generate(12, c)));
    CHECK(a.gp.is_automorphism_group_of(a.g));
}

TEST_CASE("dot output") {
    std::string d = to_dot(Digraph(2, {{0, 1}}), "g", {"a", "b"});
    CHECK(d.find("digraph") != std::string::npos);
    CHECK(d.find("->") != std::string::npos);
    CHECK(d.find("\"a\"") != std::string::npos);
}
