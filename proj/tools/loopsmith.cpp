#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/io.hpp"
#include "loopsmith/limits.hpp"
#include "loopsmith/pipeline.hpp"
#include "loopsmith/polymorphism.hpp"

using namespace loopsmith;

namespace {

enum Exit { Ok = 0, Rejected = 1, Precondition = 2, Parse = 3 };

struct Globals {
    uint64_t seed = 1;
    std::string out;
    std::string assert_level = "desk";
    size_t max_group = 100000;
    std::string dot;
};

void emit(const Globals& gl, const std::string& text) {
    if (gl.out.empty())
        std::cout << text;
    else
        write_file(gl.out, text);
}

std::vector<std::string> class_labels(const Alpha& a) {
    std::vector<std::string> out;
    for (auto& c : a.classes) {
        std::string s = "{";
        for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
        out.push_back(s + "}");
    }
    return out;
}

int cmd_analyze(const Globals& gl, const std::string& path) {
    Instance in = instance_from_json(read_file(path));
    Alpha alpha = compute_alpha(in.g, in.gp);
    OrbitQuotient oq = orbit_digraph(in.g, in.gp);
    Digraph q = quotient(in.g, alpha);
    std::cout << "instance " << in.name << ": " << in.g.size() << " vertices, " << in.g.edge_count() << " edges\n";
    std::cout << "orbits: " << oq.quotient.size() << ", orbit quotient edges: " << oq.quotient.edge_count()
              << (oq.loop_witness ? " (has a loop)" : "") << "\n";
    std::cout << "alpha classes: " << alpha.num_classes() << ", class quotient edges: " << q.edge_count() << "\n";
    if (!gl.dot.empty()) write_file(gl.dot, to_dot(q, in.name, class_labels(alpha)));
    PipelineOptions opt;
    opt.checks = gl.assert_level != "off";
    opt.max_group = gl.max_group;
    Certificate c;
    try {
        c = run_master(in.g, in.gp, opt);
    } catch (const PreconditionError& e) {
        std::cout << "rejected: " << e.what() << "\n";
        return Precondition;
    }
    if (c.kind == Certificate::Kind::Pseudoloop) {
        std::cout << "verdict: pseudoloop, edge " << c.edge.first << " -> " << c.edge.second << " inside orbit "
                  << c.orbit << "\n";
    } else {
        std::cout << "verdict: hardness, component of " << c.component.size() << " vertices, sigma with "
                  << c.sigma.size() << " blocks, script of " << c.script.defs.size() << " definitions\n";
    }
    for (auto& t : c.trace) std::cout << "  " << t << "\n";
    std::string cert = certificate_to_json(c);
    if (gl.out.empty())
        std::cout << cert;
    else
        write_file(gl.out, cert);
    return Ok;
}

int cmd_verify(const std::string& ipath, const std::string& cpath) {
    Instance in = instance_from_json(read_file(ipath));
    Certificate c = certificate_from_json(read_file(cpath));
    VerifyResult r = verify_certificate(in.g, in.gp, c);
    if (r.ok) {
        std::cout << "certificate accepted\n";
        return Ok;
    }
    std::cout << "certificate rejected\n";
    for (auto& reason : r.reasons) std::cout << "  " << reason << "\n";
    return Rejected;
}

int cmd_alpha(const Globals& gl, const std::string& path) {
    Instance in = instance_from_json(read_file(path));
    Alpha a = compute_alpha(in.g, in.gp);
    if (!gl.dot.empty()) write_file(gl.dot, to_dot(quotient(in.g, a), in.name, class_labels(a)));
    emit(gl, alpha_to_json(a));
    return Ok;
}

int cmd_poly(const Globals& gl, const std::string& path) {
    Instance in = instance_from_json(read_file(path));
    NamedStructure s = as_structure(in.g);
    for (auto& [name, rel] : in.fixtures) s.add(name, rel);
    IdentitySpec spec = IdentitySpec::siggers4();
    SearchStats st;
    std::optional<OpTable> f;
    try {
        f = find_polymorphism(s, spec, &st);
    } catch (const GuardError& e) {
        std::cout << "rejected: " << e.what() << "\n";
        return Precondition;
    }
    std::cout << "siggers polymorphism: " << (f ? "found" : "none") << " (" << st.variables << " variables, "
              << st.constraints << " constraints, " << st.nodes << " nodes)\n";
    if (f) {
        auto errs = check_polymorphism(s, spec, *f);
        if (!errs.empty()) {
            std::cout << "re-check failed: " << errs.front() << "\n";
            return Rejected;
        }
        std::ostringstream os;
        os << "{\n  \"arity\": " << f->arity << ",\n  \"n\": " << f->n << ",\n  \"values\": [";
        for (size_t i = 0; i < f->values.size(); ++i) os << (i ? ", " : "") << f->values[i];
        os << "]\n}\n";
        if (!gl.out.empty()) write_file(gl.out, os.str());
    }
    return Ok;
}

int cmd_siggerscrap(const Globals& gl, const std::string& path) {
    Instance in = instance_from_json(read_file(path));
    SiggerscrapReport r;
    try {
        r = check_siggerscrap(in.g, in.gp);
    } catch (const ShapeError& e) {
        std::cout << "rejected: " << e.what() << "\n";
        return Precondition;
    }
    auto yn = [](bool b) { return b ? "holds" : "FAILS"; };
    std::cout << "(0+E)+E = 0u1: " << yn(r.union01) << "\n";
    std::cout << "1+E^-1 = 0u2: " << yn(r.union02) << "\n";
    std::cout << "0+E = 1u2: " << yn(r.union12) << "\n";
    std::cout << "alpha formula: " << yn(r.alpha_formula) << "\n";
    if (!gl.out.empty()) write_file(gl.out, script_to_json(r.script));
    return r.ok() ? Ok : Rejected;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loopsmith: finitising equivalences, pp-definitions and hardness certificates for digraphs"};
    app.require_subcommand(1);
    Globals gl;
    app.add_option("--seed", gl.seed, "random seed");
    app.add_option("--out", gl.out, "output file (default: stdout)");
    app.add_option("--assert-level", gl.assert_level, "runtime assertions")
        ->check(CLI::IsMember({"off", "desk"}));
    app.add_option("--max-group-closure", gl.max_group, "cap on enumerated group elements");
    app.add_option("--dot", gl.dot, "write the class quotient as Graphviz");

    std::string inst, cert;
    auto* analyze = app.add_subcommand("analyze", "decide an instance and emit a certificate");
    analyze->add_option("instance", inst)->required();
    auto* verify = app.add_subcommand("verify", "audit a certificate against an instance");
    verify->add_option("instance", inst)->required();
    verify->add_option("certificate", cert)->required();
    auto* alpha = app.add_subcommand("alpha", "dump the finitising equivalence");
    alpha->add_option("instance", inst)->required();
    auto* poly = app.add_subcommand("poly", "search for a 4-ary Siggers polymorphism");
    poly->add_option("instance", inst)->required();
    auto* sc = app.add_subcommand("siggerscrap", "check the three-orbit pattern identities");
    sc->add_option("instance", inst)->required();

    GenParams prm;
    std::string mode = "trivial";
    auto* gen = app.add_subcommand("gen", "generate an instance deterministically from the seed");
    gen->add_option("--mode", mode, "group mode")->check(CLI::IsMember({"trivial", "sampled", "covering"}));
    gen->add_option("--n-min", prm.n_min);
    gen->add_option("--n-max", prm.n_max);
    gen->add_option("--density", prm.density)->check(CLI::Range(0.0, 1.0));
    gen->add_option("--cover-degree", prm.cover_degree);
    gen->add_flag("--smooth", prm.smooth, "restrict to the smooth part");
    gen->add_flag("--loopless", prm.loopless, "no edges inside an orbit");
    gen->add_flag("--pattern", prm.pattern, "covering mode: lift the three-orbit pattern");

    for (auto* s : {analyze, verify, alpha, poly, sc, gen}) s->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : Parse;
    }
    try {
        if (*analyze) return cmd_analyze(gl, inst);
        if (*verify) return cmd_verify(inst, cert);
        if (*alpha) return cmd_alpha(gl, inst);
        if (*poly) return cmd_poly(gl, inst);
        if (*sc) return cmd_siggerscrap(gl, inst);
        if (*gen) {
            prm.mode = mode == "trivial" ? GroupMode::Trivial : mode == "sampled" ? GroupMode::Sampled : GroupMode::Covering;
            emit(gl, instance_to_json(generate(gl.seed, prm)));
            return Ok;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return Parse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return Parse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return Ok;
}
