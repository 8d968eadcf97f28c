#ifndef LOOPSMITH_PIPELINE_HPP
#define LOOPSMITH_PIPELINE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/pp.hpp"
#include "loopsmith/script.hpp"

namespace loopsmith {

// Input rejected before the pipeline starts (not smooth, no unit walk).
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Certificate {
    enum class Kind { Pseudoloop, Hardness };
    Kind kind = Kind::Hardness;
    // pseudoloop
    int orbit = -1;
    std::pair<int, int> edge{-1, -1};
    // hardness
    std::vector<int> component;
    std::vector<std::vector<int>> classes;  // α-classes of the whole instance
    std::vector<std::vector<int>> sigma;    // blocks, as class ids
    PPScript script;
    std::map<std::string, std::string> digests;  // definition -> ScriptEvaluator::digest
    std::vector<std::string> trace;
};

struct PipelineOptions {
    bool checks = true;             // runtime stability / reductionistic assertions
    size_t max_group = 100000;      // cap on the induced class action
    size_t literal_budget = 4000000;  // cell budget when trying a literal displayed formula
};

// A relation name in the script together with what it is meant to be.
struct Reduction {
    Bits domain;
    std::string name;
};
struct CentralRel {
    std::string name;
    BinRel rel;
};
struct TsrOr {
    std::string name;  // OR(T,T)
    int arity = 0;
    KaryRel t;         // T over the classes of the domain (local indices)
};
struct OrPair {
    std::string name;  // OR(D_L, D_R)
    Bits left, right;
};
struct UnaryOr {
    std::string name;  // OR(U,U)
    Bits u;
};
struct SigmaOr {
    std::string name;  // blow-up of OR(σ,σ)
    std::vector<std::vector<int>> blocks;
    Bits dom;
};

using MarcinResult = std::variant<CentralRel, TsrOr>;
using LinkResult = std::variant<Reduction, UnaryOr>;
using TsrResult = std::variant<UnaryOr, SigmaOr>;
using FinalResult = std::variant<Reduction, SigmaOr>;

class Pipeline {
public:
    Pipeline(const Digraph& g, const PermGroup& gp, PipelineOptions opt = {});

    const Alpha& alpha() const { return alpha_; }
    const PPScript& script() const { return script_; }
    const std::vector<std::string>& trace() const { return trace_; }
    const Bits& domain() const { return dom_; }
    int k() const { return k_; }

    // Sets the current domain (an α-stable set defined by the named unary relation, "" for all of G)
    // and recomputes the smallest k with a k-linked quotient.
    void set_domain(const Bits& d, const std::string& name);

    bool full_power() const;  // →^k full on the current quotient

    Reduction step_full_case();
    MarcinResult step_marcinsmagic();
    OrPair step_central_to_or(const CentralRel& r);
    LinkResult step_or_to_unary(const OrPair& o);
    TsrResult step_tsr_to_sigma(const TsrOr& t);
    FinalResult step_unary_to_sigma(const UnaryOr& u);

    // Entire induction from the current domain; returns the final OR(σ,σ).
    SigmaOr run_loop();

    // Definition of a weak component from a class parameter and a fence.
    Reduction component_domain(const Bits& comp, int vertex);

    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    // Evaluation access for tests.
    const KaryRel& value(const std::string& name) const { return ev_.value(name); }
    const ScriptEvaluator& evaluator() const { return ev_; }

private:
    friend struct PipelineAccess;
    struct ClassView {
        std::vector<int> cls;        // global class ids in the domain, ascending
        std::vector<int> local;      // global class id -> local index or -1
        Digraph quotient;            // on local indices
        std::vector<int> orbits;     // global orbit ids in the domain, ascending
    };
    struct UExpr {
        enum Op { Base, Fwd, Bwd, Meet, Smooth } op = Base;
        int a = -1, b = -1, len = 0;
    };
    struct SmoothDef {
        std::vector<UExpr> nodes;
        int root = -1;
        Bits set;
    };
    struct GroupElt {
        std::vector<int> cls;  // global class permutation (identity outside the domain)
        Perm perm;             // witness on G
    };

    std::string fresh(const std::string& hint);
    std::string define(const std::string& hint, const PPFormula& f);
    std::string primitive(PrimKind kind, const std::vector<int>& args, const std::string& hint);
    Bits unary(const std::string& name) const { return ev_.value(name).to_set(); }
    BinRel binary(const std::string& name) const { return ev_.value(name).to_bin(); }
    void expect(bool ok, const std::string& what) const;

    // domain vocabulary
    std::string E();
    std::string orb(int o);
    std::string orb_union(int o, int p);
    std::string cls(int c);
    std::string alpha_o(int o);
    std::string alpha_op(int o, int p);
    std::string tuple_orbit(const std::vector<int>& t);
    std::string ig();
    void dom_atom(PPFormula& f, int v);
    int add_path(PPFormula& f, int start, const AbstractPath& p,
                 const std::vector<std::string>& constrain = {});

    ClassView view_of(const Bits& d) const;
    Bits blow(const Bits& local_set, const ClassView& v) const;
    Bits local_classes(const Bits& vertices, const ClassView& v) const;
    BinRel to_quotient(const BinRel& r, const ClassView& v) const;
    Bits orbit_set_in(int o) const { return alpha_.orbit_set(o) & dom_; }
    bool omega_stable(const Bits& s) const;
    const std::vector<GroupElt>& class_action();

    // searches and inlining
    SmoothDef smooth_subset(const Bits& c);
    void inline_expr(PPFormula& f, const SmoothDef& s, int node, int var, const std::string& base,
                     std::vector<size_t>* base_atoms);
    std::string define_set_expr(const SmoothDef& s, const std::string& base, const std::string& hint);
    struct Fence {
        PPFormula f;
        std::vector<size_t> base_atoms;
    };
    Fence restricted_fence(const SmoothDef& s, const std::string& base, const std::string& hname, int m);

    MarcinResult trick_m2(const std::string& rname, const BinRel& r, const std::string& cname, const Bits& c, int o);
    struct OrStep {
        enum Kind { Compose, Bracket, Centre, Sigma } kind = Compose;
        int arity = 0;  // arity after the step
        KaryRel rel;    // expected relation after the step, on global class ids
    };
    // OR(L, Rt) for a left relation of the given arity -> OR(step(L), Rt).
    std::string transport(const std::string& cur, int left, int right, const OrStep& st, const KaryRel& right_rel);
    KaryRel globalise(const KaryRel& local) const;
    Bits domain_classes() const;
    std::string swap_or(const std::string& name, int left, int right);

    const Digraph& g_;
    const PermGroup& gp_;
    PipelineOptions opt_;
    Alpha alpha_;
    PPScript script_;
    ScriptEvaluator ev_;
    std::vector<std::string> trace_;
    std::map<std::string, int> names_;
    std::map<std::string, std::string> prim_cache_;
    std::map<std::string, std::string> dom_cache_;
    Bits dom_;
    std::string dom_name_;
    int stage_ = 0;
    int k_ = 0;
    ClassView view_;
    std::optional<std::vector<GroupElt>> action_;
};

// The whole decision procedure; throws PreconditionError on rejected input.
Certificate run_master(const Digraph& g, const PermGroup& gp, const PipelineOptions& opt = {});

struct VerifyResult {
    bool ok = false;
    std::vector<std::string> reasons;
};

// Independent audit: licensing, replay, comparison against the blow-up of OR(σ,σ).
VerifyResult verify_certificate(const Digraph& g, const PermGroup& gp, const Certificate& c);

// Primitive licensing against the instance (edge, ≤2-orbit unions, α on adjacent orbit pairs,
// α-class parameters, tuple orbits).
std::vector<std::string> licensing_errors(const Digraph& g, const PermGroup& gp, const PPScript& s);

}  // namespace loopsmith

#endif
