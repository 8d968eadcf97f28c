#ifndef LOOPSMITH_PP_HPP
#define LOOPSMITH_PP_HPP

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/relation.hpp"

namespace loopsmith {

// Thrown when an intermediate table exceeds the configured tuple budget.
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NamedStructure {
    int n = 0;
    std::map<std::string, KaryRel> rels;

    NamedStructure() = default;
    explicit NamedStructure(int n_) : n(n_) {}
    void add(const std::string& name, KaryRel r);
    void add(const std::string& name, const BinRel& r) { add(name, KaryRel::from_bin(r)); }
    void add(const std::string& name, const Bits& s) { add(name, KaryRel::from_set(s)); }
    const KaryRel& get(const std::string& name) const;
    bool has(const std::string& name) const { return rels.count(name) > 0; }
};

struct Atom {
    std::string rel;
    std::vector<int> vars;
    bool operator==(const Atom& o) const { return rel == o.rel && vars == o.vars; }
};

// Variables are 0..num_vars-1; those not listed in free are existential.
struct PPFormula {
    std::vector<int> free;
    int num_vars = 0;
    std::vector<Atom> atoms;
    std::vector<std::pair<int, int>> params;  // variable -> element

    int fresh() { return num_vars++; }
    void add(const std::string& rel, std::vector<int> vars) { atoms.push_back({rel, std::move(vars)}); }
    std::vector<int> existential() const;
    bool operator==(const PPFormula& o) const {
        return free == o.free && num_vars == o.num_vars && atoms == o.atoms && params == o.params;
    }
};

// Resolves relation names to relations over a common domain.
using RelationLookup = std::function<const KaryRel&(const std::string&)>;

KaryRel evaluate(int n, const RelationLookup& lookup, const PPFormula& f);
KaryRel evaluate(const NamedStructure& s, const PPFormula& f);
KaryRel evaluate_naive(const NamedStructure& s, const PPFormula& f);

// Cell budget (tuples times arity) for intermediate join tables; 0 = unlimited.
void set_tuple_budget(size_t tuples);
size_t tuple_budget();

bool is_tree(const PPFormula& f);

// Tree formula over the quotient with class parameters -> formula over the base.
// Parameters become atoms class_name(c)(x).
PPFormula lift_tree_def(const PPFormula& f, const std::function<std::string(int)>& class_name);

KaryRel or_relation(const KaryRel& r, const KaryRel& s);
// OR over an explicit domain subset (coordinates range over dom).
KaryRel or_relation(const KaryRel& r, const KaryRel& s, const Bits& dom);

// Representative tuple: least element of every α-class, in class order.
std::vector<int> ig_representatives(const Alpha& alpha);
KaryRel build_IG(const PermGroup& gp, const Alpha& alpha);
// Coordinates of I_G whose class lies in m (m given as a vertex set).
std::vector<int> ig_coordinates(const Alpha& alpha, const Bits& m);
KaryRel project_IG(const KaryRel& ig, const Alpha& alpha, const Bits& m);

Bits oplus(const Bits& h, const BinRel& r, const Alpha& alpha);

}  // namespace loopsmith

#endif
