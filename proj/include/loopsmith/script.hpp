#ifndef LOOPSMITH_SCRIPT_HPP
#define LOOPSMITH_SCRIPT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/pp.hpp"

namespace loopsmith {

enum class PrimKind { Edge, OrbitUnion, AlphaPair, AlphaClass, TupleOrbit, Singleton, Input };

const char* prim_name(PrimKind k);
std::optional<PrimKind> prim_from_name(const std::string& s);

// Orbits and classes are named by a representative vertex.
//   OrbitUnion: 1 or 2 vertices; AlphaPair: one vertex per orbit; AlphaClass, Singleton: one vertex;
//   TupleOrbit: the tuple; Input: relation name.
struct Primitive {
    PrimKind kind = PrimKind::Edge;
    std::vector<int> args;
    std::string input;
    bool operator==(const Primitive& o) const { return kind == o.kind && args == o.args && input == o.input; }
};

struct Definition {
    std::string name;
    int arity = 0;
    std::optional<Primitive> prim;
    PPFormula formula;  // used when prim is empty
    bool operator==(const Definition& o) const {
        return name == o.name && arity == o.arity && prim == o.prim && formula == o.formula;
    }
};

struct PPScript {
    std::vector<Definition> defs;
    std::string output;

    const Definition* find(const std::string& name) const;
    bool has(const std::string& name) const { return find(name) != nullptr; }
    const std::string& add_primitive(const std::string& name, PrimKind kind, std::vector<int> args,
                                     const std::string& input = "");
    const std::string& add_formula(const std::string& name, PPFormula f);
    // Structural checks: unique names, references to earlier definitions, arities.
    std::vector<std::string> validate() const;
    // Definitions the output depends on, in the original order.
    PPScript pruned() const;
    bool operator==(const PPScript& o) const { return defs == o.defs && output == o.output; }
};

// Evaluates script definitions over G. Relations that are α-stable are kept as quotient
// relations and blown up only on demand; formulas over stable relations are evaluated on G/α.
class ScriptEvaluator {
public:
    ScriptEvaluator(const Digraph& g, const PermGroup& gp, const Alpha& alpha, const NamedStructure* inputs = nullptr);

    void run(const PPScript& s);
    void define(const Definition& d);
    void undefine(const std::string& name) { rels_.erase(name); }

    bool has(const std::string& name) const { return rels_.count(name) > 0; }
    int arity(const std::string& name) const { return entry(name).arity; }
    bool stable(const std::string& name) const { return entry(name).stable; }
    const KaryRel& value(const std::string& name) const;     // over G
    const KaryRel& quotient(const std::string& name) const;  // over G/α, stable relations only
    // Hex fingerprint of a value: the quotient for stable relations, the explicit relation otherwise.
    std::string digest(const std::string& name) const;

    const Digraph& graph() const { return *g_; }
    const PermGroup& group() const { return *gp_; }
    const Alpha& alpha() const { return *alpha_; }

private:
    struct Entry {
        int arity = 0;
        bool stable = false;
        KaryRel quot;
        mutable std::optional<KaryRel> expl;
    };
    const Entry& entry(const std::string& name) const;
    void store(const std::string& name, KaryRel explicit_rel, bool check_stable = true);
    void store_quotient(const std::string& name, KaryRel q);
    KaryRel primitive(const Primitive& p, int arity) const;

    const Digraph* g_;
    const PermGroup* gp_;
    const Alpha* alpha_;
    const NamedStructure* inputs_;
    std::vector<int> orbit_of_;
    std::map<std::string, Entry> rels_;
};

}  // namespace loopsmith

#endif
