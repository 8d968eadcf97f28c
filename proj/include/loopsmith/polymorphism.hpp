#ifndef LOOPSMITH_POLYMORPHISM_HPP
#define LOOPSMITH_POLYMORPHISM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"
#include "loopsmith/pp.hpp"
#include "loopsmith/script.hpp"

namespace loopsmith {

// Height-one identities f(lhs) = f(rhs); entries are symbol indices (a=0, r=1, e=2 for Siggers).
struct IdentitySpec {
    int arity = 0;
    int symbols = 0;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> equations;

    // s(a,r,e,a) = s(r,a,r,e)
    static IdentitySpec siggers4();
    // Structural validation; empty when consistent.
    std::vector<std::string> errors() const;
};

// Operation table over 0..n-1, indexed by the base-n code of the argument tuple.
struct OpTable {
    int n = 0;
    int arity = 0;
    std::vector<int> values;

    int operator()(const std::vector<int>& args) const;
    static OpTable projection(int n, int arity, int coord);
};

struct SearchStats {
    size_t variables = 0;    // after identification
    size_t constraints = 0;
    size_t nodes = 0;        // search nodes visited
};

// Guard: domain ≤ 5 for arity ≥ 4, ≤ 8 otherwise (LOOPSMITH_MAX_N replaces either bound).
std::optional<OpTable> find_polymorphism(const NamedStructure& s, const IdentitySpec& spec,
                                         SearchStats* stats = nullptr);

// Independent re-check; empty when f preserves every relation and satisfies every equation.
std::vector<std::string> check_polymorphism(const NamedStructure& s, const IdentitySpec& spec, const OpTable& f);

NamedStructure as_structure(const Digraph& g, const std::string& edge = "E");

// Vertices are tuples over the base domain; starts from a→r, r→a, a→e, e→r and applies every
// operation coordinatewise to every choice of edges, for at most `rounds` rounds or until no
// more than `max_vertices` vertices would be exceeded.
struct SiggersGraph {
    Digraph g;
    std::vector<std::vector<int>> vertices;  // 0 = a, 1 = r, 2 = e (when distinct)
    int rounds = 0;
    bool truncated = false;
};

SiggersGraph siggers_graph(const std::vector<int>& a, const std::vector<int>& e, const std::vector<int>& r,
                           const std::vector<OpTable>& ops, int rounds, size_t max_vertices = 4096);

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SiggerscrapReport {
    std::vector<int> orbit;   // pattern vertex -> orbit id
    bool union01 = false;     // (0+→)+→ = 0∪1
    bool union02 = false;     // 1+← = 0∪2
    bool union12 = false;     // 0+→ = 1∪2
    bool alpha_formula = false;
    PPScript script;          // output defines α on G
    bool ok() const { return union01 && union02 && union12 && alpha_formula; }
};

// Requires the orbit quotient to be isomorphic to 0→2, 2→1, 0↔1 (throws ShapeError otherwise).
SiggerscrapReport check_siggerscrap(const Digraph& g, const PermGroup& gp);

}  // namespace loopsmith

#endif
