#ifndef LOOPSMITH_IO_HPP
#define LOOPSMITH_IO_HPP

#include <stdexcept>
#include <string>

#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/pipeline.hpp"
#include "loopsmith/script.hpp"

namespace loopsmith {

// Malformed JSON, schema violation, bad permutation or non-automorphism generator.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Serialisations are deterministic (sorted keys, two-space indent, trailing newline).
std::string instance_to_json(const Instance& in);
Instance instance_from_json(const std::string& text);

std::string script_to_json(const PPScript& s);
PPScript script_from_json(const std::string& text);

std::string certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const std::string& text);

std::string alpha_to_json(const Alpha& a);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// Graphviz rendering; vertices may be labelled with their classes.
std::string to_dot(const Digraph& g, const std::string& name, const std::vector<std::string>& labels = {});

}  // namespace loopsmith

#endif
