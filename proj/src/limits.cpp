#include "loopsmith/limits.hpp"

#include <cstdlib>
#include <string>

namespace loopsmith {

int guard_limit(int dflt) {
    const char* v = std::getenv("LOOPSMITH_MAX_N");
    if (!v || !*v) return dflt;
    try {
        int n = std::stoi(v);
        return n > 0 ? n : dflt;
    } catch (const std::exception&) {
        return dflt;
    }
}

}  // namespace loopsmith
