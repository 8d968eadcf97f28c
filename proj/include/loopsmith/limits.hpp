#ifndef LOOPSMITH_LIMITS_HPP
#define LOOPSMITH_LIMITS_HPP

#include <stdexcept>

namespace loopsmith {

struct GuardError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Size guard: the default, unless LOOPSMITH_MAX_N is set to a positive integer.
int guard_limit(int dflt);

}  // namespace loopsmith

#endif
