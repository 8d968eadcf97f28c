#ifndef LOOPSMITH_TEST_SUPPORT_HPP
#define LOOPSMITH_TEST_SUPPORT_HPP

#include <random>

#include "loopsmith/digraph.hpp"
#include "loopsmith/group.hpp"

namespace testing {

inline loopsmith::Digraph random_digraph(std::mt19937_64& rng, int n, double p, bool loops = false) {
    loopsmith::Digraph g(n);
    std::uniform_real_distribution<double> u(0, 1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if ((loops || a != b) && u(rng) < p) g.add_edge(a, b);
    return g;
}

inline loopsmith::Bits set_of(int n, std::initializer_list<int> xs) {
    return loopsmith::Bits::from(n, std::vector<int>(xs));
}

}  // namespace testing

#endif
