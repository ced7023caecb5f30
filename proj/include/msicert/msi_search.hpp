// Maximum-sampling-interval search over a monotone certifier.
#pragma once

#include <functional>
#include <map>
#include <optional>

namespace msicert {

using Certifier = std::function<bool(int hbar)>;

struct SearchResult {
    std::optional<int> msi;        // largest certified hbar, empty if hbar=1 fails
    bool cap_exhausted = false;    // certified all the way to the cap
    bool inconsistent = false;     // non-monotone certifier responses observed
    int calls = 0;
    std::map<int, bool> trace;     // every certifier query and its answer
};

// Scans hbar = 1, 2, ... until the first failure or the cap.
SearchResult linear_search(const Certifier& certifier, int hmax_cap = 10000);

// Doubling phase then bisection; at most ~2 log2(msi) + 2 certifier calls.
SearchResult exponential_search(const Certifier& certifier, int hmax_cap = 10000);

}  // namespace msicert
