#include "msicert/msi_search.hpp"

#include <stdexcept>

namespace msicert {

namespace {

// Any certified value above an uncertified one contradicts monotonicity.
bool trace_inconsistent(const std::map<int, bool>& trace) {
    bool seen_false = false;
    for (const auto& [h, ok] : trace) {
        if (!ok)
            seen_false = true;
        else if (seen_false)
            return true;
    }
    return false;
}

}  // namespace

SearchResult linear_search(const Certifier& certifier, int hmax_cap) {
    if (hmax_cap < 1) throw std::invalid_argument("linear_search: cap must be >= 1");
    SearchResult res;
    for (int h = 1; h <= hmax_cap; ++h) {
        ++res.calls;
        const bool ok = certifier(h);
        res.trace[h] = ok;
        if (!ok) {
            if (h > 1) res.msi = h - 1;
            res.inconsistent = trace_inconsistent(res.trace);
            return res;
        }
    }
    res.msi = hmax_cap;
    res.cap_exhausted = true;
    return res;
}

SearchResult exponential_search(const Certifier& certifier, int hmax_cap) {
    if (hmax_cap < 1) throw std::invalid_argument("exponential_search: cap must be >= 1");
    SearchResult res;
    auto query = [&](int h) {
        auto it = res.trace.find(h);
        if (it != res.trace.end()) return it->second;
        ++res.calls;
        const bool ok = certifier(h);
        res.trace[h] = ok;
        return ok;
    };

    if (!query(1)) {
        res.inconsistent = trace_inconsistent(res.trace);
        return res;
    }
    int lo = 1;
    int hi = -1;  // first uncertified candidate, if any
    while (true) {
        const int next = std::min(2 * lo, hmax_cap);
        if (next == lo) break;  // cap reached while certified
        if (query(next)) {
            lo = next;
            if (lo == hmax_cap) break;
        } else {
            hi = next;
            break;
        }
    }
    if (hi < 0) {
        res.msi = hmax_cap;
        res.cap_exhausted = true;
        res.inconsistent = trace_inconsistent(res.trace);
        return res;
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (query(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.msi = lo;
    res.inconsistent = trace_inconsistent(res.trace);
    return res;
}

}  // namespace msicert
