#include "msicert/delay.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msicert {

SamplingPattern::SamplingPattern(std::vector<int> intervals_, int hbar_)
    : intervals(std::move(intervals_)), hbar(hbar_) {
    if (hbar < 1) throw std::invalid_argument("SamplingPattern: hbar must be >= 1");
    for (int h : intervals) {
        if (h < 1 || h > hbar)
            throw std::invalid_argument("SamplingPattern: interval " + std::to_string(h) +
                                        " outside [1, " + std::to_string(hbar) + "]");
    }
}

std::vector<int> SamplingPattern::instants() const {
    std::vector<int> t;
    t.reserve(intervals.size() + 1);
    t.push_back(0);
    for (int h : intervals) t.push_back(t.back() + h);
    return t;
}

int SamplingPattern::coverage() const {
    int c = 0;
    for (int h : intervals) c += h;
    return c;
}

SamplingPattern SamplingPattern::unit(int count) {
    return SamplingPattern(std::vector<int>(static_cast<size_t>(count), 1), 1);
}

SamplingPattern SamplingPattern::periodic(int h, int count, int hbar) {
    return SamplingPattern(std::vector<int>(static_cast<size_t>(count), h), hbar);
}

const char* to_string(GainMode mode) {
    switch (mode) {
        case GainMode::Exact: return "exact";
        case GainMode::Frobenius: return "frobenius";
        case GainMode::Legacy: return "legacy";
    }
    return "?";
}

std::optional<GainMode> gain_mode_from_string(const std::string& s) {
    if (s == "exact") return GainMode::Exact;
    if (s == "frobenius") return GainMode::Frobenius;
    if (s == "legacy") return GainMode::Legacy;
    return std::nullopt;
}

Eigen::MatrixXd build_E(int hbar) {
    if (hbar < 1) throw std::invalid_argument("build_E: hbar must be >= 1");
    Eigen::MatrixXd E(hbar, hbar);
    for (int i = 0; i < hbar; ++i)
        for (int j = 0; j < hbar; ++j) E(i, j) = static_cast<double>(std::min(i, j));
    return E;
}

double exact_gain(int hbar) {
    if (hbar < 1) throw std::invalid_argument("exact_gain: hbar must be >= 1");
    if (hbar == 1) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(build_E(hbar),
                                                       Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

double frobenius_gain(int hbar) {
    if (hbar < 1) throw std::invalid_argument("frobenius_gain: hbar must be >= 1");
    const double h = static_cast<double>(hbar);
    return std::sqrt((h - 1.0) * h * (h * h - h + 1.0) / 6.0);
}

double legacy_gain(int hbar) {
    if (hbar < 1) throw std::invalid_argument("legacy_gain: hbar must be >= 1");
    const double h = static_cast<double>(hbar);
    return h * (h - 1.0) / 2.0;
}

Eigen::MatrixXd lifted_matrix(int hbar) {
    if (hbar < 1) throw std::invalid_argument("lifted_matrix: hbar must be >= 1");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(hbar, hbar);
    for (int i = 0; i < hbar; ++i)
        for (int j = 0; j < i; ++j) D(i, j) = 1.0;
    return D;
}

DelayGainBundle gain_bundle(int hbar, int eig_threshold) {
    DelayGainBundle b;
    b.hbar = hbar;
    b.frobenius_sq_gain = frobenius_gain(hbar);
    b.legacy_sq_gain = legacy_gain(hbar);
    if (hbar > eig_threshold) {
        b.exact_sq_gain = b.frobenius_sq_gain;
        b.exact_substituted = true;
    } else {
        b.exact_sq_gain = exact_gain(hbar);
    }
    return b;
}

double gain_for_mode(int hbar, GainMode mode, int eig_threshold) {
    switch (mode) {
        case GainMode::Exact:
            return hbar > eig_threshold ? frobenius_gain(hbar) : exact_gain(hbar);
        case GainMode::Frobenius: return frobenius_gain(hbar);
        case GainMode::Legacy: return legacy_gain(hbar);
    }
    throw std::logic_error("gain_for_mode: bad mode");
}

DelaySequence delay_sequence(const SamplingPattern& pattern, int horizon) {
    if (horizon < 1) throw std::invalid_argument("delay_sequence: horizon must be >= 1");
    if (pattern.coverage() < horizon)
        throw std::invalid_argument("delay_sequence: pattern does not cover horizon");
    DelaySequence seq;
    seq.values.reserve(static_cast<size_t>(horizon));
    int t = 0;
    for (int h : pattern.intervals) {
        for (int tau = 0; tau < h && t < horizon; ++tau, ++t) seq.values.push_back(tau);
        if (t >= horizon) break;
    }
    return seq;
}

Signal apply_delay(const Signal& y, const SamplingPattern& pattern) {
    if (y.empty()) throw std::invalid_argument("apply_delay: empty signal");
    const int horizon = static_cast<int>(y.size());
    if (pattern.coverage() < horizon)
        throw std::invalid_argument("apply_delay: pattern does not cover signal");
    const auto dim = y.front().size();
    for (const auto& v : y)
        if (v.size() != dim) throw std::invalid_argument("apply_delay: ragged signal");

    const DelaySequence tau = delay_sequence(pattern, horizon);
    Signal e(y.size());
    for (int t = 0; t < horizon; ++t) {
        if (tau.values[static_cast<size_t>(t)] == 0)
            e[static_cast<size_t>(t)] = Eigen::VectorXd::Zero(dim);
        else
            e[static_cast<size_t>(t)] =
                e[static_cast<size_t>(t - 1)] + y[static_cast<size_t>(t - 1)];
    }
    return e;
}

}  // namespace msicert
