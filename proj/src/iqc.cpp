#include "msicert/iqc.hpp"

#include <stdexcept>

namespace msicert {

double min_eigenvalue(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

Eigen::MatrixXd assemble_pi(const MultiplierSet& ms, double tol) {
    const auto n = ms.X.rows();
    if (ms.X.cols() != n || ms.Y.rows() != n || ms.Y.cols() != n)
        throw std::invalid_argument("assemble_pi: X and Y must be square of equal size");
    const double scale = std::max(1.0, ms.X.norm());
    if (min_eigenvalue(ms.X) <= -tol * scale)
        throw std::invalid_argument("assemble_pi: X must be positive definite");
    Eigen::MatrixXd pi(2 * n, 2 * n);
    pi.topLeftCorner(n, n) = ms.gain_sq * ms.X + ms.Y;
    pi.topRightCorner(n, n) = ms.Y;
    pi.bottomLeftCorner(n, n) = ms.Y;
    pi.bottomRightCorner(n, n) = -ms.X;
    return pi;
}

namespace {

// Kahan-compensated accumulation in long double; horizons past 1e4 would
// otherwise lose the boundary cases to cancellation.
struct Accumulator {
    long double sum = 0.0L;
    long double comp = 0.0L;
    void add(double v) {
        const long double y = static_cast<long double>(v) - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return static_cast<double>(sum); }
};

}  // namespace

IqcCheckResult check_iqc(const Signal& y, const Signal& e, const Eigen::MatrixXd& pi,
                         double tol) {
    if (y.size() != e.size() || y.empty())
        throw std::invalid_argument("check_iqc: signal lengths differ or empty");
    const auto n = y.front().size();
    if (pi.rows() != 2 * n || pi.cols() != 2 * n)
        throw std::invalid_argument("check_iqc: multiplier dimension mismatch");

    IqcCheckResult res;
    res.ok = true;
    res.partial_sums.reserve(y.size());
    Accumulator acc;
    Eigen::VectorXd stacked(2 * n);
    for (size_t t = 0; t < y.size(); ++t) {
        if (y[t].size() != n || e[t].size() != n)
            throw std::invalid_argument("check_iqc: ragged signal");
        stacked.head(n) = y[t];
        stacked.tail(n) = e[t];
        acc.add(stacked.dot(pi * stacked));
        const double s = acc.value();
        res.partial_sums.push_back(s);
        res.worst = std::min(res.worst, s);
        if (s < -tol) res.ok = false;
    }
    return res;
}

IqcCheckResult check_passivity(const Signal& y, const SamplingPattern& pattern,
                               const Eigen::MatrixXd& Y, double factor, double tol) {
    if (y.empty()) throw std::invalid_argument("check_passivity: empty signal");
    const auto n = y.front().size();
    if (Y.rows() != n || Y.cols() != n)
        throw std::invalid_argument("check_passivity: Y dimension mismatch");
    const double scale = std::max(1.0, Y.norm());
    if (min_eigenvalue(Y) < -tol * scale)
        throw std::invalid_argument("check_passivity: Y must be positive semidefinite");

    const Signal e = apply_delay(y, pattern);
    IqcCheckResult res;
    res.ok = true;
    res.partial_sums.reserve(y.size());
    Accumulator acc;
    for (size_t t = 0; t < y.size(); ++t) {
        acc.add(y[t].dot(Y * e[t]) + factor * y[t].dot(Y * y[t]));
        const double s = acc.value();
        res.partial_sums.push_back(s);
        res.worst = std::min(res.worst, s);
        if (s < -tol) res.ok = false;
    }
    return res;
}

}  // namespace msicert
