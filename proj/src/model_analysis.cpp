#include "msicert/model_analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace msicert {

void SystemModel::validate() const {
    const auto nn = A.rows();
    if (A.cols() != nn) throw std::invalid_argument("SystemModel: A must be square");
    if (B.rows() != nn) throw std::invalid_argument("SystemModel: B row count != n");
    if (K.rows() != B.cols() || K.cols() != nn)
        throw std::invalid_argument("SystemModel: K must be m x n");
    if (!A.allFinite() || !B.allFinite() || !K.allFinite())
        throw std::invalid_argument("SystemModel: non-finite entries");
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "certified";
        case Verdict::NotCertified: return "not-certified";
        case Verdict::AssumptionViolated: return "assumption-violated";
        case Verdict::NumericalFailure: return "numerical-failure";
    }
    return "?";
}

bool is_schur(const Eigen::MatrixXd& M, double tol) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(M, /*computeEigenvectors=*/false);
    return eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - tol;
}

Eigen::MatrixXd closed_loop_blocks(const SystemModel& model) {
    model.validate();
    const int n = model.n();
    const Eigen::MatrixXd Acl = model.closed_loop();
    const Eigen::MatrixXd BK = model.B * model.K;
    Eigen::MatrixXd blocks(2 * n, 2 * n);
    blocks.topLeftCorner(n, n) = Acl;
    blocks.topRightCorner(n, n) = BK;
    blocks.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) - Acl;
    blocks.bottomRightCorner(n, n) = -BK;
    return blocks;
}

namespace {

// Middle matrix of the stability congruence: diag([S, -S], Pi) expressed
// affinely in (S, X, Y); the Y blocks are omitted when the passivity
// multiplier is pinned to zero.
lmi::AffineExpr stability_middle(const lmi::VariableRef& S, const lmi::VariableRef& X,
                                 const lmi::VariableRef* Y, double gain_sq, int n) {
    lmi::AffineExpr mid(4 * n);
    mid.add_block(S, 0, 0, 1.0);
    mid.add_block(S, n, n, -1.0);
    mid.add_block(X, 2 * n, 2 * n, gain_sq);
    mid.add_block(X, 3 * n, 3 * n, -1.0);
    if (Y) {
        mid.add_block(*Y, 2 * n, 2 * n, 1.0);
        mid.add_block(*Y, 2 * n, 3 * n, 1.0);
    }
    return mid;
}

}  // namespace

lmi::LmiProblem model_stability_problem(const SystemModel& model, int hbar, GainMode mode,
                                 const CertifyOptions& opts) {
    model.validate();
    if (hbar < 1) throw std::invalid_argument("model_stability_problem: hbar must be >= 1");
    const int n = model.n();
    const double gain_sq = gain_for_mode(hbar, mode, opts.eig_threshold);

    lmi::LmiProblem prob;
    prob.epsilon = opts.epsilon;
    const auto S = prob.add_variable("S", n, lmi::Cone::PosDef);
    const auto X = prob.add_variable("X", n, lmi::Cone::PosDef);
    std::optional<lmi::VariableRef> Y;
    if (!opts.y_zero) Y = prob.add_variable("Y", n, lmi::Cone::PosSemiDef);

    // tall outer factor: rows (x+, x, y, e), columns (x, e)
    const Eigen::MatrixXd Acl = model.closed_loop();
    const Eigen::MatrixXd BK = model.B * model.K;
    Eigen::MatrixXd T(4 * n, 2 * n);
    T.setZero();
    T.block(0, 0, n, n) = Acl;
    T.block(0, n, n, n) = BK;
    T.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
    T.block(2 * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n) - Acl;
    T.block(2 * n, n, n, n) = -BK;
    T.block(3 * n, n, n, n) = Eigen::MatrixXd::Identity(n, n);

    const lmi::AffineExpr mid = stability_middle(S, X, Y ? &*Y : nullptr, gain_sq, n);
    prob.require_neg_def(mid.congruence(T));
    return prob;
}

Certificate certify_model(const SystemModel& model, int hbar, GainMode mode,
                          const CertifyOptions& opts) {
    Certificate cert;
    cert.hbar = hbar;
    cert.gain_mode = mode;
    cert.gain_sq = gain_for_mode(hbar, mode, opts.eig_threshold);

    const lmi::LmiProblem prob = model_stability_problem(model, hbar, mode, opts);
    const lmi::LmiSolution sol = lmi::solve(prob, opts.solver);
    cert.diagnostics = sol.diagnostics;
    switch (sol.status) {
        case lmi::SolveStatus::Feasible: {
            cert.verdict = Verdict::Certified;
            cert.S = sol.witness.at("S");
            cert.X = sol.witness.at("X");
            cert.Y = opts.y_zero ? Eigen::MatrixXd::Zero(model.n(), model.n())
                                 : sol.witness.at("Y");
            break;
        }
        case lmi::SolveStatus::Infeasible: cert.verdict = Verdict::NotCertified; break;
        case lmi::SolveStatus::NumericalFailure:
            cert.verdict = Verdict::NumericalFailure;
            break;
    }
    return cert;
}

Eigen::MatrixXcd transfer_function_value(const SystemModel& model, double omega) {
    model.validate();
    const int n = model.n();
    const std::complex<double> z = std::polar(1.0, omega);
    const Eigen::MatrixXcd Acl = model.closed_loop().cast<std::complex<double>>();
    const Eigen::MatrixXcd BK = (model.B * model.K).cast<std::complex<double>>();
    Eigen::MatrixXcd resolvent =
        z * Eigen::MatrixXcd::Identity(n, n) - Acl;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(resolvent);
    if (!lu.isInvertible())
        throw std::domain_error("transfer_function_value: resolvent near singular");
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    return (I - Acl) * lu.solve(BK) - BK;
}

FrequencyCheck frequency_domain_check(const SystemModel& model, int hbar,
                                const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                int grid_size) {
    model.validate();
    if (grid_size < 2) throw std::invalid_argument("frequency_domain_check: grid too small");
    if (!is_schur(model.closed_loop()))
        throw std::domain_error("frequency_domain_check: A + BK is not Schur");
    const int n = model.n();
    if (X.rows() != n || X.cols() != n || Y.rows() != n || Y.cols() != n)
        throw std::invalid_argument("frequency_domain_check: multiplier dimension mismatch");
    const double gain_sq = gain_for_mode(hbar, GainMode::Exact);

    const Eigen::MatrixXcd Xc = X.cast<std::complex<double>>();
    const Eigen::MatrixXcd Yc = Y.cast<std::complex<double>>();
    FrequencyCheck res;
    res.ok = true;
    res.worst_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_size; ++k) {
        const double omega = M_PI * static_cast<double>(k) /
                             static_cast<double>(grid_size - 1);
        const Eigen::MatrixXcd G = transfer_function_value(model, omega);
        // [G; I]^* Pi [G; I]
        Eigen::MatrixXcd form = G.adjoint() * (gain_sq * Xc + Yc) * G +
                                G.adjoint() * Yc + Yc * G - Xc;
        form = 0.5 * (form + form.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(form,
                                                            Eigen::EigenvaluesOnly);
        const double maxeig = eig.eigenvalues().maxCoeff();
        if (maxeig > res.worst_value) {
            res.worst_value = maxeig;
            res.worst_omega = omega;
        }
        if (maxeig >= 0.0) res.ok = false;
    }
    return res;
}

bool scalar_region(double a, double b) {
    return a > -1.0 && a < 1.0 && b > 0.0 && b < 2.0 && a + b > -1.0 && a + b < 1.0;
}

}  // namespace msicert
