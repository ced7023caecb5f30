// Margin-maximizing barrier solver for LMI feasibility.
//
// Constraints are brought to the form G_j(theta) >= 0, preconditioned by
// congruence, and strict ones are eps-shifted in the preconditioned units;
// then the margin SDP
//   max t  s.t.  G_j(theta) >= t*w_j*I,  ||theta|| <= R
// is solved by damped-Newton path following on the log-det barrier. The
// margin weight w_j is 1 on problem constraints and 0 on the variable cone
// constraints, which only need to stay interior; cone variables start at the
// identity, so the start point is always strictly feasible and no separate
// phase-1 is needed. A positive optimal margin certifies strict feasibility
// with the current iterate as witness.
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "msicert/lmi.hpp"

namespace msicert::lmi {
namespace {

struct ScaledConstraint {
    Eigen::MatrixXd A0;                                   // constant term
    std::vector<std::pair<int, Eigen::MatrixXd>> coeffs;  // scalar index -> basis
    int dim = 0;
    double margin_weight = 1.0;  // 0: barrier-interior only (variable cones)
    bool strict = false;
};

// Preconditioning congruence. Constraints whose constant term spans many
// orders of magnitude across directions (data-built blocks do) are whitened
// by |A0|^{-1/2}: feasibility is untouched, but per-direction margins become
// comparable. Constraints without a constant get a Ruiz pass on the
// coefficient magnitude profile.
void equilibrate(ScaledConstraint& c) {
    const int d = c.dim;
    if (c.A0.norm() > 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.A0);
        const Eigen::VectorXd mags = eig.eigenvalues().cwiseAbs();
        const double floor = mags.maxCoeff() * 1e-12;
        const Eigen::VectorXd w = mags.cwiseMax(floor).cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd W =
            eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().transpose();
        c.A0 = W * c.A0 * W;
        for (auto& [idx, A] : c.coeffs) A = (W * A * W).eval();
    } else {
        Eigen::MatrixXd profile = Eigen::MatrixXd::Zero(d, d);
        for (const auto& [idx, A] : c.coeffs) profile += A.cwiseAbs();
        Eigen::VectorXd scale = Eigen::VectorXd::Ones(d);
        for (int pass = 0; pass < 8; ++pass) {
            Eigen::VectorXd r =
                profile.rowwise().maxCoeff().cwiseMax(1e-300).cwiseSqrt();
            scale = scale.cwiseQuotient(r);
            profile =
                r.cwiseInverse().asDiagonal() * profile * r.cwiseInverse().asDiagonal();
        }
        const auto D = scale.asDiagonal();
        c.A0 = D * c.A0 * D;
        for (auto& [idx, A] : c.coeffs) A = (D * A * D).eval();
    }
}

Eigen::MatrixXd constraint_value(const ScaledConstraint& c, const Eigen::VectorXd& theta,
                                 double t) {
    Eigen::MatrixXd M = c.A0;
    for (const auto& [idx, A] : c.coeffs) M += theta(idx) * A;
    if (c.margin_weight != 0.0) M.diagonal().array() -= t * c.margin_weight;
    return M;
}

bool factorize(const std::vector<ScaledConstraint>& cons, const Eigen::VectorXd& theta,
               double t, std::vector<Eigen::MatrixXd>* inverses) {
    for (size_t j = 0; j < cons.size(); ++j) {
        const Eigen::MatrixXd M = constraint_value(cons[j], theta, t);
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) return false;
        if (inverses)
            (*inverses)[j] =
                llt.solve(Eigen::MatrixXd::Identity(cons[j].dim, cons[j].dim));
    }
    return true;
}

double barrier_value(const std::vector<ScaledConstraint>& cons,
                     const Eigen::VectorXd& theta, double t, double R2, double mu,
                     bool* ok) {
    *ok = true;
    double f = -t / mu;
    for (const auto& c : cons) {
        const Eigen::MatrixXd M = constraint_value(c, theta, t);
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) {
            *ok = false;
            return std::numeric_limits<double>::infinity();
        }
        const auto& L = llt.matrixLLT();
        double logdet = 0.0;
        for (int i = 0; i < c.dim; ++i) logdet += std::log(L(i, i));
        f -= 2.0 * logdet;
    }
    const double slack = R2 - theta.squaredNorm();
    if (slack <= 0) {
        *ok = false;
        return std::numeric_limits<double>::infinity();
    }
    f -= std::log(slack);
    return f;
}

}  // namespace

LmiSolution solve(const LmiProblem& problem, const SolverOptions& opts) {
    LmiSolution sol;
    const int p = problem.scalar_count();

    // ---- compile: cones + constraints to G_j(theta) >= 0, then precondition
    std::vector<ScaledConstraint> cons;
    for (const auto& name : problem.variable_names()) {
        const Cone cone = problem.cone_of(name);
        if (cone == Cone::Free) continue;
        const VariableRef ref = *problem.find(name);
        AffineExpr e(ref.dim);
        e.add_block(ref, 0, 0, 1.0);
        ScaledConstraint c;
        c.dim = ref.dim;
        c.A0 = e.constant();
        for (const auto& [idx, A] : e.coefficients()) c.coeffs.emplace_back(idx, A);
        c.margin_weight = 0.0;
        cons.push_back(std::move(c));
    }
    for (const auto& view : problem.constraints()) {
        ScaledConstraint c;
        c.dim = view.expr->dim();
        if (view.strict) {
            c.A0 = -view.expr->constant();
            for (const auto& [idx, A] : view.expr->coefficients())
                c.coeffs.emplace_back(idx, -A);
        } else {
            c.A0 = view.expr->constant();
            for (const auto& [idx, A] : view.expr->coefficients())
                c.coeffs.emplace_back(idx, A);
        }
        c.strict = view.strict;
        cons.push_back(std::move(c));
    }
    for (auto& c : cons) {
        equilibrate(c);
        // strictness shift in preconditioned units: direction-local relative
        // margin demand, like production solver feasibility tolerances
        if (c.strict) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.A0,
                                                               Eigen::EigenvaluesOnly);
            const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
            c.A0.diagonal().array() -= problem.epsilon * scale;
        }
    }

    // ---- per-variable column scaling: unit coefficient norms keep the
    // Newton system well conditioned and make the ball meaningful
    Eigen::VectorXd colscale = Eigen::VectorXd::Zero(p);
    for (const auto& c : cons)
        for (const auto& [idx, A] : c.coeffs)
            colscale(idx) = std::max(colscale(idx), A.norm());
    for (int i = 0; i < p; ++i)
        if (colscale(i) <= 0.0) colscale(i) = 1.0;
    for (auto& c : cons)
        for (auto& [idx, A] : c.coeffs) A /= colscale(idx);

    // ---- strictly feasible start: cone variables at a multiple of the
    // identity, shrunk into the ball (positive scalings stay interior)
    std::map<std::string, Eigen::MatrixXd> start;
    for (const auto& name : problem.variable_names()) {
        const VariableRef ref = *problem.find(name);
        if (problem.cone_of(name) == Cone::Free)
            start[name] = Eigen::MatrixXd::Zero(ref.dim, ref.dim);
        else
            start[name] = Eigen::MatrixXd::Identity(ref.dim, ref.dim);
    }
    Eigen::VectorXd theta = problem.pack(start).cwiseProduct(colscale);
    const double start_norm = theta.norm();
    if (start_norm > 0.1 * opts.ball_radius)
        theta *= 0.1 * opts.ball_radius / start_norm;

    bool any_margin = false;
    double t = std::numeric_limits<double>::infinity();
    for (const auto& c : cons) {
        if (c.margin_weight == 0.0) continue;
        any_margin = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            constraint_value(c, theta, 0.0), Eigen::EigenvaluesOnly);
        t = std::min(t, eig.eigenvalues().minCoeff());
    }
    if (!any_margin) {
        // nothing to optimize; the cone start is a witness
        sol.witness = problem.unpack(theta.cwiseQuotient(colscale));
        const auto check = verify_witness(problem, sol.witness);
        sol.diagnostics.max_violation = check.max_violation;
        sol.status = check.ok ? SolveStatus::Feasible : SolveStatus::NumericalFailure;
        return sol;
    }
    t -= 1.0;

    const double R = opts.ball_radius;
    const double R2 = R * R;
    double nu = 2.0;
    for (const auto& c : cons) nu += static_cast<double>(c.dim);

    std::vector<Eigen::MatrixXd> W(cons.size());
    int newton_total = 0;
    double mu = std::max(1.0, std::abs(t));
    bool numerical_trouble = false;

    auto margin_of = [&](const Eigen::VectorXd& th) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : cons) {
            if (c.margin_weight == 0.0) continue;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
                constraint_value(c, th, 0.0), Eigen::EigenvaluesOnly);
            m = std::min(m, eig.eigenvalues().minCoeff() / c.margin_weight);
        }
        return m;
    };

    while (mu > opts.mu_final && newton_total < opts.max_newton) {
        for (int it = 0; it < 80 && newton_total < opts.max_newton; ++it) {
            ++newton_total;
            if (!factorize(cons, theta, t, &W)) {
                numerical_trouble = true;
                break;
            }
            Eigen::VectorXd g = Eigen::VectorXd::Zero(p + 1);
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p + 1, p + 1);
            g(p) = -1.0 / mu;
            for (size_t j = 0; j < cons.size(); ++j) {
                const auto& c = cons[j];
                const Eigen::MatrixXd& Wj = W[j];
                const size_t nc = c.coeffs.size();
                std::vector<Eigen::MatrixXd> WA(nc);
                for (size_t a = 0; a < nc; ++a) WA[a] = Wj * c.coeffs[a].second;
                for (size_t a = 0; a < nc; ++a) {
                    const int ia = c.coeffs[a].first;
                    g(ia) -= WA[a].trace();
                    for (size_t b = a; b < nc; ++b) {
                        const int ib = c.coeffs[b].first;
                        const double hab = (WA[a].transpose().cwiseProduct(WA[b])).sum();
                        H(ia, ib) += hab;
                        if (ia != ib) H(ib, ia) += hab;
                    }
                    if (c.margin_weight != 0.0) {
                        const double hat = -c.margin_weight * (WA[a] * Wj).trace();
                        H(ia, p) += hat;
                        H(p, ia) += hat;
                    }
                }
                if (c.margin_weight != 0.0) {
                    g(p) += c.margin_weight * Wj.trace();
                    H(p, p) += c.margin_weight * c.margin_weight * Wj.squaredNorm();
                }
            }
            const double slack = R2 - theta.squaredNorm();
            g.head(p) += (2.0 / slack) * theta;
            H.topLeftCorner(p, p) += (2.0 / slack) * Eigen::MatrixXd::Identity(p, p) +
                                     (4.0 / (slack * slack)) * theta * theta.transpose();

            // floored-eigenvalue Newton solve: weakly coupled scalars leave
            // the Hessian numerically singular, which a plain factorization
            // turns into astronomically long steps
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> heig(H);
            const double lam_floor =
                std::max(heig.eigenvalues().maxCoeff(), 1e-300) * 1e-12;
            const Eigen::VectorXd inv_l =
                heig.eigenvalues().cwiseMax(lam_floor).cwiseInverse();
            Eigen::VectorXd step = -(heig.eigenvectors() *
                                     (inv_l.asDiagonal() *
                                      (heig.eigenvectors().transpose() * g)));
            if (!step.allFinite()) {
                numerical_trouble = true;
                break;
            }
            const double max_step = 1e3 * (1.0 + theta.norm()) + std::abs(t);
            if (step.norm() > max_step) step *= max_step / step.norm();
            const double decrement2 = -g.dot(step);
            if (decrement2 <= 1e-14) break;

            bool ok = false;
            const double f0 = barrier_value(cons, theta, t, R2, mu, &ok);
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::VectorXd th2 = theta + alpha * step.head(p);
                const double t2 = t + alpha * step(p);
                bool ok2 = false;
                const double f2 = barrier_value(cons, th2, t2, R2, mu, &ok2);
                if (ok2 && f2 <= f0 - 1e-4 * alpha * decrement2) {
                    theta.swap(th2);
                    t = t2;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (opts.trace)
                std::fprintf(stderr, "  mu=%.2e it=%d t=%.6e dec2=%.2e alpha=%.2e%s\n",
                             mu, it, t, decrement2, alpha, moved ? "" : " STALL");
            if (!moved) break;
            if (decrement2 < 1e-12) break;
        }
        if (numerical_trouble) break;

        if (opts.early_exit && t > opts.feas_margin) {
            const double true_margin = margin_of(theta);
            if (true_margin > opts.feas_margin) {
                t = true_margin;
                mu = opts.mu_final;
                break;
            }
        }
        mu *= 0.05;
    }

    sol.diagnostics.margin = t;
    sol.diagnostics.mu_final = mu;
    sol.diagnostics.newton_iters = newton_total;
    sol.diagnostics.residual = nu * std::max(mu, opts.mu_final);

    if (numerical_trouble && t <= opts.feas_margin) {
        sol.status = SolveStatus::NumericalFailure;
        sol.diagnostics.note = "barrier iteration lost strict feasibility";
        return sol;
    }
    if (mu > opts.mu_final && t <= opts.feas_margin) {
        // an infeasibility verdict needs a converged path
        sol.status = SolveStatus::NumericalFailure;
        sol.diagnostics.note = "iteration budget exhausted before convergence";
        return sol;
    }

    sol.witness = problem.unpack(theta.cwiseQuotient(colscale));
    if (t > opts.feas_margin) {
        const auto check = verify_witness(problem, sol.witness);
        sol.diagnostics.max_violation = check.max_violation;
        if (!check.ok) {
            sol.status = SolveStatus::NumericalFailure;
            sol.diagnostics.note = "witness failed independent re-verification";
            return sol;
        }
        sol.status = SolveStatus::Feasible;
    } else {
        sol.status = SolveStatus::Infeasible;
        sol.witness.clear();
    }
    return sol;
}

}  // namespace msicert::lmi
