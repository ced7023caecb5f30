// Backend-neutral LMI feasibility problems: symmetric matrix decision
// variables, affine symmetric matrix constraints, strictness by eps-shift.
//
// The built-in solver maximizes the common feasibility margin
//   max t  s.t.  G_j(theta) >= t*I for every constraint, ||theta|| <= R
// by log-det barrier path following. A positive optimal margin yields a
// strictly feasible witness, which is re-verified by plain eigenvalue
// checks before being reported.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace msicert::lmi {

enum class Cone { PosDef, PosSemiDef, Free };

enum class SolveStatus { Feasible, Infeasible, NumericalFailure };

const char* to_string(SolveStatus s);

struct VariableRef {
    int base = 0;  // first scalar index in the stacked decision vector
    int dim = 0;
    int scalar_count() const { return dim * (dim + 1) / 2; }
};

// Symmetric-matrix-valued expression, affine in the problem's scalar
// decision vector: expr(theta) = constant + sum_i theta_i * coeff_i.
class AffineExpr {
  public:
    explicit AffineExpr(int dim);
    static AffineExpr constant_expr(const Eigen::MatrixXd& C);

    int dim() const { return dim_; }
    const Eigen::MatrixXd& constant() const { return constant_; }
    const std::map<int, Eigen::MatrixXd>& coefficients() const { return coeffs_; }

    void add_constant(const Eigen::MatrixXd& C);
    // Places scale*V at block position (row, col); off-diagonal placements
    // also add the mirrored transpose block so the expression stays symmetric.
    void add_block(const VariableRef& v, int row, int col, double scale);
    // T' * expr * T  (T has dim() rows).
    AffineExpr congruence(const Eigen::MatrixXd& T) const;
    AffineExpr& operator+=(const AffineExpr& other);

    // Evaluates at a concrete decision vector.
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& theta) const;

  private:
    int dim_;
    Eigen::MatrixXd constant_;
    std::map<int, Eigen::MatrixXd> coeffs_;
};

class LmiProblem {
  public:
    // Strictness margin: strict constraints M < 0 are encoded as
    // M <= -eps*||constant(M)||*I.
    double epsilon = 1e-7;

    VariableRef add_variable(const std::string& name, int dim, Cone cone);
    // expr(theta) < 0, eps-shifted.
    void require_neg_def(const AffineExpr& expr);
    // expr(theta) >= 0.
    void require_pos_semi(const AffineExpr& expr);

    int scalar_count() const { return next_scalar_; }
    const std::vector<std::string>& variable_names() const { return names_; }
    std::optional<VariableRef> find(const std::string& name) const;
    Cone cone_of(const std::string& name) const;

    // Packs named witness matrices into a decision vector (and back).
    Eigen::VectorXd pack(const std::map<std::string, Eigen::MatrixXd>& witness) const;
    std::map<std::string, Eigen::MatrixXd> unpack(const Eigen::VectorXd& theta) const;

    struct ConstraintView {
        const AffineExpr* expr;
        bool strict;  // strictness margin applied by the solver, in
                      // preconditioned units scaled by `epsilon`
    };
    std::vector<ConstraintView> constraints() const;

  private:
    std::vector<std::string> names_;
    std::vector<VariableRef> vars_;
    std::vector<Cone> cones_;
    std::vector<AffineExpr> neg_def_;
    std::vector<AffineExpr> pos_semi_;
    int next_scalar_ = 0;
};

struct SolverOptions {
    double ball_radius = 1e6;   // bound on ||theta||_2
    double mu_final = 1e-9;     // final barrier parameter
    double feas_margin = 1e-6;  // smallest accepted optimal margin
    int max_newton = 2000;      // total Newton iteration budget
    bool early_exit = true;     // stop once the margin clears the threshold
    bool trace = false;         // diagnostic iteration log on stderr
};

struct LmiSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::map<std::string, Eigen::MatrixXd> witness;
    struct Diagnostics {
        double margin = 0.0;         // achieved common margin (scaled units)
        double mu_final = 0.0;
        int newton_iters = 0;
        double max_violation = 0.0;  // from the independent re-verification
        double residual = 0.0;       // barrier gap bound at termination
        std::string note;
    } diagnostics;
};

LmiSolution solve(const LmiProblem& problem, const SolverOptions& opts = {});

struct VerifyResult {
    bool ok = false;
    double max_violation = 0.0;
};

// Recomputes every cone membership and constraint residual by dense
// eigenvalue decomposition, independent of the solving path.
VerifyResult verify_witness(const LmiProblem& problem,
                            const std::map<std::string, Eigen::MatrixXd>& witness,
                            double tol = 1e-7);

}  // namespace msicert::lmi
