#pragma once

#include "rlasso/core.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace rlasso {

enum class Method { Ols, RestrictedOls, Lasso, RestrictedLasso };

/// "ols", "rols", "lasso", "rlasso".
const char* to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
bool is_restricted(Method method);
bool is_penalized(Method method);

struct SpdSolution {
    Eigen::MatrixXd z;
    // Ridge added to the diagonal before the factorization succeeded; 0 when
    // the matrix factored as given.
    double jitter = 0.0;
};

/// Solves a * z = b for symmetric positive-definite a by Cholesky.
///
/// A factorization counts as failed when Cholesky breaks down or the squared
/// pivot ratio drops below 1e-14 (numerically singular). On failure the solve
/// is retried on a + delta*I with delta = 1e-10 * trace(a) / p, growing by 10x
/// up to 1e-4 * trace(a) / p. Throws SingularMatrix when every level fails.
SpdSolution solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Ordinary least squares. Throws SingularMatrix when X'X is numerically
/// singular (the solve needed jitter), since beta is then unidentified.
FitResult fit_ols(const Dataset& data);

/// Least squares subject to R beta = r via the Lagrange correction of the OLS
/// estimate. Multipliers are [R (X'X)^-1 R']^-1 (r - R beta_ols).
FitResult fit_restricted_ols(const Dataset& data, const RestrictionSet& restrictions);

/// Expansion point of one local quadratic approximation step.
struct LqaState {
    Eigen::VectorXd beta_current;
    std::vector<bool> active;
    int iteration = 0;
};

/// Diagonal Hessian contribution of the quadratic surrogate of the l1 penalty.
struct PenaltyMatrix {
    Eigen::VectorXd diag;
};

/// Entry j is (lambda/2) / |beta_j| for active penalized j and 0 otherwise.
/// |beta_j| is floored at zero_eps so that restricted coefficients, which are
/// never dropped, keep a finite entry.
PenaltyMatrix lqa_penalty_matrix(const LqaState& state, const FitConfig& config);

/// LASSO by iterated local quadratic approximation, started from OLS.
///
/// Each iteration pins penalized coefficients with |beta_j| < zero_eps to zero
/// (permanently) and solves (X_A'X_A + D_A) beta_A = X_A'y on the remaining
/// columns. Iteration stops once the sup-norm step is below tol.
FitResult fit_lasso_lqa(const Dataset& data, const FitConfig& config);

/// LASSO under R beta = r. Every LQA step is followed by the Lagrange
/// correction with the penalized Gram matrix X'X + D in place of X'X, so each
/// iterate satisfies the restrictions. Coefficients that appear in a
/// restriction are never dropped.
FitResult fit_restricted_lasso(const Dataset& data, const RestrictionSet& restrictions,
                               const FitConfig& config);

/// Dispatches to the estimator for `method`. `restrictions` must be non-null
/// for the restricted methods and is ignored otherwise; `config.lambda` is
/// ignored by the unpenalized methods.
FitResult fit(Method method, const Dataset& data, const RestrictionSet* restrictions,
              const FitConfig& config);

/// (y - X beta)'(y - X beta) + lambda * sum over penalized j of |beta_j|.
double objective_value(const Dataset& data, const Eigen::VectorXd& beta, double lambda,
                       const std::vector<bool>& penalize_mask = {});

}  // namespace rlasso
