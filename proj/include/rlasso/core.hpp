#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlasso {

enum class ErrorKind {
    DimensionMismatch,
    NonFiniteEntry,
    DuplicateName,
    RankDeficient,
    ShapeMismatch,
    TooManyRows,
    InvalidConfig,
    SingularMatrix,
    DegenerateResponse,
    KOutOfRange,
    FoldTooSmall,
    SyntaxError,
    IndexOutOfRange,
    EmptyEquation,
    MissingTarget,
    NonNumericCell,
    EmptyFile,
    Io,
};

const char* to_string(ErrorKind kind);

/// Every failure in the library is reported through this exception; `kind()`
/// lets callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures caused by the numerics rather than by the inputs.
    bool numerical() const noexcept { return kind_ == ErrorKind::SingularMatrix; }

private:
    ErrorKind kind_;
};

/// Design matrix, response and column labels. No intercept is implied; callers
/// add an explicit column of ones when they want one.
struct Dataset {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> names;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index p() const { return x.cols(); }
};

/// Linear equality restrictions `rmat * beta = rvec`.
struct RestrictionSet {
    Eigen::MatrixXd rmat;
    Eigen::VectorXd rvec;

    Eigen::Index m() const { return rmat.rows(); }

    /// True when column j of rmat has a nonzero entry, i.e. coefficient j
    /// takes part in at least one restriction.
    bool involves(Eigen::Index j) const;

    double residual_inf(const Eigen::VectorXd& beta) const;
};

struct FitConfig {
    double lambda = 0.0;
    double zero_eps = 1e-8;
    double tol = 1e-8;
    int max_iter = 100;
    // After the LQA loop, solve the fixed-point equations for the sign
    // pattern reached and keep that solution when it passes the subgradient
    // check. Off gives the plain LQA iterate.
    bool polish = true;
    // Empty means every coefficient is penalized.
    std::vector<bool> penalize_mask;

    bool penalized(Eigen::Index j) const {
        return penalize_mask.empty() || penalize_mask[static_cast<std::size_t>(j)];
    }
};

struct FitResult {
    Eigen::VectorXd coefficients;
    std::vector<Eigen::Index> selected;  // 0-based, ascending
    std::optional<Eigen::VectorXd> multipliers;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    double objective = 0.0;
    // Restricted coefficients the penalty drove below zero_eps but the
    // restrictions kept nonzero. Diagnostic only.
    std::vector<Eigen::Index> forced_nonzero;
};

void validate_dataset(const Dataset& data);

void validate_restrictions(const RestrictionSet& restrictions, Eigen::Index p);

void validate_config(const FitConfig& config, Eigen::Index p);

/// Singular-value rank with tolerance max(rows, cols) * sigma_max * 1e-12.
Eigen::Index numerical_rank(const Eigen::MatrixXd& a);

}  // namespace rlasso
