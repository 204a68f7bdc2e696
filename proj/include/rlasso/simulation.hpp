#pragma once

#include "rlasso/estimators.hpp"
#include "rlasso/lambda_selection.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rlasso {

enum class ErrorDist { Normal, T3 };
enum class Contamination { None, YDirection, XDirection };

const char* to_string(ErrorDist dist);
const char* to_string(Contamination contamination);

/// beta = (0, 1, 3, 1, 5, 0).
Eigen::VectorXd benchmark_beta();

/// b2 = b4 and b3 + 2 b4 + b5 = 10, which the benchmark beta satisfies.
RestrictionSet benchmark_restrictions();

struct SimScenario {
    int n = 200;
    Eigen::VectorXd beta_true = benchmark_beta();
    ErrorDist error_dist = ErrorDist::Normal;
    Contamination contamination = Contamination::None;
    double contamination_fraction = 0.1;
    RestrictionSet restrictions = benchmark_restrictions();
    int n_reps = 200;
    std::uint64_t seed = 0;
    int cv_folds = 5;
    int grid_points = 50;
    CvRule cv_rule = CvRule::OneStandardError;
    // |beta_hat_j| < tau counts as an estimated zero.
    double tau = 0.1;
    FitConfig fit_config;

    // Test hooks: scale of the generated errors, and a fixed lambda that
    // bypasses cross-validation.
    double noise_scale = 1.0;
    std::optional<double> fixed_lambda;
};

/// Checks the scenario invariants, including R * beta_true = r.
void validate_scenario(const SimScenario& scenario);

/// n x p matrix of independent N(0, 1) draws.
Eigen::MatrixXd gen_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

/// Standard normal, or Student t with 3 degrees of freedom built as
/// Z / sqrt(V / 3) with V ~ chi-squared(3).
Eigen::VectorXd gen_errors(Eigen::Index n, ErrorDist dist, std::uint64_t seed);

/// Replaces ceil(fraction * n) distinct rows, chosen uniformly, with N(100, 1)
/// draws: the response for YDirection, the whole predictor row for
/// XDirection. y is left as generated from the clean design.
Dataset inject_outliers(Dataset data, Contamination direction, double fraction,
                        std::uint64_t seed);

struct SelectionClass {
    int correct_zeros = 0;
    int incorrect_zeros = 0;
    bool exactly_fitted = false;
};

SelectionClass classify_selection(const Eigen::VectorXd& beta_hat,
                                  const Eigen::VectorXd& beta_true, double tau);

/// |beta_hat - beta_true|^2 / p.
double replication_mse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true);

inline constexpr std::array<Method, 4> kBenchmarkMethods = {
    Method::Ols, Method::RestrictedOls, Method::Lasso, Method::RestrictedLasso};

/// Row label used in result tables: OLS, Res-OLS, LASSO, Res-LASSO.
const char* display_name(Method method);

struct MethodOutcome {
    Method method = Method::Ols;
    bool ok = false;
    std::string error;
    Eigen::VectorXd coefficients;
    std::optional<double> lambda;
    SelectionClass selection;
    double mse = 0.0;
};

struct ReplicationResult {
    int rep_index = 0;
    std::array<MethodOutcome, 4> methods;  // in kBenchmarkMethods order
};

ReplicationResult run_replication(const SimScenario& scenario, int rep_index);

struct MetricsRow {
    std::string method;
    int n = 0;
    double correctly_fitted_rate = 0.0;
    double avg_correct_zeros = 0.0;
    double avg_incorrect_zeros = 0.0;
    double mean_mse = 0.0;
    double median_mse = 0.0;
    // Replications where the estimator threw; excluded from the averages.
    int failures = 0;
};

struct ExperimentResult {
    std::vector<MetricsRow> rows;  // one per method
    std::vector<ReplicationResult> replications;  // by rep_index
};

/// Runs every replication and aggregates per method. `threads` = 0 uses the
/// hardware concurrency. Output does not depend on the thread count.
ExperimentResult run_experiment(const SimScenario& scenario, unsigned threads = 1);

std::vector<MetricsRow> aggregate_metrics(int n, const std::vector<ReplicationResult>& reps);

}  // namespace rlasso
