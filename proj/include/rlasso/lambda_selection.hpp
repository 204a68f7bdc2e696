#pragma once

#include "rlasso/estimators.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace rlasso {

struct LambdaGrid {
    std::vector<double> values;  // strictly decreasing, positive
};

/// Log-spaced grid from lambda_max = 2 |X'y|_inf (the smallest lambda whose
/// LASSO solution is zero) down to 1e-4 * lambda_max.
LambdaGrid lambda_grid(const Dataset& data, int n_points);

/// k disjoint folds covering 0..n-1 after a seeded shuffle. Fold sizes differ
/// by at most one; indices within each fold are ascending.
std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed);

/// How the cross-validation curve picks its lambda. MinError takes the
/// minimizer of the mean fold error; OneStandardError takes the largest lambda
/// whose mean error is within one standard error of that minimum.
enum class CvRule { MinError, OneStandardError };

const char* to_string(CvRule rule);
/// Accepts "min" and "1se".
CvRule parse_cv_rule(std::string_view name);

struct CvPoint {
    double lambda = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;
};

struct CvReport {
    double best_lambda = 0.0;  // lambda_min or lambda_1se, per `rule`
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    CvRule rule = CvRule::OneStandardError;
    std::vector<CvPoint> curve;
    int folds = 0;
    std::uint64_t seed = 0;
};

/// k-fold cross-validation of the LASSO (or restricted LASSO) over `grid`.
/// The loss is mean squared prediction error on the held-out fold. Ties in
/// the fold-averaged loss go to the largest lambda.
CvReport cross_validate(const Dataset& data, Method method, const RestrictionSet* restrictions,
                        const LambdaGrid& grid, int k, std::uint64_t seed,
                        const FitConfig& config, CvRule rule = CvRule::OneStandardError);

}  // namespace rlasso
