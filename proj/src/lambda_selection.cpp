#include "rlasso/lambda_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace rlasso {

LambdaGrid lambda_grid(const Dataset& data, int n_points) {
    if (n_points < 2) throw Error(ErrorKind::InvalidConfig, "lambda grid needs at least 2 points");
    const double xty_max = (data.x.transpose() * data.y).lpNorm<Eigen::Infinity>();
    if (!(xty_max > 0.0)) {
        throw Error(ErrorKind::DegenerateResponse, "X'y is zero; the lambda grid is undefined");
    }
    const double hi = 2.0 * xty_max;
    const double log_hi = std::log(hi);
    const double log_lo = std::log(1e-4 * hi);
    LambdaGrid grid;
    grid.values.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        grid.values.push_back(std::exp(log_hi + t * (log_lo - log_hi)));
    }
    // Pin the endpoints so they are exact rather than exp(log(.)).
    grid.values.front() = hi;
    grid.values.back() = 1e-4 * hi;
    return grid;
}

std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        std::ostringstream os;
        os << "k = " << k << " with n = " << n << " (need 2 <= k <= n)";
        throw Error(ErrorKind::KOutOfRange, os.str());
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    const Eigen::Index base = n / k;
    const Eigen::Index extra = n % k;
    auto it = order.begin();
    for (int f = 0; f < k; ++f) {
        const Eigen::Index size = base + (f < extra ? 1 : 0);
        folds[f].assign(it, it + size);
        std::sort(folds[f].begin(), folds[f].end());
        it += size;
    }
    return folds;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.x = data.x(rows, Eigen::all);
    out.y = data.y(rows);
    out.names = data.names;
    return out;
}

}  // namespace

const char* to_string(CvRule rule) {
    switch (rule) {
        case CvRule::MinError: return "min";
        case CvRule::OneStandardError: return "1se";
    }
    return "?";
}

CvRule parse_cv_rule(std::string_view name) {
    if (name == "min") return CvRule::MinError;
    if (name == "1se") return CvRule::OneStandardError;
    throw Error(ErrorKind::InvalidConfig, "unknown cv rule '" + std::string(name) + "' (min, 1se)");
}

CvReport cross_validate(const Dataset& data, Method method, const RestrictionSet* restrictions,
                        const LambdaGrid& grid, int k, std::uint64_t seed,
                        const FitConfig& config, CvRule rule) {
    if (!is_penalized(method)) {
        throw Error(ErrorKind::InvalidConfig, "cross-validation applies to lasso and rlasso only");
    }
    if (is_restricted(method) && !restrictions) {
        throw Error(ErrorKind::InvalidConfig, "rlasso cross-validation requires restrictions");
    }
    if (grid.values.empty()) throw Error(ErrorKind::InvalidConfig, "empty lambda grid");
    validate_dataset(data);

    const auto folds = kfold_split(data.n(), k, seed);
    std::vector<Dataset> train(folds.size());
    std::vector<Dataset> test(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<Eigen::Index> rows;
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) rows.insert(rows.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(rows.begin(), rows.end());
        if (rows.size() < 2) {
            std::ostringstream os;
            os << "fold " << f + 1 << " leaves " << rows.size() << " training rows";
            throw Error(ErrorKind::FoldTooSmall, os.str());
        }
        train[f] = take_rows(data, rows);
        test[f] = take_rows(data, folds[f]);
    }

    CvReport report;
    report.folds = k;
    report.seed = seed;
    report.curve.reserve(grid.values.size());
    std::vector<double> fold_error(folds.size());
    for (double lambda : grid.values) {
        FitConfig cfg = config;
        cfg.lambda = lambda;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            FitResult fitted;
            try {
                fitted = fit(method, train[f], restrictions, cfg);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "lambda " << lambda << ", fold " << f + 1 << ": " << e.what();
                throw Error(e.kind(), os.str());
            }
            const Eigen::VectorXd resid = test[f].y - test[f].x * fitted.coefficients;
            fold_error[f] = resid.squaredNorm() / static_cast<double>(resid.size());
        }
        const double kd = static_cast<double>(k);
        const double mean = std::accumulate(fold_error.begin(), fold_error.end(), 0.0) / kd;
        double ss = 0.0;
        for (double e : fold_error) ss += (e - mean) * (e - mean);
        const double se = std::sqrt(ss / (kd - 1.0)) / std::sqrt(kd);
        report.curve.push_back({lambda, mean, se});
    }

    // Ties go to the largest lambda.
    const CvPoint* best = &report.curve.front();
    for (const auto& point : report.curve) {
        if (point.mean_error < best->mean_error ||
            (point.mean_error == best->mean_error && point.lambda > best->lambda)) {
            best = &point;
        }
    }
    report.lambda_min = best->lambda;
    report.lambda_1se = best->lambda;
    const double bound = best->mean_error + best->std_error;
    for (const auto& point : report.curve) {
        if (point.mean_error <= bound && point.lambda > report.lambda_1se) {
            report.lambda_1se = point.lambda;
        }
    }
    report.rule = rule;
    report.best_lambda = rule == CvRule::MinError ? report.lambda_min : report.lambda_1se;
    return report;
}

}  // namespace rlasso
