#include "rlasso/simulation.hpp"

#include "rlasso/lambda_selection.hpp"
#include "rlasso/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace rlasso {

namespace {

enum Stream : std::uint64_t { kDesign = 0, kErrors = 1, kOutliers = 2, kFolds = 3 };

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

const char* to_string(ErrorDist dist) {
    return dist == ErrorDist::Normal ? "normal" : "t3";
}

const char* to_string(Contamination contamination) {
    switch (contamination) {
        case Contamination::None: return "none";
        case Contamination::YDirection: return "y_direction";
        case Contamination::XDirection: return "x_direction";
    }
    return "unknown";
}

const char* display_name(Method method) {
    switch (method) {
        case Method::Ols: return "OLS";
        case Method::RestrictedOls: return "Res-OLS";
        case Method::Lasso: return "LASSO";
        case Method::RestrictedLasso: return "Res-LASSO";
    }
    return "unknown";
}

Eigen::VectorXd benchmark_beta() {
    Eigen::VectorXd beta(6);
    beta << 0, 1, 3, 1, 5, 0;
    return beta;
}

RestrictionSet benchmark_restrictions() {
    RestrictionSet set;
    set.rmat.resize(2, 6);
    set.rmat << 0, 1, 0, -1, 0, 0,
                0, 0, 1, 2, 1, 0;
    set.rvec.resize(2);
    set.rvec << 0, 10;
    return set;
}

void validate_scenario(const SimScenario& s) {
    const auto p = s.beta_true.size();
    if (p < 1) throw Error(ErrorKind::InvalidConfig, "beta_true is empty");
    validate_restrictions(s.restrictions, p);
    if (s.n < p + s.restrictions.m()) {
        std::ostringstream os;
        os << "n = " << s.n << " is below p + m = " << p + s.restrictions.m();
        throw Error(ErrorKind::InvalidConfig, os.str());
    }
    if (!(s.contamination_fraction >= 0.0 && s.contamination_fraction < 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "contamination fraction must lie in [0, 1)");
    }
    if (s.contamination != Contamination::None && s.contamination_fraction <= 0.0) {
        throw Error(ErrorKind::InvalidConfig, "contamination needs a positive fraction");
    }
    if (s.n_reps < 1) throw Error(ErrorKind::InvalidConfig, "n_reps must be >= 1");
    if (!(s.tau > 0.0)) throw Error(ErrorKind::InvalidConfig, "tau must be > 0");
    if (!(s.noise_scale >= 0.0)) throw Error(ErrorKind::InvalidConfig, "noise_scale must be >= 0");
    validate_config(s.fit_config, p);
    const double residual = s.restrictions.residual_inf(s.beta_true);
    if (residual > 1e-12 * (1.0 + s.restrictions.rvec.lpNorm<Eigen::Infinity>())) {
        std::ostringstream os;
        os << "beta_true violates the restrictions (residual " << residual << ")";
        throw Error(ErrorKind::InvalidConfig, os.str());
    }
}

Eigen::MatrixXd gen_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = normal(rng);
    }
    return x;
}

Eigen::VectorXd gen_errors(Eigen::Index n, ErrorDist dist, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd e(n);
    if (dist == ErrorDist::Normal) {
        for (Eigen::Index i = 0; i < n; ++i) e(i) = normal(rng);
        return e;
    }
    std::chi_squared_distribution<double> chi2(3.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = normal(rng);
        const double v = chi2(rng);
        e(i) = z / std::sqrt(v / 3.0);
    }
    return e;
}

Dataset inject_outliers(Dataset data, Contamination direction, double fraction,
                        std::uint64_t seed) {
    if (direction == Contamination::None) return data;
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "outlier fraction must lie in (0, 1)");
    }
    const Eigen::Index n = data.n();
    // The small offset keeps 0.1 * 50 from rounding up to 6.
    const auto count = std::min<Eigen::Index>(
        n, static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));

    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(static_cast<std::size_t>(count));
    std::sort(rows.begin(), rows.end());

    std::normal_distribution<double> outlier(100.0, 1.0);
    for (Eigen::Index i : rows) {
        if (direction == Contamination::YDirection) {
            data.y(i) = outlier(rng);
        } else {
            for (Eigen::Index j = 0; j < data.p(); ++j) data.x(i, j) = outlier(rng);
        }
    }
    return data;
}

SelectionClass classify_selection(const Eigen::VectorXd& beta_hat,
                                  const Eigen::VectorXd& beta_true, double tau) {
    if (beta_hat.size() != beta_true.size()) {
        throw Error(ErrorKind::DimensionMismatch, "beta_hat and beta_true differ in length");
    }
    SelectionClass out;
    bool same_zero_set = true;
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
        const bool estimated_zero = std::abs(beta_hat(j)) < tau;
        const bool true_zero = beta_true(j) == 0.0;
        if (estimated_zero && true_zero) ++out.correct_zeros;
        if (estimated_zero && !true_zero) ++out.incorrect_zeros;
        if (estimated_zero != true_zero) same_zero_set = false;
    }
    out.exactly_fitted = same_zero_set;
    return out;
}

double replication_mse(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_true) {
    if (beta_hat.size() != beta_true.size()) {
        throw Error(ErrorKind::DimensionMismatch, "beta_hat and beta_true differ in length");
    }
    return (beta_hat - beta_true).squaredNorm() / static_cast<double>(beta_true.size());
}

ReplicationResult run_replication(const SimScenario& scenario, int rep_index) {
    const auto rep = static_cast<std::uint64_t>(rep_index);
    const Eigen::Index p = scenario.beta_true.size();

    Dataset data;
    data.x = gen_design(scenario.n, p, derive_seed(scenario.seed, {rep, kDesign}));
    data.y = data.x * scenario.beta_true +
             scenario.noise_scale *
                 gen_errors(scenario.n, scenario.error_dist, derive_seed(scenario.seed, {rep, kErrors}));
    for (Eigen::Index j = 0; j < p; ++j) data.names.push_back("b" + std::to_string(j + 1));
    if (scenario.contamination != Contamination::None) {
        data = inject_outliers(std::move(data), scenario.contamination,
                               scenario.contamination_fraction,
                               derive_seed(scenario.seed, {rep, kOutliers}));
    }

    ReplicationResult result;
    result.rep_index = rep_index;
    const std::uint64_t fold_seed = derive_seed(scenario.seed, {rep, kFolds});
    for (std::size_t i = 0; i < kBenchmarkMethods.size(); ++i) {
        const Method method = kBenchmarkMethods[i];
        MethodOutcome& out = result.methods[i];
        out.method = method;
        try {
            FitConfig cfg = scenario.fit_config;
            const RestrictionSet* restr = is_restricted(method) ? &scenario.restrictions : nullptr;
            if (is_penalized(method)) {
                if (scenario.fixed_lambda) {
                    cfg.lambda = *scenario.fixed_lambda;
                } else {
                    const LambdaGrid grid = lambda_grid(data, scenario.grid_points);
                    cfg.lambda = cross_validate(data, method, restr, grid, scenario.cv_folds,
                                                fold_seed, cfg, scenario.cv_rule)
                                     .best_lambda;
                }
                out.lambda = cfg.lambda;
            }
            const FitResult fitted = fit(method, data, restr, cfg);
            out.coefficients = fitted.coefficients;
            out.selection = classify_selection(fitted.coefficients, scenario.beta_true, scenario.tau);
            out.mse = replication_mse(fitted.coefficients, scenario.beta_true);
            out.ok = true;
        } catch (const Error& e) {
            out.ok = false;
            out.error = e.what();
        }
    }
    return result;
}

std::vector<MetricsRow> aggregate_metrics(int n, const std::vector<ReplicationResult>& reps) {
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < kBenchmarkMethods.size(); ++i) {
        MetricsRow row;
        row.method = display_name(kBenchmarkMethods[i]);
        row.n = n;
        std::vector<double> mses;
        int fitted = 0;
        for (const auto& rep : reps) {
            const MethodOutcome& out = rep.methods[i];
            if (!out.ok) {
                ++row.failures;
                continue;
            }
            ++fitted;
            row.correctly_fitted_rate += out.selection.exactly_fitted ? 1.0 : 0.0;
            row.avg_correct_zeros += out.selection.correct_zeros;
            row.avg_incorrect_zeros += out.selection.incorrect_zeros;
            mses.push_back(out.mse);
        }
        if (fitted > 0) {
            row.correctly_fitted_rate /= fitted;
            row.avg_correct_zeros /= fitted;
            row.avg_incorrect_zeros /= fitted;
            // Summed in rep_index order so the result is independent of scheduling.
            row.mean_mse = std::accumulate(mses.begin(), mses.end(), 0.0) / fitted;
            row.median_mse = median(std::move(mses));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ExperimentResult run_experiment(const SimScenario& scenario, unsigned threads) {
    validate_scenario(scenario);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(scenario.n_reps));

    ExperimentResult result;
    result.replications.resize(static_cast<std::size_t>(scenario.n_reps));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int rep = next++; rep < scenario.n_reps; rep = next++) {
            result.replications[static_cast<std::size_t>(rep)] = run_replication(scenario, rep);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    result.rows = aggregate_metrics(scenario.n, result.replications);
    return result;
}

}  // namespace rlasso
