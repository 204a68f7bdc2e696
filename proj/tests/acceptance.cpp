// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "oracles.hpp"
#include "rlasso/cli_io.hpp"
#include "rlasso/estimators.hpp"
#include "rlasso/lambda_selection.hpp"
#include "rlasso/real_data.hpp"
#include "rlasso/simulation.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace rlasso;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Dataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd y) {
    Dataset d;
    d.x = std::move(x);
    d.y = std::move(y);
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) d.names.push_back("b" + std::to_string(j + 1));
    return d;
}

struct Instance {
    Dataset data;
    RestrictionSet restrictions;
};

// n in [20, 100], p in [3, 10], m in [1, p - 1], Gaussian R (full rank with
// probability one, checked anyway).
Instance random_instance(std::mt19937_64& rng) {
    const int n = oracle::uniform_int(rng, 20, 100);
    const int p = oracle::uniform_int(rng, 3, 10);
    const int m = oracle::uniform_int(rng, 1, p - 1);
    Eigen::MatrixXd x = oracle::random_matrix(rng, n, p);
    const Eigen::VectorXd beta = oracle::random_vector(rng, p);
    Eigen::VectorXd y = x * beta + oracle::random_vector(rng, n);
    RestrictionSet rs{oracle::random_matrix(rng, m, p), oracle::random_vector(rng, m)};
    validate_restrictions(rs, p);
    return {make_dataset(std::move(x), std::move(y)), std::move(rs)};
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).lpNorm<Eigen::Infinity>();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

Outcome constraint_exactness() {
    std::mt19937_64 rng(101);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Instance inst = random_instance(rng);
        worst = std::max(worst, inst.restrictions.residual_inf(
                                    fit_restricted_ols(inst.data, inst.restrictions).coefficients));
        FitConfig cfg;
        cfg.lambda = oracle::log_uniform(rng, 1e-3, 10.0);
        worst = std::max(worst, inst.restrictions.residual_inf(
                                    fit_restricted_lasso(inst.data, inst.restrictions, cfg).coefficients));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-8 && secs < 10.0,
            fmt("max |Rb - r|_inf = %.3g (<= 1e-8), %.2f s (< 10 s)", worst, secs)};
}

Outcome reductions() {
    std::mt19937_64 rng(202);
    double worst_lasso = 0.0, worst_restricted = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Instance inst = random_instance(rng);
        FitConfig cfg;  // lambda = 0
        worst_lasso = std::max(worst_lasso, max_abs_diff(fit_lasso_lqa(inst.data, cfg).coefficients,
                                                         fit_ols(inst.data).coefficients));
        worst_restricted = std::max(
            worst_restricted,
            max_abs_diff(fit_restricted_lasso(inst.data, inst.restrictions, cfg).coefficients,
                         fit_restricted_ols(inst.data, inst.restrictions).coefficients));
    }
    return {worst_lasso <= 1e-6 && worst_restricted <= 1e-6,
            fmt("lasso(0) vs ols %.3g, rlasso(0) vs rols %.3g (<= 1e-6)", worst_lasso,
                worst_restricted)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(303);

    // Restricted OLS against null-space least squares.
    double worst_rols = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Instance inst = random_instance(rng);
        const Eigen::VectorXd expect = oracle::nullspace_constrained_ls(
            inst.data.x, inst.data.y, inst.restrictions.rmat, inst.restrictions.rvec);
        worst_rols = std::max(
            worst_rols,
            max_abs_diff(fit_restricted_ols(inst.data, inst.restrictions).coefficients, expect));
    }

    // LQA on orthonormal designs against soft-thresholding at lambda / 2.
    double worst_soft = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = oracle::uniform_int(rng, 20, 100);
        const int p = oracle::uniform_int(rng, 3, 10);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(rng, n, p));
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::VectorXd y = 3.0 * oracle::random_vector(rng, n);
        const Eigen::VectorXd z = q.transpose() * y;
        FitConfig cfg;
        cfg.lambda = oracle::log_uniform(rng, 1e-3, 10.0);
        const Eigen::VectorXd b = fit_lasso_lqa(make_dataset(q, y), cfg).coefficients;
        for (Eigen::Index j = 0; j < p; ++j) {
            worst_soft = std::max(worst_soft,
                                  std::abs(b(j) - oracle::soft_threshold(z(j), cfg.lambda / 2)));
        }
    }

    // Restricted LQA fixed point against the null-space minimizer of the
    // quadratic surrogate built at that point, over the nonzero coefficients.
    double worst_fixed = 0.0;
    int checked = 0, unconverged = 0;
    for (int i = 0; i < 100; ++i) {
        const Instance inst = random_instance(rng);
        FitConfig cfg;
        cfg.lambda = oracle::log_uniform(rng, 1e-3, 10.0);
        const FitResult fitted = fit_restricted_lasso(inst.data, inst.restrictions, cfg);
        if (!fitted.converged) {
            ++unconverged;
            continue;
        }
        const Eigen::Index p = inst.data.p();
        LqaState state;
        state.beta_current = fitted.coefficients;
        state.active.resize(p);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index j = 0; j < p; ++j) {
            state.active[j] = fitted.coefficients(j) != 0.0;
            if (state.active[j]) keep.push_back(j);
        }
        const Eigen::VectorXd diag = lqa_penalty_matrix(state, cfg).diag;
        const Eigen::VectorXd expect = oracle::nullspace_constrained_ls(
            inst.data.x(Eigen::all, keep), inst.data.y, inst.restrictions.rmat(Eigen::all, keep),
            inst.restrictions.rvec, diag(keep));
        worst_fixed = std::max(worst_fixed, max_abs_diff(expect, fitted.coefficients(keep)));
        ++checked;
    }

    const bool pass = worst_rols <= 1e-8 && worst_soft <= 1e-4 && worst_fixed <= 1e-6;
    return {pass, fmt("rols vs null-space %.3g (<= 1e-8); orthonormal lqa vs soft-threshold %.3g "
                      "(<= 1e-4); rlasso fixed point vs surrogate %.3g (<= 1e-6)",
                      worst_rols, worst_soft, worst_fixed) +
                      " over " + std::to_string(checked) + " converged fits, " +
                      std::to_string(unconverged) + " unconverged skipped"};
}

std::vector<MetricsRow> run_scenario(const char* name) {
    std::optional<SimScenario> s = named_scenario(name, 200, 200, kSeed);
    return run_experiment(*s, 0).rows;
}

// Rows come back in OLS, Res-OLS, LASSO, Res-LASSO order.
enum Row { kOls = 0, kRols = 1, kLasso = 2, kRlasso = 3 };

Outcome normal_errors() {
    const auto rows = run_scenario("normal");
    const bool pass = rows[kLasso].correctly_fitted_rate >= 0.95 &&
                      rows[kRlasso].correctly_fitted_rate >= 0.95 &&
                      rows[kRlasso].mean_mse < rows[kLasso].mean_mse &&
                      rows[kRols].mean_mse < rows[kOls].mean_mse &&
                      rows[kOls].mean_mse >= 0.003 && rows[kOls].mean_mse <= 0.007;
    return {pass,
            fmt("correctly fitted LASSO %.3f, Res-LASSO %.3f (>= 0.95); ",
                rows[kLasso].correctly_fitted_rate, rows[kRlasso].correctly_fitted_rate) +
                fmt("MeanMSE Res-LASSO %.4g < LASSO %.4g; Res-OLS %.4g < OLS %.4g; ",
                    rows[kRlasso].mean_mse, rows[kLasso].mean_mse, rows[kRols].mean_mse,
                    rows[kOls].mean_mse) +
                std::string("OLS in [0.003, 0.007]")};
}

Outcome t3_errors() {
    const auto rows = run_scenario("t3");
    const double rl = rows[kRlasso].correctly_fitted_rate;
    const double l = rows[kLasso].correctly_fitted_rate;
    return {rl >= 0.9 && rl >= l,
            fmt("correctly fitted Res-LASSO %.3f (>= 0.9 and >= LASSO %.3f)", rl, l)};
}

Outcome x_outliers() {
    const auto rows = run_scenario("outlier-x");
    const double rl = rows[kRlasso].correctly_fitted_rate;
    const double l = rows[kLasso].correctly_fitted_rate;
    const bool pass = rl >= 0.9 && l <= 0.1 && rows[kRlasso].mean_mse < rows[kOls].mean_mse;
    return {pass, fmt("correctly fitted Res-LASSO %.3f (>= 0.9), LASSO %.3f (<= 0.1); "
                      "MeanMSE Res-LASSO %.4g < OLS %.4g",
                      rl, l, rows[kRlasso].mean_mse, rows[kOls].mean_mse)};
}

Outcome y_outliers() {
    const auto rows = run_scenario("outlier-y");
    double max_rate = 0.0, min_mse = 1e300;
    std::string worst;
    for (const auto& row : rows) {
        if (row.correctly_fitted_rate > max_rate) {
            max_rate = row.correctly_fitted_rate;
            worst = row.method;
        }
        min_mse = std::min(min_mse, row.mean_mse);
    }
    return {max_rate <= 0.25 && min_mse >= 1.0,
            fmt("max correctly fitted %.3f (<= 0.25)", max_rate) +
                (worst.empty() ? "" : " by " + worst) +
                fmt("; min MeanMSE %.4g (>= 1)", min_mse)};
}

Outcome real_data_pipeline() {
    CliConfig config;
    config.command = "example";
    config.seed = kSeed;
    config.format = OutputFormat::Json;
    std::ostringstream out, err;
    const int code = run_command(config, out, err);
    if (code != kExitOk) return {false, "example exited with " + std::to_string(code) + ": " + err.str()};
    const auto doc = nlohmann::json::parse(out.str());

    // Residuals reported by the example, then restricted fits recomputed
    // across the whole lambda grid.
    double worst = 0.0;
    int restricted = 0;
    for (const auto& row : doc["coefficients"]) {
        const std::string method = row["method"];
        if (method != "Res-OLS" && method != "Res-LASSO") continue;
        worst = std::max(worst, row["restriction_residual"].get<double>());
        ++restricted;
    }
    const Dataset data = real_data::rd_expenditure();
    const RestrictionSet rs = real_data::rd_restrictions();
    const LambdaGrid grid = lambda_grid(data, 50);
    FitConfig cfg;
    cfg.penalize_mask = {false, true, true, true, true};
    worst = std::max(worst, rs.residual_inf(fit_restricted_ols(data, rs).coefficients));
    bool found = false;
    for (double lambda : grid.values) {
        cfg.lambda = lambda;
        worst = std::max(worst, rs.residual_inf(fit_restricted_lasso(data, rs, cfg).coefficients));
        const FitResult r = fit_lasso_lqa(data, cfg);
        std::vector<Eigen::Index> predictors;
        for (auto j : r.selected) {
            if (j > 0) predictors.push_back(j);
        }
        if (predictors == std::vector<Eigen::Index>{1, 3}) found = true;
    }
    const bool reported = doc["lasso_path_contains_1_3"].get<bool>();
    return {restricted == 2 && worst <= 1e-8 && found && reported,
            fmt("restricted residual %.3g (<= 1e-8); ", worst) + "path contains {X1, X3}: " +
                (found ? "yes" : "no") + " (reported " + (reported ? "yes" : "no") + ")"};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    int checked = 0;
    for (const char* scenario : {"normal", "t3", "outlier-y", "outlier-x"}) {
        std::string first_out, first_dump;
        for (unsigned threads : {1u, 4u, 1u, 3u}) {
            CliConfig config;
            config.command = "simulate";
            config.scenario = scenario;
            config.n_values = {50, 100};
            config.reps = 25;
            config.seed = 99;
            config.format = OutputFormat::Csv;
            config.threads = threads;
            config.dump_estimates = "acceptance_dump.csv";
            std::ostringstream out, err;
            if (run_command(config, out, err) != kExitOk) {
                return {false, std::string("simulate failed: ") + err.str()};
            }
            const std::string dump = slurp(config.dump_estimates);
            if (first_out.empty()) {
                first_out = out.str();
                first_dump = dump;
            } else if (out.str() != first_out || dump != first_dump) {
                std::remove(config.dump_estimates.c_str());
                return {false, std::string("output differs for scenario ") + scenario +
                                   " with " + std::to_string(threads) + " threads"};
            }
            ++checked;
        }
    }
    std::remove("acceptance_dump.csv");
    return {true, std::to_string(checked) +
                      " simulate runs (4 scenarios x threads 1, 4, 1, 3) byte-identical, "
                      "tables and estimate dumps"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"1 constraint exactness", constraint_exactness},
        {"2 reductions at lambda = 0", reductions},
        {"3 oracle equivalence", oracle_equivalence},
        {"4 normal errors, n = 200", normal_errors},
        {"5 t3 errors, n = 200", t3_errors},
        {"6 x-direction outliers, n = 200", x_outliers},
        {"7 y-direction outliers fail, n = 200", y_outliers},
        {"8 real-data pipeline", real_data_pipeline},
        {"9 determinism", determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s  [%s] %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
