#include "rlasso/estimators.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace rlasso {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kSingularPivotRatio = 1e-14;

std::optional<MatrixXd> try_cholesky(const MatrixXd& a, const MatrixXd& b) {
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const VectorXd pivots = llt.matrixLLT().diagonal();
    if (!pivots.allFinite()) return std::nullopt;
    const double lo = pivots.minCoeff();
    const double hi = pivots.maxCoeff();
    if (!(lo > 0.0) || lo * lo <= kSingularPivotRatio * hi * hi) return std::nullopt;
    MatrixXd z = llt.solve(b);
    if (!z.allFinite()) return std::nullopt;
    return z;
}

struct RestrictedSolve {
    VectorXd beta;
    VectorXd multipliers;
    double jitter = 0.0;
};

// Minimizes beta'K beta - 2 c'beta subject to R beta = r:
// beta = K^-1 c + K^-1 R' mu with mu = [R K^-1 R']^-1 (r - R K^-1 c).
RestrictedSolve restricted_solve(const MatrixXd& k, const VectorXd& c, const MatrixXd& rmat,
                                 const VectorXd& rvec) {
    const Index p = k.rows();
    const Index m = rmat.rows();
    MatrixXd rhs(p, 1 + m);
    rhs.col(0) = c;
    rhs.rightCols(m) = rmat.transpose();
    SpdSolution base = solve_spd(k, rhs);
    const VectorXd beta_free = base.z.col(0);
    const MatrixXd w = base.z.rightCols(m);
    const MatrixXd s = rmat * w;
    const MatrixXd s_sym = 0.5 * (s + s.transpose());

    RestrictedSolve out;
    out.jitter = base.jitter;
    out.multipliers = solve_spd(s_sym, rvec - rmat * beta_free).z.col(0);
    out.beta = beta_free + w * out.multipliers;

    // Refine against rounding in the m x m solve.
    const double scale = 1.0 + rvec.lpNorm<Eigen::Infinity>();
    for (int pass = 0; pass < 3; ++pass) {
        const VectorXd residual = rmat * out.beta - rvec;
        if (residual.lpNorm<Eigen::Infinity>() <= 1e-13 * scale) break;
        const VectorXd step = solve_spd(s_sym, -residual).z.col(0);
        out.multipliers += step;
        out.beta += w * step;
    }
    return out;
}

std::vector<Index> nonzero_indices(const VectorXd& beta) {
    std::vector<Index> idx;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0) idx.push_back(j);
    }
    return idx;
}

double ridge_fallback_delta(const MatrixXd& gram) {
    const double p = static_cast<double>(gram.rows());
    const double tr = gram.trace();
    return tr > 0.0 ? 1e-6 * tr / p : 1e-6;
}

struct Normal {
    MatrixXd gram;
    VectorXd xty;
};

Normal normal_equations(const Dataset& data) {
    Normal ne;
    ne.gram = data.x.transpose() * data.x;
    ne.xty = data.x.transpose() * data.y;
    return ne;
}

struct Polished {
    VectorXd beta;
    std::optional<VectorXd> multipliers;
    std::vector<bool> active;
};

// Solves the LQA fixed-point equations directly for the sign pattern of the
// current iterate: 2 X_S'(y - X_S b_S) = lambda s_S (+ R_S' mu), R_S b_S = r.
// The candidate is accepted only if it keeps its signs and every coordinate
// left at zero satisfies 2 |x_j'(y - X b)| <= lambda, which makes it the exact
// minimizer. Coordinates whose sign flips leave the support and the system is
// solved again.
std::optional<Polished> polish_fixed_point(const Normal& ne, const RestrictionSet* restrictions,
                                           const FitConfig& config, const VectorXd& beta,
                                           const std::vector<bool>& active,
                                           const std::vector<bool>& involved) {
    const Index p = beta.size();
    const double half = 0.5 * config.lambda;
    std::vector<bool> support = active;
    VectorXd sign = VectorXd::Zero(p);
    for (Index j = 0; j < p; ++j) {
        if (!support[j] || !config.penalized(j)) continue;
        if (beta(j) == 0.0) return std::nullopt;
        sign(j) = beta(j) > 0.0 ? 1.0 : -1.0;
    }

    for (Index round = 0; round <= p; ++round) {
        std::vector<Index> idx;
        for (Index j = 0; j < p; ++j) {
            if (support[j]) idx.push_back(j);
        }
        Polished out;
        out.beta = VectorXd::Zero(p);
        if (!idx.empty()) {
            const MatrixXd k = ne.gram(idx, idx);
            const VectorXd c = ne.xty(idx) - half * sign(idx);
            if (restrictions) {
                RestrictedSolve rs =
                    restricted_solve(k, c, restrictions->rmat(Eigen::all, idx), restrictions->rvec);
                if (rs.jitter > 0.0) return std::nullopt;
                out.beta(idx) = rs.beta;
                out.multipliers = std::move(rs.multipliers);
            } else {
                SpdSolution sol = solve_spd(k, c);
                if (sol.jitter > 0.0) return std::nullopt;
                out.beta(idx) = sol.z.col(0);
            }
        } else if (restrictions) {
            return std::nullopt;
        }

        bool flipped = false;
        for (Index j : idx) {
            if (!config.penalized(j) || out.beta(j) * sign(j) >= config.zero_eps) continue;
            if (involved[j]) return std::nullopt;
            support[j] = false;
            sign(j) = 0.0;
            flipped = true;
        }
        if (flipped) continue;

        const VectorXd grad = 2.0 * (ne.xty - ne.gram * out.beta);
        const double slack = 1e-9 * std::max(1.0, config.lambda);
        for (Index j = 0; j < p; ++j) {
            if (!support[j] && std::abs(grad(j)) > config.lambda + slack) return std::nullopt;
        }
        out.active = std::move(support);
        return out;
    }
    return std::nullopt;
}

// Shared LQA loop; `restrictions` is null for the unrestricted estimator.
FitResult run_lqa(const Dataset& data, const Normal& ne, const RestrictionSet* restrictions,
                  const FitConfig& config, VectorXd beta) {
    const Index p = data.p();
    std::vector<bool> involved(static_cast<std::size_t>(p), false);
    if (restrictions) {
        for (Index j = 0; j < p; ++j) involved[j] = restrictions->involves(j);
    }
    auto droppable = [&](Index j) { return config.penalized(j) && !involved[j]; };

    LqaState state;
    state.active.assign(static_cast<std::size_t>(p), true);
    std::vector<bool> pressed_to_zero(static_cast<std::size_t>(p), false);

    FitResult result;
    result.lambda = config.lambda;

    for (int it = 1; it <= config.max_iter; ++it) {
        for (Index j = 0; j < p; ++j) {
            if (!state.active[j] || !config.penalized(j)) continue;
            if (std::abs(beta(j)) >= config.zero_eps) continue;
            if (droppable(j)) {
                state.active[j] = false;
                beta(j) = 0.0;
            } else {
                pressed_to_zero[j] = true;
            }
        }
        result.iterations = it;

        std::vector<Index> idx;
        for (Index j = 0; j < p; ++j) {
            if (state.active[j]) idx.push_back(j);
        }
        if (idx.empty()) {
            beta.setZero();
            result.converged = true;
            break;
        }

        state.beta_current = beta;
        state.iteration = it;
        const PenaltyMatrix penalty = lqa_penalty_matrix(state, config);

        MatrixXd k = ne.gram(idx, idx);
        k.diagonal() += penalty.diag(idx);
        const VectorXd c = ne.xty(idx);

        VectorXd next = VectorXd::Zero(p);
        if (restrictions) {
            const MatrixXd r_active = restrictions->rmat(Eigen::all, idx);
            RestrictedSolve rs = restricted_solve(k, c, r_active, restrictions->rvec);
            next(idx) = rs.beta;
            result.multipliers = std::move(rs.multipliers);
        } else {
            next(idx) = solve_spd(k, c).z.col(0);
        }

        const double step = (next - beta).lpNorm<Eigen::Infinity>();
        beta = std::move(next);
        if (step < config.tol) {
            result.converged = true;
            break;
        }
    }

    for (Index j = 0; j < p; ++j) {
        if (state.active[j] && droppable(j) && std::abs(beta(j)) < config.zero_eps) {
            state.active[j] = false;
            beta(j) = 0.0;
        }
    }
    if (config.lambda > 0.0 && config.polish) {
        if (auto polished = polish_fixed_point(ne, restrictions, config, beta, state.active, involved)) {
            beta = std::move(polished->beta);
            state.active = std::move(polished->active);
            if (polished->multipliers) result.multipliers = std::move(polished->multipliers);
            result.converged = true;
        }
    }
    for (Index j = 0; j < p; ++j) {
        if (beta(j) == 0.0) continue;
        if (!config.penalized(j) || std::abs(beta(j)) >= config.zero_eps) {
            result.selected.push_back(j);
        }
        if (pressed_to_zero[j] && std::abs(beta(j)) >= config.zero_eps) {
            result.forced_nonzero.push_back(j);
        }
    }
    result.objective = objective_value(data, beta, config.lambda, config.penalize_mask);
    result.coefficients = std::move(beta);
    return result;
}

}  // namespace

SpdSolution solve_spd(const MatrixXd& a, const MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != a.rows()) {
        std::ostringstream os;
        os << "system " << a.rows() << "x" << a.cols() << " with " << b.rows() << " rhs rows";
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw Error(ErrorKind::SingularMatrix, "system has non-finite entries");
    }
    if (auto z = try_cholesky(a, b)) return {std::move(*z), 0.0};

    const double p = static_cast<double>(a.rows());
    const double unit = a.trace() / p;
    if (unit > 0.0) {
        const double ceiling = 1e-4 * unit * (1.0 + 1e-9);
        for (double delta = 1e-10 * unit; delta <= ceiling; delta *= 10.0) {
            MatrixXd jittered = a;
            jittered.diagonal().array() += delta;
            if (auto z = try_cholesky(jittered, b)) return {std::move(*z), delta};
        }
    }
    std::ostringstream os;
    os << a.rows() << "x" << a.cols() << " system is not positive definite even with jitter "
       << 1e-4 * unit;
    throw Error(ErrorKind::SingularMatrix, os.str());
}

double objective_value(const Dataset& data, const VectorXd& beta, double lambda,
                       const std::vector<bool>& penalize_mask) {
    if (beta.size() != data.p()) {
        throw Error(ErrorKind::DimensionMismatch, "coefficient length differs from p");
    }
    const VectorXd resid = data.y - data.x * beta;
    double l1 = 0.0;
    for (Index j = 0; j < beta.size(); ++j) {
        if (penalize_mask.empty() || penalize_mask[static_cast<std::size_t>(j)]) {
            l1 += std::abs(beta(j));
        }
    }
    return resid.squaredNorm() + lambda * l1;
}

FitResult fit_ols(const Dataset& data) {
    validate_dataset(data);
    const Normal ne = normal_equations(data);
    SpdSolution sol = solve_spd(ne.gram, ne.xty);
    if (sol.jitter > 0.0) {
        throw Error(ErrorKind::SingularMatrix,
                    "X'X is numerically singular; OLS coefficients are not identified");
    }
    FitResult result;
    result.coefficients = sol.z.col(0);
    result.selected = nonzero_indices(result.coefficients);
    result.iterations = 1;
    result.converged = true;
    result.objective = objective_value(data, result.coefficients, 0.0);
    return result;
}

FitResult fit_restricted_ols(const Dataset& data, const RestrictionSet& restrictions) {
    validate_dataset(data);
    validate_restrictions(restrictions, data.p());
    const Normal ne = normal_equations(data);
    RestrictedSolve rs = restricted_solve(ne.gram, ne.xty, restrictions.rmat, restrictions.rvec);
    if (rs.jitter > 0.0) {
        throw Error(ErrorKind::SingularMatrix,
                    "X'X is numerically singular; restricted OLS needs an invertible X'X");
    }
    FitResult result;
    result.coefficients = std::move(rs.beta);
    result.multipliers = std::move(rs.multipliers);
    result.selected = nonzero_indices(result.coefficients);
    result.iterations = 1;
    result.converged = true;
    result.objective = objective_value(data, result.coefficients, 0.0);
    return result;
}

PenaltyMatrix lqa_penalty_matrix(const LqaState& state, const FitConfig& config) {
    const Index p = state.beta_current.size();
    PenaltyMatrix out{VectorXd::Zero(p)};
    if (config.lambda == 0.0) return out;
    for (Index j = 0; j < p; ++j) {
        if (!state.active[j] || !config.penalized(j)) continue;
        const double magnitude = std::max(std::abs(state.beta_current(j)), config.zero_eps);
        out.diag(j) = 0.5 * config.lambda / magnitude;
    }
    return out;
}

FitResult fit_lasso_lqa(const Dataset& data, const FitConfig& config) {
    validate_dataset(data);
    validate_config(config, data.p());
    const Normal ne = normal_equations(data);

    // beta = 0 satisfies the subgradient condition 2|X'y|_inf <= lambda exactly;
    // LQA would only approach it geometrically.
    bool all_penalized = true;
    for (Index j = 0; j < data.p(); ++j) all_penalized = all_penalized && config.penalized(j);
    if (all_penalized && config.lambda > 0.0 &&
        2.0 * ne.xty.lpNorm<Eigen::Infinity>() <= config.lambda) {
        FitResult result;
        result.coefficients = VectorXd::Zero(data.p());
        result.lambda = config.lambda;
        result.iterations = 0;
        result.converged = true;
        result.objective = objective_value(data, result.coefficients, config.lambda);
        return result;
    }

    VectorXd beta0;
    SpdSolution init = solve_spd(ne.gram, ne.xty);
    if (init.jitter > 0.0) {
        MatrixXd ridge = ne.gram;
        ridge.diagonal().array() += ridge_fallback_delta(ne.gram);
        beta0 = solve_spd(ridge, ne.xty).z.col(0);
    } else {
        beta0 = init.z.col(0);
    }
    return run_lqa(data, ne, nullptr, config, std::move(beta0));
}

FitResult fit_restricted_lasso(const Dataset& data, const RestrictionSet& restrictions,
                               const FitConfig& config) {
    validate_dataset(data);
    validate_restrictions(restrictions, data.p());
    validate_config(config, data.p());
    const Normal ne = normal_equations(data);

    RestrictedSolve init =
        restricted_solve(ne.gram, ne.xty, restrictions.rmat, restrictions.rvec);
    if (init.jitter > 0.0) {
        MatrixXd ridge = ne.gram;
        ridge.diagonal().array() += ridge_fallback_delta(ne.gram);
        init = restricted_solve(ridge, ne.xty, restrictions.rmat, restrictions.rvec);
    }
    FitResult result = run_lqa(data, ne, &restrictions, config, std::move(init.beta));
    if (!result.multipliers) result.multipliers = std::move(init.multipliers);
    return result;
}

const char* to_string(Method method) {
    switch (method) {
        case Method::Ols: return "ols";
        case Method::RestrictedOls: return "rols";
        case Method::Lasso: return "lasso";
        case Method::RestrictedLasso: return "rlasso";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::Ols, Method::RestrictedOls, Method::Lasso, Method::RestrictedLasso}) {
        if (name == to_string(m)) return m;
    }
    return std::nullopt;
}

bool is_restricted(Method method) {
    return method == Method::RestrictedOls || method == Method::RestrictedLasso;
}

bool is_penalized(Method method) {
    return method == Method::Lasso || method == Method::RestrictedLasso;
}

FitResult fit(Method method, const Dataset& data, const RestrictionSet* restrictions,
              const FitConfig& config) {
    if (is_restricted(method) && !restrictions) {
        throw Error(ErrorKind::InvalidConfig,
                    std::string(to_string(method)) + " requires restrictions");
    }
    switch (method) {
        case Method::Ols: return fit_ols(data);
        case Method::RestrictedOls: return fit_restricted_ols(data, *restrictions);
        case Method::Lasso: return fit_lasso_lqa(data, config);
        case Method::RestrictedLasso: return fit_restricted_lasso(data, *restrictions, config);
    }
    throw Error(ErrorKind::InvalidConfig, "unknown method");
}

}  // namespace rlasso
