#pragma once

// Reference computations for tests. Each one deliberately takes a different
// route from the library: explicit inverses by Gauss-Jordan elimination,
// null-space reparameterization for equality constraints, coordinate-wise
// grid search and coordinate descent for the l1 problem.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

namespace oracle {

inline Eigen::MatrixXd gauss_jordan_inverse(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (a(pivot, col) == 0.0) throw std::runtime_error("singular");
        a.row(col).swap(a.row(pivot));
        inv.row(col).swap(inv.row(pivot));
        const double d = a(col, col);
        a.row(col) /= d;
        inv.row(col) /= d;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            a.row(r) -= f * a.row(col);
            inv.row(r) -= f * inv.row(col);
        }
    }
    return inv;
}

/// Minimizes |y - X b|^2 + b' diag(d) b subject to R b = r by writing
/// b = b0 + N z with N an orthonormal basis of null(R) from the full SVD.
inline Eigen::VectorXd nullspace_constrained_ls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                const Eigen::MatrixXd& rmat,
                                                const Eigen::VectorXd& rvec,
                                                const Eigen::VectorXd& d) {
    const Eigen::Index p = x.cols();
    const Eigen::Index m = rmat.rows();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd b0 = svd.solve(rvec);
    const Eigen::MatrixXd basis = svd.matrixV().rightCols(p - m);
    if (basis.cols() == 0) return b0;
    const Eigen::MatrixXd xn = x * basis;
    const Eigen::MatrixXd h = xn.transpose() * xn + basis.transpose() * d.asDiagonal() * basis;
    const Eigen::VectorXd g =
        xn.transpose() * (y - x * b0) - basis.transpose() * (d.asDiagonal() * b0);
    return b0 + basis * (gauss_jordan_inverse(h) * g);
}

inline Eigen::VectorXd nullspace_constrained_ls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                const Eigen::MatrixXd& rmat,
                                                const Eigen::VectorXd& rvec) {
    return nullspace_constrained_ls(x, y, rmat, rvec, Eigen::VectorXd::Zero(x.cols()));
}

inline Eigen::VectorXd normal_equations_inverse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    return gauss_jordan_inverse(x.transpose() * x) * (x.transpose() * y);
}

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// argmin_b (b - z)^2 + lambda |b| by scanning a fine grid then refining.
inline double grid_minimize_1d(double z, double lambda) {
    auto f = [&](double b) { return (b - z) * (b - z) + lambda * std::abs(b); };
    const double span = std::abs(z) + 1.0;
    double best = 0.0;
    double best_val = f(0.0);
    double lo = -span, hi = span;
    for (int round = 0; round < 6; ++round) {
        const int steps = 2000;
        const double h = (hi - lo) / steps;
        for (int i = 0; i <= steps; ++i) {
            const double b = lo + i * h;
            if (f(b) < best_val) {
                best_val = f(b);
                best = b;
            }
        }
        lo = best - 2 * h;
        hi = best + 2 * h;
    }
    return best;
}

/// Cyclic coordinate descent for |y - X b|^2 + lambda |b|_1.
inline Eigen::VectorXd lasso_coordinate_descent(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                double lambda, int sweeps = 20000,
                                                double tol = 1e-14) {
    const Eigen::Index p = x.cols();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = y;
    for (int s = 0; s < sweeps; ++s) {
        double change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double norm2 = x.col(j).squaredNorm();
            const double rho = x.col(j).dot(resid) + norm2 * b(j);
            const double next = soft_threshold(rho, lambda / 2.0) / norm2;
            const double delta = next - b(j);
            if (delta != 0.0) {
                resid -= delta * x.col(j);
                b(j) = next;
                change = std::max(change, std::abs(delta));
            }
        }
        if (change < tol) break;
    }
    return b;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
    return random_matrix(rng, n, 1).col(0);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

}  // namespace oracle
