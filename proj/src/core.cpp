#include "rlasso/core.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace rlasso {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::NonFiniteEntry: return "non-finite-entry";
        case ErrorKind::DuplicateName: return "duplicate-name";
        case ErrorKind::RankDeficient: return "rank-deficient";
        case ErrorKind::ShapeMismatch: return "shape-mismatch";
        case ErrorKind::TooManyRows: return "too-many-rows";
        case ErrorKind::InvalidConfig: return "invalid-config";
        case ErrorKind::SingularMatrix: return "singular-matrix";
        case ErrorKind::DegenerateResponse: return "degenerate-response";
        case ErrorKind::KOutOfRange: return "k-out-of-range";
        case ErrorKind::FoldTooSmall: return "fold-too-small";
        case ErrorKind::SyntaxError: return "syntax-error";
        case ErrorKind::IndexOutOfRange: return "index-out-of-range";
        case ErrorKind::EmptyEquation: return "empty-equation";
        case ErrorKind::MissingTarget: return "missing-target";
        case ErrorKind::NonNumericCell: return "non-numeric-cell";
        case ErrorKind::EmptyFile: return "empty-file";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

bool RestrictionSet::involves(Eigen::Index j) const {
    return (rmat.col(j).array() != 0.0).any();
}

double RestrictionSet::residual_inf(const Eigen::VectorXd& beta) const {
    return (rmat * beta - rvec).lpNorm<Eigen::Infinity>();
}

void validate_dataset(const Dataset& data) {
    const auto n = data.n();
    const auto p = data.p();
    if (n < 1 || p < 1) {
        std::ostringstream os;
        os << "design is " << n << "x" << p << ", need at least 1x1";
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    if (data.y.size() != n) {
        std::ostringstream os;
        os << "y has " << data.y.size() << " entries but x has " << n << " rows";
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    if (static_cast<Eigen::Index>(data.names.size()) != p) {
        std::ostringstream os;
        os << data.names.size() << " column names for " << p << " columns";
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!std::isfinite(data.x(i, j))) {
                std::ostringstream os;
                os << "x at row " << i + 1 << ", column " << j + 1 << " (" << data.names[j]
                   << ")";
                throw Error(ErrorKind::NonFiniteEntry, os.str());
            }
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(data.y(i))) {
            std::ostringstream os;
            os << "y at row " << i + 1;
            throw Error(ErrorKind::NonFiniteEntry, os.str());
        }
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t j = 0; j < data.names.size(); ++j) {
        auto [it, inserted] = seen.emplace(data.names[j], j);
        if (!inserted) {
            std::ostringstream os;
            os << "column " << j + 1 << " repeats name '" << data.names[j] << "' of column "
               << it->second + 1;
            throw Error(ErrorKind::DuplicateName, os.str());
        }
    }
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    const double sigma_max = sv.size() ? sv(0) : 0.0;
    const double cutoff =
        static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max * 1e-12;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

void validate_restrictions(const RestrictionSet& restrictions, Eigen::Index p) {
    const auto m = restrictions.m();
    if (m < 1) throw Error(ErrorKind::ShapeMismatch, "restriction set has no rows");
    if (restrictions.rmat.cols() != p) {
        std::ostringstream os;
        os << "R has " << restrictions.rmat.cols() << " columns, expected " << p;
        throw Error(ErrorKind::ShapeMismatch, os.str());
    }
    if (restrictions.rvec.size() != m) {
        std::ostringstream os;
        os << "r has " << restrictions.rvec.size() << " entries, R has " << m << " rows";
        throw Error(ErrorKind::ShapeMismatch, os.str());
    }
    if (m > p) {
        std::ostringstream os;
        os << m << " restrictions on " << p << " coefficients";
        throw Error(ErrorKind::TooManyRows, os.str());
    }
    if (!restrictions.rmat.allFinite() || !restrictions.rvec.allFinite()) {
        throw Error(ErrorKind::NonFiniteEntry, "restriction entries must be finite");
    }
    const auto rank = numerical_rank(restrictions.rmat);
    if (rank < m) {
        std::ostringstream os;
        os << "R has rank " << rank << " but " << m << " rows";
        throw Error(ErrorKind::RankDeficient, os.str());
    }
}

void validate_config(const FitConfig& config, Eigen::Index p) {
    if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
        throw Error(ErrorKind::InvalidConfig, "lambda must be a finite value >= 0");
    }
    if (!(config.zero_eps > 0.0)) throw Error(ErrorKind::InvalidConfig, "zero_eps must be > 0");
    if (!(config.tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "tol must be > 0");
    if (config.max_iter < 1) throw Error(ErrorKind::InvalidConfig, "max_iter must be >= 1");
    if (!config.penalize_mask.empty() &&
        static_cast<Eigen::Index>(config.penalize_mask.size()) != p) {
        std::ostringstream os;
        os << "penalize_mask has " << config.penalize_mask.size() << " entries for " << p
           << " coefficients";
        throw Error(ErrorKind::InvalidConfig, os.str());
    }
}

}  // namespace rlasso
