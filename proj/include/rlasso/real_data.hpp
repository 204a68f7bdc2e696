#pragma once

#include "rlasso/core.hpp"

#include <string>

namespace rlasso::real_data {

/// Total national R&D expenditure as a percent of GNP, 10 years, US response
/// (Y) against France, West Germany, Japan and the Soviet Union (X1..X4).
/// Columns: Year, Y, X1, X2, X3, X4.
const std::string& rd_expenditure_csv();

/// The dataset above with an intercept column prepended: p = 5, columns
/// b1_intercept, X1, X2, X3, X4.
Dataset rd_expenditure();

/// b1 + b2 + b3 + b4 + b5 = 1.2170 and b2 + 3 b3 + b4 + 2 b5 = 1.0904.
RestrictionSet rd_restrictions();

/// Prior coefficient guess from which the restrictions were built. Reported
/// only; no estimator consumes it.
Eigen::VectorXd rd_prior();

}  // namespace rlasso::real_data
