#pragma once

#include "rlasso/core.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rlasso {

/// One side of an equation: variable terms plus an accumulated constant.
struct LinearTerm {
    double coefficient = 0.0;
    int var_index = 0;  // 1-based
};

struct RestrictionAst {
    std::vector<LinearTerm> lhs_terms;
    double lhs_constant = 0.0;
    std::vector<LinearTerm> rhs_terms;
    double rhs_constant = 0.0;
};

struct RestrictionRow {
    Eigen::VectorXd row;
    double rhs = 0.0;
};

/// Parses text such as "b3 + 2 b4 + b5 = 10" into its syntax tree.
///
/// Grammar (whitespace-insensitive):
///   equation := expr '=' expr
///   expr     := ['+'|'-'] term (('+'|'-') term)*
///   term     := number | [number ['*']] var
///   var      := 'b' integer
/// Syntax errors report the 1-based column.
RestrictionAst parse_restriction_ast(std::string_view line);

/// Canonical form of one equation: variables on the left, constants on the
/// right, repeated variables accumulated.
RestrictionRow parse_restriction(std::string_view line, Eigen::Index p);

/// One equation per non-empty line; lines starting with '#' are comments.
/// The stacked result is validated (full row rank, m <= p).
RestrictionSet parse_restriction_file(std::string_view text, Eigen::Index p);

RestrictionSet load_restriction_file(const std::string& path, Eigen::Index p);

/// Renders (R, r) back to parseable text, one equation per line, using
/// round-trip precision for coefficients.
std::string render_restrictions(const RestrictionSet& restrictions);

}  // namespace rlasso
