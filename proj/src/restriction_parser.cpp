#include "rlasso/restriction_parser.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rlasso {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RestrictionAst equation() {
        RestrictionAst ast;
        expression(ast.lhs_terms, ast.lhs_constant);
        skip_space();
        if (!consume('=')) fail("expected '='");
        expression(ast.rhs_terms, ast.rhs_constant);
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return ast;
    }

private:
    void expression(std::vector<LinearTerm>& terms, double& constant) {
        skip_space();
        double sign = 1.0;
        if (consume('+')) {
        } else if (consume('-')) {
            sign = -1.0;
        }
        term(sign, terms, constant);
        for (;;) {
            skip_space();
            if (consume('+')) {
                sign = 1.0;
            } else if (consume('-')) {
                sign = -1.0;
            } else {
                return;
            }
            term(sign, terms, constant);
        }
    }

    void term(double sign, std::vector<LinearTerm>& terms, double& constant) {
        skip_space();
        if (at_number()) {
            const double value = number();
            skip_space();
            const bool star = consume('*');
            skip_space();
            if (peek() == 'b') {
                terms.push_back({sign * value, variable()});
            } else if (star) {
                fail("expected a variable after '*'");
            } else {
                constant += sign * value;
            }
            return;
        }
        if (peek() == 'b') {
            terms.push_back({sign, variable()});
            return;
        }
        fail("expected a number or a variable");
    }

    int variable() {
        ++pos_;  // 'b'
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ == start) fail("expected an index after 'b'", start);
        int index = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, index);
        if (ec != std::errc{}) fail("variable index is too large", start);
        return index;
    }

    bool at_number() const {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }

    double number() {
        double value = 0.0;
        const char* first = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
        if (ec != std::errc{}) fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return value;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& message) const { fail(message, pos_); }

    [[noreturn]] void fail(const std::string& message, std::size_t at) const {
        std::ostringstream os;
        os << message << " at column " << at + 1;
        throw Error(ErrorKind::SyntaxError, os.str());
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string_view strip(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

RestrictionAst parse_restriction_ast(std::string_view line) {
    return Parser(line).equation();
}

RestrictionRow parse_restriction(std::string_view line, Eigen::Index p) {
    if (p < 1) throw Error(ErrorKind::InvalidConfig, "p must be >= 1");
    const RestrictionAst ast = parse_restriction_ast(line);
    if (ast.lhs_terms.empty() && ast.rhs_terms.empty()) {
        throw Error(ErrorKind::EmptyEquation, "equation has no variable term");
    }
    RestrictionRow out{Eigen::VectorXd::Zero(p), ast.rhs_constant - ast.lhs_constant};
    auto add = [&](const LinearTerm& t, double sign) {
        if (t.var_index < 1 || t.var_index > p) {
            std::ostringstream os;
            os << "b" << t.var_index << " is outside b1..b" << p;
            throw Error(ErrorKind::IndexOutOfRange, os.str());
        }
        out.row(t.var_index - 1) += sign * t.coefficient;
    };
    for (const auto& t : ast.lhs_terms) add(t, 1.0);
    for (const auto& t : ast.rhs_terms) add(t, -1.0);
    return out;
}

RestrictionSet parse_restriction_file(std::string_view text, Eigen::Index p) {
    std::vector<RestrictionRow> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        line = strip(line);
        if (line.empty() || line.front() == '#') continue;
        try {
            rows.push_back(parse_restriction(line, p));
        } catch (const Error& e) {
            std::ostringstream os;
            os << "line " << line_no << ": " << e.what();
            throw Error(e.kind(), os.str());
        }
    }
    if (rows.empty()) {
        throw Error(ErrorKind::EmptyEquation, "restriction file contains no equations");
    }
    RestrictionSet set;
    set.rmat.resize(static_cast<Eigen::Index>(rows.size()), p);
    set.rvec.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        set.rmat.row(static_cast<Eigen::Index>(i)) = rows[i].row.transpose();
        set.rvec(static_cast<Eigen::Index>(i)) = rows[i].rhs;
    }
    validate_restrictions(set, p);
    return set;
}

RestrictionSet load_restriction_file(const std::string& path, Eigen::Index p) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open restriction file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_restriction_file(buffer.str(), p);
}

std::string render_restrictions(const RestrictionSet& restrictions) {
    // Shortest text that parses back to the same double.
    auto fmt = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::ostringstream os;
    for (Eigen::Index i = 0; i < restrictions.m(); ++i) {
        bool first = true;
        for (Eigen::Index j = 0; j < restrictions.rmat.cols(); ++j) {
            const double c = restrictions.rmat(i, j);
            if (c == 0.0) continue;
            if (first) {
                if (c < 0.0) os << "-";
            } else {
                os << (c < 0.0 ? " - " : " + ");
            }
            os << fmt(std::abs(c)) << " b" << j + 1;
            first = false;
        }
        // A zero row cannot be written as an equation; render it as 0 b1 so
        // reparsing reports it rather than silently dropping it.
        if (first) os << "0 b1";
        os << " = " << fmt(restrictions.rvec(i)) << "\n";
    }
    return os.str();
}

}  // namespace rlasso
