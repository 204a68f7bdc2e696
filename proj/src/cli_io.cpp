#include "rlasso/cli_io.hpp"

#include "rlasso/lambda_selection.hpp"
#include "rlasso/real_data.hpp"
#include "rlasso/restriction_parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rlasso {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.emplace_back(trim(field));
    return fields;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string cell_text(const Cell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
    return std::to_string(std::get<long long>(cell));
}

json cell_json(const Cell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d)) return nullptr;
        return std::strtod(format_number(*d).c_str(), nullptr);
    }
    return std::get<long long>(cell);
}

json table_json(const Table& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            obj[table.columns[c]] = cell_json(row[c]);
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

std::string selected_label(const std::vector<Eigen::Index>& selected, Eigen::Index first) {
    std::string out = "(";
    bool any = false;
    for (Eigen::Index j : selected) {
        if (j < first) continue;
        if (any) out += ",";
        out += std::to_string(j - first + 1);
        any = true;
    }
    return out + ")";
}

int report_error(const Error& e, const std::string& stage, std::ostream& err) {
    err << "error while " << stage << ": " << e.what() << "\n";
    return e.numerical() ? kExitNumerical : kExitInput;
}

std::vector<bool> penalty_mask(const CliConfig& config, Eigen::Index p) {
    std::vector<bool> mask(static_cast<std::size_t>(p), true);
    if (config.intercept && !config.penalize_intercept) mask[0] = false;
    return mask;
}

double restriction_residual(const RestrictionSet* restrictions, const Eigen::VectorXd& beta) {
    return restrictions ? restrictions->residual_inf(beta) : 0.0;
}

}  // namespace

Dataset parse_csv(std::string_view text, const std::string& target_column, bool intercept) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (trim(line).empty()) continue;
        lines.emplace_back(line_no, line);
    }
    if (lines.empty()) throw Error(ErrorKind::EmptyFile, "no header row");

    std::vector<std::string> header = split_record(lines.front().second);
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    const auto target_it = std::find(header.begin(), header.end(), target_column);
    if (target_it == header.end()) {
        throw Error(ErrorKind::MissingTarget, "header has no column '" + target_column + "'");
    }
    const auto target = static_cast<std::size_t>(target_it - header.begin());
    if (lines.size() < 2) throw Error(ErrorKind::EmptyFile, "header row but no data rows");

    const auto n = static_cast<Eigen::Index>(lines.size() - 1);
    const auto offset = intercept ? Eigen::Index{1} : Eigen::Index{0};
    const auto p = static_cast<Eigen::Index>(header.size()) - 1 + offset;

    Dataset data;
    data.x.resize(n, p);
    data.y.resize(n);
    if (intercept) {
        data.names.push_back("b1_intercept");
        data.x.col(0).setOnes();
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != target) data.names.push_back(header[c]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& [file_line, line] = lines[static_cast<std::size_t>(i) + 1];
        const auto fields = split_record(line);
        if (fields.size() != header.size()) {
            std::ostringstream os;
            os << "line " << file_line << " has " << fields.size() << " fields, header has "
               << header.size();
            throw Error(ErrorKind::DimensionMismatch, os.str());
        }
        Eigen::Index col = offset;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto value = parse_double(fields[c]);
            if (!value) {
                std::ostringstream os;
                os << "'" << fields[c] << "' at line " << file_line << ", column " << c + 1
                   << " (" << header[c] << ")";
                throw Error(ErrorKind::NonNumericCell, os.str());
            }
            if (c == target) {
                data.y(i) = *value;
            } else {
                data.x(i, col++) = *value;
            }
        }
    }
    validate_dataset(data);
    return data;
}

Dataset load_csv(const std::string& path, const std::string& target_column, bool intercept) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), target_column, intercept);
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
    if (name == "table") return OutputFormat::Table;
    if (name == "json") return OutputFormat::Json;
    if (name == "csv") return OutputFormat::Csv;
    return std::nullopt;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string emit_table(const Table& table, OutputFormat format) {
    std::ostringstream os;
    switch (format) {
        case OutputFormat::Csv: {
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                os << (c ? "," : "") << csv_escape(table.columns[c]);
            }
            os << "\n";
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    os << (c ? "," : "") << csv_escape(cell_text(row[c]));
                }
                os << "\n";
            }
            break;
        }
        case OutputFormat::Json: {
            os << table_json(table).dump(2) << "\n";
            break;
        }
        case OutputFormat::Table: {
            std::vector<std::size_t> width(table.columns.size());
            for (std::size_t c = 0; c < table.columns.size(); ++c) width[c] = table.columns[c].size();
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    width[c] = std::max(width[c], cell_text(row[c]).size());
                }
            }
            auto pad = [&](const std::string& s, std::size_t w, bool right) {
                const std::string fill(w - s.size(), ' ');
                return right ? fill + s : s + fill;
            };
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                const bool right = !table.rows.empty() &&
                                   !std::holds_alternative<std::string>(table.rows[0][c]);
                os << (c ? "  " : "") << pad(table.columns[c], width[c], right);
            }
            os << "\n";
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    const bool right = !std::holds_alternative<std::string>(row[c]);
                    os << (c ? "  " : "") << pad(cell_text(row[c]), width[c], right);
                }
                os << "\n";
            }
            break;
        }
    }
    return os.str();
}

Table metrics_table(const std::vector<MetricsRow>& rows) {
    Table t;
    t.columns = {"method",          "n",           "correctly_fitted_rate", "avg_correct_zeros",
                 "avg_incorrect_zeros", "mean_mse", "median_mse"};
    for (const auto& r : rows) {
        t.rows.push_back({r.method, static_cast<long long>(r.n), r.correctly_fitted_rate,
                          r.avg_correct_zeros, r.avg_incorrect_zeros, r.mean_mse, r.median_mse});
    }
    return t;
}

std::optional<SimScenario> named_scenario(std::string_view name, int n, int reps,
                                          std::uint64_t seed) {
    SimScenario s;
    if (name == "normal") {
    } else if (name == "t3") {
        s.error_dist = ErrorDist::T3;
    } else if (name == "outlier-y") {
        s.contamination = Contamination::YDirection;
    } else if (name == "outlier-x") {
        s.contamination = Contamination::XDirection;
    } else {
        return std::nullopt;
    }
    s.n = n;
    s.n_reps = reps;
    s.seed = seed;
    return s;
}

int cmd_fit(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::string stage = "checking options";
    try {
        if (config.lambda && config.cv) {
            throw Error(ErrorKind::InvalidConfig, "--lambda and --cv are mutually exclusive");
        }
        if (config.data_path.empty()) throw Error(ErrorKind::InvalidConfig, "--data is required");
        if (is_restricted(config.method) && config.restrictions_path.empty()) {
            throw Error(ErrorKind::InvalidConfig,
                        std::string(to_string(config.method)) + " requires --restrictions");
        }

        stage = "loading data";
        const Dataset data = load_csv(config.data_path, config.target_column, config.intercept);

        std::optional<RestrictionSet> restrictions;
        if (is_restricted(config.method)) {
            stage = "reading restrictions";
            restrictions = load_restriction_file(config.restrictions_path, data.p());
        } else if (!config.restrictions_path.empty()) {
            err << "warning: --restrictions is ignored for method " << to_string(config.method)
                << "\n";
        }
        const RestrictionSet* restr = restrictions ? &*restrictions : nullptr;

        FitConfig fit_config;
        fit_config.penalize_mask = penalty_mask(config, data.p());
        std::optional<CvReport> cv;
        if (is_penalized(config.method)) {
            if (config.lambda) {
                fit_config.lambda = *config.lambda;
            } else {
                stage = "cross-validating lambda";
                const LambdaGrid grid = lambda_grid(data, config.grid_points);
                cv = cross_validate(data, config.method, restr, grid, config.cv_folds, config.seed,
                                    fit_config, config.cv_rule);
                fit_config.lambda = cv->best_lambda;
            }
        } else if (config.lambda || config.cv) {
            err << "warning: lambda selection is ignored for method " << to_string(config.method)
                << "\n";
        }

        stage = "fitting";
        const FitResult result = fit(config.method, data, restr, fit_config);

        Table coefs;
        coefs.columns = {"index", "name", "estimate", "selected"};
        for (Eigen::Index j = 0; j < data.p(); ++j) {
            const bool sel = std::find(result.selected.begin(), result.selected.end(), j) !=
                             result.selected.end();
            coefs.rows.push_back({static_cast<long long>(j + 1), data.names[j],
                                  result.coefficients(j), std::string(sel ? "yes" : "no")});
        }
        Table summary;
        summary.columns = {"field", "value"};
        summary.rows.push_back({std::string("method"), std::string(to_string(config.method))});
        summary.rows.push_back({std::string("lambda"), result.lambda});
        summary.rows.push_back({std::string("lambda_source"),
                                std::string(!is_penalized(config.method) ? "none"
                                            : cv                         ? "cv"
                                                                         : "fixed")});
        summary.rows.push_back(
            {std::string("iterations"), static_cast<long long>(result.iterations)});
        summary.rows.push_back(
            {std::string("converged"), std::string(result.converged ? "true" : "false")});
        summary.rows.push_back({std::string("objective"), result.objective});
        summary.rows.push_back({std::string("selected"),
                                selected_label(result.selected, 0)});
        if (restr) {
            summary.rows.push_back({std::string("restriction_residual"),
                                    restriction_residual(restr, result.coefficients)});
        }

        if (config.format == OutputFormat::Json) {
            json doc = json::object();
            doc["method"] = to_string(config.method);
            doc["lambda"] = cell_json(result.lambda);
            doc["iterations"] = result.iterations;
            doc["converged"] = result.converged;
            doc["objective"] = cell_json(result.objective);
            json sel = json::array();
            for (auto j : result.selected) sel.push_back(j + 1);
            doc["selected"] = sel;
            if (restr) {
                doc["restriction_residual"] =
                    cell_json(restriction_residual(restr, result.coefficients));
            }
            if (result.multipliers) {
                json mu = json::array();
                for (double v : *result.multipliers) mu.push_back(cell_json(v));
                doc["multipliers"] = mu;
            }
            doc["coefficients"] = table_json(coefs);
            out << doc.dump(2) << "\n";
        } else {
            out << emit_table(summary, config.format);
            out << "\n" << emit_table(coefs, config.format);
        }
        if (!result.forced_nonzero.empty()) {
            err << "note: restrictions kept coefficients "
                << selected_label(result.forced_nonzero, 0)
                << " nonzero although the penalty drove them below zero_eps\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, stage, err);
    }
}

int cmd_cv(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::string stage = "checking options";
    try {
        if (!is_penalized(config.method)) {
            throw Error(ErrorKind::InvalidConfig, "cv needs --method lasso or rlasso");
        }
        if (config.data_path.empty()) throw Error(ErrorKind::InvalidConfig, "--data is required");
        stage = "loading data";
        const Dataset data = load_csv(config.data_path, config.target_column, config.intercept);
        std::optional<RestrictionSet> restrictions;
        if (is_restricted(config.method)) {
            if (config.restrictions_path.empty()) {
                throw Error(ErrorKind::InvalidConfig, "rlasso requires --restrictions");
            }
            stage = "reading restrictions";
            restrictions = load_restriction_file(config.restrictions_path, data.p());
        }
        FitConfig fit_config;
        fit_config.penalize_mask = penalty_mask(config, data.p());
        stage = "cross-validating lambda";
        const LambdaGrid grid = lambda_grid(data, config.grid_points);
        const CvReport report =
            cross_validate(data, config.method, restrictions ? &*restrictions : nullptr, grid,
                           config.cv_folds, config.seed, fit_config, config.cv_rule);
        Table curve;
        curve.columns = {"lambda", "mean_error", "std_error"};
        for (const auto& pt : report.curve) curve.rows.push_back({pt.lambda, pt.mean_error, pt.std_error});
        if (config.format == OutputFormat::Json) {
            json doc = json::object();
            doc["best_lambda"] = cell_json(report.best_lambda);
            doc["rule"] = to_string(report.rule);
            doc["lambda_min"] = cell_json(report.lambda_min);
            doc["lambda_1se"] = cell_json(report.lambda_1se);
            doc["folds"] = report.folds;
            doc["seed"] = report.seed;
            doc["curve"] = table_json(curve);
            out << doc.dump(2) << "\n";
        } else {
            if (config.format == OutputFormat::Table) {
                out << "best_lambda  " << format_number(report.best_lambda) << " (rule "
                    << to_string(report.rule) << ")\n"
                    << "lambda_min   " << format_number(report.lambda_min) << "\n"
                    << "lambda_1se   " << format_number(report.lambda_1se) << "\n\n";
            }
            out << emit_table(curve, config.format);
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, stage, err);
    }
}

int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::string stage = "checking options";
    try {
        if (config.n_values.empty()) throw Error(ErrorKind::InvalidConfig, "--n needs a value");
        std::vector<MetricsRow> rows;
        Table dump;
        std::size_t p = 0;
        for (int n : config.n_values) {
            auto scenario = named_scenario(config.scenario, n, config.reps, config.seed);
            if (!scenario) {
                throw Error(ErrorKind::InvalidConfig,
                            "unknown scenario '" + config.scenario +
                                "' (expected normal, t3, outlier-y or outlier-x)");
            }
            scenario->cv_folds = config.cv_folds;
            scenario->cv_rule = config.cv_rule;
            scenario->grid_points = config.grid_points;
            stage = "simulating n = " + std::to_string(n);
            const ExperimentResult result = run_experiment(*scenario, config.threads);
            for (const auto& row : result.rows) {
                if (row.failures > 0) {
                    err << "warning: " << row.method << " failed in " << row.failures
                        << " replications at n = " << n << "\n";
                }
            }
            rows.insert(rows.end(), result.rows.begin(), result.rows.end());
            if (!config.dump_estimates.empty()) {
                p = static_cast<std::size_t>(scenario->beta_true.size());
                for (const auto& rep : result.replications) {
                    for (const auto& m : rep.methods) {
                        std::vector<Cell> line{static_cast<long long>(n),
                                               static_cast<long long>(rep.rep_index + 1),
                                               std::string(display_name(m.method)),
                                               m.lambda ? Cell{*m.lambda} : Cell{std::string()}};
                        for (std::size_t j = 0; j < p; ++j) {
                            line.emplace_back(m.ok ? Cell{m.coefficients(static_cast<Eigen::Index>(j))}
                                                   : Cell{std::string()});
                        }
                        dump.rows.push_back(std::move(line));
                    }
                }
            }
        }
        out << emit_table(metrics_table(rows), config.format);
        if (!config.dump_estimates.empty()) {
            stage = "writing estimates";
            dump.columns = {"n", "rep", "method", "lambda"};
            for (std::size_t j = 0; j < p; ++j) dump.columns.push_back("b" + std::to_string(j + 1));
            std::ofstream file(config.dump_estimates, std::ios::binary);
            if (!file) throw Error(ErrorKind::Io, "cannot write '" + config.dump_estimates + "'");
            file << emit_table(dump, OutputFormat::Csv);
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, stage, err);
    }
}

int cmd_example(const CliConfig& config, std::ostream& out, std::ostream& err) {
    std::string stage = "building the embedded dataset";
    try {
        const Dataset data = real_data::rd_expenditure();
        const RestrictionSet restrictions = real_data::rd_restrictions();
        FitConfig base;
        base.penalize_mask = std::vector<bool>(static_cast<std::size_t>(data.p()), true);
        if (!config.penalize_intercept) base.penalize_mask[0] = false;

        Table coefs;
        coefs.columns = {"method", "lambda"};
        for (const auto& name : data.names) coefs.columns.push_back(name);
        coefs.columns.push_back("restriction_residual");
        coefs.columns.push_back("loo_mse");
        Table selection;
        selection.columns = {"method", "selected_variables"};

        for (Method method : kBenchmarkMethods) {
            const RestrictionSet* restr = is_restricted(method) ? &restrictions : nullptr;
            FitConfig cfg = base;
            if (is_penalized(method)) {
                stage = std::string("cross-validating ") + display_name(method);
                const LambdaGrid grid = lambda_grid(data, config.grid_points);
                cfg.lambda = cross_validate(data, method, restr, grid, config.cv_folds,
                                            config.seed, cfg, config.cv_rule)
                                 .best_lambda;
            }
            stage = std::string("fitting ") + display_name(method);
            const FitResult result = fit(method, data, restr, cfg);

            // Leave-one-out prediction error at the chosen lambda.
            double loo = 0.0;
            for (Eigen::Index i = 0; i < data.n(); ++i) {
                std::vector<Eigen::Index> keep;
                for (Eigen::Index r = 0; r < data.n(); ++r) {
                    if (r != i) keep.push_back(r);
                }
                Dataset train{data.x(keep, Eigen::all), data.y(keep), data.names};
                const FitResult held = fit(method, train, restr, cfg);
                const double e = data.y(i) - data.x.row(i).dot(held.coefficients);
                loo += e * e;
            }
            loo /= static_cast<double>(data.n());

            std::vector<Cell> row{std::string(display_name(method)),
                                  is_penalized(method) ? Cell{cfg.lambda} : Cell{std::string("-")}};
            for (Eigen::Index j = 0; j < data.p(); ++j) row.emplace_back(result.coefficients(j));
            row.emplace_back(restriction_residual(&restrictions, result.coefficients));
            row.emplace_back(loo);
            coefs.rows.push_back(std::move(row));
            selection.rows.push_back(
                {std::string(display_name(method)), selected_label(result.selected, 1)});
        }

        stage = "tracing the LASSO path";
        Table path;
        path.columns = {"lambda", "selected_variables"};
        bool contains_1_3 = false;
        for (double lambda : lambda_grid(data, config.grid_points).values) {
            FitConfig cfg = base;
            cfg.lambda = lambda;
            const FitResult result = fit_lasso_lqa(data, cfg);
            const std::string label = selected_label(result.selected, 1);
            contains_1_3 = contains_1_3 || label == "(1,3)";
            path.rows.push_back({lambda, label});
        }

        Table prior;
        prior.columns = {"name", "prior"};
        const Eigen::VectorXd beta0 = real_data::rd_prior();
        for (Eigen::Index j = 0; j < data.p(); ++j) prior.rows.push_back({data.names[j], beta0(j)});

        if (config.format == OutputFormat::Json) {
            json doc = json::object();
            doc["n"] = data.n();
            doc["p"] = data.p();
            doc["restrictions"] = render_restrictions(restrictions);
            doc["seed"] = config.seed;
            doc["coefficients"] = table_json(coefs);
            doc["selected_variables"] = table_json(selection);
            doc["lasso_path"] = table_json(path);
            doc["lasso_path_contains_1_3"] = contains_1_3;
            doc["prior"] = table_json(prior);
            out << doc.dump(2) << "\n";
        } else {
            const OutputFormat fmt = config.format;
            out << "# R&D expenditure data: n = " << data.n() << ", p = " << data.p()
                << " (intercept + X1..X4), cv seed " << config.seed << "\n";
            out << "# restrictions\n" << render_restrictions(restrictions) << "\n";
            out << "# coefficients\n" << emit_table(coefs, fmt) << "\n";
            out << "# selected variables\n" << emit_table(selection, fmt) << "\n";
            out << "# LASSO path\n" << emit_table(path, fmt) << "\n";
            out << "# LASSO path contains (1,3): " << (contains_1_3 ? "yes" : "no") << "\n\n";
            out << "# prior guess (reference only, not used in estimation)\n"
                << emit_table(prior, fmt);
        }
        return kExitOk;
    } catch (const Error& e) {
        return report_error(e, stage, err);
    }
}

int run_command(const CliConfig& config, std::ostream& out, std::ostream& err) {
    if (config.command == "fit") return cmd_fit(config, out, err);
    if (config.command == "cv") return cmd_cv(config, out, err);
    if (config.command == "simulate") return cmd_simulate(config, out, err);
    if (config.command == "example") return cmd_example(config, out, err);
    err << "unknown command '" << config.command << "'\n";
    return kExitInput;
}

}  // namespace rlasso
