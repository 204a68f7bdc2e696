#pragma once

#include "rlasso/estimators.hpp"
#include "rlasso/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rlasso {

/// Parses comma-separated text with a header row. The target column becomes
/// y, the other columns become X in header order. With `intercept` a column of
/// ones named "b1_intercept" is prepended.
Dataset parse_csv(std::string_view text, const std::string& target_column, bool intercept);

Dataset load_csv(const std::string& path, const std::string& target_column, bool intercept);

enum class OutputFormat { Table, Json, Csv };

std::optional<OutputFormat> parse_output_format(std::string_view name);

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Six significant digits, trailing zeros trimmed: 0.0044651 -> "0.0044651".
std::string format_number(double value);

/// Aligned text, RFC 4180 CSV with header, or a JSON array with one object per
/// row keyed by column name.
std::string emit_table(const Table& table, OutputFormat format);

Table metrics_table(const std::vector<MetricsRow>& rows);

struct CliConfig {
    std::string command;  // fit, cv, simulate, example
    std::string data_path;
    std::string target_column = "y";
    Method method = Method::Ols;
    std::string restrictions_path;
    std::optional<double> lambda;
    bool cv = false;
    int cv_folds = 5;
    int grid_points = 50;
    CvRule cv_rule = CvRule::OneStandardError;
    std::string scenario = "normal";  // normal, t3, outlier-y, outlier-x
    std::vector<int> n_values{50, 100, 200};
    int reps = 200;
    std::uint64_t seed = 1;
    OutputFormat format = OutputFormat::Table;
    bool intercept = false;
    bool penalize_intercept = false;  // applies only when an intercept column is present
    std::string dump_estimates;
    unsigned threads = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Builds the scenario named on the command line: normal, t3, outlier-y or
/// outlier-x. Returns nullopt for an unknown name.
std::optional<SimScenario> named_scenario(std::string_view name, int n, int reps,
                                          std::uint64_t seed);

int cmd_fit(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_cv(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_example(const CliConfig& config, std::ostream& out, std::ostream& err);

int run_command(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace rlasso
