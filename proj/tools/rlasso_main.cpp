#include "rlasso/cli_io.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace rlasso;

    CLI::App app{"Restricted LASSO: estimation and variable selection under R b = r"};
    app.require_subcommand(1);

    CliConfig config;
    std::string method = "ols";
    std::string format = "table";
    std::string cv_rule = "1se";
    bool no_penalize_intercept = false;
    bool penalize_intercept = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", config.seed, "Seed for fold shuffles and simulation");
        sub->add_option("--format", format, "Output format: table, json or csv");
        sub->add_option("--folds", config.cv_folds, "Cross-validation folds")->check(CLI::PositiveNumber);
        sub->add_option("--cv-rule", cv_rule,
                        "Lambda choice from the CV curve: 1se (default) or min")
            ->check(CLI::IsMember({"1se", "min"}));
    };
    auto add_intercept_penalty = [&](CLI::App* sub) {
        auto* on = sub->add_flag("--penalize-intercept", penalize_intercept,
                                 "Include the intercept in the l1 penalty");
        auto* off = sub->add_flag("--no-penalize-intercept", no_penalize_intercept,
                                  "Leave the intercept out of the l1 penalty (default)");
        on->excludes(off);
    };
    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--data", config.data_path, "CSV file with a header row")->required();
        sub->add_option("--target", config.target_column, "Response column name");
        sub->add_option("--method", method, "ols, rols, lasso or rlasso");
        sub->add_option("--restrictions", config.restrictions_path,
                        "Restriction file, one equation per line (b1..bp)");
        sub->add_flag("--intercept", config.intercept, "Prepend a column of ones");
        add_intercept_penalty(sub);
    };

    auto* fit = app.add_subcommand("fit", "Fit one estimator");
    add_data(fit);
    add_common(fit);
    fit->add_option("--lambda", config.lambda, "Fixed regularization parameter")
        ->check(CLI::NonNegativeNumber);
    fit->add_flag("--cv", config.cv, "Choose lambda by cross-validation (default)");

    auto* cv = app.add_subcommand("cv", "Cross-validation curve for lasso or rlasso");
    add_data(cv);
    add_common(cv);

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo comparison of the four methods");
    add_common(simulate);
    simulate->add_option("--scenario", config.scenario, "normal, t3, outlier-y or outlier-x");
    simulate->add_option("--n", config.n_values, "Sample sizes")->expected(1, -1);
    simulate->add_option("--reps", config.reps, "Replications per sample size")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--threads", config.threads, "Worker threads (0 = all cores)");
    simulate->add_option("--dump-estimates", config.dump_estimates,
                         "Write per-replication coefficients to this CSV file");

    auto* example = app.add_subcommand("example", "Embedded R&D expenditure example");
    add_common(example);
    add_intercept_penalty(example);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    config.command = app.get_subcommands().front()->get_name();
    if (auto m = parse_method(method)) {
        config.method = *m;
    } else {
        std::cerr << "error: unknown method '" << method << "'\n";
        return kExitInput;
    }
    if (auto f = parse_output_format(format)) {
        config.format = *f;
    } else {
        std::cerr << "error: unknown format '" << format << "'\n";
        return kExitInput;
    }
    config.cv_rule = parse_cv_rule(cv_rule);
    config.penalize_intercept = penalize_intercept;
    return run_command(config, std::cout, std::cerr);
}
