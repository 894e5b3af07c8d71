#include "svq/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "svq/errors.hpp"

namespace svq::cli {

namespace {

// Routes command output to --out when set, otherwise to the caller's stream.
class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            use_file_ = true;
        }
    }

    bool ok() const { return !use_file_ || file_.is_open(); }
    std::ostream& stream() { return use_file_ ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
    bool use_file_ = false;
};

int write_parse_diagnostics(const ParseResult& parsed, const std::string& input_path,
                            std::ostream& err) {
    for (const auto& e : parsed.errors) {
        err << input_path << ":" << e.line;
        if (!e.field.empty()) err << ": field " << e.field;
        err << ": " << e.message << '\n';
    }
    if (parsed.truncated) {
        err << input_path << ": too many parse errors, giving up\n";
        return exit_parse_failure;
    }
    return exit_ok;
}

bool dump_rejects(const ParseResult& parsed, const std::string& rejects_path,
                  const std::string& input_path, LogFormat format, std::ostream& err) {
    if (parsed.rejected.empty()) return true;
    const std::string path = rejects_path.empty() ? input_path + ".rejects" : rejects_path;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "cannot open reject file " << path << '\n';
        return false;
    }
    write_rejects(out, parsed.rejected, format);
    err << parsed.rejected.size() << " record(s) failed validation; quarantined to " << path
        << '\n';
    return true;
}

} // namespace

int score_command(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (!args.models.delay && !args.models.credit) {
            throw InvalidParams("at least one model must be selected");
        }
        // Surface parameter problems before touching the input.
        delay_quality(DelayParams{args.penalty_per_day, 0.0});
        credit_extrema(args.credit_params);

        std::ifstream in(args.input_path, std::ios::binary);
        if (!in) {
            err << "cannot open " << args.input_path << '\n';
            return exit_parse_failure;
        }
        const ParseResult parsed = parse_log(in, ParseOptions{args.format, args.max_errors});
        const int parse_status = write_parse_diagnostics(parsed, args.input_path, err);
        if (parse_status != exit_ok) return parse_status;
        if (!parsed.errors.empty() && parsed.window.records.empty() && parsed.rejected.empty()) {
            err << args.input_path << ": no row survived parsing\n";
            return exit_parse_failure;
        }
        if (!dump_rejects(parsed, args.rejects_path, args.input_path, args.format, err)) {
            return exit_parse_failure;
        }

        const ScoreConfig config{
            .models = args.models,
            .penalty_per_day = args.penalty_per_day,
            .credit_params = args.credit_params,
            .policy = args.policy,
            .thresholds = args.thresholds,
        };
        const ClassifiedWindow classified = classify_window(parsed.window, args.policy);
        for (const auto& rec : classified.unclassifiable) {
            err << args.input_path << ": record " << rec.record.request_id
                << " not classifiable: " << rec.reason << '\n';
        }
        if (classified.counts.total() == 0) {
            err << "no scorable requests\n";
            return exit_no_data;
        }

        const ParseStats stats{
            .records_parsed = static_cast<std::int64_t>(parsed.rows_seen),
            .records_rejected = static_cast<std::int64_t>(parsed.rejected.size()),
        };
        const QualityReport report =
            build_report(classified, parsed.window.start, parsed.window.end, stats, config);

        OutputTarget target(args.out_path, out);
        if (!target.ok()) {
            err << "cannot open " << args.out_path << '\n';
            return exit_parse_failure;
        }
        write_report_json(target.stream(), report);
        return exit_ok;
    } catch (const InvalidParams& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return exit_invalid_params;
    } catch (const NoScorableData& e) {
        err << e.what() << '\n';
        return exit_no_data;
    } catch (const ParseFailure& e) {
        err << "parse failure: " << e.what() << '\n';
        return exit_parse_failure;
    }
}

int curves_command(const CurvesArgs& args, std::ostream& out, std::ostream& err) {
    try {
        CurveTable table;
        if (args.figure == "fig1") {
            const std::vector<double> penalties =
                args.series.empty() ? std::vector<double>{1.0, 2.0} : args.series;
            table = curve_quality_vs_delay(penalties, args.max.value_or(10.0),
                                           args.step.value_or(0.1));
        } else if (args.figure == "fig2") {
            const std::vector<double> delays =
                args.series.empty() ? std::vector<double>{1.0, 2.0} : args.series;
            table = curve_quality_vs_penalty(delays, args.max.value_or(5.0),
                                             args.step.value_or(0.05));
        } else if (args.figure == "fig3") {
            std::vector<std::int64_t> on_time = {10, 20};
            if (!args.series.empty()) {
                on_time.clear();
                for (double v : args.series) {
                    if (!(v >= 1.0) || v != std::floor(v)) {
                        throw InvalidParams("fig3 series values must be positive integers");
                    }
                    on_time.push_back(static_cast<std::int64_t>(v));
                }
            }
            const double late_max_raw = args.max.value_or(40.0);
            if (!(late_max_raw >= 0.0) || late_max_raw != std::floor(late_max_raw)) {
                throw InvalidParams("fig3 max must be a non-negative integer");
            }
            table = curve_quality_vs_late(on_time, static_cast<std::int64_t>(late_max_raw),
                                          args.credit);
        } else {
            throw InvalidParams("unknown figure: " + args.figure);
        }

        OutputTarget target(args.out_path, out);
        if (!target.ok()) {
            err << "cannot open " << args.out_path << '\n';
            return exit_parse_failure;
        }
        write_curve(target.stream(), table);
        return exit_ok;
    } catch (const InvalidParams& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return exit_invalid_params;
    }
}

int simulate_command(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const GeneratedWorkload workload = generate(args.spec);
        OutputTarget target(args.out_path, out);
        if (!target.ok()) {
            err << "cannot open " << args.out_path << '\n';
            return exit_parse_failure;
        }
        write_log(target.stream(), workload.window.records, args.format);
        if (!args.truth_path.empty()) {
            std::ofstream truth(args.truth_path, std::ios::binary);
            if (!truth) {
                err << "cannot open " << args.truth_path << '\n';
                return exit_parse_failure;
            }
            write_ground_truth(truth, workload);
        }
        return exit_ok;
    } catch (const InvalidParams& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return exit_invalid_params;
    }
}

int validate_command(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    std::ifstream in(args.input_path, std::ios::binary);
    if (!in) {
        err << "cannot open " << args.input_path << '\n';
        return exit_parse_failure;
    }
    ParseResult parsed;
    try {
        parsed = parse_log(in, ParseOptions{args.format, args.max_errors});
    } catch (const ParseFailure& e) {
        err << "parse failure: " << e.what() << '\n';
        return exit_parse_failure;
    }
    const int parse_status = write_parse_diagnostics(parsed, args.input_path, err);
    for (const auto& reject : parsed.rejected) {
        out << args.input_path << ":" << reject.line << ": record "
            << reject.record.request_id << " invalid:";
        for (const auto& v : reject.violations) out << ' ' << to_string(v.code);
        out << '\n';
    }
    if (!args.rejects_path.empty() && !parsed.rejected.empty()) {
        std::ofstream rejects(args.rejects_path, std::ios::binary);
        if (!rejects) {
            err << "cannot open " << args.rejects_path << '\n';
            return exit_parse_failure;
        }
        write_rejects(rejects, parsed.rejected, args.format);
    }
    out << parsed.window.records.size() << " valid, " << parsed.rejected.size()
        << " rejected, " << parsed.errors.size() << " malformed\n";
    if (parse_status != exit_ok || !parsed.rejected.empty() || !parsed.errors.empty()) {
        return exit_parse_failure;
    }
    return exit_ok;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::optional<Day> parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(text.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    return days_from_civil(y, m, d);
}

std::optional<std::vector<std::pair<ContentType, double>>> parse_type_weights(
    const std::string& text) {
    std::vector<std::pair<ContentType, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const auto type = parse_content_type(item.substr(0, eq));
        if (!type) return std::nullopt;
        try {
            out.emplace_back(*type, std::stod(item.substr(eq + 1)));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return out;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"service-profile quality analytics"};
    app.require_subcommand(1);

    // ---- score ----
    ScoreArgs score;
    std::string score_model = "both";
    std::string score_policy = "horizon:90";
    std::string score_format = "records";
    bool include_rejected_timeline = false;
    auto* score_cmd = app.add_subcommand("score", "score a request log under the quality models");
    score_cmd->add_option("input", score.input_path, "log file to score")->required();
    score_cmd->add_option("--model", score_model, "delay | credit | both")
        ->check(CLI::IsMember({"delay", "credit", "both"}));
    score_cmd->add_option("--penalty-per-day", score.penalty_per_day,
                          "delay model: penalty points per day");
    score_cmd->add_option("--credit", score.credit_params.credit_per_on_time,
                          "credit model: credits per on-time request");
    score_cmd->add_option("--penalty", score.credit_params.penalty_per_late,
                          "credit model: penalty points per late request");
    score_cmd->add_option("--unserved-policy", score_policy, "exclude | late | horizon:<days>");
    score_cmd->add_flag("--include-rejected-timeline", include_rejected_timeline,
                        "score requests whose procurement timeline the user rejected");
    score_cmd->add_option("--threshold", score.thresholds.credit_phi,
                          "alert when credit quality falls below this");
    score_cmd->add_option("--format", score_format, "rows | records")
        ->check(CLI::IsMember({"rows", "records"}));
    score_cmd->add_option("--out", score.out_path, "report path (default: stdout)");
    score_cmd->add_option("--rejects", score.rejects_path,
                          "reject file path (default: <input>.rejects)");
    score_cmd->add_option("--max-errors", score.max_errors, "parse error cap");

    // ---- curves ----
    CurvesArgs curves;
    std::string curves_series;
    double curves_max = 0.0, curves_step = 0.0;
    auto* curves_cmd = app.add_subcommand("curves", "emit model curve data");
    curves_cmd->add_option("figure", curves.figure, "fig1 | fig2 | fig3")->required();
    auto* max_opt = curves_cmd->add_option("--max", curves_max, "grid upper bound");
    auto* step_opt = curves_cmd->add_option("--step", curves_step, "grid step (fig1, fig2)");
    curves_cmd->add_option("--series", curves_series,
                           "comma-separated series values (p, tau, or H)");
    curves_cmd->add_option("--credit", curves.credit, "fig3 equal credit/penalty weight");
    curves_cmd->add_option("--out", curves.out_path, "output path (default: stdout)");

    // ---- simulate ----
    SimulateArgs sim;
    std::string sim_tau = "fixed:1";
    std::string sim_start = "2025-01-01";
    std::string sim_format = "records";
    std::string sim_weights;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic request log");
    sim_cmd->add_option("--seed", sim.spec.seed, "generator seed");
    sim_cmd->add_option("--n", sim.spec.n_requests, "number of requests")->required();
    sim_cmd->add_option("--availability-prob", sim.spec.availability_prob,
                        "chance content is available");
    sim_cmd->add_option("--late-prob", sim.spec.late_prob_given_available,
                        "chance a delivered request is late");
    sim_cmd->add_option("--unserved-prob", sim.spec.unserved_prob,
                        "chance a request is never served");
    sim_cmd->add_option("--tau-dist", sim_tau, "geometric:<mean> | fixed:<days>");
    sim_cmd->add_option("--window-start", sim_start, "first request day (YYYY-MM-DD)");
    sim_cmd->add_option("--window-days", sim.spec.window_days, "window length in days");
    sim_cmd->add_option("--type-weights", sim_weights,
                        "content type weights, e.g. Ebook=3,Video=1");
    sim_cmd->add_option("--format", sim_format, "rows | records")
        ->check(CLI::IsMember({"rows", "records"}));
    sim_cmd->add_option("--out", sim.out_path, "log path (default: stdout)");
    sim_cmd->add_option("--truth-out", sim.truth_path, "ground-truth sidecar path");

    // ---- validate ----
    ValidateArgs validate;
    std::string validate_format = "records";
    auto* validate_cmd = app.add_subcommand("validate", "check a log without scoring it");
    validate_cmd->add_option("input", validate.input_path, "log file to check")->required();
    validate_cmd->add_option("--format", validate_format, "rows | records")
        ->check(CLI::IsMember({"rows", "records"}));
    validate_cmd->add_option("--rejects", validate.rejects_path, "reject file path");
    validate_cmd->add_option("--max-errors", validate.max_errors, "parse error cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid_params;
    }

    if (score_cmd->parsed()) {
        score.models.delay = score_model != "credit";
        score.models.credit = score_model != "delay";
        const auto policy = UnservedPolicy::parse(score_policy);
        if (!policy) {
            std::cerr << "invalid parameters: bad --unserved-policy " << score_policy << '\n';
            return exit_invalid_params;
        }
        score.policy = *policy;
        score.policy.include_rejected_timeline = include_rejected_timeline;
        score.format = *parse_log_format(score_format);
        return score_command(score, std::cout, std::cerr);
    }
    if (curves_cmd->parsed()) {
        if (max_opt->count() > 0) curves.max = curves_max;
        if (step_opt->count() > 0) curves.step = curves_step;
        if (!curves_series.empty()) {
            try {
                curves.series = parse_double_list(curves_series);
            } catch (const std::exception&) {
                std::cerr << "invalid parameters: bad --series " << curves_series << '\n';
                return exit_invalid_params;
            }
        }
        return curves_command(curves, std::cout, std::cerr);
    }
    if (sim_cmd->parsed()) {
        const auto tau = TauDistribution::parse(sim_tau);
        if (!tau) {
            std::cerr << "invalid parameters: bad --tau-dist " << sim_tau << '\n';
            return exit_invalid_params;
        }
        sim.spec.tau_distribution = *tau;
        const auto start = parse_date(sim_start);
        if (!start) {
            std::cerr << "invalid parameters: bad --window-start " << sim_start << '\n';
            return exit_invalid_params;
        }
        sim.spec.window_start_day = *start;
        if (!sim_weights.empty()) {
            const auto weights = parse_type_weights(sim_weights);
            if (!weights) {
                std::cerr << "invalid parameters: bad --type-weights " << sim_weights << '\n';
                return exit_invalid_params;
            }
            sim.spec.content_type_weights = *weights;
        }
        sim.format = *parse_log_format(sim_format);
        return simulate_command(sim, std::cout, std::cerr);
    }
    validate.format = *parse_log_format(validate_format);
    return validate_command(validate, std::cout, std::cerr);
}

} // namespace svq::cli
