#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svq/ingest.hpp"
#include "svq/report.hpp"
#include "svq/simulate.hpp"

namespace svq::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_parse_failure = 1;   // unusable input / validation failure
inline constexpr int exit_no_data = 2;         // nothing to score
inline constexpr int exit_invalid_params = 3;  // bad parameters or flags

struct ScoreArgs {
    std::string input_path;
    LogFormat format = LogFormat::RecordPerLine;
    ModelSelection models;
    double penalty_per_day = 1.0;
    CreditParams credit_params;
    UnservedPolicy policy;
    AlertThresholds thresholds;
    std::string out_path;     // empty: write to the provided stream
    std::string rejects_path; // empty: <input>.rejects, written only when needed
    std::size_t max_errors = 100;
};

struct CurvesArgs {
    std::string figure;            // fig1 | fig2 | fig3
    std::optional<double> max;     // tau_max / penalty_max / late_max
    std::optional<double> step;    // fig1 and fig2 grids
    std::vector<double> series;    // override series values
    double credit = 1.0;           // fig3 equal credit/penalty weight
    std::string out_path;
};

struct SimulateArgs {
    WorkloadSpec spec;
    LogFormat format = LogFormat::RecordPerLine;
    std::string out_path;   // empty: write to the provided stream
    std::string truth_path; // empty: no sidecar
};

struct ValidateArgs {
    std::string input_path;
    LogFormat format = LogFormat::RecordPerLine;
    std::string rejects_path;
    std::size_t max_errors = 100;
};

// Command cores. Each writes its primary output to `out` (or the --out path
// when set), diagnostics to `err`, and returns one of the exit codes above.
int score_command(const ScoreArgs& args, std::ostream& out, std::ostream& err);
int curves_command(const CurvesArgs& args, std::ostream& out, std::ostream& err);
int simulate_command(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int validate_command(const ValidateArgs& args, std::ostream& out, std::ostream& err);

/// Full argv interface: score | curves | simulate | validate.
int run(int argc, const char* const* argv);

} // namespace svq::cli
