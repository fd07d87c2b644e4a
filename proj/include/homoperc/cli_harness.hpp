#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "homoperc/percolation_engine.hpp"

namespace homoperc {

enum class Mode { betti, trial, sweep, threshold, audit };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitAuditFailure = 3;

struct ExperimentConfig {
    ModelKind model = ModelKind::cubical;
    int d = 2;
    int i = 1;
    int N = 8;
    std::uint32_t q = 0;  // 0: smallest admissible prime, preferring 3
    Mode mode = Mode::threshold;
    std::vector<double> p_grid{0.5};
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    std::size_t budget = 10'000'000;
    std::string output;        // empty or "-": stdout
    std::string format = "csv";  // csv | json
    bool emit_svg = false;
    std::string svg_path;      // default: output with .svg suffix
    unsigned threads = 1;
    CriticalMethod method = CriticalMethod::automatic;
    bool timing = false;
    bool audit_probes = true;  // threshold mode: duality audit at each p

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// q itself if set, else 3 when admissible, else the smallest admissible prime.
std::uint32_t effective_field(const ExperimentConfig& c);

/// Every violated constraint, as readable messages. Never throws.
std::vector<std::string> validate(const ExperimentConfig& c);

/// One row per (trial, p) for trial/audit/sweep, per trial for threshold.
struct ResultRow {
    std::uint64_t trial = 0;
    std::optional<double> p;
    std::optional<std::size_t> rank_phi;
    std::optional<std::size_t> rank_psi;
    std::optional<bool> event_A;
    std::optional<bool> event_S;
    std::optional<double> p_star_A;
    std::optional<double> p_star_S;
    std::optional<double> ms;
};

struct RunResult {
    int exit_code = kExitOk;
    std::vector<std::string> errors;
    std::vector<ResultRow> rows;
    std::vector<std::size_t> betti;  // betti mode only
};

/// Runs the configured experiment in memory.
RunResult execute(const ExperimentConfig& c);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

std::string csv_header();
/// RFC-4180 quoted CSV of the rows, header first. Betti mode uses k,betti.
std::string to_csv(const ExperimentConfig& c, const RunResult& r);
std::string to_json(const ExperimentConfig& c, const RunResult& r);
/// Median, quantiles and event frequencies for the JSON report.
std::string summary_json(const ExperimentConfig& c, const RunResult& r);

std::string config_to_json(const ExperimentConfig& c);
/// Reads either a bare config object or a full report's "config" member.
ExperimentConfig config_from_json(const std::string& text);

/// Empirical CDF of the given values as a standalone SVG document.
std::string render_cdf_svg(std::vector<double> values, const std::string& title);

/// Validates, executes and writes the requested files. Messages go to err.
int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err);

}  // namespace homoperc
