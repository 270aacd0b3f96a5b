#pragma once

// End-to-end orchestration behind the `hpl` CLI: theory mode -> frames ->
// analysis -> report files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hpl/analysis.hpp"
#include "hpl/config.hpp"

namespace hpl::experiment {

namespace files {
inline constexpr const char* frames = "frames.hplf";
inline constexpr const char* frames_meta = "frames.meta";
inline constexpr const char* frames_csv = "frames.csv";
inline constexpr const char* report = "report.json";
inline constexpr const char* mode = "mode.csv";
inline constexpr const char* histogram = "histogram.csv";
inline constexpr const char* wigner = "wigner.csv";
inline constexpr const char* eigenvalues = "eigenvalues.csv";
inline constexpr const char* budget = "budget.csv";
}  // namespace files

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_frames;
};

config::RunConfig apply_overrides(config::RunConfig config, const Overrides& overrides);

// Files created through this object are deleted on destruction unless
// commit() was called, so a failed stage leaves no partial outputs.
class OutputTransaction {
public:
    explicit OutputTransaction(std::filesystem::path dir);
    ~OutputTransaction();
    OutputTransaction(const OutputTransaction&) = delete;
    OutputTransaction& operator=(const OutputTransaction&) = delete;

    /// Registers dir / name for cleanup and returns the full path.
    std::filesystem::path track(const std::string& name);
    void commit() noexcept { committed_ = true; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> created_;
    bool committed_ = false;
    bool created_dir_ = false;
};

struct SimulationSummary {
    std::size_t n_frames = 0;
    std::size_t true_heralds = 0;
    std::size_t dark_heralds = 0;
    std::size_t stray_heralds = 0;
};

/// Writes frames.hplf and the frames.meta sidecar (and frames.csv on request).
SimulationSummary simulate(const config::RunConfig& config, OutputTransaction& out, bool csv_export = false);

/// Analyzes a frame file and writes report.json, mode.csv, histogram.csv,
/// wigner.csv and eigenvalues.csv. Returns the report JSON text.
std::string analyze(const config::RunConfig& config, const std::filesystem::path& frames_path,
                    OutputTransaction& out);

/// Writes budget.csv and returns a human-readable summary of the loss budget
/// and, when report.json exists in the output directory, of the analysis.
std::string report(const config::RunConfig& config, OutputTransaction& out);

/// simulate + analyze + report into `out_dir`; partial outputs are removed
/// if any stage throws. Returns the summary text of the report stage.
std::string run_experiment(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                           const Overrides& overrides = {});

/// Builds the report document. `timestamp` is the only run-dependent field.
std::string build_report_json(const config::RunConfig& config, const analysis::PipelineResult& result,
                              const std::string& timestamp);

}  // namespace hpl::experiment
