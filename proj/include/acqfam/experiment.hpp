#pragma once

#include "acqfam/bo.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace acqfam {

inline constexpr std::string_view kVersion = "0.1.0";

// An acquisition as named on the command line and in filenames. `id` is
// filesystem-safe and unique per parameter quadruple; `label` is the
// human-facing name (EI, UEI, ...) when the cell collapses to a classic
// criterion, otherwise equal to the id.
struct AcquisitionSpec {
    std::string id;
    std::string label;
    FamilyParams params;
};

// Spec from raw parameters: id "u<u>_v<v>_w<w>_b<beta>", label inferred by
// argmax equivalence (a beta*VI^0 term or beta=0 only shifts the surface).
AcquisitionSpec make_acquisition_spec(const FamilyParams& params);

// Parse a preset name (EI, PEI, PI, SEI, VEI, UEI) or a "u,v,w,beta" tuple.
AcquisitionSpec acquisition_from_string(const std::string& text);

struct ExperimentSpec {
    std::vector<std::string> problems;
    std::vector<AcquisitionSpec> acquisitions;
    int repetitions = 100;
    int n_init = 10;
    int n_sequential = 490;
    std::uint64_t base_seed = 0;
    std::filesystem::path out_dir;
    int workers = 0;    // <= 0: one per available core
    bool resume = false; // reuse valid traces already present in out_dir
    bool verbose = false;
    OptimizerControls optimizer;
    int fit_multistarts = 8;
    int refit_every = 1;
};

struct SummaryRow {
    std::string problem;
    std::string acquisition; // AcquisitionSpec::id
    int repetitions = 0;     // successful runs contributing statistics
    int failures = 0;
    double average_final = 0.0;
    double sd_final = 0.0; // sample standard deviation; 0 when repetitions < 2
    double best_final = 0.0;
    double worst_final = 0.0;
};

struct ExperimentResult {
    std::vector<SummaryRow> summary;
    std::vector<std::filesystem::path> trace_files;
};

// Run the full (problem x acquisition x repetition) grid on a bounded
// worker pool and write per-run traces, per-pair aggregate traces,
// summary.csv, and metadata.json into spec.out_dir. Output bytes are
// independent of the worker count. Failed runs leave a .failed.txt marker
// and are excluded from statistics.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// The three parameter-sweep grids; see sweep_family.
std::vector<AcquisitionSpec> sweep_cells(int group);

// Populate spec.acquisitions with the group's cells, record the cell table
// in cells.csv, and delegate to run_experiment.
ExperimentResult sweep_family(int group, ExperimentSpec spec);

struct SummarizeResult {
    std::vector<SummaryRow> rows;
    std::string rank_report;
};

// Recompute summary statistics from the traces on disk; bit-identical to
// the summary run_experiment wrote for the same directory. Malformed trace
// files are rejected with a file:line diagnostic.
SummarizeResult summarize(const std::filesystem::path& dir);

std::string render_summary_csv(const std::vector<SummaryRow>& rows);

// "%.17g": shortest text that round-trips IEEE doubles exactly.
std::string format_float(double value);

// Parse one per-run trace CSV (header iter,x1..xd,y,best); throws
// std::runtime_error mentioning file and line on any malformation.
RunTrace load_trace_csv(const std::filesystem::path& path, int dimension);

} // namespace acqfam
