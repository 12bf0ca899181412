#include "acqfam/experiment.hpp"

#include "acqfam/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace acqfam {
namespace fs = std::filesystem;

namespace {

std::string format_compact(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", value);
    return buf;
}

// Argmax-equivalent classic name, or "" when the cell has no classic
// equivalent. A beta term with v = 0 (or beta = 0) adds a constant, so such
// cells select the same points as their beta-free reduction.
std::string classic_label(const FamilyParams& p) {
    const bool constant_beta_term = p.beta == 0.0 || p.v == 0.0;
    if (constant_beta_term) {
        if (p.u == 0.0) {
            if (p.w == 0) return "PI";
            if (p.w == 1) return "EI";
            if (p.w == 2) return "PEI";
        }
        if (p.u == 0.5 && p.w == 1) return "SEI";
    } else if (p.u == 0.0 && p.w == 1) {
        if (p.beta < 0.0 && p.v == 1.0) return "VEI";
        if (p.beta > 0.0 && p.v == 0.5) return "UEI";
    }
    return "";
}

std::string trace_header(int dimension) {
    std::string header = "iter";
    for (int k = 1; k <= dimension; ++k) header += ",x" + std::to_string(k);
    header += ",y,best";
    return header;
}

std::string render_trace_csv(const RunTrace& trace, int dimension) {
    std::string out = trace_header(dimension) + "\n";
    for (const auto& rec : trace.records) {
        out += std::to_string(rec.iteration);
        for (int k = 0; k < dimension; ++k) out += "," + format_float(rec.input[k]);
        out += "," + format_float(rec.output);
        out += "," + format_float(rec.best_so_far);
        out += "\n";
    }
    return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.good()) throw std::runtime_error("failed to write " + path.string());
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& text, const fs::path& path, int line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed number '" + text + "'");
    return value;
}

int parse_int(const std::string& text, const fs::path& path, int line_no) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed integer '" + text + "'");
    return value;
}

std::string rep_tag(int rep, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rep%0*d", width, rep);
    return buf;
}

int rep_width(int repetitions) {
    return std::max(3, static_cast<int>(std::to_string(repetitions).size()));
}

struct Task {
    std::string problem;
    AcquisitionSpec acq;
    int rep = 0; // 1-based, as in the filename and the seed hash
};

struct TaskOutcome {
    bool ok = false;
    RunTrace trace;
    std::string error;
};

struct FinalStats {
    int count = 0;
    double average = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::quiet_NaN();
    double worst = std::numeric_limits<double>::quiet_NaN();
};

// Mean/SD/min/max in first-to-last order so every caller that holds the
// same finals in the same order reproduces identical doubles.
FinalStats compute_stats(const std::vector<double>& finals) {
    FinalStats s;
    s.count = static_cast<int>(finals.size());
    if (finals.empty()) return s;
    double sum = 0.0;
    for (double v : finals) sum += v;
    s.average = sum / s.count;
    double ss = 0.0;
    for (double v : finals) ss += (v - s.average) * (v - s.average);
    s.sd = s.count > 1 ? std::sqrt(ss / (s.count - 1)) : 0.0;
    s.best = *std::min_element(finals.begin(), finals.end());
    s.worst = *std::max_element(finals.begin(), finals.end());
    return s;
}

SummaryRow make_row(std::string problem, std::string acq_id,
                    const std::vector<double>& finals, int failures) {
    const FinalStats st = compute_stats(finals);
    SummaryRow row;
    row.problem = std::move(problem);
    row.acquisition = std::move(acq_id);
    row.repetitions = st.count;
    row.failures = failures;
    row.average_final = st.average;
    row.sd_final = st.sd;
    row.best_final = st.best;
    row.worst_final = st.worst;
    return row;
}

void sort_rows(std::vector<SummaryRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
        if (a.problem != b.problem) return a.problem < b.problem;
        return a.acquisition < b.acquisition;
    });
}

std::string render_rank_report(const std::vector<SummaryRow>& rows) {
    std::string out = "Rank report (lower is better in every category)\n";
    for (std::size_t i = 0; i < rows.size();) {
        const std::string& problem = rows[i].problem;
        std::vector<const SummaryRow*> group;
        for (; i < rows.size() && rows[i].problem == problem; ++i)
            if (rows[i].repetitions > 0) group.push_back(&rows[i]);
        out += "== " + problem + " ==\n";
        if (group.empty()) {
            out += "  no completed runs\n";
            continue;
        }
        std::vector<const SummaryRow*> by_avg = group;
        std::sort(by_avg.begin(), by_avg.end(), [](const SummaryRow* a, const SummaryRow* b) {
            if (a->average_final != b->average_final) return a->average_final < b->average_final;
            return a->acquisition < b->acquisition;
        });
        out += "  by average_final:";
        for (const auto* row : by_avg) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " %s (%.6g)", row->acquisition.c_str(),
                          row->average_final);
            out += buf;
        }
        out += "\n";
        const auto best_by = [&](auto stat, const char* name) {
            const SummaryRow* best = group.front();
            for (const auto* row : group)
                if (stat(*row) < stat(*best) ||
                    (stat(*row) == stat(*best) && row->acquisition < best->acquisition))
                    best = row;
            char buf[96];
            std::snprintf(buf, sizeof buf, "  best %s: %s (%.6g)\n", name,
                          best->acquisition.c_str(), stat(*best));
            out += buf;
        };
        best_by([](const SummaryRow& r) { return r.average_final; }, "average_final");
        best_by([](const SummaryRow& r) { return r.sd_final; }, "sd_final");
        best_by([](const SummaryRow& r) { return r.best_final; }, "best_final");
        best_by([](const SummaryRow& r) { return r.worst_final; }, "worst_final");
    }
    return out;
}

nlohmann::json acquisition_json(const AcquisitionSpec& acq) {
    return {{"id", acq.id},
            {"label", acq.label},
            {"u", acq.params.u},
            {"v", acq.params.v},
            {"w", acq.params.w},
            {"beta", acq.params.beta}};
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.problems.empty()) throw std::invalid_argument("experiment: no problems given");
    std::set<std::string> seen_problems;
    for (const auto& name : spec.problems) {
        problem_by_name(name); // throws on unknown
        if (!seen_problems.insert(name).second)
            throw std::invalid_argument("experiment: duplicate problem " + name);
    }
    if (spec.acquisitions.empty())
        throw std::invalid_argument("experiment: no acquisitions given");
    std::set<std::string> seen_ids;
    for (const auto& acq : spec.acquisitions) {
        acq.params.validate();
        // ids name the trace files; duplicates would silently share them
        if (!seen_ids.insert(acq.id).second)
            throw std::invalid_argument("experiment: duplicate acquisition " + acq.id);
    }
    if (spec.repetitions < 1)
        throw std::invalid_argument("experiment: repetitions must be >= 1");
    if (spec.n_init < 2) throw std::invalid_argument("experiment: n_init must be >= 2");
    if (spec.n_sequential < 0)
        throw std::invalid_argument("experiment: n_sequential must be >= 0");
    if (spec.out_dir.empty()) throw std::invalid_argument("experiment: output directory required");
}

} // namespace

std::string format_float(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

AcquisitionSpec make_acquisition_spec(const FamilyParams& params) {
    params.validate();
    AcquisitionSpec spec;
    spec.params = params;
    spec.id = "u" + format_compact(params.u) + "_v" + format_compact(params.v) + "_w" +
              std::to_string(params.w) + "_b" + format_compact(params.beta);
    const std::string classic = classic_label(params);
    spec.label = classic.empty() ? spec.id : classic;
    return spec;
}

AcquisitionSpec acquisition_from_string(const std::string& text) {
    for (const auto& [name, params] : named_presets())
        if (name == text) return {name, name, params};
    const auto parts = split(text, ',');
    if (parts.size() != 4)
        throw std::invalid_argument("acquisition '" + text +
                                    "': expected a preset name or u,v,w,beta");
    const auto number = [&](const std::string& piece) {
        double value = 0.0;
        const auto res = std::from_chars(piece.data(), piece.data() + piece.size(), value);
        if (res.ec != std::errc() || res.ptr != piece.data() + piece.size())
            throw std::invalid_argument("acquisition '" + text + "': malformed number '" +
                                        piece + "'");
        return value;
    };
    FamilyParams params;
    params.u = number(parts[0]);
    params.v = number(parts[1]);
    const double w_raw = number(parts[2]);
    params.w = static_cast<int>(w_raw);
    if (params.w != w_raw)
        throw std::invalid_argument("acquisition '" + text + "': w must be an integer");
    params.beta = number(parts[3]);
    return make_acquisition_spec(params);
}

RunTrace load_trace_csv(const fs::path& path, int dimension) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ":1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trace_header(dimension))
        throw std::runtime_error(path.string() + ":1: unexpected header '" + line + "'");

    RunTrace trace;
    int line_no = 1;
    double best = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split(line, ',');
        if (static_cast<int>(parts.size()) != dimension + 3)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(dimension + 3) +
                                     " columns, found " + std::to_string(parts.size()));
        TraceRecord rec;
        rec.iteration = parse_int(parts[0], path, line_no);
        if (rec.iteration != static_cast<int>(trace.records.size()) + 1)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": iteration out of sequence");
        rec.input.resize(dimension);
        for (int k = 0; k < dimension; ++k)
            rec.input[k] = parse_double(parts[static_cast<std::size_t>(k) + 1], path, line_no);
        rec.output = parse_double(parts[static_cast<std::size_t>(dimension) + 1], path, line_no);
        rec.best_so_far = parse_double(parts[static_cast<std::size_t>(dimension) + 2], path, line_no);
        best = std::min(best, rec.output);
        if (rec.best_so_far != best)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": best-so-far column is not the running minimum");
        trace.records.push_back(std::move(rec));
    }
    if (trace.records.empty())
        throw std::runtime_error(path.string() + ": no records");
    trace.final_solution = trace.records.back().best_so_far;
    return trace;
}

std::string render_summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "problem,acquisition,repetitions,failures,average_final,sd_final,best_final,worst_final\n";
    for (const auto& row : rows) {
        out += row.problem + "," + row.acquisition + "," + std::to_string(row.repetitions) +
               "," + std::to_string(row.failures) + "," + format_float(row.average_final) +
               "," + format_float(row.sd_final) + "," + format_float(row.best_final) + "," +
               format_float(row.worst_final) + "\n";
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    validate_spec(spec);
    fs::create_directories(spec.out_dir);
    const auto t_start = std::chrono::steady_clock::now();

    const int width = rep_width(spec.repetitions);
    std::vector<Task> tasks;
    for (const auto& problem : spec.problems)
        for (const auto& acq : spec.acquisitions)
            for (int rep = 1; rep <= spec.repetitions; ++rep)
                tasks.push_back({problem, acq, rep});

    const int budget = spec.n_init + spec.n_sequential;
    std::vector<TaskOutcome> outcomes(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    const auto base_name = [&](const Task& task) {
        return task.problem + "__" + task.acq.id + "__" + rep_tag(task.rep, width);
    };

    const auto execute = [&](const Task& task) {
        TaskOutcome outcome;
        const fs::path trace_path = spec.out_dir / (base_name(task) + ".csv");
        const fs::path failed_path = spec.out_dir / (base_name(task) + ".failed.txt");
        const int dim = problem_by_name(task.problem).dimension;

        if (spec.resume && fs::exists(trace_path)) {
            try {
                RunTrace loaded = load_trace_csv(trace_path, dim);
                if (static_cast<int>(loaded.records.size()) == budget) {
                    outcome.ok = true;
                    outcome.trace = std::move(loaded);
                }
            } catch (const std::exception&) {
                // fall through: invalid partial file, redo the run
            }
        }
        if (!outcome.ok) {
            RunConfig config;
            config.problem = problem_by_name(task.problem);
            config.params = task.acq.params;
            config.n_init = spec.n_init;
            config.n_sequential = spec.n_sequential;
            config.seed = derive_seed(spec.base_seed, task.problem, task.acq.id,
                                      static_cast<std::uint64_t>(task.rep));
            config.optimizer = spec.optimizer;
            config.fit_multistarts = spec.fit_multistarts;
            config.refit_every = spec.refit_every;
            try {
                outcome.trace = run_bo(config);
                outcome.ok = true;
                write_text_file(trace_path, render_trace_csv(outcome.trace, dim));
            } catch (const std::exception& e) {
                outcome.error = e.what();
                std::error_code ec;
                fs::remove(trace_path, ec); // drop stale bytes from older contents
                write_text_file(failed_path, std::string(e.what()) + "\n");
            }
        }
        if (outcome.ok) {
            std::error_code ec;
            fs::remove(failed_path, ec);
        }
        if (spec.verbose) {
            const std::scoped_lock lock(log_mutex);
            if (outcome.ok)
                std::fprintf(stderr, "%s done (final=%.6g)\n", base_name(task).c_str(),
                             outcome.trace.final_solution);
            else
                std::fprintf(stderr, "%s FAILED: %s\n", base_name(task).c_str(),
                             outcome.error.c_str());
        }
        return outcome;
    };

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t workers =
        std::min(tasks.size(),
                 static_cast<std::size_t>(spec.workers > 0 ? spec.workers : hw));
    std::vector<std::thread> pool;
    const auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            outcomes[i] = execute(tasks[i]);
        }
    };
    for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(drain);
    drain();
    for (auto& thread : pool) thread.join();

    // statistics, aggregates, and files, all in deterministic task order
    ExperimentResult result;
    nlohmann::json failures = nlohmann::json::array();
    std::size_t idx = 0;
    for (const auto& problem : spec.problems) {
        for (const auto& acq : spec.acquisitions) {
            std::vector<double> finals;
            std::vector<const TaskOutcome*> ok_runs;
            std::vector<int> ok_reps;
            int failed = 0;
            for (int rep = 1; rep <= spec.repetitions; ++rep, ++idx) {
                const TaskOutcome& outcome = outcomes[idx];
                if (outcome.ok) {
                    finals.push_back(outcome.trace.final_solution);
                    ok_runs.push_back(&outcome);
                    ok_reps.push_back(rep);
                    result.trace_files.push_back(
                        spec.out_dir / (base_name(tasks[idx]) + ".csv"));
                } else {
                    ++failed;
                    failures.push_back({{"run", base_name(tasks[idx])},
                                        {"error", outcome.error}});
                }
            }
            result.summary.push_back(make_row(problem, acq.id, finals, failed));

            if (!ok_runs.empty()) {
                std::string agg = "iter,mean_best";
                for (int rep : ok_reps) agg += "," + rep_tag(rep, width);
                agg += "\n";
                for (int row = 0; row < budget; ++row) {
                    double sum = 0.0;
                    for (const auto* run : ok_runs)
                        sum += run->trace.records[static_cast<std::size_t>(row)].best_so_far;
                    agg += std::to_string(row + 1) + "," +
                           format_float(sum / static_cast<double>(ok_runs.size()));
                    for (const auto* run : ok_runs)
                        agg += "," + format_float(
                                         run->trace.records[static_cast<std::size_t>(row)].best_so_far);
                    agg += "\n";
                }
                write_text_file(spec.out_dir / (problem + "__" + acq.id + "__agg.csv"), agg);
            }
        }
    }
    sort_rows(result.summary);
    write_text_file(spec.out_dir / "summary.csv", render_summary_csv(result.summary));

    nlohmann::json acqs = nlohmann::json::array();
    for (const auto& acq : spec.acquisitions) acqs.push_back(acquisition_json(acq));
    const nlohmann::json metadata = {
        {"version", std::string(kVersion)},
        {"spec",
         {{"problems", spec.problems},
          {"acquisitions", acqs},
          {"repetitions", spec.repetitions},
          {"n_init", spec.n_init},
          {"n_sequential", spec.n_sequential},
          {"base_seed", spec.base_seed},
          {"optimizer",
           {{"pool_per_dim", spec.optimizer.pool_per_dim},
            {"refine_starts", spec.optimizer.refine_starts},
            {"refine_steps", spec.optimizer.refine_steps}}},
          {"fit_multistarts", spec.fit_multistarts},
          {"refit_every", spec.refit_every}}},
        {"workers_used", workers},
        {"failures", failures},
        {"wall_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()}};
    write_text_file(spec.out_dir / "metadata.json", metadata.dump(2) + "\n");
    return result;
}

std::vector<AcquisitionSpec> sweep_cells(int group) {
    std::vector<AcquisitionSpec> cells;
    if (group == 1) {
        for (int w : {0, 1, 2, 3}) cells.push_back(make_acquisition_spec({0.0, 0.0, w, 0.0}));
    } else if (group == 2) {
        for (double beta : {-0.5, 0.0, 2.0})
            for (double v : {0.0, 0.5, 1.0})
                cells.push_back(make_acquisition_spec({0.0, v, 1, beta}));
    } else if (group == 3) {
        for (double u : {0.0, 0.5, 1.0})
            for (double v : {0.0, 0.5, 1.0})
                cells.push_back(make_acquisition_spec({u, v, 1, 2.0}));
    } else {
        throw std::invalid_argument("sweep group must be 1, 2, or 3");
    }
    return cells;
}

ExperimentResult sweep_family(int group, ExperimentSpec spec) {
    spec.acquisitions = sweep_cells(group);
    fs::create_directories(spec.out_dir);
    std::string cells = "group,id,label,u,v,w,beta\n";
    for (const auto& acq : spec.acquisitions) {
        cells += std::to_string(group) + "," + acq.id + "," + acq.label + "," +
                 format_compact(acq.params.u) + "," + format_compact(acq.params.v) + "," +
                 std::to_string(acq.params.w) + "," + format_compact(acq.params.beta) + "\n";
    }
    write_text_file(spec.out_dir / "cells.csv", cells);
    return run_experiment(spec);
}

SummarizeResult summarize(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir.string() + ": not a directory");

    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    // key = (problem, acquisition id), in sorted filename order
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, int>> groups;
    for (const auto& name : names) {
        const bool is_trace = name.ends_with(".csv");
        const bool is_failed = name.ends_with(".failed.txt");
        if (!is_trace && !is_failed) continue;
        // pattern: problem __ id __ rep<k>.<ext>; the id itself may contain
        // single underscores, so split on the literal "__" pairs.
        const std::size_t first = name.find("__");
        if (first == std::string::npos) continue;
        const std::size_t second = name.find("__", first + 2);
        if (second == std::string::npos) continue;
        const std::string problem = name.substr(0, first);
        const std::string acq_id = name.substr(first + 2, second - first - 2);
        const std::string tail = name.substr(second + 2);
        if (!tail.starts_with("rep")) continue; // aggregate files and friends
        const std::string digits =
            tail.substr(3, tail.size() - 3 - (is_trace ? 4 : 11));
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos)
            continue;

        auto& group = groups[{problem, acq_id}];
        if (is_failed) {
            ++group.second;
            continue;
        }
        const TestProblem& problem_def = problem_by_name(problem);
        const RunTrace trace = load_trace_csv(dir / name, problem_def.dimension);
        group.first.push_back(trace.final_solution);
    }
    if (groups.empty())
        throw std::runtime_error(dir.string() + ": no run traces found");

    SummarizeResult result;
    for (const auto& [key, group] : groups)
        result.rows.push_back(make_row(key.first, key.second, group.first, group.second));
    sort_rows(result.rows);
    result.rank_report = render_rank_report(result.rows);
    return result;
}

} // namespace acqfam
