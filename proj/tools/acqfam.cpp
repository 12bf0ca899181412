// acqfam: reproducible Bayesian-optimization benchmarks over the
// E[I^w]/VI^u + beta*VI^v acquisition family.
//
//   acqfam run       one experiment grid (problems x acquisitions x reps)
//   acqfam sweep     the three predefined parameter-sweep grids
//   acqfam summarize recompute statistics and ranks from a results directory
//   acqfam describe  print the benchmark problems

#include "acqfam/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace acqfam;

void add_common_options(CLI::App* cmd, ExperimentSpec& spec) {
    cmd->add_option("--reps", spec.repetitions, "Repetitions per (problem, acquisition)")
        ->capture_default_str();
    cmd->add_option("--init", spec.n_init, "Latin hypercube initialization size")
        ->capture_default_str();
    cmd->add_option("--iters", spec.n_sequential, "Sequential BO iterations after init")
        ->capture_default_str();
    cmd->add_option("--seed", spec.base_seed, "Base seed for the run-seed hash")
        ->capture_default_str();
    cmd->add_option("--out", spec.out_dir, "Output directory")->required();
    cmd->add_option("--workers", spec.workers,
                    "Worker threads (0 = all available cores)")
        ->capture_default_str();
    cmd->add_flag("--resume", spec.resume, "Reuse valid traces already in the output directory");
    cmd->add_flag("--verbose", spec.verbose, "Log per-run completion to stderr");
    cmd->add_option("--pool", spec.optimizer.pool_per_dim,
                    "Acquisition candidate pool size per input dimension")
        ->capture_default_str();
    cmd->add_option("--multistarts", spec.fit_multistarts,
                    "Hyperparameter-fit multistarts")
        ->capture_default_str();
    cmd->add_option("--refit-every", spec.refit_every,
                    "Re-estimate hyperparameters every k iterations")
        ->capture_default_str();
}

void print_summary(const std::vector<SummaryRow>& rows) {
    std::fputs(render_summary_csv(rows).c_str(), stdout);
}

int run_describe(const std::string& name) {
    const auto describe_one = [](const TestProblem& p) {
        std::printf("%s: dimension %d, bounds", p.name.c_str(), p.dimension);
        for (const auto& iv : p.bounds) std::printf(" [%g, %g]", iv.lo, iv.hi);
        std::printf(", reference solution %.3f, local minima %d\n",
                    reference_solution(p), p.local_minima);
    };
    if (name == "all") {
        for (const auto& p : all_problems()) describe_one(p);
        return 0;
    }
    describe_one(problem_by_name(name));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acquisition-family Bayesian optimization benchmarks"};
    app.require_subcommand(1);

    ExperimentSpec spec;
    std::vector<std::string> problem_names;
    std::vector<std::string> acq_names;
    int group = 1;
    std::string summarize_dir;
    std::string describe_problem = "all";

    CLI::App* cmd_run = app.add_subcommand("run", "Run an experiment grid");
    cmd_run->add_option("--problem", problem_names, "Problem names (GRL ROS MOT ACY RAS HTN)")
        ->required();
    cmd_run->add_option("--acq", acq_names, "Acquisition presets or u,v,w,beta tuples")
        ->required();
    add_common_options(cmd_run, spec);

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run a predefined parameter sweep");
    cmd_sweep->add_option("--group", group, "Sweep group (1: w; 2: beta x v; 3: u x v)")
        ->required()
        ->check(CLI::Range(1, 3));
    cmd_sweep->add_option("--problem", problem_names, "Problem names")
        ->default_val(std::vector<std::string>{"ROS", "MOT", "RAS"});
    add_common_options(cmd_sweep, spec);

    CLI::App* cmd_summarize =
        app.add_subcommand("summarize", "Summarize a results directory");
    cmd_summarize->add_option("dir", summarize_dir, "Results directory")->required();

    CLI::App* cmd_describe = app.add_subcommand("describe", "Describe benchmark problems");
    cmd_describe->add_option("--problem", describe_problem, "Problem name or 'all'")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            spec.problems = problem_names;
            for (const auto& text : acq_names)
                spec.acquisitions.push_back(acquisition_from_string(text));
            print_summary(run_experiment(spec).summary);
            return 0;
        }
        if (cmd_sweep->parsed()) {
            spec.problems = problem_names;
            print_summary(sweep_family(group, spec).summary);
            return 0;
        }
        if (cmd_summarize->parsed()) {
            const SummarizeResult result = summarize(summarize_dir);
            print_summary(result.rows);
            std::fputs(result.rank_report.c_str(), stdout);
            return 0;
        }
        if (cmd_describe->parsed()) return run_describe(describe_problem);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acqfam: %s\n", e.what());
        return 1;
    }
    return 0;
}
