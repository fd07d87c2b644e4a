// homoperc: homological percolation experiments on cubical and permutohedral tori.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "homoperc/cli_harness.hpp"

using namespace homoperc;

namespace {

struct Flags {
    std::string model = "cubical";
    std::string method = "auto";
    std::string config_file;
    std::vector<double> p_grid;
    bool no_audit = false;
};

void add_common(CLI::App* sub, ExperimentConfig& c, Flags& fl, bool sampling) {
    sub->add_option("--model", fl.model, "cubical or permutohedral")->check(CLI::IsMember({"cubical", "permutohedral"}));
    sub->add_option("-d,--dim", c.d, "torus dimension d");
    sub->add_option("-i,--homology", c.i, "homology degree i");
    sub->add_option("-N,--size", c.N, "torus side length N");
    sub->add_option("-q,--field", c.q, "prime field modulus (default: 3 if admissible)");
    sub->add_option("--budget", c.budget, "maximum cells in the top dimension");
    sub->add_option("-o,--output", c.output, "output path (default stdout)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", fl.config_file, "start from a JSON config or report; explicit flags override it");
    if (!sampling) return;
    sub->add_option("-p,--p", fl.p_grid, "probabilities (repeatable or comma separated)")->delimiter(',');
    sub->add_option("-t,--trials", c.trials, "number of trials");
    sub->add_option("-s,--seed", c.seed, "64-bit base seed");
    sub->add_option("-j,--threads", c.threads, "worker threads (HOMOPERC_THREADS overrides)");
    sub->add_flag("--timing", c.timing, "fill the ms column with wall time");
}

void add_criticals(CLI::App* sub, ExperimentConfig& c, Flags& fl) {
    sub->add_option("--method", fl.method, "auto, bisect, sweep or winding")
        ->check(CLI::IsMember({"auto", "bisect", "sweep", "winding"}));
    sub->add_flag("--svg", c.emit_svg, "write the empirical CDF of p*_A as SVG");
    sub->add_option("--svg-path", c.svg_path, "SVG path (default: output with .svg)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homoperc: homological percolation on tori"};
    app.require_subcommand(1);

    ExperimentConfig c;
    c.threads = std::max(1u, std::thread::hardware_concurrency());
    Flags fl;

    auto* betti = app.add_subcommand("betti", "Betti numbers of the full torus complex");
    add_common(betti, c, fl, false);
    auto* trial = app.add_subcommand("trial", "independent samples at each p: rank of the induced map");
    add_common(trial, c, fl, true);
    auto* audit = app.add_subcommand("audit", "independent samples at each p with the duality check");
    add_common(audit, c, fl, true);
    auto* sweep = app.add_subcommand("sweep", "coupled sweep: one weight draw per trial, audited at each p");
    add_common(sweep, c, fl, true);
    add_criticals(sweep, c, fl);
    auto* threshold = app.add_subcommand("threshold", "per-trial critical probabilities p*_A and p*_S");
    add_common(threshold, c, fl, true);
    add_criticals(threshold, c, fl);
    threshold->add_flag("--no-audit", fl.no_audit, "skip the duality audit at the probe probabilities");

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    c.model = model_from_string(fl.model);
    c.method = method_from_string(fl.method);
    c.audit_probes = !fl.no_audit;
    if (!fl.p_grid.empty()) c.p_grid = fl.p_grid;
    c.mode = mode_from_string(sub->get_name());
    if (c.mode == Mode::threshold && fl.p_grid.empty()) c.p_grid = {0.25, 0.5, 0.75};

    if (!fl.config_file.empty()) {
        std::ifstream f(fl.config_file);
        if (!f) {
            std::cerr << "error: cannot read " << fl.config_file << '\n';
            return kExitInvalidConfig;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        ExperimentConfig loaded;
        try {
            loaded = config_from_json(ss.str());
        } catch (const std::exception& e) {
            std::cerr << "invalid config: " << e.what() << '\n';
            return kExitInvalidConfig;
        }
        // flags given on the command line win over the file
        auto given = [&](const std::string& name) {
            const CLI::Option* o = sub->get_option_no_throw(name);
            return o != nullptr && o->count() > 0;
        };
        if (given("--model")) loaded.model = c.model;
        if (given("--dim")) loaded.d = c.d;
        if (given("--homology")) loaded.i = c.i;
        if (given("--size")) loaded.N = c.N;
        if (given("--field")) loaded.q = c.q;
        if (given("--budget")) loaded.budget = c.budget;
        if (given("--output")) loaded.output = c.output;
        if (given("--format")) loaded.format = c.format;
        if (given("--p")) loaded.p_grid = c.p_grid;
        if (given("--trials")) loaded.trials = c.trials;
        if (given("--seed")) loaded.seed = c.seed;
        if (given("--threads")) loaded.threads = c.threads;
        if (given("--timing")) loaded.timing = c.timing;
        if (given("--method")) loaded.method = c.method;
        if (given("--svg")) loaded.emit_svg = c.emit_svg;
        if (given("--svg-path")) loaded.svg_path = c.svg_path;
        if (given("--no-audit")) loaded.audit_probes = c.audit_probes;
        loaded.mode = c.mode;
        c = loaded;
    }
    if (const char* env = std::getenv("HOMOPERC_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) c.threads = static_cast<unsigned>(n);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring HOMOPERC_THREADS=" << env << '\n';
        }
    }

    return run(c, std::cout, std::cerr);
}
