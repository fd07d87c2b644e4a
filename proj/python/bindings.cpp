#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homoperc/cli_harness.hpp"
#include "homoperc/percolation_engine.hpp"

namespace py = pybind11;
using namespace homoperc;

namespace {

ExperimentConfig make_config(const std::string& model, int d, int i, int N, std::uint32_t q, const std::string& mode,
                             std::vector<double> p, std::size_t trials, std::uint64_t seed,
                             const std::string& method, unsigned threads) {
    ExperimentConfig c;
    c.model = model_from_string(model);
    c.d = d;
    c.i = i;
    c.N = N;
    c.q = q;
    c.mode = mode_from_string(mode);
    c.p_grid = std::move(p);
    c.trials = trials;
    c.seed = seed;
    c.method = method_from_string(method);
    c.threads = threads;
    return c;
}

PrimeField checked_field(const ExperimentConfig& c) {
    const auto v = validate(c);
    if (!v.empty()) throw std::invalid_argument(v.front());
    return PrimeField(effective_field(c));
}

// A model plus its field, built once and reused across calls.
class Model {
public:
    Model(const std::string& model, int d, int i, int N, std::uint32_t q)
        : config_(make_config(model, d, i, N, q, "threshold", {0.5}, 1, 0, "auto", 1)),
          m_(ModelSpec{config_.model, d, N, i}, checked_field(config_)) {}

    std::size_t units() const { return m_.unit_count(m_.spec().i); }
    std::uint32_t field() const { return m_.field().modulus(); }

    py::dict sample(double p, std::uint64_t seed, std::uint64_t trial) const {
        auto rng = trial_stream(seed, trial);
        const auto s = sample_at(m_, p, rng);
        const auto a = homoperc::duality_audit(m_, s);
        py::dict out;
        out["open"] = std::vector<int>(s.open_set.begin(), s.open_set.end());
        out["rank_phi"] = a.rank_phi;
        out["rank_psi"] = a.rank_psi;
        out["event_A"] = a.primal.event_A;
        out["event_S"] = a.primal.event_S;
        return out;
    }

    std::size_t rank_phi(const std::vector<int>& open) const {
        PercSample s;
        s.model = m_.spec().kind;
        s.dim = m_.spec().i;
        s.open_set.assign(open.begin(), open.end());
        if (s.open_set.size() != units()) throw std::invalid_argument("open set has the wrong length");
        return m_.evaluate(s).rank_phi;
    }

    std::pair<double, double> criticals(std::uint64_t seed, std::uint64_t trial, const std::string& method) const {
        auto rng = trial_stream(seed, trial);
        const auto pair = homoperc::critical_pair(m_, draw_weights(m_, rng), method_from_string(method));
        return {pair.A.value, pair.S.value};
    }

    std::vector<std::pair<double, double>> trials(std::size_t n, std::uint64_t seed, const std::string& method,
                                                  unsigned threads) const {
        TrialConfig cfg;
        cfg.trials = n;
        cfg.seed = seed;
        cfg.method = method_from_string(method);
        cfg.threads = threads;
        cfg.probes.clear();
        std::vector<TrialReport> reports;
        {
            py::gil_scoped_release release;
            reports = homoperc::run_trials(m_, cfg);
        }
        std::vector<std::pair<double, double>> out;
        for (const auto& r : reports) out.emplace_back(r.p_star_A, r.p_star_S);
        return out;
    }

private:
    ExperimentConfig config_;
    PercolationModel m_;
};

}  // namespace

PYBIND11_MODULE(_homoperc, m) {
    m.doc() = "Homological percolation on cubical and permutohedral tori.";

    py::class_<Model>(m, "Model")
        .def(py::init<const std::string&, int, int, int, std::uint32_t>(), py::arg("model") = "cubical",
             py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 8, py::arg("q") = 0)
        .def_property_readonly("units", &Model::units)
        .def_property_readonly("q", &Model::field)
        .def("sample", &Model::sample, py::arg("p"), py::arg("seed") = 0, py::arg("trial") = 0,
             "Bernoulli sample with its duality audit.")
        .def("rank_phi", &Model::rank_phi, py::arg("open"))
        .def("critical_pair", &Model::criticals, py::arg("seed") = 0, py::arg("trial") = 0,
             py::arg("method") = "auto", "(p*_A, p*_S) for one weight draw.")
        .def("run_trials", &Model::trials, py::arg("trials"), py::arg("seed") = 0, py::arg("method") = "auto",
             py::arg("threads") = 1);

    m.def(
        "validate",
        [](const std::string& model, int d, int i, int N, std::uint32_t q, const std::string& mode) {
            return validate(make_config(model, d, i, N, q, mode, {0.5}, 1, 0, "auto", 1));
        },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 8, py::arg("q") = 0,
        py::arg("mode") = "threshold");

    m.def(
        "effective_field",
        [](const std::string& model, int d, std::uint32_t q) {
            ExperimentConfig c;
            c.model = model_from_string(model);
            c.d = d;
            c.q = q;
            return effective_field(c);
        },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("q") = 0);

    m.def(
        "betti_numbers",
        [](const std::string& model, int d, int N, std::uint32_t q) {
            const auto c = make_config(model, d, 1, N, q, "betti", {}, 1, 0, "auto", 1);
            checked_field(c);
            return execute(c).betti;
        },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("N") = 3, py::arg("q") = 0);

    m.def(
        "duality_audit",
        [](const std::string& model, int d, int i, int N, std::uint32_t q, double p, std::uint64_t seed) {
            return Model(model, d, i, N, q).sample(p, seed, 0);
        },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 6, py::arg("q") = 0,
        py::arg("p") = 0.5, py::arg("seed") = 0);

    m.def(
        "critical_pair",
        [](const std::string& model, int d, int i, int N, std::uint32_t q, std::uint64_t seed,
           const std::string& method) { return Model(model, d, i, N, q).criticals(seed, 0, method); },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 8, py::arg("q") = 0,
        py::arg("seed") = 0, py::arg("method") = "auto");

    m.def(
        "run_trials",
        [](const std::string& model, int d, int i, int N, std::uint32_t q, std::size_t trials, std::uint64_t seed,
           const std::string& method, unsigned threads) {
            return Model(model, d, i, N, q).trials(trials, seed, method, threads);
        },
        py::arg("model") = "cubical", py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 8, py::arg("q") = 0,
        py::arg("trials") = 10, py::arg("seed") = 0, py::arg("method") = "auto", py::arg("threads") = 1);

    m.def(
        "run_experiment",
        [](const std::string& mode, const std::string& model, int d, int i, int N, std::uint32_t q,
           std::vector<double> p, std::size_t trials, std::uint64_t seed, const std::string& format,
           const std::string& method, unsigned threads) {
            auto c = make_config(model, d, i, N, q, mode, std::move(p), trials, seed, method, threads);
            c.format = format;
            checked_field(c);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = execute(c);
            }
            return py::make_tuple(r.exit_code, format == "json" ? to_json(c, r) : to_csv(c, r));
        },
        py::arg("mode"), py::arg("model") = "cubical", py::arg("d") = 2, py::arg("i") = 1, py::arg("N") = 8,
        py::arg("q") = 0, py::arg("p") = std::vector<double>{0.25, 0.5, 0.75}, py::arg("trials") = 10,
        py::arg("seed") = 0, py::arg("format") = "csv", py::arg("method") = "auto", py::arg("threads") = 1,
        "Runs one experiment and returns (exit_code, csv or json text).");
}
