#include "homoperc/percolation_engine.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace homoperc {

std::string to_string(ModelKind m) { return m == ModelKind::cubical ? "cubical" : "permutohedral"; }

ModelKind model_from_string(const std::string& s) {
    if (s == "cubical") return ModelKind::cubical;
    if (s == "permutohedral") return ModelKind::permutohedral;
    throw std::invalid_argument("unknown model '" + s + "' (expected cubical or permutohedral)");
}

void ModelSpec::validate() const {
    if (kind == ModelKind::cubical) {
        TorusSpec{d, N, i}.validate();
    } else {
        PermTorusSpec{d, N, i}.validate();
    }
}

std::size_t PercSample::open_count() const {
    return static_cast<std::size_t>(std::count_if(open_set.begin(), open_set.end(), [](char c) { return c != 0; }));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(trial)));
}

double uniform_open(std::mt19937_64& rng) {
    std::uint64_t k = 0;
    while (k == 0) k = rng() >> 11;
    return std::ldexp(static_cast<double>(k), -53);
}

// ---------------------------------------------------------------------------

namespace {

ChainComplex build_chain(const ModelSpec& spec, const PrimeField& f, std::size_t budget,
                         std::optional<CubicalIndexer>& indexer, std::optional<CliqueComplex>& clique) {
    spec.validate();
    const int top = std::max(spec.i, spec.d - spec.i) + 1;
    if (spec.kind == ModelKind::cubical) {
        const TorusSpec torus{spec.d, spec.N, spec.i};
        indexer.emplace(torus);
        if (indexer->count(top) > budget) {
            throw std::length_error("cubical complex exceeds the cell budget of " + std::to_string(budget));
        }
        return cubical_chain_complex(torus, top, f);
    }
    clique.emplace(build_clique_complex(PermTorusSpec{spec.d, spec.N, spec.i}, top, budget));
    return clique_chain_complex(*clique, top, f);
}

}  // namespace

PercolationModel::PercolationModel(const ModelSpec& spec, const PrimeField& field, std::size_t budget)
    : spec_(spec), field_(field), chain_(build_chain(spec, field, budget, indexer_, clique_)) {
    if (spec_.kind == ModelKind::cubical) {
        dual_forward_.resize(spec_.d + 1);
        dual_backward_.resize(spec_.d + 1);
        for (int k : {spec_.i, spec_.d - spec_.i}) {
            dual_forward_[k] = dual_index_map(*indexer_, k);
            dual_backward_[k] = dual_inverse_index_map(*indexer_, k);
        }
    }
}

std::size_t PercolationModel::unit_count(int dim) const {
    if (spec_.kind == ModelKind::permutohedral) return clique_->n_sites;
    return indexer_->count(dim);
}

FiltrationPair PercolationModel::filtration_pair(const PercSample& s) const {
    if (s.model != spec_.kind) throw std::invalid_argument("sample belongs to a different model");
    if (s.dim != spec_.i && s.dim != spec_.d - spec_.i) {
        throw std::invalid_argument("sample dimension is neither i nor d-i");
    }
    if (spec_.kind == ModelKind::cubical) return plaquette_pair(chain_, s.dim, s.open_set);
    if (s.open_set.size() != clique_->n_sites) throw std::invalid_argument("site membership size mismatch");
    return site_pair(chain_, *clique_, s.dim, s.open_set);
}

InducedMapReport PercolationModel::evaluate(const PercSample& s) const {
    return induced_map_rank(filtration_pair(s));
}

std::size_t PercolationModel::evaluate_winding(const PercSample& s) const {
    if (s.dim != 1) throw std::invalid_argument("winding fast path only handles dimension 1");
    if (spec_.kind == ModelKind::cubical) {
        return winding_rank_edges(indexer_->spec(), s.open_set, field_);
    }
    return winding_rank_sites(*clique_, s.open_set, field_);
}

const std::vector<std::size_t>& PercolationModel::dual_map(int dim, Lattice from) const {
    if (spec_.kind != ModelKind::cubical) throw std::logic_error("dual cell maps exist only for cubical models");
    const auto& table = from == Lattice::primal ? dual_forward_ : dual_backward_;
    if (dim < 0 || dim > spec_.d || table[dim].empty()) throw std::out_of_range("no dual map for this dimension");
    return table[dim];
}

// ---------------------------------------------------------------------------

PercSample sample_at(const PercolationModel& m, double p, std::mt19937_64& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
    PercSample s;
    s.model = m.spec().kind;
    s.dim = m.spec().i;
    s.p = p;
    s.open_set.resize(m.unit_count(s.dim));
    for (auto& o : s.open_set) o = uniform_open(rng) <= p;
    return s;
}

namespace {

Lattice flip(Lattice l) { return l == Lattice::primal ? Lattice::shifted : Lattice::primal; }

}  // namespace

PercSample dual_sample(const PercolationModel& m, const PercSample& s) {
    PercSample out;
    out.model = s.model;
    out.dim = m.spec().d - s.dim;
    out.lattice = flip(s.lattice);
    if (s.p) out.p = 1.0 - *s.p;
    if (s.model == ModelKind::permutohedral) {
        out.open_set = complement_sites(*m.clique_complex(), s.open_set);
        return out;
    }
    const auto& map = m.dual_map(s.dim, s.lattice);
    if (s.open_set.size() != map.size()) throw std::invalid_argument("sample size does not match its dimension");
    out.open_set.assign(m.unit_count(out.dim), 0);
    for (std::size_t c = 0; c < map.size(); ++c) out.open_set[map[c]] = s.open_set[c] ? 0 : 1;
    return out;
}

DualityAudit duality_audit(const PercolationModel& m, const PercSample& s) {
    DualityAudit a;
    a.primal = m.evaluate(s);
    a.dual = m.evaluate(dual_sample(m, s));
    a.rank_phi = a.primal.rank_phi;
    a.rank_psi = a.dual.rank_phi;
    const std::size_t D = m.homology_rank();
    if (a.rank_phi + a.rank_psi != D) {
        throw DualityViolation("duality violated: rank_phi=" + std::to_string(a.rank_phi) +
                               " rank_psi=" + std::to_string(a.rank_psi) + " expected sum " + std::to_string(D));
    }
    return a;
}

WeightAssignment draw_weights(const PercolationModel& m, std::mt19937_64& rng) {
    WeightAssignment w;
    w.dim = m.spec().i;
    w.weight.resize(m.unit_count(w.dim));
    for (auto& x : w.weight) x = uniform_open(rng);
    // Ties are astronomically rare; redraw the later member of each.
    while (true) {
        std::vector<std::size_t> order(w.weight.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return w.weight[a] < w.weight[b] || (w.weight[a] == w.weight[b] && a < b);
        });
        bool tie = false;
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (w.weight[order[k]] == w.weight[order[k - 1]]) {
                w.weight[order[k]] = uniform_open(rng);
                tie = true;
            }
        }
        if (!tie) break;
    }
    return w;
}

WeightAssignment dual_weights(const PercolationModel& m, const WeightAssignment& w) {
    WeightAssignment out;
    out.dim = m.spec().d - w.dim;
    out.lattice = flip(w.lattice);
    if (m.spec().kind == ModelKind::permutohedral) {
        out.weight.resize(w.weight.size());
        for (std::size_t k = 0; k < w.weight.size(); ++k) out.weight[k] = 1.0 - w.weight[k];
        return out;
    }
    const auto& map = m.dual_map(w.dim, w.lattice);
    out.weight.assign(m.unit_count(out.dim), 0.0);
    for (std::size_t c = 0; c < map.size(); ++c) out.weight[map[c]] = 1.0 - w.weight[c];
    return out;
}

PercSample sublevel(const PercolationModel& m, const WeightAssignment& w, double u) {
    PercSample s;
    s.model = m.spec().kind;
    s.dim = w.dim;
    s.lattice = w.lattice;
    s.p = u;
    s.open_set.resize(w.weight.size());
    for (std::size_t k = 0; k < w.weight.size(); ++k) s.open_set[k] = w.weight[k] <= u;
    return s;
}

// ---------------------------------------------------------------------------

std::string to_string(CriticalMethod m) {
    switch (m) {
        case CriticalMethod::automatic: return "auto";
        case CriticalMethod::bisect: return "bisect";
        case CriticalMethod::sweep: return "sweep";
        case CriticalMethod::winding: return "winding";
    }
    return "auto";
}

CriticalMethod method_from_string(const std::string& s) {
    if (s == "auto") return CriticalMethod::automatic;
    if (s == "bisect") return CriticalMethod::bisect;
    if (s == "sweep") return CriticalMethod::sweep;
    if (s == "winding") return CriticalMethod::winding;
    throw std::invalid_argument("unknown critical method '" + s + "' (auto, bisect, sweep, winding)");
}

namespace {

CriticalMethod resolve(CriticalMethod method, int dim) {
    if (method == CriticalMethod::automatic) return dim == 1 ? CriticalMethod::winding : CriticalMethod::bisect;
    if (method == CriticalMethod::winding && dim != 1) {
        throw std::invalid_argument("winding method needs dimension 1");
    }
    return method;
}

std::vector<std::size_t> weight_order(const WeightAssignment& w) {
    std::vector<std::size_t> order(w.weight.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w.weight[a] < w.weight[b]; });
    return order;
}

bool event_holds(const InducedMapReport& r, Event e) { return e == Event::A ? r.event_A : r.event_S; }

PercSample prefix_sample(const PercolationModel& m, const WeightAssignment& w,
                         const std::vector<std::size_t>& order, std::size_t k) {
    PercSample s;
    s.model = m.spec().kind;
    s.dim = w.dim;
    s.lattice = w.lattice;
    s.open_set.assign(w.weight.size(), 0);
    for (std::size_t n = 0; n < k; ++n) s.open_set[order[n]] = 1;
    return s;
}

CriticalValue bisect_critical(const PercolationModel& m, const WeightAssignment& w, Event event) {
    const auto order = weight_order(w);
    const std::size_t total = order.size();
    auto holds = [&](std::size_t k) { return event_holds(m.evaluate(prefix_sample(m, w, order, k)), event); };
    if (total == 0 || !holds(total)) return {};
    std::size_t lo = 1;
    std::size_t hi = total;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (holds(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return {w.weight[order[lo - 1]], order[lo - 1]};
}

CriticalPair winding_scan(const PercolationModel& m, const WeightAssignment& w) {
    const auto order = weight_order(w);
    const std::size_t D = m.homology_rank();
    CriticalPair out;
    auto record = [&](std::size_t rank, std::size_t unit) {
        if (rank >= 1 && !out.A.unit) out.A = {w.weight[unit], unit};
        if (rank >= D && !out.S.unit) out.S = {w.weight[unit], unit};
    };
    const ModelSpec& spec = m.spec();
    if (spec.kind == ModelKind::cubical) {
        const CubicalIndexer& ix = *m.indexer();
        WindingTracker t(ix.count(0), spec.d, spec.N, m.field());
        std::vector<int> step(spec.d, 0);
        for (std::size_t unit : order) {
            const CubicalCell c = ix.cell_at(1, unit);
            const int j = std::countr_zero(c.dirs);
            CubicalCell head = c;
            head.anchor[j] = (head.anchor[j] + 1) % spec.N;
            step.assign(spec.d, 0);
            step[j] = 1;
            if (t.add_edge(ix.anchor_index(c.anchor), ix.anchor_index(head.anchor), step)) record(t.rank(), unit);
            if (out.S.unit) break;
        }
        return out;
    }
    const CliqueComplex& cx = *m.clique_complex();
    const auto offs = adjacency_offsets(spec.d);
    WindingTracker t(cx.n_sites, spec.d, spec.N, m.field());
    std::vector<char> open(cx.n_sites, 0);
    for (std::size_t site : order) {
        open[site] = 1;
        const auto c = site_coords(site, spec.d, spec.N);
        bool grew = false;
        for (const auto& o : offs) {
            std::vector<int> nb = c;
            for (int j = 0; j < spec.d; ++j) nb[j] += o.offset[j];
            const std::size_t n = site_index(nb, spec.N);
            if (open[n] && n != site) grew = t.add_edge(site, n, o.offset) || grew;
        }
        if (grew) record(t.rank(), site);
        if (out.S.unit) break;
    }
    return out;
}

CriticalPair sweep_scan(const PercolationModel& m, const WeightAssignment& w) {
    const ChainComplex& cx = m.chain_complex();
    const int dim = w.dim;
    std::vector<double> cell_values(cx.cell_count(dim));
    std::vector<double> coface_values(cx.cell_count(dim + 1));
    if (m.spec().kind == ModelKind::cubical) {
        cell_values = w.weight;
        std::fill(coface_values.begin(), coface_values.end(), 2.0);
    } else {
        const CliqueComplex& cl = *m.clique_complex();
        auto entry = [&](int k, std::size_t n) {
            double v = 0.0;
            for (std::uint32_t s : cl.simplex(k, n)) v = std::max(v, w.weight[s]);
            return v;
        };
        for (std::size_t n = 0; n < cell_values.size(); ++n) cell_values[n] = entry(dim, n);
        for (std::size_t n = 0; n < coface_values.size(); ++n) coface_values[n] = entry(dim + 1, n);
    }
    const auto births = essential_birth_values(cx, dim, cell_values, coface_values);
    const auto order = weight_order(w);
    auto unit_of = [&](double value) -> CriticalValue {
        auto it = std::lower_bound(order.begin(), order.end(), value,
                                   [&](std::size_t u, double v) { return w.weight[u] < v; });
        if (it == order.end() || w.weight[*it] != value) return {};
        return {value, *it};
    };
    CriticalPair out;
    const std::size_t D = m.homology_rank();
    if (!births.empty() && births.front() <= 1.0) out.A = unit_of(births.front());
    if (births.size() >= D && births[D - 1] <= 1.0) out.S = unit_of(births[D - 1]);
    return out;
}

}  // namespace

CriticalValue critical_probability(const PercolationModel& m, const WeightAssignment& w, Event event,
                                   CriticalMethod method) {
    switch (resolve(method, w.dim)) {
        case CriticalMethod::winding: {
            auto pair = winding_scan(m, w);
            return event == Event::A ? pair.A : pair.S;
        }
        case CriticalMethod::sweep: {
            auto pair = sweep_scan(m, w);
            return event == Event::A ? pair.A : pair.S;
        }
        default:
            return bisect_critical(m, w, event);
    }
}

CriticalPair critical_pair(const PercolationModel& m, const WeightAssignment& w, CriticalMethod method) {
    switch (resolve(method, w.dim)) {
        case CriticalMethod::winding: return winding_scan(m, w);
        case CriticalMethod::sweep: return sweep_scan(m, w);
        default: return {bisect_critical(m, w, Event::A), bisect_critical(m, w, Event::S)};
    }
}

// ---------------------------------------------------------------------------

namespace {

TrialReport run_one(const PercolationModel& m, const TrialConfig& config, std::uint64_t trial) {
    const auto start = std::chrono::steady_clock::now();
    TrialReport r;
    r.trial = trial;
    r.seed = splitmix64(config.seed ^ splitmix64(trial));
    auto rng = trial_stream(config.seed, trial);
    const WeightAssignment w = draw_weights(m, rng);
    if (config.compute_criticals) {
        const auto pair = critical_pair(m, w, config.method);
        r.p_star_A = pair.A.value;
        r.p_star_S = pair.S.value;
    }
    for (double p : config.probes) {
        const auto audit = duality_audit(m, sublevel(m, w, p));
        r.probes.push_back({p, audit.rank_phi, audit.rank_psi, audit.primal.event_A, audit.primal.event_S});
    }
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

std::vector<TrialReport> run_trials(const PercolationModel& m, const TrialConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("trial count must be at least 1");
    for (double p : config.probes) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probe probabilities must lie in [0, 1]");
    }
    std::vector<TrialReport> reports(config.trials);
    std::vector<std::exception_ptr> errors(config.trials);
    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.trials)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < config.trials; k = next++) {
            try {
                reports[k] = run_one(m, config, config.first_trial + k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return reports;
}

// ---------------------------------------------------------------------------

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t ia = 0;
    std::size_t ib = 0;
    double best = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        const double fa = static_cast<double>(ia) / static_cast<double>(a.size());
        const double fb = static_cast<double>(ib) / static_cast<double>(b.size());
        best = std::max(best, std::abs(fa - fb));
    }
    return best;
}

}  // namespace homoperc
