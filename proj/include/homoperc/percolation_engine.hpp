#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "homoperc/cubical_complex.hpp"
#include "homoperc/homology_engine.hpp"
#include "homoperc/permutohedral_complex.hpp"

namespace homoperc {

enum class ModelKind { cubical, permutohedral };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::cubical;
    int d = 2;
    int N = 8;
    int i = 1;

    /// Throws std::invalid_argument if the torus spec is unusable.
    void validate() const;
    /// C(d, i), the rank of H_i of the torus.
    std::size_t homology_rank() const { return static_cast<std::size_t>(binomial(d, i)); }
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Cubical cells may live on T^d_N or on the half-shifted dual complex,
/// which is re-indexed onto the same cell set.
enum class Lattice { primal, shifted };

struct PercSample {
    ModelKind model = ModelKind::cubical;
    int dim = 1;
    Lattice lattice = Lattice::primal;
    /// Open dim-faces (cubical) or open sites (permutohedral), canonical order.
    Membership open_set;
    std::optional<double> p;

    std::size_t open_count() const;
    friend bool operator==(const PercSample&, const PercSample&) = default;
};

/// Uniform weights in (0, 1) on every face or site; pairwise distinct.
struct WeightAssignment {
    int dim = 1;
    Lattice lattice = Lattice::primal;
    std::vector<double> weight;
};

/// Raised by duality_audit when rank_phi + rank_psi differs from C(d, i).
class DualityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-trial random stream: mt19937_64 seeded by splitmix64(seed ^ splitmix64(trial)).
std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial);
/// Uniform value k * 2^-53 with k in [1, 2^53 - 1]; 1 - u is then exact.
double uniform_open(std::mt19937_64& rng);

/// Precomputed ambient complexes for one model and field. Read-only after
/// construction, so one instance may be shared between threads.
class PercolationModel {
public:
    PercolationModel(const ModelSpec& spec, const PrimeField& field,
                     std::size_t budget = 10'000'000);

    const ModelSpec& spec() const { return spec_; }
    const PrimeField& field() const { return field_; }
    std::size_t homology_rank() const { return spec_.homology_rank(); }
    /// Faces of dimension dim (cubical) or sites (permutohedral).
    std::size_t unit_count(int dim) const;

    const ChainComplex& chain_complex() const { return chain_; }
    const CubicalIndexer* indexer() const { return indexer_ ? &*indexer_ : nullptr; }
    const CliqueComplex* clique_complex() const { return clique_ ? &*clique_ : nullptr; }

    FiltrationPair filtration_pair(const PercSample& s) const;
    /// rank of the inclusion-induced map through the linear-algebra path.
    InducedMapReport evaluate(const PercSample& s) const;
    /// Same rank by the winding union-find; only for dim == 1.
    std::size_t evaluate_winding(const PercSample& s) const;

    /// dual_cell (primal -> shifted) or its inverse, as index maps on dim-faces.
    const std::vector<std::size_t>& dual_map(int dim, Lattice from) const;

private:
    ModelSpec spec_;
    PrimeField field_;
    std::optional<CubicalIndexer> indexer_;
    std::optional<CliqueComplex> clique_;
    ChainComplex chain_;
    std::vector<std::vector<std::size_t>> dual_forward_;  // by dim
    std::vector<std::vector<std::size_t>> dual_backward_;
};

PercSample sample_at(const PercolationModel& m, double p, std::mt19937_64& rng);
PercSample dual_sample(const PercolationModel& m, const PercSample& s);

struct DualityAudit {
    std::size_t rank_phi = 0;
    std::size_t rank_psi = 0;
    InducedMapReport primal;
    InducedMapReport dual;
};

/// rank_phi on s and rank_psi on its dual; throws DualityViolation unless
/// they sum to C(d, i).
DualityAudit duality_audit(const PercolationModel& m, const PercSample& s);

WeightAssignment draw_weights(const PercolationModel& m, std::mt19937_64& rng);
/// Weights on the dual units: w'(dual of x) = 1 - w(x).
WeightAssignment dual_weights(const PercolationModel& m, const WeightAssignment& w);
/// Units with weight <= u.
PercSample sublevel(const PercolationModel& m, const WeightAssignment& w, double u);

enum class Event { A, S };
enum class CriticalMethod { automatic, bisect, sweep, winding };

std::string to_string(CriticalMethod m);
CriticalMethod method_from_string(const std::string& s);

struct CriticalValue {
    double value = 1.0;
    /// Unit whose opening first makes the event hold; empty if it never does.
    std::optional<std::size_t> unit;
};

/// Smallest weight u such that {weight <= u} satisfies the event. bisect
/// searches the sorted weights with O(log m) rank evaluations; sweep reads
/// it off one persistence reduction; winding scans with the union-find.
CriticalValue critical_probability(const PercolationModel& m, const WeightAssignment& w, Event event,
                                   CriticalMethod method = CriticalMethod::automatic);

struct CriticalPair {
    CriticalValue A;
    CriticalValue S;
};
CriticalPair critical_pair(const PercolationModel& m, const WeightAssignment& w,
                           CriticalMethod method = CriticalMethod::automatic);

struct ProbeAudit {
    double p = 0.0;
    std::size_t rank_phi = 0;
    std::size_t rank_psi = 0;
    bool event_A = false;
    bool event_S = false;
};

struct TrialReport {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    double p_star_A = 1.0;
    double p_star_S = 1.0;
    std::vector<ProbeAudit> probes;
    double ms = 0.0;
};

struct TrialConfig {
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::uint64_t first_trial = 0;
    std::vector<double> probes{0.25, 0.5, 0.75};
    CriticalMethod method = CriticalMethod::automatic;
    bool compute_criticals = true;
    unsigned threads = 1;
};

/// Independent trials, each from its own (seed, trial) stream; the result is
/// ordered by trial index whatever the thread count. Audit failures propagate.
std::vector<TrialReport> run_trials(const PercolationModel& m, const TrialConfig& config);

/// Sample median (mean of the middle pair for even sizes).
double median(std::vector<double> v);
/// Linear-interpolation quantile of the sorted sample.
double quantile(std::vector<double> v, double q);
/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace homoperc
