#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "homoperc/cubical_complex.hpp"
#include "homoperc/field_linalg.hpp"
#include "homoperc/permutohedral_complex.hpp"

namespace homoperc {

/// Boundary operators d_1..d_top of a finite complex over one field.
class ChainComplex {
public:
    ChainComplex(PrimeField field, std::vector<std::size_t> cell_counts,
                 std::vector<SparseFieldMatrix> boundaries);

    const PrimeField& field() const { return field_; }
    int top_dim() const { return static_cast<int>(cell_counts_.size()) - 1; }
    std::size_t cell_count(int k) const;
    /// d_k; throws std::out_of_range unless 1 <= k <= top_dim().
    const SparseFieldMatrix& boundary(int k) const;

private:
    PrimeField field_;
    std::vector<std::size_t> cell_counts_;
    std::vector<SparseFieldMatrix> boundaries_;  // index k holds d_k, index 0 unused
};

ChainComplex cubical_chain_complex(const TorusSpec& spec, int top_dim, const PrimeField& f);
ChainComplex clique_chain_complex(const CliqueComplex& cx, int top_dim, const PrimeField& f);

/// dim ker d_k - rank d_{k+1}; cells above top_dim count as absent.
std::size_t betti(const ChainComplex& cx, int k);

/// Inclusion of a subcomplex into its ambient complex, seen in dimension dim.
/// The subcomplex contains every cell below dim; in dimensions dim and dim+1
/// it holds the cells flagged in sub_cells / sub_cofaces.
struct FiltrationPair {
    const ChainComplex* ambient = nullptr;
    int dim = 1;
    Membership sub_cells;
    Membership sub_cofaces;
};

/// Open plaquettes of a cubical torus on top of its full (dim-1)-skeleton.
FiltrationPair plaquette_pair(const ChainComplex& ambient, int dim, Membership open_faces);
/// Full subcomplex of a clique complex on the open sites.
FiltrationPair site_pair(const ChainComplex& ambient, const CliqueComplex& cx, int dim,
                         const Membership& open_sites);

struct InducedMapReport {
    std::size_t rank_phi = 0;
    std::size_t betti_sub_i = 0;
    std::size_t ambient_rank = 0;  // dim H_dim of the ambient complex
    bool event_A = false;
    bool event_S = false;
    bool event_Z = true;
};

InducedMapReport make_report(std::size_t rank_phi, std::size_t betti_sub_i, std::size_t ambient_rank);

/// Rank of H_dim(sub) -> H_dim(ambient) by two-step persistence: sub cells
/// first, then the rest; ambient classes born inside sub that are never
/// killed are exactly the image.
InducedMapReport induced_map_rank(const FiltrationPair& fp);

/// rank[d_{dim+1} | Z] - rank[d_{dim+1}] with Z a kernel basis of d_dim on the
/// sub columns. Throws std::length_error beyond max_cells dim-cells.
std::size_t oracle_induced_map_rank(const FiltrationPair& fp, std::size_t max_cells = 50'000);

/// Filtration values at which the ambient dim-classes are born, ascending,
/// when dim-cells and (dim+1)-cells enter at the given values (ties broken by
/// index, dim-cells before their cofaces). Each face must enter no later than
/// its cofaces.
std::vector<double> essential_birth_values(const ChainComplex& ambient, int dim,
                                           std::span<const double> cell_values,
                                           std::span<const double> coface_values);

/// Union-find over lattice sites that keeps each node's integer displacement
/// from its root. A cycle closing with total displacement N*w contributes the
/// class w mod q to the image of H_1; the tracker keeps the span of those
/// classes.
class WindingTracker {
public:
    WindingTracker(std::size_t n_nodes, int d, int N, const PrimeField& f);

    /// Adds an edge whose lift goes from u to v by `step`. Returns true when
    /// the image rank grows.
    bool add_edge(std::size_t u, std::size_t v, std::span<const int> step);
    std::size_t rank() const { return basis_.size(); }

private:
    std::size_t find(std::size_t x);
    bool insert_class(std::vector<long long> w);

    int d_;
    int N_;
    PrimeField field_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::vector<long long> disp_;  // n_nodes * d, displacement to parent
    std::vector<std::vector<Scalar>> basis_;  // reduced echelon rows
    std::vector<int> pivot_col_;
    std::vector<long long> scratch_;
};

/// rank_phi in dimension 1 for open edges of a cubical torus.
std::size_t winding_rank_edges(const TorusSpec& spec, const Membership& open_edges, const PrimeField& f);
/// rank_phi in dimension 1 for open sites of a permutohedral torus.
std::size_t winding_rank_sites(const CliqueComplex& cx, const Membership& open_sites, const PrimeField& f);

}  // namespace homoperc
