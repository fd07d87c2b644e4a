#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "homoperc/field_linalg.hpp"

namespace homoperc {

/// Torus tiled by permutohedra: sites of A_d* modulo N times the lattice,
/// stored in basis coordinates (Z/N)^d.
struct PermTorusSpec {
    int d = 2;
    int N = 4;
    int i = 1;

    /// Throws std::invalid_argument on an unusable spec. N >= 4 is required so
    /// that every clique of the adjacency graph lifts to a lattice clique.
    void validate() const;
    std::size_t site_count() const;
    friend bool operator==(const PermTorusSpec&, const PermTorusSpec&) = default;
};

/// Facet neighbour of a permutohedron, indexed by a nonempty proper subset A
/// of the d+1 ambient coordinates {x_0, ..., x_d}.
struct AdjacencyOffset {
    std::uint32_t subset = 0;          // bit k set iff coordinate x_k is in A
    std::vector<int> ambient;          // w_A = (d+1) e_A - |A| 1, length d+1
    std::vector<int> offset;           // coordinates of w_A in the scaled basis, length d
};

/// Scaled basis vectors 1 - (d+1) e_k, k = 1..d, as ambient integer vectors.
std::vector<std::vector<int>> site_basis(int d);

/// All 2^{d+1} - 2 facet offsets, ordered by subset mask.
std::vector<AdjacencyOffset> adjacency_offsets(int d);

using Membership = std::vector<char>;

struct CliqueComplex {
    int d = 0;
    int N = 0;
    std::size_t n_sites = 0;
    /// Sites present (ascending). The full complex holds every site.
    std::vector<std::uint32_t> vertices;
    /// Sorted neighbour lists over all ambient sites.
    std::vector<std::vector<std::uint32_t>> neighbours;
    /// simplices[k] is a flat array of (k+1)-tuples of ascending site ids, in
    /// lexicographic order.
    std::vector<std::vector<std::uint32_t>> simplices;

    int max_dim() const { return static_cast<int>(simplices.size()) - 1; }
    std::size_t count(int k) const;
    std::span<const std::uint32_t> simplex(int k, std::size_t n) const;
    /// Index of a sorted (k+1)-tuple, or kNoPivot.
    std::size_t find(int k, std::span<const std::uint32_t> verts) const;
};

std::size_t site_index(const std::vector<int>& coords, int N);
std::vector<int> site_coords(std::size_t index, int d, int N);

/// Number of k-simplices of the clique complex on an N-torus (N >= 4),
/// counted locally around one site: N^d * (k-cliques through the origin) / (k+1).
std::size_t simplex_count(int d, int N, int k);

/// Clique complex of the site adjacency graph up to max_dim. Throws
/// std::length_error if the max_dim simplex count would exceed budget.
CliqueComplex build_clique_complex(const PermTorusSpec& spec, int max_dim,
                                   std::size_t budget = 10'000'000);

/// Full subcomplex on the open sites, keeping ambient site ids and order.
CliqueComplex induced_subcomplex(const CliqueComplex& cx, const Membership& open_sites);

/// Present sites of cx that are not open.
Membership complement_sites(const CliqueComplex& cx, const Membership& open_sites);

/// Which k-simplices of cx have all vertices open.
Membership simplex_mask(const CliqueComplex& cx, int k, const Membership& open_sites);

/// Simplicial boundary d_k of cx: columns k-simplices, rows (k-1)-simplices.
SparseFieldMatrix boundary_matrix(const CliqueComplex& cx, int k, const PrimeField& f);

/// Open set translated by a lattice vector in basis coordinates.
Membership translate_sites(const Membership& open_sites, const std::vector<int>& shift, int d, int N);

}  // namespace homoperc
