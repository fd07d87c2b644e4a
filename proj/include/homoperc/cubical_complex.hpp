#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "homoperc/field_linalg.hpp"

namespace homoperc {

/// Cubical torus T^d_N = Z^d / (N Z)^d together with the plaquette dimension i.
struct TorusSpec {
    int d = 2;
    int N = 3;
    int i = 1;

    /// Throws std::invalid_argument when d < 2, N < 3 or i outside [1, d-1].
    void validate() const;
    std::size_t vertex_count() const;
    friend bool operator==(const TorusSpec&, const TorusSpec&) = default;
};

/// Direction sets are bitmasks over 0-based coordinate axes.
using DirMask = std::uint32_t;

struct CubicalCell {
    std::vector<int> anchor;
    DirMask dirs = 0;

    int dim() const;
    friend bool operator==(const CubicalCell&, const CubicalCell&) = default;
    friend auto operator<=>(const CubicalCell&, const CubicalCell&) = default;
};

struct ChainTerm {
    CubicalCell cell;
    Scalar coeff;
    friend bool operator==(const ChainTerm&, const ChainTerm&) = default;
};

/// No repeated cells, no zero coefficients; terms sorted by (anchor, dirs).
using SignedChain = std::vector<ChainTerm>;

std::uint64_t binomial(int n, int k);

/// Canonical indexing of k-cells: direction sets in lexicographic order of
/// their sorted axis lists, then anchors lexicographically (first axis most
/// significant).
class CubicalIndexer {
public:
    explicit CubicalIndexer(const TorusSpec& spec);

    const TorusSpec& spec() const { return spec_; }
    std::size_t count(int k) const;
    std::size_t index_of(const CubicalCell& c) const;
    CubicalCell cell_at(int k, std::size_t index) const;
    const std::vector<DirMask>& dir_sets(int k) const { return dirs_by_dim_.at(k); }

    std::size_t anchor_index(const std::vector<int>& anchor) const;
    std::vector<int> anchor_at(std::size_t index) const;

private:
    TorusSpec spec_;
    std::size_t n_vertices_ = 0;
    std::vector<std::vector<DirMask>> dirs_by_dim_;
    std::vector<std::size_t> dir_rank_;  // indexed by mask
};

/// All k-cells in canonical order. Throws std::out_of_range unless 0 <= k <= d.
std::vector<CubicalCell> enumerate_cells(const TorusSpec& spec, int k);

/// Boundary with the standard cubical sign rule:
///   d(v, S) = sum_{j in S} (-1)^{pos(j,S)} [ (v + e_j, S \ j) - (v, S \ j) ].
SignedChain boundary(const CubicalCell& cell, const TorusSpec& spec, const PrimeField& f);

/// Dual cell in the half-shifted complex, re-indexed into T^d_N:
///   delta(v, S) = (v - 1_{S^c} mod N, S^c).
CubicalCell dual_cell(const CubicalCell& cell, const TorusSpec& spec);
/// Inverse of dual_cell: (w, T) -> (w + 1_T mod N, T^c).
CubicalCell dual_cell_inverse(const CubicalCell& cell, const TorusSpec& spec);

/// Boundary matrix d_k: columns are k-cells, rows (k-1)-cells.
SparseFieldMatrix boundary_matrix(const TorusSpec& spec, int k, const PrimeField& f);

/// Index of dual_cell(c) for every k-cell c, in canonical (d-k)-cell indices.
std::vector<std::size_t> dual_index_map(const CubicalIndexer& ix, int k);
/// Index of dual_cell_inverse(c) for every k-cell c.
std::vector<std::size_t> dual_inverse_index_map(const CubicalIndexer& ix, int k);

/// Translate a k-cell by a lattice vector.
CubicalCell translate(const CubicalCell& c, const std::vector<int>& shift, const TorusSpec& spec);

}  // namespace homoperc
