#include "homoperc/homology_engine.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace homoperc {

ChainComplex::ChainComplex(PrimeField field, std::vector<std::size_t> cell_counts,
                           std::vector<SparseFieldMatrix> boundaries)
    : field_(field), cell_counts_(std::move(cell_counts)), boundaries_(std::move(boundaries)) {
    if (boundaries_.size() != cell_counts_.size()) {
        throw std::invalid_argument("need one boundary slot per dimension");
    }
    for (std::size_t k = 1; k < boundaries_.size(); ++k) {
        if (boundaries_[k].n_cols() != cell_counts_[k] || boundaries_[k].n_rows() != cell_counts_[k - 1]) {
            throw std::invalid_argument("boundary d_" + std::to_string(k) + " has the wrong shape");
        }
    }
}

std::size_t ChainComplex::cell_count(int k) const {
    if (k < 0 || k > top_dim()) return 0;
    return cell_counts_[k];
}

const SparseFieldMatrix& ChainComplex::boundary(int k) const {
    if (k < 1 || k > top_dim()) throw std::out_of_range("no boundary d_" + std::to_string(k));
    return boundaries_[k];
}

ChainComplex cubical_chain_complex(const TorusSpec& spec, int top_dim, const PrimeField& f) {
    if (top_dim < 0 || top_dim > spec.d) throw std::out_of_range("cubical top dimension out of range");
    CubicalIndexer ix(spec);
    std::vector<std::size_t> counts;
    std::vector<SparseFieldMatrix> bd;
    for (int k = 0; k <= top_dim; ++k) {
        counts.push_back(ix.count(k));
        bd.push_back(k == 0 ? SparseFieldMatrix(0) : boundary_matrix(spec, k, f));
    }
    return ChainComplex(f, std::move(counts), std::move(bd));
}

ChainComplex clique_chain_complex(const CliqueComplex& cx, int top_dim, const PrimeField& f) {
    if (top_dim < 0 || top_dim > cx.max_dim()) throw std::out_of_range("clique top dimension out of range");
    std::vector<std::size_t> counts;
    std::vector<SparseFieldMatrix> bd;
    for (int k = 0; k <= top_dim; ++k) {
        counts.push_back(cx.count(k));
        bd.push_back(k == 0 ? SparseFieldMatrix(0) : boundary_matrix(cx, k, f));
    }
    return ChainComplex(f, std::move(counts), std::move(bd));
}

std::size_t betti(const ChainComplex& cx, int k) {
    if (k < 0 || k > cx.top_dim()) return 0;
    const std::size_t n = cx.cell_count(k);
    const std::size_t rk = k >= 1 ? rank(cx.boundary(k), cx.field()) : 0;
    const std::size_t rk1 = k + 1 <= cx.top_dim() ? rank(cx.boundary(k + 1), cx.field()) : 0;
    return n - rk - rk1;
}

FiltrationPair plaquette_pair(const ChainComplex& ambient, int dim, Membership open_faces) {
    if (open_faces.size() != ambient.cell_count(dim)) {
        throw std::invalid_argument("open face set does not match the cell count");
    }
    return FiltrationPair{&ambient, dim, std::move(open_faces), Membership(ambient.cell_count(dim + 1), 0)};
}

FiltrationPair site_pair(const ChainComplex& ambient, const CliqueComplex& cx, int dim,
                         const Membership& open_sites) {
    return FiltrationPair{&ambient, dim, simplex_mask(cx, dim, open_sites),
                          simplex_mask(cx, dim + 1, open_sites)};
}

InducedMapReport make_report(std::size_t rank_phi, std::size_t betti_sub_i, std::size_t ambient_rank) {
    InducedMapReport r;
    r.rank_phi = rank_phi;
    r.betti_sub_i = betti_sub_i;
    r.ambient_rank = ambient_rank;
    r.event_A = rank_phi >= 1;
    r.event_S = rank_phi == ambient_rank;
    r.event_Z = rank_phi == 0;
    return r;
}

namespace {

struct Pairing {
    std::vector<char> positive;  // by position in the cell order
    std::vector<char> killed;    // by position in the cell order
    std::vector<std::size_t> coface_pivot;  // by position in the coface order
};

Pairing pair_dimension(const ChainComplex& cx, int dim, std::span<const std::size_t> cell_order,
                       std::span<const std::size_t> coface_order) {
    const PrimeField& f = cx.field();
    Pairing p;
    const std::size_t n = cell_order.size();
    p.positive.assign(n, 1);
    p.killed.assign(n, 0);
    if (dim >= 1) {
        // Which columns are dependent on earlier ones does not depend on the row order.
        const auto red = filtration_reduce(cx.boundary(dim).select_columns(cell_order), f);
        for (std::size_t pos = 0; pos < n; ++pos) p.positive[pos] = red.pivot_row_of_column[pos] == kNoPivot;
    }
    if (dim + 1 <= cx.top_dim()) {
        std::vector<std::size_t> position_of_cell(n);
        for (std::size_t pos = 0; pos < n; ++pos) position_of_cell[cell_order[pos]] = pos;
        const auto cof = cx.boundary(dim + 1).select_columns(coface_order).permute_rows(position_of_cell, n);
        auto red = filtration_reduce(cof, f);
        for (std::size_t r : red.pivot_row_of_column) {
            if (r != kNoPivot) p.killed[r] = 1;
        }
        p.coface_pivot = std::move(red.pivot_row_of_column);
    }
    return p;
}

std::vector<std::size_t> sub_first_order(const Membership& sub, std::size_t& n_sub) {
    std::vector<std::size_t> order;
    order.reserve(sub.size());
    for (std::size_t c = 0; c < sub.size(); ++c) {
        if (sub[c]) order.push_back(c);
    }
    n_sub = order.size();
    for (std::size_t c = 0; c < sub.size(); ++c) {
        if (!sub[c]) order.push_back(c);
    }
    return order;
}

void check_pair(const FiltrationPair& fp) {
    if (fp.ambient == nullptr) throw std::invalid_argument("filtration pair without ambient complex");
    if (fp.dim < 0 || fp.dim > fp.ambient->top_dim()) throw std::out_of_range("pair dimension out of range");
    if (fp.sub_cells.size() != fp.ambient->cell_count(fp.dim) ||
        fp.sub_cofaces.size() != fp.ambient->cell_count(fp.dim + 1)) {
        throw std::invalid_argument("pair membership sizes do not match the ambient complex");
    }
}

}  // namespace

InducedMapReport induced_map_rank(const FiltrationPair& fp) {
    check_pair(fp);
    std::size_t n_sub = 0;
    std::size_t n_sub_cof = 0;
    const auto cell_order = sub_first_order(fp.sub_cells, n_sub);
    const auto coface_order = sub_first_order(fp.sub_cofaces, n_sub_cof);
    const Pairing p = pair_dimension(*fp.ambient, fp.dim, cell_order, coface_order);

    std::size_t rank_phi = 0;
    std::size_t ambient_rank = 0;
    std::size_t sub_cycles = 0;
    for (std::size_t pos = 0; pos < cell_order.size(); ++pos) {
        if (!p.positive[pos]) continue;
        if (pos < n_sub) ++sub_cycles;
        if (!p.killed[pos]) {
            ++ambient_rank;
            if (pos < n_sub) ++rank_phi;
        }
    }
    std::size_t sub_boundaries = 0;
    for (std::size_t pos = 0; pos < n_sub_cof && pos < p.coface_pivot.size(); ++pos) {
        if (p.coface_pivot[pos] != kNoPivot) ++sub_boundaries;
    }
    return make_report(rank_phi, sub_cycles - sub_boundaries, ambient_rank);
}

std::size_t oracle_induced_map_rank(const FiltrationPair& fp, std::size_t max_cells) {
    check_pair(fp);
    const ChainComplex& cx = *fp.ambient;
    const PrimeField& f = cx.field();
    const std::size_t n = cx.cell_count(fp.dim);
    if (n > max_cells) {
        throw std::length_error("oracle refuses instances with more than " + std::to_string(max_cells) +
                                " cells");
    }
    std::vector<std::size_t> sub;
    for (std::size_t c = 0; c < n; ++c) {
        if (fp.sub_cells[c]) sub.push_back(c);
    }

    std::vector<SparseColumn> cycles;
    if (fp.dim >= 1) {
        cycles = kernel_basis(cx.boundary(fp.dim).select_columns(sub), f);
    } else {
        for (std::size_t k = 0; k < sub.size(); ++k) cycles.push_back({{k, 1}});
    }

    SparseFieldMatrix boundaries(n);
    if (fp.dim + 1 <= cx.top_dim()) boundaries = cx.boundary(fp.dim + 1);
    SparseFieldMatrix combined = boundaries;
    for (const auto& z : cycles) {
        SparseColumn lifted;
        for (const auto& e : z) lifted.push_back({sub[e.row], e.value});
        combined.push_column(std::move(lifted));
    }
    return rank(combined, f) - rank(boundaries, f);
}

std::vector<double> essential_birth_values(const ChainComplex& ambient, int dim,
                                           std::span<const double> cell_values,
                                           std::span<const double> coface_values) {
    if (cell_values.size() != ambient.cell_count(dim) || coface_values.size() != ambient.cell_count(dim + 1)) {
        throw std::invalid_argument("filtration values do not match the cell counts");
    }
    auto by_value = [](std::span<const double> v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        return order;
    };
    const auto cell_order = by_value(cell_values);
    const auto coface_order = by_value(coface_values);
    const Pairing p = pair_dimension(ambient, dim, cell_order, coface_order);
    std::vector<double> births;
    for (std::size_t pos = 0; pos < cell_order.size(); ++pos) {
        if (p.positive[pos] && !p.killed[pos]) births.push_back(cell_values[cell_order[pos]]);
    }
    return births;
}

// ---------------------------------------------------------------------------

WindingTracker::WindingTracker(std::size_t n_nodes, int d, int N, const PrimeField& f)
    : d_(d), N_(N), field_(f), parent_(n_nodes), size_(n_nodes, 1),
      disp_(n_nodes * static_cast<std::size_t>(d), 0), scratch_(d) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t WindingTracker::find(std::size_t x) {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    // Second pass: point every node on the path at the root, summing offsets.
    std::vector<std::size_t> path;
    for (std::size_t y = x; parent_[y] != y; y = parent_[y]) path.push_back(y);
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const std::size_t y = *it;
        const std::size_t par = parent_[y];
        if (par != root) {
            for (int j = 0; j < d_; ++j) disp_[y * d_ + j] += disp_[par * d_ + j];
        }
        parent_[y] = root;
    }
    return root;
}

bool WindingTracker::insert_class(std::vector<long long> w) {
    std::vector<Scalar> v(d_);
    for (int j = 0; j < d_; ++j) v[j] = field_.reduce(w[j]);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
        const Scalar c = v[pivot_col_[b]];
        if (c == 0) continue;
        for (int j = 0; j < d_; ++j) v[j] = field_.sub(v[j], field_.mul(c, basis_[b][j]));
    }
    int lead = -1;
    for (int j = 0; j < d_; ++j) {
        if (v[j] != 0) {
            lead = j;
            break;
        }
    }
    if (lead < 0) return false;
    const Scalar inv = field_.inv(v[lead]);
    for (auto& x : v) x = field_.mul(x, inv);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
        const Scalar c = basis_[b][lead];
        if (c == 0) continue;
        for (int j = 0; j < d_; ++j) basis_[b][j] = field_.sub(basis_[b][j], field_.mul(c, v[j]));
    }
    basis_.push_back(std::move(v));
    pivot_col_.push_back(lead);
    return true;
}

bool WindingTracker::add_edge(std::size_t u, std::size_t v, std::span<const int> step) {
    const std::size_t ru = find(u);
    const std::size_t rv = find(v);
    // Lifted position of v seen from ru minus lifted position of v seen from rv.
    for (int j = 0; j < d_; ++j) {
        const long long du = ru == u ? 0 : disp_[u * d_ + j];
        const long long dv = rv == v ? 0 : disp_[v * d_ + j];
        scratch_[j] = du + step[j] - dv;
    }
    if (ru == rv) {
        std::vector<long long> w(d_);
        for (int j = 0; j < d_; ++j) {
            if (scratch_[j] % N_ != 0) throw std::logic_error("cycle displacement is not a lattice period");
            w[j] = scratch_[j] / N_;
        }
        return insert_class(std::move(w));
    }
    if (size_[ru] >= size_[rv]) {
        parent_[rv] = ru;
        for (int j = 0; j < d_; ++j) disp_[rv * d_ + j] = scratch_[j];
        size_[ru] += size_[rv];
    } else {
        parent_[ru] = rv;
        for (int j = 0; j < d_; ++j) disp_[ru * d_ + j] = -scratch_[j];
        size_[rv] += size_[ru];
    }
    return false;
}

std::size_t winding_rank_edges(const TorusSpec& spec, const Membership& open_edges, const PrimeField& f) {
    CubicalIndexer ix(spec);
    if (open_edges.size() != ix.count(1)) throw std::invalid_argument("edge membership size mismatch");
    WindingTracker t(ix.count(0), spec.d, spec.N, f);
    std::vector<int> step(spec.d, 0);
    for (std::size_t e = 0; e < open_edges.size(); ++e) {
        if (!open_edges[e]) continue;
        const CubicalCell c = ix.cell_at(1, e);
        const int j = std::countr_zero(c.dirs);
        CubicalCell head = c;
        head.anchor[j] = (head.anchor[j] + 1) % spec.N;
        step.assign(spec.d, 0);
        step[j] = 1;
        t.add_edge(ix.anchor_index(c.anchor), ix.anchor_index(head.anchor), step);
    }
    return t.rank();
}

std::size_t winding_rank_sites(const CliqueComplex& cx, const Membership& open_sites, const PrimeField& f) {
    if (open_sites.size() != cx.n_sites) throw std::invalid_argument("site membership size mismatch");
    const auto offs = adjacency_offsets(cx.d);
    WindingTracker t(cx.n_sites, cx.d, cx.N, f);
    for (std::size_t s = 0; s < cx.n_sites; ++s) {
        if (!open_sites[s]) continue;
        const auto c = site_coords(s, cx.d, cx.N);
        for (const auto& o : offs) {
            std::vector<int> w = c;
            for (int j = 0; j < cx.d; ++j) w[j] += o.offset[j];
            const std::size_t nb = site_index(w, cx.N);
            if (nb < s && open_sites[nb]) t.add_edge(s, nb, o.offset);
        }
    }
    return t.rank();
}

}  // namespace homoperc
