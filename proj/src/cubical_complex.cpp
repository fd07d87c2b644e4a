#include "homoperc/cubical_complex.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace homoperc {

void TorusSpec::validate() const {
    if (d < 2 || d > 12) {
        throw std::invalid_argument("cubical torus needs 2 <= d <= 12, got d=" + std::to_string(d));
    }
    if (N < 3) throw std::invalid_argument("cubical torus needs N >= 3, got N=" + std::to_string(N));
    if (i < 1 || i > d - 1) {
        throw std::invalid_argument("plaquette dimension must satisfy 1 <= i <= d-1, got i=" +
                                    std::to_string(i));
    }
}

std::size_t TorusSpec::vertex_count() const {
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(N);
    return n;
}

int CubicalCell::dim() const { return std::popcount(dirs); }

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * static_cast<std::uint64_t>(n - k + j) / j;
    return r;
}

namespace {

// k-subsets of {0..d-1} in lexicographic order of their sorted index lists.
std::vector<DirMask> combinations(int d, int k) {
    std::vector<DirMask> out;
    std::vector<int> idx(k);
    for (int j = 0; j < k; ++j) idx[j] = j;
    while (true) {
        DirMask m = 0;
        for (int j : idx) m |= DirMask{1} << j;
        out.push_back(m);
        int p = k - 1;
        while (p >= 0 && idx[p] == d - k + p) --p;
        if (p < 0) break;
        ++idx[p];
        for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
    }
    return out;
}

int wrap(int v, int N) {
    int r = v % N;
    return r < 0 ? r + N : r;
}

}  // namespace

CubicalIndexer::CubicalIndexer(const TorusSpec& spec) : spec_(spec) {
    if (spec.d < 1 || spec.d > 12 || spec.N < 1) throw std::invalid_argument("bad torus spec");
    n_vertices_ = spec.vertex_count();
    dir_rank_.assign(std::size_t{1} << spec.d, 0);
    for (int k = 0; k <= spec.d; ++k) {
        dirs_by_dim_.push_back(combinations(spec.d, k));
        const auto& v = dirs_by_dim_.back();
        for (std::size_t r = 0; r < v.size(); ++r) dir_rank_[v[r]] = r;
    }
}

std::size_t CubicalIndexer::count(int k) const {
    if (k < 0 || k > spec_.d) throw std::out_of_range("cell dimension out of range");
    return dirs_by_dim_[k].size() * n_vertices_;
}

std::size_t CubicalIndexer::anchor_index(const std::vector<int>& anchor) const {
    std::size_t idx = 0;
    for (int a : anchor) idx = idx * spec_.N + static_cast<std::size_t>(wrap(a, spec_.N));
    return idx;
}

std::vector<int> CubicalIndexer::anchor_at(std::size_t index) const {
    std::vector<int> a(spec_.d);
    for (int j = spec_.d - 1; j >= 0; --j) {
        a[j] = static_cast<int>(index % spec_.N);
        index /= spec_.N;
    }
    return a;
}

std::size_t CubicalIndexer::index_of(const CubicalCell& c) const {
    return dir_rank_.at(c.dirs) * n_vertices_ + anchor_index(c.anchor);
}

CubicalCell CubicalIndexer::cell_at(int k, std::size_t index) const {
    const auto& dirs = dirs_by_dim_.at(k);
    return CubicalCell{anchor_at(index % n_vertices_), dirs.at(index / n_vertices_)};
}

std::vector<CubicalCell> enumerate_cells(const TorusSpec& spec, int k) {
    if (k < 0 || k > spec.d) {
        throw std::out_of_range("cell dimension " + std::to_string(k) + " outside [0, d]");
    }
    spec.validate();
    CubicalIndexer ix(spec);
    std::vector<CubicalCell> cells;
    cells.reserve(ix.count(k));
    for (std::size_t n = 0; n < ix.count(k); ++n) cells.push_back(ix.cell_at(k, n));
    return cells;
}

SignedChain boundary(const CubicalCell& cell, const TorusSpec& spec, const PrimeField& f) {
    std::vector<std::pair<CubicalCell, std::int64_t>> raw;
    int pos = 0;
    for (int j = 0; j < spec.d; ++j) {
        if (!(cell.dirs & (DirMask{1} << j))) continue;
        const std::int64_t sign = (pos % 2 == 0) ? 1 : -1;
        const DirMask face = cell.dirs & ~(DirMask{1} << j);
        CubicalCell front{cell.anchor, face};
        front.anchor[j] = wrap(front.anchor[j] + 1, spec.N);
        raw.emplace_back(std::move(front), sign);
        raw.emplace_back(CubicalCell{cell.anchor, face}, -sign);
        ++pos;
    }
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SignedChain out;
    for (std::size_t k = 0; k < raw.size();) {
        std::int64_t c = 0;
        std::size_t e = k;
        while (e < raw.size() && raw[e].first == raw[k].first) c += raw[e++].second;
        Scalar v = f.reduce(c);
        if (v != 0) out.push_back({raw[k].first, v});
        k = e;
    }
    return out;
}

CubicalCell dual_cell(const CubicalCell& cell, const TorusSpec& spec) {
    const DirMask all = (DirMask{1} << spec.d) - 1;
    CubicalCell out{cell.anchor, all & ~cell.dirs};
    for (int j = 0; j < spec.d; ++j) {
        if (out.dirs & (DirMask{1} << j)) out.anchor[j] = wrap(out.anchor[j] - 1, spec.N);
    }
    return out;
}

CubicalCell dual_cell_inverse(const CubicalCell& cell, const TorusSpec& spec) {
    const DirMask all = (DirMask{1} << spec.d) - 1;
    CubicalCell out{cell.anchor, all & ~cell.dirs};
    for (int j = 0; j < spec.d; ++j) {
        if (cell.dirs & (DirMask{1} << j)) out.anchor[j] = wrap(out.anchor[j] + 1, spec.N);
    }
    return out;
}

SparseFieldMatrix boundary_matrix(const TorusSpec& spec, int k, const PrimeField& f) {
    if (k < 1 || k > spec.d) throw std::out_of_range("boundary matrix dimension outside [1, d]");
    CubicalIndexer ix(spec);
    SparseFieldMatrix m(ix.count(k - 1));
    const std::size_t n = ix.count(k);
    for (std::size_t c = 0; c < n; ++c) {
        SparseColumn col;
        for (const auto& t : boundary(ix.cell_at(k, c), spec, f)) {
            col.push_back({ix.index_of(t.cell), t.coeff});
        }
        std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
        m.push_column(std::move(col));
    }
    return m;
}

std::vector<std::size_t> dual_index_map(const CubicalIndexer& ix, int k) {
    std::vector<std::size_t> out(ix.count(k));
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] = ix.index_of(dual_cell(ix.cell_at(k, c), ix.spec()));
    }
    return out;
}

std::vector<std::size_t> dual_inverse_index_map(const CubicalIndexer& ix, int k) {
    std::vector<std::size_t> out(ix.count(k));
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] = ix.index_of(dual_cell_inverse(ix.cell_at(k, c), ix.spec()));
    }
    return out;
}

CubicalCell translate(const CubicalCell& c, const std::vector<int>& shift, const TorusSpec& spec) {
    CubicalCell out = c;
    for (int j = 0; j < spec.d; ++j) out.anchor[j] = wrap(out.anchor[j] + shift.at(j), spec.N);
    return out;
}

}  // namespace homoperc
