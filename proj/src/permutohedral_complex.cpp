#include "homoperc/permutohedral_complex.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace homoperc {

void PermTorusSpec::validate() const {
    if (d < 2 || d > 8) {
        throw std::invalid_argument("permutohedral torus needs 2 <= d <= 8, got d=" + std::to_string(d));
    }
    if (i < 1 || i > d - 1) {
        throw std::invalid_argument("homology dimension must satisfy 1 <= i <= d-1, got i=" +
                                    std::to_string(i));
    }
    if (N < 4) {
        throw std::invalid_argument("permutohedral torus needs N >= 4, got N=" + std::to_string(N));
    }
    // Offsets have entries in {-1, 0, 1}; they are distinct and nonzero mod N
    // for N >= 3, checked here rather than assumed.
    const auto offs = adjacency_offsets(d);
    std::vector<std::size_t> seen;
    for (const auto& o : offs) seen.push_back(site_index(o.offset, N));
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end() || seen.front() == 0) {
        throw std::invalid_argument("adjacency offsets collide modulo N=" + std::to_string(N));
    }
}

std::size_t PermTorusSpec::site_count() const {
    std::size_t n = 1;
    for (int k = 0; k < d; ++k) n *= static_cast<std::size_t>(N);
    return n;
}

std::vector<std::vector<int>> site_basis(int d) {
    std::vector<std::vector<int>> b;
    for (int k = 1; k <= d; ++k) {
        std::vector<int> v(d + 1, 1);
        v[k] -= d + 1;
        b.push_back(std::move(v));
    }
    return b;
}

std::vector<AdjacencyOffset> adjacency_offsets(int d) {
    if (d < 2) throw std::invalid_argument("adjacency offsets need d >= 2");
    const std::uint32_t full = (std::uint32_t{1} << (d + 1)) - 1;
    const auto basis = site_basis(d);
    std::vector<AdjacencyOffset> out;
    for (std::uint32_t a = 1; a < full; ++a) {
        AdjacencyOffset o;
        o.subset = a;
        const int size = std::popcount(a);
        o.ambient.resize(d + 1);
        for (int k = 0; k <= d; ++k) o.ambient[k] = ((a >> k) & 1u ? d + 1 : 0) - size;
        // w = sum_k c_k b_k gives w_0 = sum c_k and w_k = w_0 - (d+1) c_k.
        o.offset.resize(d);
        for (int k = 1; k <= d; ++k) {
            const int num = o.ambient[0] - o.ambient[k];
            if (num % (d + 1) != 0) throw std::logic_error("offset is not a lattice vector");
            o.offset[k - 1] = num / (d + 1);
        }
        for (int k = 0; k <= d; ++k) {
            int acc = 0;
            for (int j = 0; j < d; ++j) acc += o.offset[j] * basis[j][k];
            if (acc != o.ambient[k]) throw std::logic_error("change of basis failed");
        }
        out.push_back(std::move(o));
    }
    return out;
}

std::size_t site_index(const std::vector<int>& coords, int N) {
    std::size_t idx = 0;
    for (int c : coords) {
        int r = c % N;
        if (r < 0) r += N;
        idx = idx * N + static_cast<std::size_t>(r);
    }
    return idx;
}

std::vector<int> site_coords(std::size_t index, int d, int N) {
    std::vector<int> c(d);
    for (int j = d - 1; j >= 0; --j) {
        c[j] = static_cast<int>(index % N);
        index /= N;
    }
    return c;
}

std::size_t CliqueComplex::count(int k) const {
    if (k < 0 || k > max_dim()) return 0;
    return simplices[k].size() / static_cast<std::size_t>(k + 1);
}

std::span<const std::uint32_t> CliqueComplex::simplex(int k, std::size_t n) const {
    const std::size_t w = static_cast<std::size_t>(k + 1);
    return {simplices[k].data() + n * w, w};
}

std::size_t CliqueComplex::find(int k, std::span<const std::uint32_t> verts) const {
    if (k < 0 || k > max_dim() || verts.size() != static_cast<std::size_t>(k + 1)) return kNoPivot;
    std::size_t lo = 0;
    std::size_t hi = count(k);
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        auto s = simplex(k, mid);
        if (std::lexicographical_compare(s.begin(), s.end(), verts.begin(), verts.end())) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < count(k)) {
        auto s = simplex(k, lo);
        if (std::equal(s.begin(), s.end(), verts.begin(), verts.end())) return lo;
    }
    return kNoPivot;
}

namespace {

bool adjacent_offsets(const std::vector<int>& a, const std::vector<int>& b,
                      const std::vector<AdjacencyOffset>& offs) {
    for (const auto& o : offs) {
        bool same = true;
        for (std::size_t j = 0; j < a.size() && same; ++j) same = b[j] - a[j] == o.offset[j];
        if (same) return true;
    }
    return false;
}

std::size_t count_cliques(const std::vector<std::vector<char>>& adj, std::vector<std::size_t>& chosen,
                          std::size_t start, int remaining) {
    if (remaining == 0) return 1;
    std::size_t total = 0;
    for (std::size_t v = start; v < adj.size(); ++v) {
        bool ok = true;
        for (std::size_t c : chosen) ok = ok && adj[c][v];
        if (!ok) continue;
        chosen.push_back(v);
        total += count_cliques(adj, chosen, v + 1, remaining - 1);
        chosen.pop_back();
    }
    return total;
}

}  // namespace

std::size_t simplex_count(int d, int N, int k) {
    if (k < 0 || k > d) return 0;
    std::size_t sites = 1;
    for (int j = 0; j < d; ++j) sites *= static_cast<std::size_t>(N);
    if (k == 0) return sites;
    const auto offs = adjacency_offsets(d);
    std::vector<std::vector<char>> adj(offs.size(), std::vector<char>(offs.size(), 0));
    for (std::size_t a = 0; a < offs.size(); ++a) {
        for (std::size_t b = 0; b < offs.size(); ++b) {
            adj[a][b] = a != b && adjacent_offsets(offs[a].offset, offs[b].offset, offs);
        }
    }
    std::vector<std::size_t> chosen;
    const std::size_t through_origin = count_cliques(adj, chosen, 0, k);
    return sites * through_origin / static_cast<std::size_t>(k + 1);
}

namespace {

struct CliqueWalker {
    const std::vector<std::vector<std::uint32_t>>& nbrs;
    std::vector<std::vector<std::uint32_t>>& out;
    int max_dim;
    std::size_t budget;
    std::vector<std::uint32_t> stack;

    // candidates: common neighbours of every vertex on the stack, all larger
    // than the last one, ascending.
    void extend(const std::vector<std::uint32_t>& candidates) {
        const int k = static_cast<int>(stack.size()) - 1;
        out[k].insert(out[k].end(), stack.begin(), stack.end());
        if (k == max_dim && out[k].size() / stack.size() > budget) {
            throw std::length_error("clique complex exceeds simplex budget of " +
                                    std::to_string(budget));
        }
        if (k == max_dim) return;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            const std::uint32_t v = candidates[c];
            std::vector<std::uint32_t> next;
            const auto& nv = nbrs[v];
            std::set_intersection(candidates.begin() + c + 1, candidates.end(), nv.begin(), nv.end(),
                                  std::back_inserter(next));
            stack.push_back(v);
            extend(next);
            stack.pop_back();
        }
    }
};

}  // namespace

CliqueComplex build_clique_complex(const PermTorusSpec& spec, int max_dim, std::size_t budget) {
    spec.validate();
    if (max_dim < 0 || max_dim > spec.d) {
        throw std::out_of_range("clique complex dimension must lie in [0, d]");
    }
    CliqueComplex cx;
    cx.d = spec.d;
    cx.N = spec.N;
    cx.n_sites = spec.site_count();
    cx.vertices.resize(cx.n_sites);
    for (std::size_t v = 0; v < cx.n_sites; ++v) cx.vertices[v] = static_cast<std::uint32_t>(v);

    const auto offs = adjacency_offsets(spec.d);
    cx.neighbours.resize(cx.n_sites);
    for (std::size_t v = 0; v < cx.n_sites; ++v) {
        const auto c = site_coords(v, spec.d, spec.N);
        auto& nb = cx.neighbours[v];
        for (const auto& o : offs) {
            std::vector<int> w = c;
            for (int j = 0; j < spec.d; ++j) w[j] += o.offset[j];
            nb.push_back(static_cast<std::uint32_t>(site_index(w, spec.N)));
        }
        std::sort(nb.begin(), nb.end());
    }

    cx.simplices.assign(max_dim + 1, {});
    CliqueWalker walker{cx.neighbours, cx.simplices, max_dim, budget, {}};
    for (std::size_t v = 0; v < cx.n_sites; ++v) {
        std::vector<std::uint32_t> cand;
        for (std::uint32_t u : cx.neighbours[v]) {
            if (u > v) cand.push_back(u);
        }
        walker.stack.assign(1, static_cast<std::uint32_t>(v));
        walker.extend(cand);
    }
    // Depth-first emission from ascending roots is already lexicographic.
    return cx;
}

CliqueComplex induced_subcomplex(const CliqueComplex& cx, const Membership& open_sites) {
    if (open_sites.size() != cx.n_sites) throw std::invalid_argument("membership size mismatch");
    CliqueComplex sub;
    sub.d = cx.d;
    sub.N = cx.N;
    sub.n_sites = cx.n_sites;
    sub.neighbours = cx.neighbours;
    sub.simplices.assign(cx.simplices.size(), {});
    for (int k = 0; k <= cx.max_dim(); ++k) {
        for (std::size_t n = 0; n < cx.count(k); ++n) {
            auto s = cx.simplex(k, n);
            if (std::all_of(s.begin(), s.end(), [&](std::uint32_t v) { return open_sites[v] != 0; })) {
                sub.simplices[k].insert(sub.simplices[k].end(), s.begin(), s.end());
            }
        }
    }
    if (!sub.simplices.empty()) sub.vertices = sub.simplices[0];
    return sub;
}

Membership complement_sites(const CliqueComplex& cx, const Membership& open_sites) {
    if (open_sites.size() != cx.n_sites) throw std::invalid_argument("membership size mismatch");
    Membership out(cx.n_sites, 0);
    for (std::uint32_t v : cx.vertices) out[v] = open_sites[v] ? 0 : 1;
    return out;
}

Membership simplex_mask(const CliqueComplex& cx, int k, const Membership& open_sites) {
    Membership mask(cx.count(k), 0);
    for (std::size_t n = 0; n < mask.size(); ++n) {
        auto s = cx.simplex(k, n);
        mask[n] = std::all_of(s.begin(), s.end(), [&](std::uint32_t v) { return open_sites[v] != 0; });
    }
    return mask;
}

SparseFieldMatrix boundary_matrix(const CliqueComplex& cx, int k, const PrimeField& f) {
    if (k < 1 || k > cx.max_dim()) throw std::out_of_range("simplicial boundary dimension out of range");
    SparseFieldMatrix m(cx.count(k - 1));
    std::vector<std::uint32_t> face(k);
    for (std::size_t n = 0; n < cx.count(k); ++n) {
        auto s = cx.simplex(k, n);
        SparseColumn col;
        for (int drop = 0; drop <= k; ++drop) {
            std::size_t w = 0;
            for (int j = 0; j <= k; ++j) {
                if (j != drop) face[w++] = s[j];
            }
            const std::size_t row = cx.find(k - 1, face);
            if (row == kNoPivot) throw std::logic_error("clique complex is not closed under faces");
            col.push_back({row, drop % 2 == 0 ? Scalar{1} : f.neg(1)});
        }
        std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
        m.push_column(std::move(col));
    }
    return m;
}

Membership translate_sites(const Membership& open_sites, const std::vector<int>& shift, int d, int N) {
    Membership out(open_sites.size(), 0);
    for (std::size_t v = 0; v < open_sites.size(); ++v) {
        if (!open_sites[v]) continue;
        auto c = site_coords(v, d, N);
        for (int j = 0; j < d; ++j) c[j] += shift.at(j);
        out[site_index(c, N)] = 1;
    }
    return out;
}

}  // namespace homoperc
