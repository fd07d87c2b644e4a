#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "homoperc/cubical_complex.hpp"
#include "homoperc/homology_engine.hpp"
#include "homoperc/permutohedral_complex.hpp"

using namespace homoperc;

namespace {

Membership random_set(std::size_t n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution b(p);
    Membership m(n);
    for (auto& x : m) x = b(rng);
    return m;
}

}  // namespace

TEST_CASE("cubical Betti numbers") {
    {
        const PrimeField f(3);
        const auto cx = cubical_chain_complex({2, 3, 1}, 2, f);
        CHECK(betti(cx, 0) == 1);
        CHECK(betti(cx, 1) == 2);
        CHECK(betti(cx, 2) == 1);
        CHECK(betti(cubical_chain_complex({4, 3, 1}, 4, f), 2) == 6);
    }
    for (std::uint32_t q : {3u, 5u}) {
        const PrimeField f(q);
        for (int d = 2; d <= 4; ++d) {
            const auto cx = cubical_chain_complex({d, 3, 1}, d, f);
            for (int k = 0; k <= d; ++k) CHECK(betti(cx, k) == binomial(d, k));
        }
    }
}

TEST_CASE("Betti of an empty complex") {
    const ChainComplex empty(PrimeField(3), {0, 0, 0}, {SparseFieldMatrix(), SparseFieldMatrix(0), SparseFieldMatrix(0)});
    CHECK(betti(empty, 0) == 0);
    CHECK(betti(empty, 1) == 0);
    CHECK(betti(empty, 2) == 0);
}

TEST_CASE("extremes: nothing open and everything open") {
    for (std::uint32_t q : {3u, 5u, 7u}) {
        const PrimeField f(q);
        for (int d = 2; d <= 4; ++d) {
            for (int i = 1; i < d; ++i) {
                const auto cx = cubical_chain_complex({d, 3, i}, i + 1, f);
                const auto none = induced_map_rank(plaquette_pair(cx, i, Membership(cx.cell_count(i), 0)));
                CHECK(none.rank_phi == 0);
                CHECK(none.event_Z);
                CHECK_FALSE(none.event_A);
                const auto all = induced_map_rank(plaquette_pair(cx, i, Membership(cx.cell_count(i), 1)));
                CHECK(all.rank_phi == binomial(d, i));
                CHECK(all.event_S);
                CHECK(all.event_A);
                CHECK(all.ambient_rank == binomial(d, i));
            }
        }
    }
    for (std::uint32_t q : {2u, 5u}) {
        const PrimeField f(q);
        const auto clique = build_clique_complex({2, 4, 1}, 2);
        const auto cx = clique_chain_complex(clique, 2, f);
        CHECK(induced_map_rank(site_pair(cx, clique, 1, Membership(16, 0))).rank_phi == 0);
        CHECK(induced_map_rank(site_pair(cx, clique, 1, Membership(16, 1))).rank_phi == 2);
    }
}

TEST_CASE("a once-wrapping row") {
    const PrimeField f(3);
    const TorusSpec spec{2, 3, 1};
    const CubicalIndexer ix(spec);
    const auto cx = cubical_chain_complex(spec, 2, f);
    Membership open(ix.count(1), 0);
    for (int x = 0; x < 3; ++x) open[ix.index_of({{x, 0}, 0b01})] = 1;
    const auto fp = plaquette_pair(cx, 1, open);
    const auto r = induced_map_rank(fp);
    CHECK(r.rank_phi == 1);
    CHECK(r.event_A);
    CHECK_FALSE(r.event_S);
    CHECK(oracle_induced_map_rank(fp) == 1);
    CHECK(winding_rank_edges(spec, open, f) == 1);

    // a row of adjacent sites on the d=2 permutohedral torus
    const auto clique = build_clique_complex({2, 4, 1}, 2);
    const auto pcx = clique_chain_complex(clique, 2, PrimeField(2));
    Membership sites(16, 0);
    for (int x = 0; x < 4; ++x) sites[site_index({x, 0}, 4)] = 1;
    const auto pr = induced_map_rank(site_pair(pcx, clique, 1, sites));
    CHECK(pr.rank_phi == 1);
    CHECK(winding_rank_sites(clique, sites, PrimeField(2)) == 1);
}

TEST_CASE("fast path equals the oracle on random cubical samples") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint32_t q : {3u, 5u}) {
        const PrimeField f(q);
        for (int d = 2; d <= 3; ++d) {
            for (int N = 3; N <= 4; ++N) {
                for (int i = 1; i < d; ++i) {
                    const auto cx = cubical_chain_complex({d, N, i}, i + 1, f);
                    for (int t = 0; t < 40; ++t) {
                        const double p = t < 20 ? 0.5 : u(rng);
                        const auto fp = plaquette_pair(cx, i, random_set(cx.cell_count(i), p, rng));
                        CHECK(induced_map_rank(fp).rank_phi == oracle_induced_map_rank(fp));
                    }
                }
            }
        }
    }
}

TEST_CASE("fast path equals the oracle on random permutohedral samples") {
    std::mt19937_64 rng(22);
    for (std::uint32_t q : {2u, 5u}) {
        const PrimeField f(q);
        const auto clique = build_clique_complex({2, 4, 1}, 2);
        const auto cx = clique_chain_complex(clique, 2, f);
        for (int t = 0; t < 100; ++t) {
            const auto fp = site_pair(cx, clique, 1, random_set(16, 0.5, rng));
            CHECK(induced_map_rank(fp).rank_phi == oracle_induced_map_rank(fp));
        }
    }
    const PrimeField f(3);
    const auto clique = build_clique_complex({3, 4, 1}, 3);
    const auto cx = clique_chain_complex(clique, 3, f);
    for (int i = 1; i <= 2; ++i) {
        for (int t = 0; t < 20; ++t) {
            const auto fp = site_pair(cx, clique, i, random_set(64, 0.5, rng));
            CHECK(induced_map_rank(fp).rank_phi == oracle_induced_map_rank(fp));
        }
    }
}

TEST_CASE("oracle refuses large instances") {
    const PrimeField f(3);
    const auto cx = cubical_chain_complex({3, 6, 1}, 2, f);
    const auto fp = plaquette_pair(cx, 1, Membership(cx.cell_count(1), 1));
    CHECK_THROWS_AS(oracle_induced_map_rank(fp, 100), std::length_error);
}

TEST_CASE("rank_phi is monotone under adding a face") {
    std::mt19937_64 rng(23);
    const PrimeField f(3);
    const auto cx = cubical_chain_complex({3, 4, 1}, 3, f);
    for (int i = 1; i <= 2; ++i) {
        const std::size_t n = cx.cell_count(i);
        for (int t = 0; t < 100; ++t) {
            auto s = random_set(n, 0.35 + 0.3 * (i - 1), rng);
            const auto before = induced_map_rank(plaquette_pair(cx, i, s));
            s[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1;
            const auto after = induced_map_rank(plaquette_pair(cx, i, s));
            CHECK(before.rank_phi <= after.rank_phi);
            CHECK(after.rank_phi <= binomial(3, i));
            CHECK((after.event_S ? after.event_A : true));
            CHECK(after.event_Z == !after.event_A);
        }
    }
}

TEST_CASE("translation invariance") {
    std::mt19937_64 rng(24);
    std::uniform_int_distribution<int> shift(-5, 5);
    const PrimeField f(3);
    const TorusSpec spec{3, 4, 2};
    const CubicalIndexer ix(spec);
    const auto cx = cubical_chain_complex(spec, 3, f);
    for (int t = 0; t < 30; ++t) {
        const auto s = random_set(ix.count(2), 0.5, rng);
        const std::vector<int> v{shift(rng), shift(rng), shift(rng)};
        Membership moved(s.size(), 0);
        for (std::size_t n = 0; n < s.size(); ++n) {
            if (s[n]) moved[ix.index_of(translate(ix.cell_at(2, n), v, spec))] = 1;
        }
        CHECK(induced_map_rank(plaquette_pair(cx, 2, s)).rank_phi ==
              induced_map_rank(plaquette_pair(cx, 2, moved)).rank_phi);
    }
    const auto clique = build_clique_complex({3, 4, 1}, 3);
    const auto pcx = clique_chain_complex(clique, 3, f);
    for (int t = 0; t < 20; ++t) {
        const auto s = random_set(64, 0.5, rng);
        const auto moved = translate_sites(s, {shift(rng), shift(rng), shift(rng)}, 3, 4);
        for (int i = 1; i <= 2; ++i) {
            CHECK(induced_map_rank(site_pair(pcx, clique, i, s)).rank_phi ==
                  induced_map_rank(site_pair(pcx, clique, i, moved)).rank_phi);
        }
    }
}

TEST_CASE("winding union-find equals linear algebra in dimension 1") {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(0.1, 0.7);
    for (std::uint32_t q : {3u, 5u}) {
        const PrimeField f(q);
        for (int d = 2; d <= 3; ++d) {
            const TorusSpec spec{d, d == 2 ? 8 : 5, 1};
            const auto cx = cubical_chain_complex(spec, 2, f);
            for (int t = 0; t < 60; ++t) {
                const auto s = random_set(cx.cell_count(1), u(rng), rng);
                CHECK(winding_rank_edges(spec, s, f) == induced_map_rank(plaquette_pair(cx, 1, s)).rank_phi);
            }
        }
    }
    const PrimeField f2(2);
    const auto c2 = build_clique_complex({2, 6, 1}, 2);
    const auto x2 = clique_chain_complex(c2, 2, f2);
    const PrimeField f3(3);
    const auto c3 = build_clique_complex({3, 5, 1}, 2);
    const auto x3 = clique_chain_complex(c3, 2, f3);
    for (int t = 0; t < 60; ++t) {
        const auto s2 = random_set(c2.n_sites, u(rng), rng);
        CHECK(winding_rank_sites(c2, s2, f2) == induced_map_rank(site_pair(x2, c2, 1, s2)).rank_phi);
        const auto s3 = random_set(c3.n_sites, u(rng) * 0.6, rng);
        CHECK(winding_rank_sites(c3, s3, f3) == induced_map_rank(site_pair(x3, c3, 1, s3)).rank_phi);
    }
}

TEST_CASE("winding classes are reduced modulo q") {
    // a loop wrapping three times in the first direction is zero over GF(3)
    WindingTracker t3(1, 2, 4, PrimeField(3));
    const std::vector<int> three_wraps{12, 0};
    CHECK_FALSE(t3.add_edge(0, 0, three_wraps));
    CHECK(t3.rank() == 0);
    WindingTracker t5(1, 2, 4, PrimeField(5));
    CHECK(t5.add_edge(0, 0, three_wraps));
    CHECK(t5.rank() == 1);
}

TEST_CASE("essential birth values on a filtered square torus") {
    const PrimeField f(3);
    const TorusSpec spec{2, 3, 1};
    const CubicalIndexer ix(spec);
    const auto cx = cubical_chain_complex(spec, 2, f);
    std::vector<double> edges(ix.count(1), 0.9);
    for (int x = 0; x < 3; ++x) edges[ix.index_of({{x, 0}, 0b01})] = 0.1 * (x + 1);
    const std::vector<double> squares(ix.count(2), 2.0);
    const auto births = essential_birth_values(cx, 1, edges, squares);
    REQUIRE(births.size() == 2);
    CHECK(births[0] == 0.1 * 3);
    CHECK(births[1] == 0.9);
}
