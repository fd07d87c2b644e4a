#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "homoperc/cubical_complex.hpp"
#include "homoperc/field_linalg.hpp"
#include "oracles.hpp"

using namespace homoperc;

namespace {

bool annihilates(const SparseFieldMatrix& m, const SparseColumn& v, const PrimeField& f) {
    std::vector<Scalar> dense(m.n_cols(), 0);
    for (const auto& e : v) dense[e.row] = e.value;
    const auto out = m.apply(dense, f);
    return std::all_of(out.begin(), out.end(), [](Scalar s) { return s == 0; });
}

}  // namespace

TEST_CASE("prime field construction and arithmetic") {
    CHECK_THROWS_AS(PrimeField(0), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField(1), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField(4), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField(65537), std::invalid_argument);
    const PrimeField f(7);
    CHECK(f.reduce(-1) == 6);
    CHECK(f.reduce(15) == 1);
    for (Scalar a = 1; a < 7; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
    CHECK(f.add(5, 4) == 2);
    CHECK(f.sub(2, 5) == 4);
    CHECK(f.neg(0) == 0);
    CHECK(PrimeField(65521).mul(65520, 65520) == 1);
}

TEST_CASE("push_column rejects malformed columns") {
    SparseFieldMatrix m(3);
    CHECK_THROWS(m.push_column({{1, 1}, {0, 1}}));
    CHECK_THROWS(m.push_column({{0, 0}}));
    CHECK_THROWS(m.push_column({{3, 1}}));
    m.push_column({{0, 2}, {2, 1}});
    CHECK(m.n_cols() == 1);
}

TEST_CASE("rank: spec examples against the dense oracle") {
    const PrimeField f3(3);
    CHECK(rank(SparseFieldMatrix(), f3) == 0);
    const oracle::Dense id{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(oracle::dense_rank(id, 3) == 3);
    CHECK(rank(SparseFieldMatrix::from_dense(id, f3), f3) == 3);

    const oracle::Dense m{{1, 2}, {2, 4}};
    CHECK(oracle::dense_rank(m, 5) == 1);
    CHECK(oracle::dense_rank(m, 2) == 1);
    const PrimeField f5(5), f2(2);
    CHECK(rank(SparseFieldMatrix::from_dense(m, f5), f5) == 1);
    const auto m2 = SparseFieldMatrix::from_dense(m, f2);
    CHECK(oracle::to_dense(m2) == oracle::Dense{{1, 0}, {0, 0}});
    CHECK(rank(m2, f2) == 1);
}

TEST_CASE("rank agrees with the dense oracle and with the transpose") {
    std::mt19937_64 rng(11);
    for (std::int64_t q : {2, 3, 5}) {
        const PrimeField f(static_cast<std::uint32_t>(q));
        for (int t = 0; t < 100; ++t) {
            const auto a = oracle::random_dense(20, 20, q, 0.12, rng);
            const auto m = SparseFieldMatrix::from_dense(a, f);
            const std::size_t r = rank(m, f);
            CHECK(r == oracle::dense_rank(a, q));
            CHECK(r == rank(m.transpose(), f));
        }
    }
}

TEST_CASE("sparse path (64 columns and more) agrees with the dense oracle") {
    std::mt19937_64 rng(12);
    const PrimeField f(3);
    for (int t = 0; t < 20; ++t) {
        const auto a = oracle::random_dense(90, 120, 3, 0.03, rng);
        const auto m = SparseFieldMatrix::from_dense(a, f);
        CHECK(rank(m, f) == oracle::dense_rank(a, 3));
        CHECK(rank(m.transpose(), f) == oracle::dense_rank(a, 3));
    }
}

TEST_CASE("kernel basis: examples") {
    const PrimeField f(3);
    const auto id = SparseFieldMatrix::from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, f);
    CHECK(kernel_basis(id, f).empty());

    SparseFieldMatrix zero(3);
    for (int k = 0; k < 4; ++k) zero.push_column({});
    const auto kz = kernel_basis(zero, f);
    CHECK(kz.size() == 4);
    SparseFieldMatrix span(4, kz);
    CHECK(rank(span, f) == 4);

    const auto d1 = boundary_matrix(TorusSpec{2, 3, 1}, 1, f);
    CHECK(rank(d1, f) == 8);
    const auto k1 = kernel_basis(d1, f);
    CHECK(k1.size() == 10);
    for (const auto& v : k1) CHECK(annihilates(d1, v, f));
}

TEST_CASE("kernel basis: rank-nullity and independence on random matrices") {
    std::mt19937_64 rng(13);
    for (std::int64_t q : {2, 3, 5}) {
        const PrimeField f(static_cast<std::uint32_t>(q));
        for (int t = 0; t < 60; ++t) {
            const std::size_t cols = 5 + t;
            const auto a = oracle::random_dense(15 + t % 7, cols, q, 0.15, rng);
            const auto m = SparseFieldMatrix::from_dense(a, f);
            const auto ker = kernel_basis(m, f);
            CHECK(rank(m, f) + ker.size() == cols);
            for (const auto& v : ker) CHECK(annihilates(m, v, f));
            CHECK(rank(SparseFieldMatrix(cols, ker), f) == ker.size());
        }
    }
}

TEST_CASE("filtration_reduce: examples") {
    const PrimeField f(3);
    const auto reduced = SparseFieldMatrix::from_dense({{1, 0}, {0, 1}, {0, 0}}, f);
    const auto r1 = filtration_reduce(reduced, f);
    CHECK(r1.rank == 2);
    CHECK(r1.pivot_row_of_column == std::vector<std::size_t>{0, 1});
    CHECK(r1.reduced == reduced);

    const auto twins = SparseFieldMatrix::from_dense({{1, 1}, {2, 2}}, f);
    const auto r2 = filtration_reduce(twins, f);
    CHECK(r2.rank == 1);
    CHECK(r2.pivot_row_of_column[1] == kNoPivot);
    CHECK(r2.reduced.column(1).empty());

    const auto d2 = boundary_matrix(TorusSpec{2, 3, 1}, 2, f);
    CHECK(filtration_reduce(d2, f).rank == 8);
}

TEST_CASE("filtration_reduce: rank independent of column order, pivots distinct") {
    std::mt19937_64 rng(14);
    const PrimeField f(5);
    for (int t = 0; t < 50; ++t) {
        const auto a = oracle::random_dense(25, 30, 5, 0.1, rng);
        const auto m = SparseFieldMatrix::from_dense(a, f);
        std::vector<std::size_t> order(m.n_cols());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const auto out = filtration_reduce(m.select_columns(order), f);
        CHECK(out.rank == rank(m, f));
        std::vector<std::size_t> piv;
        for (auto p : out.pivot_row_of_column) {
            if (p != kNoPivot) piv.push_back(p);
        }
        CHECK(piv.size() == out.rank);
        std::sort(piv.begin(), piv.end());
        CHECK(std::adjacent_find(piv.begin(), piv.end()) == piv.end());
        CHECK(out.rank == oracle::dense_rank(oracle::to_dense(out.reduced), 5));
    }
}

TEST_CASE("operations are deterministic and do not mutate their input") {
    std::mt19937_64 rng(15);
    const PrimeField f(3);
    const auto m = SparseFieldMatrix::from_dense(oracle::random_dense(30, 70, 3, 0.05, rng), f);
    const auto copy = m;
    CHECK(rank(m, f) == rank(m, f));
    CHECK(kernel_basis(m, f) == kernel_basis(m, f));
    CHECK(filtration_reduce(m, f).pivot_row_of_column == filtration_reduce(m, f).pivot_row_of_column);
    CHECK(m == copy);
}

TEST_CASE("multiply matches dense product") {
    std::mt19937_64 rng(16);
    const PrimeField f(5);
    const auto a = oracle::random_dense(6, 7, 5, 0.4, rng);
    const auto b = oracle::random_dense(7, 4, 5, 0.4, rng);
    oracle::Dense ab(6, std::vector<std::int64_t>(4, 0));
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 4; ++c)
            for (int k = 0; k < 7; ++k) ab[r][c] = oracle::mod(ab[r][c] + a[r][k] * b[k][c], 5);
    const auto prod = SparseFieldMatrix::from_dense(a, f).multiply(SparseFieldMatrix::from_dense(b, f), f);
    CHECK(oracle::to_dense(prod) == ab);
}
