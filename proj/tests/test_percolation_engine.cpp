#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <tuple>

#include "homoperc/percolation_engine.hpp"

using namespace homoperc;

namespace {

const PercolationModel& cubical(int d, int N, int i) {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<PercolationModel>> cache;
    auto& slot = cache[{d, N, i}];
    if (!slot) slot = std::make_unique<PercolationModel>(ModelSpec{ModelKind::cubical, d, N, i}, PrimeField(3));
    return *slot;
}

double fraction(const PercSample& s) {
    return static_cast<double>(s.open_count()) / static_cast<double>(s.open_set.size());
}

}  // namespace

TEST_CASE("rng helpers") {
    auto a = trial_stream(5, 9);
    auto b = trial_stream(5, 9);
    CHECK(a() == b());
    CHECK(trial_stream(5, 9)() != trial_stream(5, 10)());
    auto rng = trial_stream(1, 1);
    for (int k = 0; k < 10000; ++k) {
        const double u = uniform_open(rng);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        CHECK(1.0 - (1.0 - u) == u);
    }
}

TEST_CASE("sample_at") {
    const auto& m = cubical(2, 16, 1);
    auto rng = trial_stream(0, 0);
    CHECK(sample_at(m, 0.0, rng).open_count() == 0);
    CHECK(sample_at(m, 1.0, rng).open_count() == 512);
    const auto s = sample_at(m, 0.5, rng);
    CHECK(s.open_set.size() == 512);
    CHECK(std::abs(fraction(s) - 0.5) <= 0.06);
    CHECK_THROWS(sample_at(m, 1.5, rng));
    auto r1 = trial_stream(3, 4);
    auto r2 = trial_stream(3, 4);
    CHECK(sample_at(m, 0.4, r1) == sample_at(m, 0.4, r2));
}

TEST_CASE("dual_sample") {
    const auto& m = cubical(3, 4, 1);
    auto rng = trial_stream(1, 0);
    const auto full = sample_at(m, 1.0, rng);
    const auto dual_full = dual_sample(m, full);
    CHECK(dual_full.dim == 2);
    CHECK(dual_full.open_count() == 0);
    CHECK(*dual_full.p == 0.0);
    CHECK(dual_sample(m, sample_at(m, 0.0, rng)).open_count() == m.unit_count(2));
    for (int t = 0; t < 50; ++t) {
        const auto s = sample_at(m, 0.5, rng);
        const auto dd = dual_sample(m, dual_sample(m, s));
        CHECK(dd == s);
    }
    const PercolationModel pm(ModelSpec{ModelKind::permutohedral, 2, 4, 1}, PrimeField(2));
    const auto s = sample_at(pm, 0.5, rng);
    CHECK(dual_sample(pm, dual_sample(pm, s)) == s);
    CHECK(dual_sample(pm, s).open_count() == 16 - s.open_count());
}

TEST_CASE("dual of a p=0.3 sample looks like p=0.7") {
    const auto& m = cubical(2, 8, 1);
    double total = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        auto rng = trial_stream(77, t);
        total += fraction(dual_sample(m, sample_at(m, 0.3, rng)));
    }
    CHECK(std::abs(total / trials - 0.7) <= 0.02);
}

TEST_CASE("duality audit") {
    const auto& m = cubical(2, 6, 1);
    auto rng = trial_stream(2, 0);
    const auto top = duality_audit(m, sample_at(m, 1.0, rng));
    CHECK(top.rank_phi == 2);
    CHECK(top.rank_psi == 0);
    const auto bottom = duality_audit(m, sample_at(m, 0.0, rng));
    CHECK(bottom.rank_phi == 0);
    CHECK(bottom.rank_psi == 2);
    std::size_t failures = 0;
    for (double p : {0.3, 0.5, 0.7}) {
        for (int t = 0; t < 500; ++t) {
            try {
                const auto a = duality_audit(m, sample_at(m, p, rng));
                failures += a.rank_phi + a.rank_psi != 2;
            } catch (const DualityViolation&) {
                ++failures;
            }
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("hand example: a wrapping row opens at 0.3") {
    const auto& m = cubical(2, 3, 1);
    const CubicalIndexer& ix = *m.indexer();
    WeightAssignment w;
    w.dim = 1;
    w.weight.resize(18);
    for (std::size_t n = 0; n < 18; ++n) w.weight[n] = 0.91 + 0.005 * static_cast<double>(n);
    for (int x = 0; x < 3; ++x) w.weight[ix.index_of({{x, 0}, 0b01})] = 0.1 * (x + 1);

    // scan every prefix of the sorted weights
    std::vector<std::size_t> order(18);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return w.weight[a] < w.weight[b]; });
    double scanned = 1.0;
    for (std::size_t k = 1; k <= 18; ++k) {
        PercSample s;
        s.dim = 1;
        s.open_set.assign(18, 0);
        for (std::size_t j = 0; j < k; ++j) s.open_set[order[j]] = 1;
        if (m.evaluate(s).event_A) {
            scanned = w.weight[order[k - 1]];
            break;
        }
    }
    CHECK(scanned == 0.1 * 3);
    for (auto method : {CriticalMethod::bisect, CriticalMethod::sweep, CriticalMethod::winding}) {
        const auto c = critical_probability(m, w, Event::A, method);
        CHECK(c.value == 0.1 * 3);
        REQUIRE(c.unit);
        CHECK(*c.unit == ix.index_of({{2, 0}, 0b01}));
    }
}

TEST_CASE("critical methods agree and p*_A <= p*_S") {
    const auto& m = cubical(2, 8, 1);
    for (int t = 0; t < 100; ++t) {
        auto rng = trial_stream(31, t);
        const auto w = draw_weights(m, rng);
        const auto b = critical_pair(m, w, CriticalMethod::bisect);
        const auto s = critical_pair(m, w, CriticalMethod::sweep);
        const auto u = critical_pair(m, w, CriticalMethod::winding);
        CHECK(b.A.value == u.A.value);
        CHECK(b.S.value == u.S.value);
        CHECK(s.A.value == u.A.value);
        CHECK(s.S.value == u.S.value);
        CHECK(b.A.value <= b.S.value);
    }
    const auto& m3 = cubical(3, 4, 2);
    for (int t = 0; t < 30; ++t) {
        auto rng = trial_stream(32, t);
        const auto w = draw_weights(m3, rng);
        const auto b = critical_pair(m3, w, CriticalMethod::bisect);
        const auto s = critical_pair(m3, w, CriticalMethod::sweep);
        CHECK(b.A.value == s.A.value);
        CHECK(b.S.value == s.S.value);
        CHECK(b.A.value <= b.S.value);
    }
    std::mt19937_64 r1(1);
    CHECK_THROWS(critical_pair(m3, draw_weights(m3, r1), CriticalMethod::winding));
    const PercolationModel pm(ModelSpec{ModelKind::permutohedral, 2, 6, 1}, PrimeField(2));
    for (int t = 0; t < 50; ++t) {
        auto rng = trial_stream(33, t);
        const auto w = draw_weights(pm, rng);
        const auto b = critical_pair(pm, w, CriticalMethod::bisect);
        const auto s = critical_pair(pm, w, CriticalMethod::sweep);
        const auto u = critical_pair(pm, w, CriticalMethod::winding);
        CHECK(b.A.value == u.A.value);
        CHECK(b.S.value == u.S.value);
        CHECK(s.A.value == u.A.value);
        CHECK(s.S.value == u.S.value);
    }
}

TEST_CASE("coupling is monotone") {
    const auto& m = cubical(2, 8, 1);
    auto rng = trial_stream(4, 4);
    const auto w = draw_weights(m, rng);
    std::size_t last_rank = 0;
    Membership last(w.weight.size(), 0);
    for (double u = 0.0; u <= 1.0; u += 0.05) {
        const auto s = sublevel(m, w, u);
        for (std::size_t n = 0; n < last.size(); ++n) CHECK((last[n] ? s.open_set[n] != 0 : true));
        const auto r = m.evaluate(s).rank_phi;
        CHECK(r >= last_rank);
        last_rank = r;
        last = s.open_set;
    }
}

TEST_CASE("dual weights give complementary criticals") {
    const auto& m = cubical(2, 8, 1);
    for (int t = 0; t < 100; ++t) {
        auto rng = trial_stream(5, t);
        const auto w = draw_weights(m, rng);
        const auto dw = dual_weights(m, w);
        CHECK(dw.dim == 1);
        const auto pa = critical_probability(m, w, Event::A);
        const auto ps = critical_probability(m, dw, Event::S);
        CHECK(pa.value == 1.0 - ps.value);
    }
}

TEST_CASE("run_trials is deterministic and schedule independent") {
    const auto& m = cubical(2, 8, 1);
    TrialConfig cfg;
    cfg.trials = 24;
    cfg.seed = 99;
    const auto a = run_trials(m, cfg);
    cfg.threads = 4;
    const auto b = run_trials(m, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].trial == k);
        CHECK(a[k].p_star_A == b[k].p_star_A);
        CHECK(a[k].p_star_S == b[k].p_star_S);
        CHECK(a[k].probes.size() == 3);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(a[k].probes[j].rank_phi == b[k].probes[j].rank_phi);
            CHECK(a[k].probes[j].rank_phi + a[k].probes[j].rank_psi == 2);
        }
    }
    cfg.trials = 0;
    CHECK_THROWS(run_trials(m, cfg));
}

TEST_CASE("CDF of p*_A matches Bernoulli frequency of A at p=0.5") {
    const auto& m = cubical(2, 8, 1);
    TrialConfig cfg;
    cfg.trials = 500;
    cfg.seed = 1234;
    cfg.probes.clear();
    const auto reports = run_trials(m, cfg);
    double coupled = 0.0;
    for (const auto& r : reports) coupled += r.p_star_A <= 0.5;
    coupled /= 500.0;
    double bernoulli = 0.0;
    for (int t = 0; t < 500; ++t) {
        auto rng = trial_stream(4321, t);
        bernoulli += m.evaluate(sample_at(m, 0.5, rng)).event_A;
    }
    bernoulli /= 500.0;
    const double se = std::sqrt(coupled * (1 - coupled) / 500.0 + bernoulli * (1 - bernoulli) / 500.0);
    CHECK(std::abs(coupled - bernoulli) <= 3 * se);
}

TEST_CASE("self-duality at d=2i: p*_A and 1-p*_S share a distribution") {
    const auto& m = cubical(2, 16, 1);
    TrialConfig cfg;
    cfg.trials = 500;
    cfg.seed = 2024;
    cfg.probes.clear();
    const auto reports = run_trials(m, cfg);
    std::vector<double> a, s;
    for (const auto& r : reports) {
        a.push_back(r.p_star_A);
        s.push_back(1.0 - r.p_star_S);
    }
    // two-sample KS critical value at 1%: 1.628 * sqrt(2/n)
    CHECK(ks_statistic(a, s) < 1.628 * std::sqrt(2.0 / 500.0));
}

TEST_CASE("statistics helpers") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(quantile({0.0, 10.0}, 0.25) == 2.5);
    CHECK(ks_statistic({0.1, 0.2}, {0.1, 0.2}) == 0.0);
    CHECK(ks_statistic({0.1, 0.2}, {0.3, 0.4}) == 1.0);
    CHECK_THROWS(median({}));
}
