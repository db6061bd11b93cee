#include "lknet/sync_metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace lknet;

namespace {

// Textbook Pearson r in long double, written independently of the library.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const long double n = static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const long double mx = sx / n, my = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

std::vector<double> random_window(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = e(rng);
    return v;
}

IntensityTrace synthetic_trace(std::mt19937_64& rng, std::size_t samples) {
    IntensityTrace t;
    t.sample_interval = 10e-12;
    std::exponential_distribution<double> e(1.0);
    t.samples.resize(samples);
    for (auto& s : t.samples) {
        for (auto& x : s) x = e(rng);
    }
    return t;
}

}  // namespace

TEST_CASE("STCC of a window with itself, its affine image and its negation") {
    std::mt19937_64 rng(1);
    const auto x = random_window(rng, 500);
    std::vector<double> y(x.size()), z(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [](double v) { return 3.0 * v + 7.0; });
    std::transform(x.begin(), x.end(), z.begin(), [](double v) { return 10.0 - 2.0 * v; });
    CHECK(*stcc(x, x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*stcc(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*stcc(x, z) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("STCC agrees with an independent Pearson evaluation and stays in [-1, 1]") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = 2 + rng() % 600;
        auto x = random_window(rng, n);
        auto y = random_window(rng, n);
        // Mix in a shared component so strongly correlated pairs are covered too.
        const double mix = static_cast<double>(rng() % 1000) / 1000.0;
        for (std::size_t k = 0; k < n; ++k) y[k] = mix * x[k] + (1.0 - mix) * y[k];
        const auto c = stcc(x, y);
        REQUIRE(c.has_value());
        CHECK(*c >= -1.0);
        CHECK(*c <= 1.0);
        CHECK(*c == doctest::Approx(pearson(x, y)).epsilon(1e-10));
    }
}

TEST_CASE("independent white noise gives |C| within 4 / sqrt(n)") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(5.0, 1.0);
    const std::size_t n = 500;
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    int outside = 0;
    double mean = 0.0;
    const int pairs = 10000;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < pairs; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = g(rng);
            y[k] = g(rng);
        }
        const double c = *stcc(x, y);
        mean += c / pairs;
        outside += std::abs(c) > bound ? 1 : 0;
    }
    // |C| > 4 sigma has probability ~6e-5 per pair.
    CHECK(outside <= 5);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(n * static_cast<double>(pairs)));
}

TEST_CASE("constant windows are degenerate") {
    const std::vector<double> flat(500, 2.5), zero(500, 0.0);
    std::vector<double> ramp(500);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    CHECK_FALSE(stcc(flat, ramp).has_value());
    CHECK_FALSE(stcc(ramp, flat).has_value());
    CHECK_FALSE(stcc(zero, zero).has_value());
    // Rounding-level wiggle on a large mean is still constant.
    std::vector<double> wiggle(500, 1e6);
    for (std::size_t i = 0; i < wiggle.size(); i += 2) wiggle[i] += 1e-6;
    CHECK_FALSE(stcc(wiggle, ramp).has_value());
    CHECK_THROWS_AS((void)stcc(std::vector<double>{1.0}, std::vector<double>{2.0}), NotEnoughSamples);
    CHECK_THROWS_AS((void)stcc(ramp, std::vector<double>(499, 1.0)), std::invalid_argument);
}

TEST_CASE("leader is the argmin with ties toward A") {
    using V = std::array<std::optional<double>, kSlotCount>;
    CHECK(leader_of(V{0.5, -0.2, 0.9}) == Slot::B);
    CHECK(leader_of(V{0.1, 0.1, 0.3}) == Slot::A);
    CHECK(leader_of(V{0.4, 0.1, 0.1}) == Slot::B);
    CHECK(leader_of(V{0.2, 0.2, 0.2}) == Slot::A);
    CHECK(leader_of(V{std::nullopt, 0.3, 0.2}) == Slot::C);
    CHECK(leader_of(V{std::nullopt, std::nullopt, 0.9}) == Slot::C);
    CHECK_FALSE(leader_of(V{}).has_value());
}

TEST_CASE("leader is invariant under monotone transforms and intensity rescaling") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        std::array<std::optional<double>, kSlotCount> v{u(rng), u(rng), u(rng)}, w{};
        for (std::size_t s = 0; s < kSlotCount; ++s) w[s] = std::tanh(3.0 * *v[s]) + 0.25;
        REQUIRE(leader_of(v) == leader_of(w));
    }
    const std::size_t window = 50;
    for (int i = 0; i < 200; ++i) {
        const auto trace = synthetic_trace(rng, 2 * window);
        auto scaled = trace;
        const double a = 1e-3 + static_cast<double>(rng() % 1000), b = static_cast<double>(rng() % 100);
        for (auto& s : scaled.samples) {
            for (auto& x : s) x = a * x + b;
        }
        const auto s1 = stcc_set(trace, 2 * window, window);
        const auto s2 = stcc_set(scaled, 2 * window, window);
        for (std::size_t p = 0; p < kPlayerCount; ++p) CHECK(leader_of(s1.player(p)) == leader_of(s2.player(p)));
    }
}

TEST_CASE("STCC set correlates each laser with its driver's delayed window") {
    std::mt19937_64 rng(5);
    const std::size_t window = 40;
    auto trace = synthetic_trace(rng, 3 * window);
    // 1B copies 1A one window later: C_1B = 1 exactly.
    for (std::size_t i = window; i < trace.samples.size(); ++i) {
        trace.samples[i][index(Node::L1B)] = trace.samples[i - window][index(Node::L1A)];
    }
    const auto set = stcc_set(trace, trace.samples.size(), window);
    CHECK(*set.values[index(Node::L1B)] == doctest::Approx(1.0));
    for (Node n : kAllNodes) {
        if (n == Node::L1B) continue;
        std::vector<double> own, other;
        for (std::size_t i = 0; i < window; ++i) {
            own.push_back(trace.samples[2 * window + i][index(n)]);
            other.push_back(trace.samples[window + i][index(stcc_partner(n))]);
        }
        CHECK(*set.values[index(n)] == doctest::Approx(pearson(own, other)).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)stcc_set(trace, 2 * window - 1, window), NotEnoughSamples);
    CHECK_THROWS_AS((void)stcc_set(trace, trace.samples.size() + 1, window), NotEnoughSamples);
}

TEST_CASE("the driver map follows each player's ring and respects partners") {
    for (Node n : kAllNodes) {
        // Player rings stay within the player.
        CHECK(index(stcc_partner(n)) / 3 == index(n) / 3);
        CHECK(stcc_partner(n) != n);
        // On the synchronised manifold partner lasers see partner drivers.
        CHECK(partner(stcc_partner(n)) == stcc_partner(partner(n)));
    }
}

TEST_CASE("rolling history matches the trace-based STCC set") {
    std::mt19937_64 rng(6);
    const std::size_t window = 30;
    const auto trace = synthetic_trace(rng, 5 * window + 7);
    IntensityHistory history(window);
    CHECK_THROWS_AS((void)stcc_set(history), NotEnoughSamples);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        history.push(trace.samples[i]);
        CHECK(history.ready() == (i + 1 >= 2 * window));
        if (!history.ready()) continue;
        const auto a = stcc_set(history);
        const auto b = stcc_set(trace, i + 1, window);
        for (std::size_t k = 0; k < kNodeCount; ++k) REQUIRE(a.values[k] == b.values[k]);
    }
    history.clear();
    CHECK_FALSE(history.ready());
    CHECK_THROWS_AS(IntensityHistory(1), std::invalid_argument);
}

TEST_CASE("partner-symmetric traces give equal STCC across players") {
    std::mt19937_64 rng(7);
    const std::size_t window = 25;
    auto trace = synthetic_trace(rng, 2 * window);
    for (auto& s : trace.samples) {
        for (Node n : {Node::L1A, Node::L1B, Node::L1C}) s[index(partner(n))] = s[index(n)];
    }
    const auto set = stcc_set(trace, 2 * window, window);
    CHECK(set.values[index(Node::L1A)] == set.values[index(Node::L2B)]);
    CHECK(set.values[index(Node::L1B)] == set.values[index(Node::L2C)]);
    CHECK(set.values[index(Node::L1C)] == set.values[index(Node::L2A)]);

    IntensityTrace flat;
    flat.samples.assign(2 * window, std::array<double, kNodeCount>{1, 1, 1, 1, 1, 1});
    const auto degenerate = stcc_set(flat, 2 * window, window);
    CHECK(degenerate.all_degenerate());
    CHECK_FALSE(set.all_degenerate());
}

TEST_CASE("cluster synchronisation error") {
    std::mt19937_64 rng(8);
    auto synced = synthetic_trace(rng, 4000);
    for (auto& s : synced.samples) {
        for (Node n : {Node::L1A, Node::L1B, Node::L1C}) s[index(partner(n))] = s[index(n)];
    }
    for (const auto& e : cluster_sync_error(synced)) CHECK(*e == 0.0);

    // Independent equal-variance members: E|a - b|^2 = 2 var, so the error is sqrt(2).
    std::normal_distribution<double> g(3.0, 0.5);
    IntensityTrace independent;
    independent.samples.resize(200000);
    for (auto& s : independent.samples) {
        for (auto& x : s) x = g(rng);
    }
    for (const auto& e : cluster_sync_error(independent)) CHECK(*e == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));

    // The reference member is constant: undefined.
    auto flat = independent;
    for (auto& s : flat.samples) s[index(Node::L1A)] = 1.0;
    CHECK_FALSE(cluster_sync_error(flat)[index(Color::Blue)].has_value());
    CHECK(cluster_sync_error(flat)[index(Color::Orange)].has_value());
    CHECK_THROWS_AS((void)cluster_sync_error(flat, flat.samples.size()), NotEnoughSamples);
}

TEST_CASE("leader probabilities: normalisation, partner consistency and colour symmetry") {
    const LaserParameters p;
    LeaderProbabilityOptions opt;
    opt.transient = 500e-9;
    opt.horizon = 1000e-9;
    opt.repeats = 2;
    opt.seed = 3;

    const auto bl = leader_probability({30e9, 45e9, 45e9}, p, opt);
    CHECK(bl.repeats == 2);
    CHECK(bl.decisions == 1000);
    CHECK(bl.no_leader == 0);
    for (std::size_t player = 0; player < kPlayerCount; ++player) {
        double sum = 0.0;
        for (std::size_t s = 0; s < kSlotCount; ++s) sum += bl.probability[3 * player + s];
        CHECK(sum == doctest::Approx(1.0));
    }
    for (Node n : kAllNodes) {
        CHECK(bl.probability[index(n)] == doctest::Approx(bl.probability[index(partner(n))]).epsilon(0.02));
    }
    CHECK(bl.probability[index(Node::L1B)] > 0.8);
    CHECK(bl.cluster[index(Color::Orange)] > 0.8);

    // Weakening the next colour in the cycle moves the leader one step along.
    const auto orange = leader_probability({45e9, 30e9, 45e9}, p, opt);
    const auto yellow = leader_probability({45e9, 45e9, 30e9}, p, opt);
    CHECK(orange.probability[index(Node::L1C)] > 0.8);
    CHECK(orange.probability[index(Node::L2A)] > 0.8);
    CHECK(yellow.probability[index(Node::L1A)] > 0.8);
    CHECK(yellow.probability[index(Node::L2B)] > 0.8);

    CHECK_THROWS_AS((void)leader_probability({45e9, 45e9, 45e9}, p, [&] {
        auto o = opt;
        o.repeats = 0;
        return o;
    }()), std::invalid_argument);
}

TEST_CASE("leader probabilities are reproducible from the seed") {
    const LaserParameters p;
    LeaderProbabilityOptions opt;
    opt.transient = 200e-9;
    opt.horizon = 200e-9;
    opt.repeats = 2;
    const auto a = leader_probability({45e9, 45e9, 45e9}, p, opt);
    const auto b = leader_probability({45e9, 45e9, 45e9}, p, opt);
    CHECK(a.probability == b.probability);
}
