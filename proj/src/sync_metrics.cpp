#include "lknet/sync_metrics.hpp"

#include "lknet/seeding.hpp"

#include <algorithm>
#include <cmath>

namespace lknet {

namespace {

struct Moments {
    double mean;
    double stddev;
};

Moments moments(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(x.size()))};
}

bool degenerate(const Moments& m) {
    return !(m.stddev > kDegenerateRelativeStd * std::abs(m.mean)) || m.stddev == 0.0;
}

}  // namespace

std::optional<double> stcc(std::span<const double> current, std::span<const double> delayed) {
    if (current.size() != delayed.size()) throw std::invalid_argument("stcc: window sizes differ");
    if (current.size() < 2) throw NotEnoughSamples("stcc: windows need at least 2 samples");
    const Moments a = moments(current);
    const Moments b = moments(delayed);
    if (degenerate(a) || degenerate(b)) return std::nullopt;
    double acc = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
        acc += (current[i] - a.mean) * (delayed[i] - b.mean);
    }
    const double r = acc / (static_cast<double>(current.size()) * a.stddev * b.stddev);
    return std::clamp(r, -1.0, 1.0);
}

bool StccSet::all_degenerate() const noexcept {
    return std::none_of(values.begin(), values.end(), [](const auto& v) { return v.has_value(); });
}

IntensityHistory::IntensityHistory(std::size_t window_samples)
    : window_(window_samples), ring_(2 * window_samples) {
    if (window_samples < 2) throw std::invalid_argument("IntensityHistory: window must hold >= 2 samples");
}

void IntensityHistory::push(const std::array<double, kNodeCount>& sample) {
    ring_[head_] = sample;
    head_ = (head_ + 1) % ring_.size();
    count_ = std::min(count_ + 1, ring_.size());
}

void IntensityHistory::clear() noexcept {
    head_ = 0;
    count_ = 0;
}

void IntensityHistory::copy_span(Node n, std::span<double> out) const {
    if (!ready()) throw NotEnoughSamples("intensity history does not yet cover two delay windows");
    if (out.size() != ring_.size()) throw std::invalid_argument("copy_span: output size mismatch");
    const std::size_t k = index(n);
    // Once full, head_ points at the oldest sample.
    for (std::size_t i = 0; i < ring_.size(); ++i) out[i] = ring_[(head_ + i) % ring_.size()][k];
}

StccSet stcc_set(const IntensityHistory& history) {
    const std::size_t w = history.window();
    std::array<std::vector<double>, kNodeCount> spans;
    for (Node n : kAllNodes) {
        spans[index(n)].resize(2 * w);
        history.copy_span(n, spans[index(n)]);
    }
    StccSet out;
    for (Node n : kAllNodes) {
        const std::span<const double> own(spans[index(n)]);
        const std::span<const double> other(spans[index(stcc_partner(n))]);
        out.values[index(n)] = stcc(own.subspan(w, w), other.subspan(0, w));
    }
    return out;
}

StccSet stcc_set(const IntensityTrace& trace, std::size_t end, std::size_t window) {
    if (window < 2) throw std::invalid_argument("stcc_set: window must hold >= 2 samples");
    if (end > trace.samples.size() || end < 2 * window) {
        throw NotEnoughSamples("stcc_set: trace does not cover [t - 2 tau, t]");
    }
    std::vector<double> own(window), other(window);
    StccSet out;
    for (Node n : kAllNodes) {
        const std::size_t src = index(stcc_partner(n));
        for (std::size_t i = 0; i < window; ++i) {
            own[i] = trace.samples[end - window + i][index(n)];
            other[i] = trace.samples[end - 2 * window + i][src];
        }
        out.values[index(n)] = stcc(own, other);
    }
    return out;
}

std::optional<Slot> leader_of(const std::array<std::optional<double>, kSlotCount>& values) {
    std::optional<Slot> best;
    for (Slot s : kAllSlots) {
        const auto& v = values[index(s)];
        if (!v) continue;
        if (!best || *v < *values[index(*best)]) best = s;
    }
    return best;
}

std::array<std::optional<double>, kColorCount> cluster_sync_error(const IntensityTrace& trace,
                                                                  std::size_t first_sample) {
    constexpr std::array<std::array<Node, 2>, kColorCount> members{{
        {Node::L1A, Node::L2B},
        {Node::L1B, Node::L2C},
        {Node::L1C, Node::L2A},
    }};
    if (first_sample >= trace.samples.size()) throw NotEnoughSamples("cluster_sync_error: empty range");
    const std::size_t count = trace.samples.size() - first_sample;

    std::array<std::optional<double>, kColorCount> out{};
    for (std::size_t c = 0; c < kColorCount; ++c) {
        const std::size_t a = index(members[c][0]);
        const std::size_t b = index(members[c][1]);
        double mean = 0.0;
        for (std::size_t i = first_sample; i < trace.samples.size(); ++i) mean += trace.samples[i][a];
        mean /= static_cast<double>(count);
        double diff = 0.0, spread = 0.0;
        for (std::size_t i = first_sample; i < trace.samples.size(); ++i) {
            const auto& s = trace.samples[i];
            diff += (s[a] - s[b]) * (s[a] - s[b]);
            spread += (s[a] - mean) * (s[a] - mean);
        }
        if (!(spread > 0.0) || std::sqrt(spread / count) <= kDegenerateRelativeStd * std::abs(mean)) continue;
        out[c] = std::sqrt(diff / spread);
    }
    return out;
}

LeaderProbabilityTable leader_probability(const CouplingStrengths& kappa, const LaserParameters& params,
                                          const LeaderProbabilityOptions& opt) {
    if (opt.repeats == 0) throw std::invalid_argument("leader_probability: repeats must be >= 1");
    const Integrator integrator(params, opt.integrator);
    const double dt = integrator.dt();
    const auto sample_every = steps_in(opt.sample_interval, dt, "STCC sample interval");
    const auto decision_every = steps_in(opt.decision_interval, dt, "decision interval");
    if (sample_every < 1 || decision_every < 1) throw InvalidParameter("intervals must be >= dt");
    if (decision_every % sample_every != 0) {
        throw InvalidParameter("decision interval must be a multiple of the STCC sample interval");
    }
    const auto window = static_cast<std::size_t>(
        steps_in(params.coupling_delay, opt.sample_interval, "coupling delay on the STCC grid"));
    const auto transient_steps = steps_in(opt.transient, dt, "transient");
    const auto horizon_steps = steps_in(opt.horizon, dt, "horizon");
    if (transient_steps < 2 * static_cast<std::int64_t>(window) * sample_every) {
        throw InvalidParameter("transient must cover at least two coupling delays");
    }

    LeaderProbabilityTable table;
    table.repeats = opt.repeats;
    table.decisions = static_cast<std::uint64_t>(horizon_steps / decision_every);
    std::array<std::size_t, kPlayerCount> valid_repeats{};

    for (std::size_t r = 0; r < opt.repeats; ++r) {
        const std::uint64_t seed = trial_seed(opt.seed, r);
        std::mt19937_64 init_rng(stream_seed(seed, 0));
        std::mt19937_64 noise_rng(stream_seed(seed, 2));
        const auto initial = random_initial_states(params, init_rng, opt.partner_identical);
        NetworkState net = make_network(params, dt, initial);
        IntensityHistory history(window);
        auto record = [&](const NetworkState& s) { history.push(s.intensities()); };

        integrator.advance(net, kappa, transient_steps, sample_every, record, &noise_rng);

        std::array<std::array<std::uint64_t, kSlotCount>, kPlayerCount> counts{};
        for (std::int64_t d = 0; d < horizon_steps / decision_every; ++d) {
            integrator.advance(net, kappa, decision_every, sample_every, record, &noise_rng);
            const StccSet set = stcc_set(history);
            for (std::size_t p = 0; p < kPlayerCount; ++p) {
                if (const auto leader = leader_of(set.player(p))) {
                    ++counts[p][index(*leader)];
                } else {
                    ++table.no_leader;
                }
            }
        }
        for (std::size_t p = 0; p < kPlayerCount; ++p) {
            std::uint64_t total = 0;
            for (auto c : counts[p]) total += c;
            if (total == 0) continue;
            ++valid_repeats[p];
            for (std::size_t s = 0; s < kSlotCount; ++s) {
                table.probability[3 * p + s] += static_cast<double>(counts[p][s]) / static_cast<double>(total);
            }
        }
    }
    for (std::size_t p = 0; p < kPlayerCount; ++p) {
        for (std::size_t s = 0; s < kSlotCount; ++s) {
            if (valid_repeats[p] > 0) table.probability[3 * p + s] /= static_cast<double>(valid_repeats[p]);
        }
    }
    for (Node n : {Node::L1A, Node::L1B, Node::L1C}) {
        table.cluster[index(cluster_of(n))] =
            0.5 * (table.probability[index(n)] + table.probability[index(partner(n))]);
    }
    return table;
}

}  // namespace lknet
