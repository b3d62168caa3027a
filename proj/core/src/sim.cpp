#include "ecdc/sim.hpp"

#include "ecdc/errors.hpp"
#include "ecdc/parallel.hpp"
#include "ecdc/reward.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace ecdc {

namespace {

constexpr double kBurnIn = 0.01;
constexpr int kBatches = 20;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct JumpTable {
    std::vector<double> exit_rate;
    std::vector<std::vector<double>> cumulative;
    std::vector<std::vector<std::size_t>> target;
};

JumpTable jump_table(const Matrix& Q) {
    const auto n = static_cast<std::size_t>(Q.rows());
    JumpTable t{std::vector<double>(n), std::vector<std::vector<double>>(n),
                std::vector<std::vector<std::size_t>>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || Q(i, j) <= 0.0) continue;
            acc += Q(i, j);
            t.cumulative[i].push_back(acc);
            t.target[i].push_back(j);
        }
        if (acc <= 0.0) throw NumericalError("absorbing state encountered in simulation");
        t.exit_rate[i] = acc;
    }
    return t;
}

struct RepOutcome {
    double average = 0.0;
    std::vector<double> batch_average;
    Vector occupancy;
    std::uint64_t jumps = 0;
};

RepOutcome run_rep(const JumpTable& t, const Vector& f, double horizon, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double start = kBurnIn * horizon;
    const double window = horizon - start;
    const double batch_len = window / kBatches;

    RepOutcome out;
    out.occupancy = Vector::Zero(f.size());
    out.batch_average.assign(kBatches, 0.0);
    std::size_t s = 0;
    double now = 0.0;
    while (now < horizon) {
        std::exponential_distribution<double> hold(t.exit_rate[s]);
        const double next = std::min(now + hold(rng), horizon);
        // Credit the part of [now, next) inside the measurement window, per batch.
        double a = std::max(now, start);
        while (a < next) {
            const int b = std::min(kBatches - 1, static_cast<int>((a - start) / batch_len));
            const double batch_end = (b == kBatches - 1) ? horizon : start + (b + 1) * batch_len;
            const double e = std::min(next, batch_end);
            out.batch_average[b] += f(s) * (e - a);
            out.occupancy(s) += e - a;
            a = e;
        }
        now = next;
        if (now >= horizon) break;
        const double u = unif(rng) * t.exit_rate[s];
        const auto& cum = t.cumulative[s];
        const auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        s = t.target[s][std::min(k, cum.size() - 1)];
        ++out.jumps;
    }
    double total = 0.0;
    for (double& b : out.batch_average) {
        total += b;
        b /= batch_len;
    }
    out.average = total / window;
    out.occupancy /= window;
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

} // namespace

SimResult simulate(const ModelParams& p, const Policy& d, double horizon, std::uint64_t seed, int reps) {
    if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");
    if (reps < 1) throw ValidationError("reps must be >= 1");
    const GeneratorMatrix G = build_generator(p, d);
    const Vector f = reward_vector(p, d, G.space).f();
    const JumpTable table = jump_table(G.Q);

    std::vector<RepOutcome> outcomes(reps);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        outcomes[r] = run_rep(table, f, horizon, splitmix64(seed ^ splitmix64(r)));
    });

    SimResult res;
    res.horizon = horizon;
    res.seed = seed;
    res.reps = reps;
    res.occupancy = Vector::Zero(f.size());
    std::vector<double> averages;
    for (const auto& o : outcomes) {
        averages.push_back(o.average);
        res.jumps += o.jumps;
        res.occupancy += o.occupancy / reps;
    }
    res.etaHat = mean(averages);
    res.stderr_ = reps >= 2 ? standard_error(averages) : standard_error(outcomes.front().batch_average);
    return res;
}

} // namespace ecdc
