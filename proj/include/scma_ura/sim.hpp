#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "analysis.hpp"
#include "barring.hpp"
#include "codebook.hpp"
#include "decoder.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "traffic.hpp"

namespace scma_ura {

enum class DecoderPolicy { ComponentWise, AllOrNothing, JmpaOnly };
enum class ArrivalMode { Fixed, Sweep, Schedule };

inline const char* to_string(DecoderPolicy p) noexcept
{
    switch (p) {
    case DecoderPolicy::ComponentWise: return "component";
    case DecoderPolicy::AllOrNothing: return "all-or-nothing";
    case DecoderPolicy::JmpaOnly: return "jmpa-only";
    }
    return "?";
}

inline const char* to_string(ArrivalMode m) noexcept
{
    switch (m) {
    case ArrivalMode::Fixed: return "fixed";
    case ArrivalMode::Sweep: return "sweep";
    case ArrivalMode::Schedule: return "schedule";
    }
    return "?";
}

inline const char* to_string(ObservabilityRule r) noexcept { return r == ObservabilityRule::Direct ? "direct" : "post-decode"; }

struct SimConfig {
    std::string codebook = "f6x15"; // built-in name or matrix file path
    int n_groups = 1;
    int slots_per_frame = 25;
    int n_frames = 300;
    ArrivalMode arrival = ArrivalMode::Sweep;
    double rate = 4.0;
    GridSpec sweep{0.5, 8.0, 0.5};
    bool barring = false;
    double initial_alpha = 1.0;
    DecoderPolicy policy = DecoderPolicy::ComponentWise;
    ObservabilityRule observability = ObservabilityRule::Direct;
    std::uint64_t seed = 1;
    int replications = 10;
    long long slots_per_replication = 100000;
    int threads = 0; // 0: hardware concurrency

    void validate() const
    {
        if (slots_per_frame < 1)
            throw Error(ErrorCode::InvalidConfig, "frame.slots must be >= 1");
        if (n_frames < 1)
            throw Error(ErrorCode::InvalidConfig, "frame.count must be >= 1");
        if (n_groups < 1)
            throw Error(ErrorCode::InvalidConfig, "sim.groups must be >= 1");
        if (replications < 2)
            throw Error(ErrorCode::InvalidConfig, "sim.replications must be >= 2 for confidence intervals");
        if (slots_per_replication < 1)
            throw Error(ErrorCode::InvalidConfig, "sim.slots must be >= 1");
        if (!(rate >= 0.0))
            throw Error(ErrorCode::InvalidConfig, "arrival.rate must be >= 0");
        if (!(initial_alpha > 0.0 && initial_alpha <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "barring.initial_alpha must lie in (0, 1]");
        if (threads < 0)
            throw Error(ErrorCode::InvalidConfig, "sim.threads must be >= 0");
        (void)sweep.size();
    }
};

inline DecodeOutcome decode_with(const SlotPattern& p, const IndicatorMatrix& f, DecoderPolicy policy)
{
    switch (policy) {
    case DecoderPolicy::ComponentWise: return decode(p, f, ResidualPolicy::ComponentWise);
    case DecoderPolicy::AllOrNothing: return decode(p, f, ResidualPolicy::AllOrNothing);
    case DecoderPolicy::JmpaOnly: return decode_jmpa_only_outcome(p, f);
    }
    return {};
}

struct SlotMetrics {
    int n_arrivals = 0;
    int n_active = 0;
    int n_decoded = 0;
    int n_decoded_ic = 0;
    int observed_idle = 0;
};

/// Everything a slot needs besides the load and the random stream.
struct SlotRunner {
    const IndicatorMatrix* f = nullptr;
    DecoderPolicy policy = DecoderPolicy::ComponentWise;
    ObservabilityRule rule = ObservabilityRule::Direct;

    /// Decodes a given pattern; used for golden tests of worked examples.
    SlotMetrics run_forced(const SlotPattern& p, DecodeOutcome* trace = nullptr) const
    {
        DecodeOutcome out = decode_with(p, *f, policy);
        const auto obs = observability(p, out, *f, rule);
        SlotMetrics m;
        m.n_arrivals = p.n_active;
        m.n_active = p.n_active;
        m.n_decoded = out.n_decoded;
        m.n_decoded_ic = out.n_decoded_ic;
        m.observed_idle = static_cast<int>(obs.observed_idle_cbs.size());
        if (trace)
            *trace = std::move(out);
        return m;
    }

    SlotMetrics run(double rate, double alpha, Rng& rng, DecodeOutcome* trace = nullptr) const
    {
        const int arrived = sample_arrivals({rate, alpha}, rng);
        const int admitted = apply_barring(arrived, alpha, rng);
        const SlotPattern p = select_codebooks(admitted, f->n_cb(), rng);
        SlotMetrics m = run_forced(p, trace);
        m.n_arrivals = arrived;
        return m;
    }
};

inline SlotMetrics run_slot(const SlotRunner& runner, double rate, Rng& rng, double alpha = 1.0)
{
    return runner.run(rate, alpha, rng);
}

/// Mean and 95% confidence half-width over independent replications.
struct Estimate {
    double mean = 0;
    double half_width = 0;
};

inline Estimate summarize(const std::vector<double>& reps)
{
    const auto n = reps.size();
    if (n == 0)
        return {};
    double mean = 0;
    for (double v : reps)
        mean += v;
    mean /= static_cast<double>(n);
    if (n < 2)
        return {mean, std::numeric_limits<double>::quiet_NaN()};
    double ss = 0;
    for (double v : reps)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return {mean, t * sd / std::sqrt(static_cast<double>(n))};
}

namespace detail {

inline int worker_count(int requested, std::size_t tasks)
{
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0)
        hw = 1;
    const int n = requested > 0 ? requested : hw;
    return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(n), tasks)));
}

// Runs task(i) for i in [0, n); results must be written by index.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task)
{
    const int workers = worker_count(threads, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

struct ReplicationTotals {
    double decoded = 0;
    double decoded_ic = 0;
    double active = 0;
    double idle_fraction = 0;
    long long slots = 0;
};

inline ReplicationTotals simulate_stationary(const SlotRunner& runner, double rate, long long slots, Rng& rng)
{
    ReplicationTotals t;
    const double k = runner.f->n_cb();
    for (long long s = 0; s < slots; ++s) {
        const auto m = runner.run(rate, 1.0, rng);
        t.decoded += m.n_decoded;
        t.decoded_ic += m.n_decoded_ic;
        t.active += m.n_active;
        t.idle_fraction += m.observed_idle / k;
    }
    t.slots = slots;
    return t;
}

} // namespace detail

struct PointStats {
    double lambda_bar = 0;
    Estimate throughput;
    Estimate p_idle;
    double ic_fraction = 0; // decoded-by-IC share of all decodes
    double mean_active = 0;
};

struct SweepResult {
    std::vector<PointStats> points;
};

/// Stationary Monte Carlo at each offered load in `loads`.
///
/// Replication r of point i runs on the stream derive_seed(seed, sweep, i, r),
/// so results do not depend on the worker count.
inline SweepResult run_sweep(const SimConfig& cfg, const IndicatorMatrix& f, const std::vector<double>& loads)
{
    cfg.validate();
    const SlotRunner runner{&f, cfg.policy, cfg.observability};
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    std::vector<detail::ReplicationTotals> totals(loads.size() * reps);
    detail::parallel_for(totals.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t point = idx / reps;
        const std::size_t rep = idx % reps;
        Rng rng = make_stream(cfg.seed, stream_kind::sweep, point, rep);
        totals[idx] = detail::simulate_stationary(runner, loads[point], cfg.slots_per_replication, rng);
    });

    SweepResult out;
    for (std::size_t p = 0; p < loads.size(); ++p) {
        std::vector<double> thr;
        std::vector<double> idle;
        double ic = 0;
        double dec = 0;
        double active = 0;
        double slots = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& t = totals[p * reps + r];
            thr.push_back(t.decoded / static_cast<double>(t.slots));
            idle.push_back(t.idle_fraction / static_cast<double>(t.slots));
            ic += t.decoded_ic;
            dec += t.decoded;
            active += t.active;
            slots += static_cast<double>(t.slots);
        }
        out.points.push_back({loads[p], summarize(thr), summarize(idle), dec > 0 ? ic / dec : 0.0, active / slots});
    }
    return out;
}

inline std::vector<double> grid_values(const GridSpec& g)
{
    std::vector<double> v;
    const int n = g.size();
    for (int i = 0; i < n; ++i)
        v.push_back(g.at(i));
    return v;
}

inline SweepResult run_sweep(const SimConfig& cfg, const IndicatorMatrix& f) { return run_sweep(cfg, f, grid_values(cfg.sweep)); }

struct BarringResult {
    std::vector<FrameRecord> history;
    bool barring_enabled = false;

    /// Mean per-frame throughput over 1-based frames [first, last].
    double mean_throughput(int first, int last) const
    {
        double s = 0;
        int n = 0;
        for (const auto& r : history)
            if (r.frame >= first && r.frame <= last) {
                s += r.t_obs;
                ++n;
            }
        return n ? s / n : 0.0;
    }

    double estimate_mae() const
    {
        double s = 0;
        for (const auto& r : history)
            s += std::abs(r.lambda_hat - r.admitted_load());
        return history.empty() ? 0.0 : s / static_cast<double>(history.size());
    }
};

inline double offered_load(const SimConfig& cfg, int frame)
{
    return cfg.arrival == ArrivalMode::Schedule ? static_cast<double>(arrival_schedule(frame)) : cfg.rate;
}

/// Frame-by-frame campaign; alpha is held for a frame and updated at its end.
/// `replication` selects the stream derive_seed(seed, barring, replication).
inline BarringResult run_barring_campaign(const SimConfig& cfg, const IndicatorMatrix& f, const LoadTable& table,
    std::uint64_t replication = 0)
{
    cfg.validate();
    const SlotRunner runner{&f, cfg.policy, cfg.observability};
    BarringController ctl(table, cfg.initial_alpha, cfg.barring);
    Rng rng = make_stream(cfg.seed, stream_kind::barring, replication);
    std::vector<SlotObservation> frame(cfg.slots_per_frame);
    for (int fr = 1; fr <= cfg.n_frames; ++fr) {
        const double load = offered_load(cfg, fr);
        const double alpha = ctl.alpha();
        for (auto& s : frame) {
            const auto m = runner.run(load, alpha, rng);
            s = {m.n_decoded, m.observed_idle};
        }
        ctl.end_frame(fr, load, frame, f.n_cb());
    }
    return {ctl.state().history, cfg.barring};
}

struct GroupResult {
    int n_groups = 1;
    double lambda_total = 0;
    Estimate aggregate;
    std::vector<double> group_means;
};

/// G independent copies of the codebook, each fed Poisson(lambda_total / G).
///
/// Group g, replication r uses derive_seed(seed, sweep, g, r): with G = 1
/// this is exactly the stream of a one-point run_sweep.
inline GroupResult run_groups(const SimConfig& cfg, const IndicatorMatrix& f, int n_groups, double lambda_total)
{
    cfg.validate();
    if (n_groups < 1)
        throw Error(ErrorCode::InvalidConfig, "group count must be >= 1");
    const SlotRunner runner{&f, cfg.policy, cfg.observability};
    const double per_group = lambda_total / n_groups;
    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    const std::size_t groups = static_cast<std::size_t>(n_groups);
    std::vector<double> means(groups * reps);
    detail::parallel_for(means.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t g = idx / reps;
        const std::size_t r = idx % reps;
        Rng rng = make_stream(cfg.seed, stream_kind::sweep, g, r);
        const auto t = detail::simulate_stationary(runner, per_group, cfg.slots_per_replication, rng);
        means[idx] = t.decoded / static_cast<double>(t.slots);
    });

    GroupResult out;
    out.n_groups = n_groups;
    out.lambda_total = lambda_total;
    std::vector<double> agg(reps, 0.0);
    out.group_means.assign(groups, 0.0);
    for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t r = 0; r < reps; ++r) {
            agg[r] += means[g * reps + r];
            out.group_means[g] += means[g * reps + r] / static_cast<double>(reps);
        }
    out.aggregate = summarize(agg);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

inline constexpr double kEnumerationLimit = 1e7;

/// Calls visit(choices) for every ordered selection of n users over K
/// codebooks (K^n patterns). Throws TooLarge beyond kEnumerationLimit.
inline void for_each_selection(int n_cb, int n_users, const std::function<void(const std::vector<int>&)>& visit)
{
    if (std::pow(static_cast<double>(n_cb), n_users) > kEnumerationLimit)
        throw Error(ErrorCode::TooLarge, std::to_string(n_cb) + "^" + std::to_string(n_users) + " patterns exceed the enumeration limit");
    std::vector<int> choice(n_users, 0);
    for (;;) {
        visit(choice);
        int i = n_users - 1;
        while (i >= 0 && ++choice[i] == n_cb)
            choice[i--] = 0;
        if (i < 0)
            return;
    }
}

/// Calls visit(counts, weight) for every count vector of n users over K
/// codebooks, where weight is its probability under uniform selection.
inline void for_each_composition(int n_cb, int n_users, const std::function<void(const std::vector<int>&, double)>& visit)
{
    if (static_cast<double>(detail::binomial(n_users + n_cb - 1, n_cb - 1)) > kEnumerationLimit)
        throw Error(ErrorCode::TooLarge, "count vectors for " + std::to_string(n_users) + " users exceed the enumeration limit");
    std::vector<int> counts(n_cb, 0);
    const double log_norm = std::lgamma(n_users + 1.0) - n_users * std::log(static_cast<double>(n_cb));
    std::function<void(int, int, double)> rec = [&](int k, int left, double log_w) {
        if (k == n_cb - 1) {
            counts[k] = left;
            visit(counts, std::exp(log_norm + log_w - std::lgamma(left + 1.0)));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            counts[k] = c;
            rec(k + 1, left - c, log_w - std::lgamma(c + 1.0));
        }
    };
    rec(0, n_users, 0.0);
}

/// Exact E[decoded | n active users] over the K^n equally likely selection
/// patterns. Patterns sharing a count vector decode identically, so the sum
/// runs over count vectors with multinomial weights.
inline double brute_force_expected_throughput(const IndicatorMatrix& f, int n_users, DecoderPolicy policy)
{
    if (n_users < 0)
        throw Error(ErrorCode::InvalidConfig, "user count must be >= 0");
    double e = 0;
    for_each_composition(f.n_cb(), n_users, [&](const std::vector<int>& counts, double w) {
        e += w * decode_with(SlotPattern(counts), f, policy).n_decoded;
    });
    return e;
}

/// sum_n P(n; lambda_bar) E[decoded | n], truncated once the Poisson tail
/// times the maximum possible throughput falls below `tail_tolerance`.
inline double poisson_mixed_throughput(const IndicatorMatrix& f, double lambda_bar, DecoderPolicy policy,
    double tail_tolerance = 1e-10)
{
    double acc = 0;
    double mass = 0;
    for (int n = 0;; ++n) {
        const double pn = poisson_pmf(n, lambda_bar);
        acc += pn * brute_force_expected_throughput(f, n, policy);
        mass += pn;
        if (n >= lambda_bar && (1.0 - mass) * f.n_cb() < tail_tolerance)
            break;
    }
    return acc;
}

} // namespace scma_ura
