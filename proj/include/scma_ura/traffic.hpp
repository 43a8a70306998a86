#pragma once

#include <random>
#include <vector>

#include "codebook.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace scma_ura {

struct ArrivalConfig {
    double rate = 0.0;          // mean arrivals per slot
    double barring_alpha = 1.0; // access probability

    void validate() const
    {
        if (!(rate >= 0.0))
            throw Error(ErrorCode::InvalidConfig, "arrival rate must be non-negative");
        if (!(barring_alpha > 0.0 && barring_alpha <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "access probability must lie in (0, 1]");
    }
};

/// Per-codebook selection counts for one slot (a_k users on codebook k).
struct SlotPattern {
    std::vector<int> counts;
    int n_active = 0;

    SlotPattern() = default;
    explicit SlotPattern(std::vector<int> c) : counts(std::move(c))
    {
        for (int v : counts) {
            if (v < 0)
                throw Error(ErrorCode::InconsistentPattern, "negative codebook count");
            n_active += v;
        }
    }

    int n_cb() const noexcept { return static_cast<int>(counts.size()); }
    bool collided(int cb) const { return counts[cb] >= 2; }
    bool has_collision() const
    {
        for (int v : counts)
            if (v >= 2)
                return true;
        return false;
    }
};

/// A = diag(a) F, stored row-major as N x K, plus per-FN occupancy.
struct ActivePattern {
    int n_fn = 0;
    int n_cb = 0;
    std::vector<int> matrix;
    std::vector<int> fn_load;

    int at(int fn, int cb) const { return matrix[static_cast<std::size_t>(fn) * n_cb + cb]; }
    int& at(int fn, int cb) { return matrix[static_cast<std::size_t>(fn) * n_cb + cb]; }

    friend bool operator==(const ActivePattern&, const ActivePattern&) = default;
};

inline int sample_arrivals(const ArrivalConfig& cfg, Rng& rng)
{
    if (cfg.rate <= 0.0)
        return 0;
    std::poisson_distribution<int> dist(cfg.rate);
    return dist(rng);
}

// Independent thinning of each arrival with probability alpha.
inline int apply_barring(int n_arrived, double alpha, Rng& rng)
{
    if (n_arrived <= 0)
        return 0;
    if (alpha >= 1.0)
        return n_arrived;
    std::binomial_distribution<int> dist(n_arrived, alpha);
    return dist(rng);
}

inline SlotPattern select_codebooks(int n_admitted, int n_cb, Rng& rng)
{
    if (n_cb < 1)
        throw Error(ErrorCode::DimensionMismatch, "codebook pool is empty");
    SlotPattern p;
    p.counts.assign(n_cb, 0);
    std::uniform_int_distribution<int> pick(0, n_cb - 1);
    for (int i = 0; i < n_admitted; ++i)
        ++p.counts[pick(rng)];
    p.n_active = n_admitted;
    return p;
}

inline ActivePattern active_pattern(const SlotPattern& a, const IndicatorMatrix& f)
{
    if (a.n_cb() != f.n_cb())
        throw Error(ErrorCode::DimensionMismatch,
            "pattern has " + std::to_string(a.n_cb()) + " codebooks, indicator matrix has " + std::to_string(f.n_cb()));
    ActivePattern out;
    out.n_fn = f.n_fn();
    out.n_cb = f.n_cb();
    out.matrix.assign(static_cast<std::size_t>(out.n_fn) * out.n_cb, 0);
    out.fn_load.assign(out.n_fn, 0);
    for (int k = 0; k < out.n_cb; ++k) {
        const int ak = a.counts[k];
        if (ak == 0)
            continue;
        for (int n : f.fns_of(k)) {
            out.at(n, k) = ak;
            out.fn_load[n] += ak;
        }
    }
    return out;
}

/// Recovers a from A, verifying that A has the form diag(a) F.
inline SlotPattern pattern_of(const ActivePattern& act, const IndicatorMatrix& f)
{
    if (act.n_fn != f.n_fn() || act.n_cb != f.n_cb())
        throw Error(ErrorCode::DimensionMismatch, "active pattern shape does not match the indicator matrix");
    std::vector<int> counts(act.n_cb, 0);
    for (int k = 0; k < act.n_cb; ++k) {
        const int ak = act.at(f.fns_of(k).front(), k);
        for (int n = 0; n < act.n_fn; ++n) {
            const int expected = f.at(n, k) ? ak : 0;
            if (act.at(n, k) != expected)
                throw Error(ErrorCode::InconsistentPattern,
                    "column " + std::to_string(k + 1) + " is not a multiple of the indicator column");
        }
        counts[k] = ak;
    }
    return SlotPattern(std::move(counts));
}

/// Offered load for 1-based frame index: 1 for frames 1-20, then +1 every
/// 20 frames (frame 21 -> 2, frame 41 -> 3, ...).
inline int arrival_schedule(int frame_index)
{
    if (frame_index < 1)
        throw Error(ErrorCode::InvalidIndex, "frame index must be >= 1, got " + std::to_string(frame_index));
    if (frame_index <= 20)
        return 1;
    return (frame_index - 20 + 19) / 20 + 1;
}

} // namespace scma_ura
