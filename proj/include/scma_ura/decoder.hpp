#pragma once

#include <algorithm>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "codebook.hpp"
#include "error.hpp"
#include "traffic.hpp"

namespace scma_ura {

enum class Mechanism { IC, ResidualJmpa };

inline const char* to_string(Mechanism m) noexcept { return m == Mechanism::IC ? "IC" : "JMPA"; }

/// How the joint detector treats what is left once no single FN remains.
enum class ResidualPolicy {
    /// Each connected component of the residual factor graph is decoded
    /// iff it holds no collided codebook.
    ComponentWise,
    /// The whole residual is decoded iff it holds no collided codebook.
    AllOrNothing,
};

/// Which FNs the AP is able to read after decoding a slot.
enum class ObservabilityRule {
    /// FN is idle or single on arrival, or the slot is collision-free
    /// (everything decodes, so every FN is known).
    Direct,
    /// FN has zero residual occupancy after decoding, including FNs cleared
    /// by cascaded cancellation.
    PostDecode,
};

struct DecodeStep {
    int fn = -1; // -1 for residual-JMPA decodes
    int cb = 0;
    Mechanism by = Mechanism::IC;
};

struct PeelStep {
    int fn = 0;
    int cb = 0;
    friend bool operator==(const PeelStep&, const PeelStep&) = default;
};

/// Trace of one slot's decoding; all indices are 0-based.
struct DecodeOutcome {
    std::vector<DecodeStep> steps;   // every decode in order
    std::vector<PeelStep> peel_order;
    std::vector<int> residual_counts; // a with decoded codebooks zeroed
    std::vector<int> residual_load;   // per-FN occupancy after cancellation
    int n_decoded = 0;
    int n_decoded_ic = 0;
    int jmpa_rounds_with_work = 0;

    /// Decoded codebooks, ascending.
    std::vector<int> decoded_cbs() const
    {
        std::vector<int> out;
        out.reserve(steps.size());
        for (const auto& s : steps)
            out.push_back(s.cb);
        std::sort(out.begin(), out.end());
        return out;
    }

    ActivePattern residual(const IndicatorMatrix& f) const { return active_pattern(SlotPattern(residual_counts), f); }
};

struct ObservabilityReport {
    std::vector<int> observable_fns;
    std::vector<int> observed_idle_cbs;
};

namespace detail {

inline std::vector<int> fn_loads(std::span<const int> counts, const IndicatorMatrix& f)
{
    std::vector<int> load(f.n_fn(), 0);
    for (int k = 0; k < f.n_cb(); ++k)
        if (counts[k])
            for (int n : f.fns_of(k))
                load[n] += counts[k];
    return load;
}

inline void cancel(DecodeOutcome& out, const IndicatorMatrix& f, int cb, int fn, Mechanism by)
{
    out.residual_counts[cb] = 0;
    for (int n : f.fns_of(cb))
        --out.residual_load[n];
    out.steps.push_back({fn, cb, by});
    if (by == Mechanism::IC) {
        out.peel_order.push_back({fn, cb});
        ++out.n_decoded_ic;
    }
    ++out.n_decoded;
}

// Sole remaining occupant of an FN whose residual load is 1.
inline int sole_occupant(const DecodeOutcome& out, const IndicatorMatrix& f, int fn)
{
    for (int k : f.cbs_on(fn))
        if (out.residual_counts[k] > 0) {
            // a_k >= 2 would put load >= 2 on every FN of k.
            if (out.residual_counts[k] != 1)
                throw Error(ErrorCode::InconsistentPattern, "single FN occupied by a collided codebook");
            return k;
        }
    throw Error(ErrorCode::InconsistentPattern, "FN load does not match codebook counts");
}

// Peels to exhaustion. With no explicit order, FNs are visited ascending and
// the footprint of the most recent cancellation is checked first, so a
// freshly created single FN is consumed before older ones. An explicit
// order disables that preference and rescans in the given order.
inline void peel_in_place(DecodeOutcome& out, const IndicatorMatrix& f, std::span<const int> order)
{
    const int n_fn = f.n_fn();
    int last_cb = -1;
    for (;;) {
        int single = -1;
        if (order.empty()) {
            if (last_cb >= 0)
                for (int n : f.fns_of(last_cb))
                    if (out.residual_load[n] == 1) {
                        single = n;
                        break;
                    }
            for (int n = 0; single < 0 && n < n_fn; ++n)
                if (out.residual_load[n] == 1)
                    single = n;
        } else {
            for (int n : order)
                if (out.residual_load[n] == 1) {
                    single = n;
                    break;
                }
        }
        if (single < 0)
            return;
        last_cb = sole_occupant(out, f, single);
        cancel(out, f, last_cb, single, Mechanism::IC);
    }
}

inline DecodeOutcome start(std::span<const int> counts, const IndicatorMatrix& f)
{
    DecodeOutcome out;
    out.residual_counts.assign(counts.begin(), counts.end());
    out.residual_load = fn_loads(counts, f);
    return out;
}

inline std::vector<int> jmpa_decodable(std::span<const int> counts, const IndicatorMatrix& f, ResidualPolicy policy)
{
    const int n_cb = f.n_cb();
    std::vector<int> active;
    for (int k = 0; k < n_cb; ++k)
        if (counts[k] > 0)
            active.push_back(k);
    if (active.empty())
        return {};

    if (policy == ResidualPolicy::AllOrNothing) {
        for (int k : active)
            if (counts[k] >= 2)
                return {};
        return active;
    }

    std::vector<int> parent(n_cb);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int n = 0; n < f.n_fn(); ++n) {
        int first = -1;
        for (int k : f.cbs_on(n))
            if (counts[k] > 0) {
                if (first < 0)
                    first = k;
                else
                    parent[find(k)] = find(first);
            }
    }
    std::vector<char> tainted(n_cb, 0);
    for (int k : active)
        if (counts[k] >= 2)
            tainted[find(k)] = 1;
    std::vector<int> out;
    for (int k : active)
        if (!tainted[find(k)])
            out.push_back(k);
    return out;
}

inline DecodeOutcome decode_counts(std::span<const int> counts, const IndicatorMatrix& f, ResidualPolicy policy)
{
    DecodeOutcome out = start(counts, f);
    for (;;) {
        peel_in_place(out, f, {});
        const auto extra = jmpa_decodable(out.residual_counts, f, policy);
        if (extra.empty())
            break;
        ++out.jmpa_rounds_with_work;
        for (int k : extra)
            cancel(out, f, k, -1, Mechanism::ResidualJmpa);
    }
    return out;
}

} // namespace detail

/// IC stage alone: cancels single-FN transmissions until none is left.
/// `fn_order`, when given, replaces the default scan (used to check that the
/// outcome does not depend on scan order).
inline DecodeOutcome peel(const ActivePattern& a, const IndicatorMatrix& f, std::span<const int> fn_order = {})
{
    const SlotPattern p = pattern_of(a, f);
    DecodeOutcome out = detail::start(p.counts, f);
    detail::peel_in_place(out, f, fn_order);
    return out;
}

/// Codebooks the joint detector recovers from a residual with no single FN.
inline std::vector<int> residual_jmpa(const ActivePattern& residual, const IndicatorMatrix& f,
    ResidualPolicy policy = ResidualPolicy::ComponentWise)
{
    const SlotPattern p = pattern_of(residual, f);
    return detail::jmpa_decodable(p.counts, f, policy);
}

/// IC-first decoding: peel, hand the residual to the joint detector, and
/// repeat until nothing changes.
inline DecodeOutcome decode(const ActivePattern& a, const IndicatorMatrix& f,
    ResidualPolicy policy = ResidualPolicy::ComponentWise)
{
    const SlotPattern p = pattern_of(a, f);
    return detail::decode_counts(p.counts, f, policy);
}

inline DecodeOutcome decode(const SlotPattern& p, const IndicatorMatrix& f,
    ResidualPolicy policy = ResidualPolicy::ComponentWise)
{
    if (p.n_cb() != f.n_cb())
        throw Error(ErrorCode::DimensionMismatch, "pattern does not match the indicator matrix");
    return detail::decode_counts(p.counts, f, policy);
}

/// Joint detection without IC: all active users if no codebook collided,
/// otherwise none.
inline int decode_jmpa_only(const SlotPattern& p)
{
    return p.has_collision() ? 0 : p.n_active;
}

inline int decode_jmpa_only(const ActivePattern& a, const IndicatorMatrix& f) { return decode_jmpa_only(pattern_of(a, f)); }

/// Outcome of the JMPA-only baseline in the same shape as `decode`.
inline DecodeOutcome decode_jmpa_only_outcome(const SlotPattern& p, const IndicatorMatrix& f)
{
    DecodeOutcome out = detail::start(p.counts, f);
    if (!p.has_collision()) {
        const auto active = detail::jmpa_decodable(p.counts, f, ResidualPolicy::AllOrNothing);
        if (!active.empty())
            ++out.jmpa_rounds_with_work;
        for (int k : active)
            detail::cancel(out, f, k, -1, Mechanism::ResidualJmpa);
    }
    return out;
}

namespace detail {

inline std::vector<char> observable_mask(std::span<const int> initial_load, bool collision_free,
    const DecodeOutcome& outcome, ObservabilityRule rule)
{
    std::vector<char> obs(initial_load.size(), 0);
    for (std::size_t n = 0; n < initial_load.size(); ++n)
        obs[n] = rule == ObservabilityRule::Direct ? (collision_free || initial_load[n] <= 1)
                                                   : (outcome.residual_load[n] == 0);
    return obs;
}

} // namespace detail

inline ObservabilityReport observability(const SlotPattern& p, const DecodeOutcome& outcome, const IndicatorMatrix& f,
    ObservabilityRule rule = ObservabilityRule::Direct)
{
    const auto load = detail::fn_loads(p.counts, f);
    const auto obs = detail::observable_mask(load, !p.has_collision(), outcome, rule);
    ObservabilityReport r;
    for (int n = 0; n < f.n_fn(); ++n)
        if (obs[n])
            r.observable_fns.push_back(n);
    for (int k = 0; k < f.n_cb(); ++k) {
        if (p.counts[k] != 0)
            continue;
        const auto& fns = f.fns_of(k);
        if (std::any_of(fns.begin(), fns.end(), [&](int n) { return obs[n] != 0; }))
            r.observed_idle_cbs.push_back(k);
    }
    return r;
}

inline ObservabilityReport observability(const ActivePattern& a, const DecodeOutcome& outcome, const IndicatorMatrix& f,
    ObservabilityRule rule = ObservabilityRule::Direct)
{
    return observability(pattern_of(a, f), outcome, f, rule);
}

/// One JSON object per line: {"slot":..,"fn":..,"codebook":..,"mechanism":..}
/// with 1-based FN/codebook indices; fn is null for joint-detector decodes.
inline void write_trace(std::ostream& out, long long slot, const DecodeOutcome& outcome)
{
    for (const auto& s : outcome.steps) {
        out << "{\"slot\":" << slot << ",\"fn\":";
        if (s.fn < 0)
            out << "null";
        else
            out << s.fn + 1;
        out << ",\"codebook\":" << s.cb + 1 << ",\"mechanism\":\"" << to_string(s.by) << "\"}\n";
    }
}

} // namespace scma_ura
