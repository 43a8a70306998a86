#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"

namespace scma_ura {

struct SlotObservation {
    int n_decoded = 0;
    int observed_idle = 0;
};

struct FrameObservation {
    double throughput = 0; // mean decoded users per slot
    double p_idle = 0;     // mean fraction of codebooks observed idle
};

inline FrameObservation observe_frame(std::span<const SlotObservation> slots, int n_cb)
{
    if (slots.empty())
        throw Error(ErrorCode::EmptyFrame, "frame contains no slots");
    double decoded = 0;
    double idle = 0;
    for (const auto& s : slots) {
        decoded += s.n_decoded;
        idle += static_cast<double>(s.observed_idle) / n_cb;
    }
    const double n = static_cast<double>(slots.size());
    return {decoded / n, idle / n};
}

/// Picks the under- or overloaded inversion of the observed throughput by
/// comparing the observed idle probability with the table threshold.
/// Equality counts as overloaded.
inline double estimate_load(double t_observed, double p_idle_observed, const LoadTable& table)
{
    const auto c = invert_throughput(t_observed, table);
    return p_idle_observed > table.p_idle_star ? c.under : c.over;
}

inline constexpr double kLoadEpsilon = 1e-6;
inline constexpr double kMinAlpha = 1e-9;

/// alpha_old * lambda_star / lambda_hat, capped at 1.
///
/// lambda_hat is floored at kLoadEpsilon (an empty-looking system reopens
/// admission fully) and the result at kMinAlpha so repeated overload
/// estimates cannot drive alpha to zero.
inline double update_alpha(double alpha_old, double lambda_hat, double lambda_star)
{
    if (!(lambda_star > 0.0))
        throw Error(ErrorCode::InvalidConfig, "optimal load must be positive");
    const double a = alpha_old * lambda_star / std::max(lambda_hat, kLoadEpsilon);
    return std::clamp(a, kMinAlpha, 1.0);
}

struct FrameRecord {
    int frame = 0;
    double lambda_bar_true = 0;
    double t_obs = 0;
    double p_idle_obs = 0;
    double lambda_hat = 0;
    double alpha = 1; // access probability in force during this frame

    double admitted_load() const { return alpha * lambda_bar_true; }
};

struct BarringState {
    double alpha = 1.0;
    double last_estimate = 0.0;
    std::vector<FrameRecord> history;
};

/// Per-frame control loop. When `enabled` is false the estimate is still
/// produced (for reporting) but alpha never moves.
class BarringController {
public:
    BarringController(const LoadTable& table, double initial_alpha = 1.0, bool enabled = true)
        : table_(&table), enabled_(enabled)
    {
        if (!(initial_alpha > 0.0 && initial_alpha <= 1.0))
            throw Error(ErrorCode::InvalidConfig, "initial access probability must lie in (0, 1]");
        state_.alpha = initial_alpha;
    }

    double alpha() const noexcept { return state_.alpha; }
    const BarringState& state() const noexcept { return state_; }

    /// Closes a frame: records it and returns alpha for the next frame.
    double end_frame(int frame, double lambda_bar_true, std::span<const SlotObservation> slots, int n_cb)
    {
        const auto obs = observe_frame(slots, n_cb);
        const double lambda_hat = estimate_load(obs.throughput, obs.p_idle, *table_);
        state_.history.push_back({frame, lambda_bar_true, obs.throughput, obs.p_idle, lambda_hat, state_.alpha});
        state_.last_estimate = lambda_hat;
        if (enabled_)
            state_.alpha = update_alpha(state_.alpha, lambda_hat, table_->lambda_star);
        return state_.alpha;
    }

private:
    const LoadTable* table_;
    bool enabled_;
    BarringState state_;
};

inline void write_history_csv(std::ostream& out, std::span<const FrameRecord> history)
{
    out << "frame,lambda_bar_true,T_obs,P_idle_obs,lambda_hat,alpha\n";
    char buf[256];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof buf, "%d,%.4f,%.6f,%.6f,%.4f,%.8f\n", r.frame, r.lambda_bar_true, r.t_obs, r.p_idle_obs, r.lambda_hat, r.alpha);
        out << buf;
    }
}

} // namespace scma_ura
