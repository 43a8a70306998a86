#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "codebook.hpp"
#include "error.hpp"

namespace scma_ura {

/// lambda^j e^{-lambda} / j!, evaluated in log space for large j.
inline double poisson_pmf(int j, double lambda)
{
    if (j < 0)
        return 0.0;
    if (lambda <= 0.0)
        return j == 0 ? 1.0 : 0.0;
    return std::exp(j * std::log(lambda) - lambda - std::lgamma(j + 1.0));
}

struct ThroughputTerms {
    double t1 = 0; // collision-free slots (what the JMPA-only receiver achieves)
    double t2 = 0; // user owns a single FN despite collisions elsewhere
    double t3 = 0; // single FN appears after one cancellation (lower bound)
    double total = 0;
};

namespace detail {

inline void require_dv2(const CodebookParams& p)
{
    if (p.d_v != 2)
        throw Error(ErrorCode::UnsupportedDv,
            "closed-form expressions require d_v = 2, matrix has d_v = " + std::to_string(p.d_v));
}

} // namespace detail

inline ThroughputTerms throughput_terms(double lambda_bar, const CodebookParams& p)
{
    detail::require_dv2(p);
    const int K = p.n_cb;
    const int df = p.d_f;
    const double lam = lambda_bar / K;
    const double p0 = std::exp(-lam);
    const double p1 = lam * p0;
    const double q = p0 + p1;

    ThroughputTerms t;
    t.t1 = K * p1 * std::pow(q, K - 1);
    t.t2 = 2.0 * K * p1 * std::pow(p0, df - 1) * (1.0 - std::pow(q, K - df));
    t.t3 = 2.0 * K * p1 * ((df - 1) * std::pow(p0, df - 2) * p1) * std::pow(p0, df - 1) * (1.0 - std::pow(q, df - 2));
    t.total = t.t1 + t.t2 + t.t3;
    return t;
}

/// Probability that the AP observes a given codebook as unused.
inline double idle_probability(double lambda_bar, const CodebookParams& p)
{
    detail::require_dv2(p);
    const int K = p.n_cb;
    const int df = p.d_f;
    const double lam = lambda_bar / K;
    const double p0 = std::exp(-lam);
    const double p1 = lam * p0;
    const double q = p0 + p1;
    // probability that the other d_f - 1 codebooks on an FN leave it readable
    const double phi = std::pow(p0, df - 1) + (df - 1) * std::pow(p0, df - 2) * p1;
    const double orth_collision = 1.0 - std::pow(q, p.n_orth);

    const double no_collision = p0 * std::pow(q, K - 1);
    const double collision_on_other_fn = 2.0 * p0 * phi * (1.0 - std::pow(q, df - 1));
    const double collision_on_orthogonal = 2.0 * p0 * phi * std::pow(q, df - 1) * orth_collision;
    const double both_counted = p0 * phi * phi * orth_collision;
    const double r = no_collision + collision_on_other_fn + collision_on_orthogonal - both_counted;

    constexpr double slack = 1e-12;
    if (!(r >= -slack && r <= 1.0 + slack))
        throw std::logic_error("idle probability out of [0, 1]: " + std::to_string(r));
    return r;
}

/// Multichannel slotted ALOHA with `n_channels` orthogonal subchannels.
inline double oma_throughput(double lambda_bar, int n_channels)
{
    if (n_channels < 1)
        throw Error(ErrorCode::InvalidConfig, "OMA baseline needs at least one subchannel");
    return lambda_bar * std::exp(-lambda_bar / n_channels);
}

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.05;

    int size() const
    {
        if (step <= 0.0 || stop < start)
            throw Error(ErrorCode::InvalidConfig, "grid needs step > 0 and stop >= start");
        return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    }
    double at(int i) const { return start + i * step; }

    static GridSpec default_for(const CodebookParams& p) { return {0.0, 2.0 * p.n_cb, 0.05}; }
};

struct LoadPoint {
    double lambda_bar = 0;
    double lambda = 0;
    double t1 = 0;
    double t2 = 0;
    double t3 = 0;
    double t_total = 0;
    double p_idle = 0;
};

/// Closed-form throughput and idle probability tabulated over offered load.
struct LoadTable {
    std::vector<LoadPoint> points;
    int star_index = 0;
    double lambda_star = 0;
    double t_star = 0;
    double p_idle_star = 0;
    int n_fn = 0;

    double grid_end() const { return points.back().lambda_bar; }
};

inline LoadTable build_load_table(const CodebookParams& p, const GridSpec& grid)
{
    detail::require_dv2(p);
    LoadTable table;
    table.n_fn = p.n_fn;
    const int n = grid.size();
    table.points.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double lb = grid.at(i);
        const auto t = throughput_terms(lb, p);
        table.points.push_back({lb, lb / p.n_cb, t.t1, t.t2, t.t3, t.total, idle_probability(lb, p)});
    }
    // strict comparison keeps the smallest load on ties
    for (int i = 1; i < n; ++i)
        if (table.points[i].t_total > table.points[table.star_index].t_total)
            table.star_index = i;
    const auto& s = table.points[table.star_index];
    table.lambda_star = s.lambda_bar;
    table.t_star = s.t_total;
    table.p_idle_star = s.p_idle;
    return table;
}

inline LoadTable build_load_table(const CodebookParams& p) { return build_load_table(p, GridSpec::default_for(p)); }

struct LoadCandidates {
    double under = 0;
    double over = 0;
};

/// Nearest grid loads reproducing `t_observed` on either side of the peak.
/// Ties go to the outer end of each branch.
inline LoadCandidates invert_throughput(double t_observed, const LoadTable& table)
{
    const auto& pts = table.points;
    const int s = table.star_index;
    if (t_observed > table.t_star)
        return {table.lambda_star, table.lambda_star};

    int under = 0;
    for (int i = 1; i <= s; ++i)
        if (std::abs(pts[i].t_total - t_observed) < std::abs(pts[under].t_total - t_observed))
            under = i;
    int over = static_cast<int>(pts.size()) - 1;
    for (int i = over - 1; i >= s; --i)
        if (std::abs(pts[i].t_total - t_observed) < std::abs(pts[over].t_total - t_observed))
            over = i;
    return {pts[under].lambda_bar, pts[over].lambda_bar};
}

inline void write_load_table_csv(std::ostream& out, const LoadTable& table, bool with_oma = false)
{
    out << "lambda_bar,t1,t2,t3,t_total,p_idle" << (with_oma ? ",oma" : "") << '\n';
    char buf[256];
    for (const auto& pt : table.points) {
        std::snprintf(buf, sizeof buf, "%.4f,%.10f,%.10f,%.10f,%.10f,%.10f", pt.lambda_bar, pt.t1, pt.t2, pt.t3, pt.t_total, pt.p_idle);
        out << buf;
        if (with_oma) {
            std::snprintf(buf, sizeof buf, ",%.10f", oma_throughput(pt.lambda_bar, table.n_fn));
            out << buf;
        }
        out << '\n';
    }
}

} // namespace scma_ura
