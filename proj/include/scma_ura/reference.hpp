#pragma once

// Reference decodability classifier used by the oracle checks. It works on
// sets of codebooks instead of residual occupancies and shares no code with
// the decoder it checks.

#include <set>
#include <vector>

#include "codebook.hpp"

namespace scma_ura::reference {

// Active, not yet decoded codebooks other than `self` that touch FN `fn`.
inline std::set<int> interferers(const scma_ura::IndicatorMatrix& f, const std::vector<int>& a, const std::set<int>& decoded,
    int fn, int self)
{
    std::set<int> out;
    for (int k = 0; k < f.n_cb(); ++k)
        if (k != self && a[k] > 0 && f.at(fn, k) && !decoded.count(k))
            out.insert(k);
    return out;
}

/// Decodable codebooks for selection counts `a`:
///  (a) no codebook collided anywhere: everyone decodes;
///  (b)/(c) a lone user decodes once one of its FNs has no undecoded
///      interferer left, applied until nothing changes;
///  joint detection then takes every connected group of undecoded
///  codebooks that contains no collision (or, with `whole_residual`, the
///  entire remainder if it contains no collision), and (b)/(c) resume.
inline std::set<int> decodable(const scma_ura::IndicatorMatrix& f, const std::vector<int>& a, bool whole_residual = false)
{
    const int K = f.n_cb();
    const int N = f.n_fn();
    std::set<int> decoded;

    bool any_collision = false;
    for (int k = 0; k < K; ++k)
        any_collision = any_collision || a[k] >= 2;
    if (!any_collision) {
        for (int k = 0; k < K; ++k)
            if (a[k] == 1)
                decoded.insert(k);
        return decoded;
    }

    for (;;) {
        bool grew = false;
        for (int k = 0; k < K; ++k) {
            if (a[k] != 1 || decoded.count(k))
                continue;
            for (int n = 0; n < N; ++n)
                if (f.at(n, k) && interferers(f, a, decoded, n, k).empty()) {
                    decoded.insert(k);
                    grew = true;
                    break;
                }
        }
        if (grew)
            continue;

        std::set<int> remaining;
        for (int k = 0; k < K; ++k)
            if (a[k] > 0 && !decoded.count(k))
                remaining.insert(k);

        std::vector<std::set<int>> groups;
        if (whole_residual) {
            groups.push_back(remaining);
        } else {
            std::set<int> seen;
            for (int start : remaining) {
                if (seen.count(start))
                    continue;
                std::set<int> group{start};
                std::vector<int> frontier{start};
                seen.insert(start);
                while (!frontier.empty()) {
                    const int k = frontier.back();
                    frontier.pop_back();
                    for (int n = 0; n < N; ++n) {
                        if (!f.at(n, k))
                            continue;
                        for (int j : interferers(f, a, decoded, n, k))
                            if (!seen.count(j)) {
                                seen.insert(j);
                                group.insert(j);
                                frontier.push_back(j);
                            }
                    }
                }
                groups.push_back(group);
            }
        }
        for (const auto& g : groups) {
            bool clean = !g.empty();
            for (int k : g)
                clean = clean && a[k] == 1;
            if (clean) {
                decoded.insert(g.begin(), g.end());
                grew = true;
            }
        }
        if (!grew)
            return decoded;
    }
}

} // namespace scma_ura::reference
