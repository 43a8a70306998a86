#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace scma_ura {

/// Structural parameters of a row/column-regular indicator matrix.
///
/// `mod_order` is carried only for reporting decoder complexity; it has no
/// influence on the collision-level model.
struct CodebookParams {
    int n_fn = 0;     // N
    int n_cb = 0;     // K
    int d_v = 0;      // FNs per codebook
    int d_f = 0;      // codebooks per FN
    double theta = 0; // K / N
    int n_orth = 0;   // codebooks sharing no FN with a given codebook
    int mod_order = 4;

    /// C(N - d_v, d_v); equal to n_orth for every matrix shipped here.
    int n_orth_closed_form() const;

    double jmpa_complexity() const;
    double ic_complexity() const { return static_cast<double>(mod_order) * d_f; }
};

/// ξ_n (codebooks on FN n) and ζ_k (FNs used by codebook k), 0-based.
struct NeighborSets {
    std::vector<std::vector<int>> fn_to_cb;
    std::vector<std::vector<int>> cb_to_fn;
};

namespace detail {

inline long long binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n)
        return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

} // namespace detail

inline int CodebookParams::n_orth_closed_form() const
{
    return static_cast<int>(detail::binomial(n_fn - d_v, d_v));
}

inline double CodebookParams::jmpa_complexity() const
{
    double r = 1.0;
    for (int i = 0; i < d_f; ++i)
        r *= mod_order + 1;
    return r;
}

/// Binary N x K matrix mapping codebooks onto frequency nodes.
///
/// Instances are validated on construction and immutable afterwards, so a
/// single matrix can be shared by any number of simulation workers.
class IndicatorMatrix {
public:
    /// Validates `rows` (N rows of K entries) and computes the derived
    /// parameters. Throws Error with EmptyMatrix, MalformedInput, NonRegular
    /// or DuplicateColumn.
    explicit IndicatorMatrix(const std::vector<std::vector<int>>& rows, int mod_order = 4);

    int n_fn() const noexcept { return params_.n_fn; }
    int n_cb() const noexcept { return params_.n_cb; }
    const CodebookParams& params() const noexcept { return params_; }
    const NeighborSets& neighbors() const noexcept { return neighbors_; }

    bool at(int fn, int cb) const { return entries_[static_cast<std::size_t>(fn) * params_.n_cb + cb] != 0; }

    const std::vector<int>& fns_of(int cb) const { return neighbors_.cb_to_fn[cb]; }
    const std::vector<int>& cbs_on(int fn) const { return neighbors_.fn_to_cb[fn]; }

    /// Per-codebook count of codebooks whose FN sets are disjoint from it.
    const std::vector<int>& orthogonal_counts() const noexcept { return orth_counts_; }

    /// Non-fatal findings from validation (e.g. an orthogonality count that
    /// disagrees with the closed form).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    std::vector<std::vector<int>> rows() const;

    friend bool operator==(const IndicatorMatrix& a, const IndicatorMatrix& b)
    {
        return a.params_.n_fn == b.params_.n_fn && a.params_.n_cb == b.params_.n_cb && a.entries_ == b.entries_;
    }

private:
    std::vector<std::uint8_t> entries_;
    CodebookParams params_;
    NeighborSets neighbors_;
    std::vector<int> orth_counts_;
    std::vector<std::string> warnings_;
};

inline IndicatorMatrix::IndicatorMatrix(const std::vector<std::vector<int>>& rows, int mod_order)
{
    if (rows.empty() || rows.front().empty())
        throw Error(ErrorCode::EmptyMatrix, "indicator matrix has no entries");

    const int n = static_cast<int>(rows.size());
    const int k = static_cast<int>(rows.front().size());
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != k)
            throw Error(ErrorCode::MalformedInput,
                "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) + " entries, expected " + std::to_string(k));
        for (int v : rows[r])
            if (v != 0 && v != 1)
                throw Error(ErrorCode::MalformedInput, "row " + std::to_string(r + 1) + " contains a non-binary entry");
    }

    entries_.resize(static_cast<std::size_t>(n) * k);
    neighbors_.fn_to_cb.assign(n, {});
    neighbors_.cb_to_fn.assign(k, {});
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < k; ++c)
            if (rows[r][c]) {
                entries_[static_cast<std::size_t>(r) * k + c] = 1;
                neighbors_.fn_to_cb[r].push_back(c);
                neighbors_.cb_to_fn[c].push_back(r);
            }

    const auto d_f = neighbors_.fn_to_cb.front().size();
    for (int r = 0; r < n; ++r)
        if (neighbors_.fn_to_cb[r].size() != d_f)
            throw Error(ErrorCode::NonRegular,
                "row " + std::to_string(r + 1) + " has weight " + std::to_string(neighbors_.fn_to_cb[r].size()) + ", row 1 has weight " + std::to_string(d_f));
    const auto d_v = neighbors_.cb_to_fn.front().size();
    for (int c = 0; c < k; ++c)
        if (neighbors_.cb_to_fn[c].size() != d_v)
            throw Error(ErrorCode::NonRegular,
                "column " + std::to_string(c + 1) + " has weight " + std::to_string(neighbors_.cb_to_fn[c].size()) + ", column 1 has weight " + std::to_string(d_v));
    if (d_v == 0)
        throw Error(ErrorCode::EmptyMatrix, "indicator matrix has no ones");

    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            if (neighbors_.cb_to_fn[a] == neighbors_.cb_to_fn[b])
                throw Error(ErrorCode::DuplicateColumn,
                    "columns " + std::to_string(a + 1) + " and " + std::to_string(b + 1) + " are identical");

    params_.n_fn = n;
    params_.n_cb = k;
    params_.d_v = static_cast<int>(d_v);
    params_.d_f = static_cast<int>(d_f);
    params_.theta = static_cast<double>(k) / n;
    params_.mod_order = mod_order;

    orth_counts_.assign(k, 0);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b)
                continue;
            const auto& fa = neighbors_.cb_to_fn[a];
            const auto& fb = neighbors_.cb_to_fn[b];
            const bool disjoint = std::none_of(fa.begin(), fa.end(),
                [&](int fn) { return std::find(fb.begin(), fb.end(), fn) != fb.end(); });
            orth_counts_[a] += disjoint ? 1 : 0;
        }

    const auto [mn, mx] = std::minmax_element(orth_counts_.begin(), orth_counts_.end());
    const int closed = params_.n_orth_closed_form();
    if (*mn != *mx) {
        long long sum = 0;
        for (int v : orth_counts_)
            sum += v;
        params_.n_orth = static_cast<int>(sum / k);
        warnings_.push_back("orthogonal codebook count varies across codebooks (" + std::to_string(*mn) + ".." + std::to_string(*mx)
            + "); using mean " + std::to_string(params_.n_orth));
    } else {
        params_.n_orth = *mn;
        if (*mn != closed)
            warnings_.push_back("enumerated orthogonal codebook count " + std::to_string(*mn) + " differs from C(N-d_v, d_v) = "
                + std::to_string(closed) + "; using the enumerated value");
    }
    if (k <= n)
        warnings_.push_back("overloading factor K/N = " + std::to_string(params_.theta) + " is not above 1");
}

inline std::vector<std::vector<int>> IndicatorMatrix::rows() const
{
    std::vector<std::vector<int>> out(params_.n_fn, std::vector<int>(params_.n_cb, 0));
    for (int r = 0; r < params_.n_fn; ++r)
        for (int c = 0; c < params_.n_cb; ++c)
            out[r][c] = at(r, c) ? 1 : 0;
    return out;
}

inline CodebookParams validate_indicator(const std::vector<std::vector<int>>& rows)
{
    return IndicatorMatrix(rows).params();
}

inline NeighborSets neighbor_sets(const IndicatorMatrix& f) { return f.neighbors(); }

inline IndicatorMatrix builtin(std::string_view name)
{
    if (name == "f4x6")
        return IndicatorMatrix({
            {0, 1, 1, 0, 1, 0},
            {1, 0, 1, 0, 0, 1},
            {0, 1, 0, 1, 0, 1},
            {1, 0, 0, 1, 1, 0},
        });
    if (name == "f5x10")
        return IndicatorMatrix({
            {1, 1, 1, 1, 0, 0, 0, 0, 0, 0},
            {1, 0, 0, 0, 0, 1, 0, 0, 1, 1},
            {0, 1, 0, 0, 1, 0, 1, 0, 0, 1},
            {0, 0, 1, 0, 1, 0, 0, 1, 1, 0},
            {0, 0, 0, 1, 0, 1, 1, 1, 0, 0},
        });
    if (name == "f6x15")
        return IndicatorMatrix({
            {1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0},
            {0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0},
            {1, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1},
            {0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 1},
            {0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0},
            {0, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0},
        });
    throw Error(ErrorCode::UnknownName, "no built-in indicator matrix named '" + std::string(name) + "' (expected f4x6, f5x10 or f6x15)");
}

inline bool is_builtin_name(std::string_view name) { return name == "f4x6" || name == "f5x10" || name == "f6x15"; }

// Text format: "N K" on the first line, then N lines of K space-separated 0/1.
inline IndicatorMatrix parse_indicator(std::istream& in)
{
    int n = 0;
    int k = 0;
    if (!(in >> n >> k) || n <= 0 || k <= 0)
        throw Error(ErrorCode::MalformedInput, "expected header 'N K' with positive dimensions");
    std::vector<std::vector<int>> rows(n, std::vector<int>(k));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < k; ++c) {
            std::string tok;
            if (!(in >> tok))
                throw Error(ErrorCode::MalformedInput, "unexpected end of input at row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1));
            if (tok != "0" && tok != "1")
                throw Error(ErrorCode::MalformedInput, "entry '" + tok + "' at row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) + " is not 0 or 1");
            rows[r][c] = tok == "1" ? 1 : 0;
        }
    std::string extra;
    if (in >> extra)
        throw Error(ErrorCode::MalformedInput, "trailing data after " + std::to_string(n) + " rows");
    return IndicatorMatrix(rows);
}

inline IndicatorMatrix load_indicator_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::MalformedInput, "cannot open indicator matrix file '" + path + "'");
    return parse_indicator(in);
}

/// Built-in name or path to a matrix file.
inline IndicatorMatrix resolve_codebook(const std::string& selector)
{
    if (is_builtin_name(selector))
        return builtin(selector);
    return load_indicator_file(selector);
}

inline void write_indicator(std::ostream& out, const IndicatorMatrix& f)
{
    out << f.n_fn() << ' ' << f.n_cb() << '\n';
    for (int r = 0; r < f.n_fn(); ++r) {
        for (int c = 0; c < f.n_cb(); ++c)
            out << (c ? " " : "") << (f.at(r, c) ? 1 : 0);
        out << '\n';
    }
}

} // namespace scma_ura
