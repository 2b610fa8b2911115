#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fdilag/error.hpp"
#include "fdilag/panel.hpp"
#include "fdilag/tdist.hpp"

namespace fdilag {

/// Equal-time Pearson product-moment correlation of two equally long series.
/// Computed from mean-centred sums, clamped to [-1, 1].
[[nodiscard]] inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::LengthMismatch,
                    "series lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorCode::TooShort, "need at least 3 pairs, got " + std::to_string(n));

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ZeroVariance, "series has zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Correlation of gdp_t with fdi_{t-k} over the n-k overlapping years
/// (FDI leading GDP by k years). Both series cover the same consecutive years.
[[nodiscard]] inline double lagged_pearson(std::span<const double> gdp, std::span<const double> fdi, std::size_t k) {
    if (gdp.size() != fdi.size())
        throw Error(ErrorCode::LengthMismatch,
                    "series lengths " + std::to_string(gdp.size()) + " and " + std::to_string(fdi.size()));
    if (k >= gdp.size() || gdp.size() - k < 3)
        throw Error(ErrorCode::LagTooLarge,
                    "lag " + std::to_string(k) + " leaves fewer than 3 pairs out of " + std::to_string(gdp.size()));
    const std::size_t pairs = gdp.size() - k;
    return pearson(gdp.subspan(k, pairs), fdi.first(pairs));
}

struct Significance {
    double t;
    double p;
};

/// Pearson t-test: t = rho * sqrt((n-2)/(1-rho^2)), two-sided p from
/// Student's t with n-2 degrees of freedom. |rho| = 1 gives t = +-inf, p = 0.
[[nodiscard]] inline Significance significance(double rho, std::size_t n) {
    if (n < 3) throw Error(ErrorCode::TooFewPairs, "need n >= 3 for a t-test, got " + std::to_string(n));
    if (!(std::fabs(rho) <= 1.0)) throw Error(ErrorCode::DomainError, "|rho| must not exceed 1");
    if (rho == 0.0) return {0.0, 1.0};
    if (std::fabs(rho) == 1.0) return {std::copysign(std::numeric_limits<double>::infinity(), rho), 0.0};
    const double df = static_cast<double>(n - 2);
    const double t = rho * std::sqrt(df / ((1.0 - rho) * (1.0 + rho)));
    return {t, tdist::two_sided_p(t, df)};
}

struct LagSpec {
    std::size_t max_lag = 3;
};

/// One cell of a lag matrix. Rows transcribed from printed tables have no
/// pair counts: n = 0 and t, p are NaN.
struct LagStat {
    std::size_t lag = 0;
    double rho = 0.0;
    std::size_t n = 0;
    double t = 0.0;
    double p = 1.0;

    static LagStat coefficient_only(std::size_t lag, double rho) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        return {lag, rho, 0, nan, nan};
    }

    [[nodiscard]] bool has_test() const noexcept { return n > 0; }

    bool operator==(const LagStat& o) const {
        const auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
        return lag == o.lag && same(rho, o.rho) && n == o.n && same(t, o.t) && same(p, o.p);
    }
};

struct LagCorrelationRow {
    std::string country_id;
    IhdiGroup group = IhdiGroup::Low;
    std::vector<LagStat> lags;  // index == lag

    [[nodiscard]] std::size_t max_lag() const noexcept { return lags.empty() ? 0 : lags.size() - 1; }
    [[nodiscard]] bool has_lag(std::size_t k) const noexcept { return k < lags.size(); }
    [[nodiscard]] const LagStat& at(std::size_t k) const {
        if (k >= lags.size())
            throw Error(ErrorCode::LagTooLarge, country_id + " has no lag " + std::to_string(k));
        return lags[k];
    }

    bool operator==(const LagCorrelationRow&) const = default;
};

/// Reporting order: cluster (VeryHigh first), then ascending country_id.
inline void order_rows(std::vector<LagCorrelationRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.group, a.country_id) < std::tie(b.group, b.country_id);
    });
}

[[nodiscard]] inline LagCorrelationRow correlate_country(const CountrySeries& s, const LagSpec& spec) {
    if (s.size() < spec.max_lag + kMinWindowLength)
        throw Error(ErrorCode::LagTooLarge,
                    s.country_id + ": window of " + std::to_string(s.size()) + " years cannot support lag " +
                        std::to_string(spec.max_lag) + " (need " + std::to_string(spec.max_lag + kMinWindowLength) +
                        ")");
    LagCorrelationRow row{s.country_id, s.group, {}};
    row.lags.reserve(spec.max_lag + 1);
    for (std::size_t k = 0; k <= spec.max_lag; ++k) {
        double rho = 0.0;
        try {
            rho = lagged_pearson(s.gdp_growth, s.fdi, k);
        } catch (const Error& e) {
            throw Error(e.code(), s.country_id + " lag " + std::to_string(k) + ": " + e.what());
        }
        const std::size_t n = s.size() - k;
        const auto sig = significance(rho, n);
        row.lags.push_back({k, rho, n, sig.t, sig.p});
    }
    return row;
}

/// Lag 0..max_lag statistics for every country, in reporting order.
[[nodiscard]] inline std::vector<LagCorrelationRow> correlation_matrix(const Panel& panel, const LagSpec& spec) {
    std::vector<LagCorrelationRow> rows;
    rows.reserve(panel.size());
    for (const auto& s : panel.countries()) rows.push_back(correlate_country(s, spec));
    order_rows(rows);
    return rows;
}

/// Share of a cluster's entries with p < alpha at each lag.
struct SignificanceSummary {
    IhdiGroup group;
    std::vector<double> share_significant;  // index == lag
    std::size_t countries = 0;
    /// Smallest lag from which no later lag has a majority of significant
    /// entries; equals the number of lags when significance is never lost.
    std::size_t significance_lost_at = 0;
};

[[nodiscard]] inline std::vector<SignificanceSummary> summarize_significance(
    std::span<const LagCorrelationRow> rows, double alpha) {
    std::vector<SignificanceSummary> out;
    for (auto g : kAllGroups) {
        SignificanceSummary s{g, {}, 0, 0};
        std::vector<std::size_t> hits;
        for (const auto& row : rows) {
            if (row.group != g) continue;
            ++s.countries;
            if (hits.size() < row.lags.size()) hits.resize(row.lags.size(), 0);
            for (const auto& cell : row.lags)
                if (cell.has_test() && cell.p < alpha) ++hits[cell.lag];
        }
        if (s.countries == 0) continue;
        for (auto h : hits) s.share_significant.push_back(static_cast<double>(h) / static_cast<double>(s.countries));
        s.significance_lost_at = s.share_significant.size();
        while (s.significance_lost_at > 0 && s.share_significant[s.significance_lost_at - 1] <= 0.5)
            --s.significance_lost_at;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace fdilag
