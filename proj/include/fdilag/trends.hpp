#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fdilag/error.hpp"
#include "fdilag/lagcorr.hpp"
#include "fdilag/panel.hpp"

namespace fdilag {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;

    [[nodiscard]] double at(double x) const noexcept { return intercept + slope * x; }
};

/// Ordinary least-squares line through the points (i, ys[i]), i = 0..n-1.
[[nodiscard]] inline Line ols_on_index(std::span<const double> ys) {
    const std::size_t n = ys.size();
    if (n == 0) throw Error(ErrorCode::EmptyInput, "no points to fit");
    if (n == 1) return {0.0, ys[0]};
    const double mean_x = static_cast<double>(n - 1) / 2.0;
    double mean_y = 0.0;
    for (double y : ys) mean_y += y;
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxy += dx * (ys[i] - mean_y);
        sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    return {slope, mean_y - slope * mean_x};
}

/// Cluster-level coefficient trend against lag. `line` is fitted to the
/// per-lag cluster means; `averaged_line` is the mean of the per-country
/// lines. On a shared lag grid the two coincide.
struct ClusterTrend {
    IhdiGroup group = IhdiGroup::Low;
    std::vector<double> mean_rho;  // index == lag
    Line line;
    Line averaged_line;
    std::map<std::string, double> per_country_slopes;

    [[nodiscard]] double slope() const noexcept { return line.slope; }
    [[nodiscard]] double intercept() const noexcept { return line.intercept; }
};

[[nodiscard]] inline ClusterTrend cluster_trend(std::span<const LagCorrelationRow> rows, IhdiGroup group,
                                                std::size_t max_lag) {
    ClusterTrend trend;
    trend.group = group;
    trend.mean_rho.assign(max_lag + 1, 0.0);
    std::size_t members = 0;
    std::vector<double> series(max_lag + 1);
    for (const auto& row : rows) {
        if (row.group != group) continue;
        ++members;
        for (std::size_t k = 0; k <= max_lag; ++k) {
            series[k] = row.at(k).rho;
            trend.mean_rho[k] += series[k];
        }
        const auto own = ols_on_index(series);
        trend.per_country_slopes[row.country_id] = own.slope;
        trend.averaged_line.slope += own.slope;
        trend.averaged_line.intercept += own.intercept;
    }
    if (members == 0)
        throw Error(ErrorCode::EmptyCluster, "no rows in the " + std::string(group_title(group)) + " cluster");
    const double m = static_cast<double>(members);
    for (auto& v : trend.mean_rho) v /= m;
    trend.averaged_line.slope /= m;
    trend.averaged_line.intercept /= m;
    trend.line = ols_on_index(trend.mean_rho);
    return trend;
}

/// Trends for every non-empty cluster, in reporting order.
[[nodiscard]] inline std::vector<ClusterTrend> all_cluster_trends(std::span<const LagCorrelationRow> rows,
                                                                  std::size_t max_lag) {
    std::vector<ClusterTrend> out;
    for (auto g : kAllGroups) {
        const bool present = std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.group == g; });
        if (present) out.push_back(cluster_trend(rows, g, max_lag));
    }
    return out;
}

}  // namespace fdilag
