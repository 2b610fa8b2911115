#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdilag/export.hpp"
#include "fdilag/lagcorr.hpp"
#include "fdilag/panel.hpp"
#include "fdilag/ranksize.hpp"
#include "fdilag/reference_data.hpp"
#include "fdilag/trends.hpp"

namespace fdilag::report {

using io::Json;

// Agreement thresholds between a coefficient matrix and the published tables.
inline constexpr double kValueTolerance = 0.1;
inline constexpr double kMinSignShare = 0.80;
inline constexpr double kMinValueShare = 0.70;
// Published fit agreement: every parameter within one published standard
// error, R^2 within this band.
inline constexpr double kRSquaredTolerance = 0.005;

struct TableComparison {
    IhdiGroup group;
    std::size_t compared = 0;
    std::size_t sign_agree = 0;
    std::size_t within_tolerance = 0;
    double max_abs_delta = 0.0;

    [[nodiscard]] double sign_share() const noexcept {
        return compared ? static_cast<double>(sign_agree) / static_cast<double>(compared) : 0.0;
    }
    [[nodiscard]] double value_share() const noexcept {
        return compared ? static_cast<double>(within_tolerance) / static_cast<double>(compared) : 0.0;
    }
    [[nodiscard]] bool matched() const noexcept {
        return compared > 0 && sign_share() >= kMinSignShare && value_share() >= kMinValueShare;
    }
};

/// Compares matrix rows against the published coefficients of one cluster,
/// over the countries and lags both sides have.
inline TableComparison compare_with_tables(std::span<const LagCorrelationRow> rows, IhdiGroup group) {
    TableComparison cmp{group};
    for (const auto& row : rows) {
        if (row.group != group) continue;
        const auto* ref = reference::find(row.country_id);
        if (!ref) continue;
        for (std::size_t k = 0; k < std::min(row.lags.size(), reference::kTableLags); ++k) {
            const double got = row.lags[k].rho;
            const double want = ref->rho[k];
            const double delta = std::fabs(got - want);
            ++cmp.compared;
            if ((got > 0) == (want > 0) || (got == 0.0 && want == 0.0)) ++cmp.sign_agree;
            if (delta <= kValueTolerance) ++cmp.within_tolerance;
            cmp.max_abs_delta = std::max(cmp.max_abs_delta, delta);
        }
    }
    return cmp;
}

struct FitComparison {
    std::size_t lag;
    bool available = false;
    std::array<double, 3> delta{};      // fitted - published
    std::array<double, 3> published_se{};
    double r_squared_delta = 0.0;

    [[nodiscard]] bool matched() const noexcept {
        if (!available) return false;
        for (int i = 0; i < 3; ++i)
            if (!(std::fabs(delta[i]) <= published_se[i])) return false;
        return std::fabs(r_squared_delta) <= kRSquaredTolerance;
    }
};

inline FitComparison compare_with_published(const io::LagFit& lf) {
    FitComparison c{lf.ranked.lag};
    if (!lf.fit || lf.ranked.lag >= reference::kTableLags) return c;
    const auto& pub = reference::kRankSizeFits[lf.ranked.lag];
    const auto& p = lf.fit->params;
    c.available = true;
    c.delta = {p.m1 - pub.m1, p.m2 - pub.m2, p.m3 - pub.m3};
    c.published_se = {pub.m1_se, pub.m2_se, pub.m3_se};
    c.r_squared_delta = lf.fit->r_squared - pub.r_squared;
    return c;
}

struct Inputs {
    std::string source;  // "panel" or "paper-tables"
    std::optional<Panel> panel;
    std::vector<LagCorrelationRow> rows;
    std::size_t max_lag = 3;
    double alpha = 0.05;
    FitConfig fit;
};

inline const char* status(bool ok) { return ok ? "matched" : "unmatched"; }

/// Maps every output back to the published table or figure it reproduces.
inline Json checklist(std::span<const LagCorrelationRow> rows, std::span<const ClusterTrend> trends,
                      std::span<const io::LagFit> fits) {
    Json items = Json::array();
    int table_no = 1;
    for (auto g : kAllGroups) {
        const auto cmp = compare_with_tables(rows, g);
        Json it;
        it["item"] = "Table " + std::to_string(table_no++);
        it["output"] = "correlation_matrix[group=" + std::string(group_label(g)) + "]";
        it["status"] = cmp.compared ? status(cmp.matched()) : "not_applicable";
        it["compared"] = cmp.compared;
        it["sign_agreement"] = io::number(cmp.sign_share());
        it["within_tolerance"] = io::number(cmp.value_share());
        it["tolerance"] = kValueTolerance;
        it["max_abs_delta"] = io::number(cmp.max_abs_delta);
        items.push_back(std::move(it));
    }

    {
        Json it;
        it["item"] = "Table 5";
        it["output"] = "rank_size_fits";
        bool all = true;
        std::size_t n = 0;
        Json per_lag = Json::array();
        for (const auto& lf : fits) {
            if (lf.ranked.lag >= reference::kTableLags) continue;
            const auto c = compare_with_published(lf);
            ++n;
            all = all && c.matched();
            Json d;
            d["lag"] = c.lag;
            d["status"] = status(c.matched());
            if (c.available) {
                d["delta_m1"] = io::number(c.delta[0]);
                d["delta_m2"] = io::number(c.delta[1]);
                d["delta_m3"] = io::number(c.delta[2]);
                d["delta_r_squared"] = io::number(c.r_squared_delta);
            }
            per_lag.push_back(std::move(d));
        }
        it["status"] = n ? status(all) : "not_applicable";
        it["lags"] = std::move(per_lag);
        items.push_back(std::move(it));
    }

    {
        // one averaged trend per cluster, with the published sign structure
        Json it;
        it["item"] = "Figure 1";
        it["output"] = "cluster_trends";
        std::optional<double> very_high_lag2, low_lag0;
        for (const auto& tr : trends) {
            if (tr.group == IhdiGroup::VeryHigh && tr.mean_rho.size() > 2) very_high_lag2 = tr.mean_rho[2];
            if (tr.group == IhdiGroup::Low && !tr.mean_rho.empty()) low_lag0 = tr.mean_rho[0];
        }
        const bool ok = trends.size() == kAllGroups.size() && very_high_lag2 && *very_high_lag2 < 0.0 && low_lag0 &&
                        *low_lag0 > 0.0;
        it["status"] = status(ok);
        it["clusters"] = trends.size();
        items.push_back(std::move(it));
    }

    {
        Json it;
        it["item"] = "Figure 2";
        it["output"] = "rank_size_fits + plot data";
        bool ghana_first = !fits.empty();
        bool m3_gt_m2 = !fits.empty();
        for (const auto& lf : fits) {
            ghana_first = ghana_first && !lf.ranked.entries.empty() && lf.ranked.entries.front().country_id == "GHA";
            m3_gt_m2 = m3_gt_m2 && lf.fit && lf.fit->params.m3 > lf.fit->params.m2;
        }
        it["status"] = status(ghana_first && m3_gt_m2);
        it["ghana_rank1_every_lag"] = ghana_first;
        it["m3_greater_than_m2"] = m3_gt_m2;
        items.push_back(std::move(it));
    }
    return items;
}

/// Consolidated, deterministic report: identical inputs give identical bytes.
inline Json build(const Inputs& in) {
    Json doc;
    doc["tool"] = "fdilag";
    doc["format_version"] = 1;
    doc["config"] = {{"source", in.source}, {"max_lag", in.max_lag}, {"alpha", in.alpha}};
    doc["panel"] = in.panel ? io::panel_summary(*in.panel) : Json(nullptr);
    doc["correlation_matrix"] = io::matrix_to_json(in.rows);

    Json sig = Json::array();
    const bool tested = std::any_of(in.rows.begin(), in.rows.end(), [](const auto& r) {
        return !r.lags.empty() && r.lags.front().has_test();
    });
    if (tested) {
        for (const auto& s : summarize_significance(in.rows, in.alpha)) {
            Json shares = Json::array();
            for (double v : s.share_significant) shares.push_back(io::number(v));
            sig.push_back({{"group", group_label(s.group)},
                           {"countries", s.countries},
                           {"share_significant", std::move(shares)},
                           {"significance_lost_at_lag", s.significance_lost_at}});
        }
    }
    doc["significance"] = std::move(sig);

    const auto trends = all_cluster_trends(in.rows, in.max_lag);
    doc["cluster_trends"] = io::trends_to_json(trends);

    const auto fits = io::fit_all_lags(in.rows, in.max_lag, in.fit);
    Json fit_arr = Json::array();
    for (const auto& lf : fits) fit_arr.push_back(io::fit_to_json(lf));
    doc["rank_size_fits"] = std::move(fit_arr);

    doc["reproduction_checklist"] = checklist(in.rows, trends, fits);
    return doc;
}

}  // namespace fdilag::report
