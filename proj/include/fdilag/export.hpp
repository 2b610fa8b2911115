#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdilag/error.hpp"
#include "fdilag/lagcorr.hpp"
#include "fdilag/panel.hpp"
#include "fdilag/ranksize.hpp"
#include "fdilag/text.hpp"
#include "fdilag/trends.hpp"

namespace fdilag::io {

using Json = nlohmann::ordered_json;

/// JSON has no NaN/inf: NaN becomes null, infinities become "inf"/"-inf".
inline Json number(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

// ---------------------------------------------------------------- matrix

inline std::string matrix_to_csv(std::span<const LagCorrelationRow> rows) {
    std::string out = "country,group,lag,rho,n,t,p\n";
    for (const auto& row : rows) {
        for (const auto& c : row.lags) {
            out += row.country_id + ',' + std::string(group_label(row.group)) + ',' + std::to_string(c.lag) + ',' +
                   text::format_double(c.rho) + ',';
            if (c.has_test()) out += std::to_string(c.n) + ',' + text::format_double(c.t) + ',' + text::format_double(c.p);
            else out += ",,";
            out += '\n';
        }
    }
    return out;
}

inline Json matrix_to_json(std::span<const LagCorrelationRow> rows) {
    Json arr = Json::array();
    for (const auto& row : rows) {
        for (const auto& c : row.lags) {
            Json cell;
            cell["country"] = row.country_id;
            cell["group"] = group_label(row.group);
            cell["lag"] = c.lag;
            cell["rho"] = number(c.rho);
            if (c.has_test()) {
                cell["n"] = c.n;
                cell["t"] = number(c.t);
                cell["p"] = number(c.p);
            } else {
                cell["n"] = nullptr;
                cell["t"] = nullptr;
                cell["p"] = nullptr;
            }
            arr.push_back(std::move(cell));
        }
    }
    return arr;
}

/// Fixed-width table with one row per country and one 4-decimal column per lag.
inline std::string matrix_to_table(std::span<const LagCorrelationRow> rows, const GroupMapping& names = {}) {
    std::size_t lags = 0;
    for (const auto& r : rows) lags = std::max(lags, r.lags.size());
    std::string out;
    std::optional<IhdiGroup> current;
    const auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    for (const auto& row : rows) {
        if (!current || *current != row.group) {
            current = row.group;
            if (!out.empty()) out += '\n';
            out += std::string(group_title(row.group)) + " IHDI\n";
            std::string header = "country             ";
            for (std::size_t k = 0; k < lags; ++k) header += pad("Lag" + std::to_string(k), 9);
            out += header + '\n';
        }
        std::string label = row.country_id;
        if (const auto it = names.find(row.country_id); it != names.end() && !it->second.display_name.empty())
            label += " " + it->second.display_name;
        if (label.size() < 20) label.resize(20, ' ');
        out += label;
        for (const auto& c : row.lags) {
            std::string cell = text::format_fixed(c.rho, 4);
            if (c.has_test() && c.p < 0.05) cell += '*';
            else cell += ' ';
            out += pad(cell, 9);
        }
        out += '\n';
    }
    return out;
}

/// Reads a coefficient file with at least `country,lag,rho` columns (the
/// matrix CSV qualifies). Groups come from a `group` column when present,
/// otherwise from `mapping`.
inline std::vector<LagCorrelationRow> load_matrix_csv(std::string_view content, const GroupMapping& mapping = {}) {
    const auto lines = text::split_lines(content);
    if (lines.empty()) throw Error(ErrorCode::MissingColumn, "coefficient file is empty");
    const auto header = text::split_fields(lines.front());
    const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto c_country = col("country"), c_lag = col("lag"), c_rho = col("rho");
    const auto c_group = col("group"), c_n = col("n"), c_t = col("t"), c_p = col("p");
    if (!c_country || !c_lag || !c_rho) throw Error(ErrorCode::MissingColumn, "coefficient file needs country,lag,rho");

    std::map<std::string, LagCorrelationRow> by_country;
    std::map<std::string, std::map<std::size_t, LagStat>> cells;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (text::trim(lines[ln]).empty()) continue;
        const auto f = text::split_fields(lines[ln]);
        const auto at = [&](std::optional<std::size_t> i) -> std::string {
            return i && *i < f.size() ? f[*i] : std::string{};
        };
        const auto where = "line " + std::to_string(ln + 1);
        const auto id = at(c_country);
        const auto lag = text::parse_int(at(c_lag));
        const auto rho = text::parse_double(at(c_rho));
        if (id.empty()) throw Error(ErrorCode::MissingColumn, where + ": empty country");
        if (!lag || *lag < 0) throw Error(ErrorCode::NonNumericValue, where + ": bad lag");
        if (!rho || std::fabs(*rho) > 1.0) throw Error(ErrorCode::NonNumericValue, where + ": bad rho");

        IhdiGroup group{};
        if (c_group && !at(c_group).empty()) {
            const auto g = parse_group(at(c_group));
            if (!g) throw Error(ErrorCode::InvalidArgument, where + ": unknown group '" + at(c_group) + "'");
            group = *g;
        } else if (const auto it = mapping.find(id); it != mapping.end()) {
            group = it->second.group;
        } else {
            throw Error(ErrorCode::UnmappedCountry, id + " has no IHDI group");
        }
        auto& row = by_country[id];
        if (row.country_id.empty()) {
            row.country_id = id;
            row.group = group;
        } else if (row.group != group) {
            throw Error(ErrorCode::InvalidArgument, where + ": " + id + " listed under two groups");
        }

        auto cell = LagStat::coefficient_only(static_cast<std::size_t>(*lag), *rho);
        const auto n = text::parse_int(at(c_n));
        if (n && *n >= 3) {
            cell.n = static_cast<std::size_t>(*n);
            const auto t = at(c_t) == "inf" ? std::optional<double>(INFINITY)
                           : at(c_t) == "-inf" ? std::optional<double>(-INFINITY)
                                               : text::parse_double(at(c_t));
            const auto p = text::parse_double(at(c_p));
            if (t && p) {
                cell.t = *t;
                cell.p = *p;
            } else {
                const auto sig = significance(*rho, cell.n);
                cell.t = sig.t;
                cell.p = sig.p;
            }
        }
        if (!cells[id].emplace(cell.lag, cell).second)
            throw Error(ErrorCode::DuplicateCountryYear, where + ": " + id + " lag " + std::to_string(cell.lag) + " repeated");
    }

    std::vector<LagCorrelationRow> rows;
    for (auto& [id, row] : by_country) {
        const auto& lag_cells = cells[id];
        std::size_t expect = 0;
        for (const auto& [lag, cell] : lag_cells) {
            if (lag != expect) throw Error(ErrorCode::InvalidArgument, id + ": lag " + std::to_string(expect) + " missing");
            row.lags.push_back(cell);
            ++expect;
        }
        rows.push_back(std::move(row));
    }
    order_rows(rows);
    return rows;
}

// ---------------------------------------------------------------- trends

inline std::string trends_to_csv(std::span<const ClusterTrend> trends) {
    std::string out = "group,lag,mean_rho,fitted_trend\n";
    for (const auto& tr : trends) {
        for (std::size_t k = 0; k < tr.mean_rho.size(); ++k) {
            out += std::string(group_label(tr.group)) + ',' + std::to_string(k) + ',' + text::format_double(tr.mean_rho[k]) +
                   ',' + text::format_double(tr.line.at(static_cast<double>(k))) + '\n';
        }
    }
    return out;
}

inline Json trend_to_json(const ClusterTrend& tr) {
    Json j;
    j["group"] = group_label(tr.group);
    Json means = Json::array();
    for (double v : tr.mean_rho) means.push_back(number(v));
    j["mean_rho"] = std::move(means);
    j["slope"] = number(tr.line.slope);
    j["intercept"] = number(tr.line.intercept);
    j["averaged_country_slope"] = number(tr.averaged_line.slope);
    j["averaged_country_intercept"] = number(tr.averaged_line.intercept);
    Json per = Json::object();
    for (const auto& [id, s] : tr.per_country_slopes) per[id] = number(s);
    j["per_country_slopes"] = std::move(per);
    return j;
}

inline Json trends_to_json(std::span<const ClusterTrend> trends) {
    Json arr = Json::array();
    for (const auto& tr : trends) arr.push_back(trend_to_json(tr));
    return arr;
}

// ---------------------------------------------------------------- rank-size

/// Outcome of fitting one lag: either a fit or the error that stopped it.
struct LagFit {
    RankedCoefficients ranked;
    std::optional<RankSizeFit> fit;
    std::optional<Error> error;
};

inline Json fit_to_json(const LagFit& lf) {
    Json j;
    j["lag"] = lf.ranked.lag;
    j["n"] = lf.ranked.size();
    j["rank1_country"] = lf.ranked.entries.empty() ? Json(nullptr) : Json(lf.ranked.entries.front().country_id);
    std::size_t positive = 0;
    for (const auto& e : lf.ranked.entries)
        if (e.value > 0.0) ++positive;
    j["positive_count"] = positive;
    if (lf.fit) {
        const auto& f = *lf.fit;
        j["m1"] = number(f.params.m1);
        j["m2"] = number(f.params.m2);
        j["m3"] = number(f.params.m3);
        j["se_m1"] = number(f.std_errors[0]);
        j["se_m2"] = number(f.std_errors[1]);
        j["se_m3"] = number(f.std_errors[2]);
        j["r_squared"] = number(f.r_squared);
        j["sse"] = number(f.sse);
        j["iterations"] = f.iterations;
        j["converged"] = f.converged;
        j["all_positive"] = f.all_positive;
    } else if (lf.error) {
        j["error"] = std::string(to_string(lf.error->code()));
        j["message"] = lf.error->what();
    }
    return j;
}

inline std::string plot_to_csv(std::span<const LagFit> fits) {
    std::string out = "lag,r,country,observed,fitted\n";
    for (const auto& lf : fits) {
        if (!lf.fit) continue;
        for (const auto& pt : fitted_curve(lf.ranked, *lf.fit)) {
            out += std::to_string(lf.ranked.lag) + ',' + std::to_string(pt.rank) + ',' + pt.country_id + ',' +
                   text::format_double(pt.observed) + ',' + text::format_double(pt.fitted) + '\n';
        }
    }
    return out;
}

/// Ranks and fits every lag; a failing lag is recorded without stopping the rest.
inline std::vector<LagFit> fit_all_lags(std::span<const LagCorrelationRow> rows, std::size_t max_lag,
                                        const FitConfig& config = {}) {
    std::vector<LagFit> out;
    for (std::size_t k = 0; k <= max_lag; ++k) {
        LagFit lf{rank_coefficients(rows, k), std::nullopt, std::nullopt};
        try {
            lf.fit = fit_ranksize(lf.ranked, config);
        } catch (const Error& e) {
            lf.error = e;
        }
        out.push_back(std::move(lf));
    }
    return out;
}

// ---------------------------------------------------------------- panel

inline Json panel_summary(const Panel& panel) {
    Json j;
    j["countries"] = panel.size();
    j["first_year"] = panel.first_year();
    j["last_year"] = panel.last_year();
    j["observation_count"] = panel.observation_count();
    Json sizes = Json::object();
    for (auto g : kAllGroups) sizes[std::string(group_label(g))] = cluster(panel, g).size();
    j["group_sizes"] = std::move(sizes);
    Json windows = Json::array();
    for (const auto& c : panel.countries()) {
        windows.push_back({{"country", c.country_id},
                           {"group", group_label(c.group)},
                           {"first_year", c.first_year},
                           {"last_year", c.last_year()},
                           {"years", c.size()}});
    }
    j["windows"] = std::move(windows);
    Json meta = Json::object();
    for (const auto& [k, v] : panel.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
    return j;
}

}  // namespace fdilag::io
