#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdilag/error.hpp"
#include "fdilag/text.hpp"

namespace fdilag {

/// Inequality-adjusted human development cluster. Declaration order is the
/// reporting order (most to least developed).
enum class IhdiGroup { VeryHigh, High, Medium, Low };

inline constexpr std::array<IhdiGroup, 4> kAllGroups{IhdiGroup::VeryHigh, IhdiGroup::High,
                                                     IhdiGroup::Medium, IhdiGroup::Low};

struct ScoreRange {
    double lo;
    double hi;
};

constexpr ScoreRange score_range(IhdiGroup g) noexcept {
    switch (g) {
        case IhdiGroup::VeryHigh: return {0.80, 1.00};
        case IhdiGroup::High: return {0.70, 0.799};
        case IhdiGroup::Medium: return {0.55, 0.699};
        case IhdiGroup::Low: return {0.0, 0.549};
    }
    return {0.0, 0.0};
}

/// Scores falling between two published ranges (e.g. 0.7995) go to the lower group.
constexpr IhdiGroup group_for_score(double score) noexcept {
    if (score >= 0.80) return IhdiGroup::VeryHigh;
    if (score >= 0.70) return IhdiGroup::High;
    if (score >= 0.55) return IhdiGroup::Medium;
    return IhdiGroup::Low;
}

/// Machine label used in files: very_high, high, medium, low.
constexpr std::string_view group_label(IhdiGroup g) noexcept {
    switch (g) {
        case IhdiGroup::VeryHigh: return "very_high";
        case IhdiGroup::High: return "high";
        case IhdiGroup::Medium: return "medium";
        case IhdiGroup::Low: return "low";
    }
    return "";
}

constexpr std::string_view group_title(IhdiGroup g) noexcept {
    switch (g) {
        case IhdiGroup::VeryHigh: return "Very High";
        case IhdiGroup::High: return "High";
        case IhdiGroup::Medium: return "Medium";
        case IhdiGroup::Low: return "Low";
    }
    return "";
}

inline std::optional<IhdiGroup> parse_group(std::string_view label) noexcept {
    label = text::trim(label);
    for (auto g : kAllGroups) {
        if (label == group_label(g)) return g;
    }
    return std::nullopt;
}

struct CountryInfo {
    IhdiGroup group;
    std::string display_name;

    bool operator==(const CountryInfo&) const = default;
};

/// country_id -> cluster membership (and an optional display name).
using GroupMapping = std::map<std::string, CountryInfo, std::less<>>;

/// One country's aligned annual observations over a gap-free window.
struct CountrySeries {
    std::string country_id;
    std::string display_name;
    IhdiGroup group = IhdiGroup::Low;
    int first_year = 0;
    std::vector<double> fdi;         // net inflows, current USD
    std::vector<double> gdp_growth;  // annual %, real

    [[nodiscard]] std::size_t size() const noexcept { return fdi.size(); }
    [[nodiscard]] int last_year() const noexcept {
        return first_year + static_cast<int>(fdi.size()) - 1;
    }

    bool operator==(const CountrySeries&) const = default;
};

inline constexpr std::size_t kMinWindowLength = 5;

namespace detail {

inline bool has_variance(std::span<const double> xs) noexcept {
    return std::any_of(xs.begin(), xs.end(), [&](double v) { return v != xs.front(); });
}

}  // namespace detail

/// Validated collection of country series, ordered by country_id.
class Panel {
public:
    Panel() = default;

    /// Checks every series invariant and derives the year range.
    static Panel from_series(std::vector<CountrySeries> series) {
        std::sort(series.begin(), series.end(),
                  [](const auto& a, const auto& b) { return a.country_id < b.country_id; });
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& s = series[i];
            if (s.country_id.empty())
                throw Error(ErrorCode::InvalidArgument, "empty country_id");
            if (i > 0 && series[i - 1].country_id == s.country_id)
                throw Error(ErrorCode::DuplicateCountryYear, s.country_id + ": country appears twice");
            if (s.fdi.size() != s.gdp_growth.size())
                throw Error(ErrorCode::LengthMismatch, s.country_id + ": fdi and gdp_growth lengths differ");
            if (s.size() < kMinWindowLength)
                throw Error(ErrorCode::GapInsideWindow,
                            s.country_id + ": window of " + std::to_string(s.size()) +
                                " years is shorter than the minimum of " +
                                std::to_string(kMinWindowLength));
            const auto finite = [](double v) { return std::isfinite(v); };
            if (!std::all_of(s.fdi.begin(), s.fdi.end(), finite) ||
                !std::all_of(s.gdp_growth.begin(), s.gdp_growth.end(), finite))
                throw Error(ErrorCode::NonNumericValue, s.country_id + ": non-finite value in window");
            if (!detail::has_variance(s.fdi))
                throw Error(ErrorCode::ZeroVarianceSeries, s.country_id + ": fdi_usd is constant");
            if (!detail::has_variance(s.gdp_growth))
                throw Error(ErrorCode::ZeroVarianceSeries, s.country_id + ": gdp_growth_pct is constant");
        }
        Panel p;
        if (!series.empty()) {
            p.first_year_ = series.front().first_year;
            p.last_year_ = series.front().last_year();
            for (const auto& s : series) {
                p.first_year_ = std::min(p.first_year_, s.first_year);
                p.last_year_ = std::max(p.last_year_, s.last_year());
            }
        }
        p.countries_ = std::move(series);
        return p;
    }

    [[nodiscard]] const std::vector<CountrySeries>& countries() const noexcept { return countries_; }
    [[nodiscard]] std::size_t size() const noexcept { return countries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return countries_.empty(); }
    [[nodiscard]] int first_year() const noexcept { return first_year_; }
    [[nodiscard]] int last_year() const noexcept { return last_year_; }

    /// Stored data points, counting each country-year once per series.
    [[nodiscard]] std::size_t observation_count() const noexcept {
        std::size_t n = 0;
        for (const auto& c : countries_) n += 2 * c.size();
        return n;
    }

    [[nodiscard]] const CountrySeries* find(std::string_view id) const noexcept {
        auto it = std::lower_bound(countries_.begin(), countries_.end(), id,
                                   [](const CountrySeries& s, std::string_view v) { return s.country_id < v; });
        return (it != countries_.end() && it->country_id == id) ? &*it : nullptr;
    }

    /// Free-form provenance (source, retrieval time, ...). Not part of equality.
    std::map<std::string, std::string> metadata;

    friend bool operator==(const Panel& a, const Panel& b) {
        return a.first_year_ == b.first_year_ && a.last_year_ == b.last_year_ && a.countries_ == b.countries_;
    }

private:
    std::vector<CountrySeries> countries_;
    int first_year_ = 0;
    int last_year_ = 0;
};

/// Members of one cluster in ascending country_id order.
inline std::vector<CountrySeries> cluster(const Panel& panel, IhdiGroup group) {
    std::vector<CountrySeries> out;
    for (const auto& c : panel.countries()) {
        if (c.group == group) out.push_back(c);
    }
    return out;
}

/// Parses a `country,group[,name]` mapping file.
inline GroupMapping load_group_mapping(std::string_view content) {
    const auto lines = text::split_lines(content);
    if (lines.empty()) throw Error(ErrorCode::MissingColumn, "mapping file is empty");
    const auto header = text::split_fields(lines.front());
    const auto col = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto country_col = col("country");
    const auto group_col = col("group");
    const auto name_col = col("name");
    if (!country_col) throw Error(ErrorCode::MissingColumn, "mapping header lacks 'country'");
    if (!group_col) throw Error(ErrorCode::MissingColumn, "mapping header lacks 'group'");

    GroupMapping mapping;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (text::trim(lines[ln]).empty()) continue;
        const auto fields = text::split_fields(lines[ln]);
        const auto at = [&](std::size_t i) { return i < fields.size() ? fields[i] : std::string{}; };
        const auto id = at(*country_col);
        const auto group = parse_group(at(*group_col));
        if (id.empty() || !group)
            throw Error(ErrorCode::InvalidArgument,
                        "mapping line " + std::to_string(ln + 1) + ": expected country and one of "
                        "very_high/high/medium/low");
        auto name = name_col ? at(*name_col) : std::string{};
        if (!mapping.emplace(id, CountryInfo{*group, std::move(name)}).second)
            throw Error(ErrorCode::DuplicateCountryYear, "mapping lists " + id + " twice");
    }
    return mapping;
}

inline std::string mapping_to_csv(const GroupMapping& mapping) {
    std::string out = "country,group,name\n";
    for (const auto& [id, info] : mapping) {
        out += id;
        out += ',';
        out += group_label(info.group);
        out += ',';
        const bool quote = info.display_name.find(',') != std::string::npos;
        if (quote) out += '"';
        out += info.display_name;
        if (quote) out += '"';
        out += '\n';
    }
    return out;
}

namespace detail {

struct YearCell {
    std::optional<double> fdi;
    std::optional<double> gdp;
    [[nodiscard]] bool complete() const noexcept { return fdi && gdp; }
};

inline std::string describe_missing(int year, const std::map<int, YearCell>& years) {
    const auto it = years.find(year);
    if (it == years.end()) return "no row for " + std::to_string(year);
    if (!it->second.fdi && !it->second.gdp) return std::to_string(year) + " missing fdi_usd and gdp_growth_pct";
    if (!it->second.fdi) return std::to_string(year) + " missing fdi_usd";
    return std::to_string(year) + " missing gdp_growth_pct";
}

}  // namespace detail

/// Builds a validated panel from `country,year,fdi_usd,gdp_growth_pct` text.
/// Each country keeps its longest run of consecutive years where both series
/// are present (earliest run on ties). All per-country window problems are
/// reported together, one line per country.
inline Panel load_panel(std::string_view source, const GroupMapping& mapping) {
    const auto lines = text::split_lines(source);
    if (lines.empty()) throw Error(ErrorCode::MissingColumn, "panel file has no header row");

    const auto header = text::split_fields(lines.front());
    std::array<std::size_t, 4> cols{};
    constexpr std::array<std::string_view, 4> names{"country", "year", "fdi_usd", "gdp_growth_pct"};
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto it = std::find(header.begin(), header.end(), names[k]);
        if (it == header.end()) throw Error(ErrorCode::MissingColumn, "header lacks '" + std::string(names[k]) + "'");
        cols[k] = static_cast<std::size_t>(it - header.begin());
    }

    std::map<std::string, std::map<int, detail::YearCell>> by_country;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (text::trim(lines[ln]).empty()) continue;
        const auto fields = text::split_fields(lines[ln]);
        const auto where = "line " + std::to_string(ln + 1);
        const auto at = [&](std::size_t i) -> std::string_view {
            return i < fields.size() ? std::string_view(fields[i]) : std::string_view{};
        };
        const std::string id(at(cols[0]));
        if (id.empty()) throw Error(ErrorCode::MissingColumn, where + ": empty country");
        const auto year = text::parse_int(at(cols[1]));
        if (!year) throw Error(ErrorCode::NonNumericValue, where + ": year '" + std::string(at(cols[1])) + "'");

        const auto value = [&](std::size_t c, std::string_view col) -> std::optional<double> {
            const auto raw = text::trim(at(c));
            if (raw.empty()) return std::nullopt;
            const auto v = text::parse_double(raw);
            if (!v)
                throw Error(ErrorCode::NonNumericValue,
                            where + ": " + std::string(col) + " '" + std::string(raw) + "' for " + id);
            return v;
        };
        detail::YearCell cell{value(cols[2], "fdi_usd"), value(cols[3], "gdp_growth_pct")};
        if (!by_country[id].emplace(static_cast<int>(*year), cell).second)
            throw Error(ErrorCode::DuplicateCountryYear, where + ": " + id + " " + std::to_string(*year) + " repeated");
    }

    for (const auto& [id, _] : by_country) {
        if (!mapping.contains(id)) throw Error(ErrorCode::UnmappedCountry, id + " has no IHDI group");
    }

    std::vector<CountrySeries> series;
    std::string diagnostics;
    std::optional<ErrorCode> first_code;
    const auto fail = [&](ErrorCode code, const std::string& msg) {
        if (!first_code) first_code = code;
        if (!diagnostics.empty()) diagnostics += '\n';
        diagnostics += msg;
    };

    for (const auto& [id, years] : by_country) {
        int best_start = 0, best_len = 0, run_start = 0, run_len = 0, prev = 0;
        for (const auto& [year, cell] : years) {
            if (!cell.complete()) {
                run_len = 0;
                continue;
            }
            if (run_len > 0 && year == prev + 1) {
                ++run_len;
            } else {
                run_start = year;
                run_len = 1;
            }
            prev = year;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        }
        if (best_len < static_cast<int>(kMinWindowLength)) {
            std::string msg = id + ": no run of " + std::to_string(kMinWindowLength) + " complete consecutive years";
            if (best_len > 0) {
                const int end = best_start + best_len - 1;
                msg += " (longest " + std::to_string(best_start) + "-" + std::to_string(end) + ")";
                const int last_row = years.rbegin()->first;
                msg += end < last_row ? "; " + detail::describe_missing(end + 1, years)
                                      : "; data ends at " + std::to_string(end);
            }
            fail(ErrorCode::GapInsideWindow, msg);
            continue;
        }
        CountrySeries s;
        s.country_id = id;
        const auto& info = mapping.find(id)->second;
        s.group = info.group;
        s.display_name = info.display_name.empty() ? id : info.display_name;
        s.first_year = best_start;
        for (int y = best_start; y < best_start + best_len; ++y) {
            const auto& cell = years.at(y);
            s.fdi.push_back(*cell.fdi);
            s.gdp_growth.push_back(*cell.gdp);
        }
        if (!detail::has_variance(s.fdi)) {
            fail(ErrorCode::ZeroVarianceSeries, id + ": fdi_usd constant over " + std::to_string(s.first_year) + "-" +
                                                    std::to_string(s.last_year()));
            continue;
        }
        if (!detail::has_variance(s.gdp_growth)) {
            fail(ErrorCode::ZeroVarianceSeries, id + ": gdp_growth_pct constant over " +
                                                    std::to_string(s.first_year) + "-" + std::to_string(s.last_year()));
            continue;
        }
        series.push_back(std::move(s));
    }
    if (first_code) throw Error(*first_code, diagnostics);
    return Panel::from_series(std::move(series));
}

/// Inverse of load_panel for the stored windows; values use shortest round-trip form.
inline std::string to_csv(const Panel& panel) {
    std::string out = "country,year,fdi_usd,gdp_growth_pct\n";
    for (const auto& c : panel.countries()) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            out += c.country_id;
            out += ',';
            out += std::to_string(c.first_year + static_cast<int>(i));
            out += ',';
            out += text::format_double(c.fdi[i]);
            out += ',';
            out += text::format_double(c.gdp_growth[i]);
            out += '\n';
        }
    }
    return out;
}

/// Mapping entries for every country in the panel.
inline GroupMapping mapping_of(const Panel& panel) {
    GroupMapping m;
    for (const auto& c : panel.countries()) m.emplace(c.country_id, CountryInfo{c.group, c.display_name});
    return m;
}

}  // namespace fdilag
