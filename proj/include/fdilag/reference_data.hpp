#pragma once

// Published reference values for the 43-country, 1970-2015 FDI/GDP-growth
// panel: cluster membership, the four-lag coefficient tables and the
// rank-size fit parameters. Coefficients are kept exactly as printed
// (4 decimals or fewer); data/reference_coefficients.csv mirrors them.

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "fdilag/lagcorr.hpp"
#include "fdilag/panel.hpp"

namespace fdilag::reference {

inline constexpr int kFirstYear = 1970;
inline constexpr int kLastYear = 2015;
inline constexpr std::size_t kTableLags = 4;  // Lag0..Lag3

struct Country {
    std::string_view id;  // ISO 3166-1 alpha-3, as used by the World Bank API
    std::string_view name;
    IhdiGroup group;
    std::array<double, kTableLags> rho;
};

// Row order follows the printed tables.
inline constexpr std::array<Country, 43> kCountries{{
    {"AUS", "Australia", IhdiGroup::VeryHigh, {-0.0891, -0.1057, -0.1658, -0.1544}},
    {"AUT", "Austria", IhdiGroup::VeryHigh, {-0.0324, -0.0578, -0.2531, -0.1171}},
    {"CAN", "Canada", IhdiGroup::VeryHigh, {-0.1116, -0.3343, -0.4100, -0.2259}},
    {"DNK", "Denmark", IhdiGroup::VeryHigh, {0.0731, -0.0698, -0.2549, -0.1092}},
    {"FRA", "France", IhdiGroup::VeryHigh, {-0.2658, -0.4128, -0.4663, -0.4376}},
    {"FIN", "Finland", IhdiGroup::VeryHigh, {0.1477, -0.2007, -0.2216, 0.0011}},
    {"DEU", "Germany", IhdiGroup::VeryHigh, {-0.0492, -0.0832, -0.3272, -0.3945}},
    {"NLD", "Netherlands", IhdiGroup::VeryHigh, {-0.1127, -0.2612, -0.5156, -0.356}},
    {"SWE", "Sweden", IhdiGroup::VeryHigh, {0.1827, -0.0798, -0.0671, 0.0903}},
    {"GBR", "Great Britain", IhdiGroup::VeryHigh, {-0.0281, -0.2873, -0.2852, -0.2979}},
    {"NOR", "Norway", IhdiGroup::VeryHigh, {-0.292, -0.5401, -0.4867, -0.5135}},
    {"ISL", "Iceland", IhdiGroup::VeryHigh, {0.3606, 0.2447, -0.0723, -0.4235}},
    {"IRL", "Ireland", IhdiGroup::VeryHigh, {-0.051, -0.189, -0.3079, -0.3582}},

    {"ARG", "Argentina", IhdiGroup::High, {0.070, -0.0026, -0.1665, -0.2003}},
    {"ISR", "Israel", IhdiGroup::High, {-0.0814, -0.1962, -0.2664, -0.2507}},
    {"ESP", "Spain", IhdiGroup::High, {-0.1723, -0.3860, -0.4221, -0.3608}},
    {"ITA", "Italy", IhdiGroup::High, {-0.2451, -0.2707, -0.5857, -0.5027}},
    {"USA", "USA", IhdiGroup::High, {-0.1703, -0.3730, -0.3959, -0.3118}},
    {"PRT", "Portugal", IhdiGroup::High, {-0.4676, -0.4155, -0.4101, -0.4005}},
    {"GRC", "Greece", IhdiGroup::High, {-0.1707, -0.3173, -0.4333, -0.5772}},
    {"JPN", "Japan", IhdiGroup::High, {-0.4620, -0.5979, -0.3580, -0.0681}},
    {"MLT", "Malta", IhdiGroup::High, {-0.2271, -0.3781, -0.1920, -0.2168}},
    {"CYP", "Cyprus", IhdiGroup::High, {0.0037, -0.0115, -0.0653, -0.3012}},
    {"KOR", "Korea", IhdiGroup::High, {-0.4883, -0.4884, -0.4548, -0.4838}},

    {"URY", "Uruguay", IhdiGroup::Medium, {0.2719, 0.2009, 0.1545, 0.0954}},
    {"LKA", "Sri Lanka", IhdiGroup::Medium, {0.3837, 0.2367, 0.1429, 0.1974}},
    {"VEN", "Venezuela", IhdiGroup::Medium, {0.1176, -0.0214, -0.3486, -0.1883}},
    {"MEX", "Mexico", IhdiGroup::Medium, {-0.2526, -0.3069, -0.2489, -0.1737}},
    {"PER", "Peru", IhdiGroup::Medium, {0.3097, 0.2389, 0.1542, 0.1571}},
    {"MUS", "Mauritius", IhdiGroup::Medium, {-0.0059, -0.0971, -0.1590, -0.1252}},
    {"CHL", "Chile", IhdiGroup::Medium, {-0.0805, -0.2090, -0.2509, -0.2252}},
    {"TUR", "Turkey", IhdiGroup::Medium, {0.0113, -0.1529, -0.1281, -0.0046}},

    {"PHL", "Philippines", IhdiGroup::Low, {0.2148, 0.2372, 0.1376, 0.1110}},
    {"PRY", "Paraguay", IhdiGroup::Low, {-0.1824, -0.1169, -0.0791, -0.1733}},
    {"IRQ", "Iraq", IhdiGroup::Low, {-0.0876, -0.0362, -0.0849, -0.0626}},
    {"BOL", "Bolivia", IhdiGroup::Low, {0.2487, 0.1702, 0.1313, 0.1387}},
    {"ZAF", "South Africa", IhdiGroup::Low, {0.0587, -0.0702, -0.0065, 0.1224}},
    {"NGA", "Nigeria", IhdiGroup::Low, {0.1376, 0.2380, 0.2015, 0.1699}},
    {"NER", "Niger", IhdiGroup::Low, {0.2407, 0.2615, 0.2344, 0.2181}},
    {"SLV", "El Salvador", IhdiGroup::Low, {0.1095, 0.0032, -0.0744, 0.0461}},
    {"IND", "India", IhdiGroup::Low, {0.2701, 0.3192, 0.2934, 0.2574}},
    {"NPL", "Nepal", IhdiGroup::Low, {0.0722, 0.0668, 0.0241, 0.0352}},
    {"GHA", "Ghana", IhdiGroup::Low, {0.4223, 0.3874, 0.3618, 0.3487}},
}};

/// Published rank-size fit for one lag: value and standard error per parameter.
struct PublishedFit {
    int lag;
    double m1, m1_se;
    double m2, m2_se;
    double m3, m3_se;
    double r_squared;
};

inline constexpr std::array<PublishedFit, kTableLags> kRankSizeFits{{
    {0, 0.8657, 0.0526, 0.0773, 0.0059, 0.2180, 0.0089, 0.9880},
    {1, 0.7365, 0.0770, 0.0940, 0.0097, 0.2733, 0.0161, 0.9771},
    {2, 0.9586, 0.0964, 0.1295, 0.0093, 0.2374, 0.0156, 0.9787},
    {3, 0.7194, 0.0639, 0.0955, 0.0082, 0.2706, 0.0137, 0.9832},
}};

inline GroupMapping mapping() {
    GroupMapping m;
    for (const auto& c : kCountries) m.emplace(std::string(c.id), CountryInfo{c.group, std::string(c.name)});
    return m;
}

inline const Country* find(std::string_view id) noexcept {
    for (const auto& c : kCountries)
        if (c.id == id) return &c;
    return nullptr;
}

/// The printed coefficient tables as matrix rows (rho only; the tables carry
/// no pair counts, so n = 0 and t/p are NaN).
inline std::vector<LagCorrelationRow> coefficient_rows() {
    std::vector<LagCorrelationRow> rows;
    for (const auto& c : kCountries) {
        LagCorrelationRow row;
        row.country_id = std::string(c.id);
        row.group = c.group;
        for (std::size_t k = 0; k < kTableLags; ++k) row.lags.push_back(LagStat::coefficient_only(k, c.rho[k]));
        rows.push_back(std::move(row));
    }
    order_rows(rows);
    return rows;
}

}  // namespace fdilag::reference
