#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fdilag/panel.hpp"
#include "fdilag/reference_data.hpp"
#include "support/oracles.hpp"

using namespace fdilag;

namespace {

GroupMapping one(const std::string& id, IhdiGroup g) { return {{id, CountryInfo{g, id}}}; }

std::string rows_for(const std::string& id, int from, int to, double fdi0 = 1e8, double gdp0 = 2.0) {
    std::string out;
    for (int y = from; y <= to; ++y) {
        const double k = y - from;
        out += id + "," + std::to_string(y) + "," + std::to_string(fdi0 + 1e6 * k * k) + "," +
               std::to_string(gdp0 + ((y % 3) - 1) * 0.7) + "\n";
    }
    return out;
}

const std::string kHeader = "country,year,fdi_usd,gdp_growth_pct\n";

std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an fdilag::Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(IhdiGroup, RangesAreOrderedAndDisjoint) {
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::VeryHigh).lo, 0.80);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::VeryHigh).hi, 1.00);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::High).lo, 0.70);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::High).hi, 0.799);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::Medium).lo, 0.55);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::Medium).hi, 0.699);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::Low).lo, 0.0);
    EXPECT_DOUBLE_EQ(score_range(IhdiGroup::Low).hi, 0.549);
    for (std::size_t i = 1; i < kAllGroups.size(); ++i)
        EXPECT_LT(score_range(kAllGroups[i]).hi, score_range(kAllGroups[i - 1]).lo);
    EXPECT_EQ(group_for_score(0.85), IhdiGroup::VeryHigh);
    EXPECT_EQ(group_for_score(0.7995), IhdiGroup::High);
    EXPECT_EQ(group_for_score(0.6), IhdiGroup::Medium);
    EXPECT_EQ(group_for_score(0.549), IhdiGroup::Low);
}

TEST(IhdiGroup, LabelsRoundTrip) {
    for (auto g : kAllGroups) EXPECT_EQ(parse_group(group_label(g)), g);
    EXPECT_FALSE(parse_group("VeryHigh").has_value());
}

TEST(ReferenceMapping, GroupSizesAre13_11_8_11) {
    const auto m = reference::mapping();
    ASSERT_EQ(m.size(), 43u);
    std::map<IhdiGroup, int> sizes;
    for (const auto& [_, info] : m) ++sizes[info.group];
    EXPECT_EQ(sizes[IhdiGroup::VeryHigh], 13);
    EXPECT_EQ(sizes[IhdiGroup::High], 11);
    EXPECT_EQ(sizes[IhdiGroup::Medium], 8);
    EXPECT_EQ(sizes[IhdiGroup::Low], 11);
}

TEST(ReferenceMapping, MatchesBundledMappingFile) {
    const auto file = load_group_mapping(read(std::string(FDILAG_DATA_DIR) + "/ihdi_groups.csv"));
    EXPECT_EQ(file, reference::mapping());
}

TEST(LoadPanel, ThreeYearsIsTooShort) {
    const auto src = kHeader + rows_for("GHA", 1970, 1972);
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::GapInsideWindow);
}

TEST(LoadPanel, DuplicateCountryYear) {
    const auto src = kHeader + rows_for("GHA", 1970, 1976) + "GHA,1971,5,5\n";
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::DuplicateCountryYear);
}

TEST(LoadPanel, MissingColumn) {
    const std::string src = "country,year,fdi_usd\nGHA,1970,1\n";
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::MissingColumn);
}

TEST(LoadPanel, NonNumericValue) {
    const auto src = kHeader + rows_for("GHA", 1970, 1975) + "GHA,1976,abc,1\n";
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::NonNumericValue);
    const auto bad_year = kHeader + "GHA,19x0,1,1\n";
    EXPECT_EQ(code_of([&] { (void)load_panel(bad_year, one("GHA", IhdiGroup::Low)); }), ErrorCode::NonNumericValue);
}

TEST(LoadPanel, UnmappedCountry) {
    const auto src = kHeader + rows_for("GHA", 1970, 1980) + rows_for("XXX", 1970, 1980);
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::UnmappedCountry);
}

TEST(LoadPanel, ZeroVariance) {
    std::string src = kHeader;
    for (int y = 1970; y < 1980; ++y) src += "GHA," + std::to_string(y) + ",1000," + std::to_string(y % 4) + "\n";
    EXPECT_EQ(code_of([&] { (void)load_panel(src, one("GHA", IhdiGroup::Low)); }), ErrorCode::ZeroVarianceSeries);
}

TEST(LoadPanel, KeepsLongestCompleteRun) {
    // 1970-1973 complete, 1974 gdp blank, 1975-1984 complete
    std::string src = kHeader + rows_for("GHA", 1970, 1973) + "GHA,1974,12345,\n" + rows_for("GHA", 1975, 1984);
    const auto p = load_panel(src, one("GHA", IhdiGroup::Low));
    ASSERT_EQ(p.size(), 1u);
    const auto& s = p.countries().front();
    EXPECT_EQ(s.first_year, 1975);
    EXPECT_EQ(s.last_year(), 1984);
    EXPECT_EQ(s.size(), 10u);
    EXPECT_EQ(p.first_year(), 1975);
    EXPECT_EQ(p.last_year(), 1984);
}

TEST(LoadPanel, RowsMayArriveUnsorted) {
    std::string shuffled = kHeader;
    const auto body = rows_for("GHA", 1970, 1979);
    std::vector<std::string> lines;
    std::stringstream ss(body);
    for (std::string l; std::getline(ss, l);) lines.push_back(l);
    std::reverse(lines.begin(), lines.end());
    for (const auto& l : lines) shuffled += l + "\n";
    EXPECT_EQ(load_panel(shuffled, one("GHA", IhdiGroup::Low)), load_panel(kHeader + body, one("GHA", IhdiGroup::Low)));
}

TEST(LoadPanel, GapMessageNamesCountryAndYear) {
    const auto src = kHeader + rows_for("GHA", 1970, 1972) + "GHA,1973,,1.5\n" + rows_for("GHA", 1974, 1976);
    try {
        (void)load_panel(src, one("GHA", IhdiGroup::Low));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GapInsideWindow);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("GHA"), std::string::npos) << msg;
        EXPECT_NE(msg.find("1973"), std::string::npos) << msg;
    }
}

TEST(LoadPanel, ReportsEveryFailingCountry) {
    const auto src = kHeader + rows_for("AAA", 1970, 1972) + rows_for("BBB", 1970, 1973) + rows_for("CCC", 1970, 1990);
    GroupMapping m{{"AAA", {IhdiGroup::Low, ""}}, {"BBB", {IhdiGroup::Low, ""}}, {"CCC", {IhdiGroup::Low, ""}}};
    try {
        (void)load_panel(src, m);
        FAIL();
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("AAA"), std::string::npos);
        EXPECT_NE(msg.find("BBB"), std::string::npos);
        EXPECT_EQ(msg.find("CCC"), std::string::npos);
    }
}

TEST(LoadPanel, FullReferenceShapedPanel) {
    // 46 complete years for each of the 43 reference countries.
    std::string src = kHeader;
    std::mt19937_64 rng(7);
    for (const auto& c : reference::kCountries) {
        const auto s = oracle::random_country(rng, std::string(c.id), c.group, 46, 1970);
        for (std::size_t i = 0; i < s.size(); ++i)
            src += s.country_id + "," + std::to_string(1970 + i) + "," + text::format_double(s.fdi[i]) + "," +
                   text::format_double(s.gdp_growth[i]) + "\n";
    }
    const auto p = load_panel(src, reference::mapping());
    EXPECT_EQ(p.size(), 43u);
    EXPECT_EQ(p.first_year(), 1970);
    EXPECT_EQ(p.last_year(), 2015);
    EXPECT_EQ(cluster(p, IhdiGroup::VeryHigh).size(), 13u);
    EXPECT_EQ(cluster(p, IhdiGroup::High).size(), 11u);
    EXPECT_EQ(cluster(p, IhdiGroup::Medium).size(), 8u);
    EXPECT_EQ(cluster(p, IhdiGroup::Low).size(), 11u);
    EXPECT_EQ(p.observation_count(), 43u * 46u * 2u);
    EXPECT_EQ(p.find("GHA")->display_name, "Ghana");

    const auto vh = cluster(p, IhdiGroup::VeryHigh);
    std::set<std::string> ids;
    for (const auto& s : vh) ids.insert(s.country_id);
    EXPECT_TRUE(ids.contains("AUS"));
    EXPECT_TRUE(ids.contains("IRL"));
    EXPECT_TRUE(std::is_sorted(vh.begin(), vh.end(),
                               [](const auto& a, const auto& b) { return a.country_id < b.country_id; }));
}

TEST(Cluster, EmptyPanelGivesEmptyResult) {
    const Panel p;
    for (auto g : kAllGroups) EXPECT_TRUE(cluster(p, g).empty());
}

TEST(Cluster, UnionIsPanelWithoutOverlap) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = oracle::random_panel(seed, 3 + seed % 11);
        std::multiset<std::string> seen;
        for (auto g : kAllGroups)
            for (const auto& s : cluster(p, g)) seen.insert(s.country_id);
        std::multiset<std::string> all;
        for (const auto& s : p.countries()) all.insert(s.country_id);
        EXPECT_EQ(seen, all);
    }
}

TEST(PanelProperty, CsvRoundTripAndDeterminism) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto p = oracle::random_panel(seed, 1 + seed % 9);
        const auto csv = to_csv(p);
        const auto mapping = mapping_of(p);
        const auto a = load_panel(csv, mapping);
        const auto b = load_panel(csv, mapping);
        EXPECT_EQ(a, p);
        EXPECT_EQ(a, b);
        EXPECT_EQ(to_csv(a), csv);
    }
}

TEST(GroupMappingFile, ParsesAndRejects) {
    const auto m = load_group_mapping("country,group\nGHA,low\nFRA,very_high\n");
    EXPECT_EQ(m.at("GHA").group, IhdiGroup::Low);
    EXPECT_EQ(m.at("FRA").group, IhdiGroup::VeryHigh);
    EXPECT_THROW((void)load_group_mapping("country,group\nGHA,lowish\n"), Error);
    EXPECT_THROW((void)load_group_mapping("country\nGHA\n"), Error);
    EXPECT_EQ(load_group_mapping(mapping_to_csv(reference::mapping())), reference::mapping());
}

TEST(PanelFromSeries, RejectsBrokenInvariants) {
    std::mt19937_64 rng(3);
    auto s = oracle::random_country(rng, "AAA", IhdiGroup::High, 10);
    auto dup = s;
    EXPECT_EQ(code_of([&] { (void)Panel::from_series({s, dup}); }), ErrorCode::DuplicateCountryYear);
    auto short_one = s;
    short_one.fdi.resize(4);
    short_one.gdp_growth.resize(4);
    EXPECT_EQ(code_of([&] { (void)Panel::from_series({short_one}); }), ErrorCode::GapInsideWindow);
    auto ragged = s;
    ragged.fdi.pop_back();
    EXPECT_EQ(code_of([&] { (void)Panel::from_series({ragged}); }), ErrorCode::LengthMismatch);
}
