#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fdilag/export.hpp"
#include "fdilag/reference_data.hpp"
#include "fdilag/report.hpp"
#include "support/oracles.hpp"

using namespace fdilag;

namespace {

std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const io::Json* item(const io::Json& list, const std::string& name) {
    for (const auto& it : list)
        if (it["item"] == name) return &it;
    return nullptr;
}

}  // namespace

TEST(ReferenceRows, SpotChecks) {
    const auto* gha = reference::find("GHA");
    ASSERT_NE(gha, nullptr);
    EXPECT_EQ(gha->group, IhdiGroup::Low);
    EXPECT_DOUBLE_EQ(gha->rho[0], 0.4223);
    const auto* fra = reference::find("FRA");
    ASSERT_NE(fra, nullptr);
    EXPECT_EQ(fra->group, IhdiGroup::VeryHigh);
    ASSERT_NE(reference::find("KOR"), nullptr);
    EXPECT_EQ(reference::find("ZZZ"), nullptr);
}

TEST(LoadMatrixCsv, BundledFileEqualsTranscribedTables) {
    const auto rows = io::load_matrix_csv(read(std::string(FDILAG_DATA_DIR) + "/reference_coefficients.csv"));
    const auto expected = reference::coefficient_rows();
    ASSERT_EQ(rows.size(), expected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].country_id, expected[i].country_id);
        EXPECT_EQ(rows[i].group, expected[i].group);
        EXPECT_EQ(rows[i].lags, expected[i].lags);
    }
}

TEST(LoadMatrixCsv, RoundTripsMatrixOutput) {
    const auto panel = oracle::random_panel(3, 10);
    const auto rows = correlation_matrix(panel, LagSpec{3});
    const auto back = io::load_matrix_csv(io::matrix_to_csv(rows));
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(back[i].lags, rows[i].lags);
}

TEST(LoadMatrixCsv, GroupFromMapping) {
    const auto rows = io::load_matrix_csv("country,lag,rho\nGHA,0,0.4\nGHA,1,0.2\n", reference::mapping());
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].group, IhdiGroup::Low);
    EXPECT_FALSE(rows[0].lags[0].has_test());
}

TEST(LoadMatrixCsv, Rejections) {
    const auto code = [](std::string_view csv) {
        try {
            (void)io::load_matrix_csv(csv, reference::mapping());
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::EmptyInput;  // sentinel: nothing thrown
    };
    EXPECT_EQ(code("country,rho\nGHA,0.1\n"), ErrorCode::MissingColumn);
    EXPECT_EQ(code("country,lag,rho\nGHA,0,1.5\n"), ErrorCode::NonNumericValue);
    EXPECT_EQ(code("country,lag,rho\nXXX,0,0.1\n"), ErrorCode::UnmappedCountry);
    EXPECT_EQ(code("country,lag,rho\nGHA,0,0.1\nGHA,0,0.2\n"), ErrorCode::DuplicateCountryYear);
    EXPECT_EQ(code("country,lag,rho\nGHA,0,0.1\nGHA,2,0.2\n"), ErrorCode::InvalidArgument);
}

TEST(JsonNumber, NonFiniteValues) {
    EXPECT_TRUE(io::number(NAN).is_null());
    EXPECT_EQ(io::number(INFINITY), "inf");
    EXPECT_EQ(io::number(-INFINITY), "-inf");
    EXPECT_EQ(io::number(0.25), 0.25);
}

TEST(MatrixTable, FourDecimalsAndSignificanceMark) {
    std::vector<LagCorrelationRow> rows{{"AAA", IhdiGroup::High, {{0, 0.123456, 40, 3.0, 0.01}, {1, -0.5, 39, -1.0, 0.3}}}};
    const auto table = io::matrix_to_table(rows);
    EXPECT_NE(table.find("0.1235*"), std::string::npos);
    EXPECT_NE(table.find("-0.5000 "), std::string::npos);
}

TEST(MatrixCsv, TableOnlyRowsHaveBlankTestColumns) {
    const auto rows = reference::coefficient_rows();
    const auto csv = io::matrix_to_csv(std::span(rows).first(1));
    EXPECT_NE(csv.find(",,\n"), std::string::npos);
}

TEST(Report, PaperTablesChecklistAllMatched) {
    report::Inputs in;
    in.source = "paper-tables";
    in.rows = reference::coefficient_rows();
    const auto doc = report::build(in);
    const auto& list = doc["reproduction_checklist"];
    for (const auto* name : {"Table 1", "Table 2", "Table 3", "Table 4", "Table 5", "Figure 1", "Figure 2"}) {
        const auto* it = item(list, name);
        ASSERT_NE(it, nullptr) << name;
        EXPECT_EQ((*it)["status"], "matched") << name;
    }
    EXPECT_TRUE(doc["significance"].empty());
    EXPECT_TRUE(doc["panel"].is_null());
    EXPECT_EQ(doc["rank_size_fits"][0]["rank1_country"], "GHA");
    EXPECT_EQ(doc["rank_size_fits"][0]["positive_count"], 20);
}

TEST(Report, Deterministic) {
    const auto panel = oracle::random_panel(12, 16);
    report::Inputs in;
    in.source = "panel";
    in.panel = panel;
    in.rows = correlation_matrix(panel, LagSpec{3});
    const auto a = report::build(in).dump(1);
    const auto b = report::build(in).dump(1);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"significance_lost_at_lag\""), std::string::npos);
}

TEST(Report, SyntheticPanelFailsTableComparison) {
    // random ids never match published countries, so tables are not applicable
    const auto panel = oracle::random_panel(13, 8);
    report::Inputs in;
    in.source = "panel";
    in.panel = panel;
    in.rows = correlation_matrix(panel, LagSpec{3});
    const auto doc = report::build(in);
    EXPECT_EQ((*item(doc["reproduction_checklist"], "Table 1"))["status"], "not_applicable");
    EXPECT_EQ((*item(doc["reproduction_checklist"], "Figure 2"))["status"], "unmatched");
}

TEST(CompareWithTables, PerturbedTablesDropBelowThreshold) {
    auto rows = reference::coefficient_rows();
    EXPECT_TRUE(report::compare_with_tables(rows, IhdiGroup::Medium).matched());
    for (auto& r : rows)
        for (auto& c : r.lags) c.rho = -c.rho;
    EXPECT_FALSE(report::compare_with_tables(rows, IhdiGroup::Medium).matched());
}

TEST(FitAllLags, RecordsFailureWithoutStopping) {
    std::vector<LagCorrelationRow> rows;
    for (int i = 0; i < 10; ++i) {
        const double v = 0.5 - 0.1 * i;
        rows.push_back({"C" + std::to_string(i), IhdiGroup::Low,
                        {LagStat::coefficient_only(0, v), LagStat::coefficient_only(1, 0.2)}});
    }
    const auto fits = io::fit_all_lags(rows, 1);
    ASSERT_EQ(fits.size(), 2u);
    EXPECT_TRUE(fits[0].fit.has_value());
    ASSERT_TRUE(fits[1].error.has_value());
    EXPECT_EQ(fits[1].error->code(), ErrorCode::DegenerateData);
    EXPECT_EQ(io::fit_to_json(fits[1])["error"], std::string(to_string(ErrorCode::DegenerateData)));
}
