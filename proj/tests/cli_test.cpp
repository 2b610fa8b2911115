#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdilag/panel.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("fdilag_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args) {
        const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + FDILAG_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                                err.string() + "\"";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read(out), read(err)};
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, PaperTablesFit) {
    const auto r = run("fit-ranksize --paper-tables --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto fits = json::parse(read(dir_ / "o" / "ranksize_fits.json"))["fits"];
    ASSERT_EQ(fits.size(), 4u);
    EXPECT_NEAR(fits[0]["m1"].get<double>(), 0.8657, 0.0526);
    EXPECT_NEAR(fits[0]["r_squared"].get<double>(), 0.9880, 0.005);
    EXPECT_TRUE(fs::exists(dir_ / "o" / "ranksize_plot.csv"));
}

TEST_F(Cli, PaperTablesReportIsByteIdenticalOnRerun) {
    ASSERT_EQ(run("report --paper-tables --out " + (dir_ / "a").string()).code, 0);
    const auto r = run("report --paper-tables --out " + (dir_ / "b").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(read(dir_ / "a" / "report.json"), read(dir_ / "b" / "report.json"));
    EXPECT_NE(r.out.find("Table 5: matched"), std::string::npos);
    EXPECT_EQ(r.out.find("unmatched"), std::string::npos) << r.out;
}

TEST_F(Cli, PanelPipelineWithMaxLagZero) {
    const auto panel = oracle::random_panel(21, 8);
    write(dir_ / "panel.csv", fdilag::to_csv(panel));
    write(dir_ / "map.csv", fdilag::mapping_to_csv(fdilag::mapping_of(panel)));
    const auto r = run("correlate --panel " + (dir_ / "panel.csv").string() + " --mapping " + (dir_ / "map.csv").string() +
                       " --max-lag 0 --format both --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = read(dir_ / "o" / "correlation_matrix.csv");
    EXPECT_EQ(csv.find(",1,"), std::string::npos);  // no lag-1 rows
    const auto cells = json::parse(read(dir_ / "o" / "correlation_matrix.json"));
    EXPECT_EQ(cells.size(), 8u);
    EXPECT_TRUE(fs::exists(dir_ / "o" / "correlation_table.txt"));
}

TEST_F(Cli, GapPanelExitsTwoNamingCountryAndYear) {
    std::string csv = "country,year,fdi_usd,gdp_growth_pct\n";
    for (int y = 1970; y <= 1975; ++y) {
        if (y == 1973) continue;
        csv += "GHA," + std::to_string(y) + "," + std::to_string(1e6 * (y - 1969)) + "," + std::to_string((y % 3) * 1.5) + "\n";
    }
    write(dir_ / "gap.csv", csv);
    const auto r = run("ingest --panel " + (dir_ / "gap.csv").string() + " --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("GHA"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("1973"), std::string::npos) << r.err;
}

TEST_F(Cli, ExactModelCoefficientsGiveUnitRSquared) {
    std::string csv = "country,group,lag,rho\n";
    const int n = 30;
    for (int r = 1; r <= n; ++r) {
        const double y = -1.0 + 0.9 * std::pow(n, -0.1) * std::pow(r, -0.1) * std::pow(n + 1 - r, 0.25);
        char id[8];
        std::snprintf(id, sizeof id, "R%02d", r);
        std::ostringstream line;
        line.precision(17);
        line << id << ",low,0," << y << '\n';
        csv += line.str();
    }
    write(dir_ / "coef.csv", csv);
    const auto r = run("fit-ranksize --coefficients " + (dir_ / "coef.csv").string() + " --max-lag 0 --out " +
                       (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto fits = json::parse(read(dir_ / "o" / "ranksize_fits.json"))["fits"];
    EXPECT_NEAR(fits[0]["r_squared"].get<double>(), 1.0, 1e-9);
}

TEST_F(Cli, ConstantCoefficientsReportDegenerateData) {
    std::string csv = "country,group,lag,rho\n";
    for (int i = 0; i < 10; ++i) csv += "C" + std::to_string(i) + ",high,0,0.1\n";
    write(dir_ / "coef.csv", csv);
    const auto r = run("fit-ranksize --coefficients " + (dir_ / "coef.csv").string() + " --max-lag 0 --out " +
                       (dir_ / "o").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE((r.out + r.err + read(dir_ / "o" / "ranksize_fits.json")).find("DegenerateData"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("correlate --out " + (dir_ / "o").string()).code, 2);
    EXPECT_EQ(run("trends --paper-tables --alpha 1.5").code, 2);
    EXPECT_EQ(run("trends --paper-tables --max-lag 5").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    EXPECT_EQ(run("fetch --out " + (dir_ / "o").string()).code, 2);
}

TEST_F(Cli, FetchReplayIsDeterministic) {
    const std::string fixture = std::string(FDILAG_FIXTURE_DIR) + "/worldbank_replay.json";
    const std::string common = "fetch --replay " + fixture + " --countries GHA,FRA,KOR,NGA --from 2000 --to 2015 --per-page 40";
    const auto a = run(common + " --record " + (dir_ / "rec.json").string() + " --out " + (dir_ / "a").string());
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("dropped"), std::string::npos);
    const auto b = run("fetch --replay " + (dir_ / "rec.json").string() +
                       " --countries GHA,FRA,KOR,NGA --from 2000 --to 2015 --per-page 40 --out " + (dir_ / "b").string());
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(read(dir_ / "a" / "panel.csv"), read(dir_ / "b" / "panel.csv"));
    EXPECT_EQ(read(dir_ / "a" / "panel_summary.json"), read(dir_ / "b" / "panel_summary.json"));

    // the fetched panel feeds straight into the analysis commands
    const auto c = run("correlate --panel " + (dir_ / "a" / "panel.csv").string() + " --out " + (dir_ / "c").string());
    EXPECT_EQ(c.code, 0) << c.err;
}

TEST_F(Cli, FetchReplayWithWrongRangeIsNetworkError) {
    const std::string fixture = std::string(FDILAG_FIXTURE_DIR) + "/worldbank_replay.json";
    const auto r = run("fetch --replay " + fixture + " --countries GHA --from 2000 --to 2015 --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 4);
}
