// fdilag: lagged FDI / GDP-growth correlation toolkit.
//
//   fdilag ingest       --panel P [--mapping M] --out D
//   fdilag correlate    --panel P [--max-lag K] [--alpha A] --out D
//   fdilag trends       (--panel P | --paper-tables | --coefficients C) --out D
//   fdilag fit-ranksize (--panel P | --paper-tables | --coefficients C) --out D
//   fdilag fetch        (--live | --replay F) [--record F] --out D
//   fdilag report       (--panel P | --paper-tables | --coefficients C) --out D
//
// Exit codes: 0 success, 2 input validation, 3 numerical failure, 4 network failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fdilag/curl_transport.hpp"
#include "fdilag/fdilag.hpp"

namespace fs = std::filesystem;
using namespace fdilag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNetwork = 4;

struct RunConfig {
    std::string panel_path;
    std::string mapping_path;
    std::string coefficients_path;
    bool paper_tables = false;
    std::size_t max_lag = 3;
    double alpha = 0.05;
    std::string out_dir = "fdilag-out";
    std::string format = "both";

    [[nodiscard]] bool want_csv() const { return format != "json"; }
    [[nodiscard]] bool want_json() const { return format != "csv"; }
};

struct FetchConfig {
    bool live = false;
    std::string replay_path;
    std::string record_path;
    std::string countries;
    int first_year = reference::kFirstYear;
    int last_year = reference::kLastYear;
    std::string user_agent = "fdilag/1.0";
    int per_page = 1000;
};

/// Thrown for CLI-level input problems that are not library errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << content;
    std::cout << "wrote " << path.string() << '\n';
}

GroupMapping load_mapping(const RunConfig& cfg) {
    if (cfg.mapping_path.empty()) return reference::mapping();
    return load_group_mapping(read_file(cfg.mapping_path));
}

Panel load_panel_file(const RunConfig& cfg) {
    if (cfg.panel_path.empty()) throw UsageError("--panel is required");
    return load_panel(read_file(cfg.panel_path), load_mapping(cfg));
}

void check_config(const RunConfig& cfg, bool allow_tables) {
    const int sources = !cfg.panel_path.empty() + cfg.paper_tables + !cfg.coefficients_path.empty();
    if (sources != 1)
        throw UsageError(allow_tables ? "select exactly one of --panel, --paper-tables, --coefficients"
                                      : "--panel is required");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    if (cfg.paper_tables && cfg.max_lag >= reference::kTableLags)
        throw UsageError("the published tables cover lags 0.." + std::to_string(reference::kTableLags - 1));
}

/// Coefficient rows from whichever source the config selects.
std::vector<LagCorrelationRow> coefficient_rows(const RunConfig& cfg, std::optional<Panel>* panel_out = nullptr) {
    if (cfg.paper_tables) {
        auto rows = reference::coefficient_rows();
        for (auto& r : rows) r.lags.resize(cfg.max_lag + 1);
        return rows;
    }
    if (!cfg.coefficients_path.empty()) {
        auto rows = io::load_matrix_csv(read_file(cfg.coefficients_path), load_mapping(cfg));
        for (const auto& r : rows)
            if (!r.has_lag(cfg.max_lag))
                throw UsageError(r.country_id + " has no lag " + std::to_string(cfg.max_lag) + " in " + cfg.coefficients_path);
        for (auto& r : rows) r.lags.resize(cfg.max_lag + 1);
        return rows;
    }
    auto panel = load_panel_file(cfg);
    auto rows = correlation_matrix(panel, LagSpec{cfg.max_lag});
    if (panel_out) *panel_out = std::move(panel);
    return rows;
}

std::string source_name(const RunConfig& cfg) {
    if (cfg.paper_tables) return "paper-tables";
    if (!cfg.coefficients_path.empty()) return "coefficients";
    return "panel";
}

std::string dump(const io::Json& j) { return j.dump(2) + '\n'; }

// ------------------------------------------------------------------ commands

int cmd_ingest(const RunConfig& cfg) {
    const auto panel = load_panel_file(cfg);
    const fs::path out(cfg.out_dir);
    write_file(out / "panel.csv", to_csv(panel));
    write_file(out / "panel_summary.json", dump(io::panel_summary(panel)));
    std::cout << panel.size() << " countries, " << panel.first_year() << "-" << panel.last_year() << ", "
              << panel.observation_count() << " observations\n";
    for (auto g : kAllGroups) std::cout << "  " << group_title(g) << ": " << cluster(panel, g).size() << '\n';
    return kExitOk;
}

void print_significance(const std::vector<LagCorrelationRow>& rows, double alpha) {
    std::cout << "share of entries with p < " << alpha << " (rows: cluster, columns: lag)\n";
    for (const auto& s : summarize_significance(rows, alpha)) {
        std::string line = std::string(group_title(s.group));
        line.resize(12, ' ');
        line += "n=" + std::to_string(s.countries);
        line.resize(18, ' ');
        std::cout << line;
        for (double v : s.share_significant) std::cout << "  " << text::format_fixed(v, 2);
        if (s.significance_lost_at == 0)
            std::cout << "   no lag with a significant majority";
        else if (s.significance_lost_at < s.share_significant.size())
            std::cout << "   significance lost beyond lag " << s.significance_lost_at - 1;
        else
            std::cout << "   significant majority through lag " << s.significance_lost_at - 1;
        std::cout << '\n';
    }
}

int cmd_correlate(const RunConfig& cfg) {
    check_config(cfg, false);
    const auto panel = load_panel_file(cfg);
    const auto rows = correlation_matrix(panel, LagSpec{cfg.max_lag});
    const fs::path out(cfg.out_dir);
    if (cfg.want_csv()) write_file(out / "correlation_matrix.csv", io::matrix_to_csv(rows));
    if (cfg.want_json()) write_file(out / "correlation_matrix.json", dump(io::matrix_to_json(rows)));
    const auto table = io::matrix_to_table(rows, mapping_of(panel));
    write_file(out / "correlation_table.txt", table);
    std::cout << table << '\n';
    print_significance(rows, cfg.alpha);
    return kExitOk;
}

int cmd_trends(const RunConfig& cfg) {
    check_config(cfg, true);
    const auto rows = coefficient_rows(cfg);
    const auto trends = all_cluster_trends(rows, cfg.max_lag);
    const fs::path out(cfg.out_dir);
    if (cfg.want_csv()) write_file(out / "cluster_trends.csv", io::trends_to_csv(trends));
    if (cfg.want_json()) write_file(out / "cluster_trends.json", dump(io::trends_to_json(trends)));
    for (const auto& tr : trends) {
        std::cout << group_title(tr.group) << ": mean rho";
        for (double v : tr.mean_rho) std::cout << ' ' << text::format_fixed(v, 4);
        std::cout << "  trend " << text::format_fixed(tr.line.intercept, 4) << " + "
                  << text::format_fixed(tr.line.slope, 4) << " * lag\n";
    }
    return kExitOk;
}

int cmd_fit_ranksize(const RunConfig& cfg) {
    check_config(cfg, true);
    const auto rows = coefficient_rows(cfg);
    const auto fits = io::fit_all_lags(rows, cfg.max_lag);
    io::Json doc;
    doc["source"] = source_name(cfg);
    doc["model"] = "y(r) = -1 + m1 * N^-m2 * r^-m2 * (N+1-r)^m3";
    doc["fits"] = io::Json::array();
    for (const auto& lf : fits) doc["fits"].push_back(io::fit_to_json(lf));
    const fs::path out(cfg.out_dir);
    write_file(out / "ranksize_fits.json", dump(doc));
    write_file(out / "ranksize_plot.csv", io::plot_to_csv(fits));

    bool failed = false;
    for (const auto& lf : fits) {
        std::cout << "lag " << lf.ranked.lag << ": ";
        if (lf.fit) {
            const auto& f = *lf.fit;
            std::cout << "m1=" << text::format_fixed(f.params.m1, 4) << "+-" << text::format_fixed(f.std_errors[0], 4)
                      << " m2=" << text::format_fixed(f.params.m2, 4) << "+-" << text::format_fixed(f.std_errors[1], 4)
                      << " m3=" << text::format_fixed(f.params.m3, 4) << "+-" << text::format_fixed(f.std_errors[2], 4)
                      << " R2=" << text::format_fixed(f.r_squared, 4) << " (" << f.iterations << " iterations)";
            if (!f.all_positive) std::cout << " [non-positive parameter]";
            std::cout << '\n';
        } else {
            failed = true;
            std::cout << lf.error->what() << '\n';
        }
    }
    return failed ? kExitNumerical : kExitOk;
}

int cmd_report(const RunConfig& cfg) {
    check_config(cfg, true);
    report::Inputs in;
    in.source = source_name(cfg);
    in.max_lag = cfg.max_lag;
    in.alpha = cfg.alpha;
    in.rows = coefficient_rows(cfg, &in.panel);
    const auto doc = report::build(in);
    write_file(fs::path(cfg.out_dir) / "report.json", dump(doc));
    for (const auto& item : doc["reproduction_checklist"])
        std::cout << item["item"].get<std::string>() << ": " << item["status"].get<std::string>() << '\n';
    return kExitOk;
}

int cmd_fetch(const RunConfig& cfg, const FetchConfig& fc) {
    if (fc.live == !fc.replay_path.empty()) throw UsageError("select exactly one of --live, --replay");
    const auto mapping = load_mapping(cfg);

    std::vector<std::string> countries;
    if (fc.countries.empty()) {
        for (const auto& c : reference::kCountries) countries.emplace_back(c.id);
    } else {
        std::stringstream ss(fc.countries);
        for (std::string id; std::getline(ss, id, ',');)
            if (!text::trim(id).empty()) countries.emplace_back(text::trim(id));
    }
    const worldbank::YearRange years{fc.first_year, fc.last_year};
    const worldbank::IndicatorRequest fdi_req{countries, std::string(worldbank::kFdiIndicator), years};
    const worldbank::IndicatorRequest gdp_req{countries, std::string(worldbank::kGdpGrowthIndicator), years};

    worldbank::Transport transport;
    if (fc.live) {
        transport = worldbank::make_curl_transport(fc.user_agent);
    } else {
        auto replay = std::make_shared<worldbank::FixtureTransport>(
            worldbank::FixtureTransport::from_text(read_file(fc.replay_path)));
        transport = worldbank::FixtureTransport::shared(replay);
    }
    std::shared_ptr<worldbank::RecordingTransport> recorder;
    if (!fc.record_path.empty()) {
        recorder = std::make_shared<worldbank::RecordingTransport>(transport);
        transport = [recorder](const std::string& url) { return (*recorder)(url); };
    }

    worldbank::FetchOptions opts;
    opts.client.user_agent = fc.user_agent;
    opts.client.per_page = fc.per_page;
    if (!fc.live) {
        opts.clock = [] { return std::string("replay"); };
        opts.sleep = [](std::chrono::seconds) {};  // recorded waits already happened
    }

    const auto panel = worldbank::fetch_panel(fdi_req, gdp_req, mapping, transport, opts);
    if (recorder) write_file(fc.record_path, recorder->fixture().dump(1) + '\n');
    const fs::path out(cfg.out_dir);
    write_file(out / "panel.csv", to_csv(panel));
    write_file(out / "panel_summary.json", dump(io::panel_summary(panel)));
    std::cout << panel.size() << " countries retained, " << panel.first_year() << "-" << panel.last_year() << '\n';
    if (const auto it = panel.metadata.find("dropped"); it != panel.metadata.end() && !it->second.empty())
        std::cout << "dropped: " << it->second << '\n';
    return kExitOk;
}

void add_source_options(CLI::App* cmd, RunConfig& cfg, bool with_tables) {
    cmd->add_option("--panel", cfg.panel_path, "Panel CSV: country,year,fdi_usd,gdp_growth_pct");
    cmd->add_option("--mapping", cfg.mapping_path, "Group mapping CSV: country,group (default: bundled 43-country map)");
    if (with_tables) {
        cmd->add_flag("--paper-tables", cfg.paper_tables, "Use the bundled published coefficient tables");
        cmd->add_option("--coefficients", cfg.coefficients_path, "Coefficient CSV with country,lag,rho columns");
    }
    cmd->add_option("--max-lag", cfg.max_lag, "Largest lag in years")->capture_default_str();
    cmd->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--format", cfg.format, "Output formats")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-lagged FDI / GDP-growth correlation analysis"};
    app.require_subcommand(1);

    RunConfig cfg;
    FetchConfig fc;

    auto* ingest = app.add_subcommand("ingest", "Validate a panel file and write its normalized form");
    add_source_options(ingest, cfg, false);
    auto* correlate = app.add_subcommand("correlate", "Lagged Pearson matrix with t-test columns");
    add_source_options(correlate, cfg, false);
    auto* trends = app.add_subcommand("trends", "Cluster-averaged coefficient trend versus lag");
    add_source_options(trends, cfg, true);
    auto* fit = app.add_subcommand("fit-ranksize", "Fit the extended rank-size law per lag");
    add_source_options(fit, cfg, true);
    auto* report = app.add_subcommand("report", "Consolidated JSON report with reproduction checklist");
    add_source_options(report, cfg, true);

    auto* fetch = app.add_subcommand("fetch", "Build a panel from the World Bank indicator API");
    fetch->add_flag("--live", fc.live, "Query the live API");
    fetch->add_option("--replay", fc.replay_path, "Serve responses from a recorded fixture file");
    fetch->add_option("--record", fc.record_path, "Save every HTTP exchange to a fixture file");
    fetch->add_option("--countries", fc.countries, "Comma-separated ISO-3 codes (default: bundled 43)");
    fetch->add_option("--from", fc.first_year)->capture_default_str();
    fetch->add_option("--to", fc.last_year)->capture_default_str();
    fetch->add_option("--user-agent", fc.user_agent)->capture_default_str();
    fetch->add_option("--per-page", fc.per_page)->capture_default_str();
    fetch->add_option("--mapping", cfg.mapping_path, "Group mapping CSV (default: bundled)");
    fetch->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*ingest) return cmd_ingest(cfg);
        if (*correlate) return cmd_correlate(cfg);
        if (*trends) return cmd_trends(cfg);
        if (*fit) return cmd_fit_ranksize(cfg);
        if (*report) return cmd_report(cfg);
        if (*fetch) return cmd_fetch(cfg, fc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (kind_of(e.code())) {
            case ErrorKind::Numerical: return kExitNumerical;
            case ErrorKind::Network: return kExitNetwork;
            case ErrorKind::Validation: return kExitValidation;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
