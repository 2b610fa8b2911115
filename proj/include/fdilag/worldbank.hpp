#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fdilag/error.hpp"
#include "fdilag/panel.hpp"
#include "fdilag/text.hpp"

namespace fdilag::worldbank {

inline constexpr std::string_view kFdiIndicator = "BX.KLT.DINV.CD.WD";
inline constexpr std::string_view kGdpGrowthIndicator = "NY.GDP.MKTP.KD.ZG";
inline constexpr int kEarliestYear = 1960;

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;  // lower-case names
};

/// Performs one GET. Must be callable from two threads at once.
using Transport = std::function<HttpResponse(const std::string& url)>;
using Sleeper = std::function<void(std::chrono::seconds)>;

struct YearRange {
    int first = 0;
    int last = 0;
};

struct IndicatorRequest {
    std::vector<std::string> country_ids;  // ISO-3
    std::string indicator_id;
    YearRange years;
};

struct ClientConfig {
    std::string base_url = "https://api.worldbank.org/v2";
    int per_page = 1000;
    std::string user_agent = "fdilag/1.0";
    int max_retries = 3;
    std::chrono::seconds default_retry_after{2};
};

inline int current_year() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    return tm.tm_year + 1900;
}

inline void validate(const IndicatorRequest& req, int this_year = current_year()) {
    if (req.country_ids.empty()) throw Error(ErrorCode::InvalidArgument, "country list is empty");
    if (req.indicator_id.empty()) throw Error(ErrorCode::InvalidArgument, "indicator id is empty");
    if (req.years.first < kEarliestYear || req.years.last > this_year || req.years.first > req.years.last)
        throw Error(ErrorCode::InvalidArgument, "year range " + std::to_string(req.years.first) + ":" +
                                                    std::to_string(req.years.last) + " outside " +
                                                    std::to_string(kEarliestYear) + ":" + std::to_string(this_year));
}

inline std::string build_url(const IndicatorRequest& req, int page, const ClientConfig& cfg) {
    std::string codes;
    for (const auto& c : req.country_ids) {
        if (!codes.empty()) codes += ';';
        codes += c;
    }
    return cfg.base_url + "/country/" + codes + "/indicator/" + req.indicator_id +
           "?format=json&date=" + std::to_string(req.years.first) + ":" + std::to_string(req.years.last) +
           "&per_page=" + std::to_string(cfg.per_page) + "&page=" + std::to_string(page);
}

struct Observation {
    std::string country_id;
    int year = 0;
    std::optional<double> value;  // null in the API means "missing year"

    bool operator==(const Observation&) const = default;
};

struct Page {
    int page = 0;
    int pages = 0;
    int per_page = 0;
    int total = 0;
    std::string last_updated;
    std::vector<Observation> observations;
};

namespace detail {

// The API is inconsistent about numeric metadata: per_page arrives as a string.
inline int as_int(const nlohmann::json& j, std::string_view field) {
    const auto it = j.find(field);
    if (it == j.end()) throw Error(ErrorCode::SchemaMismatch, "page metadata lacks '" + std::string(field) + "'");
    if (it->is_number_integer()) return it->get<int>();
    if (it->is_string()) {
        if (const auto v = text::parse_int(it->get<std::string>())) return static_cast<int>(*v);
    }
    throw Error(ErrorCode::SchemaMismatch, "page metadata '" + std::string(field) + "' is not an integer");
}

inline std::string excerpt(std::string_view body) {
    constexpr std::size_t kMax = 200;
    std::string out(body.substr(0, kMax));
    if (body.size() > kMax) out += "...";
    return out;
}

}  // namespace detail

/// Parses one page of `[metadata, observations]`. `indicator_id`, when
/// non-empty, must match every record.
inline Page parse_page(std::string_view body, std::string_view indicator_id = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("response is not JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty() || !doc[0].is_object())
        throw Error(ErrorCode::SchemaMismatch, "expected [metadata, data] array: " + detail::excerpt(body));
    const auto& meta = doc[0];
    if (meta.contains("message")) {
        std::string msg;
        for (const auto& m : meta["message"]) msg += m.value("value", m.value("key", std::string{})) + " ";
        throw Error(ErrorCode::SchemaMismatch, "API error: " + std::string(text::trim(msg)));
    }
    Page page;
    page.page = detail::as_int(meta, "page");
    page.pages = detail::as_int(meta, "pages");
    page.per_page = detail::as_int(meta, "per_page");
    page.total = detail::as_int(meta, "total");
    page.last_updated = meta.value("lastupdated", std::string{});

    if (doc.size() < 2 || doc[1].is_null()) return page;
    if (!doc[1].is_array()) throw Error(ErrorCode::SchemaMismatch, "observation block is not an array");
    for (const auto& rec : doc[1]) {
        if (!rec.is_object()) throw Error(ErrorCode::SchemaMismatch, "observation is not an object");
        Observation obs;
        obs.country_id = rec.value("countryiso3code", std::string{});
        if (obs.country_id.empty()) throw Error(ErrorCode::SchemaMismatch, "observation lacks countryiso3code");
        const auto year = text::parse_int(rec.value("date", std::string{}));
        if (!year) throw Error(ErrorCode::SchemaMismatch, "observation for " + obs.country_id + " lacks a year");
        obs.year = static_cast<int>(*year);
        if (!indicator_id.empty()) {
            const auto id = rec.contains("indicator") ? rec["indicator"].value("id", std::string{}) : std::string{};
            if (id != indicator_id)
                throw Error(ErrorCode::SchemaMismatch, "record indicator '" + id + "' != '" + std::string(indicator_id) + "'");
        }
        const auto& v = rec.contains("value") ? rec["value"] : nlohmann::json();
        if (v.is_number()) {
            obs.value = v.get<double>();
        } else if (!v.is_null()) {
            throw Error(ErrorCode::SchemaMismatch, "non-numeric value for " + obs.country_id + " " + std::to_string(obs.year));
        }
        page.observations.push_back(std::move(obs));
    }
    return page;
}

/// GET with 429 handling: waits for Retry-After (or the configured default)
/// and retries up to cfg.max_retries times.
inline HttpResponse get_with_retry(const std::string& url, const Transport& transport, const ClientConfig& cfg,
                                   const Sleeper& sleep) {
    for (int attempt = 0;; ++attempt) {
        auto resp = transport(url);
        if (resp.status == 200) return resp;
        if (resp.status == 429) {
            if (attempt >= cfg.max_retries)
                throw Error(ErrorCode::RateLimited, "still rate limited after " + std::to_string(attempt) + " retries: " + url);
            auto wait = cfg.default_retry_after;
            if (const auto it = resp.headers.find("retry-after"); it != resp.headers.end()) {
                if (const auto secs = text::parse_int(it->second); secs && *secs >= 0) wait = std::chrono::seconds(*secs);
            }
            sleep(wait);
            continue;
        }
        throw Error(ErrorCode::HttpError,
                    "HTTP " + std::to_string(resp.status) + " for " + url + ": " + detail::excerpt(resp.body));
    }
}

struct IndicatorSeries {
    std::string indicator_id;
    std::string last_updated;
    std::vector<Observation> observations;
};

/// Retrieves every page of one indicator and checks the pages agree.
inline IndicatorSeries fetch_indicator(const IndicatorRequest& req, const Transport& transport,
                                       const ClientConfig& cfg, const Sleeper& sleep) {
    validate(req);
    IndicatorSeries out{req.indicator_id, {}, {}};
    int pages = 1;
    int total = -1;
    for (int p = 1; p <= pages; ++p) {
        const auto url = build_url(req, p, cfg);
        const auto resp = get_with_retry(url, transport, cfg, sleep);
        auto page = parse_page(resp.body, req.indicator_id);
        if (page.page != p && !(page.pages == 0 && page.total == 0))
            throw Error(ErrorCode::PaginationInconsistency,
                        "asked for page " + std::to_string(p) + ", got " + std::to_string(page.page));
        if (p == 1) {
            pages = page.pages;
            total = page.total;
            out.last_updated = page.last_updated;
        } else if (page.pages != pages || page.total != total) {
            throw Error(ErrorCode::PaginationInconsistency, "page count or total changed between pages");
        }
        out.observations.insert(out.observations.end(), std::make_move_iterator(page.observations.begin()),
                                std::make_move_iterator(page.observations.end()));
    }
    if (total >= 0 && static_cast<std::size_t>(total) != out.observations.size())
        throw Error(ErrorCode::PaginationInconsistency, "API reported " + std::to_string(total) + " records, received " +
                                                            std::to_string(out.observations.size()));
    return out;
}

/// Joins the two indicators by (country, year) into load_panel input text.
/// Years present in only one indicator get a blank cell for the other.
inline std::string merge_to_csv(const IndicatorSeries& fdi, const IndicatorSeries& gdp) {
    std::map<std::pair<std::string, int>, std::pair<std::optional<double>, std::optional<double>>> cells;
    for (const auto& o : fdi.observations) cells[{o.country_id, o.year}].first = o.value;
    for (const auto& o : gdp.observations) cells[{o.country_id, o.year}].second = o.value;
    std::string out = "country,year,fdi_usd,gdp_growth_pct\n";
    for (const auto& [key, v] : cells) {
        out += key.first + ',' + std::to_string(key.second) + ',';
        if (v.first) out += text::format_double(*v.first);
        out += ',';
        if (v.second) out += text::format_double(*v.second);
        out += '\n';
    }
    return out;
}

struct FetchOptions {
    ClientConfig client;
    Sleeper sleep = [](std::chrono::seconds s) { std::this_thread::sleep_for(s); };
    std::function<std::string()> clock = [] {
        const std::time_t now = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return std::string(buf);
    };
};

/// Fetches both indicators (two requests in flight at most), merges them and
/// runs panel validation. Countries whose merged data fail validation are
/// dropped and listed in metadata["dropped"]; everything else is as load_panel.
inline Panel fetch_panel(const IndicatorRequest& fdi_req, const IndicatorRequest& gdp_req, const GroupMapping& mapping,
                         const Transport& transport, const FetchOptions& opts = {}) {
    validate(fdi_req);
    validate(gdp_req);
    if (fdi_req.country_ids != gdp_req.country_ids || fdi_req.years.first != gdp_req.years.first ||
        fdi_req.years.last != gdp_req.years.last)
        throw Error(ErrorCode::InvalidArgument, "both indicators must cover the same countries and years");
    for (const auto& id : fdi_req.country_ids)
        if (!mapping.contains(id)) throw Error(ErrorCode::UnmappedCountry, id + " has no IHDI group");

    auto fdi_future = std::async(std::launch::async, [&] { return fetch_indicator(fdi_req, transport, opts.client, opts.sleep); });
    IndicatorSeries gdp = fetch_indicator(gdp_req, transport, opts.client, opts.sleep);
    IndicatorSeries fdi = fdi_future.get();
    const std::string retrieved_at = opts.clock();

    const auto merged = merge_to_csv(fdi, gdp);
    const auto lines = text::split_lines(merged);
    std::map<std::string, std::string> per_country;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto id = std::string(lines[i].substr(0, lines[i].find(',')));
        per_country[id] += std::string(lines[i]) + '\n';
    }

    std::string kept = std::string(lines.front()) + '\n';
    std::string dropped;
    for (const auto& [id, rows] : per_country) {
        const std::string one = std::string(lines.front()) + '\n' + rows;
        try {
            (void)load_panel(one, mapping);
            kept += rows;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::UnmappedCountry) throw;
            if (!dropped.empty()) dropped += "; ";
            dropped += e.what();
        }
    }
    Panel panel = load_panel(kept, mapping);
    panel.metadata["source"] = "World Bank API v2 (" + opts.client.base_url + ")";
    panel.metadata["indicators"] = fdi.indicator_id + "," + gdp.indicator_id;
    panel.metadata["retrieved_at"] = retrieved_at;
    panel.metadata["last_updated"] = fdi.last_updated + "," + gdp.last_updated;
    panel.metadata["dropped"] = dropped;
    return panel;
}

/// Replays recorded responses. Each URL's responses are served in recorded
/// order; the last one repeats once the queue is down to it.
class FixtureTransport {
public:
    explicit FixtureTransport(const nlohmann::json& fixture) {
        if (!fixture.contains("responses") || !fixture["responses"].is_array())
            throw Error(ErrorCode::SchemaMismatch, "fixture lacks a 'responses' array");
        for (const auto& r : fixture["responses"]) {
            HttpResponse resp;
            resp.status = r.value("status", 200);
            const auto& body = r.contains("body") ? r["body"] : nlohmann::json();
            resp.body = body.is_string() ? body.get<std::string>() : body.dump();
            if (r.contains("headers"))
                for (const auto& [k, v] : r["headers"].items()) resp.headers[lower(k)] = v.get<std::string>();
            queues_[r.at("url").get<std::string>()].push_back(std::move(resp));
        }
    }

    static FixtureTransport from_text(std::string_view content) {
        try {
            return FixtureTransport(nlohmann::json::parse(content));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::SchemaMismatch, std::string("fixture is not valid JSON: ") + e.what());
        }
    }

    HttpResponse operator()(const std::string& url) {
        std::lock_guard lock(*mutex_);
        ++calls_[url];
        const auto it = queues_.find(url);
        if (it == queues_.end() || it->second.empty()) return {404, "no recorded response for " + url, {}};
        auto resp = it->second.front();
        if (it->second.size() > 1) it->second.pop_front();
        return resp;
    }

    [[nodiscard]] int calls(const std::string& url) const {
        std::lock_guard lock(*mutex_);
        const auto it = calls_.find(url);
        return it == calls_.end() ? 0 : it->second;
    }

    /// Wraps this object in a Transport that shares its state.
    static Transport shared(std::shared_ptr<FixtureTransport> self) {
        return [self](const std::string& url) { return (*self)(url); };
    }

private:
    static std::string lower(std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    }

    std::map<std::string, std::deque<HttpResponse>> queues_;
    std::map<std::string, int> calls_;
    std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

/// Forwards to another transport and keeps every exchange in fixture format.
class RecordingTransport {
public:
    explicit RecordingTransport(Transport inner) : inner_(std::move(inner)) {}

    HttpResponse operator()(const std::string& url) {
        auto resp = inner_(url);
        std::lock_guard lock(mutex_);
        nlohmann::json entry{{"url", url}, {"status", resp.status}};
        if (const auto it = resp.headers.find("retry-after"); it != resp.headers.end())
            entry["headers"] = {{"retry-after", it->second}};
        entry["body"] = resp.body;
        log_.push_back({url, std::move(entry)});
        return resp;
    }

    /// Recorded exchanges ordered by URL (then arrival), so two concurrent
    /// fetches still serialize identically.
    [[nodiscard]] nlohmann::json fixture() const {
        std::lock_guard lock(mutex_);
        auto sorted = log_;
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        nlohmann::json out{{"responses", nlohmann::json::array()}};
        for (const auto& [_, e] : sorted) out["responses"].push_back(e);
        return out;
    }

private:
    Transport inner_;
    mutable std::mutex mutex_;
    std::vector<std::pair<std::string, nlohmann::json>> log_;
};

}  // namespace fdilag::worldbank
