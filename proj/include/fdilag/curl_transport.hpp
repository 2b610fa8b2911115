#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include <curl/curl.h>

#include "fdilag/error.hpp"
#include "fdilag/worldbank.hpp"

namespace fdilag::worldbank {

namespace detail {

inline std::size_t collect_body(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
    static_cast<std::string*>(userdata)->append(ptr, size * nmemb);
    return size * nmemb;
}

inline std::size_t collect_header(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
    const std::string_view line(ptr, size * nmemb);
    const auto colon = line.find(':');
    if (colon != std::string_view::npos) {
        std::string name(line.substr(0, colon));
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        (*static_cast<std::map<std::string, std::string>*>(userdata))[name] =
            std::string(text::trim(line.substr(colon + 1)));
    }
    return size * nmemb;
}

}  // namespace detail

/// Live HTTPS transport. Each call uses its own easy handle, so two calls may
/// run concurrently. Transport-level failures (DNS, TLS, timeout) surface as
/// HttpError with status 0.
inline Transport make_curl_transport(std::string user_agent, long timeout_seconds = 60) {
    static const bool initialised = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
    if (!initialised) throw Error(ErrorCode::HttpError, "curl_global_init failed");
    return [user_agent = std::move(user_agent), timeout_seconds](const std::string& url) {
        CURL* curl = curl_easy_init();
        if (!curl) throw Error(ErrorCode::HttpError, "curl_easy_init failed");
        HttpResponse resp;
        curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
        curl_easy_setopt(curl, CURLOPT_USERAGENT, user_agent.c_str());
        curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
        curl_easy_setopt(curl, CURLOPT_TIMEOUT, timeout_seconds);
        curl_easy_setopt(curl, CURLOPT_NOSIGNAL, 1L);
        curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, detail::collect_body);
        curl_easy_setopt(curl, CURLOPT_WRITEDATA, &resp.body);
        curl_easy_setopt(curl, CURLOPT_HEADERFUNCTION, detail::collect_header);
        curl_easy_setopt(curl, CURLOPT_HEADERDATA, &resp.headers);
        const CURLcode rc = curl_easy_perform(curl);
        long status = 0;
        curl_easy_getinfo(curl, CURLINFO_RESPONSE_CODE, &status);
        curl_easy_cleanup(curl);
        if (rc != CURLE_OK)
            throw Error(ErrorCode::HttpError, "HTTP 0 for " + url + ": " + curl_easy_strerror(rc));
        resp.status = static_cast<int>(status);
        return resp;
    };
}

}  // namespace fdilag::worldbank
