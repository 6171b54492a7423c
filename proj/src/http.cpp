#include "synthbench/http.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <thread>

#include "synthbench/util.hpp"

namespace synthbench {

std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("HttpError", "not an absolute URL: " + url);
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(std::string_view value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

HttplibTransport::HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

namespace {

httplib::Headers to_httplib(const Headers& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
}

HttpResponse from_result(const httplib::Result& res) {
    if (!res) return {0, "transport error: " + httplib::to_string(res.error())};
    return {res->status, res->body};
}

}  // namespace

HttpResponse HttplibTransport::get(const std::string& url, const Headers& headers) {
    count_.fetch_add(1);
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds_);
    client.set_read_timeout(timeout_seconds_);
    client.set_follow_location(true);
    return from_result(client.Get(path, to_httplib(headers)));
}

HttpResponse HttplibTransport::post(const std::string& url, const std::string& body,
                                    const std::string& content_type, const Headers& headers) {
    count_.fetch_add(1);
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_seconds_);
    client.set_read_timeout(timeout_seconds_ * 4);  // generation calls can be slow
    return from_result(client.Post(path, to_httplib(headers), body, content_type));
}

HttpResponse NullTransport::get(const std::string& url, const Headers&) {
    count_.fetch_add(1);
    throw Error("NetworkDisabled", "offline run attempted GET " + url);
}

HttpResponse NullTransport::post(const std::string& url, const std::string&, const std::string&,
                                 const Headers&) {
    count_.fetch_add(1);
    throw Error("NetworkDisabled", "offline run attempted POST " + url);
}

CachedTransport::CachedTransport(std::shared_ptr<HttpTransport> inner,
                                 std::shared_ptr<BlobCache> cache,
                                 std::chrono::milliseconds min_interval_per_host, int max_retries)
    : inner_(std::move(inner)),
      cache_(std::move(cache)),
      min_interval_(min_interval_per_host),
      max_retries_(max_retries) {}

void CachedTransport::rate_limit(const std::string& url) {
    if (min_interval_.count() == 0) return;
    std::string host = split_url(url).first;
    std::chrono::steady_clock::time_point wait_until;
    {
        std::lock_guard lock(mu_);
        auto now = std::chrono::steady_clock::now();
        auto it = last_call_.find(host);
        wait_until = (it == last_call_.end()) ? now : it->second + min_interval_;
        if (wait_until < now) wait_until = now;
        last_call_[host] = wait_until;
    }
    std::this_thread::sleep_until(wait_until);
}

HttpResponse CachedTransport::get(const std::string& url, const Headers& headers) {
    if (cache_) {
        if (auto hit = cache_->get(url)) return {200, *hit};
    }
    HttpResponse res;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0) {
            auto backoff = std::chrono::seconds(1 << (attempt - 1));
            spdlog::warn("GET {} -> {} (attempt {}), backing off {}s", url, res.status, attempt,
                         backoff.count());
            std::this_thread::sleep_for(backoff);
        }
        rate_limit(url);
        res = inner_->get(url, headers);
        if (res.ok()) {
            if (cache_) cache_->put(url, res.body);
            return res;
        }
        bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
        if (!retryable) return res;
    }
    return res;
}

HttpResponse CachedTransport::post(const std::string& url, const std::string& body,
                                   const std::string& content_type, const Headers& headers) {
    // POSTs are not URL-cacheable; callers cache at their own layer.
    HttpResponse res;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
        rate_limit(url);
        res = inner_->post(url, body, content_type, headers);
        if (res.ok()) return res;
        bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
        if (!retryable) return res;
    }
    return res;
}

}  // namespace synthbench
