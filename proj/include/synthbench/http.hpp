#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "synthbench/cache.hpp"

namespace synthbench {

struct HttpResponse {
    int status = 0;
    std::string body;
    bool ok() const { return status >= 200 && status < 300; }
};

using Headers = std::map<std::string, std::string>;

/// Minimal HTTP abstraction so every network-facing component can run
/// against a fake in tests.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url, const Headers& headers) = 0;
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const std::string& content_type, const Headers& headers) = 0;
    /// Number of requests actually issued (cache hits excluded).
    virtual size_t request_count() const = 0;
};

/// Real client backed by cpp-httplib (TLS via OpenSSL).
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_seconds = 30);
    HttpResponse get(const std::string& url, const Headers& headers) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const Headers& headers) override;
    size_t request_count() const override { return count_.load(); }

private:
    int timeout_seconds_;
    std::atomic<size_t> count_{0};
};

/// Throws on any request. Injected in offline runs so an accidental
/// network touch fails loudly instead of hanging.
class NullTransport : public HttpTransport {
public:
    HttpResponse get(const std::string& url, const Headers&) override;
    HttpResponse post(const std::string& url, const std::string&, const std::string&,
                      const Headers&) override;
    size_t request_count() const override { return count_.load(); }

private:
    std::atomic<size_t> count_{0};
};

/// GET-caching, rate-limited, retrying wrapper. Responses are cached by URL
/// (2xx only) so re-runs over a warm cache issue zero network calls. Retries
/// use exponential backoff on 5xx/429/transport errors.
class CachedTransport : public HttpTransport {
public:
    CachedTransport(std::shared_ptr<HttpTransport> inner, std::shared_ptr<BlobCache> cache,
                    std::chrono::milliseconds min_interval_per_host = std::chrono::milliseconds(0),
                    int max_retries = 3);

    HttpResponse get(const std::string& url, const Headers& headers) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const Headers& headers) override;
    size_t request_count() const override { return inner_->request_count(); }

private:
    void rate_limit(const std::string& url);

    std::shared_ptr<HttpTransport> inner_;
    std::shared_ptr<BlobCache> cache_;
    std::chrono::milliseconds min_interval_;
    int max_retries_;
    std::mutex mu_;
    std::map<std::string, std::chrono::steady_clock::time_point> last_call_;
};

/// Splits "https://host:port/path?q" into scheme://host[:port] and /path?q.
std::pair<std::string, std::string> split_url(const std::string& url);

std::string url_encode(std::string_view value);

}  // namespace synthbench
