#include "ranger/wire_clients.hpp"

#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

namespace ranger {

namespace {

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    try {
        return std::stoi(v);
    } catch (...) {
        return fallback;
    }
}

}  // namespace

WireConfig wire_config_from_env(const char* url_env_var) {
    WireConfig config;
    if (const char* url = std::getenv(url_env_var)) config.base_url = url;
    config.timeout_ms = env_int("RANGER_HTTP_TIMEOUT_MS", config.timeout_ms);
    config.max_inflight = env_int("RANGER_HTTP_MAX_INFLIGHT", config.max_inflight);
    if (config.max_inflight < 1) config.max_inflight = 1;
    return config;
}

WireConfig wire_config_for_url(std::string url) {
    WireConfig config = wire_config_from_env("RANGER_UNUSED");
    config.base_url = std::move(url);
    return config;
}

// One logical backend: serializes JSON in/out and bounds in-flight requests.
// httplib::Client is not safe for concurrent use, so each request gets its
// own connection; the semaphore still caps pressure on the backend.
class HttpJsonClient {
  public:
    explicit HttpJsonClient(WireConfig config) : config_(std::move(config)) {
        if (config_.base_url.empty()) {
            throw BackendUnavailable("no backend URL configured");
        }
    }

    nlohmann::json post(const std::string& path, const nlohmann::json& body) {
        Slot slot(*this);
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(0, config_.timeout_ms * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            throw BackendUnavailable(config_.base_url + path + ": " +
                                     httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw BackendUnavailable(config_.base_url + path + ": HTTP " +
                                     std::to_string(res->status));
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendUnavailable(config_.base_url + path + ": malformed response: " +
                                     e.what());
        }
    }

  private:
    struct Slot {
        explicit Slot(HttpJsonClient& owner) : owner_(owner) {
            std::unique_lock lock(owner_.mutex_);
            owner_.cv_.wait(lock, [&] { return owner_.in_flight_ < owner_.config_.max_inflight; });
            ++owner_.in_flight_;
        }
        ~Slot() {
            {
                std::lock_guard lock(owner_.mutex_);
                --owner_.in_flight_;
            }
            owner_.cv_.notify_one();
        }
        HttpJsonClient& owner_;
    };

    WireConfig config_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_ = 0;
};

nlohmann::json http_post_json(const WireConfig& config, const std::string& path,
                              const nlohmann::json& body) {
    HttpJsonClient client(config);
    return client.post(path, body);
}

HttpEmbedder::HttpEmbedder(WireConfig config)
    : client_(std::make_shared<HttpJsonClient>(std::move(config))) {}

HttpEmbedder::~HttpEmbedder() = default;

std::vector<std::vector<float>> HttpEmbedder::embed(std::span<const std::string> texts) {
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
    nlohmann::json res = client_->post("/embed", body);
    if (!res.contains("vectors") || !res["vectors"].is_array()) {
        throw BackendUnavailable("embed: response missing vectors");
    }
    std::vector<std::vector<float>> out;
    try {
        out = res["vectors"].get<std::vector<std::vector<float>>>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("embed: malformed vectors: ") + e.what());
    }
    if (out.size() != texts.size()) {
        throw BackendUnavailable("embed: vector count does not match input count");
    }
    int d = res.value("dim", out.empty() ? 0 : static_cast<int>(out.front().size()));
    for (auto& v : out) {
        if (static_cast<int>(v.size()) != d) {
            throw DimensionMismatch("embed: inconsistent vector dimensions");
        }
        double norm = 0.0;
        for (float x : v) norm += static_cast<double>(x) * x;
        if (norm <= 0.0) throw DimensionMismatch("embed: zero vector in response");
        if (std::abs(norm - 1.0) > 1e-6) {
            const float inv = static_cast<float>(1.0 / std::sqrt(norm));
            for (float& x : v) x *= inv;
        }
    }
    if (dim_ == 0) {
        dim_ = d;
    } else if (dim_ != d) {
        throw DimensionMismatch("embed: backend changed dimension mid-run");
    }
    return out;
}

HttpReranker::HttpReranker(WireConfig config)
    : client_(std::make_shared<HttpJsonClient>(std::move(config))) {}

HttpReranker::~HttpReranker() = default;

std::vector<double> HttpReranker::rerank(const std::string& query,
                                         std::span<const std::string> documents) {
    nlohmann::json body;
    body["query"] = query;
    body["documents"] = std::vector<std::string>(documents.begin(), documents.end());
    nlohmann::json res = client_->post("/rerank", body);
    std::vector<double> scores;
    try {
        scores = res.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("rerank: malformed scores: ") + e.what());
    }
    if (scores.size() != documents.size()) {
        throw BackendUnavailable("rerank: score count does not match document count");
    }
    for (double& s : scores) {
        if (s < 0.0) s = 0.0;
        if (s > 1.0) s = 1.0;
    }
    return scores;
}

HttpDescriber::HttpDescriber(WireConfig config, std::size_t input_limit)
    : client_(std::make_shared<HttpJsonClient>(std::move(config))), input_limit_(input_limit) {}

HttpDescriber::~HttpDescriber() = default;

std::string HttpDescriber::describe(const std::string& input, DescribeMode mode) {
    if (input.size() > input_limit_) {
        throw ContextOverflow("describe: input exceeds " + std::to_string(input_limit_) +
                              " characters");
    }
    nlohmann::json body;
    body["mode"] = to_string(mode);
    body["input"] = input;
    nlohmann::json res = client_->post("/describe", body);
    try {
        return res.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("describe: malformed response: ") + e.what());
    }
}

}  // namespace ranger
