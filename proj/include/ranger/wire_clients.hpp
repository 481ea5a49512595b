#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "ranger/encoders.hpp"

namespace ranger {

// HTTP backend configuration. Environment knobs:
//   RANGER_EMBED_URL / RANGER_RERANK_URL / RANGER_DESCRIBE_URL / RANGER_TRANSLATE_URL
//   RANGER_HTTP_TIMEOUT_MS   request timeout (default 30000)
//   RANGER_HTTP_MAX_INFLIGHT bound on concurrent requests per client (default 4)
struct WireConfig {
    std::string base_url;
    int timeout_ms = 30000;
    int max_inflight = 4;
};

WireConfig wire_config_from_env(const char* url_env_var);
WireConfig wire_config_for_url(std::string url);

// One JSON round-trip against `base_url + path`. Transport failures, non-200
// statuses and unparseable bodies raise BackendUnavailable.
nlohmann::json http_post_json(const WireConfig& config, const std::string& path,
                              const nlohmann::json& body);

class HttpJsonClient;  // shared transport with an in-flight request bound

// POST /embed {"texts":[...]} -> {"vectors":[[...]],"dim":d}
class HttpEmbedder final : public EmbedderClient {
  public:
    explicit HttpEmbedder(WireConfig config);
    ~HttpEmbedder() override;
    int dim() const override { return dim_; }
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

  private:
    std::shared_ptr<HttpJsonClient> client_;
    int dim_ = 0;  // learned from the first response
};

// POST /rerank {"query":s,"documents":[...]} -> {"scores":[...]}
class HttpReranker final : public RerankerClient {
  public:
    explicit HttpReranker(WireConfig config);
    ~HttpReranker() override;
    std::vector<double> rerank(const std::string& query,
                               std::span<const std::string> documents) override;

  private:
    std::shared_ptr<HttpJsonClient> client_;
};

// POST /describe {"mode":m,"input":s} -> {"text":s}
class HttpDescriber final : public DescriberClient {
  public:
    explicit HttpDescriber(WireConfig config, std::size_t input_limit = 64 * 1024);
    ~HttpDescriber() override;
    std::string describe(const std::string& input, DescribeMode mode) override;

  private:
    std::shared_ptr<HttpJsonClient> client_;
    std::size_t input_limit_;
};

}  // namespace ranger
