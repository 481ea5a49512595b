#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ranger {

class BackendUnavailable : public std::runtime_error {
  public:
    explicit BackendUnavailable(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public std::runtime_error {
  public:
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

class ContextOverflow : public std::runtime_error {
  public:
    explicit ContextOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Bi-encoder f: texts -> unit-normalized vectors of fixed dimension.
class EmbedderClient {
  public:
    virtual ~EmbedderClient() = default;
    virtual int dim() const = 0;
    virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;

    std::vector<float> embed_one(const std::string& text);
};

// Cross-encoder g: (query, document) pairs -> relevance scores in [0, 1].
class RerankerClient {
  public:
    virtual ~RerankerClient() = default;
    virtual std::vector<double> rerank(const std::string& query,
                                       std::span<const std::string> documents) = 0;
};

enum class DescribeMode { SummarizeCode, ListMembers, SummarizeFromMembers };

std::string_view to_string(DescribeMode mode);

class DescriberClient {
  public:
    virtual ~DescriberClient() = default;
    virtual std::string describe(const std::string& input, DescribeMode mode) = 0;
};

// Hashed bag-of-tokens embedder: token counts hashed into `dim` buckets,
// L2-normalized. Deterministic and order-insensitive; the offline stand-in
// for a neural bi-encoder.
class LocalEmbedder final : public EmbedderClient {
  public:
    explicit LocalEmbedder(int dim = 256) : dim_(dim) {}
    int dim() const override { return dim_; }
    std::vector<std::vector<float>> embed(std::span<const std::string> texts) override;

  private:
    int dim_;
};

// Token-set Jaccard overlap mapped to [0, 1].
class LocalReranker final : public RerankerClient {
  public:
    std::vector<double> rerank(const std::string& query,
                               std::span<const std::string> documents) override;
};

// Templated deterministic describer mirroring the three prompt modes.
class LocalDescriber final : public DescriberClient {
  public:
    std::string describe(const std::string& input, DescribeMode mode) override;
};

struct EncoderSuite {
    std::shared_ptr<DescriberClient> describer;
    std::shared_ptr<EmbedderClient> embedder;
    std::shared_ptr<RerankerClient> reranker;
};

EncoderSuite make_local_encoders(int dim = 256);

}  // namespace ranger
