#pragma once

#include <string>
#include <vector>

#include "raglab/embedding.hpp"
#include "raglab/generation.hpp"
#include "raglab/jsonl.hpp"
#include "raglab/ranking.hpp"
#include "raglab/sparse_index.hpp"

namespace raglab {

struct HttpEndpoint {
    std::string url;     // http://host[:port][/path]
    std::string api_key; // sent as a bearer token when non-empty
    double timeout_seconds = 30.0;
};

/// Reads <PREFIX>_ENDPOINT and <PREFIX>_API_KEY from the environment.
/// Missing endpoint variable is a config error; the key is optional.
HttpEndpoint endpoint_from_env(const std::string& prefix);

/// POST a JSON body, expect a JSON object back. Connection and HTTP failures
/// raise ServiceError; deadline overruns raise TimeoutError.
json http_post_json(const HttpEndpoint& endpoint, const json& body);

/// Wire contract: {"texts": [s]} -> {"vectors": [[n, ...]]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(HttpEndpoint endpoint, std::size_t dimension);
    std::size_t dimension() const override { return dimension_; }
    std::string identity() const override;
    std::vector<double> embed(const std::string& text) const override;

private:
    HttpEndpoint endpoint_;
    std::size_t dimension_;
};

/// Wire contract: {"query": s, "passage": s} -> {"score": n}.
class HttpPassageScorer : public PassageScorer {
public:
    explicit HttpPassageScorer(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    double score(const std::string& query, const std::string& passage) const override;

private:
    HttpEndpoint endpoint_;
};

/// Wire contract: {"prompt": s, "temperature": n, "top_p": n, "max_tokens": i}
/// -> {"text": s}.
class HttpGenerationClient : public GenerationClient {
public:
    explicit HttpGenerationClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::string identity() const override;
    std::string generate(const std::string& prompt, double temperature, double top_p,
                         std::size_t max_tokens) const override;

private:
    HttpEndpoint endpoint_;
};

/// Question generation over the generation wire contract; the response text
/// is split into lines, one question per line.
class HttpQuestionGenerator : public QuestionGenerator {
public:
    explicit HttpQuestionGenerator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
    std::vector<std::string> generate(const std::string& chunk_text,
                                      std::size_t n_questions) const override;

private:
    HttpEndpoint endpoint_;
};

} // namespace raglab
