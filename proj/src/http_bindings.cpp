#include "raglab/http_bindings.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>

#include "raglab/errors.hpp"

namespace raglab {

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    if (url.rfind("http://", 0) != 0) {
        throw ConfigError("only http:// endpoints are supported, got \"" + url + "\"");
    }
    std::string rest = url.substr(7);
    ParsedUrl out;
    std::size_t slash = rest.find('/');
    std::string hostport = rest.substr(0, slash);
    if (slash != std::string::npos) {
        out.path = rest.substr(slash);
    }
    std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        out.host = hostport;
    } else {
        out.host = hostport.substr(0, colon);
        try {
            out.port = std::stoi(hostport.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("invalid port in endpoint \"" + url + "\"");
        }
    }
    if (out.host.empty()) {
        throw ConfigError("missing host in endpoint \"" + url + "\"");
    }
    return out;
}

void set_timeouts(httplib::Client& client, double seconds) {
    auto whole = static_cast<time_t>(seconds);
    auto micros = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
    client.set_connection_timeout(whole, micros);
    client.set_read_timeout(whole, micros);
    client.set_write_timeout(whole, micros);
}

} // namespace

HttpEndpoint endpoint_from_env(const std::string& prefix) {
    HttpEndpoint ep;
    const char* url = std::getenv((prefix + "_ENDPOINT").c_str());
    if (!url || !*url) {
        throw ConfigError("environment variable " + prefix + "_ENDPOINT is not set");
    }
    ep.url = url;
    if (const char* key = std::getenv((prefix + "_API_KEY").c_str())) {
        ep.api_key = key;
    }
    return ep;
}

json http_post_json(const HttpEndpoint& endpoint, const json& body) {
    ParsedUrl url = parse_http_url(endpoint.url);
    httplib::Client client(url.host, url.port);
    set_timeouts(client, endpoint.timeout_seconds);
    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);
    }
    auto started = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(url.path, headers, body.dump(), "application/json");
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            elapsed >= endpoint.timeout_seconds) {
            throw TimeoutError("request to " + endpoint.url + " timed out", elapsed);
        }
        throw ServiceError("request to " + endpoint.url +
                           " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ServiceError("request to " + endpoint.url + " returned HTTP " +
                           std::to_string(res->status));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw ServiceError("non-JSON response from " + endpoint.url);
    }
    return parsed;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpEndpoint endpoint, std::size_t dimension)
    : endpoint_(std::move(endpoint)), dimension_(dimension) {
    if (dimension_ == 0) {
        throw DomainError("embedding dimension must be positive");
    }
}

std::string HttpEmbeddingProvider::identity() const {
    return "http-embedding(" + endpoint_.url + ",dim=" + std::to_string(dimension_) + ")";
}

std::vector<double> HttpEmbeddingProvider::embed(const std::string& text) const {
    json response = http_post_json(endpoint_, json{{"texts", json::array({text})}});
    if (!response.contains("vectors") || !response.at("vectors").is_array() ||
        response.at("vectors").size() != 1) {
        throw ServiceError("embedding response missing \"vectors\" array");
    }
    std::vector<double> vec = response.at("vectors").at(0).get<std::vector<double>>();
    if (vec.size() != dimension_) {
        throw ServiceError("embedding service returned dimension " +
                           std::to_string(vec.size()) + ", expected " +
                           std::to_string(dimension_));
    }
    return vec;
}

double HttpPassageScorer::score(const std::string& query, const std::string& passage) const {
    json response = http_post_json(endpoint_, json{{"query", query}, {"passage", passage}});
    if (!response.contains("score") || !response.at("score").is_number()) {
        throw ServiceError("scorer response missing numeric \"score\"");
    }
    return response.at("score").get<double>();
}

std::string HttpGenerationClient::identity() const {
    return "http-generation(" + endpoint_.url + ")";
}

std::string HttpGenerationClient::generate(const std::string& prompt, double temperature,
                                           double top_p, std::size_t max_tokens) const {
    json response = http_post_json(endpoint_, json{{"prompt", prompt},
                                                   {"temperature", temperature},
                                                   {"top_p", top_p},
                                                   {"max_tokens", max_tokens}});
    if (!response.contains("text") || !response.at("text").is_string()) {
        throw ServiceError("generation response missing string \"text\"");
    }
    return response.at("text").get<std::string>();
}

std::vector<std::string> HttpQuestionGenerator::generate(const std::string& chunk_text,
                                                         std::size_t n_questions) const {
    std::string prompt = "Write " + std::to_string(n_questions) +
                         " short questions answered by the passage below, one question per "
                         "line.\n\nPassage:\n" +
                         chunk_text;
    json response = http_post_json(endpoint_, json{{"prompt", prompt},
                                                   {"temperature", 0.0},
                                                   {"top_p", 1.0},
                                                   {"max_tokens", 256}});
    if (!response.contains("text") || !response.at("text").is_string()) {
        throw ServiceError("question generation response missing string \"text\"");
    }
    std::vector<std::string> questions;
    std::string text = response.at("text").get<std::string>();
    std::size_t start = 0;
    while (start <= text.size() && questions.size() < n_questions) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(start, end == std::string::npos ? std::string::npos
                                                                       : end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.pop_back();
        }
        if (!line.empty()) {
            questions.push_back(std::move(line));
        }
        if (end == std::string::npos) {
            break;
        }
        start = end + 1;
    }
    return questions;
}

} // namespace raglab
