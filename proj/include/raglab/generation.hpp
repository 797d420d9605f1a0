#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "raglab/corpus.hpp"

namespace raglab {

enum class PromptStrategy { default_, few_shot, cot };

std::string to_string(PromptStrategy s);
PromptStrategy prompt_strategy_from_string(const std::string& s);

struct GenerationConfig {
    double temperature = 0.6;
    double top_p = 0.9;
    std::size_t max_answer_tokens = 200;
    std::size_t context_size = 10;
    PromptStrategy prompt_strategy = PromptStrategy::default_;
};

/// Answer-prompt template with {context} and {query} slots.
class PromptTemplate {
public:
    /// The standard question-answering template.
    static PromptTemplate default_template();
    /// The default body prefixed with step-by-step reasoning instructions.
    static PromptTemplate cot_template();
    /// Few-shot: demonstrations rendered as Question/Answer pairs before the
    /// default body.
    static PromptTemplate few_shot_template(
        std::vector<std::pair<std::string, std::string>> demonstrations);
    /// Template text read from a file; must contain both slots.
    static PromptTemplate from_file(const std::filesystem::path& path, PromptStrategy strategy);
    /// Select a built-in template by strategy (few_shot starts with no
    /// demonstrations unless provided).
    static PromptTemplate for_strategy(PromptStrategy strategy);

    PromptStrategy strategy() const { return strategy_; }
    const std::string& text() const { return text_; }
    const std::vector<std::pair<std::string, std::string>>& demonstrations() const {
        return demonstrations_;
    }

    /// Replaces {context} and {query}; prepends the demonstration block for
    /// the few_shot strategy.
    std::string render(const std::string& context, const std::string& query) const;

private:
    PromptTemplate(PromptStrategy strategy, std::string text,
                   std::vector<std::pair<std::string, std::string>> demonstrations = {});

    PromptStrategy strategy_ = PromptStrategy::default_;
    std::string text_;
    std::vector<std::pair<std::string, std::string>> demonstrations_;
};

/// Chunk texts joined by blank lines in ranked order, best first, then
/// rendered through the template.
std::string build_answer_prompt(const std::vector<DocumentChunk>& chunks,
                                const std::string& query, const PromptTemplate& tmpl);

/// Text-generation contract: (prompt, sampling params) -> text.
class GenerationClient {
public:
    virtual ~GenerationClient() = default;
    virtual std::string identity() const = 0;
    virtual std::string generate(const std::string& prompt, double temperature, double top_p,
                                 std::size_t max_tokens) const = 0;
};

/// Returns its prompt's "Question: " line, or the whole prompt when absent.
class EchoClient : public GenerationClient {
public:
    std::string identity() const override { return "echo"; }
    std::string generate(const std::string& prompt, double temperature, double top_p,
                         std::size_t max_tokens) const override;
};

/// Always returns the same string.
class FixedClient : public GenerationClient {
public:
    explicit FixedClient(std::string answer) : answer_(std::move(answer)) {}
    std::string identity() const override { return "fixed"; }
    std::string generate(const std::string&, double, double, std::size_t) const override {
        return answer_;
    }

private:
    std::string answer_;
};

/// Dataset-aware mock: extracts the question from the prompt and returns its
/// gold answer. Unknown questions get a refusal-style fallback.
class GoldAnswerClient : public GenerationClient {
public:
    explicit GoldAnswerClient(std::vector<std::pair<std::string, std::string>> qa_pairs);
    std::string identity() const override { return "gold-answer"; }
    std::string generate(const std::string& prompt, double, double, std::size_t) const override;

private:
    std::vector<std::pair<std::string, std::string>> qa_pairs_;
};

struct GenerationResult {
    std::string answer;
    bool is_refusal = false;
    double latency_seconds = 0.0;
    std::vector<std::string> prompt_chunk_ids;
};

const std::vector<std::string>& default_refusal_phrases();

/// Case-insensitive (ASCII) substring match of any phrase in the answer.
bool detect_refusal(const std::string& answer, const std::vector<std::string>& phrases);

/// Calls the client with the config's sampling parameters, timing the call
/// and classifying the answer against the phrase list.
GenerationResult generate_answer(const GenerationClient& client, const std::string& prompt,
                                 const GenerationConfig& cfg,
                                 const std::vector<std::string>& refusal_phrases =
                                     default_refusal_phrases());

} // namespace raglab
