#include "raglab/generation.hpp"

#include <chrono>
#include <unordered_map>

#include "raglab/errors.hpp"
#include "raglab/jsonl.hpp"

namespace raglab {

namespace {

const char* kDefaultBody =
    "You are an AI assistant tasked with answering questions based on the provided "
    "information.\n"
    "        \n"
    "Information: \n"
    "{context}\n"
    "\n"
    "Question: {query}\n"
    "\n"
    "Answer the question based only on the provided information. Keep the answer concise, "
    "limited to 200 tokens. If the information doesn't contain the answer, say \"I don't "
    "have enough information to answer this question.\"\n"
    "\n"
    "Answer:";

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

// Substitutes {context} and {query} in one pass so substituted text is never
// rescanned for slots.
std::string substitute_slots(const std::string& tmpl, const std::string& context,
                             const std::string& query) {
    std::string out;
    out.reserve(tmpl.size() + context.size() + query.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl.compare(i, 9, "{context}") == 0) {
            out += context;
            i += 9;
        } else if (tmpl.compare(i, 7, "{query}") == 0) {
            out += query;
            i += 7;
        } else {
            out += tmpl[i];
            ++i;
        }
    }
    return out;
}

} // namespace

std::string to_string(PromptStrategy s) {
    switch (s) {
        case PromptStrategy::default_: return "default";
        case PromptStrategy::few_shot: return "few_shot";
        case PromptStrategy::cot: return "cot";
    }
    throw DomainError("invalid prompt strategy value");
}

PromptStrategy prompt_strategy_from_string(const std::string& s) {
    if (s == "default") return PromptStrategy::default_;
    if (s == "few_shot") return PromptStrategy::few_shot;
    if (s == "cot") return PromptStrategy::cot;
    throw ConfigError("unknown prompt strategy \"" + s + "\"");
}

PromptTemplate::PromptTemplate(PromptStrategy strategy, std::string text,
                               std::vector<std::pair<std::string, std::string>> demonstrations)
    : strategy_(strategy), text_(std::move(text)), demonstrations_(std::move(demonstrations)) {}

PromptTemplate PromptTemplate::default_template() {
    return PromptTemplate(PromptStrategy::default_, kDefaultBody);
}

PromptTemplate PromptTemplate::cot_template() {
    std::string text = "Think through the provided information step by step before giving "
                       "the final answer.\n\n";
    text += kDefaultBody;
    return PromptTemplate(PromptStrategy::cot, std::move(text));
}

PromptTemplate PromptTemplate::few_shot_template(
    std::vector<std::pair<std::string, std::string>> demonstrations) {
    return PromptTemplate(PromptStrategy::few_shot, kDefaultBody, std::move(demonstrations));
}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path,
                                         PromptStrategy strategy) {
    std::string text = read_file(path);
    if (text.find("{context}") == std::string::npos ||
        text.find("{query}") == std::string::npos) {
        throw ConfigError("prompt template " + path.string() +
                          " must contain {context} and {query} slots");
    }
    return PromptTemplate(strategy, std::move(text));
}

PromptTemplate PromptTemplate::for_strategy(PromptStrategy strategy) {
    switch (strategy) {
        case PromptStrategy::default_: return default_template();
        case PromptStrategy::few_shot: return few_shot_template({});
        case PromptStrategy::cot: return cot_template();
    }
    throw DomainError("invalid prompt strategy value");
}

std::string PromptTemplate::render(const std::string& context, const std::string& query) const {
    std::string out;
    if (strategy_ == PromptStrategy::few_shot) {
        for (const auto& [q, a] : demonstrations_) {
            out += "Question: " + q + "\nAnswer: " + a + "\n\n";
        }
    }
    out += substitute_slots(text_, context, query);
    return out;
}

std::string build_answer_prompt(const std::vector<DocumentChunk>& chunks,
                                const std::string& query, const PromptTemplate& tmpl) {
    std::string context;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i > 0) {
            context += "\n\n";
        }
        context += chunks[i].text;
    }
    return tmpl.render(context, query);
}

std::string EchoClient::generate(const std::string& prompt, double, double, std::size_t) const {
    std::size_t pos = prompt.find("Question: ");
    if (pos == std::string::npos) {
        return prompt;
    }
    std::size_t end = prompt.find('\n', pos);
    if (end == std::string::npos) {
        end = prompt.size();
    }
    return prompt.substr(pos, end - pos);
}

GoldAnswerClient::GoldAnswerClient(std::vector<std::pair<std::string, std::string>> qa_pairs)
    : qa_pairs_(std::move(qa_pairs)) {}

std::string GoldAnswerClient::generate(const std::string& prompt, double, double,
                                       std::size_t) const {
    std::size_t pos = prompt.rfind("Question: ");
    if (pos != std::string::npos) {
        std::size_t start = pos + 10;
        std::size_t end = prompt.find('\n', start);
        if (end == std::string::npos) {
            end = prompt.size();
        }
        std::string question = prompt.substr(start, end - start);
        for (const auto& [q, a] : qa_pairs_) {
            if (q == question) {
                return a;
            }
        }
    }
    return "I don't have enough information to answer this question.";
}

const std::vector<std::string>& default_refusal_phrases() {
    static const std::vector<std::string> phrases = {
        "not enough information",
        "i don't have enough information",
        "cannot answer",
        "unable to answer",
    };
    return phrases;
}

bool detect_refusal(const std::string& answer, const std::vector<std::string>& phrases) {
    if (phrases.empty()) {
        throw DomainError("refusal phrase list must be non-empty");
    }
    std::string haystack = ascii_lower(answer);
    for (const auto& phrase : phrases) {
        if (haystack.find(ascii_lower(phrase)) != std::string::npos) {
            return true;
        }
    }
    return false;
}

GenerationResult generate_answer(const GenerationClient& client, const std::string& prompt,
                                 const GenerationConfig& cfg,
                                 const std::vector<std::string>& refusal_phrases) {
    GenerationResult result;
    auto started = std::chrono::steady_clock::now();
    try {
        result.answer =
            client.generate(prompt, cfg.temperature, cfg.top_p, cfg.max_answer_tokens);
    } catch (const TimeoutError&) {
        throw;
    } catch (const std::exception& e) {
        throw ServiceError(std::string("generation failed: ") + e.what());
    }
    auto finished = std::chrono::steady_clock::now();
    result.latency_seconds = std::chrono::duration<double>(finished - started).count();
    result.is_refusal = detect_refusal(result.answer, refusal_phrases);
    return result;
}

} // namespace raglab
