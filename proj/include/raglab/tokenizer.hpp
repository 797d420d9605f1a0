#pragma once

#include <memory>
#include <string>
#include <vector>

namespace raglab {

/// Text-to-token contract shared by indexing, embedding and metrics.
/// Implementations must be pure: identical input yields identical output.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::vector<std::string> tokenize(const std::string& text) const = 0;
};

/// Splits on whitespace (ASCII whitespace plus the Unicode space code
/// points), strips leading and trailing ASCII punctuation from each piece,
/// lowercases ASCII letters and drops empty results.
///
///   "E5-base,  v2!" -> ["e5-base", "v2"]
class WhitespaceTokenizer : public Tokenizer {
public:
    std::vector<std::string> tokenize(const std::string& text) const override;
};

/// Shared default tokenizer instance.
const Tokenizer& default_tokenizer();

/// Convenience wrapper over default_tokenizer().
std::vector<std::string> tokenize(const std::string& text);

/// Number of tokens default_tokenizer() produces for `text`.
std::size_t count_tokens(const std::string& text);

} // namespace raglab
