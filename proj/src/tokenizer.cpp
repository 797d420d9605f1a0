#include "raglab/tokenizer.hpp"

#include <cstdint>

namespace raglab {

namespace {

// Decodes one UTF-8 sequence starting at `i`; writes its length to `len`.
// Invalid bytes decode as themselves with length 1 so that malformed input
// still tokenizes instead of crashing.
std::uint32_t decode_utf8(const std::string& s, std::size_t i, std::size_t& len) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        len = 1;
        return b0;
    }
    auto cont = [&](std::size_t off) {
        return i + off < s.size() &&
               (static_cast<unsigned char>(s[i + off]) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        len = 2;
        return (static_cast<std::uint32_t>(b0 & 0x1F) << 6) |
               (static_cast<unsigned char>(s[i + 1]) & 0x3F);
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        len = 3;
        return (static_cast<std::uint32_t>(b0 & 0x0F) << 12) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
               (static_cast<unsigned char>(s[i + 2]) & 0x3F);
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        len = 4;
        return (static_cast<std::uint32_t>(b0 & 0x07) << 18) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
               (static_cast<unsigned char>(s[i + 3]) & 0x3F);
    }
    len = 1;
    return b0;
}

bool is_space_cp(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_punct(unsigned char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

void push_token(std::vector<std::string>& out, const std::string& s,
                std::size_t begin, std::size_t end) {
    while (begin < end && is_ascii_punct(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && is_ascii_punct(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    if (begin >= end) {
        return;
    }
    std::string tok = s.substr(begin, end - begin);
    for (char& c : tok) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    out.push_back(std::move(tok));
}

} // namespace

std::vector<std::string> WhitespaceTokenizer::tokenize(const std::string& text) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    std::size_t start = std::string::npos;
    while (i < text.size()) {
        std::size_t len = 0;
        std::uint32_t cp = decode_utf8(text, i, len);
        if (is_space_cp(cp)) {
            if (start != std::string::npos) {
                push_token(out, text, start, i);
                start = std::string::npos;
            }
        } else if (start == std::string::npos) {
            start = i;
        }
        i += len;
    }
    if (start != std::string::npos) {
        push_token(out, text, start, text.size());
    }
    return out;
}

const Tokenizer& default_tokenizer() {
    static const WhitespaceTokenizer instance;
    return instance;
}

std::vector<std::string> tokenize(const std::string& text) {
    return default_tokenizer().tokenize(text);
}

std::size_t count_tokens(const std::string& text) {
    return default_tokenizer().tokenize(text).size();
}

} // namespace raglab
