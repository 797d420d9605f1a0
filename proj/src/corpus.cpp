#include "raglab/corpus.hpp"

#include <unordered_set>

#include "raglab/errors.hpp"
#include "raglab/jsonl.hpp"

namespace raglab {

namespace {

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

} // namespace

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 == text.size() || is_ws(text[i + 1]))) {
            out.push_back(text.substr(start, i + 1 - start));
            ++i;
            while (i < text.size() && is_ws(text[i])) {
                ++i;
            }
            start = i;
        } else {
            ++i;
        }
    }
    if (start < text.size()) {
        out.push_back(text.substr(start));
    }
    return out;
}

std::vector<DocumentChunk> chunk_document(const Document& doc, std::size_t max_tokens,
                                          const Tokenizer& tokenizer) {
    std::vector<DocumentChunk> out;
    std::vector<std::string> pending;
    std::size_t pending_tokens = 0;

    auto flush = [&]() {
        if (pending.empty()) {
            return;
        }
        DocumentChunk chunk;
        chunk.ordinal = out.size();
        chunk.chunk_id = doc.doc_id + "#" + std::to_string(chunk.ordinal);
        chunk.parent_doc_id = doc.doc_id;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (i > 0) {
                chunk.text += ' ';
            }
            chunk.text += pending[i];
        }
        chunk.token_count = pending_tokens;
        out.push_back(std::move(chunk));
        pending.clear();
        pending_tokens = 0;
    };

    for (std::string& sentence : split_sentences(doc.text)) {
        std::size_t n = tokenizer.tokenize(sentence).size();
        if (!pending.empty() && pending_tokens + n > max_tokens) {
            flush();
        }
        pending.push_back(std::move(sentence));
        pending_tokens += n;
        if (pending.size() == 1 && pending_tokens > max_tokens) {
            // A single sentence over budget stays whole in its own chunk.
            flush();
        }
    }
    flush();
    return out;
}

std::vector<Document> ingest_corpus(const std::filesystem::path& path) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    read_jsonl(path, [&](const json& rec, std::size_t line) {
        if (!rec.contains("doc_id") || !rec.at("doc_id").is_string()) {
            throw ParseError("record missing string field \"doc_id\"", line);
        }
        if (!rec.contains("text") || !rec.at("text").is_string()) {
            throw ParseError("record missing string field \"text\"", line);
        }
        Document doc;
        doc.doc_id = rec.at("doc_id").get<std::string>();
        doc.text = rec.at("text").get<std::string>();
        if (doc.doc_id.empty()) {
            throw ParseError("doc_id must be non-empty", line);
        }
        if (rec.contains("metadata")) {
            const json& meta = rec.at("metadata");
            if (!meta.is_object()) {
                throw ParseError("\"metadata\" must be an object", line);
            }
            for (const auto& [key, value] : meta.items()) {
                if (!value.is_string()) {
                    throw ParseError("metadata value for \"" + key + "\" must be a string",
                                     line);
                }
                doc.metadata[key] = value.get<std::string>();
            }
        }
        if (!seen.insert(doc.doc_id).second) {
            throw IntegrityError("duplicate doc_id \"" + doc.doc_id + "\"");
        }
        docs.push_back(std::move(doc));
    });
    return docs;
}

ChunkStore::ChunkStore(std::vector<DocumentChunk> chunks) : chunks_(std::move(chunks)) {
    by_id_.reserve(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        if (!by_id_.emplace(chunks_[i].chunk_id, i).second) {
            throw IntegrityError("duplicate chunk_id \"" + chunks_[i].chunk_id + "\"");
        }
    }
}

const DocumentChunk& ChunkStore::get(const std::string& chunk_id) const {
    auto it = by_id_.find(chunk_id);
    if (it == by_id_.end()) {
        throw LookupError("unknown chunk_id \"" + chunk_id + "\"");
    }
    return chunks_[it->second];
}

const std::string& ChunkStore::text_of(const std::string& chunk_id) const {
    return get(chunk_id).text;
}

const std::string& ChunkStore::parent_of(const std::string& chunk_id) const {
    return get(chunk_id).parent_doc_id;
}

bool ChunkStore::contains(const std::string& chunk_id) const {
    return by_id_.count(chunk_id) > 0;
}

ChunkStore build_chunk_store(const std::vector<Document>& docs, std::size_t max_tokens,
                             const Tokenizer& tokenizer) {
    std::vector<DocumentChunk> all;
    for (const Document& doc : docs) {
        for (DocumentChunk& chunk : chunk_document(doc, max_tokens, tokenizer)) {
            all.push_back(std::move(chunk));
        }
    }
    return ChunkStore(std::move(all));
}

} // namespace raglab
