#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "raglab/tokenizer.hpp"

namespace raglab {

struct Document {
    std::string doc_id;
    std::string text;
    std::map<std::string, std::string> metadata;
};

/// The retrieval unit: a sentence-aligned, token-bounded slice of a document.
struct DocumentChunk {
    std::string chunk_id;      // "<doc_id>#<ordinal>"
    std::string parent_doc_id;
    std::size_t ordinal = 0;
    std::string text;
    std::size_t token_count = 0;
};

/// Splits on '.', '!' or '?' followed by whitespace or end-of-text. The
/// delimiter stays attached to its sentence and no text is lost; whitespace
/// between sentences is consumed.
std::vector<std::string> split_sentences(const std::string& text);

/// Greedy sentence packing: sentences are appended to the current chunk until
/// the next one would push it past max_tokens. A single sentence larger than
/// the budget becomes its own chunk rather than being split mid-sentence.
std::vector<DocumentChunk> chunk_document(const Document& doc,
                                          std::size_t max_tokens = 512,
                                          const Tokenizer& tokenizer = default_tokenizer());

/// Parse a JSONL corpus file: one object per line with "doc_id" and "text"
/// (optional "metadata" object of strings). Throws ParseError with the line
/// number on malformed records and IntegrityError on duplicate doc_ids.
std::vector<Document> ingest_corpus(const std::filesystem::path& path);

/// Chunk lookup shared by retrieval, re-ranking and generation.
class ChunkStore {
public:
    ChunkStore() = default;
    explicit ChunkStore(std::vector<DocumentChunk> chunks);

    const std::vector<DocumentChunk>& chunks() const { return chunks_; }
    std::size_t size() const { return chunks_.size(); }

    /// Throws LookupError for unknown ids.
    const DocumentChunk& get(const std::string& chunk_id) const;
    const std::string& text_of(const std::string& chunk_id) const;
    const std::string& parent_of(const std::string& chunk_id) const;

    bool contains(const std::string& chunk_id) const;

private:
    std::vector<DocumentChunk> chunks_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Chunk every document with the given budget, in document order.
ChunkStore build_chunk_store(const std::vector<Document>& docs,
                             std::size_t max_tokens = 512,
                             const Tokenizer& tokenizer = default_tokenizer());

} // namespace raglab
