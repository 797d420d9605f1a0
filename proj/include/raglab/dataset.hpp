#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "raglab/jsonl.hpp"

namespace raglab {

struct CategoryDimension {
    std::string name;
    std::vector<std::pair<std::string, double>> categories; // (category, target probability)
};

/// Question/user category scheme with target probabilities per dimension.
class CategoryTaxonomy {
public:
    CategoryTaxonomy() = default;
    /// Validates that probabilities per dimension sum to 1 (within 1e-9) and
    /// that category names are unique within each dimension.
    explicit CategoryTaxonomy(std::vector<CategoryDimension> dimensions);

    const std::vector<CategoryDimension>& dimensions() const { return dimensions_; }
    bool has_dimension(const std::string& name) const;
    bool has_category(const std::string& dimension, const std::string& category) const;

    json to_json() const;
    static CategoryTaxonomy from_json(const json& j);

private:
    std::vector<CategoryDimension> dimensions_;
};

/// The five-dimension scheme used throughout: factuality, premise, phrasing,
/// linguistic-variation and user-expertise.
const CategoryTaxonomy& default_taxonomy();

struct QaRecord {
    std::string question_id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> gold_doc_ids;
    std::map<std::string, std::string> labels; // dimension -> category
};

/// Parse and validate a JSONL QA file against the taxonomy. Every record must
/// carry a label for every taxonomy dimension, gold_doc_ids must be non-empty
/// and question_ids unique.
std::vector<QaRecord> load_qa_dataset(const std::filesystem::path& path,
                                      const CategoryTaxonomy& taxonomy);

void save_qa_dataset(const std::filesystem::path& path, const std::vector<QaRecord>& records);

json qa_record_to_json(const QaRecord& record);
QaRecord qa_record_from_json(const json& j);

/// Product of category counts across dimensions; 1 for an empty taxonomy.
std::size_t combination_count(const CategoryTaxonomy& taxonomy);

struct Stratum {
    std::map<std::string, std::string> selector; // dimension -> category (partial)
    std::vector<std::string> record_ids;
};

/// Partition records by one dimension's label. Strata follow the taxonomy's
/// category declaration order; empty strata are omitted.
std::vector<Stratum> stratify(const std::vector<QaRecord>& records,
                              const CategoryTaxonomy& taxonomy, const std::string& dimension);

/// Partition records by their full label combination, one stratum per
/// observed combination, ordered by taxonomy declaration order.
std::vector<Stratum> stratify_full_combination(const std::vector<QaRecord>& records,
                                               const CategoryTaxonomy& taxonomy);

} // namespace raglab
