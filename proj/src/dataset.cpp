#include "raglab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "raglab/errors.hpp"

namespace raglab {

CategoryTaxonomy::CategoryTaxonomy(std::vector<CategoryDimension> dimensions)
    : dimensions_(std::move(dimensions)) {
    std::unordered_set<std::string> dim_names;
    for (const auto& dim : dimensions_) {
        if (dim.name.empty()) {
            throw ValidationError("taxonomy dimension name must be non-empty");
        }
        if (!dim_names.insert(dim.name).second) {
            throw ValidationError("duplicate taxonomy dimension \"" + dim.name + "\"");
        }
        if (dim.categories.empty()) {
            throw ValidationError("dimension \"" + dim.name + "\" has no categories");
        }
        std::unordered_set<std::string> cat_names;
        double total = 0.0;
        for (const auto& [cat, prob] : dim.categories) {
            if (!cat_names.insert(cat).second) {
                throw ValidationError("duplicate category \"" + cat + "\" in dimension \"" +
                                      dim.name + "\"");
            }
            if (prob < 0.0) {
                throw ValidationError("negative probability for \"" + dim.name + ":" + cat +
                                      "\"");
            }
            total += prob;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw ValidationError("probabilities for dimension \"" + dim.name +
                                  "\" sum to " + std::to_string(total) + ", expected 1");
        }
    }
}

bool CategoryTaxonomy::has_dimension(const std::string& name) const {
    for (const auto& dim : dimensions_) {
        if (dim.name == name) {
            return true;
        }
    }
    return false;
}

bool CategoryTaxonomy::has_category(const std::string& dimension,
                                    const std::string& category) const {
    for (const auto& dim : dimensions_) {
        if (dim.name != dimension) {
            continue;
        }
        for (const auto& [cat, prob] : dim.categories) {
            if (cat == category) {
                return true;
            }
        }
    }
    return false;
}

json CategoryTaxonomy::to_json() const {
    json dims = json::array();
    for (const auto& dim : dimensions_) {
        json cats = json::array();
        for (const auto& [cat, prob] : dim.categories) {
            cats.push_back(json{{"name", cat}, {"probability", prob}});
        }
        dims.push_back(json{{"name", dim.name}, {"categories", std::move(cats)}});
    }
    return json{{"dimensions", std::move(dims)}};
}

CategoryTaxonomy CategoryTaxonomy::from_json(const json& j) {
    std::vector<CategoryDimension> dims;
    for (const auto& dim : j.at("dimensions")) {
        CategoryDimension d;
        d.name = dim.at("name").get<std::string>();
        for (const auto& cat : dim.at("categories")) {
            d.categories.emplace_back(cat.at("name").get<std::string>(),
                                      cat.at("probability").get<double>());
        }
        dims.push_back(std::move(d));
    }
    return CategoryTaxonomy(std::move(dims));
}

const CategoryTaxonomy& default_taxonomy() {
    static const CategoryTaxonomy taxonomy(std::vector<CategoryDimension>{
        {"factuality", {{"factoid", 0.5}, {"open-ended", 0.5}}},
        {"premise", {{"direct", 0.5}, {"with-premise", 0.5}}},
        {"phrasing",
         {{"concise-natural", 0.25},
          {"verbose-natural", 0.25},
          {"short-search", 0.25},
          {"long-search", 0.25}}},
        {"linguistic-variation", {{"similar", 0.5}, {"distant", 0.5}}},
        {"user-expertise", {{"expert", 0.8}, {"novice", 0.2}}},
    });
    return taxonomy;
}

json qa_record_to_json(const QaRecord& record) {
    json labels = json::object();
    for (const auto& [dim, cat] : record.labels) {
        labels[dim] = cat;
    }
    return json{{"question_id", record.question_id},
                {"question", record.question},
                {"gold_answer", record.gold_answer},
                {"gold_doc_ids", record.gold_doc_ids},
                {"labels", std::move(labels)}};
}

QaRecord qa_record_from_json(const json& j) {
    QaRecord record;
    record.question_id = j.at("question_id").get<std::string>();
    record.question = j.at("question").get<std::string>();
    record.gold_answer = j.at("gold_answer").get<std::string>();
    record.gold_doc_ids = j.at("gold_doc_ids").get<std::vector<std::string>>();
    if (j.contains("labels")) {
        for (const auto& [dim, cat] : j.at("labels").items()) {
            record.labels[dim] = cat.get<std::string>();
        }
    }
    return record;
}

std::vector<QaRecord> load_qa_dataset(const std::filesystem::path& path,
                                      const CategoryTaxonomy& taxonomy) {
    std::vector<QaRecord> records;
    std::unordered_set<std::string> seen;
    read_jsonl(path, [&](const json& rec, std::size_t line) {
        for (const char* field : {"question_id", "question", "gold_answer"}) {
            if (!rec.contains(field) || !rec.at(field).is_string()) {
                throw ParseError("record missing string field \"" + std::string(field) + "\"",
                                 line);
            }
        }
        QaRecord record;
        record.question_id = rec.at("question_id").get<std::string>();
        record.question = rec.at("question").get<std::string>();
        record.gold_answer = rec.at("gold_answer").get<std::string>();
        if (record.question_id.empty()) {
            throw ParseError("question_id must be non-empty", line);
        }
        if (!seen.insert(record.question_id).second) {
            throw IntegrityError("duplicate question_id \"" + record.question_id + "\"");
        }
        if (!rec.contains("gold_doc_ids") || !rec.at("gold_doc_ids").is_array() ||
            rec.at("gold_doc_ids").empty()) {
            throw ValidationError("record \"" + record.question_id +
                                  "\": gold_doc_ids must be a non-empty array");
        }
        for (const auto& id : rec.at("gold_doc_ids")) {
            if (!id.is_string() || id.get<std::string>().empty()) {
                throw ValidationError("record \"" + record.question_id +
                                      "\": gold_doc_ids entries must be non-empty strings");
            }
            record.gold_doc_ids.push_back(id.get<std::string>());
        }
        if (!rec.contains("labels") || !rec.at("labels").is_object()) {
            throw ValidationError("record \"" + record.question_id +
                                  "\": labels must be an object");
        }
        for (const auto& [dim, cat] : rec.at("labels").items()) {
            if (!cat.is_string()) {
                throw ValidationError("record \"" + record.question_id + "\": label for \"" +
                                      dim + "\" must be a string");
            }
            if (!taxonomy.has_dimension(dim)) {
                throw ValidationError("record \"" + record.question_id +
                                      "\": unknown dimension \"" + dim + "\"");
            }
            if (!taxonomy.has_category(dim, cat.get<std::string>())) {
                throw ValidationError("record \"" + record.question_id + "\": category \"" +
                                      cat.get<std::string>() +
                                      "\" not in taxonomy dimension \"" + dim + "\"");
            }
            record.labels[dim] = cat.get<std::string>();
        }
        for (const auto& dim : taxonomy.dimensions()) {
            if (!record.labels.count(dim.name)) {
                throw ValidationError("record \"" + record.question_id +
                                      "\": missing label for dimension \"" + dim.name + "\"");
            }
        }
        records.push_back(std::move(record));
    });
    return records;
}

void save_qa_dataset(const std::filesystem::path& path, const std::vector<QaRecord>& records) {
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& record : records) {
        rows.push_back(qa_record_to_json(record));
    }
    write_jsonl(path, rows);
}

std::size_t combination_count(const CategoryTaxonomy& taxonomy) {
    std::size_t count = 1;
    for (const auto& dim : taxonomy.dimensions()) {
        count *= dim.categories.size();
    }
    return count;
}

std::vector<Stratum> stratify(const std::vector<QaRecord>& records,
                              const CategoryTaxonomy& taxonomy, const std::string& dimension) {
    const CategoryDimension* dim = nullptr;
    for (const auto& d : taxonomy.dimensions()) {
        if (d.name == dimension) {
            dim = &d;
            break;
        }
    }
    if (!dim) {
        throw LookupError("unknown taxonomy dimension \"" + dimension + "\"");
    }
    std::vector<Stratum> out;
    for (const auto& [cat, prob] : dim->categories) {
        Stratum stratum;
        stratum.selector[dimension] = cat;
        for (const auto& record : records) {
            auto it = record.labels.find(dimension);
            if (it != record.labels.end() && it->second == cat) {
                stratum.record_ids.push_back(record.question_id);
            }
        }
        if (!stratum.record_ids.empty()) {
            out.push_back(std::move(stratum));
        }
    }
    return out;
}

std::vector<Stratum> stratify_full_combination(const std::vector<QaRecord>& records,
                                               const CategoryTaxonomy& taxonomy) {
    // Sort key: category indexes in taxonomy declaration order.
    auto combo_key = [&](const QaRecord& record) {
        std::vector<std::size_t> key;
        key.reserve(taxonomy.dimensions().size());
        for (const auto& dim : taxonomy.dimensions()) {
            auto it = record.labels.find(dim.name);
            std::size_t idx = dim.categories.size();
            if (it != record.labels.end()) {
                for (std::size_t i = 0; i < dim.categories.size(); ++i) {
                    if (dim.categories[i].first == it->second) {
                        idx = i;
                        break;
                    }
                }
            }
            key.push_back(idx);
        }
        return key;
    };

    std::vector<std::pair<std::vector<std::size_t>, Stratum>> groups;
    for (const auto& record : records) {
        std::vector<std::size_t> key = combo_key(record);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            Stratum stratum;
            for (const auto& dim : taxonomy.dimensions()) {
                auto lab = record.labels.find(dim.name);
                if (lab != record.labels.end()) {
                    stratum.selector[dim.name] = lab->second;
                }
            }
            groups.emplace_back(std::move(key), std::move(stratum));
            it = groups.end() - 1;
        }
        it->second.record_ids.push_back(record.question_id);
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Stratum> out;
    out.reserve(groups.size());
    for (auto& [key, stratum] : groups) {
        out.push_back(std::move(stratum));
    }
    return out;
}

} // namespace raglab
