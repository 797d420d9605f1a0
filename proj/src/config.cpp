#include "raglab/config.hpp"

#include <algorithm>

#include "raglab/errors.hpp"

namespace raglab {

std::string to_string(PipelineMode m) {
    switch (m) {
        case PipelineMode::sparse: return "sparse";
        case PipelineMode::dense: return "dense";
        case PipelineMode::hybrid: return "hybrid";
        case PipelineMode::hybrid_rerank: return "hybrid-rerank";
        case PipelineMode::doc2query: return "doc2query";
    }
    throw DomainError("invalid pipeline mode value");
}

PipelineMode pipeline_mode_from_string(const std::string& s) {
    if (s == "sparse") return PipelineMode::sparse;
    if (s == "dense") return PipelineMode::dense;
    if (s == "hybrid") return PipelineMode::hybrid;
    if (s == "hybrid-rerank") return PipelineMode::hybrid_rerank;
    if (s == "doc2query") return PipelineMode::doc2query;
    throw ConfigError("unknown pipeline mode \"" + s + "\"");
}

const std::vector<std::string>& builtin_presets() {
    static const std::vector<std::string> names = {"sparse", "dense", "hybrid",
                                                   "hybrid-rerank", "doc2query"};
    return names;
}

bool PipelineConfig::deterministic_bindings() const {
    return dense.provider != "http" && sparse.question_generator != "http" &&
           rerank.scorer != "http" && generation.client != "http";
}

json PipelineConfig::to_json() const {
    json phrases = json::array();
    for (const auto& p : generation.refusal_phrases) {
        phrases.push_back(p);
    }
    json strat = json::array();
    for (const auto& d : evaluation.strat_dimensions) {
        strat.push_back(d);
    }
    return json{
        {"corpus", corpus_path.string()},
        {"qa", qa_path.string()},
        {"workdir", workdir.string()},
        {"preset", preset},
        {"mode", to_string(mode)},
        {"seed", seed},
        {"parallelism", parallelism},
        {"chunking", {{"max_tokens", max_tokens}}},
        {"sparse",
         {{"k1", sparse.bm25.k1},
          {"b", sparse.bm25.b},
          {"doc2query_questions", sparse.doc2query_questions},
          {"question_generator", sparse.question_generator}}},
        {"dense",
         {{"provider", dense.provider},
          {"dimension", dense.dimension},
          {"query_prefix", dense.query_prefix},
          {"passage_prefix", dense.passage_prefix}}},
        {"fusion",
         {{"k_each", fusion.k_each},
          {"top_n", fusion.top_n},
          {"w_sparse", fusion.w_sparse},
          {"w_dense", fusion.w_dense}}},
        {"rerank", {{"scorer", rerank.scorer}, {"top_n", rerank.top_n}}},
        {"generation",
         {{"client", generation.client},
          {"fixed_answer", generation.fixed_answer},
          {"temperature", generation.params.temperature},
          {"top_p", generation.params.top_p},
          {"max_answer_tokens", generation.params.max_answer_tokens},
          {"context_size", generation.params.context_size},
          {"prompt_strategy", to_string(generation.params.prompt_strategy)},
          {"prompt_template", generation.prompt_template.string()},
          {"refusal_phrases", std::move(phrases)}}},
        {"taxonomy", taxonomy.to_json()},
        {"evaluation",
         {{"strat_dimensions", std::move(strat)},
          {"full_combination", evaluation.full_combination}}}};
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
    if (p.empty() || p.is_absolute()) {
        return p;
    }
    return base / p;
}

void check_binding(const std::string& field, const std::string& value,
                   const std::vector<std::string>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
        std::string msg = field + " must be one of {";
        for (std::size_t i = 0; i < allowed.size(); ++i) {
            if (i) {
                msg += ", ";
            }
            msg += allowed[i];
        }
        throw ConfigError(msg + "}, got \"" + value + "\"");
    }
}

} // namespace

PipelineConfig load_config(const std::filesystem::path& path, const std::string& preset) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError("config " + path.string() + " is not a JSON object");
    }

    std::string active = preset.empty() ? j.value("preset", "hybrid") : preset;
    bool is_builtin = std::find(builtin_presets().begin(), builtin_presets().end(), active) !=
                      builtin_presets().end();
    if (j.contains("presets")) {
        const json& overlays = j.at("presets");
        if (!overlays.is_object()) {
            throw ConfigError("\"presets\" must be an object of overlay configs");
        }
        if (overlays.contains(active)) {
            json overlay = overlays.at(active);
            j.merge_patch(overlay);
        } else if (!is_builtin) {
            throw ConfigError("preset \"" + active +
                              "\" is neither built-in nor defined under \"presets\"");
        }
    } else if (!is_builtin) {
        throw ConfigError("preset \"" + active + "\" is not a built-in preset");
    }

    PipelineConfig cfg;
    cfg.preset = active;
    if (is_builtin) {
        cfg.mode = pipeline_mode_from_string(active);
    } else {
        cfg.mode = pipeline_mode_from_string(j.value("mode", "hybrid"));
    }

    std::filesystem::path base = path.parent_path();
    if (!j.contains("corpus") || !j.contains("qa")) {
        throw ConfigError("config must set \"corpus\" and \"qa\" paths");
    }
    cfg.corpus_path = resolve(base, j.at("corpus").get<std::string>());
    cfg.qa_path = resolve(base, j.at("qa").get<std::string>());
    cfg.workdir = resolve(base, j.value("workdir", "work"));
    cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.parallelism = j.value("parallelism", std::size_t{1});
    if (cfg.parallelism == 0) {
        throw ConfigError("parallelism must be at least 1");
    }

    if (j.contains("chunking")) {
        cfg.max_tokens = j.at("chunking").value("max_tokens", std::size_t{512});
    }
    if (cfg.max_tokens == 0) {
        throw ConfigError("chunking.max_tokens must be at least 1");
    }

    if (j.contains("sparse")) {
        const json& s = j.at("sparse");
        cfg.sparse.bm25.k1 = s.value("k1", 1.2);
        cfg.sparse.bm25.b = s.value("b", 0.75);
        cfg.sparse.doc2query_questions =
            s.value("doc2query_questions", std::size_t{3});
        cfg.sparse.question_generator = s.value("question_generator", std::string("mock"));
    }
    if (cfg.sparse.bm25.k1 < 0.0) {
        throw ConfigError("sparse.k1 must be non-negative");
    }
    if (cfg.sparse.bm25.b < 0.0 || cfg.sparse.bm25.b > 1.0) {
        throw ConfigError("sparse.b must lie in [0, 1]");
    }
    check_binding("sparse.question_generator", cfg.sparse.question_generator,
                  {"mock", "http"});

    if (j.contains("dense")) {
        const json& d = j.at("dense");
        cfg.dense.provider = d.value("provider", std::string("hashing"));
        cfg.dense.dimension = d.value("dimension", std::size_t{256});
        cfg.dense.query_prefix = d.value("query_prefix", std::string());
        cfg.dense.passage_prefix = d.value("passage_prefix", std::string());
    }
    if (cfg.dense.dimension == 0) {
        throw ConfigError("dense.dimension must be at least 1");
    }
    check_binding("dense.provider", cfg.dense.provider, {"hashing", "http"});

    if (j.contains("fusion")) {
        const json& f = j.at("fusion");
        cfg.fusion.k_each = f.value("k_each", std::size_t{30});
        cfg.fusion.top_n = f.value("top_n", std::size_t{10});
        cfg.fusion.w_sparse = f.value("w_sparse", 1.0);
        cfg.fusion.w_dense = f.value("w_dense", 1.0);
    }
    if (cfg.fusion.k_each == 0 || cfg.fusion.top_n == 0) {
        throw ConfigError("fusion.k_each and fusion.top_n must be at least 1");
    }
    if (cfg.fusion.top_n > 2 * cfg.fusion.k_each) {
        throw ConfigError("fusion.top_n must not exceed 2 * k_each");
    }
    if (cfg.fusion.w_sparse < 0.0 || cfg.fusion.w_dense < 0.0) {
        throw ConfigError("fusion weights must be non-negative");
    }

    if (j.contains("rerank")) {
        const json& r = j.at("rerank");
        cfg.rerank.scorer = r.value("scorer", std::string("token-overlap"));
        cfg.rerank.top_n = r.value("top_n", std::size_t{10});
    }
    if (cfg.rerank.top_n == 0) {
        throw ConfigError("rerank.top_n must be at least 1");
    }
    check_binding("rerank.scorer", cfg.rerank.scorer,
                  {"token-overlap", "constant", "oracle", "http"});

    cfg.generation.refusal_phrases = default_refusal_phrases();
    if (j.contains("generation")) {
        const json& g = j.at("generation");
        cfg.generation.client = g.value("client", std::string("echo"));
        cfg.generation.fixed_answer = g.value("fixed_answer", cfg.generation.fixed_answer);
        cfg.generation.params.temperature = g.value("temperature", 0.6);
        cfg.generation.params.top_p = g.value("top_p", 0.9);
        cfg.generation.params.max_answer_tokens =
            g.value("max_answer_tokens", std::size_t{200});
        cfg.generation.params.context_size = g.value("context_size", std::size_t{10});
        cfg.generation.params.prompt_strategy =
            prompt_strategy_from_string(g.value("prompt_strategy", std::string("default")));
        if (g.contains("refusal_phrases")) {
            cfg.generation.refusal_phrases =
                g.at("refusal_phrases").get<std::vector<std::string>>();
            if (cfg.generation.refusal_phrases.empty()) {
                throw ConfigError("generation.refusal_phrases must be non-empty");
            }
        }
        if (g.contains("prompt_template")) {
            cfg.generation.prompt_template =
                resolve(base, g.at("prompt_template").get<std::string>());
        }
    }
    if (cfg.generation.params.temperature < 0.0) {
        throw ConfigError("generation.temperature must be non-negative");
    }
    if (cfg.generation.params.top_p <= 0.0 || cfg.generation.params.top_p > 1.0) {
        throw ConfigError("generation.top_p must lie in (0, 1]");
    }
    if (cfg.generation.params.max_answer_tokens == 0 ||
        cfg.generation.params.context_size == 0) {
        throw ConfigError("generation token and context budgets must be at least 1");
    }
    check_binding("generation.client", cfg.generation.client,
                  {"echo", "fixed", "gold", "http"});

    cfg.taxonomy = j.contains("taxonomy") ? CategoryTaxonomy::from_json(j.at("taxonomy"))
                                          : default_taxonomy();

    for (const auto& dim : cfg.taxonomy.dimensions()) {
        cfg.evaluation.strat_dimensions.push_back(dim.name);
    }
    if (j.contains("evaluation")) {
        const json& e = j.at("evaluation");
        if (e.contains("strat_dimensions")) {
            cfg.evaluation.strat_dimensions =
                e.at("strat_dimensions").get<std::vector<std::string>>();
        }
        cfg.evaluation.full_combination = e.value("full_combination", false);
    }
    for (const auto& dim : cfg.evaluation.strat_dimensions) {
        if (!cfg.taxonomy.has_dimension(dim)) {
            throw ConfigError("evaluation.strat_dimensions names unknown dimension \"" + dim +
                              "\"");
        }
    }
    return cfg;
}

} // namespace raglab
