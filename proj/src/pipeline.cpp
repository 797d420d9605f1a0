#include "raglab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "raglab/dense_index.hpp"
#include "raglab/errors.hpp"
#include "raglab/http_bindings.hpp"
#include "raglab/metrics.hpp"
#include "raglab/parallel.hpp"
#include "raglab/scorers.hpp"

namespace raglab {

namespace {

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_artifact(const std::filesystem::path& path, const std::string& producer) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("missing artifact " + path.string() + "; run `raglab " + producer +
                          "` first");
    }
}

json load_json_file(const std::filesystem::path& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("invalid JSON in " + path.string());
    }
    return j;
}

void record_stage(const PipelineConfig& cfg, const ArtifactPaths& paths,
                  const std::string& stage, double seconds,
                  const std::map<std::string, std::string>& hashes = {},
                  const std::map<std::string, std::size_t>& counts = {}) {
    RunManifest manifest = RunManifest::load_or_empty(paths.manifest());
    manifest.config = cfg.to_json();
    manifest.deterministic = cfg.deterministic_bindings();
    manifest.timestamps[stage] = iso_timestamp();
    manifest.stage_seconds[stage] = seconds;
    for (const auto& [name, hash] : hashes) {
        manifest.artifact_hashes[name] = hash;
    }
    for (const auto& [name, count] : counts) {
        manifest.counts[name] = count;
    }
    manifest.save(paths.manifest());
}

} // namespace

json RunManifest::to_json() const {
    json hashes = json::object();
    for (const auto& [name, hash] : artifact_hashes) {
        hashes[name] = hash;
    }
    json count_obj = json::object();
    for (const auto& [name, count] : counts) {
        count_obj[name] = count;
    }
    json stamp_obj = json::object();
    for (const auto& [name, stamp] : timestamps) {
        stamp_obj[name] = stamp;
    }
    json secs = json::object();
    for (const auto& [name, s] : stage_seconds) {
        secs[name] = s;
    }
    return json{{"config", config},
                {"artifact_hashes", std::move(hashes)},
                {"counts", std::move(count_obj)},
                {"timestamps", std::move(stamp_obj)},
                {"stage_seconds", std::move(secs)},
                {"deterministic", deterministic}};
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.config = j.value("config", json::object());
    if (j.contains("artifact_hashes")) {
        for (const auto& [name, hash] : j.at("artifact_hashes").items()) {
            m.artifact_hashes[name] = hash.get<std::string>();
        }
    }
    if (j.contains("counts")) {
        for (const auto& [name, count] : j.at("counts").items()) {
            m.counts[name] = count.get<std::size_t>();
        }
    }
    if (j.contains("timestamps")) {
        for (const auto& [name, stamp] : j.at("timestamps").items()) {
            m.timestamps[name] = stamp.get<std::string>();
        }
    }
    if (j.contains("stage_seconds")) {
        for (const auto& [name, s] : j.at("stage_seconds").items()) {
            m.stage_seconds[name] = s.get<double>();
        }
    }
    m.deterministic = j.value("deterministic", true);
    return m;
}

RunManifest RunManifest::load_or_empty(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        return RunManifest{};
    }
    return from_json(load_json_file(path));
}

void RunManifest::save(const std::filesystem::path& path) const {
    atomic_write(path, to_json().dump(2) + "\n");
}

std::string file_hash_hex(const std::filesystem::path& path) {
    std::uint64_t h = fnv1a64(read_file(path));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& cfg) {
    if (cfg.dense.provider == "hashing") {
        return std::make_unique<HashingEmbedder>(cfg.dense.dimension, cfg.seed);
    }
    return std::make_unique<HttpEmbeddingProvider>(endpoint_from_env("EMBEDDING"),
                                                   cfg.dense.dimension);
}

std::unique_ptr<QuestionGenerator> make_question_generator(const PipelineConfig& cfg) {
    if (cfg.sparse.question_generator == "mock") {
        return std::make_unique<MockQuestionGenerator>(cfg.seed);
    }
    return std::make_unique<HttpQuestionGenerator>(endpoint_from_env("GENERATION"));
}

std::unique_ptr<GenerationClient> make_generation_client(const PipelineConfig& cfg,
                                                         const std::vector<QaRecord>& records) {
    if (cfg.generation.client == "echo") {
        return std::make_unique<EchoClient>();
    }
    if (cfg.generation.client == "fixed") {
        return std::make_unique<FixedClient>(cfg.generation.fixed_answer);
    }
    if (cfg.generation.client == "gold") {
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.reserve(records.size());
        for (const auto& record : records) {
            pairs.emplace_back(record.question, record.gold_answer);
        }
        return std::make_unique<GoldAnswerClient>(std::move(pairs));
    }
    return std::make_unique<HttpGenerationClient>(endpoint_from_env("GENERATION"));
}

std::unique_ptr<PassageScorer> make_passage_scorer(const PipelineConfig& cfg,
                                                   const ChunkStore& store,
                                                   const QaRecord& record) {
    if (cfg.rerank.scorer == "token-overlap") {
        return std::make_unique<TokenOverlapScorer>();
    }
    if (cfg.rerank.scorer == "constant") {
        return std::make_unique<ConstantScorer>();
    }
    if (cfg.rerank.scorer == "oracle") {
        std::map<std::string, std::string> text_to_doc;
        for (const auto& chunk : store.chunks()) {
            text_to_doc[chunk.text] = chunk.parent_doc_id;
        }
        std::set<std::string> gold(record.gold_doc_ids.begin(), record.gold_doc_ids.end());
        return std::make_unique<OraclePassageScorer>(std::move(text_to_doc), std::move(gold));
    }
    return std::make_unique<HttpPassageScorer>(endpoint_from_env("RERANK"));
}

void save_chunks(const std::filesystem::path& path, const std::vector<DocumentChunk>& chunks) {
    std::vector<json> rows;
    rows.reserve(chunks.size());
    for (const auto& c : chunks) {
        rows.push_back(json{{"chunk_id", c.chunk_id},
                            {"parent_doc_id", c.parent_doc_id},
                            {"ordinal", c.ordinal},
                            {"text", c.text},
                            {"token_count", c.token_count}});
    }
    write_jsonl(path, rows);
}

std::vector<DocumentChunk> load_chunks(const std::filesystem::path& path) {
    std::vector<DocumentChunk> chunks;
    read_jsonl(path, [&](const json& row, std::size_t) {
        DocumentChunk c;
        c.chunk_id = row.at("chunk_id").get<std::string>();
        c.parent_doc_id = row.at("parent_doc_id").get<std::string>();
        c.ordinal = row.at("ordinal").get<std::size_t>();
        c.text = row.at("text").get<std::string>();
        c.token_count = row.at("token_count").get<std::size_t>();
        chunks.push_back(std::move(c));
    });
    return chunks;
}

void save_rankings(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, RankedList>>& rankings) {
    std::vector<json> rows;
    rows.reserve(rankings.size());
    for (const auto& [question_id, list] : rankings) {
        json entries = json::array();
        for (const auto& e : list) {
            entries.push_back(json{{"chunk_id", e.chunk_id},
                                   {"score", e.score},
                                   {"provenance", to_string(e.provenance)}});
        }
        rows.push_back(json{{"question_id", question_id}, {"entries", std::move(entries)}});
    }
    write_jsonl(path, rows);
}

std::map<std::string, RankedList> load_rankings(const std::filesystem::path& path) {
    std::map<std::string, RankedList> out;
    read_jsonl(path, [&](const json& row, std::size_t line) {
        RankedList list;
        for (const auto& e : row.at("entries")) {
            list.push_back(RankedEntry{e.at("chunk_id").get<std::string>(),
                                       e.at("score").get<double>(),
                                       provenance_from_string(
                                           e.at("provenance").get<std::string>())});
        }
        std::string id = row.at("question_id").get<std::string>();
        if (!out.emplace(std::move(id), std::move(list)).second) {
            throw IntegrityError("duplicate ranking for question at line " +
                                 std::to_string(line));
        }
    });
    return out;
}

void save_generations(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, GenerationRow>>& rows) {
    std::vector<json> out;
    out.reserve(rows.size());
    for (const auto& [question_id, row] : rows) {
        json rec{{"question_id", question_id}};
        if (row.error.empty()) {
            rec["answer"] = row.answer;
            rec["is_refusal"] = row.is_refusal;
            rec["prompt_chunk_ids"] = row.prompt_chunk_ids;
        } else {
            rec["error"] = row.error;
        }
        out.push_back(std::move(rec));
    }
    write_jsonl(path, out);
}

std::map<std::string, GenerationRow> load_generations(const std::filesystem::path& path) {
    std::map<std::string, GenerationRow> out;
    read_jsonl(path, [&](const json& rec, std::size_t line) {
        GenerationRow row;
        if (rec.contains("error")) {
            row.error = rec.at("error").get<std::string>();
        } else {
            row.answer = rec.at("answer").get<std::string>();
            row.is_refusal = rec.at("is_refusal").get<bool>();
            row.prompt_chunk_ids =
                rec.at("prompt_chunk_ids").get<std::vector<std::string>>();
        }
        std::string id = rec.at("question_id").get<std::string>();
        if (!out.emplace(std::move(id), std::move(row)).second) {
            throw IntegrityError("duplicate generation for question at line " +
                                 std::to_string(line));
        }
    });
    return out;
}

void save_timings(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, double>>& timings) {
    std::vector<json> rows;
    rows.reserve(timings.size());
    for (const auto& [question_id, seconds] : timings) {
        rows.push_back(json{{"question_id", question_id}, {"seconds", seconds}});
    }
    write_jsonl(path, rows);
}

std::map<std::string, double> load_timings(const std::filesystem::path& path) {
    std::map<std::string, double> out;
    read_jsonl(path, [&](const json& row, std::size_t) {
        out[row.at("question_id").get<std::string>()] = row.at("seconds").get<double>();
    });
    return out;
}

void cmd_index(const PipelineConfig& cfg) {
    if (!std::filesystem::exists(cfg.corpus_path)) {
        throw ConfigError("corpus file not found: " + cfg.corpus_path.string());
    }
    ArtifactPaths paths{cfg.workdir};
    auto started = std::chrono::steady_clock::now();

    std::vector<Document> docs = ingest_corpus(cfg.corpus_path);
    ChunkStore store = build_chunk_store(docs, cfg.max_tokens);
    if (store.size() == 0) {
        throw ValidationError("corpus produced no chunks");
    }
    std::filesystem::create_directories(cfg.workdir);
    save_chunks(paths.chunks(), store.chunks());

    SparseIndex sparse = build_sparse_index(store.chunks(), cfg.sparse.bm25);
    atomic_write(paths.sparse_index(), sparse.to_json().dump() + "\n");

    std::unique_ptr<QuestionGenerator> qgen = make_question_generator(cfg);
    std::vector<DocumentChunk> augmented(store.chunks().size());
    parallel_for(store.chunks().size(), cfg.parallelism, [&](std::size_t i) {
        augmented[i] =
            augment_doc2query(store.chunks()[i], *qgen, cfg.sparse.doc2query_questions);
    });
    SparseIndex doc2query = build_sparse_index(augmented, cfg.sparse.bm25);
    atomic_write(paths.doc2query_index(), doc2query.to_json().dump() + "\n");

    std::unique_ptr<EmbeddingProvider> provider = make_embedding_provider(cfg);
    DenseIndex dense = build_dense_index(store.chunks(), *provider, cfg.dense.passage_prefix,
                                         cfg.parallelism);
    atomic_write(paths.dense_index(), dense.to_json().dump() + "\n");

    record_stage(cfg, paths, "index", seconds_since(started),
                 {{"corpus", file_hash_hex(cfg.corpus_path)},
                  {"chunks", file_hash_hex(paths.chunks())},
                  {"sparse_index", file_hash_hex(paths.sparse_index())},
                  {"doc2query_index", file_hash_hex(paths.doc2query_index())},
                  {"dense_index", file_hash_hex(paths.dense_index())}},
                 {{"documents", docs.size()}, {"chunks", store.size()}});
}

void cmd_retrieve(const PipelineConfig& cfg) {
    ArtifactPaths paths{cfg.workdir};
    require_artifact(paths.chunks(), "index");
    bool needs_sparse = cfg.mode == PipelineMode::sparse || cfg.mode == PipelineMode::hybrid ||
                        cfg.mode == PipelineMode::hybrid_rerank;
    bool needs_dense = cfg.mode == PipelineMode::dense || cfg.mode == PipelineMode::hybrid ||
                       cfg.mode == PipelineMode::hybrid_rerank;
    if (needs_sparse) {
        require_artifact(paths.sparse_index(), "index");
    }
    if (needs_dense) {
        require_artifact(paths.dense_index(), "index");
    }
    if (cfg.mode == PipelineMode::doc2query) {
        require_artifact(paths.doc2query_index(), "index");
    }
    auto started = std::chrono::steady_clock::now();

    std::vector<QaRecord> records = load_qa_dataset(cfg.qa_path, cfg.taxonomy);
    ChunkStore store(load_chunks(paths.chunks()));

    SparseIndex sparse;
    if (needs_sparse) {
        sparse = SparseIndex::from_json(load_json_file(paths.sparse_index()));
    }
    SparseIndex doc2query;
    if (cfg.mode == PipelineMode::doc2query) {
        doc2query = SparseIndex::from_json(load_json_file(paths.doc2query_index()));
    }
    DenseIndex dense;
    std::unique_ptr<EmbeddingProvider> provider;
    if (needs_dense) {
        dense = DenseIndex::from_json(load_json_file(paths.dense_index()));
        provider = make_embedding_provider(cfg);
    }

    std::vector<std::pair<std::string, RankedList>> rankings(records.size());
    std::vector<std::pair<std::string, double>> timings(records.size());
    parallel_for(records.size(), cfg.parallelism, [&](std::size_t i) {
        const QaRecord& record = records[i];
        auto question_started = std::chrono::steady_clock::now();
        RankedList list;
        switch (cfg.mode) {
            case PipelineMode::sparse:
                list = search_sparse(sparse, record.question, cfg.fusion.k_each);
                break;
            case PipelineMode::dense:
                list = search_dense(dense, record.question, *provider, cfg.fusion.k_each,
                                    cfg.dense.query_prefix);
                break;
            case PipelineMode::doc2query:
                list = search_sparse(doc2query, record.question, cfg.fusion.k_each);
                break;
            case PipelineMode::hybrid: {
                RankedList s = search_sparse(sparse, record.question, cfg.fusion.k_each);
                RankedList d = search_dense(dense, record.question, *provider,
                                            cfg.fusion.k_each, cfg.dense.query_prefix);
                list = fuse(s, d, cfg.fusion);
                break;
            }
            case PipelineMode::hybrid_rerank: {
                RankedList s = search_sparse(sparse, record.question, cfg.fusion.k_each);
                RankedList d = search_dense(dense, record.question, *provider,
                                            cfg.fusion.k_each, cfg.dense.query_prefix);
                FusionConfig pool_cfg = cfg.fusion;
                pool_cfg.top_n = 2 * cfg.fusion.k_each;
                RankedList pool = fuse(s, d, pool_cfg);
                std::unique_ptr<PassageScorer> scorer =
                    make_passage_scorer(cfg, store, record);
                RerankOutcome outcome = rerank(
                    pool, record.question, *scorer,
                    [&](const std::string& id) { return store.text_of(id); },
                    cfg.rerank.top_n);
                list = std::move(outcome.list);
                break;
            }
        }
        rankings[i] = {record.question_id, std::move(list)};
        timings[i] = {record.question_id, seconds_since(question_started)};
    });

    save_rankings(paths.rankings(cfg.preset), rankings);
    save_timings(paths.retrieval_timings(cfg.preset), timings);
    record_stage(cfg, paths, "retrieve:" + cfg.preset, seconds_since(started),
                 {{"rankings:" + cfg.preset, file_hash_hex(paths.rankings(cfg.preset))},
                  {"qa", file_hash_hex(cfg.qa_path)}},
                 {{"questions", records.size()}});
}

void cmd_generate(const PipelineConfig& cfg) {
    ArtifactPaths paths{cfg.workdir};
    require_artifact(paths.chunks(), "index");
    require_artifact(paths.rankings(cfg.preset), "retrieve");
    auto started = std::chrono::steady_clock::now();

    std::vector<QaRecord> records = load_qa_dataset(cfg.qa_path, cfg.taxonomy);
    ChunkStore store(load_chunks(paths.chunks()));
    std::map<std::string, RankedList> rankings = load_rankings(paths.rankings(cfg.preset));

    std::unique_ptr<GenerationClient> client = make_generation_client(cfg, records);
    PromptTemplate tmpl =
        cfg.generation.prompt_template.empty()
            ? PromptTemplate::for_strategy(cfg.generation.params.prompt_strategy)
            : PromptTemplate::from_file(cfg.generation.prompt_template,
                                        cfg.generation.params.prompt_strategy);

    std::vector<std::pair<std::string, GenerationRow>> rows(records.size());
    std::vector<std::pair<std::string, double>> timings(records.size());
    parallel_for(records.size(), cfg.parallelism, [&](std::size_t i) {
        const QaRecord& record = records[i];
        auto it = rankings.find(record.question_id);
        if (it == rankings.end()) {
            throw CompletenessError("no ranking for question \"" + record.question_id + "\"",
                                    {record.question_id});
        }
        std::vector<DocumentChunk> context;
        for (const auto& entry : it->second) {
            if (context.size() >= cfg.generation.params.context_size) {
                break;
            }
            context.push_back(store.get(entry.chunk_id));
        }
        GenerationRow row;
        for (const auto& chunk : context) {
            row.prompt_chunk_ids.push_back(chunk.chunk_id);
        }
        auto question_started = std::chrono::steady_clock::now();
        try {
            std::string prompt = build_answer_prompt(context, record.question, tmpl);
            GenerationResult result = generate_answer(*client, prompt, cfg.generation.params,
                                                      cfg.generation.refusal_phrases);
            row.answer = result.answer;
            row.is_refusal = result.is_refusal;
            row.seconds = result.latency_seconds;
        } catch (const ServiceError& e) {
            if (cfg.fail_fast) {
                throw;
            }
            row.error = e.what();
            row.seconds = seconds_since(question_started);
        }
        timings[i] = {record.question_id, row.seconds};
        rows[i] = {record.question_id, std::move(row)};
    });

    save_generations(paths.generations(cfg.preset), rows);
    save_timings(paths.generation_timings(cfg.preset), timings);
    record_stage(
        cfg, paths, "generate:" + cfg.preset, seconds_since(started),
        {{"generations:" + cfg.preset, file_hash_hex(paths.generations(cfg.preset))}},
        {{"questions", records.size()}});
}

EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& format) {
    ArtifactPaths paths{cfg.workdir};
    require_artifact(paths.chunks(), "index");
    require_artifact(paths.rankings(cfg.preset), "retrieve");
    require_artifact(paths.generations(cfg.preset), "generate");
    auto started = std::chrono::steady_clock::now();

    std::vector<QaRecord> records = load_qa_dataset(cfg.qa_path, cfg.taxonomy);
    ChunkStore store(load_chunks(paths.chunks()));
    std::map<std::string, RankedList> rankings = load_rankings(paths.rankings(cfg.preset));
    std::map<std::string, GenerationRow> generations =
        load_generations(paths.generations(cfg.preset));

    std::map<std::string, double> retrieval_secs;
    if (std::filesystem::exists(paths.retrieval_timings(cfg.preset))) {
        retrieval_secs = load_timings(paths.retrieval_timings(cfg.preset));
    }
    std::map<std::string, double> generation_secs;
    if (std::filesystem::exists(paths.generation_timings(cfg.preset))) {
        generation_secs = load_timings(paths.generation_timings(cfg.preset));
    }

    std::map<std::string, RetrievalRow> retrievals;
    for (auto& [id, list] : rankings) {
        RetrievalRow row;
        row.list = std::move(list);
        auto it = retrieval_secs.find(id);
        row.seconds = it == retrieval_secs.end() ? 0.0 : it->second;
        retrievals.emplace(id, std::move(row));
    }
    for (auto& [id, row] : generations) {
        auto it = generation_secs.find(id);
        if (it != generation_secs.end()) {
            row.seconds = it->second;
        }
    }

    std::unique_ptr<EmbeddingProvider> provider = make_embedding_provider(cfg);
    EvalOptions options;
    options.config_identity = cfg.identity();
    options.strat_dimensions = cfg.evaluation.strat_dimensions;
    options.full_combination = cfg.evaluation.full_combination;
    EvalReport report = evaluate_run(
        records, retrievals, generations,
        [&](const std::string& id) { return store.parent_of(id); }, *provider, cfg.taxonomy,
        options);

    atomic_write(paths.report_json(cfg.preset), report.to_json().dump(2) + "\n");
    if (format == "md") {
        atomic_write(paths.report_table(cfg.preset, "md"), report.to_markdown());
    } else if (format == "csv") {
        atomic_write(paths.report_table(cfg.preset, "csv"), report.to_csv());
    } else if (format != "json") {
        throw ConfigError("unknown report format \"" + format + "\"");
    }
    record_stage(cfg, paths, "evaluate:" + cfg.preset, seconds_since(started),
                 {{"report:" + cfg.preset, file_hash_hex(paths.report_json(cfg.preset))}});
    return report;
}

std::string cmd_report(const PipelineConfig& cfg, const std::string& format) {
    ArtifactPaths paths{cfg.workdir};
    std::filesystem::path eval_dir = cfg.workdir / "eval";
    if (!std::filesystem::exists(eval_dir)) {
        throw ConfigError("no reports under " + eval_dir.string() + "; run `raglab evaluate` first");
    }
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(eval_dir)) {
        std::string file = entry.path().filename().string();
        const std::string suffix = ".report.json";
        if (file.size() > suffix.size() &&
            file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
            names.push_back(file.substr(0, file.size() - suffix.size()));
        }
    }
    if (names.empty()) {
        throw ConfigError("no reports under " + eval_dir.string() + "; run `raglab evaluate` first");
    }
    // Built-in presets keep their declared order; the rest follow alphabetically.
    auto rank_of = [](const std::string& name) {
        const auto& builtin = builtin_presets();
        for (std::size_t i = 0; i < builtin.size(); ++i) {
            if (builtin[i] == name) {
                return i;
            }
        }
        return builtin.size();
    };
    std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
        std::size_t ra = rank_of(a);
        std::size_t rb = rank_of(b);
        if (ra != rb) {
            return ra < rb;
        }
        return a < b;
    });
    std::vector<EvalReport> reports;
    reports.reserve(names.size());
    for (const auto& name : names) {
        reports.push_back(EvalReport::from_json(load_json_file(paths.report_json(name))));
    }
    std::string table;
    std::string ext;
    if (format == "md") {
        table = markdown_comparison(reports);
        ext = "md";
    } else if (format == "csv") {
        table = csv_comparison(reports);
        ext = "csv";
    } else if (format == "json") {
        json arr = json::array();
        for (const auto& r : reports) {
            arr.push_back(r.to_json());
        }
        table = arr.dump(2) + "\n";
        ext = "json";
    } else {
        throw ConfigError("unknown report format \"" + format + "\"");
    }
    atomic_write(paths.comparison(ext), table);
    return table;
}

} // namespace raglab
