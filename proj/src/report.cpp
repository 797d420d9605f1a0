#include "raglab/report.hpp"

#include <cstdio>

#include "raglab/errors.hpp"
#include "raglab/metrics.hpp"

namespace raglab {

namespace {

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string fmt_pct(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return buf;
}

std::string fmt_secs(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

RetrievalMetrics retrieval_means(const std::vector<const QuestionEval*>& rows) {
    RetrievalMetrics m;
    if (rows.empty()) {
        return m;
    }
    for (const QuestionEval* q : rows) {
        m.map += q->ap;
        m.mrr += q->rr;
        m.ndcg_at_10 += q->ndcg_at_10;
        m.recall_at_1 += q->recall_at_1;
        m.recall_at_10 += q->recall_at_10;
        m.prec_at_1 += q->prec_at_1;
        m.prec_at_10 += q->prec_at_10;
        m.mean_time_seconds += q->retrieval_seconds;
    }
    double n = static_cast<double>(rows.size());
    m.map /= n;
    m.mrr /= n;
    m.ndcg_at_10 /= n;
    m.recall_at_1 /= n;
    m.recall_at_10 /= n;
    m.prec_at_1 /= n;
    m.prec_at_10 /= n;
    m.mean_time_seconds /= n;
    return m;
}

GenerationMetrics generation_means(const std::vector<const QuestionEval*>& rows,
                                   std::size_t* generated_out) {
    GenerationMetrics m;
    std::size_t generated = 0;
    for (const QuestionEval* q : rows) {
        if (!q->has_generation) {
            continue;
        }
        ++generated;
        m.rouge1_recall += q->rouge1_recall;
        m.rouge1_f1 += q->rouge1_f1;
        m.rougeL_recall += q->rougeL_recall;
        m.rougeL_f1 += q->rougeL_f1;
        m.bleu += q->bleu;
        m.cosine_sim += q->cosine_sim;
        if (q->is_refusal) {
            m.refusal_rate += 1.0;
        }
    }
    if (generated_out) {
        *generated_out = generated;
    }
    if (generated == 0) {
        return m;
    }
    double n = static_cast<double>(generated);
    m.rouge1_recall /= n;
    m.rouge1_f1 /= n;
    m.rougeL_recall /= n;
    m.rougeL_f1 /= n;
    m.bleu /= n;
    m.cosine_sim /= n;
    m.refusal_rate /= n;
    return m;
}

json retrieval_to_json(const RetrievalMetrics& m) {
    return json{{"map", m.map},
                {"mrr", m.mrr},
                {"ndcg_at_10", m.ndcg_at_10},
                {"recall_at_1", m.recall_at_1},
                {"recall_at_10", m.recall_at_10},
                {"prec_at_1", m.prec_at_1},
                {"prec_at_10", m.prec_at_10},
                {"mean_time_seconds", m.mean_time_seconds}};
}

RetrievalMetrics retrieval_from_json(const json& j) {
    RetrievalMetrics m;
    m.map = j.at("map").get<double>();
    m.mrr = j.at("mrr").get<double>();
    m.ndcg_at_10 = j.at("ndcg_at_10").get<double>();
    m.recall_at_1 = j.at("recall_at_1").get<double>();
    m.recall_at_10 = j.at("recall_at_10").get<double>();
    m.prec_at_1 = j.at("prec_at_1").get<double>();
    m.prec_at_10 = j.at("prec_at_10").get<double>();
    m.mean_time_seconds = j.at("mean_time_seconds").get<double>();
    return m;
}

json generation_to_json(const GenerationMetrics& m) {
    return json{{"rouge1_recall", m.rouge1_recall},
                {"rouge1_f1", m.rouge1_f1},
                {"rougeL_recall", m.rougeL_recall},
                {"rougeL_f1", m.rougeL_f1},
                {"bleu", m.bleu},
                {"cosine_sim", m.cosine_sim},
                {"refusal_rate", m.refusal_rate}};
}

GenerationMetrics generation_from_json(const json& j) {
    GenerationMetrics m;
    m.rouge1_recall = j.at("rouge1_recall").get<double>();
    m.rouge1_f1 = j.at("rouge1_f1").get<double>();
    m.rougeL_recall = j.at("rougeL_recall").get<double>();
    m.rougeL_f1 = j.at("rougeL_f1").get<double>();
    m.bleu = j.at("bleu").get<double>();
    m.cosine_sim = j.at("cosine_sim").get<double>();
    m.refusal_rate = j.at("refusal_rate").get<double>();
    return m;
}

std::string stratum_label(const StratumReport& s) {
    std::string label;
    for (const auto& [dim, cat] : s.selector) {
        if (!label.empty()) {
            label += " / ";
        }
        label += cat;
    }
    return label;
}

} // namespace

json EvalReport::to_json() const {
    json strata_json = json::array();
    for (const auto& s : strata) {
        json sel = json::object();
        for (const auto& [dim, cat] : s.selector) {
            sel[dim] = cat;
        }
        strata_json.push_back(json{{"dimension", s.dimension},
                                   {"selector", std::move(sel)},
                                   {"size", s.size},
                                   {"n_generated", s.generated},
                                   {"retrieval", retrieval_to_json(s.retrieval)},
                                   {"generation", generation_to_json(s.generation)}});
    }
    json rows = json::array();
    for (const auto& q : per_question) {
        json labels = json::object();
        for (const auto& [dim, cat] : q.labels) {
            labels[dim] = cat;
        }
        json row{{"question_id", q.question_id},
                 {"labels", std::move(labels)},
                 {"ap", q.ap},
                 {"rr", q.rr},
                 {"ndcg_at_10", q.ndcg_at_10},
                 {"recall_at_1", q.recall_at_1},
                 {"recall_at_10", q.recall_at_10},
                 {"prec_at_1", q.prec_at_1},
                 {"prec_at_10", q.prec_at_10},
                 {"retrieval_seconds", q.retrieval_seconds}};
        if (q.has_generation) {
            row["answer"] = q.answer;
            row["is_refusal"] = q.is_refusal;
            row["rouge1_recall"] = q.rouge1_recall;
            row["rouge1_f1"] = q.rouge1_f1;
            row["rougeL_recall"] = q.rougeL_recall;
            row["rougeL_f1"] = q.rougeL_f1;
            row["bleu"] = q.bleu;
            row["cosine_sim"] = q.cosine_sim;
            row["generation_seconds"] = q.generation_seconds;
        } else {
            row["error"] = q.error;
        }
        rows.push_back(std::move(row));
    }
    return json{
        {"config_identity", config_identity},
        {"n_questions", n_questions},
        {"n_generated", n_generated},
        {"notes",
         {{"rouge_headline", "recall"},
          {"bleu_smoothing", "epsilon 1e-9 on zero n-gram counts; orders the candidate is "
                             "too short to form count as precision 1"},
          {"precision_at_k", "fixed denominator k"}}},
        {"overall",
         {{"retrieval", retrieval_to_json(retrieval)},
          {"generation", generation_to_json(generation)}}},
        {"strata", std::move(strata_json)},
        {"per_question", std::move(rows)},
        {"timing",
         {{"mean_retrieval_seconds", retrieval.mean_time_seconds},
          {"mean_generation_seconds", mean_generation_seconds},
          {"mean_total_seconds", mean_total_seconds}}}};
}

EvalReport EvalReport::from_json(const json& j) {
    EvalReport report;
    report.config_identity = j.at("config_identity").get<std::string>();
    report.n_questions = j.at("n_questions").get<std::size_t>();
    report.n_generated = j.at("n_generated").get<std::size_t>();
    report.retrieval = retrieval_from_json(j.at("overall").at("retrieval"));
    report.generation = generation_from_json(j.at("overall").at("generation"));
    for (const auto& s : j.at("strata")) {
        StratumReport stratum;
        stratum.dimension = s.at("dimension").get<std::string>();
        for (const auto& [dim, cat] : s.at("selector").items()) {
            stratum.selector[dim] = cat.get<std::string>();
        }
        stratum.size = s.at("size").get<std::size_t>();
        stratum.generated = s.at("n_generated").get<std::size_t>();
        stratum.retrieval = retrieval_from_json(s.at("retrieval"));
        stratum.generation = generation_from_json(s.at("generation"));
        report.strata.push_back(std::move(stratum));
    }
    for (const auto& row : j.at("per_question")) {
        QuestionEval q;
        q.question_id = row.at("question_id").get<std::string>();
        for (const auto& [dim, cat] : row.at("labels").items()) {
            q.labels[dim] = cat.get<std::string>();
        }
        q.ap = row.at("ap").get<double>();
        q.rr = row.at("rr").get<double>();
        q.ndcg_at_10 = row.at("ndcg_at_10").get<double>();
        q.recall_at_1 = row.at("recall_at_1").get<double>();
        q.recall_at_10 = row.at("recall_at_10").get<double>();
        q.prec_at_1 = row.at("prec_at_1").get<double>();
        q.prec_at_10 = row.at("prec_at_10").get<double>();
        q.retrieval_seconds = row.at("retrieval_seconds").get<double>();
        if (row.contains("error")) {
            q.has_generation = false;
            q.error = row.at("error").get<std::string>();
        } else {
            q.has_generation = true;
            q.answer = row.at("answer").get<std::string>();
            q.is_refusal = row.at("is_refusal").get<bool>();
            q.rouge1_recall = row.at("rouge1_recall").get<double>();
            q.rouge1_f1 = row.at("rouge1_f1").get<double>();
            q.rougeL_recall = row.at("rougeL_recall").get<double>();
            q.rougeL_f1 = row.at("rougeL_f1").get<double>();
            q.bleu = row.at("bleu").get<double>();
            q.cosine_sim = row.at("cosine_sim").get<double>();
            q.generation_seconds = row.at("generation_seconds").get<double>();
        }
        report.per_question.push_back(std::move(q));
    }
    report.mean_generation_seconds = j.at("timing").at("mean_generation_seconds").get<double>();
    report.mean_total_seconds = j.at("timing").at("mean_total_seconds").get<double>();
    return report;
}

std::string EvalReport::to_markdown() const {
    std::string out;
    out += "# Evaluation report\n\n";
    out += "Config: " + config_identity + "\n";
    out += "Questions: " + std::to_string(n_questions) + " (answers generated: " +
           std::to_string(n_generated) + ")\n\n";

    out += "## Retrieval\n\n";
    out += "| Config | MAP | Recip. Rank | nDCG@10 | R@1 | R@10 | P@1 | P@10 | Time (s) |\n";
    out += "|---|---|---|---|---|---|---|---|---|\n";
    out += "| " + config_identity + " | " + fmt3(retrieval.map) + " | " + fmt3(retrieval.mrr) +
           " | " + fmt3(retrieval.ndcg_at_10) + " | " + fmt3(retrieval.recall_at_1) + " | " +
           fmt3(retrieval.recall_at_10) + " | " + fmt3(retrieval.prec_at_1) + " | " +
           fmt3(retrieval.prec_at_10) + " | " + fmt_secs(retrieval.mean_time_seconds) + " |\n\n";
    out += "Time (s) is the mean wall-clock retrieval time per question.\n\n";

    out += "## Generation\n\n";
    out += "| Config | ROUGE-1 (recall) | ROUGE-L (recall) | BLEU | Cos. Sim. | % Refusal | "
           "Time (s) |\n";
    out += "|---|---|---|---|---|---|---|\n";
    out += "| " + config_identity + " | " + fmt3(generation.rouge1_recall) + " | " +
           fmt3(generation.rougeL_recall) + " | " + fmt3(generation.bleu) + " | " +
           fmt3(generation.cosine_sim) + " | " + fmt_pct(generation.refusal_rate) + " | " +
           fmt_secs(mean_generation_seconds) + " |\n\n";
    out += "ROUGE columns show recall; F1 values are in the JSON report. BLEU uses epsilon "
           "smoothing (1e-9 on zero counts). Time (s) is the mean wall-clock generation time "
           "per question.\n";

    if (!strata.empty()) {
        out += "\n## Strata\n\n";
        out += "| Dimension | Stratum | n | MAP | nDCG@10 | ROUGE-1 (recall) | ROUGE-L "
               "(recall) | BLEU | Cos. Sim. | % Refusal |\n";
        out += "|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& s : strata) {
            std::string dim = s.dimension.empty() ? "combination" : s.dimension;
            out += "| " + dim + " | " + stratum_label(s) + " | " + std::to_string(s.size) +
                   " | " + fmt3(s.retrieval.map) + " | " + fmt3(s.retrieval.ndcg_at_10) +
                   " | " + fmt3(s.generation.rouge1_recall) + " | " +
                   fmt3(s.generation.rougeL_recall) + " | " + fmt3(s.generation.bleu) + " | " +
                   fmt3(s.generation.cosine_sim) + " | " + fmt_pct(s.generation.refusal_rate) +
                   " |\n";
        }
    }
    return out;
}

namespace {

const char* kCsvHeader =
    "scope,dimension,stratum,n,n_generated,map,mrr,ndcg_at_10,recall_at_1,recall_at_10,"
    "prec_at_1,prec_at_10,mean_time_seconds,rouge1_recall,rouge1_f1,rougeL_recall,rougeL_f1,"
    "bleu,cosine_sim,refusal_rate\n";

std::string csv_metric_row(const std::string& scope, const std::string& dimension,
                           const std::string& stratum, std::size_t n, std::size_t generated,
                           const RetrievalMetrics& r, const GenerationMetrics& g) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                  "%.6f,%.6f",
                  n, generated, r.map, r.mrr, r.ndcg_at_10, r.recall_at_1, r.recall_at_10,
                  r.prec_at_1, r.prec_at_10, r.mean_time_seconds, g.rouge1_recall, g.rouge1_f1,
                  g.rougeL_recall, g.rougeL_f1, g.bleu, g.cosine_sim, g.refusal_rate);
    return csv_field(scope) + "," + csv_field(dimension) + "," + csv_field(stratum) + "," + buf +
           "\n";
}

} // namespace

std::string EvalReport::to_csv() const {
    std::string out = kCsvHeader;
    out += csv_metric_row(config_identity, "", "overall", n_questions, n_generated, retrieval,
                          generation);
    for (const auto& s : strata) {
        out += csv_metric_row(config_identity, s.dimension.empty() ? "combination" : s.dimension,
                              stratum_label(s), s.size, s.generated, s.retrieval, s.generation);
    }
    return out;
}

EvalReport evaluate_run(const std::vector<QaRecord>& records,
                        const std::map<std::string, RetrievalRow>& retrievals,
                        const std::map<std::string, GenerationRow>& generations,
                        const std::function<std::string(const std::string&)>& chunk_parent,
                        const EmbeddingProvider& sim_provider,
                        const CategoryTaxonomy& taxonomy, const EvalOptions& options) {
    std::vector<std::string> missing;
    for (const auto& record : records) {
        if (!retrievals.count(record.question_id) || !generations.count(record.question_id)) {
            missing.push_back(record.question_id);
        }
    }
    if (!missing.empty()) {
        std::string msg = "evaluation inputs missing " + std::to_string(missing.size()) +
                          " question(s):";
        for (const auto& id : missing) {
            msg += " " + id;
        }
        throw CompletenessError(msg, missing);
    }

    EvalReport report;
    report.config_identity = options.config_identity;
    report.n_questions = records.size();

    for (const auto& record : records) {
        const RetrievalRow& retrieval = retrievals.at(record.question_id);
        const GenerationRow& generation = generations.at(record.question_id);

        QuestionEval q;
        q.question_id = record.question_id;
        q.labels = record.labels;

        std::vector<std::string> doc_ranking = to_doc_ranking(retrieval.list, chunk_parent);
        std::set<std::string> relevant(record.gold_doc_ids.begin(), record.gold_doc_ids.end());
        q.ap = average_precision(doc_ranking, relevant);
        q.rr = reciprocal_rank(doc_ranking, relevant);
        q.ndcg_at_10 = ndcg_at_k(doc_ranking, relevant, 10);
        q.recall_at_1 = recall_at_k(doc_ranking, relevant, 1);
        q.recall_at_10 = recall_at_k(doc_ranking, relevant, 10);
        q.prec_at_1 = precision_at_k(doc_ranking, relevant, 1);
        q.prec_at_10 = precision_at_k(doc_ranking, relevant, 10);
        q.retrieval_seconds = retrieval.seconds;

        if (generation.error.empty()) {
            q.has_generation = true;
            q.answer = generation.answer;
            q.is_refusal = generation.is_refusal;
            RougeScore r1 = rouge_n(q.answer, record.gold_answer, 1);
            q.rouge1_recall = r1.recall;
            q.rouge1_f1 = r1.f1;
            RougeScore rl = rouge_l(q.answer, record.gold_answer);
            q.rougeL_recall = rl.recall;
            q.rougeL_f1 = rl.f1;
            q.bleu = bleu(q.answer, record.gold_answer);
            q.cosine_sim = semantic_similarity(q.answer, record.gold_answer, sim_provider);
            q.generation_seconds = generation.seconds;
        } else {
            q.error = generation.error;
        }
        report.per_question.push_back(std::move(q));
    }

    std::map<std::string, const QuestionEval*> by_id;
    std::vector<const QuestionEval*> all_rows;
    for (const auto& q : report.per_question) {
        by_id[q.question_id] = &q;
        all_rows.push_back(&q);
    }
    report.retrieval = retrieval_means(all_rows);
    report.generation = generation_means(all_rows, &report.n_generated);

    double gen_seconds = 0.0;
    for (const auto& q : report.per_question) {
        if (q.has_generation) {
            gen_seconds += q.generation_seconds;
        }
    }
    report.mean_generation_seconds =
        report.n_generated ? gen_seconds / static_cast<double>(report.n_generated) : 0.0;
    report.mean_total_seconds = report.retrieval.mean_time_seconds +
                                report.mean_generation_seconds;

    auto add_strata = [&](const std::vector<Stratum>& strata, const std::string& dimension) {
        for (const auto& stratum : strata) {
            StratumReport sr;
            sr.dimension = dimension;
            sr.selector = stratum.selector;
            sr.size = stratum.record_ids.size();
            std::vector<const QuestionEval*> rows;
            rows.reserve(stratum.record_ids.size());
            for (const auto& id : stratum.record_ids) {
                rows.push_back(by_id.at(id));
            }
            sr.retrieval = retrieval_means(rows);
            sr.generation = generation_means(rows, &sr.generated);
            report.strata.push_back(std::move(sr));
        }
    };
    for (const auto& dimension : options.strat_dimensions) {
        add_strata(stratify(records, taxonomy, dimension), dimension);
    }
    if (options.full_combination) {
        add_strata(stratify_full_combination(records, taxonomy), "");
    }
    return report;
}

std::string markdown_comparison(const std::vector<EvalReport>& reports) {
    std::string out;
    out += "# Evaluation comparison\n\n";
    out += "## Retrieval\n\n";
    out += "| Config | MAP | Recip. Rank | nDCG@10 | R@1 | R@10 | P@1 | P@10 | Time (s) |\n";
    out += "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        out += "| " + r.config_identity + " | " + fmt3(r.retrieval.map) + " | " +
               fmt3(r.retrieval.mrr) + " | " + fmt3(r.retrieval.ndcg_at_10) + " | " +
               fmt3(r.retrieval.recall_at_1) + " | " + fmt3(r.retrieval.recall_at_10) + " | " +
               fmt3(r.retrieval.prec_at_1) + " | " + fmt3(r.retrieval.prec_at_10) + " | " +
               fmt_secs(r.retrieval.mean_time_seconds) + " |\n";
    }
    out += "\n## Generation\n\n";
    out += "| Config | ROUGE-1 (recall) | ROUGE-L (recall) | BLEU | Cos. Sim. | % Refusal | "
           "Time (s) |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const auto& r : reports) {
        out += "| " + r.config_identity + " | " + fmt3(r.generation.rouge1_recall) + " | " +
               fmt3(r.generation.rougeL_recall) + " | " + fmt3(r.generation.bleu) + " | " +
               fmt3(r.generation.cosine_sim) + " | " + fmt_pct(r.generation.refusal_rate) +
               " | " + fmt_secs(r.mean_generation_seconds) + " |\n";
    }
    out += "\nROUGE columns show recall; F1 values are in the per-config JSON reports.\n";
    return out;
}

std::string csv_comparison(const std::vector<EvalReport>& reports) {
    std::string out = kCsvHeader;
    for (const auto& r : reports) {
        out += csv_metric_row(r.config_identity, "", "overall", r.n_questions, r.n_generated,
                              r.retrieval, r.generation);
    }
    return out;
}

} // namespace raglab
