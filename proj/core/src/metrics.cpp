#include "hope/metrics.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace hope::metrics {

namespace {

double clamp01(double value) {
    return std::clamp(value, 0.0, 1.0);
}

void warn(const ScoringContext& ctx, std::string code, std::string document_id,
          std::string detail) {
    if (ctx.warnings) {
        ctx.warnings->push_back({std::move(code), std::move(document_id), "", std::move(detail)});
    }
}

const chunkers::Passage* find_passage(const chunkers::PassageSet& passages,
                                      const std::string& id) {
    for (const auto& passage : passages.passages) {
        if (passage.id == id) return &passage;
    }
    return nullptr;
}

std::vector<const chunkers::Passage*> resolve(const chunkers::PassageSet& passages,
                                              const std::vector<std::string>& ids) {
    std::vector<const chunkers::Passage*> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        if (const auto* passage = find_passage(passages, id)) out.push_back(passage);
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Concept unity
// ---------------------------------------------------------------------------

double concept_unity_passage(const ScoringContext& ctx, const chunkers::Passage& passage,
                             ConceptUnityArtifact* artifact) {
    auto statements = llm::generate_statements(ctx.llm, passage, ctx.params.statements_per_passage,
                                               ctx.params.generation_temperature);

    std::vector<embedding::EmbeddingVector> vectors;
    vectors.reserve(statements.size());
    for (const auto& statement : statements) vectors.push_back(ctx.embedder.embed(statement));

    // Full |S| x |S| sum, diagonal self-pairs included.
    const std::size_t count = vectors.size();
    std::vector<std::vector<double>> similarity(count, std::vector<double>(count, 0.0));
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        for (std::size_t i = 0; i < count; ++i) {
            similarity[j][i] = embedding::cosine(vectors[i], vectors[j]);
            sum += similarity[j][i];
        }
    }
    double score = clamp01(sum / static_cast<double>(count * count));

    if (artifact) {
        artifact->passage_id = passage.id;
        artifact->statements = std::move(statements);
        artifact->similarity = std::move(similarity);
        artifact->zeta_con_bar = score;
    }
    return score;
}

double concept_unity(const ScoringContext& ctx, const chunkers::PassageSet& passages,
                     std::vector<ConceptUnityArtifact>* artifacts,
                     std::vector<PassageScore>* per_passage) {
    if (passages.passages.empty()) throw data_error("concept_unity: empty passage set");

    double sum = 0.0;
    std::size_t scored = 0;
    ErrorKind worst = ErrorKind::Data;
    for (std::size_t i = 0; i < passages.passages.size(); ++i) {
        const auto& passage = passages.passages[i];
        if (per_passage && per_passage->size() <= i) per_passage->push_back({passage.id, {}, {}});
        ConceptUnityArtifact artifact;
        try {
            double score = concept_unity_passage(ctx, passage, &artifact);
            sum += score;
            ++scored;
            if (per_passage) (*per_passage)[i].zeta_con_bar = score;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Provider) worst = ErrorKind::Provider;
            warn(ctx, "passage_excluded", passage.document_id,
                 "concept unity skipped for " + passage.id + ": " + e.what());
            continue;
        }
        if (artifacts) artifacts->push_back(std::move(artifact));
    }
    if (scored == 0) {
        // zero scorable passages: escalate, keeping the provider kind so a
        // full outage surfaces as a provider failure
        throw Error(worst, "concept_unity: no scorable passages in document '" +
                               passages.document_id + "'");
    }
    return sum / static_cast<double>(scored);
}

// ---------------------------------------------------------------------------
// Semantic independence
// ---------------------------------------------------------------------------

double semantic_independence_passage(const ScoringContext& ctx, const chunkers::Passage& focus,
                                     const chunkers::PassageSet& passages,
                                     const embedding::VectorIndex& index,
                                     SemanticIndependenceArtifact* artifact) {
    auto questions = llm::generate_questions(ctx.llm, focus, ctx.params.questions_per_passage,
                                             ctx.params.generation_temperature);

    SemanticIndependenceArtifact local;
    local.passage_id = focus.id;
    local.questions = questions;

    double sum = 0.0;
    std::size_t kept = 0;
    for (const auto& question : questions) {
        try {
            std::string closed = llm::answer_closed(ctx.llm, question, focus);
            auto retrieved_ids = embedding::top_k(index, ctx.embedder.embed(question),
                                                  ctx.params.retrieval_k, focus.id);
            auto context = resolve(passages, retrieved_ids);
            std::string rag = llm::answer_rag(ctx.llm, question, focus, context);
            double similarity =
                embedding::cosine(ctx.embedder.embed(closed), ctx.embedder.embed(rag));

            sum += similarity;
            ++kept;
            local.answers_closed.push_back(std::move(closed));
            local.answers_rag.push_back(std::move(rag));
            local.retrieved.push_back(std::move(retrieved_ids));
            local.pair_similarity.push_back(similarity);
        } catch (const Error& e) {
            // drop the pair; the denominator shrinks
            warn(ctx, "answer_pair_dropped", focus.document_id,
                 "question on " + focus.id + " failed: " + e.what());
        }
    }
    if (kept == 0) {
        throw provider_error("semantic independence: no answer pairs survived for passage '" +
                             focus.id + "'");
    }
    double score = clamp01(sum / static_cast<double>(kept));
    local.zeta_sem_bar = score;
    if (artifact) *artifact = std::move(local);
    return score;
}

double semantic_independence(const ScoringContext& ctx, const chunkers::PassageSet& passages,
                             const embedding::VectorIndex& index,
                             std::vector<SemanticIndependenceArtifact>* artifacts,
                             std::vector<PassageScore>* per_passage) {
    if (passages.passages.empty()) throw data_error("semantic_independence: empty passage set");

    double sum = 0.0;
    std::size_t scored = 0;
    ErrorKind worst = ErrorKind::Data;
    for (std::size_t i = 0; i < passages.passages.size(); ++i) {
        const auto& passage = passages.passages[i];
        if (per_passage && per_passage->size() <= i) per_passage->push_back({passage.id, {}, {}});
        SemanticIndependenceArtifact artifact;
        try {
            double score = semantic_independence_passage(ctx, passage, passages, index, &artifact);
            sum += score;
            ++scored;
            if (per_passage) (*per_passage)[i].zeta_sem_bar = score;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Provider) worst = ErrorKind::Provider;
            warn(ctx, "passage_excluded", passage.document_id,
                 "semantic independence skipped for " + passage.id + ": " + e.what());
            continue;
        }
        if (artifacts) artifacts->push_back(std::move(artifact));
    }
    if (scored == 0) {
        throw Error(worst, "semantic_independence: no scorable passages in document '" +
                               passages.document_id + "'");
    }
    return sum / static_cast<double>(scored);
}

// ---------------------------------------------------------------------------
// Information preservation
// ---------------------------------------------------------------------------

InformationPreservationResult information_preservation(const ScoringContext& ctx,
                                                       const corpus::Document& doc,
                                                       const chunkers::PassageSet& passages,
                                                       const embedding::VectorIndex& index,
                                                       std::size_t samples, SeededRng& rng) {
    if (samples < 1) throw usage_error("information_preservation: samples must be >= 1");

    auto segments = corpus::sample_segments(doc, samples, rng, ctx.warnings);

    InformationPreservationResult result;
    result.sampled = segments.size();

    for (const auto& segment : segments) {
        QuadrupleArtifact artifact;
        artifact.segment_id = segment.id();

        auto quadruple =
            llm::generate_quadruple(ctx.llm, segment, ctx.params.generation_temperature,
                                    ctx.warnings);
        if (!quadruple) {
            ++result.skipped;
            artifact.skipped = true;
            result.artifacts.push_back(std::move(artifact));
            continue;
        }
        artifact.quadruple = *quadruple;

        auto retrieved_ids = embedding::top_k(index, ctx.embedder.embed(quadruple->true_statement),
                                              ctx.params.retrieval_k);
        auto context = resolve(passages, retrieved_ids);
        artifact.retrieved = retrieved_ids;

        // shuffle the four options so the right answer holds no fixed letter
        std::array<std::size_t, 4> order{0, 1, 2, 3};
        rng.shuffle(std::span<std::size_t>(order));
        std::array<std::string, 4> options;
        for (std::size_t slot = 0; slot < 4; ++slot) {
            options[slot] = order[slot] == 0 ? quadruple->true_statement
                                             : quadruple->false_statements[order[slot] - 1];
            if (order[slot] == 0) artifact.true_position = static_cast<int>(slot);
        }
        artifact.options.assign(options.begin(), options.end());

        auto outcome = llm::discriminate(ctx.llm, options, context);
        artifact.chosen = outcome.choice;
        artifact.parse_flagged = outcome.parse_flagged;
        if (!outcome.choice) {
            ++result.discrimination_failures;
            warn(ctx, "discrimination_unparsed", doc.id,
                 "segment " + segment.id() + ": no parseable option letter; scored incorrect");
        }
        artifact.correct = outcome.choice && *outcome.choice == artifact.true_position;
        if (artifact.correct) ++result.correct;
        result.artifacts.push_back(std::move(artifact));
    }

    result.scored = result.sampled - result.skipped;
    if (result.scored == 0) {
        throw data_error("information_preservation: every sampled segment was skipped for '" +
                         doc.id + "'");
    }
    result.zeta_inf = static_cast<double>(result.correct) / static_cast<double>(result.scored);
    return result;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

double hope_score(double zeta_con, double zeta_sem, double zeta_inf) {
    for (double value : {zeta_con, zeta_sem, zeta_inf}) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw usage_error("hope_score: inputs must lie in [0, 1]");
        }
    }
    return (zeta_con + zeta_sem + zeta_inf) / 3.0;
}

} // namespace hope::metrics
