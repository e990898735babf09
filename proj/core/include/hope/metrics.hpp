#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hope/chunkers.hpp"
#include "hope/corpus.hpp"
#include "hope/embedding.hpp"
#include "hope/errors.hpp"
#include "hope/llm.hpp"
#include "hope/rng.hpp"

namespace hope::metrics {

struct MetricParams {
    std::size_t statements_per_passage = 5;
    std::size_t questions_per_passage = 5;
    std::size_t segments_per_document = 20;
    std::size_t retrieval_k = 3;
    double generation_temperature = 0.7; // statements / questions / quadruples
};

/// Everything the scoring functions need: providers, parameters, and a
/// warning sink. Providers are expected to be cache-wrapped by the caller.
struct ScoringContext {
    llm::LlmProvider& llm;
    embedding::Embedder& embedder;
    MetricParams params;
    WarningLog* warnings = nullptr;
};

// --------------------------------------------------------------------------
// Per-passage artifacts. Everything needed to audit or recompute a score
// without provider calls.
// --------------------------------------------------------------------------

struct ConceptUnityArtifact {
    std::string passage_id;
    std::vector<std::string> statements;
    std::vector<std::vector<double>> similarity; // |S| x |S|, diagonal included
    double zeta_con_bar = 0.0;
};

struct SemanticIndependenceArtifact {
    std::string passage_id;
    std::vector<std::string> questions;
    std::vector<std::string> answers_closed;           // a*, aligned with questions
    std::vector<std::string> answers_rag;              // a
    std::vector<std::vector<std::string>> retrieved;   // P_q ids per question
    std::vector<double> pair_similarity;               // theta(a*, a) per kept pair
    double zeta_sem_bar = 0.0;
};

struct QuadrupleArtifact {
    std::string segment_id;
    llm::Quadruple quadruple;
    std::vector<std::string> options;      // shuffled order as prompted
    int true_position = -1;                // index of s_t within options
    std::vector<std::string> retrieved;    // P_{s_t} ids
    std::optional<int> chosen;             // nullopt: unparseable response
    bool correct = false;
    bool parse_flagged = false;
    bool skipped = false;                  // quadruple generation failed
};

struct PassageScore {
    std::string passage_id;
    std::optional<double> zeta_con_bar; // nullopt: generation failed, excluded
    std::optional<double> zeta_sem_bar;
};

struct ScoreCounts {
    std::size_t passages = 0;
    std::size_t questions = 0;
    std::size_t quadruples = 0; // successfully generated
    std::size_t segments_skipped = 0;
    std::size_t discrimination_failures = 0;
};

struct CorpusScore {
    std::string document_id;
    std::string chunker_id;
    double zeta_con = 0.0;
    double zeta_sem = 0.0;
    double zeta_inf = 0.0;
    double hope = 0.0;
    ScoreCounts counts;
};

// --------------------------------------------------------------------------
// Concept unity (intrinsic level)
// --------------------------------------------------------------------------

/// Mean pairwise cosine over the full |S| x |S| statement matrix, diagonal
/// included, negatives clamped to zero.
double concept_unity_passage(const ScoringContext& ctx, const chunkers::Passage& passage,
                             ConceptUnityArtifact* artifact = nullptr);

/// Mean of per-passage scores; passages whose statement generation failed
/// are excluded with a warning. Zero scorable passages is an error.
double concept_unity(const ScoringContext& ctx, const chunkers::PassageSet& passages,
                     std::vector<ConceptUnityArtifact>* artifacts = nullptr,
                     std::vector<PassageScore>* per_passage = nullptr);

// --------------------------------------------------------------------------
// Semantic independence (extrinsic level)
// --------------------------------------------------------------------------

/// For each question about the focus passage, compares the closed-book
/// answer (focus only) against the RAG answer (focus plus top-k retrieved
/// siblings, the focus itself excluded from retrieval). Mean pair cosine,
/// clamped to [0, 1].
double semantic_independence_passage(const ScoringContext& ctx, const chunkers::Passage& focus,
                                     const chunkers::PassageSet& passages,
                                     const embedding::VectorIndex& index,
                                     SemanticIndependenceArtifact* artifact = nullptr);

double semantic_independence(const ScoringContext& ctx, const chunkers::PassageSet& passages,
                             const embedding::VectorIndex& index,
                             std::vector<SemanticIndependenceArtifact>* artifacts = nullptr,
                             std::vector<PassageScore>* per_passage = nullptr);

// --------------------------------------------------------------------------
// Information preservation (set level)
// --------------------------------------------------------------------------

struct InformationPreservationResult {
    double zeta_inf = 0.0;
    std::size_t sampled = 0; // segments drawn
    std::size_t scored = 0;  // quadruples generated (the denominator)
    std::size_t correct = 0;
    std::size_t skipped = 0;
    std::size_t discrimination_failures = 0;
    std::vector<QuadrupleArtifact> artifacts;
};

/// Samples segments, builds quadruples, retrieves top-k passages for each
/// true statement, shuffles the four options, and asks the judge. Binary
/// scoring; skipped segments leave the denominator. All segments skipped is
/// an error.
InformationPreservationResult information_preservation(const ScoringContext& ctx,
                                                       const corpus::Document& doc,
                                                       const chunkers::PassageSet& passages,
                                                       const embedding::VectorIndex& index,
                                                       std::size_t samples, SeededRng& rng);

// --------------------------------------------------------------------------
// Aggregation
// --------------------------------------------------------------------------

/// HOPE = (zeta_con + zeta_sem + zeta_inf) / 3. Inputs must be in [0, 1].
double hope_score(double zeta_con, double zeta_sem, double zeta_inf);

} // namespace hope::metrics
