#pragma once

#include <string>

#include "cstar/fullness.hpp"
#include "cstar/ksearch.hpp"
#include "cstar/tower.hpp"

// JSON persistence for the value types that cross the CLI boundary.
//
// Conventions: matrices are { "dim" or "rows"/"cols", "re", "im" } with
// row-major entry arrays; embeddings are { "ambient_dim", "blocks",
// "unit_images" } with 0-based "i.s.t" keys; towers persist their alignment
// unitaries and rebuild unit images on load instead of storing them.

namespace cstar {

std::string to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const std::string& text);

std::string to_json(const SubalgebraEmbedding& emb);
SubalgebraEmbedding embedding_from_json(const std::string& text);

std::string to_json(const FullnessCertificate& cert);
FullnessCertificate certificate_from_json(const std::string& text);

std::string to_json(const EmbeddingReport& report);
std::string to_json(const RelativeFullness& decision);
std::string to_json(const VerifyReport& report);
std::string to_json(const NonOrthReport& report);
std::string to_json(const Intertwiner& iw);

std::string to_json(const Tower& t);
Tower tower_from_json(const std::string& text, const ToleranceConfig& tol = {});

std::string to_json(const SquareReport& report);
std::string to_json(const RegularityReport& report);
std::string to_json(const CorollaryReport& report);
std::string to_json(const PropagationResult& result);
std::string to_json(const ChristensenBudget& budget);

std::string to_json(const SearchResult& result);
SearchResult search_result_from_json(const std::string& text);
std::string to_json(const IntervalResult& result);
std::string to_json(const SpanningResult& result);

/// Evidence rows as CSV with header d,k,status,margin,starts,seed.
std::string interval_evidence_csv(const IntervalResult& result);

}  // namespace cstar
