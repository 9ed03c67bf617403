#pragma once

// JSON system documents (schema_version 1) and their conversion to systems.

#include "dwellcert/certify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dwellcert {

inline constexpr int kSchemaVersion = 1;

struct DecompositionSpec {
    Vertex vertex = 1;
    Matrix p;
    std::vector<JordanBlock> blocks;
};

struct SystemDocument {
    int dimension = 0;
    std::vector<std::string> names;
    std::vector<Matrix> matrices;
    std::vector<Edge> edges;
    std::vector<DecompositionSpec> decompositions;
    std::optional<double> reconstruction_tolerance;
    IntervalMap intervals;
    EtaMap etas;
    std::optional<SwitchingSignal> signal;
    std::optional<std::uint64_t> seed;
};

/// Throws ParseError on malformed JSON and InvalidArgument on schema problems.
[[nodiscard]] SystemDocument parse_document(const std::string& text);
[[nodiscard]] SystemDocument document_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json document_to_json(const SystemDocument& doc);

[[nodiscard]] SwitchGraph document_graph(const SystemDocument& doc);
/// Supplied decompositions are checked against their matrix; the rest are computed.
[[nodiscard]] SwitchedSystem build_system(const SystemDocument& doc);

/// Replaces decompositions with those of `system` (every vertex).
void store_decompositions(SystemDocument& doc, const SwitchedSystem& system);

[[nodiscard]] std::uint64_t fnv1a64(const std::string& bytes);
/// 16 hex digits of FNV-1a over the compact canonical JSON dump.
[[nodiscard]] std::string input_digest(const nlohmann::json& canonical);

[[nodiscard]] nlohmann::json matrix_to_json(const Matrix& m);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

}  // namespace dwellcert
