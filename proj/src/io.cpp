#include "dwellcert/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace dwellcert {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema_error(where + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) schema_error(what + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& what) {
    if (!j.is_number_integer()) schema_error(what + " must be an integer");
    return j.get<int>();
}

Edge edge_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) schema_error(what + " must be a pair [from, to]");
    return {integer(j[0], what), integer(j[1], what)};
}

json edge_to_json(Edge e) { return json::array({e.from, e.to}); }

std::vector<double> number_list(const json& j, const std::string& what) {
    if (!j.is_array()) schema_error(what + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

BlockKind kind_from_string(const std::string& s) {
    if (s == "real") return BlockKind::Real;
    if (s == "complex") return BlockKind::ComplexPair;
    if (s == "defective") return BlockKind::Defective;
    schema_error("unknown block kind \"" + s + "\"");
}

const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::Real: return "real";
        case BlockKind::ComplexPair: return "complex";
        case BlockKind::Defective: return "defective";
    }
    return "real";
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) schema_error(where + ": unknown key \"" + key + "\"");
    }
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) schema_error(what + " must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) schema_error(what + " must be square");
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = number(row[static_cast<std::size_t>(k)], what);
    }
    return m;
}

SystemDocument document_from_json(const json& j) {
    if (!j.is_object()) schema_error("document must be a JSON object");
    check_keys(j,
               {"schema_version", "dimension", "matrices", "edges", "decompositions", "reconstruction_tolerance",
                "intervals", "etas", "signal", "seed", "description"},
               "document");
    if (integer(require(j, "schema_version", "document"), "schema_version") != kSchemaVersion) {
        schema_error("unsupported schema_version");
    }
    SystemDocument doc;
    doc.dimension = integer(require(j, "dimension", "document"), "dimension");
    if (doc.dimension < 1 || doc.dimension > kMaxDimension) schema_error("dimension out of range");

    const auto& mats = require(j, "matrices", "document");
    if (!mats.is_array() || mats.empty()) schema_error("matrices must be a non-empty array");
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const auto& entry = mats[i];
        const std::string where = "matrices[" + std::to_string(i) + "]";
        if (entry.is_object()) {
            check_keys(entry, {"name", "data"}, where);
            doc.names.push_back(entry.contains("name") ? entry.at("name").get<std::string>() : "A" + std::to_string(i + 1));
            doc.matrices.push_back(matrix_from_json(require(entry, "data", where), where));
        } else {
            doc.names.push_back("A" + std::to_string(i + 1));
            doc.matrices.push_back(matrix_from_json(entry, where));
        }
        if (doc.matrices.back().rows() != doc.dimension) schema_error(where + " does not match dimension");
    }

    const auto& edges = require(j, "edges", "document");
    if (!edges.is_array()) schema_error("edges must be an array");
    for (const auto& e : edges) doc.edges.push_back(edge_from_json(e, "edge"));

    if (j.contains("decompositions")) {
        for (const auto& d : j.at("decompositions")) {
            check_keys(d, {"vertex", "P", "blocks"}, "decomposition");
            DecompositionSpec spec;
            spec.vertex = integer(require(d, "vertex", "decomposition"), "vertex");
            spec.p = matrix_from_json(require(d, "P", "decomposition"), "P");
            for (const auto& b : require(d, "blocks", "decomposition")) {
                check_keys(b, {"kind", "lambda", "mu", "size"}, "block");
                JordanBlock block;
                block.kind = kind_from_string(require(b, "kind", "block").get<std::string>());
                block.lambda = number(require(b, "lambda", "block"), "lambda");
                block.mu = b.contains("mu") ? number(b.at("mu"), "mu") : 0.0;
                block.size = b.contains("size") ? integer(b.at("size"), "size")
                                                : (block.kind == BlockKind::Real ? 1 : 2);
                spec.blocks.push_back(block);
            }
            doc.decompositions.push_back(std::move(spec));
        }
    }
    if (j.contains("reconstruction_tolerance")) {
        doc.reconstruction_tolerance = number(j.at("reconstruction_tolerance"), "reconstruction_tolerance");
        if (!(*doc.reconstruction_tolerance > 0.0)) schema_error("reconstruction_tolerance must be positive");
    }
    if (j.contains("intervals")) {
        for (const auto& entry : j.at("intervals")) {
            check_keys(entry, {"edge", "interval"}, "interval entry");
            const Edge e = edge_from_json(require(entry, "edge", "interval entry"), "interval edge");
            const auto bounds = number_list(require(entry, "interval", "interval entry"), "interval");
            if (bounds.size() != 2) schema_error("interval must be [lo, hi]");
            doc.intervals[e] = {bounds[0], bounds[1]};
        }
    }
    if (j.contains("etas")) {
        for (const auto& entry : j.at("etas")) {
            check_keys(entry, {"edge", "eta"}, "eta entry");
            doc.etas[edge_from_json(require(entry, "edge", "eta entry"), "eta edge")] =
                number(require(entry, "eta", "eta entry"), "eta");
        }
    }
    if (j.contains("signal")) {
        const auto& s = j.at("signal");
        check_keys(s, {"path", "dwells", "times"}, "signal");
        SwitchingSignal signal;
        for (const auto& v : require(s, "path", "signal")) signal.path.push_back(integer(v, "signal path"));
        if (s.contains("dwells") && s.contains("times")) schema_error("signal takes either dwells or times");
        if (s.contains("dwells")) {
            signal = signal_from_dwells(std::move(signal.path), number_list(s.at("dwells"), "dwells"));
        } else if (s.contains("times")) {
            signal.switch_times = number_list(s.at("times"), "times");
        }
        doc.signal = std::move(signal);
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) schema_error("seed must be a non-negative integer");
        doc.seed = j.at("seed").get<std::uint64_t>();
    }
    return doc;
}

SystemDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    try {
        return document_from_json(j);
    } catch (const json::exception& e) {
        schema_error(e.what());
    }
}

json document_to_json(const SystemDocument& doc) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["dimension"] = doc.dimension;
    j["matrices"] = json::array();
    for (std::size_t i = 0; i < doc.matrices.size(); ++i) {
        j["matrices"].push_back({{"name", doc.names.at(i)}, {"data", matrix_to_json(doc.matrices[i])}});
    }
    j["edges"] = json::array();
    for (const auto& e : doc.edges) j["edges"].push_back(edge_to_json(e));
    if (!doc.decompositions.empty()) {
        j["decompositions"] = json::array();
        for (const auto& d : doc.decompositions) {
            json blocks = json::array();
            for (const auto& b : d.blocks) {
                json jb{{"kind", kind_name(b.kind)}, {"lambda", b.lambda}};
                if (b.kind == BlockKind::ComplexPair) jb["mu"] = b.mu;
                if (b.kind == BlockKind::Defective) jb["size"] = b.size;
                blocks.push_back(std::move(jb));
            }
            j["decompositions"].push_back({{"vertex", d.vertex}, {"P", matrix_to_json(d.p)}, {"blocks", blocks}});
        }
    }
    if (doc.reconstruction_tolerance) j["reconstruction_tolerance"] = *doc.reconstruction_tolerance;
    if (!doc.intervals.empty()) {
        j["intervals"] = json::array();
        for (const auto& [e, iv] : doc.intervals) {
            j["intervals"].push_back({{"edge", edge_to_json(e)}, {"interval", {iv.lo, iv.hi}}});
        }
    }
    if (!doc.etas.empty()) {
        j["etas"] = json::array();
        for (const auto& [e, eta] : doc.etas) j["etas"].push_back({{"edge", edge_to_json(e)}, {"eta", eta}});
    }
    if (doc.signal) j["signal"] = {{"path", doc.signal->path}, {"times", doc.signal->switch_times}};
    if (doc.seed) j["seed"] = *doc.seed;
    return j;
}

SwitchGraph document_graph(const SystemDocument& doc) {
    return SwitchGraph(static_cast<int>(doc.matrices.size()), doc.edges);
}

SwitchedSystem build_system(const SystemDocument& doc) {
    SwitchGraph graph = document_graph(doc);
    const auto k = doc.matrices.size();
    std::vector<std::optional<SpectralDecomposition>> slots(k);
    const double tol = doc.reconstruction_tolerance.value_or(kDefaultReconstructionTolerance);
    for (const auto& d : doc.decompositions) {
        if (!graph.contains_vertex(d.vertex)) schema_error("decomposition for unknown vertex " + std::to_string(d.vertex));
        auto& slot = slots[static_cast<std::size_t>(d.vertex - 1)];
        if (slot) schema_error("duplicate decomposition for vertex " + std::to_string(d.vertex));
        slot = decomposition_from_parts(d.p, d.blocks, doc.matrices[static_cast<std::size_t>(d.vertex - 1)], tol);
    }
    std::vector<SpectralDecomposition> decompositions;
    for (std::size_t i = 0; i < k; ++i) {
        decompositions.push_back(slots[i] ? std::move(*slots[i]) : real_jordan(doc.matrices[i]));
    }
    for (const auto& [e, iv] : doc.intervals) {
        if (!graph.has_edge(e)) throw Error(ErrorCode::NotAnEdge, "interval given for non-edge " + to_string(e));
    }
    for (const auto& [e, eta] : doc.etas) {
        if (!graph.has_edge(e)) throw Error(ErrorCode::NotAnEdge, "eta given for non-edge " + to_string(e));
    }
    return SwitchedSystem(std::move(graph), doc.matrices, std::move(decompositions));
}

void store_decompositions(SystemDocument& doc, const SwitchedSystem& system) {
    doc.decompositions.clear();
    for (Vertex v = 1; v <= system.vertex_count(); ++v) {
        const auto& d = system.decomposition(v);
        doc.decompositions.push_back({v, d.P(), d.blocks()});
    }
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string input_digest(const json& canonical) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
    return buf;
}

}  // namespace dwellcert
