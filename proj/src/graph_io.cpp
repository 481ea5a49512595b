#include "ranger/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ranger {

namespace {

using json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

json node_to_json(const Node& n) {
    json j;
    j["t"] = "n";
    j["id"] = n.id;
    j["kind"] = to_string(n.kind);
    j["name"] = n.name;
    auto put = [&](const char* key, const std::string& value) {
        if (!value.empty()) j[key] = value;
    };
    put("local_name", n.local_name);
    put("signature", n.signature);
    put("code", n.code);
    put("module_name", n.module_name);
    put("class", n.class_name);
    put("module", n.import_module);
    put("alias", n.import_alias);
    put("dotted_folder_name", n.dotted_folder_name);
    put("importer", n.importer);
    put("description", n.description);
    put("member_descriptions", n.member_descriptions);
    if (n.has_embedding()) j["embedding"] = n.embedding;
    return j;
}

Node node_from_json(const json& j) {
    Node n;
    n.id = j.at("id").get<NodeId>();
    auto kind = node_kind_from(j.at("kind").get<std::string>());
    if (!kind) throw CorruptStream("unknown node kind: " + j.at("kind").get<std::string>());
    n.kind = *kind;
    n.name = j.at("name").get<std::string>();
    auto get = [&](const char* key, std::string& field) {
        if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    get("local_name", n.local_name);
    get("signature", n.signature);
    get("code", n.code);
    get("module_name", n.module_name);
    get("class", n.class_name);
    get("module", n.import_module);
    get("alias", n.import_alias);
    get("dotted_folder_name", n.dotted_folder_name);
    get("importer", n.importer);
    get("description", n.description);
    get("member_descriptions", n.member_descriptions);
    if (j.contains("embedding")) n.embedding = j.at("embedding").get<std::vector<float>>();
    return n;
}

}  // namespace

void serialize(const CodeGraph& graph, std::ostream& out) {
    graph.validate();
    json header;
    header["t"] = "h";
    header["version"] = kFormatVersion;
    header["dim"] = graph.embedding_dim();
    header["frozen"] = graph.frozen();
    header["next_id"] = graph.next_id();
    out << header.dump() << '\n';
    for (NodeId id : graph.node_ids()) {
        out << node_to_json(graph.node(id)).dump() << '\n';
    }
    for (const Edge& e : graph.edges()) {
        json j;
        j["t"] = "e";
        j["src"] = e.src;
        j["dst"] = e.dst;
        j["kind"] = to_string(e.kind);
        out << j.dump() << '\n';
    }
}

std::string serialize(const CodeGraph& graph) {
    std::ostringstream os;
    serialize(graph, os);
    return os.str();
}

void save_graph(const CodeGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    serialize(graph, out);
}

CodeGraph deserialize(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CorruptStream("empty stream");
    json header;
    try {
        header = json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptStream(std::string("bad header: ") + e.what());
    }
    if (header.value("t", "") != "h") throw CorruptStream("missing header line");
    if (header.value("version", -1) != kFormatVersion) {
        throw CorruptStream("unsupported format version");
    }

    CodeGraph graph;
    struct PendingEdge {
        NodeId src, dst;
        EdgeKind kind;
    };
    std::vector<PendingEdge> edges;
    // Node ids in the stream are authoritative; CodeGraph::add_node assigns
    // sequentially, so replay nodes in id order using reserve_ids gaps.
    std::vector<Node> nodes;
    bool saw_edge = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw CorruptStream("line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string t = j.value("t", "");
        if (t == "n") {
            if (saw_edge) throw CorruptStream("node line after edge lines");
            try {
                nodes.push_back(node_from_json(j));
            } catch (const nlohmann::json::exception& e) {
                throw CorruptStream("line " + std::to_string(line_no) + ": " + e.what());
            }
        } else if (t == "e") {
            saw_edge = true;
            try {
                auto kind = edge_kind_from(j.at("kind").get<std::string>());
                if (!kind) throw CorruptStream("unknown edge kind");
                edges.push_back({j.at("src").get<NodeId>(), j.at("dst").get<NodeId>(), *kind});
            } catch (const nlohmann::json::exception& e) {
                throw CorruptStream("line " + std::to_string(line_no) + ": " + e.what());
            }
        } else {
            throw CorruptStream("line " + std::to_string(line_no) + ": unknown record type");
        }
    }

    for (Node& n : nodes) {
        NodeId want = n.id;
        if (want < graph.next_id()) throw CorruptStream("node ids out of order");
        graph.reserve_ids(want);
        NodeId got = graph.add_node(std::move(n));
        if (got != want) throw CorruptStream("node id allocation drift");
    }
    try {
        for (const PendingEdge& e : edges) graph.add_edge(e.src, e.dst, e.kind);
    } catch (const GraphError& e) {
        throw CorruptStream(std::string("bad edge: ") + e.what());
    }
    graph.reserve_ids(header.value("next_id", graph.next_id()));
    graph.restore_embedding_dim(header.value("dim", 0));
    try {
        graph.validate();
    } catch (const GraphError& e) {
        throw CorruptStream(std::string("inconsistent graph: ") + e.what());
    }
    if (header.value("frozen", false)) graph.freeze();
    return graph;
}

CodeGraph deserialize(const std::string& data) {
    std::istringstream is(data);
    return deserialize(is);
}

CodeGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open graph file: " + path.string());
    try {
        return deserialize(in);
    } catch (const CorruptStream& e) {
        throw CorruptStream(path.string() + ": " + e.what());
    }
}

}  // namespace ranger
