#include "ranger/source.hpp"

namespace ranger {

std::string module_name_for_path(std::string_view rel_path) {
    std::string p(rel_path);
    for (char& c : p) {
        if (c == '\\') c = '/';
    }
    if (p.size() > 3 && p.ends_with(".py")) p.resize(p.size() - 3);
    if (p.ends_with("/__init__") || p == "__init__") {
        p.resize(p.size() >= 9 ? p.size() - 9 : 0);
        if (p.ends_with('/')) p.pop_back();
    }
    for (char& c : p) {
        if (c == '/') c = '.';
    }
    return p;
}

std::string slice_lines(std::string_view text, Span span) {
    if (span.start <= 0 || span.end < span.start) return "";
    int line = 1;
    std::size_t begin = std::string_view::npos;
    std::size_t end = text.size();
    if (span.start == 1) begin = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\n') continue;
        ++line;
        if (line == span.start) begin = i + 1;
        if (line == span.end + 1) {
            end = i;
            break;
        }
    }
    if (begin == std::string_view::npos) return "";
    if (end < begin) return "";
    std::string out(text.substr(begin, end - begin));
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return out;
}

std::string ImportRecord::binding() const {
    if (!alias.empty()) return alias;
    if (is_plain()) {
        auto dot = name.find('.');
        return dot == std::string::npos ? name : name.substr(0, dot);
    }
    return name;
}

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view ref_kind_name(RefKind k) {
    return k == RefKind::Uses ? "uses" : "inherits";
}

}  // namespace

json FileTransfer::to_json() const {
    json j;
    j["source"] = {{"path", source.path}, {"module_name", source.module_name}};
    j["entities"] = json::array();
    for (const EntityRecord& e : entities) {
        json je;
        je["kind"] = to_string(e.kind);
        je["name"] = e.name;
        je["signature"] = e.signature;
        je["code"] = e.code;
        je["module_name"] = e.module_name;
        if (!e.class_name.empty()) je["class_name"] = e.class_name;
        je["span"] = {e.span.start, e.span.end};
        je["qualified"] = e.qualified;
        j["entities"].push_back(std::move(je));
    }
    j["relations"] = json::array();
    for (const Relation& r : relations) {
        j["relations"].push_back({r.src_key, to_string(r.kind), r.dst_key});
    }
    j["imports"] = json::array();
    for (const ImportRecord& im : imports) {
        json ji;
        ji["name"] = im.name;
        ji["module"] = im.module;
        if (!im.alias.empty()) ji["alias"] = im.alias;
        if (!im.dotted_folder_name.empty()) ji["dotted_folder_name"] = im.dotted_folder_name;
        j["imports"].push_back(std::move(ji));
    }
    j["uses_refs"] = json::array();
    for (const UsesRef& u : uses_refs) {
        j["uses_refs"].push_back({u.src_key, u.name, ref_kind_name(u.kind)});
    }
    return j;
}

FileTransfer FileTransfer::from_json(const nlohmann::json& j) {
    FileTransfer t;
    t.source.path = j.at("source").at("path").get<std::string>();
    t.source.module_name = j.at("source").at("module_name").get<std::string>();
    for (const auto& je : j.at("entities")) {
        EntityRecord e;
        auto kind = node_kind_from(je.at("kind").get<std::string>());
        if (!kind) throw std::runtime_error("bad entity kind in transfer");
        e.kind = *kind;
        e.name = je.at("name").get<std::string>();
        e.signature = je.value("signature", "");
        e.code = je.value("code", "");
        e.module_name = je.value("module_name", "");
        e.class_name = je.value("class_name", "");
        e.span = {je.at("span").at(0).get<int>(), je.at("span").at(1).get<int>()};
        e.qualified = je.at("qualified").get<std::string>();
        t.entities.push_back(std::move(e));
    }
    for (const auto& jr : j.at("relations")) {
        auto kind = edge_kind_from(jr.at(1).get<std::string>());
        if (!kind) throw std::runtime_error("bad relation kind in transfer");
        t.relations.push_back({jr.at(0).get<std::string>(), *kind, jr.at(2).get<std::string>()});
    }
    for (const auto& ji : j.at("imports")) {
        ImportRecord im;
        im.name = ji.at("name").get<std::string>();
        im.module = ji.at("module").get<std::string>();
        im.alias = ji.value("alias", "");
        im.dotted_folder_name = ji.value("dotted_folder_name", "");
        t.imports.push_back(std::move(im));
    }
    for (const auto& ju : j.at("uses_refs")) {
        UsesRef u;
        u.src_key = ju.at(0).get<std::string>();
        u.name = ju.at(1).get<std::string>();
        u.kind = ju.at(2).get<std::string>() == "inherits" ? RefKind::Inherits : RefKind::Uses;
        t.uses_refs.push_back(std::move(u));
    }
    return t;
}

}  // namespace ranger
