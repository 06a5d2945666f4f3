/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include "vsync/kb_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vsync/esql/parser.hpp"

namespace vsync::kb_io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& where,
                       const std::string& message, ErrorCode code = ErrorCode::ValidationError) {
    throw Error(code, origin + ": " + where + ": " + message);
}

const json& member(const json& obj, const std::string& key, const std::string& origin,
                   const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        fail(origin, where, "missing required key \"" + key + "\"");
    return obj.at(key);
}

std::string string_member(const json& obj, const std::string& key, const std::string& origin,
                          const std::string& where) {
    const json& value = member(obj, key, origin, where);
    if (!value.is_string()) fail(origin, where, "\"" + key + "\" must be a string");
    return value.get<std::string>();
}

RelationRef parse_relation_ref(const std::string& text, const std::string& origin,
                               const std::string& where) {
    auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size() ||
        text.find('.', dot + 1) != std::string::npos)
        fail(origin, where, "\"" + text + "\" is not a Source.Relation reference");
    return {text.substr(0, dot), text.substr(dot + 1)};
}

esql::Comparator parse_op(const std::string& op, const std::string& origin,
                          const std::string& where) {
    if (op == "=") return esql::Comparator::Eq;
    if (op == "<>") return esql::Comparator::Ne;
    if (op == "<") return esql::Comparator::Lt;
    if (op == "<=") return esql::Comparator::Le;
    if (op == ">") return esql::Comparator::Gt;
    if (op == ">=") return esql::Comparator::Ge;
    fail(origin, where, "unknown comparator \"" + op + "\"");
}

wsmkb::PCSide parse_pc_side(const json& obj, const std::string& origin,
                            const std::string& where) {
    wsmkb::PCSide side;
    side.relation = parse_relation_ref(string_member(obj, "relation", origin, where), origin, where);
    const json& projection = member(obj, "projection", origin, where);
    if (!projection.is_array() || projection.empty())
        fail(origin, where, "\"projection\" must be a nonempty array");
    for (const auto& attr : projection) {
        if (!attr.is_string()) fail(origin, where, "projection entries must be strings");
        side.projection.push_back(attr.get<std::string>());
    }
    if (obj.contains("selection")) {
        const json& selection = obj.at("selection");
        if (!selection.is_array()) fail(origin, where, "\"selection\" must be an array");
        for (const auto& entry : selection) {
            esql::PrimitiveClause clause;
            clause.lhs = esql::AttributeTerm{side.relation.relation_name,
                                             string_member(entry, "attribute", origin, where)};
            clause.op = parse_op(string_member(entry, "op", origin, where), origin, where);
            const json& value = member(entry, "value", origin, where);
            if (value.contains("string"))
                clause.rhs = esql::StringLiteral{value.at("string").get<std::string>()};
            else if (value.contains("number"))
                clause.rhs = esql::NumberLiteral{value.at("number").get<double>()};
            else if (value.contains("date"))
                clause.rhs = esql::DateLiteral{value.at("date").get<std::string>()};
            else
                fail(origin, where, "\"value\" must carry one of string/number/date");
            side.selection.push_back(std::move(clause));
        }
    }
    return side;
}

LoadResult load_document(const json& doc, const std::string& origin) {
    if (!doc.is_object()) fail(origin, "document", "top level must be a JSON object");
    LoadResult result;

    // sources (with attribute types; they induce one TC per relation)
    const json& sources = member(doc, "sources", origin, "document");
    if (!sources.is_array()) fail(origin, "sources", "must be an array");
    std::vector<wsmkb::TypeIntegrityConstraint> tcs;
    for (size_t i = 0; i < sources.size(); ++i) {
        const std::string where = "sources[" + std::to_string(i) + "]";
        const json& src = sources.at(i);
        SourceSchema schema;
        schema.source_id = string_member(src, "id", origin, where);
        const json& relations = member(src, "relations", origin, where);
        if (!relations.is_array()) fail(origin, where, "\"relations\" must be an array");
        for (const auto& rel : relations) {
            RelationSchema relation;
            relation.name = string_member(rel, "name", origin, where);
            wsmkb::TypeIntegrityConstraint tc;
            tc.relation = {schema.source_id, relation.name};
            const json& attrs = member(rel, "attributes", origin, where + "." + relation.name);
            if (!attrs.is_array())
                fail(origin, where + "." + relation.name, "\"attributes\" must be an array");
            for (const auto& attr : attrs) {
                std::string name =
                    string_member(attr, "name", origin, where + "." + relation.name);
                std::string type_text =
                    string_member(attr, "type", origin, where + "." + relation.name);
                auto type = type_domain_from_string(type_text);
                if (!type)
                    fail(origin, where + "." + relation.name + "." + name,
                         "unknown type \"" + type_text + "\" (expected Number, String, or Date)");
                relation.attributes.emplace_back(name, *type);
                tc.typing.emplace(name, *type);
            }
            schema.relations.push_back(std::move(relation));
            tcs.push_back(std::move(tc));
        }
        try {
            result.mkb.add(schema);
        } catch (const Error& e) {
            fail(origin, where, e.what(), e.code());
        }
    }
    for (const auto& tc : tcs) result.mkb.add(tc);

    // join constraints
    if (doc.contains("join_constraints")) {
        const json& jcs = doc.at("join_constraints");
        if (!jcs.is_array()) fail(origin, "join_constraints", "must be an array");
        for (size_t i = 0; i < jcs.size(); ++i) {
            const std::string where = "join_constraints[" + std::to_string(i) + "]";
            const json& entry = jcs.at(i);
            wsmkb::JoinConstraint jc;
            jc.left = parse_relation_ref(string_member(entry, "left", origin, where), origin, where);
            jc.right =
                parse_relation_ref(string_member(entry, "right", origin, where), origin, where);
            const json& equalities = member(entry, "equalities", origin, where);
            if (!equalities.is_array()) fail(origin, where, "\"equalities\" must be an array");
            for (const auto& pair : equalities) {
                if (!pair.is_array() || pair.size() != 2 || !pair.at(0).is_string() ||
                    !pair.at(1).is_string())
                    fail(origin, where, "equalities entries must be [left, right] name pairs");
                jc.equalities.emplace_back(pair.at(0).get<std::string>(),
                                           pair.at(1).get<std::string>());
            }
            try {
                result.mkb.add(jc);
            } catch (const Error& e) {
                fail(origin, where, e.what(), e.code());
            }
        }
    }

    // partial/complete constraints
    if (doc.contains("pc_constraints")) {
        const json& pcs = doc.at("pc_constraints");
        if (!pcs.is_array()) fail(origin, "pc_constraints", "must be an array");
        for (size_t i = 0; i < pcs.size(); ++i) {
            const std::string where = "pc_constraints[" + std::to_string(i) + "]";
            const json& entry = pcs.at(i);
            wsmkb::PCConstraint pc;
            pc.left = parse_pc_side(member(entry, "left", origin, where), origin, where);
            pc.right = parse_pc_side(member(entry, "right", origin, where), origin, where);
            std::string theta = string_member(entry, "theta", origin, where);
            if (theta == "subset")
                pc.theta = ExtentRelation::Subset;
            else if (theta == "superset")
                pc.theta = ExtentRelation::Superset;
            else if (theta == "equivalent")
                pc.theta = ExtentRelation::Equivalent;
            else
                fail(origin, where,
                     "theta must be \"subset\", \"superset\", or \"equivalent\", got \"" + theta +
                         "\"");
            try {
                result.mkb.add(pc);
            } catch (const Error& e) {
                fail(origin, where, e.what(), e.code());
            }
        }
    }

    // views
    if (doc.contains("views")) {
        const json& views = doc.at("views");
        if (!views.is_array()) fail(origin, "views", "must be an array");
        for (size_t i = 0; i < views.size(); ++i) {
            const std::string where = "views[" + std::to_string(i) + "]";
            const json& entry = views.at(i);
            wsvkb::ViewRecord record;
            record.view_id = string_member(entry, "id", origin, where);
            record.original_text = string_member(entry, "esql", origin, where);
            try {
                record.definition = esql::parse_view(record.original_text);
                result.vkb.add_view(record, result.mkb);
            } catch (const Error& e) {
                fail(origin, where + " (" + record.view_id + ")", e.what(), e.code());
            }
        }
    }

    // web services (and their replacement rules, second pass)
    if (doc.contains("web_services")) {
        const json& services = doc.at("web_services");
        if (!services.is_array()) fail(origin, "web_services", "must be an array");
        std::vector<wsmkb::ReplacementRule> rules;
        for (size_t i = 0; i < services.size(); ++i) {
            const std::string where = "web_services[" + std::to_string(i) + "]";
            const json& entry = services.at(i);
            WebService ws;
            ws.ws_id = string_member(entry, "id", origin, where);
            const json& srcs = member(entry, "sources", origin, where);
            if (!srcs.is_array()) fail(origin, where, "\"sources\" must be an array");
            for (const auto& s : srcs) ws.source_ids.insert(s.get<std::string>());
            const json& view_ids = member(entry, "views", origin, where);
            if (!view_ids.is_array()) fail(origin, where, "\"views\" must be an array");
            for (const auto& v : view_ids) ws.view_ids.push_back(v.get<std::string>());
            wsmkb::ReplacementRule rule;
            rule.ws_id = ws.ws_id;
            if (entry.contains("replacements"))
                for (const auto& r : entry.at("replacements"))
                    rule.substitutes.push_back(r.get<std::string>());
            try {
                result.mkb.add(ws);
                result.vkb.set_ws_views(ws.ws_id, ws.view_ids);
            } catch (const Error& e) {
                fail(origin, where, e.what(), e.code());
            }
            rules.push_back(std::move(rule));
        }
        for (size_t i = 0; i < rules.size(); ++i) {
            try {
                result.mkb.add(rules[i]);
            } catch (const Error& e) {
                fail(origin, "web_services[" + std::to_string(i) + "].replacements", e.what(),
                     e.code());
            }
        }
    }

    // Advisory consistency check between WS->source and WS->view maps.
    for (const auto& [ws_id, ws] : result.mkb.web_services()) {
        std::set<std::string> referenced;
        for (const auto& view_id : ws.view_ids) {
            const wsvkb::ViewRecord* record = result.vkb.find_view(view_id);
            if (!record) continue;
            for (const auto& item : record->definition.from)
                referenced.insert(item.relation.source_id);
        }
        if (!referenced.empty() && referenced != ws.source_ids) {
            std::string declared, actual;
            for (const auto& s : ws.source_ids) declared += (declared.empty() ? "" : ", ") + s;
            for (const auto& s : referenced) actual += (actual.empty() ? "" : ", ") + s;
            result.warnings.push_back("web service " + ws_id + " declares sources {" + declared +
                                      "} but its views reference {" + actual + "}");
        }
    }
    return result;
}

} // namespace

LoadResult load_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, origin + ": " + e.what());
    }
    return load_document(doc, origin);
}

LoadResult load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, path + ": no such file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_text(buffer.str(), path);
}

} // namespace vsync::kb_io
