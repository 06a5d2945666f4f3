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
#include "vsync/model.hpp"

#include <algorithm>

namespace vsync {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownTarget: return "UnknownTarget";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::SemanticError: return "SemanticError";
        case ErrorCode::DanglingReference: return "DanglingReference";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::UnknownAttribute: return "UnknownAttribute";
        case ErrorCode::UnknownWebService: return "UnknownWebService";
        case ErrorCode::UnknownView: return "UnknownView";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::BoundsExceeded: return "BoundsExceeded";
        case ErrorCode::IoError: return "IoError";
    }
    return "Error";
}

const char* to_string(TypeDomain t) {
    switch (t) {
        case TypeDomain::Number: return "Number";
        case TypeDomain::String: return "String";
        case TypeDomain::Date: return "Date";
    }
    return "?";
}

const char* to_string(ExtentRelation e) {
    switch (e) {
        case ExtentRelation::Equivalent: return "equivalent";
        case ExtentRelation::Superset: return "superset";
        case ExtentRelation::Subset: return "subset";
        case ExtentRelation::Indifferent: return "indifferent";
    }
    return "?";
}

const char* extent_symbol(ExtentRelation e) {
    switch (e) {
        case ExtentRelation::Equivalent: return "≡";
        case ExtentRelation::Superset: return "⊇";
        case ExtentRelation::Subset: return "⊆";
        case ExtentRelation::Indifferent: return "≈";
    }
    return "?";
}

ExtentRelation invert(ExtentRelation e) {
    switch (e) {
        case ExtentRelation::Superset: return ExtentRelation::Subset;
        case ExtentRelation::Subset: return ExtentRelation::Superset;
        default: return e;
    }
}

std::optional<TypeDomain> type_domain_from_string(const std::string& s) {
    if (s == "Number") return TypeDomain::Number;
    if (s == "String") return TypeDomain::String;
    if (s == "Date") return TypeDomain::Date;
    return std::nullopt;
}

std::optional<ExtentRelation> extent_from_symbol(const std::string& s) {
    if (s == "≡") return ExtentRelation::Equivalent;
    if (s == "⊇") return ExtentRelation::Superset;
    if (s == "⊆") return ExtentRelation::Subset;
    if (s == "≈") return ExtentRelation::Indifferent;
    return std::nullopt;
}

bool RelationSchema::has_attribute(const std::string& attribute_name) const {
    return attribute_type(attribute_name).has_value();
}

std::optional<TypeDomain> RelationSchema::attribute_type(const std::string& attribute_name) const {
    for (const auto& [name, type] : attributes)
        if (name == attribute_name) return type;
    return std::nullopt;
}

const RelationSchema* SourceSchema::find_relation(const std::string& relation_name) const {
    for (const auto& rel : relations)
        if (rel.name == relation_name) return &rel;
    return nullptr;
}

void validate(const RelationSchema& relation) {
    if (relation.name.empty())
        throw Error(ErrorCode::InvariantViolation, "relation name must be nonempty");
    if (relation.attributes.empty())
        throw Error(ErrorCode::InvariantViolation,
                    "relation " + relation.name + " must have at least one attribute");
    std::set<std::string> seen;
    for (const auto& [name, type] : relation.attributes) {
        (void)type;
        if (name.empty())
            throw Error(ErrorCode::InvariantViolation,
                        "relation " + relation.name + " has an empty attribute name");
        if (!seen.insert(name).second)
            throw Error(ErrorCode::InvariantViolation,
                        "duplicate attribute " + name + " in relation " + relation.name);
    }
}

void validate(const SourceSchema& source) {
    if (source.source_id.empty())
        throw Error(ErrorCode::InvariantViolation, "source id must be nonempty");
    if (source.relations.empty())
        throw Error(ErrorCode::InvariantViolation,
                    "source " + source.source_id + " must have at least one relation");
    std::set<std::string> seen;
    for (const auto& rel : source.relations) {
        validate(rel);
        if (!seen.insert(rel.name).second)
            throw Error(ErrorCode::InvariantViolation,
                        "duplicate relation " + rel.name + " in source " + source.source_id);
    }
}

void validate(const WebService& ws) {
    if (ws.ws_id.empty())
        throw Error(ErrorCode::InvariantViolation, "web service id must be nonempty");
    if (ws.view_ids.empty())
        throw Error(ErrorCode::InvariantViolation,
                    "web service " + ws.ws_id + " must list at least one view");
    if (std::find(ws.replacements.begin(), ws.replacements.end(), ws.ws_id) !=
        ws.replacements.end())
        throw Error(ErrorCode::InvariantViolation,
                    "web service " + ws.ws_id + " lists itself as a replacement");
}

std::string to_string(const ChangeEvent& event) {
    if (const auto* da = std::get_if<DeleteAttribute>(&event))
        return "delete-attribute " + da->attribute.str();
    return "delete-relation " + std::get<DeleteRelation>(event).relation.str();
}

bool target_exists(const SchemaSet& schemas, const ChangeEvent& event) {
    if (const auto* da = std::get_if<DeleteAttribute>(&event)) {
        auto it = schemas.find(da->attribute.source_id);
        if (it == schemas.end()) return false;
        const auto* rel = it->second.find_relation(da->attribute.relation_name);
        return rel != nullptr && rel->has_attribute(da->attribute.attribute_name);
    }
    const auto& dr = std::get<DeleteRelation>(event);
    auto it = schemas.find(dr.relation.source_id);
    return it != schemas.end() && it->second.find_relation(dr.relation.relation_name) != nullptr;
}

SchemaSet apply_change(const SchemaSet& schemas, const ChangeEvent& event) {
    if (!target_exists(schemas, event))
        throw Error(ErrorCode::UnknownTarget, to_string(event) + " targets a missing component");

    SchemaSet result = schemas;
    if (const auto* da = std::get_if<DeleteAttribute>(&event)) {
        SourceSchema& src = result.at(da->attribute.source_id);
        for (auto rel_it = src.relations.begin(); rel_it != src.relations.end(); ++rel_it) {
            if (rel_it->name != da->attribute.relation_name) continue;
            auto& attrs = rel_it->attributes;
            std::erase_if(attrs,
                          [&](const auto& a) { return a.first == da->attribute.attribute_name; });
            if (attrs.empty()) src.relations.erase(rel_it);
            break;
        }
        if (src.relations.empty()) result.erase(da->attribute.source_id);
    } else {
        const auto& dr = std::get<DeleteRelation>(event);
        SourceSchema& src = result.at(dr.relation.source_id);
        std::erase_if(src.relations,
                      [&](const RelationSchema& r) { return r.name == dr.relation.relation_name; });
        if (src.relations.empty()) result.erase(dr.relation.source_id);
    }
    return result;
}

} // namespace vsync
