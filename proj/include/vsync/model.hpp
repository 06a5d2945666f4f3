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
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vsync/error.hpp"

namespace vsync {

/// Attribute domain types. Closed set.
enum class TypeDomain { Number, String, Date };

/// Containment relation between two extents (or between substitute and
/// original): equivalent, superset, subset, indifferent.
enum class ExtentRelation { Equivalent, Superset, Subset, Indifferent };

const char* to_string(TypeDomain t);
const char* to_string(ExtentRelation e);
std::optional<TypeDomain> type_domain_from_string(const std::string& s);
std::optional<ExtentRelation> extent_from_symbol(const std::string& s);

/// UTF-8 symbol for an extent relation: ≡ ⊇ ⊆ ≈.
const char* extent_symbol(ExtentRelation e);

/// Containment inverse: ⊇ ↔ ⊆; ≡ and ≈ are self-inverse.
ExtentRelation invert(ExtentRelation e);

struct RelationRef {
    std::string source_id;
    std::string relation_name;

    auto operator<=>(const RelationRef&) const = default;
    std::string str() const { return source_id + "." + relation_name; }
};

struct AttributeRef {
    std::string source_id;
    std::string relation_name;
    std::string attribute_name;

    auto operator<=>(const AttributeRef&) const = default;
    RelationRef relation() const { return {source_id, relation_name}; }
    std::string str() const { return source_id + "." + relation_name + "." + attribute_name; }
};

struct RelationSchema {
    std::string name;
    // Ordered; names unique within the relation, at least one entry.
    std::vector<std::pair<std::string, TypeDomain>> attributes;

    bool operator==(const RelationSchema&) const = default;
    bool has_attribute(const std::string& attribute_name) const;
    std::optional<TypeDomain> attribute_type(const std::string& attribute_name) const;
};

struct SourceSchema {
    std::string source_id;
    std::vector<RelationSchema> relations; // names unique, at least one

    bool operator==(const SourceSchema&) const = default;
    const RelationSchema* find_relation(const std::string& relation_name) const;
};

/// Throws InvariantViolation if the schema breaks a structural invariant.
void validate(const RelationSchema& relation);
void validate(const SourceSchema& source);

struct WebService {
    std::string ws_id;
    std::set<std::string> source_ids;
    std::vector<std::string> view_ids;     // nonempty
    std::vector<std::string> replacements; // preference order, may be empty

    bool operator==(const WebService&) const = default;
};

void validate(const WebService& ws);

struct DeleteAttribute {
    AttributeRef attribute;
    bool operator==(const DeleteAttribute&) const = default;
};

struct DeleteRelation {
    RelationRef relation;
    bool operator==(const DeleteRelation&) const = default;
};

using ChangeEvent = std::variant<DeleteAttribute, DeleteRelation>;

std::string to_string(const ChangeEvent& event);

/// Source schemas keyed by source_id (globally unique).
using SchemaSet = std::map<std::string, SourceSchema>;

/// Materializes the schema state after a deletion event. A relation left
/// with zero attributes is removed; a source left with zero relations is
/// removed. Throws UnknownTarget if the event references a component that
/// does not exist. Never touches sources other than the event's.
SchemaSet apply_change(const SchemaSet& schemas, const ChangeEvent& event);

/// True iff the event's target exists in the schema set.
bool target_exists(const SchemaSet& schemas, const ChangeEvent& event);

} // namespace vsync
