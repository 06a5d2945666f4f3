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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vsync/model.hpp"

namespace vsync::esql {

/// Dispensable/replaceable evolution parameters. Defaults to (false, false)
/// when a parameter group is omitted from the query text.
struct EvolutionParams {
    bool dispensable = false;
    bool replaceable = false;

    bool operator==(const EvolutionParams&) const = default;
    bool is_default() const { return !dispensable && !replaceable; }
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(Comparator c);

struct AttributeTerm {
    std::string alias;
    std::string attribute;
    bool operator==(const AttributeTerm&) const = default;
};

struct NumberLiteral {
    double value = 0;
    bool operator==(const NumberLiteral&) const = default;
};

struct StringLiteral {
    std::string value;
    bool operator==(const StringLiteral&) const = default;
};

/// Calendar date literal, kept as a validated YYYY-MM-DD string.
struct DateLiteral {
    std::string iso_date;
    bool operator==(const DateLiteral&) const = default;
};

using Term = std::variant<AttributeTerm, NumberLiteral, StringLiteral, DateLiteral>;

struct SelectItem {
    AttributeTerm attribute;
    EvolutionParams params; // AD, AR
    bool operator==(const SelectItem&) const = default;
};

struct FromItem {
    RelationRef relation;
    std::string alias;
    EvolutionParams params; // RD, RR
    bool operator==(const FromItem&) const = default;
};

struct PrimitiveClause {
    Term lhs;
    Comparator op = Comparator::Eq;
    Term rhs;
    EvolutionParams params; // CD, CR
    bool operator==(const PrimitiveClause&) const = default;
};

struct ViewDefinition {
    std::string name;
    std::optional<std::vector<std::string>> column_list;
    ExtentRelation ve = ExtentRelation::Equivalent;
    std::vector<SelectItem> select;          // nonempty
    std::vector<FromItem> from;              // nonempty, aliases unique
    std::vector<PrimitiveClause> where;      // conjunction, order preserved

    bool operator==(const ViewDefinition&) const = default;

    const FromItem* find_alias(const std::string& alias) const;
};

/// Semantic checks that do not need schemas: alias declarations and
/// uniqueness, column list arity, clause shape (at least one attribute
/// side). Throws SemanticError.
void validate(const ViewDefinition& view);

} // namespace vsync::esql
