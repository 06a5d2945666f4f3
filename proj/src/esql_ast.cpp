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
#include "vsync/esql/ast.hpp"

#include <set>

namespace vsync::esql {

const char* to_string(Comparator c) {
    switch (c) {
        case Comparator::Eq: return "=";
        case Comparator::Ne: return "<>";
        case Comparator::Lt: return "<";
        case Comparator::Le: return "<=";
        case Comparator::Gt: return ">";
        case Comparator::Ge: return ">=";
    }
    return "?";
}

const FromItem* ViewDefinition::find_alias(const std::string& alias) const {
    for (const auto& item : from)
        if (item.alias == alias) return &item;
    return nullptr;
}

namespace {

bool is_valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

void check_term(const ViewDefinition& view, const Term& term, const std::string& where) {
    if (const auto* attr = std::get_if<AttributeTerm>(&term)) {
        if (!view.find_alias(attr->alias))
            throw Error(ErrorCode::SemanticError, "view " + view.name + ": undeclared alias " +
                                                      attr->alias + " in " + where);
    } else if (const auto* date = std::get_if<DateLiteral>(&term)) {
        if (!is_valid_iso_date(date->iso_date))
            throw Error(ErrorCode::SemanticError,
                        "view " + view.name + ": bad date literal " + date->iso_date);
    }
}

} // namespace

void validate(const ViewDefinition& view) {
    if (view.name.empty())
        throw Error(ErrorCode::SemanticError, "view name must be nonempty");
    if (view.select.empty())
        throw Error(ErrorCode::SemanticError, "view " + view.name + ": empty SELECT list");
    if (view.from.empty())
        throw Error(ErrorCode::SemanticError, "view " + view.name + ": empty FROM list");

    std::set<std::string> aliases;
    for (const auto& item : view.from) {
        if (item.alias.empty() || item.relation.source_id.empty() ||
            item.relation.relation_name.empty())
            throw Error(ErrorCode::SemanticError,
                        "view " + view.name + ": empty name in FROM item");
        if (!aliases.insert(item.alias).second)
            throw Error(ErrorCode::SemanticError,
                        "view " + view.name + ": duplicate alias " + item.alias);
    }

    for (const auto& item : view.select) {
        if (!view.find_alias(item.attribute.alias))
            throw Error(ErrorCode::SemanticError, "view " + view.name + ": undeclared alias " +
                                                      item.attribute.alias + " in SELECT");
    }

    for (const auto& clause : view.where) {
        check_term(view, clause.lhs, "WHERE");
        check_term(view, clause.rhs, "WHERE");
        if (!std::holds_alternative<AttributeTerm>(clause.lhs) &&
            !std::holds_alternative<AttributeTerm>(clause.rhs))
            throw Error(ErrorCode::SemanticError,
                        "view " + view.name + ": clause compares two literals");
    }

    if (view.column_list && view.column_list->size() != view.select.size())
        throw Error(ErrorCode::SemanticError,
                    "view " + view.name + ": column list arity " +
                        std::to_string(view.column_list->size()) + " does not match SELECT arity " +
                        std::to_string(view.select.size()));
}

} // namespace vsync::esql
