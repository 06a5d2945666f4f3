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

#include <string>

#include "vsync/esql/ast.hpp"

namespace vsync::esql {

/// Canonical serializer. Deterministic: one FROM item / WHERE clause per
/// line, parameter groups only when non-default, VE always printed.
/// parse_view(print_view(v)) is structurally equal to v.
std::string print_view(const ViewDefinition& view);

std::string print_term(const Term& term);
std::string print_clause(const PrimitiveClause& clause);

} // namespace vsync::esql
