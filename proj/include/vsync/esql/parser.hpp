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
#include <vector>

#include "vsync/esql/ast.hpp"

namespace vsync::esql {

/// Parses exactly one CREATE VIEW statement (trailing ';' optional).
/// Throws ParseError with code SyntaxError (bad token stream) or
/// SemanticError (undeclared/duplicate alias, arity mismatch).
ViewDefinition parse_view(const std::string& text);

/// Parses a whole file: one or more ';'-separated statements,
/// '--' line comments allowed.
std::vector<ViewDefinition> parse_views(const std::string& text);

} // namespace vsync::esql
