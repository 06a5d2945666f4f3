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

#include <random>
#include <string>
#include <vector>

#include "vsync/esql/ast.hpp"

namespace testutil {

/// Random well-formed ViewDefinitions for the parse/print round-trip
/// property. Exercises every literal kind, comparator, parameter
/// combination, VE symbol, optional column lists, aliases that match or
/// differ from the relation name, and strings needing escapes.
class ViewGenerator {
  public:
    explicit ViewGenerator(std::uint64_t seed) : rng_(seed) {}

    vsync::esql::ViewDefinition next() {
        using namespace vsync;
        using namespace vsync::esql;
        ViewDefinition view;
        view.name = "V" + std::to_string(counter_++);
        view.ve = static_cast<ExtentRelation>(below(4));

        const int n_from = 1 + below(3);
        for (int i = 0; i < n_from; ++i) {
            FromItem item;
            item.relation = {"S" + std::to_string(1 + below(3)), name("R")};
            item.alias = below(4) == 0 ? item.relation.relation_name : name("t");
            while (view.find_alias(item.alias)) item.alias += "x";
            item.params = params();
            view.from.push_back(std::move(item));
        }
        const int n_select = 1 + below(3);
        for (int i = 0; i < n_select; ++i) {
            SelectItem item;
            item.attribute = attribute(view);
            item.params = params();
            view.select.push_back(std::move(item));
        }
        if (below(3) == 0) {
            std::vector<std::string> columns;
            for (size_t i = 0; i < view.select.size(); ++i)
                columns.push_back("c" + std::to_string(i));
            view.column_list = std::move(columns);
        }
        const int n_where = below(4);
        for (int i = 0; i < n_where; ++i) {
            PrimitiveClause clause;
            clause.lhs = attribute(view);
            clause.op = static_cast<Comparator>(below(6));
            clause.rhs = below(2) == 0 ? Term(attribute(view)) : literal();
            clause.params = params();
            view.where.push_back(std::move(clause));
        }
        return view;
    }

  private:
    std::mt19937_64 rng_;
    int counter_ = 1;

    int below(int n) { return static_cast<int>(rng_() % n); }

    std::string name(const char* prefix) {
        static const char* stems[] = {"Id", "Name", "Age", "Tel", "Result", "Loc", "Spec", "x_1"};
        return std::string(prefix) + stems[below(8)] + std::to_string(below(9));
    }

    vsync::esql::EvolutionParams params() {
        return {below(2) == 0, below(2) == 0};
    }

    vsync::esql::AttributeTerm attribute(const vsync::esql::ViewDefinition& view) {
        const auto& item = view.from[below(static_cast<int>(view.from.size()))];
        return {item.alias, name("a")};
    }

    vsync::esql::Term literal() {
        switch (below(3)) {
            case 0: {
                static const double values[] = {0, 1, -1, 42, -3.5, 0.25, 1e6, 123456.789, -1e-3};
                return vsync::esql::NumberLiteral{values[below(9)]};
            }
            case 1: {
                static const char* values[] = {"",       "Tunis", "a b c",   "quote\"inside",
                                               "back\\slash", "tab\there", "line\nbreak", "Ünïcode"};
                return vsync::esql::StringLiteral{values[below(8)]};
            }
            default: {
                char buf[11];
                std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", 1990 + below(40), 1 + below(12),
                              1 + below(28));
                return vsync::esql::DateLiteral{buf};
            }
        }
    }
};

} // namespace testutil
