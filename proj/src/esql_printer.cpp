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
#include "vsync/esql/printer.hpp"

#include <charconv>

namespace vsync::esql {

namespace {

std::string print_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string print_params(const EvolutionParams& params, const char* d, const char* r) {
    if (params.is_default()) return "";
    std::string out = " (";
    out += d;
    out += params.dispensable ? "=true, " : "=false, ";
    out += r;
    out += params.replaceable ? "=true)" : "=false)";
    return out;
}

} // namespace

std::string print_term(const Term& term) {
    if (const auto* attr = std::get_if<AttributeTerm>(&term))
        return attr->alias + "." + attr->attribute;
    if (const auto* num = std::get_if<NumberLiteral>(&term)) return print_number(num->value);
    if (const auto* str = std::get_if<StringLiteral>(&term)) return "\"" + escape(str->value) + "\"";
    return "DATE " + std::get<DateLiteral>(term).iso_date;
}

std::string print_clause(const PrimitiveClause& clause) {
    return "(" + print_term(clause.lhs) + " " + to_string(clause.op) + " " +
           print_term(clause.rhs) + ")";
}

std::string print_view(const ViewDefinition& view) {
    std::string out = "CREATE VIEW " + view.name;
    if (view.column_list) {
        out += " (";
        for (size_t i = 0; i < view.column_list->size(); ++i) {
            if (i > 0) out += ", ";
            out += (*view.column_list)[i];
        }
        out += ")";
    }
    out += " VE='";
    out += extent_symbol(view.ve);
    out += "' AS\nSELECT ";
    for (size_t i = 0; i < view.select.size(); ++i) {
        if (i > 0) out += ", ";
        const SelectItem& item = view.select[i];
        out += item.attribute.alias + "." + item.attribute.attribute;
        out += print_params(item.params, "AD", "AR");
    }
    out += "\nFROM ";
    for (size_t i = 0; i < view.from.size(); ++i) {
        if (i > 0) out += ",\n     ";
        const FromItem& item = view.from[i];
        out += item.relation.str();
        if (item.alias != item.relation.relation_name) out += " " + item.alias;
        out += print_params(item.params, "RD", "RR");
    }
    if (!view.where.empty()) {
        out += "\nWHERE ";
        for (size_t i = 0; i < view.where.size(); ++i) {
            if (i > 0) out += " AND\n      ";
            out += print_clause(view.where[i]);
            out += print_params(view.where[i].params, "CD", "CR");
        }
    }
    out += ";\n";
    return out;
}

} // namespace vsync::esql
