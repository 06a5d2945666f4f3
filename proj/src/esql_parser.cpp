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
#include "vsync/esql/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace vsync::esql {

namespace {

enum class Tok {
    Ident, Number, String, DateText, VeSymbol,
    LParen, RParen, Comma, Semi, Dot,
    Eq, Ne, Lt, Le, Gt, Ge,
    KwCreate, KwView, KwVe, KwAs, KwSelect, KwFrom, KwWhere, KwAnd,
    KwTrue, KwFalse, KwDate,
    KwAD, KwAR, KwRD, KwRR, KwCD, KwCR,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    double number = 0;
    int line = 1;
    int column = 1;
};

const char* describe(Tok kind) {
    switch (kind) {
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::String: return "string literal";
        case Tok::DateText: return "date";
        case Tok::VeSymbol: return "quoted extent symbol";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Dot: return "'.'";
        case Tok::Eq: return "'='";
        case Tok::Ne: return "'<>'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::KwCreate: return "CREATE";
        case Tok::KwView: return "VIEW";
        case Tok::KwVe: return "VE";
        case Tok::KwAs: return "AS";
        case Tok::KwSelect: return "SELECT";
        case Tok::KwFrom: return "FROM";
        case Tok::KwWhere: return "WHERE";
        case Tok::KwAnd: return "AND";
        case Tok::KwTrue: return "TRUE";
        case Tok::KwFalse: return "FALSE";
        case Tok::KwDate: return "DATE";
        case Tok::KwAD: return "AD";
        case Tok::KwAR: return "AR";
        case Tok::KwRD: return "RD";
        case Tok::KwRR: return "RR";
        case Tok::KwCD: return "CD";
        case Tok::KwCR: return "CR";
        case Tok::End: return "end of input";
    }
    return "token";
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

// Keywords are case-insensitive and reserved; identifiers are case-sensitive.
std::optional<Tok> keyword(std::string_view word) {
    const std::string up = upper(word);
    if (up == "CREATE") return Tok::KwCreate;
    if (up == "VIEW") return Tok::KwView;
    if (up == "VE") return Tok::KwVe;
    if (up == "AS") return Tok::KwAs;
    if (up == "SELECT") return Tok::KwSelect;
    if (up == "FROM") return Tok::KwFrom;
    if (up == "WHERE") return Tok::KwWhere;
    if (up == "AND") return Tok::KwAnd;
    if (up == "TRUE") return Tok::KwTrue;
    if (up == "FALSE") return Tok::KwFalse;
    if (up == "DATE") return Tok::KwDate;
    if (up == "AD") return Tok::KwAD;
    if (up == "AR") return Tok::KwAR;
    if (up == "RD") return Tok::KwRD;
    if (up == "RR") return Tok::KwRR;
    if (up == "CD") return Tok::KwCD;
    if (up == "CR") return Tok::KwCR;
    return std::nullopt;
}

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_space_and_comments();
            Token tok = next_token();
            tokens.push_back(tok);
            if (tok.kind == Tok::End) break;
        }
        return tokens;
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(ErrorCode::SyntaxError, msg, line_, column_);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char cur() const { return text_[pos_]; }
    char at(size_t off) const { return pos_ + off < text_.size() ? text_[pos_ + off] : '\0'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (!eof()) {
            if (std::isspace(static_cast<unsigned char>(cur()))) {
                advance();
            } else if (cur() == '-' && at(1) == '-') {
                while (!eof() && cur() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token make(Tok kind, std::string text, int line, int column) {
        return Token{kind, std::move(text), 0, line, column};
    }

    bool date_ahead() const {
        // YYYY-MM-DD, not followed by another digit or name character.
        for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
            if (!std::isdigit(static_cast<unsigned char>(at(i)))) return false;
        if (at(4) != '-' || at(7) != '-') return false;
        char after = at(10);
        return !(std::isalnum(static_cast<unsigned char>(after)) || after == '_');
    }

    Token lex_number(bool negative) {
        int line = line_, column = column_;
        size_t start = pos_;
        if (negative) advance(); // '-'
        while (!eof() && std::isdigit(static_cast<unsigned char>(cur()))) advance();
        if (!eof() && cur() == '.' && std::isdigit(static_cast<unsigned char>(at(1)))) {
            advance();
            while (!eof() && std::isdigit(static_cast<unsigned char>(cur()))) advance();
        }
        if (!eof() && (cur() == 'e' || cur() == 'E')) {
            size_t mark = pos_;
            advance();
            if (!eof() && (cur() == '+' || cur() == '-')) advance();
            if (!eof() && std::isdigit(static_cast<unsigned char>(cur()))) {
                while (!eof() && std::isdigit(static_cast<unsigned char>(cur()))) advance();
            } else {
                pos_ = mark; // not an exponent after all
            }
        }
        std::string text(text_.substr(start, pos_ - start));
        Token tok = make(Tok::Number, text, line, column);
        char* end = nullptr;
        tok.number = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(tok.number))
            fail("bad numeric literal " + text);
        return tok;
    }

    Token lex_string() {
        int line = line_, column = column_;
        advance(); // opening quote
        std::string value;
        while (true) {
            if (eof() || cur() == '\n') fail("unterminated string literal");
            char c = cur();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (eof()) fail("unterminated string literal");
                switch (cur()) {
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case 'r': value += '\r'; break;
                    default: fail(std::string("invalid escape \\") + cur());
                }
                advance();
            } else {
                value += c;
                advance();
            }
        }
        return make(Tok::String, std::move(value), line, column);
    }

    Token lex_ve_symbol() {
        int line = line_, column = column_;
        advance(); // opening quote
        std::string value;
        while (!eof() && cur() != '\'') {
            if (cur() == '\n') fail("unterminated quoted symbol");
            value += cur();
            advance();
        }
        if (eof()) fail("unterminated quoted symbol");
        advance(); // closing quote
        return make(Tok::VeSymbol, std::move(value), line, column);
    }

    Token next_token() {
        if (eof()) return make(Tok::End, "", line_, column_);
        int line = line_, column = column_;
        char c = cur();

        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (date_ahead()) {
                std::string text(text_.substr(pos_, 10));
                for (int i = 0; i < 10; ++i) advance();
                return make(Tok::DateText, std::move(text), line, column);
            }
            return lex_number(false);
        }
        if (c == '-' && std::isdigit(static_cast<unsigned char>(at(1)))) return lex_number(true);
        if (c == '"') return lex_string();
        if (c == '\'') return lex_ve_symbol();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_'))
                advance();
            std::string word(text_.substr(start, pos_ - start));
            if (auto kw = keyword(word)) return make(*kw, std::move(word), line, column);
            return make(Tok::Ident, std::move(word), line, column);
        }
        switch (c) {
            case '(': advance(); return make(Tok::LParen, "(", line, column);
            case ')': advance(); return make(Tok::RParen, ")", line, column);
            case ',': advance(); return make(Tok::Comma, ",", line, column);
            case ';': advance(); return make(Tok::Semi, ";", line, column);
            case '.': advance(); return make(Tok::Dot, ".", line, column);
            case '=': advance(); return make(Tok::Eq, "=", line, column);
            case '<':
                advance();
                if (!eof() && cur() == '>') { advance(); return make(Tok::Ne, "<>", line, column); }
                if (!eof() && cur() == '=') { advance(); return make(Tok::Le, "<=", line, column); }
                return make(Tok::Lt, "<", line, column);
            case '>':
                advance();
                if (!eof() && cur() == '=') { advance(); return make(Tok::Ge, ">=", line, column); }
                return make(Tok::Gt, ">", line, column);
            default: break;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    ViewDefinition parse_statement() {
        ViewDefinition view;
        expect(Tok::KwCreate);
        expect(Tok::KwView);
        view.name = expect(Tok::Ident).text;

        if (peek().kind == Tok::LParen && peek(1).kind == Tok::Ident) {
            next();
            std::vector<std::string> columns;
            columns.push_back(expect(Tok::Ident).text);
            while (peek().kind == Tok::Comma) {
                next();
                columns.push_back(expect(Tok::Ident).text);
            }
            expect(Tok::RParen);
            view.column_list = std::move(columns);
        }

        if (peek().kind == Tok::KwVe) {
            next();
            expect(Tok::Eq);
            Token sym = expect(Tok::VeSymbol);
            auto extent = extent_from_symbol(sym.text);
            if (!extent)
                throw ParseError(ErrorCode::SyntaxError,
                                 "unknown view-extension symbol '" + sym.text + "'", sym.line,
                                 sym.column);
            view.ve = *extent;
        }

        expect(Tok::KwAs);

        expect(Tok::KwSelect);
        view.select.push_back(parse_select_item());
        while (peek().kind == Tok::Comma) {
            next();
            view.select.push_back(parse_select_item());
        }

        expect(Tok::KwFrom);
        view.from.push_back(parse_from_item());
        while (peek().kind == Tok::Comma) {
            next();
            view.from.push_back(parse_from_item());
        }

        if (peek().kind == Tok::KwWhere) {
            next();
            view.where.push_back(parse_clause());
            while (peek().kind == Tok::KwAnd || peek().kind == Tok::Comma) {
                next();
                view.where.push_back(parse_clause());
            }
        }

        if (peek().kind == Tok::Semi) next();
        return view;
    }

    bool at_end() const { return peek().kind == Tok::End; }

    [[noreturn]] void fail_here(const std::string& msg) {
        const Token& tok = peek();
        throw ParseError(ErrorCode::SyntaxError, msg, tok.line, tok.column);
    }

  private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        if (i >= tokens_.size()) i = tokens_.size() - 1; // End token
        return tokens_[i];
    }

    const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

    Token expect(Tok kind) {
        const Token& tok = peek();
        if (tok.kind != kind)
            throw ParseError(ErrorCode::SyntaxError,
                             std::string("expected ") + describe(kind) + ", got " +
                                 describe(tok.kind),
                             tok.line, tok.column);
        return next();
    }

    EvolutionParams parse_params(Tok dispensable_kw, Tok replaceable_kw) {
        // caller guarantees '(' <dispensable_kw> lookahead
        expect(Tok::LParen);
        expect(dispensable_kw);
        expect(Tok::Eq);
        EvolutionParams params;
        params.dispensable = parse_bool();
        expect(Tok::Comma);
        expect(replaceable_kw);
        expect(Tok::Eq);
        params.replaceable = parse_bool();
        expect(Tok::RParen);
        return params;
    }

    bool parse_bool() {
        if (peek().kind == Tok::KwTrue) { next(); return true; }
        if (peek().kind == Tok::KwFalse) { next(); return false; }
        fail_here("expected TRUE or FALSE");
    }

    AttributeTerm parse_attribute() {
        AttributeTerm attr;
        attr.alias = expect(Tok::Ident).text;
        expect(Tok::Dot);
        attr.attribute = expect(Tok::Ident).text;
        return attr;
    }

    SelectItem parse_select_item() {
        SelectItem item;
        item.attribute = parse_attribute();
        if (peek().kind == Tok::LParen && peek(1).kind == Tok::KwAD)
            item.params = parse_params(Tok::KwAD, Tok::KwAR);
        return item;
    }

    FromItem parse_from_item() {
        FromItem item;
        item.relation.source_id = expect(Tok::Ident).text;
        expect(Tok::Dot);
        item.relation.relation_name = expect(Tok::Ident).text;
        if (peek().kind == Tok::Ident)
            item.alias = next().text;
        else
            item.alias = item.relation.relation_name;
        if (peek().kind == Tok::LParen && peek(1).kind == Tok::KwRD)
            item.params = parse_params(Tok::KwRD, Tok::KwRR);
        return item;
    }

    Term parse_term() {
        const Token& tok = peek();
        switch (tok.kind) {
            case Tok::Ident: return parse_attribute();
            case Tok::Number: {
                NumberLiteral lit{next().number};
                return lit;
            }
            case Tok::String: return StringLiteral{next().text};
            case Tok::KwDate: {
                next();
                Token date = expect(Tok::DateText);
                return DateLiteral{date.text};
            }
            default: fail_here("expected attribute, number, string, or DATE literal");
        }
    }

    Comparator parse_comparator() {
        switch (peek().kind) {
            case Tok::Eq: next(); return Comparator::Eq;
            case Tok::Ne: next(); return Comparator::Ne;
            case Tok::Lt: next(); return Comparator::Lt;
            case Tok::Le: next(); return Comparator::Le;
            case Tok::Gt: next(); return Comparator::Gt;
            case Tok::Ge: next(); return Comparator::Ge;
            default: fail_here("expected comparator");
        }
    }

    PrimitiveClause parse_clause() {
        PrimitiveClause clause;
        bool parenthesized = false;
        if (peek().kind == Tok::LParen) {
            parenthesized = true;
            next();
        }
        clause.lhs = parse_term();
        clause.op = parse_comparator();
        clause.rhs = parse_term();
        if (parenthesized) expect(Tok::RParen);
        if (peek().kind == Tok::LParen && peek(1).kind == Tok::KwCD)
            clause.params = parse_params(Tok::KwCD, Tok::KwCR);
        return clause;
    }
};

} // namespace

ViewDefinition parse_view(const std::string& text) {
    Parser parser(Lexer(text).run());
    ViewDefinition view = parser.parse_statement();
    if (!parser.at_end()) parser.fail_here("trailing input after statement");
    validate(view);
    return view;
}

std::vector<ViewDefinition> parse_views(const std::string& text) {
    Parser parser(Lexer(text).run());
    std::vector<ViewDefinition> views;
    while (!parser.at_end()) {
        ViewDefinition view = parser.parse_statement();
        validate(view);
        views.push_back(std::move(view));
    }
    if (views.empty()) parser.fail_here("no CREATE VIEW statement found");
    return views;
}

} // namespace vsync::esql
