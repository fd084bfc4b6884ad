#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcs/ast.hpp"
#include "bcs/source.hpp"

namespace bcs {

using ParseDiagnostic = Diagnostic;

struct ParseResult {
    std::optional<Ast> ast;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return ast.has_value(); }
};

namespace detail {

enum class Tok {
    Number,
    Ident,
    KwModule,
    KwFor,
    KwIf,
    KwElse,
    KwTrue,
    KwFalse,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    Eq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    End,
};

struct Token {
    Tok kind;
    std::size_t start;
    std::size_t end;
};

struct SyntaxError {
    std::size_t start;
    std::size_t end;
    std::string message;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, src_.size(), src_.size()});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '/' && peek(1) == '*') {
                const auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos)
                    throw SyntaxError{src_.size(), src_.size(), "unterminated block comment"};
                pos_ = close + 2;
            } else {
                break;
            }
        }
    }

    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
    static bool digit(char c) { return c >= '0' && c <= '9'; }

    Token next() {
        const std::size_t start = pos_;
        const char c = src_[pos_];
        if (digit(c) || (c == '.' && digit(peek(1)))) {
            while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
                if (p < src_.size() && digit(src_[p])) {
                    pos_ = p;
                    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
                }
            }
            return {Tok::Number, start, pos_};
        }
        if (ident_start(c)) {
            ++pos_;
            while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
            const std::string_view word = src_.substr(start, pos_ - start);
            Tok k = Tok::Ident;
            if (word == "module") k = Tok::KwModule;
            else if (word == "for") k = Tok::KwFor;
            else if (word == "if") k = Tok::KwIf;
            else if (word == "else") k = Tok::KwElse;
            else if (word == "true") k = Tok::KwTrue;
            else if (word == "false") k = Tok::KwFalse;
            if (word == "$") throw SyntaxError{start, pos_, "expected identifier after '$'"};
            return {k, start, pos_};
        }
        auto one = [&](Tok k) {
            ++pos_;
            return Token{k, start, pos_};
        };
        auto two = [&](Tok k) {
            pos_ += 2;
            return Token{k, start, pos_};
        };
        switch (c) {
            case '(': return one(Tok::LParen);
            case ')': return one(Tok::RParen);
            case '[': return one(Tok::LBracket);
            case ']': return one(Tok::RBracket);
            case '{': return one(Tok::LBrace);
            case '}': return one(Tok::RBrace);
            case ',': return one(Tok::Comma);
            case ';': return one(Tok::Semicolon);
            case ':': return one(Tok::Colon);
            case '+': return one(Tok::Plus);
            case '-': return one(Tok::Minus);
            case '*': return one(Tok::Star);
            case '/': return one(Tok::Slash);
            case '%': return one(Tok::Percent);
            case '<': return peek(1) == '=' ? two(Tok::LessEq) : one(Tok::Less);
            case '>': return peek(1) == '=' ? two(Tok::GreaterEq) : one(Tok::Greater);
            case '=': return peek(1) == '=' ? two(Tok::Eq) : one(Tok::Assign);
            case '!': return peek(1) == '=' ? two(Tok::NotEq) : one(Tok::Bang);
            case '&':
                if (peek(1) == '&') return two(Tok::AndAnd);
                break;
            case '|':
                if (peek(1) == '|') return two(Tok::OrOr);
                break;
            default: break;
        }
        // Report a whole UTF-8 sequence as one offending character.
        std::size_t end = pos_ + 1;
        while (end < src_.size() && (static_cast<unsigned char>(src_[end]) & 0xC0) == 0x80) ++end;
        throw SyntaxError{start, end, "unexpected character"};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

/// Recursive-descent parser. Nodes are built with provisional ids and renumbered in
/// pre-order once parsing succeeds.
class Parser {
public:
    Parser(std::string_view src, std::vector<Token> toks) : src_(src), toks_(std::move(toks)) {}

    std::vector<AstNode> run() {
        const AstId root = make(AstKind::Block, 0, src_.size());
        while (cur().kind != Tok::End) {
            const AstId s = statement();
            nodes_[root].children.push_back(s);
        }
        return renumber(root);
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek_tok(std::size_t ahead) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& prev() const { return toks_[pos_ - 1]; }
    std::string_view text(const Token& t) const { return src_.substr(t.start, t.end - t.start); }

    Token advance() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (cur().kind != k) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail_here(const std::string& what) const {
        const Token& t = cur();
        if (t.kind == Tok::End) throw SyntaxError{t.start, t.end, what + ", found end of input"};
        throw SyntaxError{t.start, t.end, what + ", found '" + std::string(text(t)) + "'"};
    }

    Token expect(Tok k, const char* what) {
        if (cur().kind != k) fail_here(std::string("expected ") + what);
        return advance();
    }

    /// Statement terminators are anchored right after the previous token.
    void expect_semicolon() {
        if (cur().kind == Tok::Semicolon) {
            advance();
            return;
        }
        const std::size_t at = pos_ > 0 ? prev().end : 0;
        throw SyntaxError{at, at, "expected ';'"};
    }

    AstId make(AstKind kind, std::size_t start, std::size_t end) {
        AstNode n;
        n.id = static_cast<AstId>(nodes_.size());
        n.kind = kind;
        n.span.start = start;
        n.span.end = end;
        nodes_.push_back(std::move(n));
        return nodes_.back().id;
    }
    AstNode& at(AstId id) { return nodes_[static_cast<std::size_t>(id)]; }
    void finish(AstId id) { at(id).span.end = prev().end; }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxNesting) {
                const Token& t = p.cur();
                throw SyntaxError{t.start, t.end, "nesting too deep"};
            }
        }
        ~DepthGuard() { --p.depth_; }
    };
    static constexpr int kMaxNesting = 200;

    AstId statement() {
        DepthGuard guard(*this);
        const Token& t = cur();
        switch (t.kind) {
            case Tok::Semicolon: {
                advance();
                return make(AstKind::Block, t.start, t.end);
            }
            case Tok::LBrace: return block();
            case Tok::KwModule: return module_def();
            case Tok::KwFor: return for_stmt();
            case Tok::KwIf: return if_stmt();
            case Tok::Ident: {
                if (peek_tok(1).kind == Tok::Assign) return assignment();
                if (peek_tok(1).kind == Tok::LParen) return instantiation();
                advance();
                fail_here("expected '(' or '='");
            }
            default: fail_here("expected statement");
        }
    }

    AstId block() {
        const Token open = expect(Tok::LBrace, "'{'");
        const AstId id = make(AstKind::Block, open.start, open.end);
        while (cur().kind != Tok::RBrace) {
            if (cur().kind == Tok::End)
                throw SyntaxError{src_.size(), src_.size(), "unterminated block: expected '}'"};
            const AstId s = statement();
            at(id).children.push_back(s);
        }
        advance();
        finish(id);
        return id;
    }

    AstId assignment() {
        const Token name = advance();
        const AstId id = make(AstKind::Assignment, name.start, name.end);
        at(id).name = std::string(text(name));
        expect(Tok::Assign, "'='");
        const AstId value = expression();
        at(id).children.push_back(value);
        expect_semicolon();
        finish(id);
        return id;
    }

    AstId module_def() {
        const Token kw = advance();
        const Token name = expect(Tok::Ident, "module name");
        const AstId id = make(AstKind::ModuleDef, kw.start, kw.end);
        at(id).name = std::string(text(name));
        expect(Tok::LParen, "'('");
        while (cur().kind != Tok::RParen) {
            const Token p = expect(Tok::Ident, "parameter name");
            const AstId param = make(AstKind::Assignment, p.start, p.end);
            at(param).name = std::string(text(p));
            if (accept(Tok::Assign)) {
                const AstId def = expression();
                at(param).children.push_back(def);
            }
            finish(param);
            at(id).children.push_back(param);
            at(id).arg_names.emplace_back(text(p));
            if (!accept(Tok::Comma)) break;
        }
        expect(Tok::RParen, "')' or ','");
        const AstId body = statement();
        at(id).children.push_back(body);
        finish(id);
        return id;
    }

    AstId for_stmt() {
        const Token kw = advance();
        const AstId id = make(AstKind::For, kw.start, kw.end);
        expect(Tok::LParen, "'('");
        const Token var = expect(Tok::Ident, "loop variable");
        at(id).name = std::string(text(var));
        expect(Tok::Assign, "'='");
        const AstId iterable = expression();
        at(id).children.push_back(iterable);
        expect(Tok::RParen, "')'");
        const AstId body = statement();
        at(id).children.push_back(body);
        finish(id);
        return id;
    }

    AstId if_stmt() {
        const Token kw = advance();
        const AstId id = make(AstKind::If, kw.start, kw.end);
        expect(Tok::LParen, "'('");
        const AstId cond = expression();
        at(id).children.push_back(cond);
        expect(Tok::RParen, "')'");
        const AstId then_branch = statement();
        at(id).children.push_back(then_branch);
        if (accept(Tok::KwElse)) {
            const AstId else_branch = statement();
            at(id).children.push_back(else_branch);
        }
        finish(id);
        return id;
    }

    AstId instantiation() {
        const Token name = advance();
        const AstId id = make(AstKind::Instantiation, name.start, name.end);
        at(id).name = std::string(text(name));
        arguments(id);
        if (cur().kind == Tok::Semicolon) {
            advance();
        } else if (cur().kind == Tok::Ident || cur().kind == Tok::LBrace || cur().kind == Tok::KwFor ||
                   cur().kind == Tok::KwIf) {
            const AstId child = statement();
            at(id).children.push_back(child);
        } else {
            expect_semicolon();
        }
        finish(id);
        return id;
    }

    void arguments(AstId owner) {
        expect(Tok::LParen, "'('");
        while (cur().kind != Tok::RParen) {
            std::string arg_name;
            if (cur().kind == Tok::Ident && peek_tok(1).kind == Tok::Assign) {
                arg_name = std::string(text(advance()));
                advance();
            }
            const AstId value = expression();
            at(owner).children.push_back(value);
            at(owner).arg_names.push_back(std::move(arg_name));
            if (!accept(Tok::Comma)) break;
        }
        expect(Tok::RParen, "')' or ','");
    }

    // Expressions, lowest precedence first.
    AstId expression() {
        DepthGuard guard(*this);
        return logical_or();
    }

    AstId binary(AstId lhs, AstId rhs, const Token& op) {
        const AstId id = make(AstKind::BinaryOp, at(lhs).span.start, at(rhs).span.end);
        at(id).name = std::string(text(op));
        at(id).children = {lhs, rhs};
        return id;
    }

    template <typename Next, typename... Ops>
    AstId left_assoc(Next next, Ops... ops) {
        AstId lhs = (this->*next)();
        while (((cur().kind == ops) || ...)) {
            const Token op = advance();
            const AstId rhs = (this->*next)();
            lhs = binary(lhs, rhs, op);
        }
        return lhs;
    }

    AstId logical_or() { return left_assoc(&Parser::logical_and, Tok::OrOr); }
    AstId logical_and() { return left_assoc(&Parser::equality, Tok::AndAnd); }
    AstId equality() { return left_assoc(&Parser::comparison, Tok::Eq, Tok::NotEq); }
    AstId comparison() {
        return left_assoc(&Parser::additive, Tok::Less, Tok::LessEq, Tok::Greater, Tok::GreaterEq);
    }
    AstId additive() { return left_assoc(&Parser::multiplicative, Tok::Plus, Tok::Minus); }
    AstId multiplicative() { return left_assoc(&Parser::unary, Tok::Star, Tok::Slash, Tok::Percent); }

    AstId unary() {
        if (cur().kind == Tok::Minus || cur().kind == Tok::Plus || cur().kind == Tok::Bang) {
            DepthGuard guard(*this);
            const Token op = advance();
            const AstId operand = unary();
            const AstId id = make(AstKind::UnaryOp, op.start, at(operand).span.end);
            at(id).name = std::string(text(op));
            at(id).children = {operand};
            return id;
        }
        return postfix();
    }

    AstId postfix() {
        AstId base = primary();
        while (cur().kind == Tok::LBracket) {
            advance();
            const AstId index = expression();
            expect(Tok::RBracket, "']'");
            const AstId id = make(AstKind::Index, at(base).span.start, prev().end);
            at(id).children = {base, index};
            base = id;
        }
        return base;
    }

    AstId primary() {
        const Token t = cur();
        switch (t.kind) {
            case Tok::Number: {
                advance();
                const AstId id = make(AstKind::NumberLit, t.start, t.end);
                at(id).number = std::strtod(std::string(text(t)).c_str(), nullptr);
                return id;
            }
            case Tok::KwTrue:
            case Tok::KwFalse: {
                advance();
                const AstId id = make(AstKind::BoolLit, t.start, t.end);
                at(id).number = t.kind == Tok::KwTrue ? 1 : 0;
                return id;
            }
            case Tok::Ident: {
                advance();
                if (cur().kind == Tok::LParen) {
                    const AstId id = make(AstKind::Call, t.start, t.end);
                    at(id).name = std::string(text(t));
                    arguments(id);
                    finish(id);
                    return id;
                }
                const AstId id = make(AstKind::Ident, t.start, t.end);
                at(id).name = std::string(text(t));
                return id;
            }
            case Tok::LParen: {
                advance();
                const AstId inner = expression();
                expect(Tok::RParen, "')'");
                at(inner).span.start = t.start;
                at(inner).span.end = prev().end;
                return inner;
            }
            case Tok::LBracket: return vector_or_range();
            default: fail_here("expected expression");
        }
    }

    AstId vector_or_range() {
        const Token open = advance();
        if (accept(Tok::RBracket)) return make(AstKind::VectorLit, open.start, prev().end);
        const AstId first = expression();
        if (accept(Tok::Colon)) {
            const AstId id = make(AstKind::RangeLit, open.start, open.end);
            at(id).children.push_back(first);
            const AstId second = expression();
            at(id).children.push_back(second);
            if (accept(Tok::Colon)) {
                const AstId third = expression();
                at(id).children.push_back(third);
            }
            expect(Tok::RBracket, "']'");
            finish(id);
            return id;
        }
        const AstId id = make(AstKind::VectorLit, open.start, open.end);
        at(id).children.push_back(first);
        while (accept(Tok::Comma)) {
            if (cur().kind == Tok::RBracket) break;
            const AstId e = expression();
            at(id).children.push_back(e);
        }
        expect(Tok::RBracket, "']' or ','");
        finish(id);
        return id;
    }

    std::vector<AstNode> renumber(AstId root) {
        std::vector<AstId> order;
        std::vector<AstId> stack{root};
        while (!stack.empty()) {
            const AstId id = stack.back();
            stack.pop_back();
            order.push_back(id);
            const auto& ch = at(id).children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        std::vector<AstId> new_id(nodes_.size(), -1);
        for (std::size_t i = 0; i < order.size(); ++i) new_id[static_cast<std::size_t>(order[i])] = static_cast<AstId>(i);
        std::vector<AstNode> out;
        out.reserve(order.size());
        for (AstId old : order) {
            AstNode n = std::move(at(old));
            n.id = new_id[static_cast<std::size_t>(old)];
            for (AstId& c : n.children) c = new_id[static_cast<std::size_t>(c)];
            out.push_back(std::move(n));
        }
        for (const AstNode& n : out)
            for (AstId c : n.children) out[static_cast<std::size_t>(c)].parent = n.id;
        return out;
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<AstNode> nodes_;
    int depth_ = 0;
};

}  // namespace detail

inline ParseResult parse(std::string source) {
    ParseResult result;
    const LineIndex lines(source);
    try {
        auto toks = detail::Lexer(source).run();
        auto nodes = detail::Parser(source, std::move(toks)).run();
        for (AstNode& n : nodes) n.span = lines.span(n.span.start, n.span.end);
        result.ast.emplace(std::move(source), std::move(nodes));
    } catch (const detail::SyntaxError& e) {
        result.diagnostics.push_back({lines.span(e.start, e.end), e.message, Severity::error});
    }
    return result;
}

}  // namespace bcs
