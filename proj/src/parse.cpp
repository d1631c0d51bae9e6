#include "ltlfmuc/formula.hpp"

#include <cctype>
#include <sstream>

namespace ltlfmuc {
namespace {

enum class TokKind : std::uint8_t {
    Ident,   // [a-z][A-Za-z0-9_]*, except the keywords
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    OpNext,      // X
    OpWeakNext,  // WX
    OpUntil,     // U
    OpRelease,   // R
    OpFinally,   // F
    OpGlobally,  // G
    End,
};

struct Token {
    TokKind kind;
    std::string text;
    std::size_t line, column;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_ws_and_comments();
        std::size_t line = line_, col = col_;
        if (pos_ >= text_.size()) return {TokKind::End, "", line, col};
        char c = text_[pos_];
        switch (c) {
            case '!': advance(); return {TokKind::Bang, "!", line, col};
            case '&': advance(); return {TokKind::Amp, "&", line, col};
            case '|': advance(); return {TokKind::Pipe, "|", line, col};
            case '(': advance(); return {TokKind::LParen, "(", line, col};
            case ')': advance(); return {TokKind::RParen, ")", line, col};
            case '-':
                advance();
                if (pos_ < text_.size() && text_[pos_] == '>') {
                    advance();
                    return {TokKind::Arrow, "->", line, col};
                }
                throw ParseError("expected '>' after '-'", line_, col_);
            default:
                break;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            std::string word = take_word();
            if (word == "true")  return {TokKind::True, word, line, col};
            if (word == "false") return {TokKind::False, word, line, col};
            return {TokKind::Ident, word, line, col};
        }
        if (std::isupper(static_cast<unsigned char>(c))) {
            // Operators are maximal uppercase runs; anything not in the
            // operator set is an error (identifiers start lowercase).
            std::string word;
            while (pos_ < text_.size() &&
                   std::isupper(static_cast<unsigned char>(text_[pos_]))) {
                word.push_back(text_[pos_]);
                advance();
            }
            if (word == "X")  return {TokKind::OpNext, word, line, col};
            if (word == "WX") return {TokKind::OpWeakNext, word, line, col};
            if (word == "U")  return {TokKind::OpUntil, word, line, col};
            if (word == "R")  return {TokKind::OpRelease, word, line, col};
            if (word == "F")  return {TokKind::OpFinally, word, line, col};
            if (word == "G")  return {TokKind::OpGlobally, word, line, col};
            throw ParseError("unknown operator '" + word + "'", line, col);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; } else { ++col_; }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string take_word() {
        std::string word;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                word.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return word;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1, col_ = 1;
};

class Parser {
public:
    Parser(FormulaArena& arena, std::string_view text)
        : arena_(arena), lexer_(text) { bump(); }

    FormulaId parse() {
        FormulaId f = parse_implies();
        if (tok_.kind != TokKind::End)
            throw ParseError("unexpected '" + tok_.text + "' after formula",
                             tok_.line, tok_.column);
        return f;
    }

private:
    void bump() { tok_ = lexer_.next(); }

    bool accept(TokKind k) {
        if (tok_.kind != k) return false;
        bump();
        return true;
    }

    // implies := or ('->' implies)?            right-assoc, loosest
    FormulaId parse_implies() {
        FormulaId lhs = parse_or();
        if (accept(TokKind::Arrow)) return arena_.make_implies(lhs, parse_implies());
        return lhs;
    }

    // or := and ('|' and)*                     left-assoc
    FormulaId parse_or() {
        FormulaId lhs = parse_and();
        while (accept(TokKind::Pipe)) lhs = arena_.make_or(lhs, parse_and());
        return lhs;
    }

    // and := until ('&' until)*                left-assoc
    FormulaId parse_and() {
        FormulaId lhs = parse_until();
        while (accept(TokKind::Amp)) lhs = arena_.make_and(lhs, parse_until());
        return lhs;
    }

    // until := unary (('U' | 'R') until)?      right-assoc
    FormulaId parse_until() {
        FormulaId lhs = parse_unary();
        if (accept(TokKind::OpUntil))   return arena_.make_until(lhs, parse_until());
        if (accept(TokKind::OpRelease)) return arena_.make_release(lhs, parse_until());
        return lhs;
    }

    FormulaId parse_unary() {
        Token t = tok_;
        switch (t.kind) {
            case TokKind::Bang:       bump(); return arena_.make_not(parse_unary());
            case TokKind::OpNext:     bump(); return arena_.make_next(parse_unary());
            case TokKind::OpWeakNext: bump(); return arena_.make_weak_next(parse_unary());
            case TokKind::OpFinally:  bump(); return arena_.make_eventually(parse_unary());
            case TokKind::OpGlobally: bump(); return arena_.make_globally(parse_unary());
            default:                  return parse_primary();
        }
    }

    FormulaId parse_primary() {
        Token t = tok_;
        switch (t.kind) {
            case TokKind::True:  bump(); return arena_.make_true();
            case TokKind::False: bump(); return arena_.make_false();
            case TokKind::Ident: bump(); return arena_.make_atom(t.text);
            case TokKind::LParen: {
                bump();
                FormulaId f = parse_implies();
                if (!accept(TokKind::RParen))
                    throw ParseError("expected ')'", tok_.line, tok_.column);
                return f;
            }
            case TokKind::End:
                throw ParseError("unexpected end of input", t.line, t.column);
            default:
                throw ParseError("unexpected '" + t.text + "'", t.line, t.column);
        }
    }

    FormulaArena& arena_;
    Lexer lexer_;
    Token tok_;
};

// Binding strength used for minimal parenthesization when printing.
// Higher binds tighter; unary operators bind tightest.
int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::Implies: return 1;
        case NodeKind::Or:      return 2;
        case NodeKind::And:     return 3;
        case NodeKind::Until:
        case NodeKind::Release: return 4;
        default:                return 5;
    }
}

void print_rec(const FormulaArena& arena, FormulaId f, int parent_prec,
               std::string& out) {
    const FormulaNode& n = arena.node(f);
    int prec = precedence(n.kind);
    bool paren = prec < parent_prec;
    if (paren) out.push_back('(');
    switch (n.kind) {
        case NodeKind::Atom:
            out += arena.atom_name(n.atom);
            break;
        case NodeKind::True:
            out += "true";
            break;
        case NodeKind::False:
            out += "false";
            break;
        case NodeKind::Not:
            out.push_back('!');
            print_rec(arena, n.child[0], 5, out);
            break;
        case NodeKind::Next:
        case NodeKind::WeakNext:
        case NodeKind::Eventually:
        case NodeKind::Globally:
            out += n.kind == NodeKind::Next ? "X"
                 : n.kind == NodeKind::WeakNext ? "WX"
                 : n.kind == NodeKind::Eventually ? "F" : "G";
            out.push_back(' ');
            print_rec(arena, n.child[0], 5, out);
            break;
        case NodeKind::And:
        case NodeKind::Or: {
            const char* op = n.kind == NodeKind::And ? " & " : " | ";
            // Left-assoc: same precedence on the left needs no parens.
            print_rec(arena, n.child[0], prec, out);
            out += op;
            print_rec(arena, n.child[1], prec + 1, out);
            break;
        }
        case NodeKind::Until:
        case NodeKind::Release: {
            // Right-assoc: same precedence on the right needs no parens.
            print_rec(arena, n.child[0], prec + 1, out);
            out += n.kind == NodeKind::Until ? " U " : " R ";
            print_rec(arena, n.child[1], prec, out);
            break;
        }
        case NodeKind::Implies:
            print_rec(arena, n.child[0], prec + 1, out);
            out += " -> ";
            print_rec(arena, n.child[1], prec, out);
            break;
    }
    if (paren) out.push_back(')');
}

} // namespace

FormulaId parse_formula(FormulaArena& arena, std::string_view text) {
    return Parser(arena, text).parse();
}

std::string print_formula(const FormulaArena& arena, FormulaId f) {
    std::string out;
    print_rec(arena, f, 0, out);
    return out;
}

} // namespace ltlfmuc
