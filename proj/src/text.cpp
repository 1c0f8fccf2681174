#include "oq/text.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace oq {

namespace {

struct Token {
    enum class Kind { Ident, Int, LBracket, RBracket, LParen, RParen, Semi, End };
    Kind kind;
    std::string text;
    uint64_t value = 0;
    uint32_t line = 1;
    uint32_t col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        skip_space();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                step();
            tok_.kind = Token::Kind::Ident;
            tok_.text = text_.substr(start, pos_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            uint64_t v = 0;
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = v * 10 + static_cast<uint64_t>(text_[pos_] - '0');
                step();
            }
            tok_.kind = Token::Kind::Int;
            tok_.text = text_.substr(start, pos_ - start);
            tok_.value = v;
            return;
        }
        step();
        switch (c) {
            case '[': tok_.kind = Token::Kind::LBracket; return;
            case ']': tok_.kind = Token::Kind::RBracket; return;
            case '(': tok_.kind = Token::Kind::LParen; return;
            case ')': tok_.kind = Token::Kind::RParen; return;
            case ';': tok_.kind = Token::Kind::Semi; return;
            default:
                throw parse_error(std::string("unexpected character '") + c + "'", line_,
                                  col_ - 1);
        }
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') step();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') step();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                step();
            } else {
                break;
            }
        }
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    size_t pos_ = 0;
    uint32_t line_ = 1;
    uint32_t col_ = 1;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Module run() {
        Module m;
        while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "var") {
            lex_.take();
            Token name = expect_ident("register name");
            Token size = expect_int("register size");
            if (size.value == 0 || size.value > 1u << 20)
                throw parse_error("register size out of range", size.line, size.col);
            if (m.regs.find(name.text))
                throw parse_error("duplicate register '" + name.text + "'", name.line,
                                  name.col);
            m.regs.add(name.text, static_cast<uint32_t>(size.value));
        }
        m.prog = parse_seq(m.regs);
        if (lex_.peek().kind != Token::Kind::End)
            throw parse_error("trailing input after program", lex_.peek().line,
                              lex_.peek().col);
        return m;
    }

  private:
    InstrPtr parse_seq(const Registers& regs) {
        std::vector<InstrPtr> items;
        items.push_back(parse_instr(regs));
        while (lex_.peek().kind == Token::Kind::Semi) {
            lex_.take();
            // Allow a trailing separator before ')' or end of input.
            if (lex_.peek().kind == Token::Kind::End ||
                lex_.peek().kind == Token::Kind::RParen)
                break;
            items.push_back(parse_instr(regs));
        }
        return make_seq(items);
    }

    InstrPtr parse_instr(const Registers& regs) {
        Token t = expect_ident("instruction mnemonic");
        const std::string& op = t.text;
        if (op == "ID") return make_skip(parse_pos(regs));
        if (op == "X") return make_x(parse_pos(regs));
        if (op == "SR") {
            Token n = expect_int("cascade index");
            return make_sr(static_cast<uint32_t>(n.value), parse_var(regs));
        }
        if (op == "SRI") {
            Token n = expect_int("cascade index");
            return make_sri(static_cast<uint32_t>(n.value), parse_var(regs));
        }
        if (op == "QFT") {
            Token n = expect_int("precision");
            return make_qft(static_cast<uint32_t>(n.value), parse_var(regs));
        }
        if (op == "QFTI") {
            Token n = expect_int("precision");
            return make_qfti(static_cast<uint32_t>(n.value), parse_var(regs));
        }
        if (op == "CU") {
            Position p = parse_pos(regs);
            InstrPtr body;
            if (lex_.peek().kind == Token::Kind::LParen) {
                lex_.take();
                body = parse_seq(regs);
                Token close = lex_.take();
                if (close.kind != Token::Kind::RParen)
                    throw parse_error("expected ')' after control body", close.line,
                                      close.col);
            } else {
                body = parse_instr(regs);
            }
            return make_cu(p, body);
        }
        if (op == "Lshift") return make_lshift(parse_var(regs));
        if (op == "Rshift") return make_rshift(parse_var(regs));
        if (op == "Rev") return make_rev(parse_var(regs));
        throw parse_error("unknown instruction '" + op + "'", t.line, t.col);
    }

    Var parse_var(const Registers& regs) {
        Token name = expect_ident("register name");
        auto v = regs.find(name.text);
        if (!v)
            throw parse_error("undeclared register '" + name.text + "'", name.line,
                              name.col);
        return *v;
    }

    Position parse_pos(const Registers& regs) {
        Token name = expect_ident("register name");
        auto v = regs.find(name.text);
        if (!v)
            throw parse_error("undeclared register '" + name.text + "'", name.line,
                              name.col);
        Token open = lex_.take();
        if (open.kind != Token::Kind::LBracket)
            throw parse_error("expected '[' after register name", open.line, open.col);
        Token off = expect_int("qubit offset");
        Token close = lex_.take();
        if (close.kind != Token::Kind::RBracket)
            throw parse_error("expected ']' after offset", close.line, close.col);
        return Position{*v, static_cast<uint32_t>(off.value)};
    }

    Token expect_ident(const std::string& what) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Ident)
            throw parse_error("expected " + what, t.line, t.col);
        return t;
    }

    Token expect_int(const std::string& what) {
        Token t = lex_.take();
        if (t.kind != Token::Kind::Int)
            throw parse_error("expected " + what, t.line, t.col);
        return t;
    }

    Lexer lex_;
};

void print_one(const Registers& regs, const Instr* i, std::ostringstream& os);

void print_seq_into(const Registers& regs, const Instr* i, std::vector<const Instr*>& out) {
    if (i->op == Op::Seq) {
        print_seq_into(regs, i->left.get(), out);
        print_seq_into(regs, i->right.get(), out);
    } else {
        out.push_back(i);
    }
}

void print_one(const Registers& regs, const Instr* i, std::ostringstream& os) {
    auto pos = [&](const Position& p) {
        os << regs.name_of(p.var) << '[' << p.offset << ']';
    };
    switch (i->op) {
        case Op::Skip: os << "ID "; pos(i->pos); break;
        case Op::X: os << "X "; pos(i->pos); break;
        case Op::SR: os << "SR " << i->num << ' ' << regs.name_of(i->var); break;
        case Op::SRI: os << "SRI " << i->num << ' ' << regs.name_of(i->var); break;
        case Op::QFT: os << "QFT " << i->num << ' ' << regs.name_of(i->var); break;
        case Op::QFTI: os << "QFTI " << i->num << ' ' << regs.name_of(i->var); break;
        case Op::Lshift: os << "Lshift " << regs.name_of(i->var); break;
        case Op::Rshift: os << "Rshift " << regs.name_of(i->var); break;
        case Op::Rev: os << "Rev " << regs.name_of(i->var); break;
        case Op::CU: {
            os << "CU ";
            pos(i->pos);
            os << " (";
            std::vector<const Instr*> body;
            print_seq_into(regs, i->left.get(), body);
            for (size_t k = 0; k < body.size(); ++k) {
                if (k) os << " ; ";
                print_one(regs, body[k], os);
            }
            os << ')';
            break;
        }
        case Op::Seq:
            break;  // flattened by callers
    }
}

}  // namespace

Module parse_module(const std::string& text) { return Parser(text).run(); }

std::string print_instr(const Registers& regs, const InstrPtr& prog) {
    if (!prog) throw std::invalid_argument("print_instr: null program");
    std::vector<const Instr*> items;
    print_seq_into(regs, prog.get(), items);
    std::ostringstream os;
    for (size_t k = 0; k < items.size(); ++k) {
        if (k) os << " ;\n";
        print_one(regs, items[k], os);
    }
    return os.str();
}

std::string print_module(const Registers& regs, const InstrPtr& prog) {
    std::ostringstream os;
    for (Var v = 0; v < regs.count(); ++v)
        os << "var " << regs.name_of(v) << ' ' << regs.size_of(v) << '\n';
    os << '\n' << print_instr(regs, prog) << '\n';
    return os.str();
}

}  // namespace oq
