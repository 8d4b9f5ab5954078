#include "statbridge/guest/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>

#include "statbridge/errors.hpp"

namespace statbridge::guest {

namespace {

enum class Tok { End, Newline, Int, Float, Str, Ident, Keyword, Op, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0;
  std::string sval;
  int line = 1, col = 1;
};

bool is_keyword(const std::string& s) {
  return s == "for" || s == "in" || s == "end" || s == "function" || s == "return" ||
         s == "true" || s == "false" || s == "missing" || s == "nothing" || s == "if" ||
         s == "while" || s == "begin";
}

bool is_block_opener(const std::string& s) {
  return s == "for" || s == "if" || s == "while" || s == "begin" || s == "function";
}

struct LexResult {
  std::vector<Token> tokens;
  bool unterminated_string = false;
};

LexResult lex(const std::string& src) {
  LexResult out;
  int line = 1, col = 1;
  int bracket_depth = 0;  // newlines inside ( ) or [ ] do not end statements
  std::size_t i = 0;
  const std::size_t n = src.size();

  auto push = [&](Tok kind, std::string text, int l, int c) {
    if (kind == Tok::Punct && (text == "(" || text == "[")) ++bracket_depth;
    if (kind == Tok::Punct && (text == ")" || text == "]") && bracket_depth > 0) --bracket_depth;
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = l;
    t.col = c;
    out.tokens.push_back(std::move(t));
  };

  while (i < n) {
    const char c = src[i];
    const int l = line, co = col;
    if (c == '\n') {
      if (bracket_depth == 0) push(Tok::Newline, "\n", l, co);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < n && src[j] == '.' && j + 1 < n && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_float = true;
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < n && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      const std::string text = src.substr(i, j - i);
      Token t;
      t.line = l;
      t.col = co;
      t.text = text;
      if (is_float) {
        t.kind = Tok::Float;
        t.fval = std::strtod(text.c_str(), nullptr);
      } else {
        t.kind = Tok::Int;
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        (void)p;
        if (ec != std::errc()) {
          t.kind = Tok::Float;  // too large for Int64; fall back to double
          t.fval = std::strtod(text.c_str(), nullptr);
        } else {
          t.ival = v;
        }
      }
      out.tokens.push_back(std::move(t));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string text = src.substr(i, j - i);
      const Tok kind = is_keyword(text) ? Tok::Keyword : Tok::Ident;
      push(kind, std::move(text), l, co);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (c == '"') {
      std::string s;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < n) {
        if (src[j] == '\\' && j + 1 < n) {
          const char e = src[j + 1];
          if (e == 'n') s += '\n';
          else if (e == 't') s += '\t';
          else s += e;  // \" \\ \` and anything else taken literally
          j += 2;
          continue;
        }
        if (src[j] == '"') {
          closed = true;
          ++j;
          break;
        }
        if (src[j] == '\n') break;  // strings do not span lines
        s += src[j];
        ++j;
      }
      if (!closed) {
        out.unterminated_string = true;
        return out;
      }
      Token t;
      t.kind = Tok::Str;
      t.sval = std::move(s);
      t.text = src.substr(i, j - i);
      t.line = l;
      t.col = co;
      out.tokens.push_back(std::move(t));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    // Operators, longest match first.
    static const char* three[] = {".==", ".!=", ".<=", ".>=", ".+=", ".-=", ".*=", "./="};
    static const char* two[] = {"==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
                                ".+", ".-", ".*", "./", ".<", ".>"};
    std::string_view rest(src.data() + i, n - i);
    bool matched = false;
    for (const char* op : three) {
      if (rest.substr(0, 3) == op) {
        push(Tok::Op, op, l, co);
        i += 3;
        col += 3;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (const char* op : two) {
      if (rest.substr(0, 2) == op) {
        push(Tok::Op, op, l, co);
        i += 2;
        col += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("+-*/<>=:").find(c) != std::string::npos) {
      push(Tok::Op, std::string(1, c), l, co);
      ++i;
      ++col;
      continue;
    }
    if (std::string("()[],;.?").find(c) != std::string::npos) {
      push(Tok::Punct, std::string(1, c), l, co);
      ++i;
      ++col;
      continue;
    }
    fail("syntax error at " + std::to_string(l) + ":" + std::to_string(co) +
         ": unexpected character '" + std::string(1, c) + "'");
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  NodePtr parse_program() {
    NodePtr block = parse_stmt_list(/*stop_at_end=*/false);
    if (!at_end()) err("unexpected '" + cur().text + "'");
    return block;
  }

 private:
  const Token& cur() const {
    static Token eof;
    return pos_ < toks_.size() ? toks_[pos_] : eof;
  }
  const Token& peek(std::size_t k = 1) const {
    static Token eof;
    return pos_ + k < toks_.size() ? toks_[pos_ + k] : eof;
  }
  bool at_end() const { return pos_ >= toks_.size(); }
  void advance() { ++pos_; }

  bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_op(const char* p) const { return cur().kind == Tok::Op && cur().text == p; }
  bool is_kw(const char* p) const { return cur().kind == Tok::Keyword && cur().text == p; }
  bool is_sep() const { return cur().kind == Tok::Newline || is_punct(";"); }

  [[noreturn]] void err(const std::string& msg) const {
    fail("syntax error at " + std::to_string(cur().line) + ":" + std::to_string(cur().col) +
         ": " + msg);
  }

  void expect_punct(const char* p) {
    if (!is_punct(p)) err(std::string("expected '") + p + "'");
    advance();
  }

  NodePtr make(NodeKind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->line = cur().line;
    n->col = cur().col;
    return n;
  }

  void skip_seps() {
    while (is_sep()) advance();
  }

  NodePtr parse_stmt_list(bool stop_at_end) {
    auto block = make(NodeKind::Block);
    skip_seps();
    while (!at_end() && !(stop_at_end && is_kw("end"))) {
      NodePtr stmt = parse_stmt(stop_at_end);
      if (is_punct(";")) stmt->suppress = true;
      block->kids.push_back(std::move(stmt));
      if (!at_end() && !(stop_at_end && is_kw("end"))) {
        if (!is_sep()) err("expected newline or ';' after statement");
        skip_seps();
      }
    }
    return block;
  }

  NodePtr parse_stmt(bool inside_block) {
    if (is_kw("for")) return parse_for(inside_block);
    if (is_kw("function")) return parse_function();
    if (is_kw("return")) {
      auto n = make(NodeKind::Return);
      advance();
      if (!at_end() && !is_sep() && !is_kw("end")) n->kids.push_back(parse_expr());
      return n;
    }
    if (is_kw("if") || is_kw("while") || is_kw("begin"))
      err("unsupported construct '" + cur().text + "'");
    if (is_kw("end")) err("unmatched 'end'");

    // Destructuring target: a, b = expr
    if (cur().kind == Tok::Ident && peek().kind == Tok::Punct && peek().text == ",") {
      std::size_t k = pos_;
      bool matches = true;
      while (true) {
        if (k >= toks_.size() || toks_[k].kind != Tok::Ident) {
          matches = false;
          break;
        }
        ++k;
        if (k < toks_.size() && toks_[k].kind == Tok::Punct && toks_[k].text == ",") {
          ++k;
          continue;
        }
        break;
      }
      matches = matches && k < toks_.size() && toks_[k].kind == Tok::Op && toks_[k].text == "=";
      if (matches) {
        auto target = make(NodeKind::TupleTarget);
        while (true) {
          auto id = make(NodeKind::Ident);
          id->name = cur().text;
          advance();
          target->kids.push_back(std::move(id));
          if (is_punct(",")) {
            advance();
            continue;
          }
          break;
        }
        auto assign = make(NodeKind::Assign);
        advance();  // '='
        assign->kids.push_back(std::move(target));
        assign->kids.push_back(parse_expr());
        return assign;
      }
    }

    NodePtr e = parse_expr();
    if (cur().kind == Tok::Op) {
      const std::string& t = cur().text;
      std::string op;
      bool dotted = false;
      if (t == "=") op = "";
      else if (t == "+=") op = "+";
      else if (t == "-=") op = "-";
      else if (t == "*=") op = "*";
      else if (t == "/=") op = "/";
      else if (t == ".+=") op = "+", dotted = true;
      else if (t == ".-=") op = "-", dotted = true;
      else if (t == ".*=") op = "*", dotted = true;
      else if (t == "./=") op = "/", dotted = true;
      else return e;
      if (e->kind != NodeKind::Ident && e->kind != NodeKind::Index && e->kind != NodeKind::Field)
        err("cannot assign to this expression");
      auto assign = make(NodeKind::Assign);
      assign->op = op;
      assign->dotted = dotted;
      advance();
      assign->kids.push_back(std::move(e));
      assign->kids.push_back(parse_expr());
      return assign;
    }
    return e;
  }

  NodePtr parse_for(bool) {
    auto n = make(NodeKind::For);
    advance();  // for
    if (cur().kind != Tok::Ident) err("expected loop variable after 'for'");
    n->name = cur().text;
    advance();
    if (!is_kw("in")) err("expected 'in'");
    advance();
    n->kids.push_back(parse_expr());
    n->kids.push_back(parse_stmt_list(/*stop_at_end=*/true));
    if (!is_kw("end")) err("expected 'end' to close 'for'");
    advance();
    return n;
  }

  NodePtr parse_function() {
    auto n = make(NodeKind::FunctionDef);
    advance();  // function
    if (cur().kind != Tok::Ident) err("expected function name");
    n->name = cur().text;
    advance();
    expect_punct("(");
    while (!is_punct(")")) {
      if (cur().kind != Tok::Ident) err("expected parameter name");
      n->strs.push_back(cur().text);
      advance();
      if (is_punct(",")) {
        advance();
        continue;
      }
      break;
    }
    expect_punct(")");
    n->kids.push_back(parse_stmt_list(/*stop_at_end=*/true));
    if (!is_kw("end")) err("expected 'end' to close 'function'");
    advance();
    return n;
  }

  NodePtr parse_expr() { return parse_comparison(); }

  NodePtr parse_comparison() {
    NodePtr lhs = parse_range();
    while (cur().kind == Tok::Op) {
      const std::string& t = cur().text;
      const bool dotted = t.size() == 3 || (t.size() == 2 && t[0] == '.');
      std::string base = dotted ? t.substr(1) : t;
      if (base != "==" && base != "!=" && base != "<" && base != ">" && base != "<=" &&
          base != ">=")
        break;
      auto n = make(NodeKind::Binary);
      n->op = base;
      n->dotted = dotted;
      advance();
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(parse_range());
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr parse_range() {
    NodePtr lhs = parse_additive();
    if (is_op(":")) {
      auto n = make(NodeKind::Range);
      advance();
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(parse_additive());
      return n;
    }
    return lhs;
  }

  NodePtr parse_additive() {
    NodePtr lhs = parse_multiplicative();
    while (is_op("+") || is_op("-") || is_op(".+") || is_op(".-")) {
      auto n = make(NodeKind::Binary);
      n->dotted = cur().text[0] == '.';
      n->op = n->dotted ? cur().text.substr(1) : cur().text;
      advance();
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(parse_multiplicative());
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr parse_multiplicative() {
    NodePtr lhs = parse_unary();
    while (is_op("*") || is_op("/") || is_op(".*") || is_op("./")) {
      auto n = make(NodeKind::Binary);
      n->dotted = cur().text[0] == '.';
      n->op = n->dotted ? cur().text.substr(1) : cur().text;
      advance();
      n->kids.push_back(std::move(lhs));
      n->kids.push_back(parse_unary());
      lhs = std::move(n);
    }
    return lhs;
  }

  NodePtr parse_unary() {
    if (is_op("-")) {
      auto n = make(NodeKind::Unary);
      n->op = "-";
      advance();
      n->kids.push_back(parse_unary());
      return n;
    }
    return parse_postfix();
  }

  NodePtr parse_postfix() {
    NodePtr base = parse_primary();
    while (true) {
      if (is_punct("(")) {
        if (base->kind != NodeKind::Ident) err("only named functions can be called");
        auto call = make(NodeKind::Call);
        call->name = base->name;
        advance();
        parse_args(*call);
        base = std::move(call);
        continue;
      }
      if (is_punct(".") && peek().kind == Tok::Punct && peek().text == "(") {
        if (base->kind != NodeKind::Ident) err("broadcast call needs a function name");
        auto call = make(NodeKind::Call);
        call->name = base->name;
        call->dotted = true;
        advance();
        advance();
        parse_args(*call);
        base = std::move(call);
        continue;
      }
      if (is_punct(".")) {
        advance();
        if (cur().kind != Tok::Ident) err("expected field name after '.'");
        auto field = make(NodeKind::Field);
        field->name = cur().text;
        advance();
        field->kids.push_back(std::move(base));
        base = std::move(field);
        continue;
      }
      if (is_punct("[")) {
        auto idx = make(NodeKind::Index);
        advance();
        idx->kids.push_back(std::move(base));
        while (!is_punct("]")) {
          idx->kids.push_back(parse_expr());
          if (is_punct(",")) {
            advance();
            continue;
          }
          break;
        }
        expect_punct("]");
        if (idx->kids.size() < 2) err("empty index");
        base = std::move(idx);
        continue;
      }
      break;
    }
    return base;
  }

  void parse_args(Node& call) {
    while (!is_punct(")")) {
      call.kids.push_back(parse_expr());
      if (is_punct(",")) {
        advance();
        continue;
      }
      break;
    }
    expect_punct(")");
  }

  NodePtr parse_primary() {
    switch (cur().kind) {
      case Tok::Int: {
        auto n = make(NodeKind::IntLit);
        n->ival = cur().ival;
        advance();
        return n;
      }
      case Tok::Float: {
        auto n = make(NodeKind::FloatLit);
        n->fval = cur().fval;
        advance();
        return n;
      }
      case Tok::Str: {
        auto n = make(NodeKind::StrLit);
        n->sval = cur().sval;
        advance();
        return n;
      }
      case Tok::Ident: {
        auto n = make(NodeKind::Ident);
        n->name = cur().text;
        advance();
        return n;
      }
      case Tok::Keyword: {
        if (is_kw("true") || is_kw("false")) {
          auto n = make(NodeKind::BoolLit);
          n->ival = is_kw("true") ? 1 : 0;
          advance();
          return n;
        }
        if (is_kw("missing")) {
          auto n = make(NodeKind::MissingLit);
          advance();
          return n;
        }
        if (is_kw("nothing")) {
          auto n = make(NodeKind::NothingLit);
          advance();
          return n;
        }
        err("unexpected keyword '" + cur().text + "'");
      }
      case Tok::Punct: {
        if (is_punct("(")) {
          advance();
          NodePtr first = parse_expr();
          if (is_punct(",")) {
            auto tup = make(NodeKind::Call);
            tup->name = "tuple";
            tup->kids.push_back(std::move(first));
            while (is_punct(",")) {
              advance();
              if (is_punct(")")) break;
              tup->kids.push_back(parse_expr());
            }
            expect_punct(")");
            return tup;
          }
          expect_punct(")");
          return first;
        }
        if (is_punct("[")) {
          auto lit = make(NodeKind::VectorLit);
          advance();
          while (!is_punct("]")) {
            lit->kids.push_back(parse_expr());
            if (is_punct(",")) {
              advance();
              continue;
            }
            break;
          }
          expect_punct("]");
          return lit;
        }
        err("unexpected '" + cur().text + "'");
      }
      default:
        err(at_end() ? "unexpected end of input" : "unexpected '" + cur().text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Completeness check_complete(const std::string& src) {
  LexResult lr;
  try {
    lr = lex(src);
  } catch (const error&) {
    return Completeness::invalid;
  }
  if (lr.unterminated_string) return Completeness::incomplete;

  int block_depth = 0;
  std::vector<char> brackets;
  for (const Token& t : lr.tokens) {
    if (t.kind == Tok::Keyword) {
      if (is_block_opener(t.text)) ++block_depth;
      else if (t.text == "end") {
        if (block_depth == 0) return Completeness::invalid;
        --block_depth;
      }
    } else if (t.kind == Tok::Punct) {
      if (t.text == "(" || t.text == "[") {
        brackets.push_back(t.text[0]);
      } else if (t.text == ")" || t.text == "]") {
        const char want = t.text[0] == ')' ? '(' : '[';
        if (brackets.empty() || brackets.back() != want) return Completeness::invalid;
        brackets.pop_back();
      }
    }
  }
  if (block_depth > 0 || !brackets.empty()) return Completeness::incomplete;

  try {
    Parser(std::move(lr.tokens)).parse_program();
    return Completeness::complete;
  } catch (const error&) {
    return Completeness::invalid;
  }
}

NodePtr parse(const std::string& src) {
  LexResult lr = lex(src);
  if (lr.unterminated_string) fail("syntax error: unterminated string literal");
  return Parser(std::move(lr.tokens)).parse_program();
}

std::string dump(const Node& n) {
  std::string out = "(";
  switch (n.kind) {
    case NodeKind::Block: out += "block"; break;
    case NodeKind::IntLit: out += "int " + std::to_string(n.ival); break;
    case NodeKind::FloatLit: out += "float " + std::to_string(n.fval); break;
    case NodeKind::StrLit: out += "str \"" + n.sval + "\""; break;
    case NodeKind::BoolLit: out += n.ival ? "true" : "false"; break;
    case NodeKind::MissingLit: out += "missing"; break;
    case NodeKind::NothingLit: out += "nothing"; break;
    case NodeKind::Ident: out += "id " + n.name; break;
    case NodeKind::VectorLit: out += "vec"; break;
    case NodeKind::Assign:
      out += "assign";
      if (!n.op.empty()) out += " " + n.op + "=";
      if (n.dotted) out += " dotted";
      if (n.global_rebind) out += " global";
      break;
    case NodeKind::TupleTarget: out += "targets"; break;
    case NodeKind::Binary: out += std::string("binop ") + (n.dotted ? "." : "") + n.op; break;
    case NodeKind::Unary: out += "unary " + n.op; break;
    case NodeKind::Range: out += "range"; break;
    case NodeKind::Index: out += "index"; break;
    case NodeKind::Field: out += "field " + n.name; break;
    case NodeKind::Call:
      out += std::string("call ") + n.name;
      if (n.dotted) out += " dotted";
      break;
    case NodeKind::For: out += "for " + n.name; break;
    case NodeKind::FunctionDef: {
      out += "function " + n.name + " (";
      for (std::size_t k = 0; k < n.strs.size(); ++k) {
        if (k) out += " ";
        out += n.strs[k];
      }
      out += ")";
      break;
    }
    case NodeKind::Return: out += "return"; break;
  }
  for (const auto& kid : n.kids) out += " " + dump(*kid);
  out += ")";
  return out;
}

}  // namespace statbridge::guest
