#include "sosie/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <utility>

#include "sosie/diag.hpp"

namespace sosie {

namespace {

enum class Tok {
  End, Ident, Int, Str,
  // keywords
  KwFn, KwLet, KwIf, KwElse, KwWhile, KwReturn, KwBreak, KwContinue, KwThrow,
  KwTry, KwCatch, KwAssert, KwTrue, KwFalse, KwInt, KwBool, KwStr, KwArray,
  // punctuation
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Semi, Colon, Arrow,
  Assign, Plus, Minus, Star, Slash, Percent,
  Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;   // identifier name or decoded string literal
  int64_t int_val = 0;
  SourcePos pos;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer literal";
    case Tok::Str: return "string literal";
    case Tok::KwFn: return "'fn'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwBreak: return "'break'";
    case Tok::KwContinue: return "'continue'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwTry: return "'try'";
    case Tok::KwCatch: return "'catch'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwInt: return "'Int'";
    case Tok::KwBool: return "'Bool'";
    case Tok::KwStr: return "'Str'";
    case Tok::KwArray: return "'Array'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Arrow: return "'->'";
    case Tok::Assign: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
  }
  return "?";
}

class Lexer {
 public:
  Lexer(const std::string& src, std::string path) : src_(src), path_(std::move(path)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool end = t.kind == Tok::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(SourcePos pos, const std::string& msg) {
    throw SyntaxError(path_, pos, msg);
  }

  SourcePos here() const { return {line_, col_}; }

  char peek() const { return i_ < src_.size() ? src_[i_] : '\0'; }
  char peek2() const { return i_ + 1 < src_.size() ? src_[i_ + 1] : '\0'; }

  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek2() == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    skip_trivia();
    Token t;
    t.pos = here();
    if (i_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = advance();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word(1, c);
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
        word += advance();
      }
      t.kind = keyword(word);
      if (t.kind == Tok::Ident) t.text = std::move(word);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits(1, c);
      while (std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
      errno = 0;
      char* endp = nullptr;
      long long v = std::strtoll(digits.c_str(), &endp, 10);
      if (errno == ERANGE || *endp != '\0') fail(t.pos, "integer literal out of range");
      t.kind = Tok::Int;
      t.int_val = v;
      return t;
    }
    if (c == '"') {
      std::string s;
      for (;;) {
        if (i_ >= src_.size()) fail(t.pos, "unterminated string literal");
        char d = advance();
        if (d == '"') break;
        if (d == '\n') fail(t.pos, "unterminated string literal");
        if (d == '\\') {
          if (i_ >= src_.size()) fail(t.pos, "unterminated string literal");
          char e = advance();
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case 'r': s += '\r'; break;
            case '\\': s += '\\'; break;
            case '"': s += '"'; break;
            default: fail(here(), std::string("unknown escape '\\") + e + "'");
          }
        } else {
          s += d;
        }
      }
      t.kind = Tok::Str;
      t.text = std::move(s);
      return t;
    }
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '{': t.kind = Tok::LBrace; return t;
      case '}': t.kind = Tok::RBrace; return t;
      case '[': t.kind = Tok::LBracket; return t;
      case ']': t.kind = Tok::RBracket; return t;
      case ',': t.kind = Tok::Comma; return t;
      case ';': t.kind = Tok::Semi; return t;
      case ':': t.kind = Tok::Colon; return t;
      case '+': t.kind = Tok::Plus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '%': t.kind = Tok::Percent; return t;
      case '-':
        if (peek() == '>') { advance(); t.kind = Tok::Arrow; } else { t.kind = Tok::Minus; }
        return t;
      case '<':
        if (peek() == '=') { advance(); t.kind = Tok::Le; } else { t.kind = Tok::Lt; }
        return t;
      case '>':
        if (peek() == '=') { advance(); t.kind = Tok::Ge; } else { t.kind = Tok::Gt; }
        return t;
      case '=':
        if (peek() == '=') { advance(); t.kind = Tok::EqEq; } else { t.kind = Tok::Assign; }
        return t;
      case '!':
        if (peek() == '=') { advance(); t.kind = Tok::Ne; } else { t.kind = Tok::Bang; }
        return t;
      case '&':
        if (peek() == '&') { advance(); t.kind = Tok::AndAnd; return t; }
        fail(t.pos, "unexpected '&' (did you mean '&&'?)");
      case '|':
        if (peek() == '|') { advance(); t.kind = Tok::OrOr; return t; }
        fail(t.pos, "unexpected '|' (did you mean '||'?)");
      default:
        fail(t.pos, std::string("unexpected character '") + c + "'");
    }
  }

  static Tok keyword(const std::string& w) {
    if (w == "fn") return Tok::KwFn;
    if (w == "let") return Tok::KwLet;
    if (w == "if") return Tok::KwIf;
    if (w == "else") return Tok::KwElse;
    if (w == "while") return Tok::KwWhile;
    if (w == "return") return Tok::KwReturn;
    if (w == "break") return Tok::KwBreak;
    if (w == "continue") return Tok::KwContinue;
    if (w == "throw") return Tok::KwThrow;
    if (w == "try") return Tok::KwTry;
    if (w == "catch") return Tok::KwCatch;
    if (w == "assert") return Tok::KwAssert;
    if (w == "true") return Tok::KwTrue;
    if (w == "false") return Tok::KwFalse;
    if (w == "Int") return Tok::KwInt;
    if (w == "Bool") return Tok::KwBool;
    if (w == "Str") return Tok::KwStr;
    if (w == "Array") return Tok::KwArray;
    return Tok::Ident;
  }

  const std::string& src_;
  std::string path_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string path, UnitKind kind)
      : toks_(std::move(tokens)), path_(std::move(path)), kind_(kind) {}

  SourceUnit run() {
    SourceUnit unit;
    unit.path = path_;
    unit.kind = kind_;
    while (!at(Tok::End)) {
      unit.functions.push_back(parse_function());
    }
    assign_ids(unit);
    return unit;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& ahead(size_t n) const {
    size_t j = i_ + n;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  bool at(Tok k) const { return cur().kind == k; }

  Token take() { return toks_[i_++]; }

  Token expect(Tok k, const char* context) {
    if (!at(k)) {
      throw SyntaxError(path_, cur().pos,
                        std::string("expected ") + tok_name(k) + " " + context +
                            ", found " + tok_name(cur().kind));
    }
    return take();
  }

  bool accept(Tok k) {
    if (at(k)) { ++i_; return true; }
    return false;
  }

  FunctionDecl parse_function() {
    FunctionDecl fn;
    fn.pos = cur().pos;
    expect(Tok::KwFn, "to start a function");
    fn.name = expect(Tok::Ident, "after 'fn'").text;
    expect(Tok::LParen, "after function name");
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.name = expect(Tok::Ident, "as parameter name").text;
        expect(Tok::Colon, "after parameter name");
        p.type = parse_type();
        fn.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "after parameters");
    if (accept(Tok::Arrow)) fn.return_type = parse_type();
    fn.body = parse_block();
    fn.is_test = kind_ == UnitKind::Test && fn.name.rfind("test_", 0) == 0;
    return fn;
  }

  TypeExpr parse_type() {
    if (accept(Tok::KwInt)) return TypeExpr::int_type();
    if (accept(Tok::KwBool)) return TypeExpr::bool_type();
    if (accept(Tok::KwStr)) return TypeExpr::str_type();
    if (at(Tok::KwArray)) {
      take();
      expect(Tok::Lt, "after 'Array'");
      TypeExpr elem = parse_type();
      expect(Tok::Gt, "to close 'Array<'");
      return TypeExpr::array_of(std::move(elem));
    }
    throw SyntaxError(path_, cur().pos,
                      std::string("expected a type, found ") + tok_name(cur().kind));
  }

  Statement parse_block() {
    Statement b;
    b.kind = StmtKind::Block;
    b.pos = cur().pos;
    expect(Tok::LBrace, "to open a block");
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) {
        throw SyntaxError(path_, cur().pos, "expected '}' to close a block, found end of input");
      }
      b.children.push_back(parse_statement());
    }
    expect(Tok::RBrace, "to close a block");
    return b;
  }

  Statement parse_statement() {
    Statement s;
    s.pos = cur().pos;
    switch (cur().kind) {
      case Tok::KwLet: {
        take();
        s.kind = StmtKind::VarDecl;
        s.var_name = expect(Tok::Ident, "after 'let'").text;
        expect(Tok::Colon, "after variable name");
        s.var_type = parse_type();
        expect(Tok::Assign, "in 'let' declaration");
        s.expr = parse_expr();
        expect(Tok::Semi, "after declaration");
        return s;
      }
      case Tok::KwIf: {
        take();
        s.kind = StmtKind::If;
        s.expr = parse_expr();
        s.children.push_back(parse_block());
        if (accept(Tok::KwElse)) {
          if (at(Tok::KwIf)) {
            // else-if chain: the else block holds a single nested If
            Statement elseb;
            elseb.kind = StmtKind::Block;
            elseb.pos = cur().pos;
            elseb.children.push_back(parse_statement());
            s.children.push_back(std::move(elseb));
          } else {
            s.children.push_back(parse_block());
          }
        }
        return s;
      }
      case Tok::KwWhile: {
        take();
        s.kind = StmtKind::While;
        s.expr = parse_expr();
        s.children.push_back(parse_block());
        return s;
      }
      case Tok::KwReturn: {
        take();
        s.kind = StmtKind::Return;
        if (!at(Tok::Semi)) s.expr = parse_expr();
        expect(Tok::Semi, "after 'return'");
        return s;
      }
      case Tok::KwBreak:
        take();
        s.kind = StmtKind::Break;
        expect(Tok::Semi, "after 'break'");
        return s;
      case Tok::KwContinue:
        take();
        s.kind = StmtKind::Continue;
        expect(Tok::Semi, "after 'continue'");
        return s;
      case Tok::KwThrow: {
        take();
        s.kind = StmtKind::Throw;
        s.expr = parse_expr();
        expect(Tok::Semi, "after 'throw'");
        return s;
      }
      case Tok::KwTry: {
        take();
        s.kind = StmtKind::Try;
        s.children.push_back(parse_block());
        expect(Tok::KwCatch, "after 'try' block");
        s.children.push_back(parse_block());
        return s;
      }
      case Tok::KwAssert: {
        take();
        s.kind = StmtKind::Assert;
        s.expr = parse_expr();
        expect(Tok::Semi, "after 'assert'");
        return s;
      }
      case Tok::LBrace:
        return parse_block();
      case Tok::Ident:
        if (ahead(1).kind == Tok::Assign) {
          s.kind = StmtKind::Assign;
          s.var_name = take().text;
          take();  // '='
          s.expr = parse_expr();
          expect(Tok::Semi, "after assignment");
          return s;
        }
        [[fallthrough]];
      default: {
        s.kind = StmtKind::ExprStmt;
        s.expr = parse_expr();
        expect(Tok::Semi, "after expression");
        return s;
      }
    }
  }

  Expr parse_expr() { return parse_or(); }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (at(Tok::OrOr)) {
      SourcePos pos = take().pos;
      Expr rhs = parse_and();
      lhs = make_binary(Expr::Op::Or, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_equality();
    while (at(Tok::AndAnd)) {
      SourcePos pos = take().pos;
      Expr rhs = parse_equality();
      lhs = make_binary(Expr::Op::And, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_equality() {
    Expr lhs = parse_comparison();
    while (at(Tok::EqEq) || at(Tok::Ne)) {
      Expr::Op op = at(Tok::EqEq) ? Expr::Op::Eq : Expr::Op::Ne;
      SourcePos pos = take().pos;
      Expr rhs = parse_comparison();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_comparison() {
    Expr lhs = parse_additive();
    while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
      Expr::Op op = at(Tok::Lt)   ? Expr::Op::Lt
                    : at(Tok::Le) ? Expr::Op::Le
                    : at(Tok::Gt) ? Expr::Op::Gt
                                  : Expr::Op::Ge;
      SourcePos pos = take().pos;
      Expr rhs = parse_additive();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Expr::Op op = at(Tok::Plus) ? Expr::Op::Add : Expr::Op::Sub;
      SourcePos pos = take().pos;
      Expr rhs = parse_multiplicative();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      Expr::Op op = at(Tok::Star)    ? Expr::Op::Mul
                    : at(Tok::Slash) ? Expr::Op::Div
                                     : Expr::Op::Mod;
      SourcePos pos = take().pos;
      Expr rhs = parse_unary();
      lhs = make_binary(op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (at(Tok::Minus) || at(Tok::Bang)) {
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.op = at(Tok::Minus) ? Expr::Op::Neg : Expr::Op::Not;
      e.pos = take().pos;
      e.args.push_back(parse_unary());
      return e;
    }
    return parse_postfix();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    for (;;) {
      if (at(Tok::LBracket)) {
        SourcePos pos = take().pos;
        Expr idx;
        idx.kind = Expr::Kind::Index;
        idx.pos = pos;
        idx.args.push_back(std::move(e));
        idx.args.push_back(parse_expr());
        expect(Tok::RBracket, "to close index");
        e = std::move(idx);
      } else {
        return e;
      }
    }
  }

  Expr parse_primary() {
    Expr e;
    e.pos = cur().pos;
    switch (cur().kind) {
      case Tok::Int:
        e.kind = Expr::Kind::IntLit;
        e.int_val = take().int_val;
        return e;
      case Tok::Str:
        e.kind = Expr::Kind::StrLit;
        e.text = take().text;
        return e;
      case Tok::KwTrue:
        take();
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = true;
        return e;
      case Tok::KwFalse:
        take();
        e.kind = Expr::Kind::BoolLit;
        e.bool_val = false;
        return e;
      case Tok::LBracket: {
        take();
        e.kind = Expr::Kind::ArrayLit;
        if (!at(Tok::RBracket)) {
          do {
            e.args.push_back(parse_expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "to close array literal");
        return e;
      }
      case Tok::LParen: {
        take();
        Expr inner = parse_expr();
        expect(Tok::RParen, "to close '('");
        return inner;
      }
      case Tok::Ident: {
        Token name = take();
        if (accept(Tok::LParen)) {
          e.kind = Expr::Kind::Call;
          e.text = std::move(name.text);
          if (!at(Tok::RParen)) {
            do {
              e.args.push_back(parse_expr());
            } while (accept(Tok::Comma));
          }
          expect(Tok::RParen, "to close call");
          return e;
        }
        e.kind = Expr::Kind::Var;
        e.text = std::move(name.text);
        return e;
      }
      default:
        throw SyntaxError(path_, cur().pos,
                          std::string("expected an expression, found ") + tok_name(cur().kind));
    }
  }

  static Expr make_binary(Expr::Op op, Expr lhs, Expr rhs, SourcePos pos) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.op = op;
    e.pos = pos;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  std::vector<Token> toks_;
  std::string path_;
  UnitKind kind_;
  size_t i_ = 0;
};

}  // namespace

SourceUnit parse(const std::string& source_text, const std::string& path, UnitKind kind) {
  Lexer lexer(source_text, path);
  Parser parser(lexer.run(), path, kind);
  return parser.run();
}

}  // namespace sosie
