#include "sosie/pretty.hpp"

namespace sosie {

namespace {

// Higher binds tighter. Matches the parser's precedence ladder.
int op_precedence(Expr::Op op) {
  switch (op) {
    case Expr::Op::Or: return 1;
    case Expr::Op::And: return 2;
    case Expr::Op::Eq:
    case Expr::Op::Ne: return 3;
    case Expr::Op::Lt:
    case Expr::Op::Le:
    case Expr::Op::Gt:
    case Expr::Op::Ge: return 4;
    case Expr::Op::Add:
    case Expr::Op::Sub: return 5;
    case Expr::Op::Mul:
    case Expr::Op::Div:
    case Expr::Op::Mod: return 6;
    case Expr::Op::Neg:
    case Expr::Op::Not: return 7;
    case Expr::Op::None: return 8;
  }
  return 8;
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
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
  out += '"';
  return out;
}

void print_expr(const Expr& e, int ctx_prec, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out += std::to_string(e.int_val);
      return;
    case Expr::Kind::BoolLit:
      out += e.bool_val ? "true" : "false";
      return;
    case Expr::Kind::StrLit:
      out += escape_string(e.text);
      return;
    case Expr::Kind::Var:
      out += e.text;
      return;
    case Expr::Kind::ArrayLit:
      out += '[';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out += ", ";
        print_expr(e.args[i], 0, out);
      }
      out += ']';
      return;
    case Expr::Kind::Call:
      out += e.text;
      out += '(';
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i > 0) out += ", ";
        print_expr(e.args[i], 0, out);
      }
      out += ')';
      return;
    case Expr::Kind::Index:
      print_expr(e.args[0], op_precedence(Expr::Op::None), out);
      out += '[';
      print_expr(e.args[1], 0, out);
      out += ']';
      return;
    case Expr::Kind::Unary: {
      int prec = op_precedence(e.op);
      bool parens = prec < ctx_prec;
      if (parens) out += '(';
      out += op_symbol(e.op);
      print_expr(e.args[0], prec, out);
      if (parens) out += ')';
      return;
    }
    case Expr::Kind::Binary: {
      int prec = op_precedence(e.op);
      bool parens = prec < ctx_prec;
      if (parens) out += '(';
      print_expr(e.args[0], prec, out);
      out += ' ';
      out += op_symbol(e.op);
      out += ' ';
      print_expr(e.args[1], prec + 1, out);  // left-associative
      if (parens) out += ')';
      return;
    }
  }
}

std::string expr_text(const Expr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

void print_block(const Statement& block, int indent, std::string& out);

void print_statement(const Statement& s, int indent, std::string& out) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case StmtKind::VarDecl:
      out += pad + "let " + s.var_name + ": " + s.var_type->to_string() + " = " +
             expr_text(*s.expr) + ";\n";
      return;
    case StmtKind::Assign:
      out += pad + s.var_name + " = " + expr_text(*s.expr) + ";\n";
      return;
    case StmtKind::ExprStmt:
      out += pad + expr_text(*s.expr) + ";\n";
      return;
    case StmtKind::Return:
      out += pad + (s.expr ? "return " + expr_text(*s.expr) : "return") + ";\n";
      return;
    case StmtKind::Break:
      out += pad + "break;\n";
      return;
    case StmtKind::Continue:
      out += pad + "continue;\n";
      return;
    case StmtKind::Throw:
      out += pad + "throw " + expr_text(*s.expr) + ";\n";
      return;
    case StmtKind::Assert:
      out += pad + "assert " + expr_text(*s.expr) + ";\n";
      return;
    case StmtKind::While:
      out += pad + "while " + expr_text(*s.expr) + " ";
      print_block(s.children[0], indent, out);
      out += '\n';
      return;
    case StmtKind::Try:
      out += pad + "try ";
      print_block(s.children[0], indent, out);
      out += " catch ";
      print_block(s.children[1], indent, out);
      out += '\n';
      return;
    case StmtKind::Block:
      out += pad;
      print_block(s, indent, out);
      out += '\n';
      return;
    case StmtKind::If: {
      out += pad + "if " + expr_text(*s.expr) + " ";
      print_block(s.children[0], indent, out);
      const Statement* cur = &s;
      while (cur->children.size() > 1) {
        const Statement& elseb = cur->children[1];
        // else-if sugar when the else block holds exactly one If
        if (elseb.children.size() == 1 && elseb.children[0].kind == StmtKind::If) {
          const Statement& nested = elseb.children[0];
          out += " else if " + expr_text(*nested.expr) + " ";
          print_block(nested.children[0], indent, out);
          cur = &nested;
        } else {
          out += " else ";
          print_block(elseb, indent, out);
          break;
        }
      }
      out += '\n';
      return;
    }
  }
}

void print_block(const Statement& block, int indent, std::string& out) {
  if (block.children.empty()) {
    out += "{ }";
    return;
  }
  out += "{\n";
  for (const auto& child : block.children) {
    print_statement(child, indent + 1, out);
  }
  out += std::string(static_cast<size_t>(indent) * 2, ' ') + "}";
}

}  // namespace

std::string pretty_print(const Expr& expr) { return expr_text(expr); }

std::string pretty_print(const SourceUnit& unit) {
  std::string out;
  for (size_t i = 0; i < unit.functions.size(); ++i) {
    const FunctionDecl& fn = unit.functions[i];
    if (i > 0) out += '\n';
    out += "fn " + fn.name + "(";
    for (size_t p = 0; p < fn.params.size(); ++p) {
      if (p > 0) out += ", ";
      out += fn.params[p].name + ": " + fn.params[p].type.to_string();
    }
    out += ")";
    if (fn.return_type) out += " -> " + fn.return_type->to_string();
    out += " ";
    print_block(fn.body, 0, out);
    out += '\n';
  }
  return out;
}

}  // namespace sosie
