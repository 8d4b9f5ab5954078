#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace statbridge::guest {

enum class NodeKind {
  Block,       // kids = statements
  IntLit,      // ival
  FloatLit,    // fval
  StrLit,      // sval
  BoolLit,     // ival (0/1)
  MissingLit,
  NothingLit,
  Ident,       // name
  VectorLit,   // kids = elements
  Assign,      // kids = {target, value}; op ("" plain, else "+","-","*","/"), dotted,
               // global_rebind
  TupleTarget, // kids = ident targets (destructuring LHS)
  Binary,      // op, dotted; kids = {lhs, rhs}
  Unary,       // op ("-"); kids = {operand}
  Range,       // kids = {lo, hi}
  Index,       // kids = {base, subscripts...}
  Field,       // name; kids = {base}
  Call,        // name, dotted (broadcast f.(...)); kids = arguments
  For,         // name = loop var; kids = {iterable, body Block}
  FunctionDef, // name; params in strs; kids = {body Block}
  Return,      // kids = {expr} or empty
};

struct Node {
  NodeKind kind;
  std::string name;
  std::string op;
  std::int64_t ival = 0;
  double fval = 0;
  std::string sval;
  std::vector<std::string> strs;  // parameter names
  bool dotted = false;
  bool global_rebind = false;
  bool suppress = false;  // trailing ';' on a final statement
  int line = 0, col = 0;
  std::vector<std::shared_ptr<Node>> kids;
};

using NodePtr = std::shared_ptr<Node>;

// Structural s-expression dump, used by tests to compare trees.
std::string dump(const Node& n);

}  // namespace statbridge::guest
