#include "statbridge/guest/softscope.hpp"

namespace statbridge::guest {

namespace {

void mark_in_body(Node& n, const std::set<std::string>& globals) {
  if (n.kind == NodeKind::FunctionDef) return;
  if (n.kind == NodeKind::Assign) {
    const Node& target = *n.kids[0];
    if (target.kind == NodeKind::Ident && globals.count(target.name)) n.global_rebind = true;
    if (target.kind == NodeKind::TupleTarget) {
      for (const auto& id : target.kids)
        if (globals.count(id->name)) n.global_rebind = true;
    }
  }
  for (auto& kid : n.kids) mark_in_body(*kid, globals);
}

}  // namespace

NodePtr softscope_transform(NodePtr ast, const std::set<std::string>& global_names) {
  if (!ast) return ast;
  if (ast->kind == NodeKind::Block) {
    for (auto& stmt : ast->kids)
      if (stmt->kind == NodeKind::For) mark_in_body(*stmt->kids[1], global_names);
  } else if (ast->kind == NodeKind::For) {
    mark_in_body(*ast->kids[1], global_names);
  }
  return ast;
}

}  // namespace statbridge::guest
