#include "statbridge/guest/interp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "statbridge/errors.hpp"
#include "statbridge/gate.hpp"

namespace statbridge::guest {

std::set<std::string> Scope::global_names() const {
  std::set<std::string> names;
  for (const auto& [k, v] : globals) names.insert(k);
  return names;
}

namespace {

struct ReturnSignal {
  Value value;
};

// Uniform read adapter over the element-bearing value kinds.
struct Sequence {
  enum class Kind { vec, range, column } kind;
  const std::vector<Value>* vec = nullptr;
  Range range;
  const Column* column = nullptr;

  std::size_t size() const {
    switch (kind) {
      case Kind::vec: return vec->size();
      case Kind::range: return static_cast<std::size_t>(std::max<std::int64_t>(range.length(), 0));
      case Kind::column: return column->size();
    }
    return 0;
  }

  Value at(std::size_t i) const {
    switch (kind) {
      case Kind::vec: return (*vec)[i];
      case Kind::range: return Value::integer(range.lo + static_cast<std::int64_t>(i));
      case Kind::column: {
        const Column& c = *column;
        if (c.is_missing(i)) return Value::missing();
        switch (c.type.base) {
          case BaseType::Str:
          case BaseType::Categorical: return Value::str(c.text_at(i));
          case BaseType::F32:
          case BaseType::F64: return Value::number(c.number_at(i));
          default: return Value::integer(static_cast<std::int64_t>(c.number_at(i)));
        }
      }
    }
    return Value::nothing();
  }
};

std::optional<Sequence> as_sequence(const Value& v) {
  if (auto* p = std::get_if<VecPtr>(&v.v)) return Sequence{Sequence::Kind::vec, p->get(), {}, nullptr};
  if (auto* r = std::get_if<Range>(&v.v)) return Sequence{Sequence::Kind::range, nullptr, *r, nullptr};
  if (auto* c = std::get_if<ColumnRef>(&v.v))
    return Sequence{Sequence::Kind::column, nullptr, {}, &c->column()};
  return std::nullopt;
}

bool truthy_mask_entry(const Value& v) {
  // Missing mask entries select nothing.
  if (v.is_missing()) return false;
  if (v.is_bool()) return std::get<bool>(v.v);
  fail("mask entries must be boolean, got " + v.display());
}

class Interp {
 public:
  Interp(Scope& scope, GateSession* gate) : scope_(scope), gate_(gate) {}

  EvalResult run(const Node& block) {
    EvalResult r;
    r.value = eval_block(block);
    r.out = std::move(out_);
    r.exit_requested = exit_;
    if (block.kind == NodeKind::Block && !block.kids.empty())
      r.suppress = block.kids.back()->suppress;
    return r;
  }

 private:
  struct Env {
    // nullopt marks "declared but not yet assigned" (strict-scope shadows).
    std::map<std::string, std::optional<Value>> vars;
    Env* parent = nullptr;
  };

  Scope& scope_;
  GateSession* gate_;
  Env* env_ = nullptr;
  std::string out_;
  bool exit_ = false;

  GateSession& gate() {
    if (!gate_) fail("no host session attached");
    return *gate_;
  }

  // --- name binding -------------------------------------------------------

  Value lookup(const std::string& name, const Node& where) {
    for (Env* e = env_; e; e = e->parent) {
      auto it = e->vars.find(name);
      if (it != e->vars.end()) {
        if (!it->second)
          fail("undefined variable: " + name);
        return *it->second;
      }
    }
    auto git = scope_.globals.find(name);
    if (git != scope_.globals.end()) return git->second;
    fail("undefined variable: " + name + " (at line " + std::to_string(where.line) + ")");
  }

  void bind(const std::string& name, Value v, bool global_rebind) {
    if (global_rebind) {
      scope_.globals[name] = std::move(v);
      return;
    }
    for (Env* e = env_; e; e = e->parent) {
      auto it = e->vars.find(name);
      if (it != e->vars.end()) {
        it->second = std::move(v);
        return;
      }
    }
    if (!env_) {
      scope_.globals[name] = std::move(v);
      return;
    }
    env_->vars[name] = std::move(v);
  }

  static void collect_assigned_names(const Node& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::FunctionDef) return;
    if (n.kind == NodeKind::Assign && !n.global_rebind) {
      const Node& target = *n.kids[0];
      if (target.kind == NodeKind::Ident) out.insert(target.name);
      if (target.kind == NodeKind::TupleTarget)
        for (const auto& id : target.kids) out.insert(id->name);
    }
    for (const auto& kid : n.kids) collect_assigned_names(*kid, out);
  }

  // --- statement dispatch --------------------------------------------------

  Value eval_block(const Node& block) {
    Value last = Value::nothing();
    for (const auto& stmt : block.kids) last = eval(*stmt);
    return last;
  }

  Value eval(const Node& n) {
    switch (n.kind) {
      case NodeKind::Block: return eval_block(n);
      case NodeKind::IntLit: return Value::integer(n.ival);
      case NodeKind::FloatLit: return Value::number(n.fval);
      case NodeKind::StrLit: return Value::str(n.sval);
      case NodeKind::BoolLit: return Value::boolean(n.ival != 0);
      case NodeKind::MissingLit: return Value::missing();
      case NodeKind::NothingLit: return Value::nothing();
      case NodeKind::Ident: return lookup(n.name, n);
      case NodeKind::VectorLit: {
        std::vector<Value> items;
        items.reserve(n.kids.size());
        for (const auto& kid : n.kids) items.push_back(eval(*kid));
        return Value::vec(std::move(items));
      }
      case NodeKind::Assign: return eval_assign(n);
      case NodeKind::Binary: return eval_binary(n);
      case NodeKind::Unary: return eval_unary(n);
      case NodeKind::Range: {
        const std::int64_t lo = eval(*n.kids[0]).as_int();
        const std::int64_t hi = eval(*n.kids[1]).as_int();
        return Value::range(lo, hi);
      }
      case NodeKind::Index: return eval_index(n);
      case NodeKind::Field: return eval_field(n);
      case NodeKind::Call: return eval_call(n);
      case NodeKind::For: return eval_for(n);
      case NodeKind::FunctionDef: {
        scope_.functions[n.name] = std::make_shared<Node>(n);
        return Value::nothing();
      }
      case NodeKind::Return: {
        Value v = n.kids.empty() ? Value::nothing() : eval(*n.kids[0]);
        throw ReturnSignal{std::move(v)};
      }
      case NodeKind::TupleTarget: fail("internal: dangling tuple target");
    }
    fail("internal: unknown node kind");
  }

  Value eval_for(const Node& n) {
    Value iterable = eval(*n.kids[0]);
    auto seq = as_sequence(iterable);
    if (!seq) fail("cannot iterate over " + iterable.display());

    Env env;
    env.parent = env_;
    if (!env_) {
      // Top-level loop body: names assigned here (and not marked for global
      // rebinding) shadow globals for the whole body, Julia style. Reading
      // one before its first assignment is the strict-scope error.
      std::set<std::string> assigned;
      collect_assigned_names(*n.kids[1], assigned);
      assigned.erase(n.name);
      for (const auto& name : assigned) env.vars[name] = std::nullopt;
    }
    env_ = &env;
    const std::size_t count = seq->size();
    try {
      for (std::size_t i = 0; i < count; ++i) {
        env.vars[n.name] = seq->at(i);
        eval_block(*n.kids[1]);
      }
    } catch (...) {
      env_ = env.parent;
      throw;
    }
    env_ = env.parent;
    return Value::nothing();
  }

  Value eval_assign(const Node& n) {
    const Node& target = *n.kids[0];
    const Node& rhs_node = *n.kids[1];

    if (target.kind == NodeKind::TupleTarget) {
      Value rhs = eval(rhs_node);
      std::vector<Value> items;
      if (auto* t = std::get_if<TuplePtr>(&rhs.v)) items = (*t)->items;
      else if (auto seq = as_sequence(rhs)) {
        for (std::size_t i = 0; i < seq->size(); ++i) items.push_back(seq->at(i));
      } else {
        fail("cannot destructure " + rhs.display());
      }
      if (items.size() < target.kids.size()) fail("not enough values to destructure");
      for (std::size_t k = 0; k < target.kids.size(); ++k)
        bind(target.kids[k]->name, items[k], n.global_rebind);
      return rhs;
    }

    if (target.kind == NodeKind::Ident) {
      if (n.op.empty()) {
        Value v = eval(rhs_node);
        bind(target.name, v, n.global_rebind);
        return v;
      }
      Value current = lookup(target.name, target);
      Value rhs = eval(rhs_node);
      // Dotted compound assignment mutates containers in place; everything
      // else rebinds the name with the combined value.
      if (n.dotted && mutate_in_place(current, n.op, rhs)) return current;
      Value combined = binop(n.op, n.dotted, current, rhs);
      bind(target.name, combined, n.global_rebind);
      return combined;
    }

    if (target.kind == NodeKind::Index) {
      Value container = eval(*target.kids[0]);
      std::vector<Value> subs;
      for (std::size_t k = 1; k < target.kids.size(); ++k) subs.push_back(eval(*target.kids[k]));
      Value rhs = eval(rhs_node);
      Value stored = rhs;
      if (!n.op.empty()) {
        Value current = index_get(container, subs);
        stored = binop(n.op, n.dotted, current, rhs);
      }
      index_set(container, subs, stored);
      return stored;
    }

    if (target.kind == NodeKind::Field) {
      Value base = eval(*target.kids[0]);
      auto* df = std::get_if<DfPtr>(&base.v);
      if (!df) fail("field assignment needs a data frame");
      const std::size_t idx = (*df)->index_of(target.name);
      if (idx == 0) fail("no column named " + target.name);
      if (n.op.empty()) fail("replacing data-frame columns is not supported");
      ColumnRef ref{*df, idx - 1};
      Value current = Value::column(ref);
      Value rhs = eval(rhs_node);
      if (!n.dotted || !mutate_in_place(current, n.op, rhs))
        fail("column assignment must use a dotted operator");
      return current;
    }

    fail("cannot assign to this expression");
  }

  // In-place elementwise update for views, vectors, matrices, and columns.
  // Returns false when the value has no element storage (plain scalars).
  bool mutate_in_place(Value& container, const std::string& op, const Value& rhs) {
    if (auto* view = std::get_if<ViewPtr>(&container.v)) {
      StView& v = **view;
      const double r = rhs.as_number();
      for (std::size_t c = 0; c < v.vars.size(); ++c) {
        for (std::size_t o = 0; o < v.obs.size(); ++o) {
          const double x = gate().cell_get(v.obs[o], v.vars[c]);
          if (gate().is_missing(x)) continue;  // missing flavor rides through
          gate().cell_set(v.obs[o], v.vars[c], scalar_arith(op, x, r));
        }
      }
      return true;
    }
    if (auto* vecp = std::get_if<VecPtr>(&container.v)) {
      for (auto& item : **vecp) item = binop(op, true, item, rhs);
      return true;
    }
    if (auto* matp = std::get_if<MatPtr>(&container.v)) {
      const double r = rhs.as_number();
      for (double& x : (*matp)->cells) x = scalar_arith(op, x, r);
      return true;
    }
    if (auto* colp = std::get_if<ColumnRef>(&container.v)) {
      Column& col = colp->column();
      if (!col.type.is_numeric()) fail("column is not numeric");
      const double r = rhs.as_number();
      for (std::size_t i = 0; i < col.size(); ++i) {
        if (col.is_missing(i)) continue;
        set_column_number(col, i, scalar_arith(op, col.number_at(i), r));
      }
      return true;
    }
    return false;
  }

  static void set_column_number(Column& col, std::size_t i, double v) {
    switch (col.type.base) {
      case BaseType::I8: std::get<std::vector<std::int8_t>>(col.data)[i] = static_cast<std::int8_t>(v); break;
      case BaseType::I16: std::get<std::vector<std::int16_t>>(col.data)[i] = static_cast<std::int16_t>(v); break;
      case BaseType::I32: std::get<std::vector<std::int32_t>>(col.data)[i] = static_cast<std::int32_t>(v); break;
      case BaseType::I64: std::get<std::vector<std::int64_t>>(col.data)[i] = static_cast<std::int64_t>(v); break;
      case BaseType::F32: std::get<std::vector<float>>(col.data)[i] = static_cast<float>(v); break;
      case BaseType::F64: std::get<std::vector<double>>(col.data)[i] = v; break;
      default: fail("column is not numeric");
    }
  }

  // --- operators ------------------------------------------------------------

  static double scalar_arith(const std::string& op, double a, double b) {
    if (op == "+") return a + b;
    if (op == "-") return a - b;
    if (op == "*") return a * b;
    if (op == "/") return a / b;
    fail("unsupported arithmetic operator '" + op + "'");
  }

  Value scalar_binop(const std::string& op, const Value& a, const Value& b) {
    if (a.is_missing() || b.is_missing()) return Value::missing();

    if (a.is_str() || b.is_str()) {
      if (op == "*") {
        if (!a.is_str() || !b.is_str()) fail("string concatenation needs two strings");
        return Value::str(a.as_str() + b.as_str());
      }
      if (op == "==") return Value::boolean(a.is_str() && b.is_str() && a.as_str() == b.as_str());
      if (op == "!=") return Value::boolean(!(a.is_str() && b.is_str() && a.as_str() == b.as_str()));
      fail("unsupported string operator '" + op + "'");
    }

    if (op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=") {
      const double x = a.as_number(), y = b.as_number();
      bool r = false;
      if (op == "==") r = x == y;
      else if (op == "!=") r = x != y;
      else if (op == "<") r = x < y;
      else if (op == ">") r = x > y;
      else if (op == "<=") r = x <= y;
      else r = x >= y;
      return Value::boolean(r);
    }

    // Integer-preserving arithmetic except for '/'.
    const bool int_args = (a.is_int() || a.is_bool()) && (b.is_int() || b.is_bool());
    if (op == "/" || !int_args) return Value::number(scalar_arith(op, a.as_number(), b.as_number()));
    const std::int64_t x = a.as_int(), y = b.as_int();
    if (op == "+") return Value::integer(x + y);
    if (op == "-") return Value::integer(x - y);
    if (op == "*") return Value::integer(x * y);
    fail("unsupported operator '" + op + "'");
  }

  Value binop(const std::string& op, bool dotted, const Value& a, const Value& b) {
    const auto sa = as_sequence(a);
    const auto sb = as_sequence(b);
    if (dotted && (sa || sb)) {
      const std::size_t n = sa ? sa->size() : sb->size();
      if (sa && sb && sa->size() != sb->size())
        fail("dimension mismatch: " + std::to_string(sa->size()) + " vs " +
             std::to_string(sb->size()));
      std::vector<Value> out;
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Value x = sa ? sa->at(i) : a;
        const Value y = sb ? sb->at(i) : b;
        out.push_back(scalar_binop(op, x, y));
      }
      return Value::vec(std::move(out));
    }
    if (!dotted && (sa || sb) && (op == "+" || op == "-")) {
      // Elementwise + and - work on equal-length vectors without the dot.
      if (!(sa && sb)) fail("vector " + op + " needs vectors on both sides");
      if (sa->size() != sb->size()) fail("dimension mismatch");
      std::vector<Value> out;
      out.reserve(sa->size());
      for (std::size_t i = 0; i < sa->size(); ++i)
        out.push_back(scalar_binop(op, sa->at(i), sb->at(i)));
      return Value::vec(std::move(out));
    }
    return scalar_binop(op, a, b);
  }

  Value eval_binary(const Node& n) {
    Value a = eval(*n.kids[0]);
    Value b = eval(*n.kids[1]);
    return binop(n.op, n.dotted, a, b);
  }

  Value eval_unary(const Node& n) {
    Value a = eval(*n.kids[0]);
    if (a.is_missing()) return Value::missing();
    if (a.is_int()) return Value::integer(-std::get<std::int64_t>(a.v));
    if (a.is_number()) return Value::number(-a.as_number());
    if (auto seq = as_sequence(a)) {
      std::vector<Value> out;
      for (std::size_t i = 0; i < seq->size(); ++i) {
        Value item = seq->at(i);
        out.push_back(item.is_missing() ? Value::missing()
                      : item.is_int() ? Value::integer(-item.as_int())
                                      : Value::number(-item.as_number()));
      }
      return Value::vec(std::move(out));
    }
    fail("cannot negate " + a.display());
  }

  // --- indexing ---------------------------------------------------------------

  Value index_get(const Value& base, const std::vector<Value>& subs) {
    if (auto* matp = std::get_if<MatPtr>(&base.v)) {
      if (subs.size() != 2) fail("matrix indexing needs [row, column]");
      const Matrix& m = **matp;
      const std::int64_t r = subs[0].as_int(), c = subs[1].as_int();
      if (r < 1 || static_cast<std::size_t>(r) > m.rows || c < 1 ||
          static_cast<std::size_t>(c) > m.cols)
        fail("index out of bounds");
      return Value::number(m.at(static_cast<std::size_t>(r) - 1, static_cast<std::size_t>(c) - 1));
    }
    if (auto* viewp = std::get_if<ViewPtr>(&base.v)) {
      const StView& v = **viewp;
      if (subs.size() != 2) fail("view indexing needs [row, column]");
      const std::int64_t r = subs[0].as_int(), c = subs[1].as_int();
      if (r < 1 || static_cast<std::size_t>(r) > v.obs.size() || c < 1 ||
          static_cast<std::size_t>(c) > v.vars.size())
        fail("index out of bounds");
      return Value::number(gate().cell_get(v.obs[static_cast<std::size_t>(r) - 1],
                                           v.vars[static_cast<std::size_t>(c) - 1]));
    }
    auto seq = as_sequence(base);
    if (!seq) fail("cannot index " + base.display());
    if (subs.size() != 1) fail("one subscript expected");

    const Value& sub = subs[0];
    if (sub.is_number()) {
      const std::int64_t i = sub.as_int();
      if (i < 1 || static_cast<std::size_t>(i) > seq->size()) fail("index out of bounds");
      return seq->at(static_cast<std::size_t>(i) - 1);
    }
    if (auto* r = std::get_if<Range>(&sub.v)) {
      std::vector<Value> out;
      for (std::int64_t i = r->lo; i <= r->hi; ++i) {
        if (i < 1 || static_cast<std::size_t>(i) > seq->size()) fail("index out of bounds");
        out.push_back(seq->at(static_cast<std::size_t>(i) - 1));
      }
      return Value::vec(std::move(out));
    }
    if (auto mask = as_sequence(sub)) {
      if (mask->size() != seq->size()) fail("mask length mismatch");
      std::vector<Value> out;
      for (std::size_t i = 0; i < mask->size(); ++i)
        if (truthy_mask_entry(mask->at(i))) out.push_back(seq->at(i));
      return Value::vec(std::move(out));
    }
    fail("unsupported subscript " + sub.display());
  }

  void index_set(Value& base, const std::vector<Value>& subs, const Value& v) {
    if (auto* vecp = std::get_if<VecPtr>(&base.v)) {
      if (subs.size() != 1) fail("one subscript expected");
      const std::int64_t i = subs[0].as_int();
      if (i < 1 || static_cast<std::size_t>(i) > (*vecp)->size()) fail("index out of bounds");
      (**vecp)[static_cast<std::size_t>(i) - 1] = v;
      return;
    }
    if (auto* matp = std::get_if<MatPtr>(&base.v)) {
      if (subs.size() != 2) fail("matrix indexing needs [row, column]");
      Matrix& m = **matp;
      const std::int64_t r = subs[0].as_int(), c = subs[1].as_int();
      if (r < 1 || static_cast<std::size_t>(r) > m.rows || c < 1 ||
          static_cast<std::size_t>(c) > m.cols)
        fail("index out of bounds");
      m.at(static_cast<std::size_t>(r) - 1, static_cast<std::size_t>(c) - 1) = v.as_number();
      return;
    }
    if (auto* viewp = std::get_if<ViewPtr>(&base.v)) {
      StView& view = **viewp;
      if (subs.size() != 2) fail("view indexing needs [row, column]");
      if (!v.is_number() && !v.is_missing()) fail("views accept numeric writes only");
      const std::int64_t r = subs[0].as_int(), c = subs[1].as_int();
      if (r < 1 || static_cast<std::size_t>(r) > view.obs.size() || c < 1 ||
          static_cast<std::size_t>(c) > view.vars.size())
        fail("index out of bounds");
      const double x = v.is_missing() ? encode_missing_double(0) : v.as_number();
      gate().cell_set(view.obs[static_cast<std::size_t>(r) - 1],
                      view.vars[static_cast<std::size_t>(c) - 1], x);
      return;
    }
    fail("cannot assign into " + base.display());
  }

  Value eval_index(const Node& n) {
    Value base = eval(*n.kids[0]);
    std::vector<Value> subs;
    for (std::size_t k = 1; k < n.kids.size(); ++k) subs.push_back(eval(*n.kids[k]));
    return index_get(base, subs);
  }

  Value eval_field(const Node& n) {
    Value base = eval(*n.kids[0]);
    auto* df = std::get_if<DfPtr>(&base.v);
    if (!df) fail("field access needs a data frame, got " + base.display());
    const std::size_t idx = (*df)->index_of(n.name);
    if (idx == 0) fail("no column named " + n.name);
    return Value::column(ColumnRef{*df, idx - 1});
  }

  // --- calls -----------------------------------------------------------------

  Value eval_call(const Node& n) {
    // rand(Bool, n) names its element type rather than passing a value.
    if (n.name == "rand" && !n.dotted) return call_rand(n);

    std::vector<Value> args;
    args.reserve(n.kids.size());
    for (const auto& kid : n.kids) args.push_back(eval(*kid));

    if (n.dotted) return broadcast_call(n.name, args);

    auto fit = scope_.functions.find(n.name);
    if (fit != scope_.functions.end()) return call_user(*fit->second, args);
    return call_builtin(n.name, args);
  }

  Value call_user(const Node& def, const std::vector<Value>& args) {
    if (args.size() != def.strs.size())
      fail(def.name + " expects " + std::to_string(def.strs.size()) + " arguments, got " +
           std::to_string(args.size()));
    Env env;
    env.parent = nullptr;  // function bodies see globals, not enclosing locals
    for (std::size_t k = 0; k < args.size(); ++k) env.vars[def.strs[k]] = args[k];
    Env* saved = env_;
    env_ = &env;
    Value result = Value::nothing();
    try {
      result = eval_block(*def.kids[0]);
    } catch (ReturnSignal& r) {
      result = std::move(r.value);
      env_ = saved;
      return result;
    } catch (...) {
      env_ = saved;
      throw;
    }
    env_ = saved;
    return result;
  }

  Value broadcast_call(const std::string& name, const std::vector<Value>& args) {
    std::size_t n = 0;
    bool any_seq = false;
    for (const auto& a : args) {
      if (auto s = as_sequence(a)) {
        if (any_seq && s->size() != n) fail("dimension mismatch in broadcast");
        n = s->size();
        any_seq = true;
      }
    }
    if (!any_seq) return call_builtin(name, args);
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Value> element_args;
      element_args.reserve(args.size());
      for (const auto& a : args) {
        if (auto s = as_sequence(a)) element_args.push_back(s->at(i));
        else element_args.push_back(a);
      }
      auto fit = scope_.functions.find(name);
      out.push_back(fit != scope_.functions.end() ? call_user(*fit->second, element_args)
                                                  : call_builtin(name, element_args));
    }
    return Value::vec(std::move(out));
  }

  Value call_rand(const Node& n) {
    if (n.kids.size() != 2 || n.kids[0]->kind != NodeKind::Ident ||
        n.kids[0]->name != "Bool")
      fail("rand supports the form rand(Bool, n)");
    const std::int64_t count = eval(*n.kids[1]).as_int();
    if (count < 0) fail("rand length must be nonnegative");
    std::vector<Value> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
      out.push_back(Value::boolean((scope_.rng() & 1) != 0));
    return Value::vec(std::move(out));
  }

  // --- builtin implementations -------------------------------------------------

  static void arity(const std::string& name, const std::vector<Value>& args, std::size_t lo,
                    std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      fail(name + ": wrong number of arguments (" + std::to_string(args.size()) + ")");
  }

  std::vector<std::size_t> resolve_varnames(const Value& names) {
    std::vector<std::string> list;
    if (names.is_str()) {
      std::istringstream ss(names.as_str());
      std::string word;
      while (ss >> word) list.push_back(word);
    } else if (auto seq = as_sequence(names)) {
      for (std::size_t i = 0; i < seq->size(); ++i) list.push_back(seq->at(i).as_str());
    } else {
      fail("variable names must be a string or a vector of strings");
    }
    if (list.empty()) fail("no variable names given");
    std::vector<std::size_t> idx;
    idx.reserve(list.size());
    for (const auto& name : list) {
      const std::size_t i = gate().varindex(name);
      if (gate().var_is_string(i)) fail(name + " is a string variable");
      idx.push_back(i);
    }
    return idx;
  }

  std::vector<std::size_t> resolve_sample(const Value& sample) {
    const std::size_t nobs = gate().nobs();
    std::vector<std::size_t> obs;
    if (sample.is_nothing()) {
      for (std::size_t j = 1; j <= nobs; ++j) obs.push_back(j);
      return obs;
    }
    auto seq = as_sequence(sample);
    if (!seq) fail("sample must be a boolean vector");
    if (seq->size() != nobs) fail("sample length must equal the observation count");
    for (std::size_t j = 0; j < nobs; ++j)
      if (truthy_mask_entry(seq->at(j))) obs.push_back(j + 1);
    return obs;
  }

  Value call_builtin(const std::string& name, const std::vector<Value>& args) {
    // general-purpose builtins
    if (name == "print") {
      for (const auto& a : args) out_ += a.is_str() ? a.as_str() : a.display();
      return Value::nothing();
    }
    if (name == "display") {
      arity(name, args, 1, 1);
      out_ += args[0].display() + "\n";
      return Value::nothing();
    }
    if (name == "sum") {
      arity(name, args, 1, 1);
      return builtin_sum(args[0]);
    }
    if (name == "length") {
      arity(name, args, 1, 1);
      if (args[0].is_str()) return Value::integer(static_cast<std::int64_t>(args[0].as_str().size()));
      if (auto* t = std::get_if<TuplePtr>(&args[0].v))
        return Value::integer(static_cast<std::int64_t>((*t)->items.size()));
      if (auto* v = std::get_if<ViewPtr>(&args[0].v))
        return Value::integer(static_cast<std::int64_t>((*v)->obs.size() * (*v)->vars.size()));
      if (auto seq = as_sequence(args[0])) return Value::integer(static_cast<std::int64_t>(seq->size()));
      fail("length: unsupported argument " + args[0].display());
    }
    if (name == "size") {
      arity(name, args, 1, 1);
      if (auto* m = std::get_if<MatPtr>(&args[0].v))
        return Value::tuple({Value::integer(static_cast<std::int64_t>((*m)->rows)),
                             Value::integer(static_cast<std::int64_t>((*m)->cols))});
      if (auto* df = std::get_if<DfPtr>(&args[0].v))
        return Value::tuple({Value::integer(static_cast<std::int64_t>((*df)->nrows())),
                             Value::integer(static_cast<std::int64_t>((*df)->ncols()))});
      if (auto* v = std::get_if<ViewPtr>(&args[0].v))
        return Value::tuple({Value::integer(static_cast<std::int64_t>((*v)->obs.size())),
                             Value::integer(static_cast<std::int64_t>((*v)->vars.size()))});
      if (auto seq = as_sequence(args[0]))
        return Value::tuple({Value::integer(static_cast<std::int64_t>(seq->size()))});
      fail("size: unsupported argument " + args[0].display());
    }
    if (name == "zeros") {
      arity(name, args, 1, 2);
      if (args.size() == 1) {
        const std::int64_t n = args[0].as_int();
        if (n < 0) fail("zeros: negative length");
        return Value::vec(std::vector<Value>(static_cast<std::size_t>(n), Value::number(0.0)));
      }
      const std::int64_t r = args[0].as_int(), c = args[1].as_int();
      if (r < 0 || c < 0) fail("zeros: negative dimension");
      return Value::matrix(Matrix::zeros(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
    }
    if (name == "string") {
      arity(name, args, 1, 1);
      const Value& a = args[0];
      if (a.is_str()) return a;
      if (a.is_missing()) return Value::str("missing");
      return Value::str(a.display());
    }
    if (name == "tuple") {
      return Value::tuple(args);
    }
    if (name == "exit") {
      arity(name, args, 0, 0);
      exit_ = true;
      return Value::nothing();
    }
    if (name == "nthreads") {
      arity(name, args, 0, 0);
      return Value::integer(scope_.nthreads);
    }

    // host-bridge builtins
    if (name == "st_nobs" || name == "SF_nobs") {
      arity(name, args, 0, 0);
      return Value::integer(static_cast<std::int64_t>(gate().nobs()));
    }
    if (name == "st_nvar" || name == "SF_nvar") {
      arity(name, args, 0, 0);
      return Value::integer(static_cast<std::int64_t>(gate().nvar()));
    }
    if (name == "st_varindex") {
      arity(name, args, 1, 1);
      return Value::integer(static_cast<std::int64_t>(gate().varindex(args[0].as_str())));
    }
    if (name == "SF_var_is_string") {
      arity(name, args, 1, 1);
      return Value::boolean(gate().var_is_string(static_cast<std::size_t>(args[0].as_int())));
    }
    if (name == "SF_var_is_strl") {
      arity(name, args, 1, 1);
      return Value::boolean(gate().var_is_strl(static_cast<std::size_t>(args[0].as_int())));
    }
    if (name == "SF_var_is_binary") {
      arity(name, args, 2, 2);
      return Value::boolean(gate().var_is_binary(static_cast<std::size_t>(args[0].as_int()),
                                                 static_cast<std::size_t>(args[1].as_int())));
    }
    if (name == "SF_sdatalen") {
      arity(name, args, 2, 2);
      return Value::integer(static_cast<std::int64_t>(gate().sdatalen(
          static_cast<std::size_t>(args[0].as_int()), static_cast<std::size_t>(args[1].as_int()))));
    }
    if (name == "SF_is_missing") {
      arity(name, args, 1, 1);
      return Value::boolean(gate().is_missing(args[0].as_number()));
    }
    if (name == "SF_missval") {
      arity(name, args, 0, 0);
      return Value::number(gate().missval());
    }
    if (name == "SF_vdata") {
      arity(name, args, 2, 2);
      return Value::number(gate().cell_get(static_cast<std::size_t>(args[0].as_int()),
                                           static_cast<std::size_t>(args[1].as_int())));
    }
    if (name == "SF_vstore") {
      arity(name, args, 3, 3);
      gate().cell_set(static_cast<std::size_t>(args[0].as_int()),
                      static_cast<std::size_t>(args[1].as_int()), args[2].as_number());
      return Value::nothing();
    }
    if (name == "SF_sdata") {
      arity(name, args, 2, 2);
      return Value::str(gate().str_get(static_cast<std::size_t>(args[0].as_int()),
                                       static_cast<std::size_t>(args[1].as_int())));
    }
    if (name == "SF_sstore") {
      arity(name, args, 3, 3);
      gate().str_set(static_cast<std::size_t>(args[0].as_int()),
                     static_cast<std::size_t>(args[1].as_int()), args[2].as_str());
      return Value::nothing();
    }
    if (name == "SF_macro_save") {
      arity(name, args, 2, 2);
      std::string mac = args[0].as_str();
      if (!mac.empty() && mac[0] == '_')
        gate().macro_save(MacroNamespace::global, mac.substr(1), args[1].as_str());
      else
        gate().macro_save(MacroNamespace::local, mac, args[1].as_str());
      return Value::nothing();
    }
    if (name == "SF_macro_use") {
      arity(name, args, 1, 1);
      std::string mac = args[0].as_str();
      if (!mac.empty() && mac[0] == '_')
        return Value::str(gate().macro_use(MacroNamespace::global, mac.substr(1)));
      return Value::str(gate().macro_use(MacroNamespace::local, mac));
    }
    if (name == "SF_scal_save") {
      arity(name, args, 2, 2);
      gate().scalar_save(args[0].as_str(), args[1].as_number());
      return Value::nothing();
    }
    if (name == "SF_scal_use") {
      arity(name, args, 1, 1);
      return Value::number(gate().scalar_use(args[0].as_str()));
    }
    if (name == "st_numscalar") {
      arity(name, args, 1, 2);
      if (args.size() == 1) return Value::number(gate().scalar_use(args[0].as_str()));
      gate().scalar_save(args[0].as_str(), args[1].as_number());
      return Value::nothing();
    }
    if (name == "st_global") {
      arity(name, args, 1, 2);
      if (args.size() == 1)
        return Value::str(gate().macro_use(MacroNamespace::global, args[0].as_str()));
      gate().macro_save(MacroNamespace::global, args[0].as_str(), args[1].as_str());
      return Value::nothing();
    }
    if (name == "st_local") {
      if (args.size() == 1)
        fail("no such builtin: st_local(name) — host locals cannot be read from the guest");
      arity(name, args, 2, 2);
      gate().macro_save(MacroNamespace::local, args[0].as_str(), args[1].as_str());
      gate().add_pending_promotion(args[0].as_str());
      return Value::nothing();
    }
    if (name == "SF_row") {
      arity(name, args, 1, 1);
      return Value::integer(static_cast<std::int64_t>(gate().mat_rows(args[0].as_str())));
    }
    if (name == "SF_col") {
      arity(name, args, 1, 1);
      return Value::integer(static_cast<std::int64_t>(gate().mat_cols(args[0].as_str())));
    }
    if (name == "SF_mat_el") {
      arity(name, args, 3, 3);
      return Value::number(gate().mat_el(args[0].as_str(),
                                         static_cast<std::size_t>(args[1].as_int()),
                                         static_cast<std::size_t>(args[2].as_int())));
    }
    if (name == "SF_mat_store") {
      arity(name, args, 4, 4);
      gate().mat_store(args[0].as_str(), static_cast<std::size_t>(args[1].as_int()),
                       static_cast<std::size_t>(args[2].as_int()), args[3].as_number());
      return Value::nothing();
    }
    if (name == "st_matrix") {
      arity(name, args, 1, 2);
      const std::string mat = args[0].as_str();
      if (args.size() == 1) {
        const std::size_t rows = gate().mat_rows(mat), cols = gate().mat_cols(mat);
        Matrix m = Matrix::zeros(rows, cols);
        for (std::size_t c = 1; c <= cols; ++c)
          for (std::size_t r = 1; r <= rows; ++r) m.at(r - 1, c - 1) = gate().mat_el(mat, r, c);
        return Value::matrix(std::move(m));
      }
      auto* src = std::get_if<MatPtr>(&args[1].v);
      if (!src) fail("st_matrix: second argument must be a matrix");
      const std::size_t rows = gate().mat_rows(mat), cols = gate().mat_cols(mat);
      if ((*src)->rows != rows || (*src)->cols != cols)
        fail("st_matrix: dimension mismatch (" + std::to_string((*src)->rows) + "×" +
             std::to_string((*src)->cols) + " into " + std::to_string(rows) + "×" +
             std::to_string(cols) + ")");
      for (std::size_t c = 1; c <= cols; ++c)
        for (std::size_t r = 1; r <= rows; ++r)
          gate().mat_store(mat, r, c, (*src)->at(r - 1, c - 1));
      return Value::nothing();
    }
    if (name == "st_data") {
      arity(name, args, 1, 2);
      const auto vars = resolve_varnames(args[0]);
      const auto obs = resolve_sample(args.size() == 2 ? args[1] : Value::nothing());
      Matrix m = Matrix::zeros(obs.size(), vars.size());
      for (std::size_t c = 0; c < vars.size(); ++c)
        for (std::size_t r = 0; r < obs.size(); ++r)
          m.at(r, c) = gate().cell_get(obs[r], vars[c]);
      return Value::matrix(std::move(m));
    }
    if (name == "st_view") {
      arity(name, args, 1, 2);
      StView v;
      v.gate = &gate();
      v.vars = resolve_varnames(args[0]);
      v.obs = resolve_sample(args.size() == 2 ? args[1] : Value::nothing());
      return Value::view(std::move(v));
    }
    if (name == "SF_display") {
      arity(name, args, 1, 1);
      out_ += args[0].as_str();
      return Value::nothing();
    }
    if (name == "SF_error") {
      arity(name, args, 1, 1);
      out_ += "error: " + args[0].as_str() + "\n";
      return Value::nothing();
    }

    fail("no such builtin: " + name);
  }

  Value builtin_sum(const Value& arg) {
    if (auto* m = std::get_if<MatPtr>(&arg.v)) {
      double total = 0;
      for (double x : (*m)->cells) total += x;
      return Value::number(total);
    }
    if (auto* vp = std::get_if<ViewPtr>(&arg.v)) {
      const StView& v = **vp;
      double total = 0;
      for (std::size_t c = 0; c < v.vars.size(); ++c)
        for (std::size_t o = 0; o < v.obs.size(); ++o) total += gate().cell_get(v.obs[o], v.vars[c]);
      return Value::number(total);
    }
    auto seq = as_sequence(arg);
    if (!seq) fail("sum: unsupported argument " + arg.display());
    bool all_int = true;
    std::int64_t itotal = 0;
    double ftotal = 0;
    for (std::size_t i = 0; i < seq->size(); ++i) {
      Value x = seq->at(i);
      if (x.is_missing()) return Value::missing();
      if (x.is_int() || x.is_bool()) {
        itotal += x.as_int();
        ftotal += static_cast<double>(x.as_int());
      } else {
        all_int = false;
        ftotal += x.as_number();
      }
    }
    return all_int ? Value::integer(itotal) : Value::number(ftotal);
  }
};

}  // namespace

EvalResult evaluate(const NodePtr& ast, Scope& scope, GateSession* gate) {
  if (!ast) fail("nothing to evaluate");
  Interp interp(scope, gate);
  return interp.run(*ast);
}

std::string help_doc(const std::string& name) {
  static const std::map<std::string, std::string> docs = {
      {"SF_nobs", "number of observations in the host dataset"},
      {"SF_nvar", "number of variables in the host dataset"},
      {"SF_var_is_string", "whether variable i is a string variable"},
      {"SF_var_is_strl", "whether variable i is a strL variable"},
      {"SF_var_is_binary", "whether observation j of variable i holds a binary strL cell"},
      {"SF_sdatalen", "string length of variable i at observation j"},
      {"SF_is_missing", "whether a double value is a host missing sentinel"},
      {"SF_missval", "the double sentinel for generic missing"},
      {"SF_vstore", "set observation j of variable i to a numeric value"},
      {"SF_sstore", "set observation j of variable i to a string value"},
      {"SF_vdata", "get observation j of variable i as a double"},
      {"SF_sdata", "get observation j of variable i as a string"},
      {"SF_macro_save", "set a host macro; a leading underscore targets a global"},
      {"SF_macro_use", "read a host global macro; local reads yield the empty string"},
      {"SF_scal_save", "set the value of a host scalar"},
      {"SF_scal_use", "get the value of a host scalar"},
      {"SF_row", "number of rows of a host matrix"},
      {"SF_col", "number of columns of a host matrix"},
      {"SF_mat_store", "set one element of a host matrix"},
      {"SF_mat_el", "get one element of a host matrix"},
      {"SF_display", "print text to the session output"},
      {"SF_error", "print error text to the session output"},
      {"st_nobs", "number of observations in the host dataset"},
      {"st_nvar", "number of variables in the host dataset"},
      {"st_varindex", "index of the named variable in the host dataset"},
      {"st_global", "get or set a host global macro"},
      {"st_local", "set a host local macro; write-only, promoted to the caller on exit"},
      {"st_numscalar", "get or set a host scalar"},
      {"st_matrix", "get a host matrix, or put a guest matrix into an existing host matrix"},
      {"st_data", "get host variables as a matrix copy, with an optional sample restriction"},
      {"st_view", "view onto one or more numeric host variables; reads and writes pass through"},
      {"print", "print arguments to the session output"},
      {"display", "print a value the way the prompt would echo it"},
      {"sum", "sum of the elements of a vector, range, matrix, column, or view"},
      {"length", "number of elements"},
      {"size", "dimensions, as a tuple"},
      {"zeros", "vector (or matrix) of zeros"},
      {"string", "decimal rendering of a value"},
      {"rand", "rand(Bool, n): vector of n session-seeded random booleans"},
      {"exit", "leave the interactive session"},
      {"nthreads", "the session thread limit"},
  };
  auto it = docs.find(name);
  return it != docs.end() ? it->second : "no documentation";
}

}  // namespace statbridge::guest
