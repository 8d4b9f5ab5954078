#pragma once

#include <map>
#include <random>
#include <set>
#include <string>

#include "statbridge/guest/ast.hpp"
#include "statbridge/guest/value.hpp"

namespace statbridge {
class GateSession;
}

namespace statbridge::guest {

enum class ScopingMode { strict, soft };

// Global bindings plus user function definitions. One scope must never be
// mutated by two evaluations at once; re-entry across scopes is fine.
struct Scope {
  std::map<std::string, Value> globals;
  std::map<std::string, NodePtr> functions;
  ScopingMode mode = ScopingMode::soft;
  unsigned nthreads = 1;
  std::mt19937_64 rng{0x51A7B21D6EULL};  // fixed seed: transcripts stay reproducible

  std::set<std::string> global_names() const;
};

struct EvalResult {
  Value value;           // last statement's value ('nothing' when none)
  std::string out;       // everything printed during evaluation, in order
  bool exit_requested = false;
  bool suppress = false;  // final statement carried a trailing ';'
};

// Runs a parsed program against a scope and (optionally) a gate session.
// Runtime errors throw statbridge::error and abort the statement list.
EvalResult evaluate(const NodePtr& ast, Scope& scope, GateSession* gate);

// Docstring for bridge builtins; "no documentation" otherwise.
std::string help_doc(const std::string& name);

}  // namespace statbridge::guest
