#pragma once

#include <string>

#include "statbridge/guest/ast.hpp"

namespace statbridge::guest {

enum class Completeness { complete, incomplete, invalid };

// Tri-state line classifier driving the continuation prompt: `incomplete`
// when block openers, brackets, or a string literal are still open;
// `complete` when the source parses; `invalid` otherwise.
Completeness check_complete(const std::string& src);

// Parse a (complete) program into a Block. Throws statbridge::error with
// line/column on syntax errors.
NodePtr parse(const std::string& src);

}  // namespace statbridge::guest
