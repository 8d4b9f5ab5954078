#pragma once

#include <set>
#include <string>

#include "statbridge/guest/ast.hpp"

namespace statbridge::guest {

// Marks every assignment inside a top-level for-body whose target name is
// already a global as global-rebinding, so interactive loops update the
// existing binding instead of shadowing it. Function bodies are left
// alone. In-place and idempotent; returns its argument.
NodePtr softscope_transform(NodePtr ast, const std::set<std::string>& global_names);

}  // namespace statbridge::guest
