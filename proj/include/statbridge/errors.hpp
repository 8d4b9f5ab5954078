#pragma once

#include <stdexcept>
#include <string>

namespace statbridge {

// Single error type for the whole library. The shell prints these as
// "error: <message>" and keeps going in scripted mode.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw error(msg); }

}  // namespace statbridge
