#include "statbridge/missing.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>

#include "statbridge/errors.hpp"

namespace statbridge {

bool is_numeric(StorageType t) { return t != StorageType::SStr && t != StorageType::SStrL; }

bool is_integer(StorageType t) {
  return t == StorageType::SByte || t == StorageType::SInt || t == StorageType::SLong;
}

bool is_float(StorageType t) { return t == StorageType::SFloat || t == StorageType::SDouble; }

bool is_string(StorageType t) { return t == StorageType::SStr || t == StorageType::SStrL; }

std::size_t cell_width(StorageType t) {
  switch (t) {
    case StorageType::SByte: return 1;
    case StorageType::SInt: return 2;
    case StorageType::SLong: return 4;
    case StorageType::SFloat: return 4;
    case StorageType::SDouble: return 8;
    case StorageType::SStr:
    case StorageType::SStrL: return 0;
  }
  return 0;
}

const char* storage_name(StorageType t) {
  switch (t) {
    case StorageType::SByte: return "byte";
    case StorageType::SInt: return "int";
    case StorageType::SLong: return "long";
    case StorageType::SFloat: return "float";
    case StorageType::SDouble: return "double";
    case StorageType::SStr: return "str";
    case StorageType::SStrL: return "strL";
  }
  return "?";
}

std::optional<StorageType> storage_from_name(std::string_view name) {
  if (name == "byte") return StorageType::SByte;
  if (name == "int") return StorageType::SInt;
  if (name == "long") return StorageType::SLong;
  if (name == "float") return StorageType::SFloat;
  if (name == "double") return StorageType::SDouble;
  if (name == "str") return StorageType::SStr;
  if (name == "strL") return StorageType::SStrL;
  return std::nullopt;
}

std::int64_t int_valid_min(StorageType t) {
  switch (t) {
    case StorageType::SByte: return std::numeric_limits<std::int8_t>::min();
    case StorageType::SInt: return std::numeric_limits<std::int16_t>::min();
    case StorageType::SLong: return std::numeric_limits<std::int32_t>::min();
    default: fail("int_valid_min: not an integer storage type");
  }
}

std::int64_t int_valid_max(StorageType t) {
  switch (t) {
    case StorageType::SByte: return std::numeric_limits<std::int8_t>::max() - (kMissingFlavors - 1) - 1;
    case StorageType::SInt: return std::numeric_limits<std::int16_t>::max() - (kMissingFlavors - 1) - 1;
    case StorageType::SLong: return std::numeric_limits<std::int32_t>::max() - (kMissingFlavors - 1) - 1;
    default: fail("int_valid_max: not an integer storage type");
  }
}

std::int64_t encode_missing_int(StorageType t, int code) {
  assert(code >= 0 && code < kMissingFlavors);
  return int_valid_max(t) + 1 + code;
}

std::optional<int> decode_missing_int(StorageType t, std::int64_t raw) {
  if (raw <= int_valid_max(t)) return std::nullopt;
  return static_cast<int>(raw - int_valid_max(t) - 1);
}

double double_missing_base() { return 0x1p1023; }
float float_missing_base() { return 0x1p127f; }

double encode_missing_double(int code) {
  assert(code >= 0 && code < kMissingFlavors);
  const auto base = std::bit_cast<std::uint64_t>(double_missing_base());
  return std::bit_cast<double>(base + static_cast<std::uint64_t>(code));
}

float encode_missing_float(int code) {
  assert(code >= 0 && code < kMissingFlavors);
  const auto base = std::bit_cast<std::uint32_t>(float_missing_base());
  return std::bit_cast<float>(base + static_cast<std::uint32_t>(code));
}

std::optional<int> decode_missing_double(double raw) {
  if (!(raw >= double_missing_base())) return std::nullopt;  // NaN compares false
  const auto base = std::bit_cast<std::uint64_t>(double_missing_base());
  const std::uint64_t steps = std::bit_cast<std::uint64_t>(raw) - base;
  return steps < kMissingFlavors ? static_cast<int>(steps) : 0;
}

std::optional<int> decode_missing_float(float raw) {
  if (!(raw >= float_missing_base())) return std::nullopt;
  const auto base = std::bit_cast<std::uint32_t>(float_missing_base());
  const std::uint32_t steps = std::bit_cast<std::uint32_t>(raw) - base;
  return steps < kMissingFlavors ? static_cast<int>(steps) : 0;
}

float float_valid_max() { return std::nextafter(float_missing_base(), 0.0f); }

std::string missing_display(int code) {
  assert(code >= 0 && code < kMissingFlavors);
  if (code == 0) return ".";
  return std::string(".") + static_cast<char>('a' + code - 1);
}

}  // namespace statbridge
