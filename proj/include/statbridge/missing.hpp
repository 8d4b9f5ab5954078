#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace statbridge {

// Host column storage kinds. Integer kinds reserve their top 27
// representable values for the missing ladder; string kinds have no
// reserved sentinel (the bridge treats "" as the string missing).
enum class StorageType : std::uint8_t {
  SByte,    // 8-bit signed, valid [-128, 100]
  SInt,     // 16-bit signed, valid [-32768, 32740]
  SLong,    // 32-bit signed, valid [-2147483648, 2147483620]
  SFloat,   // 32-bit float, sentinel ladder from 2^127 up
  SDouble,  // 64-bit float, sentinel ladder from 2^1023 up
  SStr,
  SStrL,
};

inline constexpr int kMissingFlavors = 27;  // "." plus ".a" .. ".z"

bool is_numeric(StorageType t);
bool is_integer(StorageType t);
bool is_float(StorageType t);
bool is_string(StorageType t);

// Fixed cell width in bytes; 0 for the variable-width string kinds.
std::size_t cell_width(StorageType t);

const char* storage_name(StorageType t);
std::optional<StorageType> storage_from_name(std::string_view name);

// Integer ladder: code k encodes as (max_signed - 26) + k, so the valid
// range loses its top 27 values.
std::int64_t int_valid_min(StorageType t);
std::int64_t int_valid_max(StorageType t);
std::int64_t encode_missing_int(StorageType t, int code);
std::optional<int> decode_missing_int(StorageType t, std::int64_t raw);

// Float ladder: code k is the bit pattern of the largest power of two
// below the type's maximum finite value, plus k ulps. Any value at or
// above that base decodes as missing (off-ladder values as flavor 0).
double double_missing_base();  // 2^1023
float float_missing_base();    // 2^127
double encode_missing_double(int code);
float encode_missing_float(int code);
std::optional<int> decode_missing_double(double raw);
std::optional<int> decode_missing_float(float raw);

// Largest float magnitude that is still a data value (one ulp below 2^127).
float float_valid_max();

// "." for code 0, ".a" .. ".z" for 1..26.
std::string missing_display(int code);

}  // namespace statbridge
