#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "statbridge/missing.hpp"

using namespace statbridge;

TEST_CASE("byte ladder boundaries") {
  // Signed byte max 127 minus 27 reserved values leaves a valid max of 100.
  CHECK(int_valid_max(StorageType::SByte) == 100);
  CHECK(int_valid_min(StorageType::SByte) == -128);
  CHECK(encode_missing_int(StorageType::SByte, 0) == 101);
  CHECK(encode_missing_int(StorageType::SByte, 26) == 127);
  CHECK(decode_missing_int(StorageType::SByte, 101) == 0);
  CHECK(decode_missing_int(StorageType::SByte, 127) == 26);
  CHECK_FALSE(decode_missing_int(StorageType::SByte, 100).has_value());
}

TEST_CASE("exhaustive byte domain") {
  // Brute force over every representable byte: the reserved band is
  // exactly [101, 127] and codes count up from its base.
  for (int raw = -128; raw <= 127; ++raw) {
    auto code = decode_missing_int(StorageType::SByte, raw);
    if (raw <= 100) {
      CHECK_FALSE(code.has_value());
    } else {
      REQUIRE(code.has_value());
      CHECK(*code == raw - 101);
    }
  }
}

TEST_CASE("int and long ladder maxima") {
  CHECK(int_valid_max(StorageType::SInt) == 32740);
  CHECK(int_valid_max(StorageType::SLong) == 2147483620);
  CHECK(encode_missing_int(StorageType::SInt, 26) == std::numeric_limits<std::int16_t>::max());
  CHECK(encode_missing_int(StorageType::SLong, 26) == std::numeric_limits<std::int32_t>::max());
}

TEST_CASE("integer codec round trip, all codes") {
  for (StorageType t : {StorageType::SByte, StorageType::SInt, StorageType::SLong}) {
    for (int code = 0; code < kMissingFlavors; ++code) {
      const std::int64_t raw = encode_missing_int(t, code);
      CHECK(raw > int_valid_max(t));
      CHECK(decode_missing_int(t, raw) == code);
    }
  }
}

TEST_CASE("double ladder") {
  CHECK(double_missing_base() == 0x1p1023);
  for (int code = 0; code < kMissingFlavors; ++code) {
    const double raw = encode_missing_double(code);
    CHECK(raw >= double_missing_base());
    CHECK(std::isfinite(raw));
    CHECK(decode_missing_double(raw) == code);
  }
  // One ulp apart: the ladder is 27 consecutive bit patterns.
  CHECK(std::bit_cast<std::uint64_t>(encode_missing_double(26)) -
            std::bit_cast<std::uint64_t>(encode_missing_double(0)) ==
        26);
  CHECK_FALSE(decode_missing_double(std::numeric_limits<double>::max() / 2).has_value());
  CHECK_FALSE(decode_missing_double(0.0).has_value());
  CHECK_FALSE(decode_missing_double(-1e308).has_value());
  CHECK_FALSE(decode_missing_double(std::nan("")).has_value());
  // Off-ladder values at or above the base read as generic missing.
  CHECK(decode_missing_double(std::numeric_limits<double>::infinity()) == 0);
  CHECK(decode_missing_double(std::numeric_limits<double>::max()) == 0);
}

TEST_CASE("float ladder") {
  CHECK(float_missing_base() == 0x1p127f);
  for (int code = 0; code < kMissingFlavors; ++code) {
    const float raw = encode_missing_float(code);
    CHECK(raw >= float_missing_base());
    CHECK(decode_missing_float(raw) == code);
  }
  CHECK(float_valid_max() < float_missing_base());
  CHECK_FALSE(decode_missing_float(float_valid_max()).has_value());
}

TEST_CASE("missing display names") {
  CHECK(missing_display(0) == ".");
  CHECK(missing_display(1) == ".a");
  CHECK(missing_display(26) == ".z");
}

TEST_CASE("storage names round trip") {
  for (StorageType t : {StorageType::SByte, StorageType::SInt, StorageType::SLong,
                        StorageType::SFloat, StorageType::SDouble, StorageType::SStr,
                        StorageType::SStrL})
    CHECK(storage_from_name(storage_name(t)) == t);
  CHECK_FALSE(storage_from_name("word").has_value());
  CHECK(cell_width(StorageType::SInt) == 2);
  CHECK(cell_width(StorageType::SStr) == 0);
}
