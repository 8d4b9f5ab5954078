#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "statbridge/errors.hpp"
#include "statbridge/workspace.hpp"

using namespace statbridge;

namespace {

std::string temp_file(const char* tag) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("statbridge_ws_" + std::string(tag) + "_" + std::to_string(counter++) + ".stbd");
  return p.string();
}

}  // namespace

TEST_CASE("set_obs grows and pads, never shrinks") {
  Workspace ws;
  ws.set_obs(5);
  CHECK(ws.dataset().nobs == 5);
  CHECK(ws.dataset().nvar() == 0);

  ws.create_variable("x", StorageType::SByte);
  ws.dataset().var(1).set_integer(2, 7);
  ws.set_obs(10);
  CHECK(ws.dataset().var(1).size() == 10);
  CHECK(ws.dataset().var(1).raw_int(2) == 7);
  for (std::size_t i = 5; i < 10; ++i) CHECK(ws.dataset().var(1).missing_code(i) == 0);

  CHECK_THROWS_WITH_AS(ws.set_obs(3), doctest::Contains("cannot reduce observations"), error);
}

TEST_CASE("set_obs on an empty dataset can move freely") {
  Workspace ws;
  ws.set_obs(5);
  ws.set_obs(3);  // no variables yet
  CHECK(ws.dataset().nobs == 3);
}

TEST_CASE("create_variable initializes to generic missing") {
  Workspace ws;
  ws.set_obs(3);
  ws.create_variable("x1", StorageType::SDouble);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ws.dataset().var(1).missing_code(i) == 0);

  ws.create_variable("price", StorageType::SInt);
  for (std::size_t i = 0; i < 3; ++i) CHECK(ws.dataset().var(2).missing_code(i) == 0);

  CHECK_THROWS_WITH_AS(ws.create_variable("x1", StorageType::SByte),
                       doctest::Contains("name in use"), error);
  CHECK_THROWS_WITH_AS(ws.create_variable("9bad", StorageType::SByte),
                       doctest::Contains("invalid identifier"), error);
}

TEST_CASE("scalars and matrices") {
  Workspace ws;
  ws.define_scalar("adjR2", 0.26365506);
  CHECK(ws.scalar("adjR2") == doctest::Approx(0.26365506).epsilon(1e-12));

  ws.define_matrix("Q", 10, 10);
  CHECK(ws.matrix("Q").rows == 10);
  CHECK(ws.matrix("Q").cols == 10);
  for (double cell : ws.matrix("Q").cells) CHECK(decode_missing_double(cell) == 0);

  ws.define_matrix("Q", 2, 3);  // redefinition replaces entirely
  CHECK(ws.matrix("Q").rows == 2);

  CHECK_THROWS_WITH_AS(ws.define_matrix("Z", 0, 3), doctest::Contains("at least 1x1"), error);
  CHECK_THROWS_WITH_AS(ws.matrix("missing_mat"), doctest::Contains("matrix not found"), error);
  CHECK_THROWS_WITH_AS(ws.scalar("missing_scal"), doctest::Contains("scalar not found"), error);
}

TEST_CASE("value labels define, attach, lookup") {
  Workspace ws;
  ws.set_obs(2);
  ws.create_variable("foreign", StorageType::SByte);
  ws.create_variable("weight", StorageType::SDouble);
  ws.label_define("origin", {{1, "Domestic"}, {2, "Foreign"}});
  ws.label_attach("foreign", "origin");
  CHECK(ws.label_lookup("foreign", 1) == "Domestic");
  CHECK(ws.label_lookup("foreign", 7) == "7");  // unmapped code renders in decimal

  CHECK_THROWS_WITH_AS(ws.label_attach("weight", "origin"),
                       doctest::Contains("integer variables"), error);
  CHECK_THROWS_WITH_AS(ws.label_define("bad", {{1, ""}}), doctest::Contains("empty label"),
                       error);
  CHECK_THROWS_WITH_AS(ws.label_attach("foreign", "nosuch"),
                       doctest::Contains("label table not found"), error);
}

TEST_CASE("store_cell_from_double conversion rules") {
  Workspace ws;
  ws.set_obs(1);
  ws.create_variable("b", StorageType::SByte);
  ws.create_variable("f", StorageType::SFloat);
  ws.create_variable("d", StorageType::SDouble);
  Variable& b = ws.dataset().var(1);
  Variable& f = ws.dataset().var(2);
  Variable& d = ws.dataset().var(3);

  CHECK(store_cell_from_double(b, 0, 100.0) == StoreOutcome::stored);
  CHECK(b.raw_int(0) == 100);
  CHECK(store_cell_from_double(b, 0, 101.0) == StoreOutcome::coerced_missing);
  CHECK(b.missing_code(0) == 0);
  CHECK(store_cell_from_double(b, 0, 2.5) == StoreOutcome::coerced_missing);

  // Exact ladder values keep their flavor across storage types.
  CHECK(store_cell_from_double(b, 0, encode_missing_double(4)) == StoreOutcome::stored_missing);
  CHECK(b.missing_code(0) == 4);

  // A double that rounds up to 2^127 in float range must not land in the
  // sentinel band as data.
  const double near_base = std::nextafter(0x1p127, 0.0);
  CHECK(store_cell_from_double(f, 0, near_base) == StoreOutcome::coerced_missing);
  CHECK(f.missing_code(0) == 0);
  CHECK(store_cell_from_double(f, 0, 3.5) == StoreOutcome::stored);

  CHECK(store_cell_from_double(d, 0, 1e307) == StoreOutcome::stored);
  CHECK(d.as_double(0) == 1e307);
}

TEST_CASE("frame stack is one-way without promotion") {
  Workspace ws;
  ws.push_frame();
  ws.set_local("a", "1");
  CHECK(ws.get_local("a") == "1");
  ws.pop_frame();
  CHECK(ws.get_local("a") == "");  // plain pop discards child locals

  ws.push_frame();
  ws.set_local("a", "1");
  ws.current_frame().pending_promotions.push_back("a");
  ws.promote_frame();
  CHECK(ws.get_local("a") == "1");

  // Promotion with an empty pending list behaves like pop.
  ws.push_frame();
  ws.set_local("b", "2");
  ws.promote_frame();
  CHECK(ws.get_local("b") == "");

  CHECK_THROWS_WITH_AS(ws.pop_frame(), doctest::Contains("cannot pop root frame"), error);
  CHECK_THROWS_WITH_AS(ws.promote_frame(), doctest::Contains("cannot pop root frame"), error);
}

TEST_CASE("promotion copies exactly the pending names") {
  Workspace ws;
  ws.set_local("keep", "old");
  ws.push_frame();
  ws.set_local("m", "55");
  ws.set_local("n", "77");
  ws.set_local("keep", "new");
  ws.current_frame().pending_promotions = {"m", "keep"};
  ws.promote_frame();
  CHECK(ws.get_local("m") == "55");
  CHECK(ws.get_local("keep") == "new");
  CHECK(ws.get_local("n") == "");
}

TEST_CASE("dataset file round trip") {
  Workspace ws;
  ws.set_obs(4);
  ws.create_variable("a", StorageType::SLong);
  ws.create_variable("s", StorageType::SStrL);
  ws.create_variable("f", StorageType::SFloat);
  Variable& a = ws.dataset().var(1);
  a.set_integer(0, -5);
  a.set_missing(1, 3);
  a.set_integer(2, int_valid_max(StorageType::SLong));
  Variable& s = ws.dataset().var(2);
  s.set_str(0, "hello");
  s.set_str(1, std::string("b\0in", 4), true);
  Variable& f = ws.dataset().var(3);
  f.set_float(0, 2.5f);
  f.set_missing(3, 26);

  const std::string path = temp_file("roundtrip");
  ws.store_dataset(path);

  Workspace ws2;
  ws2.load_dataset(path);
  CHECK(ws2.dataset() == ws.dataset());
  CHECK_FALSE(ws2.dataset_dirty());
  std::filesystem::remove(path);
}

TEST_CASE("auto fixture round trips with labels") {
  Workspace ws;
  fixtures::build_auto(ws);
  const std::string path = temp_file("auto");
  ws.store_dataset(path);

  Workspace ws2;
  ws2.load_dataset(path);
  REQUIRE(ws2.dataset().nvar() == 5);
  CHECK(ws2.dataset() == ws.dataset());
  CHECK(ws2.dataset().var(5).label_table() == "origin");
  CHECK(ws2.label_table("origin").labels.at(0) == "Domestic");
  CHECK(ws2.label_table("origin").labels.at(1) == "Foreign");
  CHECK(ws2.label_lookup("foreign", 1) == "Foreign");
  std::filesystem::remove(path);
}

TEST_CASE("load rejects malformed files") {
  const std::string path = temp_file("bad");
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("NOTADATASET", f);
    std::fclose(f);
  }
  Workspace ws;
  CHECK_THROWS_WITH_AS(ws.load_dataset(path), doctest::Contains("not a statbridge dataset"),
                       error);
  std::filesystem::remove(path);

  // Version byte mismatch.
  const std::string path2 = temp_file("ver");
  {
    std::FILE* f = std::fopen(path2.c_str(), "wb");
    std::fputs("STBD7", f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(ws.load_dataset(path2), doctest::Contains("unsupported dataset version"),
                       error);
  std::filesystem::remove(path2);

  // Truncation: write a valid file, chop its tail.
  Workspace src;
  fixtures::build_auto(src);
  const std::string path3 = temp_file("trunc");
  src.store_dataset(path3);
  const auto full = std::filesystem::file_size(path3);
  std::filesystem::resize_file(path3, full - 16);
  CHECK_THROWS_WITH_AS(ws.load_dataset(path3), doctest::Contains("truncated"), error);
  std::filesystem::remove(path3);
}

TEST_CASE("dirty flag lifecycle") {
  Workspace ws;
  CHECK_FALSE(ws.dataset_dirty());
  ws.set_obs(2);
  CHECK(ws.dataset_dirty());
  const std::string path = temp_file("dirty");
  ws.store_dataset(path);
  ws.load_dataset(path);
  CHECK_FALSE(ws.dataset_dirty());
  std::filesystem::remove(path);
}
