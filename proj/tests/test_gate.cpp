#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "statbridge/errors.hpp"
#include "statbridge/gate.hpp"

using namespace statbridge;

namespace {

Workspace small_ws() {
  Workspace ws;
  ws.set_obs(4);
  ws.create_variable("b", StorageType::SByte);
  ws.create_variable("i", StorageType::SInt);
  ws.create_variable("d", StorageType::SDouble);
  ws.create_variable("s", StorageType::SStr);
  ws.create_variable("l", StorageType::SStrL);
  return ws;
}

}  // namespace

TEST_CASE("numeric cells move as doubles with flavor fidelity") {
  Workspace ws = small_ws();
  GateSession gate(ws);

  gate.cell_set(1, 1, 100.0);
  CHECK(gate.cell_get(1, 1) == 100.0);

  // Out of the byte's valid range: stored as generic missing.
  gate.cell_set(2, 1, 101.0);
  CHECK(ws.dataset().var(1).missing_code(1) == 0);
  CHECK(gate.is_missing(gate.cell_get(2, 1)));
  CHECK(gate.conversion_warnings() == 1);

  // Fresh int cell reads as the generic-missing ladder double.
  CHECK(gate.cell_get(1, 2) == encode_missing_double(0));
  CHECK(gate.is_missing(gate.cell_get(1, 2)));

  // set∘get identity for every flavor on every numeric variable.
  for (std::size_t var = 1; var <= 3; ++var) {
    for (int code = 0; code < kMissingFlavors; ++code) {
      gate.cell_set(3, var, encode_missing_double(code));
      CHECK(gate.cell_get(3, var) == encode_missing_double(code));
    }
  }

  CHECK_THROWS_WITH_AS(gate.cell_get(1, 4), doctest::Contains("string variable"), error);
  CHECK_THROWS_WITH_AS(gate.cell_get(0, 1), doctest::Contains("out of range"), error);
  CHECK_THROWS_WITH_AS(gate.cell_get(5, 1), doctest::Contains("out of range"), error);
}

TEST_CASE("widening is exact for every valid integer value") {
  Workspace ws;
  ws.set_obs(1);
  ws.create_variable("i", StorageType::SInt);
  GateSession gate(ws);
  for (std::int64_t v = int_valid_min(StorageType::SInt); v <= int_valid_max(StorageType::SInt);
       ++v) {
    gate.cell_set(1, 1, static_cast<double>(v));
    if (gate.cell_get(1, 1) != static_cast<double>(v)) {
      FAIL("widening mismatch at " << v);
    }
  }
}

TEST_CASE("string cells") {
  Workspace ws = small_ws();
  GateSession gate(ws);
  gate.str_set(1, 4, "abc");
  CHECK(gate.str_get(1, 4) == "abc");
  CHECK(gate.sdatalen(1, 4) == 3);
  gate.str_set(1, 4, "");
  CHECK(gate.str_get(1, 4) == "");
  CHECK(gate.sdatalen(1, 4) == 0);
  CHECK_THROWS_WITH_AS(gate.str_get(1, 1), doctest::Contains("numeric variable"), error);
  CHECK_THROWS_WITH_AS(gate.str_set(1, 2, "x"), doctest::Contains("numeric variable"), error);
}

TEST_CASE("macros are one-way for locals") {
  Workspace ws = small_ws();
  ws.push_frame();  // the gate frame
  GateSession gate(ws);

  gate.macro_save(MacroNamespace::local, "foo", "1");
  CHECK(gate.macro_use(MacroNamespace::local, "foo") == "");  // locals cannot be read back
  ws.pop_frame();
  CHECK(ws.get_local("foo") == "");  // never promoted

  gate.macro_save(MacroNamespace::global, "g", "7");
  CHECK(gate.macro_use(MacroNamespace::global, "g") == "7");
  CHECK(gate.macro_use(MacroNamespace::global, "neverset") == "");
}

TEST_CASE("local writes land only in the gate frame") {
  Workspace ws;
  ws.set_local("foo", "caller");
  ws.push_frame();
  GateSession gate(ws);
  gate.macro_save(MacroNamespace::local, "foo", "gate");
  CHECK(ws.current_frame().locals.at("foo") == "gate");
  ws.pop_frame();
  CHECK(ws.get_local("foo") == "caller");
}

TEST_CASE("scalars create through the gate") {
  Workspace ws = small_ws();
  GateSession gate(ws);
  gate.scalar_save("adjR2", 0.26365506);
  CHECK(gate.scalar_use("adjR2") == doctest::Approx(0.26365506).epsilon(1e-12));
  gate.scalar_save("adjR2", 0.5);
  CHECK(gate.scalar_use("adjR2") == 0.5);
  CHECK_THROWS_WITH_AS(gate.scalar_use("nope"), doctest::Contains("scalar not found"), error);
}

TEST_CASE("matrices are editable but never created") {
  Workspace ws = small_ws();
  ws.define_matrix("Q", 10, 10);
  GateSession gate(ws);
  CHECK(gate.mat_rows("Q") == 10);
  CHECK(gate.mat_cols("Q") == 10);
  gate.mat_store("Q", 1, 1, 2.5);
  CHECK(gate.mat_el("Q", 1, 1) == 2.5);
  CHECK_THROWS_WITH_AS(gate.mat_store("NEW", 1, 1, 0.0), doctest::Contains("matrix not found"),
                       error);
  CHECK_THROWS_WITH_AS(gate.mat_el("Q", 11, 1), doctest::Contains("out of range"), error);
}

TEST_CASE("meta queries") {
  Workspace ws;
  fixtures::build_auto(ws);
  GateSession gate(ws);
  CHECK(gate.nobs() == 74);
  CHECK(gate.nvar() == 5);
  CHECK(gate.varindex("price") == 1);
  CHECK(gate.varindex("foreign") == 5);
  CHECK_THROWS_WITH_AS(gate.varindex("nope"), doctest::Contains("variable not found"), error);

  Workspace ws2 = small_ws();
  GateSession gate2(ws2);
  CHECK_FALSE(gate2.var_is_string(1));
  CHECK(gate2.var_is_string(4));
  CHECK_FALSE(gate2.var_is_strl(4));
  CHECK(gate2.var_is_strl(5));
  ws2.dataset().var(5).set_str(0, "bin", true);
  CHECK(gate2.var_is_binary(1, 5));
  CHECK_FALSE(gate2.var_is_binary(2, 5));
}

TEST_CASE("missing api") {
  Workspace ws = small_ws();
  GateSession gate(ws);
  CHECK(gate.missval() == encode_missing_double(0));
  CHECK(gate.is_missing(gate.missval()));
  CHECK_FALSE(gate.is_missing(0.0));
  CHECK(gate.is_missing(encode_missing_double(26)));
  CHECK_FALSE(gate.is_missing(std::nextafter(double_missing_base(), 0.0)));
}

TEST_CASE("sample restriction checks, not renumbers") {
  Workspace ws = small_ws();
  GateSession gate(ws);
  gate.set_restriction(SampleRestriction::InRange(2, 3));
  gate.cell_set(2, 3, 1.5);
  CHECK(gate.cell_get(2, 3) == 1.5);
  CHECK_THROWS_WITH_AS(gate.cell_get(1, 3), doctest::Contains("out of range"), error);
  CHECK_THROWS_WITH_AS(gate.cell_set(4, 3, 1.0), doctest::Contains("out of range"), error);

  gate.set_restriction(SampleRestriction::Mask({1, 0, 0, 1}));
  CHECK_NOTHROW(gate.cell_get(1, 3));
  CHECK_THROWS_AS(gate.cell_get(2, 3), error);
  CHECK_NOTHROW(gate.cell_get(4, 3));

  CHECK_THROWS_WITH_AS(gate.set_restriction(SampleRestriction::Mask({1, 0})),
                       doctest::Contains("mask length"), error);
  CHECK_THROWS_WITH_AS(gate.set_restriction(SampleRestriction::InRange(3, 2)),
                       doctest::Contains("out of bounds"), error);
}

TEST_CASE("closure property: gate operations never change the object name sets") {
  Workspace ws = small_ws();
  ws.define_matrix("Q", 2, 2);
  auto var_names = [&] {
    std::set<std::string> names;
    for (const auto& v : ws.dataset().variables) names.insert(v.name());
    return names;
  };
  auto mat_names = [&] {
    std::set<std::string> names;
    for (const auto& [k, m] : ws.matrices()) names.insert(k);
    return names;
  };
  const auto vars_before = var_names();
  const auto mats_before = mat_names();

  GateSession gate(ws);
  gate.cell_set(1, 1, 5.0);
  gate.str_set(1, 4, "x");
  gate.scalar_save("s1", 1.0);
  gate.macro_save(MacroNamespace::local, "l", "1");
  gate.macro_save(MacroNamespace::global, "g", "1");
  gate.mat_store("Q", 2, 2, 9.0);
  CHECK_THROWS_AS(gate.mat_store("R", 1, 1, 0.0), error);

  CHECK(var_names() == vars_before);
  CHECK(mat_names() == mats_before);
}

TEST_CASE("output sink tags errors") {
  Workspace ws = small_ws();
  std::vector<std::pair<bool, std::string>> events;
  GateSession gate(ws, [&](bool is_error, const std::string& text) {
    events.emplace_back(is_error, text);
  });
  gate.display("hi");
  gate.display_error("bad");
  gate.display("");
  REQUIRE(events.size() == 3);
  CHECK(events[0] == std::pair<bool, std::string>{false, "hi"});
  CHECK(events[1] == std::pair<bool, std::string>{true, "bad"});
  CHECK(events[2].second == "");
}
