#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "statbridge/workspace.hpp"

namespace fixtures {

using namespace statbridge;

// 74-row, 5-variable car dataset: price/mpg/turn int, headroom float,
// foreign a labeled byte (0 Domestic, 1 Foreign). Head and tail rows are
// pinned; the middle is seeded filler.
inline void build_auto(Workspace& ws) {
  ws.clear_dataset();
  ws.set_obs(74);
  ws.create_variable("price", StorageType::SInt);
  ws.create_variable("mpg", StorageType::SInt);
  ws.create_variable("headroom", StorageType::SFloat);
  ws.create_variable("turn", StorageType::SInt);
  ws.create_variable("foreign", StorageType::SByte);
  ws.label_define("origin", {{0, "Domestic"}, {1, "Foreign"}});
  ws.label_attach("foreign", "origin");

  Variable& price = ws.dataset().var(1);
  Variable& mpg = ws.dataset().var(2);
  Variable& headroom = ws.dataset().var(3);
  Variable& turn = ws.dataset().var(4);
  Variable& foreign = ws.dataset().var(5);

  const std::int64_t head_price[] = {4099, 4749, 3799, 4816, 7827, 5788, 4453, 5189};
  const std::int64_t head_mpg[] = {22, 17, 22, 20, 15, 18, 26, 20};
  const float head_headroom[] = {2.5f, 3.0f, 3.0f, 4.5f, 4.0f, 4.0f, 3.0f, 2.0f};
  const std::int64_t head_turn[] = {40, 40, 35, 40, 43, 43, 34, 42};
  const std::int64_t tail_price[] = {3748, 5719, 7140, 5397, 4697, 6850, 11995};
  const std::int64_t tail_mpg[] = {31, 18, 23, 41, 25, 25, 17};
  const float tail_headroom[] = {3.0f, 2.0f, 2.5f, 3.0f, 3.0f, 2.0f, 2.5f};
  const std::int64_t tail_turn[] = {35, 36, 36, 35, 35, 36, 37};

  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::int64_t> dprice(3291, 15906), dmpg(12, 41), dturn(31, 51),
      dhead(3, 10);
  for (std::size_t i = 0; i < 74; ++i) {
    if (i < 8) {
      price.set_integer(i, head_price[i]);
      mpg.set_integer(i, head_mpg[i]);
      headroom.set_float(i, head_headroom[i]);
      turn.set_integer(i, head_turn[i]);
    } else if (i >= 67) {
      price.set_integer(i, tail_price[i - 67]);
      mpg.set_integer(i, tail_mpg[i - 67]);
      headroom.set_float(i, tail_headroom[i - 67]);
      turn.set_integer(i, tail_turn[i - 67]);
    } else {
      price.set_integer(i, dprice(rng));
      mpg.set_integer(i, dmpg(rng));
      headroom.set_float(i, static_cast<float>(dhead(rng)) / 2.0f);
      turn.set_integer(i, dturn(rng));
    }
    foreign.set_integer(i, i >= 52 ? 1 : 0);
  }
  ws.clear_dirty();
}

// n rows of m standard-normal double columns x1..xm, optionally salting
// in missing flavors at the given rate.
inline void build_normal(Workspace& ws, std::size_t n, std::size_t m, std::uint64_t seed,
                         double missing_rate = 0.0) {
  ws.clear_dataset();
  ws.set_obs(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> flavor(0, 26);
  for (std::size_t c = 1; c <= m; ++c) {
    const std::string name = "x" + std::to_string(c);
    ws.create_variable(name, StorageType::SDouble);
    Variable& var = ws.dataset().var(ws.dataset().index_of(name));
    for (std::size_t i = 0; i < n; ++i) {
      if (missing_rate > 0 && coin(rng) < missing_rate) var.set_missing(i, flavor(rng));
      else var.set_double(i, normal(rng));
    }
  }
}

}  // namespace fixtures
