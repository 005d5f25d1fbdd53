#pragma once

#include <string>

#include "bribery/model.hpp"

namespace bribery::testing {

inline std::string data_path(const std::string& name) {
  return std::string(BRIBERY_DATA_DIR) + "/" + name;
}

// 20% attacker, 10% target, 70% honest bloc; C = 6, one pre-mined block.
inline Scenario whale_scenario() {
  return make_scenario(load_pool_file(data_path("whale20.pools")), "m", 6, 1, 6.25);
}

// 2019 pool snapshot, attacker P1, target P2, C = 6.
inline Scenario table2_scenario(int start_state = 4) {
  return with_start_state(
      make_scenario(load_pool_file(data_path("table2.pools")), "P2", 6, 1, 6.25), start_state);
}

}  // namespace bribery::testing
