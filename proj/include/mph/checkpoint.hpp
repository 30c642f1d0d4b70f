#pragma once

#include <string>
#include <vector>

#include "mph/network.hpp"

namespace mph {

// Full training state. Doubles are stored as IEEE-754 bit patterns in hex, so
// save/load round-trips exactly.
struct Checkpoint {
  Network net;
  std::vector<double> channel_divisors;  // input preprocessing, one per channel
  AdamState adam;
  std::string rng_state;  // serialized mt19937_64 stream state
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mph
