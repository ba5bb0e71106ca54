#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace smate::detail {

// Mixes a 64-bit seed with stream selectors through std::seed_seq, whose
// output is fully specified by the standard and therefore portable.
inline std::seed_seq make_seed_seq(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> streams) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (std::uint64_t s : streams) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  return std::seed_seq(words.begin(), words.end());
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> streams) {
  auto seq = make_seed_seq(seed, streams);
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline std::mt19937_64 make_engine(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> streams) {
  auto seq = make_seed_seq(seed, streams);
  return std::mt19937_64(seq);
}

}  // namespace smate::detail
