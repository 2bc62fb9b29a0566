#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace jamlab {

/**
 * Counter-based generator (Philox4x32, 10 rounds).
 *
 * Every consumer of randomness in the lab owns an independent stream keyed by
 * (master seed, trial index, role).  Streams never share mutable state, so
 * trials can run in any order or in parallel and still reproduce bit-exactly.
 */
enum class Role : std::uint32_t {
  Codebook = 0,
  AliceSecrets = 1,
  AdversaryBabble = 2,
  AdversaryCoins = 3,
  Message = 4,
};

class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t trial, Role role)
      : key0_(static_cast<std::uint32_t>(master_seed)),
        key1_(static_cast<std::uint32_t>(master_seed >> 32)),
        ctr2_(static_cast<std::uint32_t>(trial)),
        ctr3_(static_cast<std::uint32_t>(role) ^
              (static_cast<std::uint32_t>(trial >> 32) << 8)) {}

  std::uint64_t next_u64() {
    if (avail_ == 0) refill();
    return buf_[--avail_];
  }

  // Unbiased draw from {0, ..., bound-1} by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t u = next_u64();
      if (u >= threshold) return u % bound;
    }
  }

  double next_double() {  // uniform in [0, 1), 53 significant bits
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool coin() { return (next_u64() & 1u) != 0; }

  // Chooses a uniform k-subset of {0, ..., pool-1} (partial Fisher-Yates).
  std::vector<long> sample_subset(long pool, long k) {
    std::vector<long> idx(pool);
    for (long i = 0; i < pool; ++i) idx[i] = i;
    if (k > pool) k = pool;
    for (long i = 0; i < k; ++i) {
      long j = i + static_cast<long>(below(static_cast<std::uint64_t>(pool - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  static void philox_round(std::uint32_t ctr[4], std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t m0 = 0xD2511F53ull * ctr[0];
    const std::uint64_t m1 = 0xCD9E8D57ull * ctr[2];
    std::uint32_t out0 = static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ k0;
    std::uint32_t out1 = static_cast<std::uint32_t>(m1);
    std::uint32_t out2 = static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ k1;
    std::uint32_t out3 = static_cast<std::uint32_t>(m0);
    ctr[0] = out0;
    ctr[1] = out1;
    ctr[2] = out2;
    ctr[3] = out3;
  }

  void refill() {
    std::uint32_t c[4] = {static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32), ctr2_, ctr3_};
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int r = 0; r < 10; ++r) {
      philox_round(c, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = (static_cast<std::uint64_t>(c[1]) << 32) | c[0];
    buf_[1] = (static_cast<std::uint64_t>(c[3]) << 32) | c[2];
    avail_ = 2;
    ++block_;
  }

  std::uint32_t key0_, key1_, ctr2_, ctr3_;
  std::uint64_t block_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int avail_ = 0;
};

}  // namespace jamlab
