#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jamlab/params.hpp"

namespace jamlab {

using Symbol = std::uint8_t;

/**
 * Chunked stochastic codebook.  Each chunk of the block carries an
 * independent uniform table indexed by (message, secret); the transmitter
 * draws one fresh secret per chunk, so a message corresponds to
 * secret_count^chunk_count codewords.  Symbols are stored one byte each,
 * which caps q at 256.
 */
struct Codebook {
  ChannelParams params;
  long messages = 0;
  long secrets = 0;
  long chunks = 0;
  long chunk_len = 0;
  std::uint64_t seed = 0;
  std::vector<Symbol> table;  // [chunk][message][secret][offset], row-major

  Symbol symbol(long chunk, long message, long secret, long offset) const {
    return table[static_cast<std::size_t>(
        ((chunk * messages + message) * secrets + secret) * chunk_len + offset)];
  }
  const Symbol* block(long chunk, long message, long secret) const {
    return table.data() + static_cast<std::size_t>(
        ((chunk * messages + message) * secrets + secret) * chunk_len);
  }
};

// Fills the table with uniform symbols from the codebook stream of this seed.
// Throws std::length_error when the table would exceed max_bytes.
Codebook generate_codebook(const ChannelParams& params, std::uint64_t seed,
                           std::size_t max_bytes = std::size_t(1) << 28);

// Concatenates the chunk blocks selected by one secret per chunk.
std::vector<Symbol> encode(const Codebook& cb, long message,
                           const std::vector<long>& secrets);

/**
 * A word as the receiver sees it: values 0..q-1, or q for an erasure.
 */
struct ReceivedWord {
  int q = 2;
  std::vector<std::uint16_t> symbols;

  static ReceivedWord from_sent(const std::vector<Symbol>& x, int q);
  bool erased(long i) const { return symbols[static_cast<std::size_t>(i)] == static_cast<std::uint16_t>(q); }
  long erasures_up_to(long t) const;  // lambda_t
};

// Decode radii.  The list radius floors (t-lambda)*p_hat_t; the consistency
// radius floors (n - n*p_star - t + lambda)*((q-1)/(2q) - eps^2/(9q^2))
// - n*p_star/(2q).  Both add kSlack before flooring so boundary-exact
// products do not round down.
long list_radius(const ChannelParams& params, long t, long lambda);
long consistency_radius(const ChannelParams& params, long t, long lambda);

/**
 * Messages with some secret assignment whose codeword prefix lies within
 * the given Hamming distance of y over the unerased positions of [0, t).
 * t must be a chunk end.  Distances minimize per chunk over secrets, which
 * equals the minimum over full secret prefixes because chunks are disjoint.
 */
std::vector<long> list_decode_prefix(const Codebook& cb, const ReceivedWord& y,
                                     long t, long radius);

enum class ConsistencyKind { None, Unique, Ambiguous };

struct ConsistencyResult {
  ConsistencyKind kind = ConsistencyKind::None;
  long message = -1;  // set when kind == Unique
};

// Tests which listed messages have a secret suffix whose codeword agrees
// with y on unerased positions of [t, n) up to the consistency radius.
ConsistencyResult consistency_decode(const Codebook& cb, const ReceivedWord& y,
                                     long t, const std::vector<long>& list);

struct DecodeAttempt {
  long t = 0;
  long lambda = 0;
  long radius = 0;
  std::vector<long> list;
  ConsistencyKind consistency = ConsistencyKind::None;
  double list_bound = 0.0;  // analytic cap on the list size at this point
};

enum class DecodeKind { Decoded, Ambiguous, Exhausted };

struct DecodeOutcome {
  DecodeKind kind = DecodeKind::Exhausted;
  long message = -1;
  long t_star = 0;  // chunk end of the final attempt
  std::vector<DecodeAttempt> trace;
};

/**
 * The full iterative decoder: starting from the first usable chunk end, list
 * decode the prefix, test each listed message for a consistent suffix, and
 * either commit (exactly one survivor), declare ambiguity (several), or
 * advance one chunk (none).  Running past the stop point yields Exhausted.
 */
DecodeOutcome receiver_decode(const Codebook& cb, const ReceivedWord& y);

/**
 * Suffix separation diagnostic.  For every secret suffix of the given
 * message, reports the minimum Hamming distance from its codeword suffix on
 * [t, n) to the excluded suffixes, and whether that clears the separation
 * threshold (n-t)(q-1)/q - (n-t)*2*eps^2/(9q^3).  An empty excluded list
 * leaves min_distance at LONG_MAX and counts as good.
 */
struct GoodnessRow {
  std::vector<long> secrets;
  long min_distance = 0;
  bool good = false;
};
struct GoodnessReport {
  double threshold = 0.0;
  double good_fraction = 0.0;
  std::vector<GoodnessRow> rows;
};
GoodnessReport suffix_goodness(const Codebook& cb, long message,
                               const std::vector<std::vector<Symbol>>& excluded,
                               long t, std::size_t max_rows = 1u << 20);

// Binary format: magic "QCBK", u32 version, u32 q, u64 n, u64 theta numerator,
// u64 theta denominator, u64 message count, u64 secret count, u64 seed, then
// the row-major table, one byte per symbol.  Little-endian throughout.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace jamlab
