#include "jamlab/codec.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "jamlab/qmath.hpp"
#include "jamlab/rng.hpp"
#include "jamlab/trajectory.hpp"

namespace jamlab {

namespace {

constexpr char kMagic[4] = {'Q', 'C', 'B', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr double kIntSlack = 1e-9;

void require_chunk_end(const Codebook& cb, long t) {
  if (t <= 0 || t > cb.params.n || t % cb.chunk_len != 0)
    throw std::invalid_argument("prefix length must be a positive chunk multiple within the block");
}

// Hamming distance between a chunk block and the unerased received symbols.
long block_distance(const Symbol* block, const std::uint16_t* y, long len, int q) {
  long d = 0;
  for (long i = 0; i < len; ++i) {
    const std::uint16_t yi = y[i];
    if (yi == static_cast<std::uint16_t>(q)) continue;
    d += yi != block[i];
  }
  return d;
}

// Minimum over secrets of the distance between the (chunk, message) blocks
// and the received chunk; chunks are disjoint, so summing these per-chunk
// minima equals minimizing over whole secret assignments.
long chunk_min_distance(const Codebook& cb, const std::uint16_t* y, long chunk,
                        long message) {
  long best = LONG_MAX;
  for (long s = 0; s < cb.secrets; ++s) {
    const long d = block_distance(cb.block(chunk, message, s), y, cb.chunk_len, cb.params.q);
    best = std::min(best, d);
  }
  return best;
}

template <class T>
void put(std::ofstream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw std::runtime_error("truncated codebook file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

Codebook generate_codebook(const ChannelParams& params, std::uint64_t seed,
                           std::size_t max_bytes) {
  auto errors = params.validate(true);
  if (!errors.empty()) {
    std::string joined = "invalid parameters:";
    for (const auto& e : errors) joined += " " + e + ";";
    throw std::invalid_argument(joined);
  }
  if (params.q > 256)
    throw std::invalid_argument("codebooks store one byte per symbol, so q must not exceed 256");

  Codebook cb;
  cb.params = params;
  cb.messages = params.message_count();
  cb.secrets = params.secret_count;
  cb.chunk_len = params.chunk_length();
  cb.chunks = params.chunk_count();
  cb.seed = seed;

  const std::size_t bytes = std::size_t(cb.chunks) * std::size_t(cb.messages) *
                            std::size_t(cb.secrets) * std::size_t(cb.chunk_len);
  if (bytes > max_bytes)
    throw std::length_error("codebook table of " + std::to_string(bytes) +
                            " bytes exceeds the cap of " + std::to_string(max_bytes));

  Stream stream(seed, 0, Role::Codebook);
  cb.table.resize(bytes);
  for (auto& sym : cb.table)
    sym = static_cast<Symbol>(stream.below(static_cast<std::uint64_t>(params.q)));
  return cb;
}

std::vector<Symbol> encode(const Codebook& cb, long message,
                           const std::vector<long>& secrets) {
  if (message < 0 || message >= cb.messages)
    throw std::invalid_argument("message index out of range");
  if (static_cast<long>(secrets.size()) != cb.chunks)
    throw std::invalid_argument("need exactly one secret per chunk");
  std::vector<Symbol> word(static_cast<std::size_t>(cb.params.n));
  for (long j = 0; j < cb.chunks; ++j) {
    if (secrets[j] < 0 || secrets[j] >= cb.secrets)
      throw std::invalid_argument("secret index out of range");
    std::memcpy(word.data() + j * cb.chunk_len, cb.block(j, message, secrets[j]),
                static_cast<std::size_t>(cb.chunk_len));
  }
  return word;
}

ReceivedWord ReceivedWord::from_sent(const std::vector<Symbol>& x, int q) {
  ReceivedWord y;
  y.q = q;
  y.symbols.assign(x.begin(), x.end());
  return y;
}

long ReceivedWord::erasures_up_to(long t) const {
  long count = 0;
  for (long i = 0; i < t; ++i) count += erased(i);
  return count;
}

long list_radius(const ChannelParams& params, long t, long lambda) {
  const double ref = p_hat_t(double(t), double(lambda), params);
  return static_cast<long>(std::floor(double(t - lambda) * ref + kIntSlack));
}

long consistency_radius(const ChannelParams& params, long t, long lambda) {
  const double qd = double(params.q);
  const double np_star = params.p_star * double(params.n);
  const double mc = params.epsilon * params.epsilon / (9.0 * qd * qd);
  const double span = double(params.n) - np_star - double(t) + double(lambda);
  const double r = span * ((qd - 1.0) / (2.0 * qd) - mc) - np_star / (2.0 * qd);
  return static_cast<long>(std::floor(r + kIntSlack));
}

std::vector<long> list_decode_prefix(const Codebook& cb, const ReceivedWord& y,
                                     long t, long radius) {
  require_chunk_end(cb, t);
  if (static_cast<long>(y.symbols.size()) != cb.params.n)
    throw std::invalid_argument("received word length differs from the block length");
  std::vector<long> list;
  if (radius < 0) return list;
  const long k = t / cb.chunk_len;
  for (long m = 0; m < cb.messages; ++m) {
    long total = 0;
    for (long j = 0; j < k && total <= radius; ++j)
      total += chunk_min_distance(cb, y.symbols.data() + j * cb.chunk_len, j, m);
    if (total <= radius) list.push_back(m);
  }
  return list;
}

ConsistencyResult consistency_decode(const Codebook& cb, const ReceivedWord& y,
                                     long t, const std::vector<long>& list) {
  require_chunk_end(cb, t);
  const long lambda = y.erasures_up_to(t);
  const long radius = consistency_radius(cb.params, t, lambda);
  const long k = t / cb.chunk_len;

  ConsistencyResult out;
  long survivors = 0;
  for (long m : list) {
    long total = 0;
    bool within = radius >= 0;
    for (long j = k; j < cb.chunks && within; ++j) {
      total += chunk_min_distance(cb, y.symbols.data() + j * cb.chunk_len, j, m);
      within = total <= radius;
    }
    if (within) {
      ++survivors;
      out.message = m;
    }
  }
  if (survivors == 0) {
    out.kind = ConsistencyKind::None;
    out.message = -1;
  } else if (survivors == 1) {
    out.kind = ConsistencyKind::Unique;
  } else {
    out.kind = ConsistencyKind::Ambiguous;
    out.message = -1;
  }
  return out;
}

namespace {

// Analytic cap on the list size at one iteration point; +inf when the
// denominator closes (the decoder makes no size promise there).
double analytic_list_bound(const ChannelParams& pr, long t, long lambda) {
  const double qd = double(pr.q);
  const double x_syms = double(t - lambda);
  double h;
  try {
    h = q_entropy(std::clamp(p_hat_t(double(t), double(lambda), pr), 0.0, 1.0 - 1.0 / qd), pr.q);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::infinity();
  }
  const double denom = x_syms * (1.0 - h) - double(pr.n) * pr.rate -
                       double(pr.n) * pr.theta * pr.theta / (qd * qd);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return (x_syms + 3.0 * std::log(double(pr.n)) / std::log(qd)) / denom;
}

}  // namespace

DecodeOutcome receiver_decode(const Codebook& cb, const ReceivedWord& y) {
  const ChannelParams& pr = cb.params;
  if (static_cast<long>(y.symbols.size()) != pr.n)
    throw std::invalid_argument("received word length differs from the block length");

  const auto ends = pr.chunk_ends();
  std::vector<long> profile(ends.size());
  {
    long lam = 0, pos = 0;
    for (std::size_t i = 0; i < ends.size(); ++i) {
      for (; pos < ends[i]; ++pos) lam += y.erased(pos);
      profile[i] = lam;
    }
  }

  DecodeOutcome out;
  long t0, stop;
  try {
    t0 = t_zero(profile, pr);
    stop = stop_point(profile, pr);
  } catch (const std::runtime_error&) {
    return out;  // no usable iteration window: Exhausted with an empty trace
  }

  std::size_t i = 0;
  while (ends[i] != t0) ++i;
  for (; i < ends.size() && ends[i] <= stop; ++i) {
    const long t = ends[i];
    const long lambda = profile[i];
    DecodeAttempt attempt;
    attempt.t = t;
    attempt.lambda = lambda;
    attempt.radius = list_radius(pr, t, lambda);
    attempt.list = list_decode_prefix(cb, y, t, attempt.radius);
    attempt.list_bound = analytic_list_bound(pr, t, lambda);

    const auto cons = consistency_decode(cb, y, t, attempt.list);
    attempt.consistency = cons.kind;
    out.trace.push_back(std::move(attempt));
    out.t_star = t;

    if (cons.kind == ConsistencyKind::Unique) {
      out.kind = DecodeKind::Decoded;
      out.message = cons.message;
      return out;
    }
    if (cons.kind == ConsistencyKind::Ambiguous) {
      out.kind = DecodeKind::Ambiguous;
      return out;
    }
  }
  out.kind = DecodeKind::Exhausted;
  return out;
}

GoodnessReport suffix_goodness(const Codebook& cb, long message,
                               const std::vector<std::vector<Symbol>>& excluded,
                               long t, std::size_t max_rows) {
  require_chunk_end(cb, t);
  if (message < 0 || message >= cb.messages)
    throw std::invalid_argument("message index out of range");
  const long suffix_len = cb.params.n - t;
  for (const auto& e : excluded)
    if (static_cast<long>(e.size()) != suffix_len)
      throw std::invalid_argument("excluded suffixes must have length n - t");

  const long k = t / cb.chunk_len;
  const long tail_chunks = cb.chunks - k;
  double combos = std::pow(double(cb.secrets), double(tail_chunks));
  if (combos > double(max_rows))
    throw std::length_error("secret-suffix enumeration exceeds the row cap");

  GoodnessReport report;
  const double qd = double(cb.params.q);
  const double eps = cb.params.epsilon;
  report.threshold = double(suffix_len) * ((qd - 1.0) / qd) -
                     double(suffix_len) * 2.0 * eps * eps / (9.0 * qd * qd * qd);

  std::vector<long> secrets(static_cast<std::size_t>(tail_chunks), 0);
  std::vector<Symbol> suffix(static_cast<std::size_t>(suffix_len));
  long good = 0;
  for (;;) {
    for (long j = 0; j < tail_chunks; ++j)
      std::memcpy(suffix.data() + j * cb.chunk_len,
                  cb.block(k + j, message, secrets[static_cast<std::size_t>(j)]),
                  static_cast<std::size_t>(cb.chunk_len));
    GoodnessRow row;
    row.secrets = secrets;
    row.min_distance = LONG_MAX;
    for (const auto& e : excluded) {
      long d = 0;
      for (long i = 0; i < suffix_len; ++i) d += suffix[i] != e[i];
      row.min_distance = std::min(row.min_distance, d);
    }
    row.good = excluded.empty() || double(row.min_distance) > report.threshold;
    good += row.good;
    report.rows.push_back(std::move(row));

    long j = tail_chunks - 1;
    while (j >= 0 && ++secrets[static_cast<std::size_t>(j)] == cb.secrets)
      secrets[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
  report.good_fraction = double(good) / double(report.rows.size());
  return report;
}

void save_codebook(const Codebook& cb, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cb.params.q));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.params.n));
  const long g = std::gcd(cb.chunk_len, cb.params.n);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.chunk_len / g));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.params.n / g));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.messages));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(cb.secrets));
  put<std::uint64_t>(out, cb.seed);
  out.write(reinterpret_cast<const char*>(cb.table.data()),
            static_cast<std::streamsize>(cb.table.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + " is not a codebook file");
  if (get<std::uint32_t>(in) != kVersion)
    throw std::runtime_error("unsupported codebook version");

  Codebook cb;
  cb.params.q = static_cast<int>(get<std::uint32_t>(in));
  cb.params.n = static_cast<long>(get<std::uint64_t>(in));
  const long num = static_cast<long>(get<std::uint64_t>(in));
  const long den = static_cast<long>(get<std::uint64_t>(in));
  cb.messages = static_cast<long>(get<std::uint64_t>(in));
  cb.secrets = static_cast<long>(get<std::uint64_t>(in));
  cb.seed = get<std::uint64_t>(in);

  if (cb.params.q < 2 || cb.params.q > 256 || cb.params.n < 2 || num < 1 ||
      den < 2 || cb.params.n % den != 0 || cb.messages < 2 || cb.secrets < 1)
    throw std::runtime_error("codebook header is inconsistent");
  cb.chunk_len = num * (cb.params.n / den);
  if (cb.chunk_len < 1 || cb.params.n % cb.chunk_len != 0)
    throw std::runtime_error("codebook header encodes no valid chunking");
  cb.chunks = cb.params.n / cb.chunk_len;
  cb.params.theta = double(cb.chunk_len) / double(cb.params.n);
  cb.params.rate = std::log2(double(cb.messages)) /
                   (double(cb.params.n) * std::log2(double(cb.params.q)));
  cb.params.secret_count = cb.secrets;

  const std::size_t bytes = std::size_t(cb.chunks) * std::size_t(cb.messages) *
                            std::size_t(cb.secrets) * std::size_t(cb.chunk_len);
  cb.table.resize(bytes);
  in.read(reinterpret_cast<char*>(cb.table.data()), static_cast<std::streamsize>(bytes));
  if (!in || in.gcount() != static_cast<std::streamsize>(bytes))
    throw std::runtime_error("codebook table is truncated");
  for (Symbol s : cb.table)
    if (s >= cb.params.q && cb.params.q < 256)
      throw std::runtime_error("codebook table holds symbols outside the alphabet");
  return cb;
}

}  // namespace jamlab
