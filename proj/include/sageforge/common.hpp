#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sageforge {

// Half-open byte range [begin, end).
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end == begin; }
  bool contains(const ByteSpan& o) const { return begin <= o.begin && o.end <= end; }
  bool overlaps(const ByteSpan& o) const { return begin < o.end && o.begin < end; }
  bool operator==(const ByteSpan&) const = default;
};

enum class Language { Python };

std::string_view language_name(Language lang);
Language parse_language(std::string_view name);
std::string_view language_extension(Language lang);

// Misconfiguration (bad config values, missing grammar).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal consistency violation between linked data structures.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

// Seeded generator with distributions implemented on top of the raw engine,
// so draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform real in [0, 1) with 53 bits of randomness.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }
  double normal();

  // Derives an independent stream for a sub-task.
  Rng fork(std::uint64_t salt);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

bool is_valid_utf8(std::string_view s);
// Replaces invalid UTF-8 sequences with U+FFFD and strips a leading BOM.
// Idempotent.
std::string repair_utf8(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace sageforge

namespace sageforge::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level level);
void info(std::string_view msg);
void warn(std::string_view msg);
void error(std::string_view msg);

}  // namespace sageforge::log
