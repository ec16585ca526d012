#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dsel {

inline constexpr const char* version = "0.1.0";

// Failure categories; each maps onto one CLI exit code.
enum class ErrorKind { io, data, domain, usage };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

int exit_code(ErrorKind kind) noexcept;

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

std::string hex64(std::uint64_t value);

/// Mixes a base seed with a key so that independent streams (one per
/// collection, fold, ...) do not depend on the order they are requested in.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

/// Seeded generator whose draws are reproducible across standard libraries:
/// mt19937_64 has a fixed output sequence, and the bounded/real draws below
/// are implemented here rather than through the implementation-defined
/// std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform real in [0, 1).
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::vector<std::string> split_ws(std::string_view text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dsel
