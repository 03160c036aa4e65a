#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace swingid {

using Vec3 = Eigen::Vector3d;
using Path3 = std::vector<Vec3>;

/// Binary swing assessment. Targets are coded bad = 1, good = 0.
enum class Label { good, bad };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

inline double target_of(Label label) { return label == Label::bad ? 1.0 : 0.0; }

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents or unknown enumerators.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Values that violate a documented precondition (bounds, sizes).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Seed derivation. These are fixed integer mixes so that every seed in a
// report can be replayed on any platform.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Shortest decimal text that parses back to exactly `value`; NaN as "NaN".
std::string format_double(double value);
/// Parses a double, accepting "NaN"/"nan"; throws ParseError on junk.
double parse_double(std::string_view text);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace swingid
