#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace colt {

using Vertex = std::uint32_t;
using Weight = std::uint32_t;    // edge weight, positive integer
using Distance = std::uint64_t;  // path length (sum of weights)

// SDL entries live in a flat array; inputs are integral and desk-scale path
// sums stay far below 2^32, so 32 bits per entry suffice.  Widening them
// would double the store for no benefit.  Overflow is checked at build time.
using StoredDistance = std::uint32_t;

inline constexpr Distance kInfDistance = std::numeric_limits<Distance>::max();
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
inline constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

// Text input could not be parsed (message names the offending line).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A parameter combination the caller asked for is invalid or unsupported.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A binary index file is truncated, corrupt, or belongs to different inputs.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

enum class Aggregate : std::uint8_t { Sum = 0, Max = 1 };

inline const char* to_string(Aggregate a) {
    return a == Aggregate::Sum ? "sum" : "max";
}

inline Aggregate aggregate_from_string(const std::string& name) {
    if (name == "sum") return Aggregate::Sum;
    if (name == "max") return Aggregate::Max;
    throw ConfigError("unknown aggregate function: " + name);
}

}  // namespace colt
