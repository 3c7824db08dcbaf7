#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "germlab/common.hpp"

namespace germlab {

inline constexpr int kMaxGeneratedElements = 16;
inline constexpr int kMaxGeneratedPoints = 32;

// A twisted-action document on `num_points` points. The semigroup is the
// closure of a few random partial bijections (at most `max_elements` of
// them, the empty map acting as zero) and the cocycle is the coboundary of
// a random eighth-root-of-unity germ function, so it is normalized by
// construction. The output depends only on the arguments.
json random_fixture(std::uint64_t seed, int max_elements = 8, int num_points = 4);

// Hand-written documents: "z2-flip", "semilattice", "group-zero",
// "zero-bundle", "doubled-point".
std::vector<std::string> builtin_fixture_names();
// Groupoid line-bundle documents used by the round-trip checks.
std::vector<std::string> round_trip_fixture_names();
// Either family, by name. Throws InputError for an unknown name.
json builtin_fixture(const std::string& name);

}  // namespace germlab
