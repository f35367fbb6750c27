#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "ffrg/document.hpp"

namespace ffrg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

namespace features {

inline constexpr int kHashDim = 256;
inline constexpr int kFlagDim = 16;
inline constexpr int kGeometryDim = 4;
inline constexpr int kWordDim = kHashDim + kFlagDim + kGeometryDim; // 276
inline constexpr int kContextDim = kWordDim;
inline constexpr int kDim = kWordDim + kContextDim; // 552

inline constexpr int kFlagOffset = kHashDim;
inline constexpr int kGeometryOffset = kHashDim + kFlagDim;
inline constexpr int kContextOffset = kWordDim;

inline constexpr double kContextRadius = 0.15;
inline constexpr std::uint64_t kHashSeed = 0x9e3779b97f4a7c15ull;

/// Signed hash bucket of a character trigram.
struct Bucket {
    int index;
    double sign;
};
Bucket hash_trigram(std::string_view trigram);

} // namespace features

/// One row per word id, features::kDim columns.
///
/// Layout: [hashed trigrams | shape & type flags | cx cy w h | mean of the
/// first three blocks over other words whose centers lie within
/// kContextRadius]. Neighbors are summed in reading order, so the result is
/// bitwise independent of the input word order.
Matrix featurize(const Document& doc);

} // namespace ffrg
