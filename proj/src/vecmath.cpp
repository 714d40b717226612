#include "gaudi/embedding.hpp"

namespace gaudi::detail {

void throw_dimension_mismatch(Eigen::Index a, Eigen::Index b) {
  throw Error(ErrorCode::DimensionMismatch,
              "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

void throw_zero_vector() {
  throw Error(ErrorCode::ZeroVector, "zero vector has no direction");
}

}  // namespace gaudi::detail
