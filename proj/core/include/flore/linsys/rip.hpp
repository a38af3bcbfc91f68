#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "flore/linsys/sketch_operator.hpp"

namespace flore {

/// Sampled RIP distance: max over `trials` random s-sparse unit vectors x
/// (uniform support, Gaussian nonzeros, normalized) of | ||Ax||_2 - 1 |.
/// This is a lower bound on the true supremum over all s-sparse vectors.
/// Throws ParameterError when s > N, s == 0 or trials == 0.
double rip_distance(const Eigen::MatrixXd& a, std::size_t s, std::size_t trials, std::uint64_t seed);
double rip_distance(const SketchOperator& op, std::size_t s, std::size_t trials, std::uint64_t seed);

/// Running maximum after each trial; back() equals rip_distance.
std::vector<double> rip_trace(const Eigen::MatrixXd& a, std::size_t s, std::size_t trials, std::uint64_t seed);
std::vector<double> rip_trace(const SketchOperator& op, std::size_t s, std::size_t trials, std::uint64_t seed);

}  // namespace flore
