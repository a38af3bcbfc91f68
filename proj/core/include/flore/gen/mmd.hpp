#pragma once

#include <array>
#include <span>

#include "flore/gen/autodiff.hpp"

namespace flore {

inline constexpr std::array<double, 3> kDefaultKernelWidths{0.5, 1.0, 2.0};

/// Squared maximum mean discrepancy, biased V-statistic, with a Gaussian
/// kernel mixture exp(-d^2 / (2 c^2 s^2)) averaged over the widths c. s^2 is
/// the median squared distance over all pooled pairs (median heuristic) and
/// is differentiated through. Rows are samples. Throws ShapeError when the
/// column counts differ and ParameterError for fewer than two rows.
double mmd(const ad::Mat& x, const ad::Mat& y, std::span<const double> widths = kDefaultKernelWidths);
ad::Var mmd(ad::Tape& t, ad::Var x, ad::Var y, std::span<const double> widths = kDefaultKernelWidths);

/// Moment-matching discrepancy: ||mean(x) - mean(y)||^2 + ||var(x) - var(y)||^2
/// with per-column (population) variances.
ad::Var moment_match(ad::Tape& t, ad::Var x, ad::Var y);

}  // namespace flore
