#pragma once

#include <cstddef>

namespace glyphwarp {

// Relative changes are returned in percent. All rates must lie in [0,1];
// a zero denominator throws std::invalid_argument.

/// Gain from out-of-distribution training data:
/// 100 * (error of the clean-trained model / error of the perturbed-trained model - 1).
double rel_ood_change(double err_clean_trained, double err_perturbed_trained);

/// Multi-task relative improvement, 100 * (1 - single-task error / multi-task error).
double rel_multitask_improvement(double err_single, double err_multi);

/// The opposite-signed variant, 100 * (single-task error / multi-task error - 1).
double rel_multitask_change(double err_single, double err_multi);

/// Binomial standard error sqrt(err (1 - err) / n). Throws on n == 0.
double stderr_of_rate(double err, std::size_t n);

}  // namespace glyphwarp
