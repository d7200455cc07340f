#include "glyphwarp/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace glyphwarp {

namespace {

void check_rate(double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument(std::string(name) + " must be a rate in [0,1]");
}

double ratio(double num, double den, const char* num_name, const char* den_name) {
    check_rate(num, num_name);
    check_rate(den, den_name);
    if (den == 0.0) throw std::invalid_argument(std::string(den_name) + " is zero");
    return num / den;
}

}  // namespace

double rel_ood_change(double err_clean_trained, double err_perturbed_trained) {
    return 100.0 * (ratio(err_clean_trained, err_perturbed_trained, "clean-trained error",
                          "perturbed-trained error") -
                    1.0);
}

double rel_multitask_improvement(double err_single, double err_multi) {
    return 100.0 * (1.0 - ratio(err_single, err_multi, "single-task error", "multi-task error"));
}

double rel_multitask_change(double err_single, double err_multi) {
    return 100.0 * (ratio(err_single, err_multi, "single-task error", "multi-task error") - 1.0);
}

double stderr_of_rate(double err, std::size_t n) {
    check_rate(err, "error rate");
    if (n == 0) throw std::invalid_argument("standard error needs n >= 1");
    return std::sqrt(err * (1.0 - err) / static_cast<double>(n));
}

}  // namespace glyphwarp
