#pragma once

#include <functional>

namespace maxstab {

// Adaptive Simpson with absolute-plus-relative tolerance. Throws
// numerical_error if the recursion bottoms out before converging.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

}  // namespace maxstab
