#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

namespace lbhom {

// Adaptive Gauss-Kronrod 15(7) integration to an absolute tolerance.
// Bisects until |K15 - G7| <= local tolerance; throws NumericError when the
// recursion depth limit is hit before the estimate settles.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 52);

// Same, but the interval is pre-split at the given interior knots (kinks,
// scale changes). Knots outside (a,b) are ignored.
double integrate_segments(const std::function<double(double)>& f, double a,
                          double b, const std::vector<double>& knots,
                          double abs_tol, int max_depth = 52);

// Exponential integral E1(x) = int_x^inf e^-u / u du, x > 0.
double expint_e1(double x);

// E1 evaluated from log(x); usable when x itself underflows to 0.
double expint_e1_from_log(double log_x);

}  // namespace lbhom
