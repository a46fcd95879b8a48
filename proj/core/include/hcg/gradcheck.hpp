#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hcg/matrix.hpp"
#include "hcg/param.hpp"

namespace hcg {

using LossFn = std::function<double()>;

// Central differences (L(p+h) - L(p-h)) / (2h) per scalar parameter, one
// gradient matrix per tensor, parameters restored exactly afterward. A
// non-finite loss at a probe point raises NumericError naming the parameter.
std::vector<Matrix> finite_difference_gradient(const LossFn& loss_fn,
                                               const std::vector<ParamTensor*>& params,
                                               double h = 1e-5);

// Worst elementwise relative error, denominator max(|a|,|b|,1e-8).
double gradient_rel_err(const Matrix& analytic, const Matrix& numeric);

struct GradCheckCase {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = false;
};

// Compares analytic backward against finite differences for every layer kind
// plus the assembled tiny model, `trials` random instances each. Input
// gradients are checked alongside parameter gradients.
std::vector<GradCheckCase> run_gradient_suite(std::uint64_t seed, std::size_t trials = 20,
                                              double tol = 1e-4);

}  // namespace hcg
