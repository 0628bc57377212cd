#pragma once

#include <functional>

#include "plsgd/objective.hpp"
#include "plsgd/types.hpp"

namespace plsgd::oracle {

// E[L(w1)] after one SGD step from w, computed exactly by enumerating all n^m
// equally likely ordered batches. Budget: n^m <= 1e6.
double exact_one_step_expectation(const ErmObjective& obj, const Vector& w, double eta, int m);

// Brute-force PL constant for scalar functions over R^1 or R^2: min over grid
// points with f above loss_floor of ||grad f||^2 / f, gradients by central
// differences.
double grid_pl_constant(const std::function<double(const Vector&)>& f, const Vector& lo,
                        const Vector& hi, int resolution, double loss_floor);

}  // namespace plsgd::oracle
