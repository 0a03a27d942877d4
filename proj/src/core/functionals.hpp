#pragma once

#include <functional>
#include <string>

#include "core/grid.hpp"
#include "core/model.hpp"

namespace fokker {

//! Positive weight b(x, t) entering the generalized Fisher functionals.
struct WeightFunction {
  std::function<double(double x, double t)> eval;
  std::string name;
};

WeightFunction unit_weight();
WeightFunction model_weight(ModelPtr model);  // b = sigma(x,t)^2

// Differential entropy -int p log p; nodes below the density floor
// contribute nothing.
double entropy(const DensityField& p);

// KL divergence int p log(p/q); requires q above the floor wherever p is.
double kl(const DensityField& p, const DensityField& q);

// Weighted Fisher information int b p'^2 / p.
double fisher_b(const DensityField& p, const WeightFunction& b, double t);

// Relative Fisher information int p b (d/dx log(p/q))^2.
double relative_fisher_b(const DensityField& p, const DensityField& q, const WeightFunction& b,
                         double t);

// Node-wise gradient of the weighted Fisher functional,
// b p'^2 / p^2 - 2 (b p')' / p.
std::vector<double> fisher_gradient(const DensityField& p, const WeightFunction& b, double t);

// J_b(p) - J_b(q) - <grad J_b(q), p - q>; equals the relative Fisher
// information for smooth decaying fields.
double bregman_divergence(const DensityField& p, const DensityField& q, const WeightFunction& b,
                          double t);

}  // namespace fokker
