#pragma once

#include <functional>

#include "cdec/params.hpp"

namespace cdec {

// Central-difference gradient oracle: (f(p+h) - f(p-h)) / (2h) per
// coordinate. f must be deterministic. Independent of the tape's backward
// pass; used to cross-check it.
ParamSet finite_difference_gradient(
    const std::function<double(const ParamSet&)>& f, const ParamSet& params,
    double h);

// Max over coordinates of |a-b| / max(|a|, |b|, floor); parameter sets must
// match by name and shape.
double max_relative_error(const ParamSet& a, const ParamSet& b,
                          double floor = 1e-8);

}  // namespace cdec
