#include "cdec/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "cdec/errors.hpp"

namespace cdec {

ParamSet finite_difference_gradient(
    const std::function<double(const ParamSet&)>& f, const ParamSet& params,
    double h) {
    if (h <= 0.0) throw ArgumentError("finite_difference_gradient: h must be > 0");
    ParamSet work;
    for (const auto& e : params) work.add(e.name, e.value);

    ParamSet grads;
    for (std::size_t p = 0; p < work.size(); ++p) {
        Matrix& m = work[p].value;
        Matrix g(m.rows(), m.cols());
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double original = m.data()[i];
            m.data()[i] = original + h;
            const double plus = f(work);
            m.data()[i] = original - h;
            const double minus = f(work);
            m.data()[i] = original;
            g.data()[i] = (plus - minus) / (2.0 * h);
        }
        grads.add(work[p].name, std::move(g));
    }
    return grads;
}

double max_relative_error(const ParamSet& a, const ParamSet& b, double floor) {
    if (a.size() != b.size()) {
        throw ArgumentError("max_relative_error: parameter sets differ in size");
    }
    double worst = 0.0;
    for (const auto& ea : a) {
        const Matrix& mb = b.get(ea.name);
        if (!ea.value.same_shape(mb)) {
            throw DimensionError("max_relative_error: shape mismatch for '" +
                                 ea.name + "'");
        }
        for (std::size_t i = 0; i < ea.value.size(); ++i) {
            double x = ea.value.data()[i];
            double y = mb.data()[i];
            double denom = std::max({std::abs(x), std::abs(y), floor});
            worst = std::max(worst, std::abs(x - y) / denom);
        }
    }
    return worst;
}

}  // namespace cdec
