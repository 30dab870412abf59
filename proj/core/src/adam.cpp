#include "cdec/adam.hpp"

#include <cmath>

#include "cdec/errors.hpp"

namespace cdec {

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("adam: learning rate must be > 0");
    }
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("adam: betas must be in [0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw ConfigError("adam: epsilon must be > 0");
    }
}

AdamOptimizer::AdamOptimizer(AdamConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void AdamOptimizer::step(ParamSet& params, const ParamSet& grads) {
    if (t_ == 0) {
        for (const auto& e : params) {
            m_.add(e.name, Matrix::zeros(e.value.rows(), e.value.cols()));
            v_.add(e.name, Matrix::zeros(e.value.rows(), e.value.cols()));
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

    for (auto& e : params) {
        const Matrix& g = grads.get(e.name);
        if (!g.same_shape(e.value)) {
            throw DimensionError("adam: gradient " + g.shape_str() +
                                 " vs parameter " + e.value.shape_str() + " for '" +
                                 e.name + "'");
        }
        Matrix& m = m_.get(e.name);
        Matrix& v = v_.get(e.name);
        for (std::size_t i = 0; i < e.value.size(); ++i) {
            const double gi = g.data()[i];
            m.data()[i] = cfg_.beta1 * m.data()[i] + (1.0 - cfg_.beta1) * gi;
            v.data()[i] = cfg_.beta2 * v.data()[i] + (1.0 - cfg_.beta2) * gi * gi;
            const double m_hat = m.data()[i] / bc1;
            const double v_hat = v.data()[i] / bc2;
            e.value.data()[i] -=
                cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }
}

}  // namespace cdec
