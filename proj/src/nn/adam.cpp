#include "sizer/nn/adam.hpp"

#include <cmath>

#include "sizer/nn/kernels.hpp"
#include "sizer/util/error.hpp"

namespace sizer::nn {

ParamUpdater::ParamUpdater(std::vector<Parameter*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Parameter* p : params_) {
        m_.emplace_back(p->value.rows(), p->value.cols());
        v_.emplace_back(p->value.rows(), p->value.cols());
    }
}

void ParamUpdater::step() {
    for (const Parameter* p : params_) {
        if (!p->grad.same_shape(p->value)) {
            throw DimensionError("gradient shape does not match parameter " + p->name);
        }
        if (!p->grad.all_finite()) {
            throw NumericError("non-finite gradient for parameter " + p->name);
        }
    }
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double correction =
        std::sqrt(1.0 - std::pow(config_.beta2, t)) / (1.0 - std::pow(config_.beta1, t));
    const kernels::AdamCoefficients coef{config_.learning_rate * correction, config_.beta1,
                                         config_.beta2, config_.epsilon};
    const auto& k = kernels::active();
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Parameter& p = *params_[i];
        k.adam(p.value.size(), p.value.data(), p.grad.data(), m_[i].data(), v_[i].data(), coef);
    }
}

}  // namespace sizer::nn
