#pragma once

#include <cmath>
#include <vector>

#include "pdet/nn/tensor.hpp"

namespace pdet::nn {

// Standard bias-corrected Adam. Moment buffers are allocated lazily on the
// first step, in parameter order, so the state can outlive re-registration.
template <typename S>
struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t step_count = 0;
    std::vector<Tensor<S>> m, v;
};

template <typename S>
void adam_step(const std::vector<Param<S>*>& params, AdamState<S>& st) {
    if (st.m.empty()) {
        st.m.reserve(params.size());
        st.v.reserve(params.size());
        for (const Param<S>* p : params) {
            st.m.emplace_back(p->value.shape);
            st.v.emplace_back(p->value.shape);
        }
    }
    if (st.m.size() != params.size())
        fail(ErrorCode::ShapeMismatch, "adam_step: state/param count mismatch");

    st.step_count += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Param<S>& p = *params[i];
        if (!p.value.same_shape(st.m[i]))
            fail(ErrorCode::ShapeMismatch, "adam_step: param shape changed under state");
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            const double g = static_cast<double>(p.grad.data[j]);
            const double m = st.beta1 * static_cast<double>(st.m[i].data[j]) + (1.0 - st.beta1) * g;
            const double v = st.beta2 * static_cast<double>(st.v[i].data[j]) + (1.0 - st.beta2) * g * g;
            st.m[i].data[j] = static_cast<S>(m);
            st.v[i].data[j] = static_cast<S>(v);
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p.value.data[j] = static_cast<S>(
                static_cast<double>(p.value.data[j]) - st.lr * mhat / (std::sqrt(vhat) + st.eps));
        }
    }
}

template <typename S>
void zero_grads(const std::vector<Param<S>*>& params) {
    for (Param<S>* p : params) p->grad.zero();
}

} // namespace pdet::nn
