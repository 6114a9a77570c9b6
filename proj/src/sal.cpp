#include "hrs/sal.hpp"

#include <cmath>
#include <stdexcept>

namespace hrs {

void SalParams::validate() const {
    if (!(revenue > 0.0)) throw std::invalid_argument("sal: revenue R must be positive");
    if (!(overprovision_cost > 0.0)) {
        throw std::invalid_argument("sal: overprovision cost C must be positive");
    }
    if (sla_penalty < 0.0) throw std::invalid_argument("sal: penalty P must be non-negative");
    if (overprovision_cost > revenue) {
        throw std::invalid_argument("sal: expected cost ordering C <= R");
    }
}

double SalParams::uo_ratio() const {
    if (!(overprovision_cost > 0.0)) {
        throw std::invalid_argument("sal: U/O ratio needs C > 0");
    }
    return (revenue + sla_penalty) / overprovision_cost;
}

double sal_exact(double actual, double predicted, const SalParams& sp) {
    if (!std::isfinite(actual) || !std::isfinite(predicted)) {
        throw std::invalid_argument("sal: non-finite input");
    }
    if (predicted < actual) return sp.revenue * (actual - predicted) + sp.sla_penalty;
    if (predicted > actual) return sp.overprovision_cost * (predicted - actual);
    return 0.0;
}

Tensor sal_surrogate(const Tensor& actual, const Tensor& predicted, const SalParams& sp) {
    if (!(sp.tau > 0.0)) throw std::invalid_argument("sal: surrogate temperature must be positive");
    if (actual.shape() != predicted.shape()) {
        throw std::invalid_argument("sal: actual shape " + shape_str(actual.shape()) +
                                    " != predicted shape " + shape_str(predicted.shape()));
    }
    const Tensor shortfall = sub(actual, predicted);           // y - yhat
    const Tensor under = scale(relu(shortfall), sp.revenue);
    const Tensor over = scale(relu(scale(shortfall, -1.0)), sp.overprovision_cost);
    const Tensor gate = scale(sigmoid(scale(shortfall, 1.0 / sp.tau)), sp.sla_penalty);
    return mean(add(add(under, over), gate));
}

SalParams sal_params_for_ratio(double ratio, double tau) {
    if (!(ratio >= 1.0)) throw std::invalid_argument("sal: U/O ratio must be at least 1");
    SalParams sp;
    sp.revenue = 1.0;
    sp.overprovision_cost = 1.0;
    sp.sla_penalty = ratio - 1.0;
    sp.tau = tau;
    return sp;
}

}  // namespace hrs
