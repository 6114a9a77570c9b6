#pragma once

#include "hrs/tensor.hpp"

namespace hrs {

//! Monetary coefficients of the scheduling-aware objective plus the
//! smoothing temperature used by the training surrogate.
struct SalParams {
    double revenue = 0.0065;            // R, money per unit served
    double overprovision_cost = 0.0035; // C, money per unit overprovisioned
    double sla_penalty = 4.0;           // P, money per underpredicted point
    double tau = 1.0;                   // surrogate temperature, series units

    void validate() const;
    double uo_ratio() const;  // (R + P) / C
};

//! Exact piecewise per-point loss: R*(y - yhat) + P when underpredicting,
//! zero on an exact match, C*(yhat - y) when overpredicting.
double sal_exact(double actual, double predicted, const SalParams& sp);

//! Smooth training stand-in: mean of R*max(y-yhat,0) + C*max(yhat-y,0)
//! + P*sigmoid((y-yhat)/tau). Pointwise limit for tau->0 is the exact loss
//! plus P/2 on ties.
Tensor sal_surrogate(const Tensor& actual, const Tensor& predicted, const SalParams& sp);

//! Coefficients realizing a given under-to-over cost ratio (R+P)/C with unit
//! revenue and unit overprovision cost.
SalParams sal_params_for_ratio(double ratio, double tau);

}  // namespace hrs
