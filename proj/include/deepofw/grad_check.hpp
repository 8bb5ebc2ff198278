#pragma once

#include <functional>
#include <vector>

#include "deepofw/tape.hpp"

namespace deepofw {

// Loss evaluated at a full set of parameter values. Must be deterministic:
// the oracle evaluates the base point twice and refuses to certify anything
// if the two values differ.
using LossFn = std::function<double(const std::vector<CTensor>&)>;

// Central finite differences against recorded gradients.
//
// Every real and imaginary component of every parameter is perturbed by
// +/-step; the central difference is compared to the matching component of
// analytic_grads. Differences below the 1e-9 absolute floor count as zero;
// otherwise the error is |fd - grad| / max(|fd|, |grad|). Returns the worst
// error over all components.
double finite_diff(const LossFn& loss_fn,
                   const std::vector<CTensor>& params,
                   const std::vector<CTensor>& analytic_grads,
                   double step);

// Convenience wrapper: builds the tape once via `build` to obtain analytic
// gradients, then runs finite_diff on the same chain.
//
// `build` receives a fresh tape plus the trainable leaves (in param order)
// and returns the scalar loss node.
double gradient_check(const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                      const std::vector<CTensor>& params,
                      double step);

}  // namespace deepofw
