#include "deepofw/grad_check.hpp"

#include <cmath>
#include <cstddef>

#include "deepofw/errors.hpp"

namespace deepofw {

namespace {

constexpr double kAbsFloor = 1e-9;

double component_error(double fd, double an) {
    const double diff = std::abs(fd - an);
    if (diff <= kAbsFloor) return 0.0;
    return diff / std::max(std::abs(fd), std::abs(an));
}

}  // namespace

double finite_diff(const LossFn& loss_fn,
                   const std::vector<CTensor>& params,
                   const std::vector<CTensor>& analytic_grads,
                   double step) {
    if (step <= 0.0) throw DomainError("finite_diff: step must be positive");
    if (params.size() != analytic_grads.size())
        throw ShapeError("finite_diff: params/grads count mismatch");
    for (std::size_t p = 0; p < params.size(); ++p)
        if (params[p].shape != analytic_grads[p].shape)
            throw ShapeError("finite_diff: gradient shape does not match its parameter");

    const double base0 = loss_fn(params);
    const double base1 = loss_fn(params);
    if (base0 != base1)
        throw OracleInvalidError("finite_diff: loss_fn is not deterministic under fixed inputs");

    std::vector<CTensor> work = params;
    double worst = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (int comp = 0; comp < 2; ++comp) {
            std::vector<double>& arr = comp == 0 ? work[p].re : work[p].im;
            const std::vector<double>& grad =
                comp == 0 ? analytic_grads[p].re : analytic_grads[p].im;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const double saved = arr[i];
                arr[i] = saved + step;
                const double fp = loss_fn(work);
                arr[i] = saved - step;
                const double fm = loss_fn(work);
                arr[i] = saved;
                const double fd = (fp - fm) / (2.0 * step);
                worst = std::max(worst, component_error(fd, grad[i]));
            }
        }
    }
    return worst;
}

double gradient_check(const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                      const std::vector<CTensor>& params,
                      double step) {
    Tape tape;
    std::vector<Var> leaves;
    leaves.reserve(params.size());
    for (const CTensor& p : params) leaves.push_back(tape.input(p, true));
    Var loss = build(tape, leaves);
    tape.backward(loss);

    std::vector<CTensor> grads;
    grads.reserve(params.size());
    for (const Var& v : leaves) grads.push_back(tape.grad(v));

    LossFn fn = [&build](const std::vector<CTensor>& ps) {
        Tape t;
        std::vector<Var> ls;
        ls.reserve(ps.size());
        for (const CTensor& p : ps) ls.push_back(t.input(p, false));
        return t.scalar_value(build(t, ls));
    };
    return finite_diff(fn, params, grads, step);
}

}  // namespace deepofw
