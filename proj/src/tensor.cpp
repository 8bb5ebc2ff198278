#include "deepofw/tensor.hpp"

#include <cmath>
#include <cstddef>

namespace deepofw {

CTensor CTensor::from_complex(const std::vector<cplx>& v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols)
        throw ShapeError("from_complex: element count does not match shape");
    CTensor t(Shape{rows, cols});
    for (std::size_t i = 0; i < v.size(); ++i) {
        t.re[i] = v[i].real();
        t.im[i] = v[i].imag();
    }
    return t;
}

CTensor CTensor::from_real(const std::vector<double>& v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols)
        throw ShapeError("from_real: element count does not match shape");
    CTensor t(Shape{rows, cols});
    t.re = v;
    return t;
}

std::vector<cplx> CTensor::to_complex() const {
    std::vector<cplx> out(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
    return out;
}

bool CTensor::all_finite() const {
    for (double v : re)
        if (!std::isfinite(v)) return false;
    for (double v : im)
        if (!std::isfinite(v)) return false;
    return true;
}

bool CTensor::is_real(double tol) const {
    for (double v : im)
        if (std::abs(v) > tol) return false;
    return true;
}

}  // namespace deepofw
