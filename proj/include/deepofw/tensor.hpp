#pragma once

#include <complex>
#include <vector>

#include "deepofw/errors.hpp"

namespace deepofw {

using cplx = std::complex<double>;

struct Shape {
    int rows = 1;
    int cols = 1;

    int size() const { return rows * cols; }
    bool operator==(const Shape& o) const { return rows == o.rows && cols == o.cols; }
    bool operator!=(const Shape& o) const { return !(*this == o); }
    bool is_scalar() const { return rows == 1 && cols == 1; }
};

// Dense complex matrix/vector/scalar stored as split real and imaginary
// arrays (row-major). Real-valued quantities keep im identically zero.
struct CTensor {
    Shape shape;
    std::vector<double> re;
    std::vector<double> im;

    CTensor() = default;
    explicit CTensor(Shape s) : shape(s), re(s.size(), 0.0), im(s.size(), 0.0) {}

    static CTensor zeros(int rows, int cols = 1) { return CTensor(Shape{rows, cols}); }
    static CTensor scalar(double v) {
        CTensor t(Shape{1, 1});
        t.re[0] = v;
        return t;
    }
    static CTensor scalar(cplx v) {
        CTensor t(Shape{1, 1});
        t.re[0] = v.real();
        t.im[0] = v.imag();
        return t;
    }
    static CTensor from_complex(const std::vector<cplx>& v, int rows, int cols);
    static CTensor from_real(const std::vector<double>& v, int rows, int cols);

    int size() const { return shape.size(); }

    cplx at(int r, int c) const {
        const int i = r * shape.cols + c;
        return {re[i], im[i]};
    }
    void set(int r, int c, cplx v) {
        const int i = r * shape.cols + c;
        re[i] = v.real();
        im[i] = v.imag();
    }

    std::vector<cplx> to_complex() const;

    bool all_finite() const;
    bool is_real(double tol = 0.0) const;
};

}  // namespace deepofw
