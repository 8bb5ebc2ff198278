#include "deepofw/tape.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace deepofw {

namespace {

std::string shape_str(Shape s) {
    return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

}  // namespace

void Tape::reset() {
    nodes_.clear();
    visits_ = 0;
}

int Tape::push(CTensor val, int p0, int p1, std::function<void(Tape&, int)> back) {
    Node n;
    n.val = std::move(val);
    n.p0 = p0;
    n.p1 = p1;
    n.requires_grad = needs_grad(p0) || needs_grad(p1);
    n.back = n.requires_grad ? std::move(back) : nullptr;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::input(CTensor value, bool trainable) {
    Node n;
    const Shape shape = value.shape;
    n.val = std::move(value);
    n.requires_grad = trainable;
    n.trainable = trainable;
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1, shape};
}

void Tape::check_same_shape(Var a, Var b, const char* op) const {
    if (a.shape != b.shape)
        throw ShapeError(std::string(op) + ": shapes " + shape_str(a.shape) + " and " +
                         shape_str(b.shape) + " do not match");
}

void Tape::check_real(Var a, const char* op) const {
    if (!nodes_[a.node].val.is_real())
        throw ContractError(std::string(op) + ": input must be real-valued");
}

double Tape::scalar_value(Var v) const {
    const CTensor& t = nodes_[v.node].val;
    if (!t.shape.is_scalar()) throw ContractError("scalar_value: node is not scalar");
    return t.re[0];
}

// ---------------------------------------------------------------------------
// complex arithmetic
// ---------------------------------------------------------------------------

Var Tape::add(Var a, Var b) {
    check_same_shape(a, b, "add");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vb = nodes_[b.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i] + vb.re[i];
        out.im[i] = va.im[i] + vb.im[i];
    }
    int id = push(std::move(out), a.node, b.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        for (int p : {n.p0, n.p1}) {
            if (!t.needs_grad(p)) continue;
            CTensor& pa = t.adj(p);
            for (int i = 0; i < g.size(); ++i) {
                pa.re[i] += g.re[i];
                pa.im[i] += g.im[i];
            }
        }
    });
    return Var{id, a.shape};
}

Var Tape::sub(Var a, Var b) {
    check_same_shape(a, b, "sub");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vb = nodes_[b.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i] - vb.re[i];
        out.im[i] = va.im[i] - vb.im[i];
    }
    int id = push(std::move(out), a.node, b.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int i = 0; i < g.size(); ++i) {
                pa.re[i] += g.re[i];
                pa.im[i] += g.im[i];
            }
        }
        if (t.needs_grad(n.p1)) {
            CTensor& pb = t.adj(n.p1);
            for (int i = 0; i < g.size(); ++i) {
                pb.re[i] -= g.re[i];
                pb.im[i] -= g.im[i];
            }
        }
    });
    return Var{id, a.shape};
}

// Adjoint rule for a complex product under real-partial gradients:
// grad_a = conj(b) .* g, grad_b = conj(a) .* g.
Var Tape::cmul(Var a, Var b) {
    check_same_shape(a, b, "cmul");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vb = nodes_[b.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i] * vb.re[i] - va.im[i] * vb.im[i];
        out.im[i] = va.re[i] * vb.im[i] + va.im[i] * vb.re[i];
    }
    int id = push(std::move(out), a.node, b.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vb = t.node(n.p1).val;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int i = 0; i < g.size(); ++i) {
                pa.re[i] += vb.re[i] * g.re[i] + vb.im[i] * g.im[i];
                pa.im[i] += vb.re[i] * g.im[i] - vb.im[i] * g.re[i];
            }
        }
        if (t.needs_grad(n.p1)) {
            CTensor& pb = t.adj(n.p1);
            for (int i = 0; i < g.size(); ++i) {
                pb.re[i] += va.re[i] * g.re[i] + va.im[i] * g.im[i];
                pb.im[i] += va.re[i] * g.im[i] - va.im[i] * g.re[i];
            }
        }
    });
    return Var{id, a.shape};
}

Var Tape::cmul_colbcast(Var a, Var v) {
    if (v.shape.cols != 1 || v.shape.rows != a.shape.rows)
        throw ShapeError("cmul_colbcast: v must be Rx1 matching a's rows");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vv = nodes_[v.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    CTensor out(a.shape);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            const int i = r * C + c;
            out.re[i] = va.re[i] * vv.re[r] - va.im[i] * vv.im[r];
            out.im[i] = va.re[i] * vv.im[r] + va.im[i] * vv.re[r];
        }
    int id = push(std::move(out), a.node, v.node, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vv = t.node(n.p1).val;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < C; ++c) {
                    const int i = r * C + c;
                    pa.re[i] += vv.re[r] * g.re[i] + vv.im[r] * g.im[i];
                    pa.im[i] += vv.re[r] * g.im[i] - vv.im[r] * g.re[i];
                }
        }
        if (t.needs_grad(n.p1)) {
            CTensor& pv = t.adj(n.p1);
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < C; ++c) {
                    const int i = r * C + c;
                    pv.re[r] += va.re[i] * g.re[i] + va.im[i] * g.im[i];
                    pv.im[r] += va.re[i] * g.im[i] - va.im[i] * g.re[i];
                }
        }
    });
    return Var{id, a.shape};
}

Var Tape::scale(Var a, cplx c) {
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i] * c.real() - va.im[i] * c.imag();
        out.im[i] = va.re[i] * c.imag() + va.im[i] * c.real();
    }
    int id = push(std::move(out), a.node, -1, [c](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            pa.re[i] += c.real() * g.re[i] + c.imag() * g.im[i];
            pa.im[i] += c.real() * g.im[i] - c.imag() * g.re[i];
        }
    });
    return Var{id, a.shape};
}

Var Tape::mul_scalar(Var a, Var s) {
    if (!s.shape.is_scalar()) throw ShapeError("mul_scalar: s must be scalar");
    check_real(s, "mul_scalar");
    const CTensor& va = nodes_[a.node].val;
    const double sv = nodes_[s.node].val.re[0];
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i] * sv;
        out.im[i] = va.im[i] * sv;
    }
    int id = push(std::move(out), a.node, s.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const double sv = t.node(n.p1).val.re[0];
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int i = 0; i < g.size(); ++i) {
                pa.re[i] += sv * g.re[i];
                pa.im[i] += sv * g.im[i];
            }
        }
        if (t.needs_grad(n.p1)) {
            double acc = 0.0;
            for (int i = 0; i < g.size(); ++i)
                acc += va.re[i] * g.re[i] + va.im[i] * g.im[i];
            t.adj(n.p1).re[0] += acc;
        }
    });
    return Var{id, a.shape};
}

Var Tape::matmul(Var a, Var b) {
    if (a.shape.cols != b.shape.rows)
        throw ShapeError("matmul: inner dimensions " + shape_str(a.shape) + " * " +
                         shape_str(b.shape) + " do not agree");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vb = nodes_[b.node].val;
    const int R = a.shape.rows, K = a.shape.cols, C = b.shape.cols;
    CTensor out(Shape{R, C});
    for (int r = 0; r < R; ++r) {
        for (int k = 0; k < K; ++k) {
            const double ar = va.re[r * K + k], ai = va.im[r * K + k];
            for (int c = 0; c < C; ++c) {
                const int i = r * C + c, j = k * C + c;
                out.re[i] += ar * vb.re[j] - ai * vb.im[j];
                out.im[i] += ar * vb.im[j] + ai * vb.re[j];
            }
        }
    }
    int id = push(std::move(out), a.node, b.node, [R, K, C](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vb = t.node(n.p1).val;
        // grad_A = G * B^H
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < C; ++c) {
                    const double gr = g.re[r * C + c], gi = g.im[r * C + c];
                    for (int k = 0; k < K; ++k) {
                        const double br = vb.re[k * C + c], bi = vb.im[k * C + c];
                        // g * conj(b)
                        pa.re[r * K + k] += gr * br + gi * bi;
                        pa.im[r * K + k] += gi * br - gr * bi;
                    }
                }
        }
        // grad_B = A^H * G
        if (t.needs_grad(n.p1)) {
            CTensor& pb = t.adj(n.p1);
            for (int k = 0; k < K; ++k)
                for (int r = 0; r < R; ++r) {
                    const double ar = va.re[r * K + k], ai = va.im[r * K + k];
                    for (int c = 0; c < C; ++c) {
                        const double gr = g.re[r * C + c], gi = g.im[r * C + c];
                        // conj(a) * g
                        pb.re[k * C + c] += ar * gr + ai * gi;
                        pb.im[k * C + c] += ar * gi - ai * gr;
                    }
                }
        }
    });
    return Var{id, Shape{R, C}};
}

Var Tape::hermitian(Var a) {
    const CTensor& va = nodes_[a.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    CTensor out(Shape{C, R});
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            out.re[c * R + r] = va.re[r * C + c];
            out.im[c * R + r] = -va.im[r * C + c];
        }
    int id = push(std::move(out), a.node, -1, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                pa.re[r * C + c] += g.re[c * R + r];
                pa.im[r * C + c] -= g.im[c * R + r];
            }
    });
    return Var{id, Shape{C, R}};
}

Var Tape::conj(Var a) {
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        out.re[i] = va.re[i];
        out.im[i] = -va.im[i];
    }
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            pa.re[i] += g.re[i];
            pa.im[i] -= g.im[i];
        }
    });
    return Var{id, a.shape};
}

Var Tape::transpose(Var a) {
    const CTensor& va = nodes_[a.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    CTensor out(Shape{C, R});
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            out.re[c * R + r] = va.re[r * C + c];
            out.im[c * R + r] = va.im[r * C + c];
        }
    int id = push(std::move(out), a.node, -1, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                pa.re[r * C + c] += g.re[c * R + r];
                pa.im[r * C + c] += g.im[c * R + r];
            }
    });
    return Var{id, Shape{C, R}};
}

Var Tape::reshape(Var a, int rows, int cols) {
    if (rows * cols != a.shape.size())
        throw ShapeError("reshape: element count mismatch");
    CTensor out = nodes_[a.node].val;
    out.shape = Shape{rows, cols};
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            pa.re[i] += g.re[i];
            pa.im[i] += g.im[i];
        }
    });
    return Var{id, Shape{rows, cols}};
}

Var Tape::sub_outer(Var x, const CTensor& pts) {
    if (x.shape.cols != 1) throw ShapeError("sub_outer: x must be a column vector");
    if (pts.shape.rows != 1) throw ShapeError("sub_outer: pts must be a row vector");
    const CTensor& vx = nodes_[x.node].val;
    const int R = x.shape.rows, K = pts.shape.cols;
    CTensor out(Shape{R, K});
    for (int r = 0; r < R; ++r)
        for (int k = 0; k < K; ++k) {
            out.re[r * K + k] = vx.re[r] - pts.re[k];
            out.im[r * K + k] = vx.im[r] - pts.im[k];
        }
    int id = push(std::move(out), x.node, -1, [R, K](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& px = t.adj(n.p0);
        for (int r = 0; r < R; ++r) {
            double ar = 0.0, ai = 0.0;
            for (int k = 0; k < K; ++k) {
                ar += g.re[r * K + k];
                ai += g.im[r * K + k];
            }
            px.re[r] += ar;
            px.im[r] += ai;
        }
    });
    return Var{id, Shape{R, K}};
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

Var Tape::sum(Var a) {
    const CTensor& va = nodes_[a.node].val;
    double sr = 0.0, si = 0.0;
    for (int i = 0; i < va.size(); ++i) {
        sr += va.re[i];
        si += va.im[i];
    }
    CTensor out = CTensor::scalar(cplx{sr, si});
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < pa.size(); ++i) {
            pa.re[i] += g.re[0];
            pa.im[i] += g.im[0];
        }
    });
    return Var{id, Shape{1, 1}};
}

Var Tape::mean(Var a) {
    Var s = sum(a);
    return scale(s, cplx{1.0 / a.shape.size(), 0.0});
}

Var Tape::mean_over_rows(Var a) {
    const CTensor& va = nodes_[a.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    CTensor out(Shape{1, C});
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            out.re[c] += va.re[r * C + c] / R;
            out.im[c] += va.im[r * C + c] / R;
        }
    int id = push(std::move(out), a.node, -1, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int r = 0; r < R; ++r)
            for (int c = 0; c < C; ++c) {
                pa.re[r * C + c] += g.re[c] / R;
                pa.im[r * C + c] += g.im[c] / R;
            }
    });
    return Var{id, Shape{1, C}};
}

Var Tape::trace(Var a) {
    if (a.shape.rows != a.shape.cols) throw ShapeError("trace: matrix must be square");
    const CTensor& va = nodes_[a.node].val;
    const int N = a.shape.rows;
    double sr = 0.0, si = 0.0;
    for (int i = 0; i < N; ++i) {
        sr += va.re[i * N + i];
        si += va.im[i * N + i];
    }
    CTensor out = CTensor::scalar(cplx{sr, si});
    int id = push(std::move(out), a.node, -1, [N](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < N; ++i) {
            pa.re[i * N + i] += g.re[0];
            pa.im[i * N + i] += g.im[0];
        }
    });
    return Var{id, Shape{1, 1}};
}

// ---------------------------------------------------------------------------
// real elementwise
// ---------------------------------------------------------------------------

Var Tape::abs2(Var a) {
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i)
        out.re[i] = va.re[i] * va.re[i] + va.im[i] * va.im[i];
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            pa.re[i] += 2.0 * g.re[i] * va.re[i];
            pa.im[i] += 2.0 * g.re[i] * va.im[i];
        }
    });
    return Var{id, a.shape};
}

Var Tape::relu(Var a) {
    check_real(a, "relu");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) out.re[i] = va.re[i] > 0.0 ? va.re[i] : 0.0;
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i)
            if (va.re[i] > 0.0) pa.re[i] += g.re[i];
    });
    return Var{id, a.shape};
}

Var Tape::exp(Var a) {
    check_real(a, "exp");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) out.re[i] = std::exp(va.re[i]);
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& out = n.val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i] * out.re[i];
    });
    return Var{id, a.shape};
}

Var Tape::log(Var a) {
    check_real(a, "log");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        if (va.re[i] <= 0.0) throw DomainError("log: non-positive input");
        out.re[i] = std::log(va.re[i]);
    }
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i] / va.re[i];
    });
    return Var{id, a.shape};
}

Var Tape::sqrt(Var a) {
    check_real(a, "sqrt");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        if (va.re[i] < 0.0) throw DomainError("sqrt: negative input");
        out.re[i] = std::sqrt(va.re[i]);
    }
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& out = n.val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i] / (2.0 * out.re[i]);
    });
    return Var{id, a.shape};
}

Var Tape::sigmoid(Var a) {
    check_real(a, "sigmoid");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        const double u = va.re[i];
        out.re[i] = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u))
                             : std::exp(u) / (1.0 + std::exp(u));
    }
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& out = n.val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i)
            pa.re[i] += g.re[i] * out.re[i] * (1.0 - out.re[i]);
    });
    return Var{id, a.shape};
}

Var Tape::softplus(Var a) {
    check_real(a, "softplus");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        const double u = va.re[i];
        out.re[i] = u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
    }
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            const double u = va.re[i];
            const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u))
                                      : std::exp(u) / (1.0 + std::exp(u));
            pa.re[i] += g.re[i] * s;
        }
    });
    return Var{id, a.shape};
}

Var Tape::clamp(Var a, double lo, double hi) {
    check_real(a, "clamp");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i)
        out.re[i] = va.re[i] < lo ? lo : (va.re[i] > hi ? hi : va.re[i]);
    int id = push(std::move(out), a.node, -1, [lo, hi](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i)
            if (va.re[i] > lo && va.re[i] < hi) pa.re[i] += g.re[i];
    });
    return Var{id, a.shape};
}

Var Tape::add_const(Var a, double c) {
    const CTensor& va = nodes_[a.node].val;
    CTensor out = va;
    for (int i = 0; i < out.size(); ++i) out.re[i] += c;
    int id = push(std::move(out), a.node, -1, [](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) {
            pa.re[i] += g.re[i];
            pa.im[i] += g.im[i];
        }
    });
    return Var{id, a.shape};
}

Var Tape::sub_scalar(Var a, Var s) {
    if (!s.shape.is_scalar()) throw ShapeError("sub_scalar: s must be scalar");
    check_real(a, "sub_scalar");
    check_real(s, "sub_scalar");
    const CTensor& va = nodes_[a.node].val;
    const double sv = nodes_[s.node].val.re[0];
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) out.re[i] = va.re[i] - sv;
    int id = push(std::move(out), a.node, s.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i];
        }
        if (t.needs_grad(n.p1)) {
            double acc = 0.0;
            for (int i = 0; i < g.size(); ++i) acc += g.re[i];
            t.adj(n.p1).re[0] -= acc;
        }
    });
    return Var{id, a.shape};
}

Var Tape::div(Var a, Var b) {
    check_same_shape(a, b, "div");
    check_real(a, "div");
    check_real(b, "div");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vb = nodes_[b.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) {
        if (vb.re[i] == 0.0) throw DomainError("div: zero denominator");
        out.re[i] = va.re[i] / vb.re[i];
    }
    int id = push(std::move(out), a.node, b.node, [](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vb = t.node(n.p1).val;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i] / vb.re[i];
        }
        if (t.needs_grad(n.p1)) {
            CTensor& pb = t.adj(n.p1);
            for (int i = 0; i < g.size(); ++i)
                pb.re[i] -= g.re[i] * va.re[i] / (vb.re[i] * vb.re[i]);
        }
    });
    return Var{id, a.shape};
}

Var Tape::div_by_col_scalars(Var a, Var s) {
    if (s.shape.rows != 1 || s.shape.cols != a.shape.cols)
        throw ShapeError("div_by_col_scalars: s must be 1xC matching a's columns");
    check_real(a, "div_by_col_scalars");
    check_real(s, "div_by_col_scalars");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vs = nodes_[s.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    CTensor out(a.shape);
    for (int c = 0; c < C; ++c)
        if (vs.re[c] == 0.0) throw DomainError("div_by_col_scalars: zero denominator");
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) out.re[r * C + c] = va.re[r * C + c] / vs.re[c];
    int id = push(std::move(out), a.node, s.node, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vs = t.node(n.p1).val;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < C; ++c) pa.re[r * C + c] += g.re[r * C + c] / vs.re[c];
        }
        if (t.needs_grad(n.p1)) {
            CTensor& ps = t.adj(n.p1);
            for (int c = 0; c < C; ++c) {
                double acc = 0.0;
                for (int r = 0; r < R; ++r) acc += g.re[r * C + c] * va.re[r * C + c];
                ps.re[c] -= acc / (vs.re[c] * vs.re[c]);
            }
        }
    });
    return Var{id, a.shape};
}

Var Tape::div_by_row_scalars(Var a, Var d) {
    if (d.shape.cols != 1 || d.shape.rows != a.shape.rows)
        throw ShapeError("div_by_row_scalars: d must be Rx1 matching a's rows");
    check_real(a, "div_by_row_scalars");
    check_real(d, "div_by_row_scalars");
    const CTensor& va = nodes_[a.node].val;
    const CTensor& vd = nodes_[d.node].val;
    const int R = a.shape.rows, C = a.shape.cols;
    for (int r = 0; r < R; ++r)
        if (vd.re[r] == 0.0) throw DomainError("div_by_row_scalars: zero denominator");
    CTensor out(a.shape);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) out.re[r * C + c] = va.re[r * C + c] / vd.re[r];
    int id = push(std::move(out), a.node, d.node, [R, C](Tape& t, int self) {
        const Node& n = t.node(self);
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& vd = t.node(n.p1).val;
        if (t.needs_grad(n.p0)) {
            CTensor& pa = t.adj(n.p0);
            for (int r = 0; r < R; ++r)
                for (int c = 0; c < C; ++c) pa.re[r * C + c] += g.re[r * C + c] / vd.re[r];
        }
        if (t.needs_grad(n.p1)) {
            CTensor& pd = t.adj(n.p1);
            for (int r = 0; r < R; ++r) {
                double acc = 0.0;
                for (int c = 0; c < C; ++c) acc += g.re[r * C + c] * va.re[r * C + c];
                pd.re[r] -= acc / (vd.re[r] * vd.re[r]);
            }
        }
    });
    return Var{id, a.shape};
}

Var Tape::rdiv_const(double c, Var v) {
    if (!v.shape.is_scalar()) throw ShapeError("rdiv_const: v must be scalar");
    check_real(v, "rdiv_const");
    const double vv = nodes_[v.node].val.re[0];
    if (vv == 0.0) throw DomainError("rdiv_const: zero denominator");
    CTensor out = CTensor::scalar(c / vv);
    int id = push(std::move(out), v.node, -1, [c](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const double vv = t.node(n.p0).val.re[0];
        t.adj(n.p0).re[0] -= n.adj.re[0] * c / (vv * vv);
    });
    return Var{id, Shape{1, 1}};
}

Var Tape::tile_vert(Var v, int times) {
    if (v.shape.cols != 1) throw ShapeError("tile_vert: v must be a column vector");
    const CTensor& vv = nodes_[v.node].val;
    const int n = v.shape.rows;
    CTensor out(Shape{n * times, 1});
    for (int t = 0; t < times; ++t)
        for (int i = 0; i < n; ++i) {
            out.re[t * n + i] = vv.re[i];
            out.im[t * n + i] = vv.im[i];
        }
    int id = push(std::move(out), v.node, -1, [n, times](Tape& t, int self) {
        const Node& nd = t.node(self);
        if (!t.needs_grad(nd.p0)) return;
        const CTensor& g = nd.adj;
        CTensor& pv = t.adj(nd.p0);
        for (int k = 0; k < times; ++k)
            for (int i = 0; i < n; ++i) {
                pv.re[i] += g.re[k * n + i];
                pv.im[i] += g.im[k * n + i];
            }
    });
    return Var{id, Shape{n * times, 1}};
}

Var Tape::mul_elem_const(Var a, const CTensor& c) {
    if (a.shape != c.shape) throw ShapeError("mul_elem_const: shape mismatch");
    check_real(a, "mul_elem_const");
    if (!c.is_real()) throw ContractError("mul_elem_const: constant must be real");
    const CTensor& va = nodes_[a.node].val;
    CTensor out(a.shape);
    for (int i = 0; i < out.size(); ++i) out.re[i] = va.re[i] * c.re[i];
    // captured by value: the constant outlives the lambda
    std::vector<double> cre = c.re;
    int id = push(std::move(out), a.node, -1, [cre](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        CTensor& pa = t.adj(n.p0);
        for (int i = 0; i < g.size(); ++i) pa.re[i] += g.re[i] * cre[i];
    });
    return Var{id, a.shape};
}

Var Tape::lse_cols_masked(Var a, const std::vector<std::uint8_t>& mask) {
    check_real(a, "lse_cols_masked");
    if (static_cast<int>(mask.size()) != a.shape.cols)
        throw ShapeError("lse_cols_masked: mask length must equal column count");
    bool any = false;
    for (auto m : mask) any = any || (m != 0);
    if (!any) throw ContractError("lse_cols_masked: mask selects no columns");
    const CTensor& va = nodes_[a.node].val;
    const int R = a.shape.rows, K = a.shape.cols;
    CTensor out(Shape{R, 1});
    for (int r = 0; r < R; ++r) {
        double mx = -1e300;
        for (int k = 0; k < K; ++k)
            if (mask[k] && va.re[r * K + k] > mx) mx = va.re[r * K + k];
        double acc = 0.0;
        for (int k = 0; k < K; ++k)
            if (mask[k]) acc += std::exp(va.re[r * K + k] - mx);
        out.re[r] = mx + std::log(acc);
    }
    std::vector<std::uint8_t> m = mask;
    int id = push(std::move(out), a.node, -1, [R, K, m](Tape& t, int self) {
        const Node& n = t.node(self);
        if (!t.needs_grad(n.p0)) return;
        const CTensor& g = n.adj;
        const CTensor& va = t.node(n.p0).val;
        const CTensor& out = n.val;
        CTensor& pa = t.adj(n.p0);
        for (int r = 0; r < R; ++r) {
            const double gr = g.re[r];
            if (gr == 0.0) continue;
            for (int k = 0; k < K; ++k)
                if (m[k]) pa.re[r * K + k] += gr * std::exp(va.re[r * K + k] - out.re[r]);
        }
    });
    return Var{id, Shape{R, 1}};
}

// ---------------------------------------------------------------------------
// backward
// ---------------------------------------------------------------------------

void Tape::backward(Var loss) {
    const Node& ln = nodes_[loss.node];
    if (!ln.val.shape.is_scalar())
        throw ContractError("backward: loss must be scalar");
    if (!ln.val.is_real())
        throw ContractError("backward: loss must be real-valued");
    if (!std::isfinite(ln.val.re[0]))
        throw NumericError("backward: loss is not finite");

    for (Node& n : nodes_) {
        if (n.requires_grad)
            n.adj = CTensor(n.val.shape);
        else
            n.adj = CTensor();
    }
    nodes_[loss.node].adj.re[0] = 1.0;

    visits_ = 0;
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        ++visits_;
        Node& n = nodes_[i];
        if (n.requires_grad && n.back) n.back(*this, i);
    }
}

const CTensor& Tape::grad(Var leaf) const {
    const Node& n = nodes_[leaf.node];
    if (!n.trainable)
        throw ContractError("grad: node is not a trainable leaf");
    if (n.adj.size() == 0)
        throw ContractError("grad: backward has not been run");
    return n.adj;
}

}  // namespace deepofw
