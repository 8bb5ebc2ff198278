#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "deepofw/tensor.hpp"

namespace deepofw {

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid for the tape that
// created it and only until that tape is reset.
struct Var {
    int node = -1;
    Shape shape;
};

// Define-by-run reverse-mode tape over complex tensors.
//
// Gradients are real partials with respect to the real and imaginary parts
// of every tracked leaf (the loss itself must be real-valued and scalar).
// The adjoint of a node is stored in the same split re/im layout as its
// value, so for a complex node the pair (adj.re, adj.im) is
// (dL/d Re, dL/d Im).
//
// Ops that are mathematically real (relu, exp, log, sqrt, sigmoid, softplus,
// clamp, divisions, log-sum-exp) require exactly-zero imaginary input and
// raise ContractError otherwise.
//
// Tapes are single-threaded; independent tapes may run on independent
// threads. Node values are immutable once recorded.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Drops all nodes but keeps allocated capacity for the next step.
    void reset();

    // Leaves. Trainable leaves retain gradients after backward().
    Var input(CTensor value, bool trainable);
    Var constant(CTensor value) { return input(std::move(value), false); }

    // --- complex arithmetic -------------------------------------------------
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var cmul(Var a, Var b);                         // elementwise complex product
    Var cmul_colbcast(Var a, Var v);                // a:RxC, v:Rx1 -> a .* v per column
    Var scale(Var a, cplx c);                       // multiply by constant
    Var mul_scalar(Var a, Var s);                   // tensor * real scalar node
    Var matmul(Var a, Var b);
    Var hermitian(Var a);
    Var conj(Var a);
    Var transpose(Var a);
    Var reshape(Var a, int rows, int cols);         // row-major reinterpretation
    Var sub_outer(Var x, const CTensor& pts);       // x:Rx1, pts:1xK -> out_rk = x_r - pts_k

    // --- reductions ---------------------------------------------------------
    Var sum(Var a);                                 // scalar sum of all entries
    Var mean(Var a);
    Var mean_over_rows(Var a);                      // RxC -> 1xC column means
    Var trace(Var a);                               // square matrix diagonal sum

    // --- real elementwise ---------------------------------------------------
    Var abs2(Var a);                                // |z|^2, real result
    Var relu(Var a);                                // max(u, 0); subgradient at 0 is 0
    Var exp(Var a);
    Var log(Var a);
    Var sqrt(Var a);
    Var sigmoid(Var a);
    Var softplus(Var a);                            // log(1 + e^u), the 2-term log-sum-exp
    Var clamp(Var a, double lo, double hi);         // zero gradient outside [lo, hi]
    Var add_const(Var a, double c);
    Var sub_scalar(Var a, Var s);                   // a_ij - s, s real scalar node
    Var div(Var a, Var b);                          // elementwise, same shape, real
    Var div_by_col_scalars(Var a, Var s);           // a:RxC / s:1xC per column
    Var div_by_row_scalars(Var a, Var d);           // a:RxK / d:Rx1 per row
    Var rdiv_const(double c, Var v);                // c / v, real
    Var tile_vert(Var v, int times);                // v:nx1 -> (n*times)x1 repeats
    Var mul_elem_const(Var a, const CTensor& c);    // a .* c (real constant)
    // log sum_{k in mask} exp(a_rk) over each row; mask selects columns
    Var lse_cols_masked(Var a, const std::vector<std::uint8_t>& mask);

    // --- access -------------------------------------------------------------
    const CTensor& value(Var v) const { return nodes_[v.node].val; }
    double scalar_value(Var v) const;

    // Propagates from a real scalar loss; each node visited exactly once.
    void backward(Var loss);

    // Gradient of the last backward() with respect to a trainable leaf.
    const CTensor& grad(Var leaf) const;

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int visits_last_backward() const { return visits_; }

private:
    friend struct TapeOps;

    struct Node {
        CTensor val;
        CTensor adj;
        int p0 = -1;
        int p1 = -1;
        bool requires_grad = false;
        bool trainable = false;
        std::function<void(Tape&, int)> back;
    };

    std::vector<Node> nodes_;
    int visits_ = 0;

    int push(CTensor val, int p0, int p1, std::function<void(Tape&, int)> back);
    Node& node(int i) { return nodes_[i]; }
    CTensor& adj(int i) { return nodes_[i].adj; }
    bool needs_grad(int i) const { return i >= 0 && nodes_[i].requires_grad; }
    void check_same_shape(Var a, Var b, const char* op) const;
    void check_real(Var a, const char* op) const;
};

}  // namespace deepofw
