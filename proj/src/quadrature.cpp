#include "pia/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "pia/error.hpp"

namespace pia {

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel kronrod(const ComplexFn& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const cplx fc = f(c);
    cplx rk = fc * wgk[7], rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const cplx s = f(c - h * xgk[j]) + f(c + h * xgk[j]);
        rk += wgk[j] * s;
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

QuadResult integrate_gk(const ComplexFn& f, double a, double b, double rel_tol, double abs_tol,
                        int max_intervals) {
    QuadResult r;
    if (a == b) return r;
    std::priority_queue<Panel> heap;
    Panel first = kronrod(f, a, b);
    cplx total = first.value;
    double err = first.error;
    heap.push(first);
    r.evaluations = 15;
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= max_intervals)
            throw Error(ErrorKind::QuadratureFailure,
                        "on [" + std::to_string(a) + ", " + std::to_string(b) + "], error estimate " +
                            std::to_string(err));
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (m <= std::min(p.a, p.b) || m >= std::max(p.a, p.b))
            throw Error(ErrorKind::QuadratureFailure, "panel collapsed near x=" + std::to_string(m));
        Panel l = kronrod(f, p.a, m), u = kronrod(f, m, p.b);
        r.evaluations += 30;
        total += l.value + u.value - p.value;
        err += l.error + u.error - p.error;
        heap.push(l);
        heap.push(u);
    }
    // recompute the sums to shed accumulated rounding from the running updates
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.error = err;
    return r;
}

std::vector<cplx> cumulative_integral(const ComplexFn& f, std::span<const double> grid, double anchor,
                                      double rel_tol, double abs_tol) {
    const size_t n = grid.size();
    std::vector<cplx> out(n);
    const size_t split = std::lower_bound(grid.begin(), grid.end(), anchor) - grid.begin();
    cplx acc = 0.0;
    double prev = anchor;
    for (size_t j = split; j < n; ++j) {
        acc += integrate_gk(f, prev, grid[j], rel_tol, abs_tol).value;
        out[j] = acc;
        prev = grid[j];
    }
    acc = 0.0;
    prev = anchor;
    for (size_t j = split; j-- > 0;) {
        acc += integrate_gk(f, prev, grid[j], rel_tol, abs_tol).value;
        out[j] = acc;
        prev = grid[j];
    }
    return out;
}

}  // namespace pia
