#include "pia/jet_linalg.hpp"

#include <algorithm>
#include <limits>

namespace pia {

int min_order(const JetVector& v) {
    int k = std::numeric_limits<int>::max();
    for (const auto& e : v) k = std::min(k, e.order());
    return k;
}

JetVector fit(const JetVector& v, int order) {
    JetVector r;
    r.reserve(v.size());
    for (const auto& e : v) r.push_back(fit(e, order));
    return r;
}

JetVector vadd(const JetVector& a, const JetVector& b) {
    JetVector r;
    r.reserve(a.size());
    for (size_t j = 0; j < a.size(); ++j) r.push_back(add(a[j], b[j]));
    return r;
}

JetVector vsub(const JetVector& a, const JetVector& b) {
    JetVector r;
    r.reserve(a.size());
    for (size_t j = 0; j < a.size(); ++j) r.push_back(sub(a[j], b[j]));
    return r;
}

JetVector vscale(const TaylorJet& s, const JetVector& v) {
    JetVector r;
    r.reserve(v.size());
    for (const auto& e : v) r.push_back(mul(s, e));
    return r;
}

JetVector vscale(cplx s, const JetVector& v) {
    JetVector r = v;
    for (auto& e : r) e *= s;
    return r;
}

JetVector vconj(const JetVector& v) {
    JetVector r;
    r.reserve(v.size());
    for (const auto& e : v) r.push_back(e.conj());
    return r;
}

JetVector vdiff(const JetVector& v) {
    JetVector r;
    r.reserve(v.size());
    for (const auto& e : v) r.push_back(e.diff());
    return r;
}

JetVector vzero(double center, int order, int n) { return JetVector(n, TaylorJet(center, order)); }

TaylorJet inner(const JetVector& a, const JetVector& b) {
    const int k = std::min(min_order(a), min_order(b));
    TaylorJet s(a.front().center(), k);
    for (size_t j = 0; j < a.size(); ++j) s += fit(a[j], k).conj() * fit(b[j], k);
    return s;
}

TaylorJet dot(const JetVector& a, const JetVector& b) {
    const int k = std::min(min_order(a), min_order(b));
    TaylorJet s(a.front().center(), k);
    for (size_t j = 0; j < a.size(); ++j) s += fit(a[j], k) * fit(b[j], k);
    return s;
}

JetVector matvec(const JetMatrix& m, const JetVector& v) {
    JetVector r;
    r.reserve(m.size());
    for (const auto& row : m) r.push_back(dot(row, v));
    return r;
}

Eigen::VectorXcd values(const JetVector& v) {
    Eigen::VectorXcd r(v.size());
    for (size_t j = 0; j < v.size(); ++j) r(j) = v[j].value();
    return r;
}

Eigen::MatrixXcd values(const JetMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd r(n, n == 0 ? 0 : static_cast<Eigen::Index>(m[0].size()));
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = m[i][j].value();
    return r;
}

double norm(const JetVector& v) { return values(v).norm(); }

JetVector solve(const JetMatrix& a, const JetVector& b, ErrorKind kind) {
    const int n = static_cast<int>(b.size());
    int k = min_order(b);
    for (const auto& row : a) k = std::min(k, min_order(row));
    const double x0 = b.front().center();
    Eigen::MatrixXcd a0 = values(a);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a0);
    const double scale = std::max(1.0, a0.cwiseAbs().maxCoeff());
    if (lu.rank() < n || lu.rcond() < 1e-13)
        throw Error(kind, "singular linear system at x0=" + std::to_string(x0) +
                              " (rcond " + std::to_string(lu.rcond()) + ", scale " +
                              std::to_string(scale) + ")");
    std::vector<Eigen::VectorXcd> y(k + 1);
    for (int p = 0; p <= k; ++p) {
        Eigen::VectorXcd rhs(n);
        for (int i = 0; i < n; ++i) rhs(i) = b[i][p];
        for (int j = 1; j <= p; ++j)
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) rhs(i) -= a[i][l][j] * y[p - j](l);
        y[p] = lu.solve(rhs);
    }
    JetVector r;
    for (int i = 0; i < n; ++i) {
        std::vector<cplx> c(k + 1);
        for (int p = 0; p <= k; ++p) c[p] = y[p](i);
        r.emplace_back(x0, std::move(c));
    }
    return r;
}

}  // namespace pia
