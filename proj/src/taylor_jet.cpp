#include "pia/taylor_jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pia/error.hpp"

namespace pia {

namespace {

void require_lead(const TaylorJet& a, ErrorKind kind, const char* what) {
    if (std::abs(a[0]) < a.lead_tol())
        throw Error(kind, std::string(what) + " at x0=" + std::to_string(a.center()));
}

}  // namespace

TaylorJet::TaylorJet(double center, int order) : x0_(center) {
    if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative jet order");
    c_.assign(order + 1, cplx(0.0));
}

TaylorJet::TaylorJet(double center, std::vector<cplx> coeffs) : x0_(center), c_(std::move(coeffs)) {
    if (c_.empty()) throw Error(ErrorKind::InvalidArgument, "jet needs at least one coefficient");
}

TaylorJet TaylorJet::constant(double center, int order, cplx value) {
    TaylorJet j(center, order);
    j.c_[0] = value;
    return j;
}

TaylorJet TaylorJet::variable(double center, int order) {
    TaylorJet j(center, order);
    j.c_[0] = center;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

cplx TaylorJet::derivative(int p) const {
    if (p < 0 || p > order())
        throw Error(ErrorKind::OrderExceeded,
                    "derivative " + std::to_string(p) + " of order-" + std::to_string(order()) + " jet");
    double f = 1.0;
    for (int k = 2; k <= p; ++k) f *= k;
    return f * c_[p];
}

TaylorJet TaylorJet::diff() const {
    if (order() < 1) throw Error(ErrorKind::OrderExceeded, "derivative of order-0 jet");
    std::vector<cplx> d(order());
    for (int p = 1; p <= order(); ++p) d[p - 1] = double(p) * c_[p];
    return TaylorJet(x0_, std::move(d));
}

TaylorJet TaylorJet::integrate(cplx c0) const {
    std::vector<cplx> d(order() + 2);
    d[0] = c0;
    for (int p = 0; p <= order(); ++p) d[p + 1] = c_[p] / double(p + 1);
    return TaylorJet(x0_, std::move(d));
}

TaylorJet TaylorJet::truncated(int k) const {
    if (k > order()) throw Error(ErrorKind::OrderExceeded, "cannot extend a jet by truncation");
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative jet order");
    return TaylorJet(x0_, std::vector<cplx>(c_.begin(), c_.begin() + k + 1));
}

cplx TaylorJet::eval(double x) const {
    const double h = x - x0_;
    cplx r = 0.0;
    for (int p = order(); p >= 0; --p) r = r * h + c_[p];
    return r;
}

TaylorJet TaylorJet::conj() const {
    TaylorJet r = *this;
    for (auto& v : r.c_) v = std::conj(v);
    return r;
}

TaylorJet TaylorJet::real() const {
    TaylorJet r = *this;
    for (auto& v : r.c_) v = v.real();
    return r;
}

TaylorJet TaylorJet::imag() const {
    TaylorJet r = *this;
    for (auto& v : r.c_) v = v.imag();
    return r;
}

double TaylorJet::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

double TaylorJet::lead_tol() const { return 1e-13 * (1.0 + max_abs()); }

void TaylorJet::check_compatible(const TaylorJet& b) const {
    if (b.x0_ != x0_ || b.order() != order())
        throw Error(ErrorKind::MismatchedJets, "jets at x0=" + std::to_string(x0_) + " order " +
                                                   std::to_string(order()) + " vs x0=" +
                                                   std::to_string(b.x0_) + " order " +
                                                   std::to_string(b.order()));
}

TaylorJet& TaylorJet::operator+=(const TaylorJet& b) {
    check_compatible(b);
    for (size_t p = 0; p < c_.size(); ++p) c_[p] += b.c_[p];
    return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& b) {
    check_compatible(b);
    for (size_t p = 0; p < c_.size(); ++p) c_[p] -= b.c_[p];
    return *this;
}

TaylorJet& TaylorJet::operator*=(const TaylorJet& b) { return *this = *this * b; }
TaylorJet& TaylorJet::operator/=(const TaylorJet& b) { return *this = *this / b; }

TaylorJet& TaylorJet::operator+=(cplx s) {
    c_[0] += s;
    return *this;
}

TaylorJet& TaylorJet::operator-=(cplx s) {
    c_[0] -= s;
    return *this;
}

TaylorJet& TaylorJet::operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
}

TaylorJet& TaylorJet::operator/=(cplx s) {
    for (auto& v : c_) v /= s;
    return *this;
}

TaylorJet TaylorJet::operator-() const {
    TaylorJet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }

TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
    a.check_compatible(b);
    TaylorJet r(a.center(), a.order());
    const int K = a.order();
    for (int k = 0; k <= K; ++k) {
        cplx s = 0.0;
        for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
        r[k] = s;
    }
    return r;
}

TaylorJet operator/(const TaylorJet& a, const TaylorJet& b) {
    a.check_compatible(b);
    TaylorJet q(a.center(), a.order());
    require_lead(b, ErrorKind::DivisionByZeroLeadCoefficient, "division by jet with vanishing lead");
    const int K = a.order();
    for (int k = 0; k <= K; ++k) {
        cplx s = a[k];
        for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
        q[k] = s / b[0];
    }
    return q;
}

TaylorJet operator+(TaylorJet a, cplx s) { return a += s; }
TaylorJet operator+(cplx s, TaylorJet a) { return a += s; }
TaylorJet operator-(TaylorJet a, cplx s) { return a -= s; }
TaylorJet operator-(cplx s, const TaylorJet& a) { return (-a) += s; }
TaylorJet operator*(TaylorJet a, cplx s) { return a *= s; }
TaylorJet operator*(cplx s, TaylorJet a) { return a *= s; }
TaylorJet operator/(TaylorJet a, cplx s) { return a /= s; }

TaylorJet operator/(cplx s, const TaylorJet& a) {
    return TaylorJet::constant(a.center(), a.order(), s) / a;
}

TaylorJet exp(const TaylorJet& a) {
    const int K = a.order();
    TaylorJet e(a.center(), K);
    e[0] = std::exp(a[0]);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) s += double(j) * a[j] * e[k - j];
        e[k] = s / double(k);
    }
    return e;
}

TaylorJet log(const TaylorJet& a) {
    require_lead(a, ErrorKind::BranchPointEvaluation, "ln of jet with vanishing lead");
    const int K = a.order();
    TaylorJet l(a.center(), K);
    l[0] = std::log(a[0]);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0.0;
        for (int j = 1; j < k; ++j) s += double(j) * l[j] * a[k - j];
        l[k] = (a[k] - s / double(k)) / a[0];
    }
    return l;
}

TaylorJet sqrt(const TaylorJet& a, cplx root0) {
    require_lead(a, ErrorKind::BranchPointEvaluation, "sqrt of jet with vanishing lead");
    const int K = a.order();
    TaylorJet s(a.center(), K);
    s[0] = root0;
    for (int k = 1; k <= K; ++k) {
        cplx acc = a[k];
        for (int j = 1; j < k; ++j) acc -= s[j] * s[k - j];
        s[k] = acc / (2.0 * root0);
    }
    return s;
}

TaylorJet sqrt(const TaylorJet& a) { return sqrt(a, std::sqrt(a[0])); }

TaylorJet sin(const TaylorJet& a) {
    const int K = a.order();
    TaylorJet s(a.center(), K), c(a.center(), K);
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= K; ++k) {
        cplx ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += double(j) * a[j] * c[k - j];
            cc -= double(j) * a[j] * s[k - j];
        }
        s[k] = ss / double(k);
        c[k] = cc / double(k);
    }
    return s;
}

TaylorJet cos(const TaylorJet& a) {
    const int K = a.order();
    TaylorJet s(a.center(), K), c(a.center(), K);
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= K; ++k) {
        cplx ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += double(j) * a[j] * c[k - j];
            cc -= double(j) * a[j] * s[k - j];
        }
        s[k] = ss / double(k);
        c[k] = cc / double(k);
    }
    return c;
}

TaylorJet powi(const TaylorJet& a, int n) {
    if (n < 0) return 1.0 / powi(a, -n);
    TaylorJet r = TaylorJet::constant(a.center(), a.order(), 1.0);
    TaylorJet b = a;
    while (n > 0) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n > 0) b = b * b;
    }
    return r;
}

TaylorJet pow(const TaylorJet& a, cplx e) {
    if (e.imag() == 0.0) return pow(a, e.real());
    require_lead(a, ErrorKind::BranchPointEvaluation, "complex power of jet with vanishing lead");
    return exp(e * log(a));
}

TaylorJet pow(const TaylorJet& a, double e) {
    if (e == std::floor(e) && std::abs(e) < 1e9) return powi(a, static_cast<int>(e));
    require_lead(a, ErrorKind::BranchPointEvaluation, "real power of jet with vanishing lead");
    const int K = a.order();
    TaylorJet p(a.center(), K);
    p[0] = std::pow(a[0], e);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0.0;
        for (int j = 1; j <= k; ++j) s += ((e + 1.0) * j - k) * a[j] * p[k - j];
        p[k] = s / (double(k) * a[0]);
    }
    return p;
}

TaylorJet fit(const TaylorJet& a, int order) { return a.order() == order ? a : a.truncated(order); }

TaylorJet add(const TaylorJet& a, const TaylorJet& b) {
    const int k = std::min(a.order(), b.order());
    return fit(a, k) + fit(b, k);
}

TaylorJet sub(const TaylorJet& a, const TaylorJet& b) {
    const int k = std::min(a.order(), b.order());
    return fit(a, k) - fit(b, k);
}

TaylorJet mul(const TaylorJet& a, const TaylorJet& b) {
    const int k = std::min(a.order(), b.order());
    return fit(a, k) * fit(b, k);
}

TaylorJet div(const TaylorJet& a, const TaylorJet& b) {
    const int k = std::min(a.order(), b.order());
    return fit(a, k) / fit(b, k);
}

}  // namespace pia
