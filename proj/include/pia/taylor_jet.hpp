#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pia {

using cplx = std::complex<double>;

// Truncated Taylor series at `center`: coeffs[p] = f^(p)(center) / p!
class TaylorJet {
public:
    TaylorJet() : c_(1, cplx(0.0)) {}
    TaylorJet(double center, int order);
    TaylorJet(double center, std::vector<cplx> coeffs);

    static TaylorJet constant(double center, int order, cplx value);
    static TaylorJet variable(double center, int order);

    double center() const { return x0_; }
    int order() const { return static_cast<int>(c_.size()) - 1; }
    std::span<const cplx> coeffs() const { return c_; }
    cplx operator[](int p) const { return c_[p]; }
    cplx& operator[](int p) { return c_[p]; }
    cplx value() const { return c_[0]; }

    // f^(p)(center)
    cplx derivative(int p) const;
    // jet of f' (order drops by one)
    TaylorJet diff() const;
    // jet of the antiderivative taking value `c0` at the center (order grows by one)
    TaylorJet integrate(cplx c0) const;
    TaylorJet truncated(int order) const;
    // Horner evaluation of the polynomial at x
    cplx eval(double x) const;

    TaylorJet conj() const;
    TaylorJet real() const;
    TaylorJet imag() const;
    double max_abs() const;
    // tolerance for treating the lead coefficient as zero
    double lead_tol() const;

    TaylorJet& operator+=(const TaylorJet& b);
    TaylorJet& operator-=(const TaylorJet& b);
    TaylorJet& operator*=(const TaylorJet& b);
    TaylorJet& operator/=(const TaylorJet& b);
    TaylorJet& operator+=(cplx s);
    TaylorJet& operator-=(cplx s);
    TaylorJet& operator*=(cplx s);
    TaylorJet& operator/=(cplx s);
    TaylorJet operator-() const;

    // throws MismatchedJets unless b has the same center and order
    void check_compatible(const TaylorJet& b) const;

private:
    double x0_ = 0.0;
    std::vector<cplx> c_;
};

TaylorJet operator+(TaylorJet a, const TaylorJet& b);
TaylorJet operator-(TaylorJet a, const TaylorJet& b);
TaylorJet operator*(const TaylorJet& a, const TaylorJet& b);
TaylorJet operator/(const TaylorJet& a, const TaylorJet& b);
TaylorJet operator+(TaylorJet a, cplx s);
TaylorJet operator+(cplx s, TaylorJet a);
TaylorJet operator-(TaylorJet a, cplx s);
TaylorJet operator-(cplx s, const TaylorJet& a);
TaylorJet operator*(TaylorJet a, cplx s);
TaylorJet operator*(cplx s, TaylorJet a);
TaylorJet operator/(TaylorJet a, cplx s);
TaylorJet operator/(cplx s, const TaylorJet& a);

TaylorJet exp(const TaylorJet& a);
TaylorJet log(const TaylorJet& a);
TaylorJet sqrt(const TaylorJet& a);
// square root whose constant term is the given root of a[0]
TaylorJet sqrt(const TaylorJet& a, cplx root0);
TaylorJet sin(const TaylorJet& a);
TaylorJet cos(const TaylorJet& a);
TaylorJet pow(const TaylorJet& a, double e);
TaylorJet pow(const TaylorJet& a, cplx e);
TaylorJet powi(const TaylorJet& a, int n);

// Operand-aligning helpers: both sides are truncated to the smaller order first.
// Used by the recurrences, where derivatives consume orders unevenly.
TaylorJet fit(const TaylorJet& a, int order);
TaylorJet add(const TaylorJet& a, const TaylorJet& b);
TaylorJet sub(const TaylorJet& a, const TaylorJet& b);
TaylorJet mul(const TaylorJet& a, const TaylorJet& b);
TaylorJet div(const TaylorJet& a, const TaylorJet& b);

}  // namespace pia
