#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pia/error.hpp"
#include "pia/taylor_jet.hpp"

namespace pia {

using JetVector = std::vector<TaylorJet>;
using JetMatrix = std::vector<JetVector>;  // row-major

int min_order(const JetVector& v);
JetVector fit(const JetVector& v, int order);

JetVector vadd(const JetVector& a, const JetVector& b);
JetVector vsub(const JetVector& a, const JetVector& b);
JetVector vscale(const TaylorJet& s, const JetVector& v);
JetVector vscale(cplx s, const JetVector& v);
JetVector vconj(const JetVector& v);
JetVector vdiff(const JetVector& v);
JetVector vzero(double center, int order, int n);

// (a, b) = sum_j conj(a_j) b_j
TaylorJet inner(const JetVector& a, const JetVector& b);
// sum_j a_j b_j
TaylorJet dot(const JetVector& a, const JetVector& b);
JetVector matvec(const JetMatrix& m, const JetVector& v);

Eigen::VectorXcd values(const JetVector& v);
Eigen::MatrixXcd values(const JetMatrix& m);
double norm(const JetVector& v);

// Solves A(x) y(x) = b(x) as jets: one LU of A(x0), then the Cauchy recurrence
// A0 y_k = b_k - sum_{j>=1} A_j y_{k-j}. Throws `kind` if A(x0) is numerically singular.
JetVector solve(const JetMatrix& a, const JetVector& b, ErrorKind kind);

}  // namespace pia
