#pragma once

#include <Eigen/Dense>

#include <vector>

namespace unmix {

// Number of degree-n monomials in `ambient_dim` variables; the dimension of
// the Veronese embedding. Equals C(n + ambient_dim - 1, n).
long long veronese_dim(int degree, int ambient_dim);

// Exponent vectors of all monomials of total degree `degree`, ordered with
// the leading variable's power descending (x1^n first, x_D^n last).
std::vector<std::vector<int>> monomial_exponents(int degree, int ambient_dim);

// Row-wise Veronese embedding of X (m x D) into R^K.
Eigen::MatrixXd veronese_embed(const Eigen::MatrixXd& X, int degree);

// P_c(x) = sum_k c_k * x^{exponents[k]}
double evaluate_poly(const Eigen::VectorXd& coeffs,
                     const std::vector<std::vector<int>>& exponents,
                     const Eigen::Ref<const Eigen::VectorXd>& x);

// Analytic gradient of P_c at x.
Eigen::VectorXd poly_gradient(const Eigen::VectorXd& coeffs,
                              const std::vector<std::vector<int>>& exponents,
                              const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace unmix
