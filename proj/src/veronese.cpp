#include "unmix/veronese.hpp"

#include <cmath>

#include "unmix/errors.hpp"

namespace unmix {

long long veronese_dim(int degree, int ambient_dim) {
    // C(degree + ambient_dim - 1, degree)
    long long result = 1;
    for (int i = 1; i <= degree; ++i) {
        result = result * (ambient_dim - 1 + i) / i;
    }
    return result;
}

namespace {

void enumerate(int var, int remaining, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
    const int total_vars = static_cast<int>(current.size());
    if (var == total_vars - 1) {
        current[var] = remaining;
        out.push_back(current);
        return;
    }
    for (int power = remaining; power >= 0; --power) {
        current[var] = power;
        enumerate(var + 1, remaining - power, current, out);
    }
    current[var] = 0;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(int degree, int ambient_dim) {
    if (degree < 1 || ambient_dim < 1) throw SchemaError("veronese degree and dimension must be >= 1");
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(veronese_dim(degree, ambient_dim)));
    std::vector<int> current(ambient_dim, 0);
    enumerate(0, degree, current, out);
    return out;
}

Eigen::MatrixXd veronese_embed(const Eigen::MatrixXd& X, int degree) {
    const int dim = static_cast<int>(X.cols());
    const auto exponents = monomial_exponents(degree, dim);
    const auto K = static_cast<int>(exponents.size());
    Eigen::MatrixXd embedded(X.rows(), K);
    for (int i = 0; i < X.rows(); ++i) {
        for (int k = 0; k < K; ++k) {
            double value = 1.0;
            for (int v = 0; v < dim; ++v) {
                const int p = exponents[k][v];
                if (p == 1) {
                    value *= X(i, v);
                } else if (p > 1) {
                    value *= std::pow(X(i, v), p);
                }
            }
            embedded(i, k) = value;
        }
    }
    return embedded;
}

double evaluate_poly(const Eigen::VectorXd& coeffs,
                     const std::vector<std::vector<int>>& exponents,
                     const Eigen::Ref<const Eigen::VectorXd>& x) {
    double total = 0.0;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        double value = coeffs(static_cast<int>(k));
        for (std::size_t v = 0; v < exponents[k].size(); ++v) {
            const int p = exponents[k][v];
            if (p == 1) {
                value *= x(static_cast<int>(v));
            } else if (p > 1) {
                value *= std::pow(x(static_cast<int>(v)), p);
            }
        }
        total += value;
    }
    return total;
}

Eigen::VectorXd poly_gradient(const Eigen::VectorXd& coeffs,
                              const std::vector<std::vector<int>>& exponents,
                              const Eigen::Ref<const Eigen::VectorXd>& x) {
    const int dim = static_cast<int>(x.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        const double c = coeffs(static_cast<int>(k));
        if (c == 0.0) continue;
        for (int v = 0; v < dim; ++v) {
            const int p = exponents[k][v];
            if (p == 0) continue;
            // d/dx_v of the monomial: p * x_v^{p-1} * prod_{w != v} x_w^{e_w}
            double term = c * p;
            for (int w = 0; w < dim; ++w) {
                const int q = (w == v) ? exponents[k][w] - 1 : exponents[k][w];
                if (q == 1) {
                    term *= x(w);
                } else if (q > 1) {
                    term *= std::pow(x(w), q);
                }
            }
            grad(v) += term;
        }
    }
    return grad;
}

}  // namespace unmix
