#pragma once

#include <cstdint>
#include <vector>

#include "unmix/types.hpp"

namespace unmix {

struct FactorizeConfig {
    int d = 10;  // 10 suits CAMRa-scale datasets; use 30 for Netflix-scale
    double lambda = 1.0;
    int max_iters = 50;
    double tol = 1e-6;  // stop when the relative objective decrease falls below
    std::uint64_t seed = 0;
    bool center_ratings = false;  // subtract the global mean first (biases absorb it otherwise)
    int threads = 0;              // <=1 runs the serial reference kernels, >1 the OpenMP ones
    double sigma2_holdout_fraction = 0.0;  // 0 = sigma2 from training MSE
    int svd_init_max_cells = 4'000'000;    // dense SVD init only below this N*M
};

struct FactorizeResult {
    MovieFeatures features;
    std::vector<UserProfile> account_profiles;
    std::vector<double> objective_trace;  // after init and after every half-step
    int iterations = 0;
    double train_mse = 0.0;
};

// Alternating ridge regression over r_aj ~ <u_a, v_j> + z_a with account-side
// bias only. Every movie needs at least one rating.
FactorizeResult factorize(const RatingsDataset& ds, const FactorizeConfig& cfg);

// 5-fold cross-validation of lambda over a small grid; returns the winner.
double cross_validate_lambda(const RatingsDataset& ds, FactorizeConfig cfg,
                             const std::vector<double>& grid = {0.1, 1.0, 10.0},
                             int folds = 5);

// --- kernels ----------------------------------------------------------------
// Exposed so the tests can pin the OpenMP kernels against the serial
// reference and the benchmark can time both.
namespace fact {

// Ratings indexed both ways (by account and by movie).
struct Problem {
    int num_accounts = 0;
    int num_movies = 0;
    int d = 0;
    std::vector<int> acc_ptr, acc_movie;
    std::vector<double> acc_rating;
    std::vector<int> mov_ptr, mov_account;
    std::vector<double> mov_rating;
};

Problem build_problem(const RatingsDataset& ds, int d, double rating_offset);

void account_step_serial(const Problem& p, const Eigen::MatrixXd& V, Eigen::MatrixXd& U,
                         Eigen::VectorXd& Z, double lambda);
void account_step_omp(const Problem& p, const Eigen::MatrixXd& V, Eigen::MatrixXd& U,
                      Eigen::VectorXd& Z, double lambda, int threads);
void movie_step_serial(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                       Eigen::MatrixXd& V, double lambda);
void movie_step_omp(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                    Eigen::MatrixXd& V, double lambda, int threads);

// Squared error plus lambda * (|U|^2 + |V|^2); deterministic serial sum.
double objective(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                 const Eigen::MatrixXd& V, double lambda);

double mean_squared_error(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                          const Eigen::MatrixXd& V);

}  // namespace fact

}  // namespace unmix
