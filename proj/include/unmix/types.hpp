#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "unmix/errors.hpp"

namespace unmix {

// Sparse account x movie rating table. Ids are opaque strings mapped to
// dense indices at ingestion; ratings are reals so half-star or normalized
// scales work.
struct RatingsDataset {
    struct Entry {
        int account;
        int movie;
        double rating;
    };

    std::vector<std::string> account_ids;
    std::vector<std::string> movie_ids;
    std::vector<Entry> ratings;
    double scale_min = 1.0;
    double scale_max = 5.0;

    int num_accounts() const { return static_cast<int>(account_ids.size()); }
    int num_movies() const { return static_cast<int>(movie_ids.size()); }

    // Enforces the structural invariants: indices in range, ratings within
    // scale, no duplicate (account, movie) pair.
    void validate() const;
};

// Learned d-dimensional feature vector per movie plus the global noise
// variance estimate from the factorization residual.
struct MovieFeatures {
    Eigen::MatrixXd vectors;  // M x d
    double sigma2 = 0.0;
    std::vector<int> cold_movies;  // movies fit from < 3 ratings

    int dim() const { return static_cast<int>(vectors.cols()); }
    int count() const { return static_cast<int>(vectors.rows()); }
};

// One account's rating events lifted into the arrangement's ambient space:
// row j of `lifted` is (v_j, 1, r_j) in dimension d+2.
struct AccountView {
    std::vector<int> movie_indices;
    Eigen::VectorXd ratings;
    Eigen::MatrixXd lifted;  // m x (d+2)
    std::optional<std::vector<int>> ground_truth;

    int size() const { return static_cast<int>(movie_indices.size()); }
    int feature_dim() const { return static_cast<int>(lifted.cols()) - 2; }

    // Feature vector of the j-th rated movie (drops the lift's (1, r) tail).
    Eigen::VectorXd feature(int pos) const { return lifted.row(pos).head(feature_dim()); }

    int truth_size() const;  // number of distinct ground-truth labels
};

// Linear per-user model r = <u, v> + z.
struct UserProfile {
    Eigen::VectorXd u;
    double z = 0.0;

    double predict(const Eigen::Ref<const Eigen::VectorXd>& v) const { return u.dot(v) + z; }

    // Hyperplane normal (u, z, -1) in the lifted space.
    Eigen::VectorXd normal() const {
        Eigen::VectorXd n(u.size() + 2);
        n.head(u.size()) = u;
        n(u.size()) = z;
        n(u.size() + 1) = -1.0;
        return n;
    }
};

enum class Algorithm { kmeans, spectral, em, gpca };

const char* to_string(Algorithm algo);
Algorithm algorithm_from_string(const std::string& name);

// Output of one identification run: the movie-to-user mapping, the fitted
// profiles and the mean square error they achieve.
struct IdentificationResult {
    int n = 0;
    std::vector<int> assignment;
    std::vector<UserProfile> profiles;
    double mse = 0.0;
    Algorithm algorithm = Algorithm::em;

    // Objective value after every half-step of the run that produced this
    // result (EM records these; clustering methods leave it empty).
    std::vector<double> objective_trace;
    // Points whose polynomial gradient was numerically zero (GPCA only).
    std::vector<int> flagged;
    int iterations = 0;
};

enum class SelectionMethod { bic, threshold, gamma_outlier };

struct SelectionReport {
    struct SizeEntry {
        int n;
        double mse;
        double bic;
    };

    std::vector<SizeEntry> per_size;
    std::vector<double> normalized_gaps;  // (mse_n - mse_{n+1}) * m / log m
    int label = 1;
    SelectionMethod method = SelectionMethod::bic;
    double tau = 0.0;  // only meaningful for SelectionMethod::threshold
};

// --- operations -----------------------------------------------------------

// Builds the lifted view (v_j, 1, r_j) for one account's ratings. Indices
// must address `features`; the input order is preserved.
AccountView lift(const MovieFeatures& features, const std::vector<int>& movie_indices,
                 const Eigen::VectorXd& ratings,
                 std::optional<std::vector<int>> ground_truth = std::nullopt);

// View of account `account_index` of the dataset, movies sorted ascending
// by movie index (the canonical per-account order).
AccountView account_view(const RatingsDataset& ds, const MovieFeatures& features,
                         int account_index,
                         const std::vector<int>* truth_labels = nullptr);

// r - <u, v> - z. Sign convention fixed as observation minus prediction.
double residual(const UserProfile& profile, const Eigen::Ref<const Eigen::VectorXd>& v, double r);

// (1/m) sum_j residual(profiles[I(j)], v_j, r_j)^2
double mse(const AccountView& view, const std::vector<int>& assignment,
           const std::vector<UserProfile>& profiles);
double mse(const AccountView& view, const IdentificationResult& result);

// Gaussian log-likelihood of the view under (profiles, assignment);
// algebraically equal to -m * mse / (2 sigma2).
double log_likelihood(const AccountView& view, const std::vector<int>& assignment,
                      const std::vector<UserProfile>& profiles, double sigma2);

}  // namespace unmix
