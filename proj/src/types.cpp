#include "unmix/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace unmix {

void RatingsDataset::validate() const {
    std::set<std::pair<int, int>> seen;
    for (const auto& e : ratings) {
        if (e.account < 0 || e.account >= num_accounts() || e.movie < 0 ||
            e.movie >= num_movies()) {
            throw SchemaError("rating entry indexes outside the dataset");
        }
        if (!std::isfinite(e.rating) || e.rating < scale_min || e.rating > scale_max) {
            throw SchemaError("rating outside the declared scale [" +
                              std::to_string(scale_min) + ", " + std::to_string(scale_max) +
                              "] for account " + account_ids[e.account]);
        }
        if (!seen.insert({e.account, e.movie}).second) {
            throw SchemaError("duplicate rating pair (" + account_ids[e.account] + ", " +
                              movie_ids[e.movie] + ")");
        }
    }
}

int AccountView::truth_size() const {
    if (!ground_truth) return 0;
    int n = 0;
    for (int label : *ground_truth) n = std::max(n, label + 1);
    return n;
}

const char* to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::kmeans: return "kmeans";
        case Algorithm::spectral: return "spectral";
        case Algorithm::em: return "em";
        case Algorithm::gpca: return "gpca";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "kmeans") return Algorithm::kmeans;
    if (name == "spectral") return Algorithm::spectral;
    if (name == "em") return Algorithm::em;
    if (name == "gpca") return Algorithm::gpca;
    throw SchemaError("unknown algorithm: " + name);
}

AccountView lift(const MovieFeatures& features, const std::vector<int>& movie_indices,
                 const Eigen::VectorXd& ratings, std::optional<std::vector<int>> ground_truth) {
    const int m = static_cast<int>(movie_indices.size());
    if (m == 0) throw SchemaError("empty account: no rated movies to lift");
    if (ratings.size() != m) throw SchemaError("movie index and rating lists differ in length");
    if (ground_truth && static_cast<int>(ground_truth->size()) != m) {
        throw SchemaError("ground-truth label list differs in length");
    }
    const int d = features.dim();
    AccountView view;
    view.movie_indices = movie_indices;
    view.ratings = ratings;
    view.lifted.resize(m, d + 2);
    for (int j = 0; j < m; ++j) {
        const int movie = movie_indices[j];
        if (movie < 0 || movie >= features.count()) {
            throw SchemaError("dataset mismatch: movie index " + std::to_string(movie) +
                              " not covered by the feature matrix");
        }
        if (!std::isfinite(ratings(j))) throw SchemaError("non-finite rating");
        view.lifted.row(j).head(d) = features.vectors.row(movie);
        view.lifted(j, d) = 1.0;
        view.lifted(j, d + 1) = ratings(j);
    }
    view.ground_truth = std::move(ground_truth);
    return view;
}

AccountView account_view(const RatingsDataset& ds, const MovieFeatures& features,
                         int account_index, const std::vector<int>* truth_labels) {
    std::vector<std::pair<int, double>> rows;
    for (const auto& e : ds.ratings) {
        if (e.account == account_index) rows.push_back({e.movie, e.rating});
    }
    std::sort(rows.begin(), rows.end());
    std::vector<int> movies(rows.size());
    Eigen::VectorXd ratings(static_cast<int>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        movies[j] = rows[j].first;
        ratings(static_cast<int>(j)) = rows[j].second;
    }
    std::optional<std::vector<int>> truth;
    if (truth_labels) {
        if (truth_labels->size() != rows.size()) {
            throw SchemaError("truth labels do not match the account's rating count");
        }
        truth = *truth_labels;
    }
    return lift(features, movies, ratings, std::move(truth));
}

double residual(const UserProfile& profile, const Eigen::Ref<const Eigen::VectorXd>& v,
                double r) {
    if (profile.u.size() != v.size()) {
        throw SchemaError("profile/feature dimension mismatch");
    }
    return r - profile.u.dot(v) - profile.z;
}

double mse(const AccountView& view, const std::vector<int>& assignment,
           const std::vector<UserProfile>& profiles) {
    const int m = view.size();
    if (static_cast<int>(assignment.size()) != m) {
        throw SchemaError("assignment does not cover all movie positions");
    }
    const int d = view.feature_dim();
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        const int label = assignment[j];
        if (label < 0 || label >= static_cast<int>(profiles.size())) {
            throw SchemaError("assignment label outside the profile set");
        }
        const auto& p = profiles[label];
        const double res = view.ratings(j) - p.u.dot(view.lifted.row(j).head(d)) - p.z;
        total += res * res;
    }
    return total / m;
}

double mse(const AccountView& view, const IdentificationResult& result) {
    return mse(view, result.assignment, result.profiles);
}

double log_likelihood(const AccountView& view, const std::vector<int>& assignment,
                      const std::vector<UserProfile>& profiles, double sigma2) {
    if (sigma2 <= 0.0) throw NumericalError("log-likelihood requires sigma2 > 0");
    double total = 0.0;
    const int d = view.feature_dim();
    for (int j = 0; j < view.size(); ++j) {
        const auto& p = profiles[assignment[j]];
        const double res = view.ratings(j) - p.u.dot(view.lifted.row(j).head(d)) - p.z;
        total += res * res;
    }
    return -total / (2.0 * sigma2);
}

}  // namespace unmix
