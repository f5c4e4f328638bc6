#include "unmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unmix/errors.hpp"

namespace unmix {

double RatioDistribution::draw(Rng& rng) const {
    switch (kind) {
        case Kind::fixed: return fixed_value;
        case Kind::uniform: return rng.uniform(lo, hi);
        case Kind::empirical: {
            if (samples.empty()) throw NumericalError("empirical ratio distribution is empty");
            return samples[static_cast<std::size_t>(rng.uniform_int(
                static_cast<int>(samples.size())))];
        }
    }
    return 0.5;
}

RatioDistribution RatioDistribution::fixed(double value) {
    RatioDistribution r;
    r.kind = Kind::fixed;
    r.fixed_value = value;
    return r;
}

RatioDistribution RatioDistribution::uniform(double lo, double hi) {
    RatioDistribution r;
    r.kind = Kind::uniform;
    r.lo = lo;
    r.hi = hi;
    return r;
}

RatioDistribution RatioDistribution::empirical(std::vector<double> samples) {
    RatioDistribution r;
    r.kind = Kind::empirical;
    r.samples = std::move(samples);
    return r;
}

namespace {

double normal_angle(const UserProfile& a, const UserProfile& b) {
    const Eigen::VectorXd na = a.normal();
    const Eigen::VectorXd nb = b.normal();
    const double c = na.dot(nb) / (na.norm() * nb.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

UserProfile sample_profile(const SyntheticConfig& cfg, Rng& rng) {
    UserProfile p;
    p.u.resize(cfg.d);
    const double comp_sigma = cfg.u_scale / std::sqrt(static_cast<double>(cfg.d));
    for (int k = 0; k < cfg.d; ++k) p.u(k) = rng.normal(0.0, comp_sigma);
    p.z = rng.normal(cfg.bias_mean, cfg.bias_std);
    return p;
}

// Per-user movie counts via stick breaking from the ratio distribution;
// every user keeps at least one movie.
std::vector<int> user_counts(int m, int n, const RatioDistribution& ratio, Rng& rng) {
    std::vector<int> counts(n, 0);
    int remaining = m;
    for (int i = 0; i < n - 1; ++i) {
        const int users_left = n - i - 1;
        const double share = ratio.draw(rng);
        int take = static_cast<int>(std::llround(share * remaining));
        take = std::clamp(take, 1, remaining - users_left);
        counts[i] = take;
        remaining -= take;
    }
    counts[n - 1] = remaining;
    return counts;
}

}  // namespace

std::vector<UserProfile> sample_separated_profiles(const SyntheticConfig& cfg, Rng& rng) {
    constexpr int kMaxRestarts = 60;
    constexpr int kMaxTries = 400;
    for (int restart = 0; restart < kMaxRestarts; ++restart) {
        std::vector<UserProfile> profiles;
        profiles.push_back(sample_profile(cfg, rng));
        bool ok = true;
        while (static_cast<int>(profiles.size()) < cfg.n_users && ok) {
            ok = false;
            for (int attempt = 0; attempt < kMaxTries; ++attempt) {
                UserProfile candidate = sample_profile(cfg, rng);
                bool separated = true;
                for (const auto& prev : profiles) {
                    if (normal_angle(candidate, prev) < cfg.profile_separation) {
                        separated = false;
                        break;
                    }
                }
                if (separated) {
                    profiles.push_back(std::move(candidate));
                    ok = true;
                    break;
                }
            }
        }
        if (ok) return profiles;
    }
    throw NumericalError("profile separation " + std::to_string(cfg.profile_separation) +
                         " rad infeasible for n=" + std::to_string(cfg.n_users) +
                         ", d=" + std::to_string(cfg.d));
}

SyntheticAccount generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.n_users < 1 || cfg.d < 1 || cfg.movies < cfg.n_users) {
        throw SchemaError("invalid synthetic config");
    }
    if (cfg.noise_sigma < 0.0) throw SchemaError("noise_sigma must be >= 0");
    Rng rng(cfg.seed);

    SyntheticAccount out;
    out.true_profiles = sample_separated_profiles(cfg, rng);

    out.features.vectors.resize(cfg.movies, cfg.d);
    for (int j = 0; j < cfg.movies; ++j) {
        for (int k = 0; k < cfg.d; ++k) out.features.vectors(j, k) = rng.normal();
    }
    out.features.sigma2 = cfg.noise_sigma * cfg.noise_sigma;

    const auto counts = user_counts(cfg.movies, cfg.n_users, cfg.ratio, rng);
    std::vector<int> labels;
    labels.reserve(cfg.movies);
    for (int i = 0; i < cfg.n_users; ++i) labels.insert(labels.end(), counts[i], i);
    rng.shuffle(labels);

    std::vector<int> movie_indices(cfg.movies);
    std::iota(movie_indices.begin(), movie_indices.end(), 0);
    Eigen::VectorXd ratings(cfg.movies);
    int clipped = 0;
    for (int j = 0; j < cfg.movies; ++j) {
        const auto& p = out.true_profiles[labels[j]];
        double r = p.predict(out.features.vectors.row(j)) + rng.normal(0.0, cfg.noise_sigma);
        if (cfg.clip_to_scale) {
            const double clamped = std::clamp(r, cfg.scale_min, cfg.scale_max);
            if (clamped != r) ++clipped;
            r = clamped;
        }
        ratings(j) = r;
    }
    out.clip_rate = static_cast<double>(clipped) / cfg.movies;
    out.view = lift(out.features, movie_indices, ratings, labels);
    return out;
}

AccountView null_split(const AccountView& view, const RatioDistribution& ratio,
                       std::uint64_t seed) {
    const int m = view.size();
    if (m < 2) throw SchemaError("null split needs at least 2 movies");
    Rng rng(seed);
    const double p = ratio.draw(rng);
    int first = static_cast<int>(std::llround(p * m));
    first = std::clamp(first, 1, m - 1);

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<int> labels(m, 1);
    for (int j = 0; j < first; ++j) labels[order[j]] = 0;

    AccountView out = view;
    out.ground_truth = std::move(labels);
    return out;
}

PopulationResult generate_population(const PopulationConfig& cfg) {
    if (cfg.num_movies < cfg.movies_per_account) {
        throw SchemaError("movie universe smaller than movies_per_account");
    }
    Rng rng(cfg.seed);

    PopulationResult out;
    out.features.vectors.resize(cfg.num_movies, cfg.d);
    for (int j = 0; j < cfg.num_movies; ++j) {
        for (int k = 0; k < cfg.d; ++k) out.features.vectors(j, k) = rng.normal();
    }
    out.features.sigma2 = cfg.noise_sigma * cfg.noise_sigma;

    out.dataset.scale_min = cfg.scale_min;
    out.dataset.scale_max = cfg.scale_max;
    const int total_movies = cfg.num_movies;
    int digits = 1;
    for (int v = total_movies; v >= 10; v /= 10) ++digits;
    for (int j = 0; j < total_movies; ++j) {
        std::string id = std::to_string(j);
        out.dataset.movie_ids.push_back("m" + std::string(digits - id.size(), '0') + id);
    }

    int total_accounts = 0;
    for (const auto& g : cfg.groups) total_accounts += g.count;
    int adigits = 1;
    for (int v = total_accounts; v >= 10; v /= 10) ++adigits;

    std::vector<int> universe(cfg.num_movies);
    std::iota(universe.begin(), universe.end(), 0);

    int account = 0;
    for (const auto& group : cfg.groups) {
        for (int c = 0; c < group.count; ++c, ++account) {
            std::string id = std::to_string(account);
            out.dataset.account_ids.push_back("a" + std::string(adigits - id.size(), '0') + id);

            SyntheticConfig acc_cfg;
            acc_cfg.n_users = group.users;
            acc_cfg.d = cfg.d;
            acc_cfg.movies = cfg.movies_per_account;
            acc_cfg.noise_sigma = cfg.noise_sigma;
            acc_cfg.profile_separation = cfg.profile_separation;
            acc_cfg.ratio = cfg.ratio;
            acc_cfg.u_scale = cfg.u_scale;
            acc_cfg.bias_mean = cfg.bias_mean;
            acc_cfg.bias_std = cfg.bias_std;
            const auto profiles = sample_separated_profiles(acc_cfg, rng);

            rng.shuffle(universe);
            std::vector<int> chosen(universe.begin(), universe.begin() + cfg.movies_per_account);
            std::sort(chosen.begin(), chosen.end());  // canonical per-account order

            const auto counts = user_counts(cfg.movies_per_account, group.users, cfg.ratio, rng);
            std::vector<int> labels;
            for (int i = 0; i < group.users; ++i) labels.insert(labels.end(), counts[i], i);
            rng.shuffle(labels);

            for (int j = 0; j < cfg.movies_per_account; ++j) {
                const auto& p = profiles[labels[j]];
                double r = p.predict(out.features.vectors.row(chosen[j])) +
                           rng.normal(0.0, cfg.noise_sigma);
                if (cfg.clip_to_scale) r = std::clamp(r, cfg.scale_min, cfg.scale_max);
                out.dataset.ratings.push_back({account, chosen[j], r});
            }
            out.truths.push_back(std::move(labels));
            out.true_sizes.push_back(group.users);
        }
    }
    return out;
}

}  // namespace unmix
