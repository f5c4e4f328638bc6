#pragma once

#include <cstdint>
#include <vector>

#include "unmix/rng.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Per-user share of a composite account's movies (the "activity" ratio).
struct RatioDistribution {
    enum class Kind { fixed, uniform, empirical };

    Kind kind = Kind::uniform;
    double fixed_value = 0.5;
    double lo = 0.2;
    double hi = 0.8;
    std::vector<double> samples;  // for Kind::empirical

    double draw(Rng& rng) const;

    static RatioDistribution fixed(double value);
    static RatioDistribution uniform(double lo, double hi);
    static RatioDistribution empirical(std::vector<double> samples);
};

struct SyntheticConfig {
    int n_users = 2;
    int d = 5;
    int movies = 500;               // m
    double noise_sigma = 0.0;       // sigma of the rating noise
    double profile_separation = 1.0471975511965976;  // min pairwise normal angle (60 deg)
    RatioDistribution ratio = RatioDistribution::uniform(0.2, 0.8);
    bool clip_to_scale = false;
    double scale_min = 1.0;
    double scale_max = 5.0;
    std::uint64_t seed = 0;

    // Profile sampling: u components are N(0, u_scale^2 / d) so the
    // prediction spread is O(u_scale); biases are N(bias_mean, bias_std^2).
    // Large biases push all normals towards the bias axis, so wide
    // separations are only feasible with bias_mean near zero.
    double u_scale = 1.5;
    double bias_mean = 0.0;
    double bias_std = 1.0;
};

struct SyntheticAccount {
    MovieFeatures features;  // the true v_j, sigma2 = noise_sigma^2
    AccountView view;        // carries the ground-truth labels
    std::vector<UserProfile> true_profiles;
    double clip_rate = 0.0;
};

// Draws movie features i.i.d. standard normal, n profiles with pairwise
// normal angles >= profile_separation, user shares from the ratio
// distribution, and ratings from the linear model plus Gaussian noise.
SyntheticAccount generate_synthetic(const SyntheticConfig& cfg);

// Profiles alone (used by generators that share a movie universe).
std::vector<UserProfile> sample_separated_profiles(const SyntheticConfig& cfg, Rng& rng);

// Same ratings, fictitious ground truth: a random subset of round(p * m)
// movies (p from the ratio distribution) becomes user 0, the rest user 1.
// Both parts are always non-empty.
AccountView null_split(const AccountView& view, const RatioDistribution& ratio,
                       std::uint64_t seed);

// --- shared-universe populations (CLI `synth`) ------------------------------

struct PopulationGroup {
    int count = 0;    // accounts in this group
    int users = 1;    // true household size
};

struct PopulationConfig {
    std::vector<PopulationGroup> groups;
    int num_movies = 2000;       // movie universe size M
    int movies_per_account = 300;
    int d = 5;
    double noise_sigma = 0.25;
    double profile_separation = 1.0471975511965976;
    RatioDistribution ratio = RatioDistribution::uniform(0.2, 0.8);
    bool clip_to_scale = false;
    double scale_min = 1.0;
    double scale_max = 5.0;
    std::uint64_t seed = 0;
    double u_scale = 1.5;
    double bias_mean = 0.0;
    double bias_std = 1.0;
};

struct PopulationResult {
    RatingsDataset dataset;
    MovieFeatures features;                 // shared true movie features
    std::vector<std::vector<int>> truths;   // per account, canonical order
    std::vector<int> true_sizes;            // per account
};

PopulationResult generate_population(const PopulationConfig& cfg);

}  // namespace unmix
