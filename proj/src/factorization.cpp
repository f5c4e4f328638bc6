#include "unmix/factorization.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unmix/errors.hpp"
#include "unmix/rng.hpp"

namespace unmix {
namespace fact {

Problem build_problem(const RatingsDataset& ds, int d, double rating_offset) {
    Problem p;
    p.num_accounts = ds.num_accounts();
    p.num_movies = ds.num_movies();
    p.d = d;

    std::vector<int> acc_count(p.num_accounts, 0), mov_count(p.num_movies, 0);
    for (const auto& e : ds.ratings) {
        ++acc_count[e.account];
        ++mov_count[e.movie];
    }
    p.acc_ptr.assign(p.num_accounts + 1, 0);
    p.mov_ptr.assign(p.num_movies + 1, 0);
    for (int a = 0; a < p.num_accounts; ++a) p.acc_ptr[a + 1] = p.acc_ptr[a] + acc_count[a];
    for (int j = 0; j < p.num_movies; ++j) p.mov_ptr[j + 1] = p.mov_ptr[j] + mov_count[j];

    const std::size_t nnz = ds.ratings.size();
    p.acc_movie.resize(nnz);
    p.acc_rating.resize(nnz);
    p.mov_account.resize(nnz);
    p.mov_rating.resize(nnz);
    std::vector<int> acc_fill(p.num_accounts, 0), mov_fill(p.num_movies, 0);
    for (const auto& e : ds.ratings) {
        const double r = e.rating - rating_offset;
        const int ai = p.acc_ptr[e.account] + acc_fill[e.account]++;
        p.acc_movie[ai] = e.movie;
        p.acc_rating[ai] = r;
        const int mi = p.mov_ptr[e.movie] + mov_fill[e.movie]++;
        p.mov_account[mi] = e.account;
        p.mov_rating[mi] = r;
    }
    return p;
}

namespace {

// Ridge solve for one account: minimizes the squared error over (u_a, z_a)
// with penalty lambda * |u_a|^2 (bias unpenalized).
void solve_account(const Problem& p, const Eigen::MatrixXd& V, Eigen::MatrixXd& U,
                   Eigen::VectorXd& Z, double lambda, int a) {
    const int d = p.d;
    const int begin = p.acc_ptr[a], end = p.acc_ptr[a + 1];
    if (begin == end) {
        U.row(a).setZero();
        Z(a) = 0.0;
        return;
    }
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd x(d + 1);
    for (int i = begin; i < end; ++i) {
        x.head(d) = V.row(p.acc_movie[i]);
        x(d) = 1.0;
        gram.noalias() += x * x.transpose();
        rhs.noalias() += p.acc_rating[i] * x;
    }
    gram.topLeftCorner(d, d).diagonal().array() += lambda;
    const Eigen::VectorXd theta = gram.ldlt().solve(rhs);
    U.row(a) = theta.head(d);
    Z(a) = theta(d);
}

void solve_movie(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                 Eigen::MatrixXd& V, double lambda, int j) {
    const int d = p.d;
    const int begin = p.mov_ptr[j], end = p.mov_ptr[j + 1];
    if (begin == end) {
        V.row(j).setZero();
        return;
    }
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
    for (int i = begin; i < end; ++i) {
        const int a = p.mov_account[i];
        gram.noalias() += U.row(a).transpose() * U.row(a);
        rhs.noalias() += (p.mov_rating[i] - Z(a)) * U.row(a).transpose();
    }
    gram.diagonal().array() += lambda;
    V.row(j) = gram.ldlt().solve(rhs);
}

}  // namespace

void account_step_serial(const Problem& p, const Eigen::MatrixXd& V, Eigen::MatrixXd& U,
                         Eigen::VectorXd& Z, double lambda) {
    for (int a = 0; a < p.num_accounts; ++a) solve_account(p, V, U, Z, lambda, a);
}

void account_step_omp(const Problem& p, const Eigen::MatrixXd& V, Eigen::MatrixXd& U,
                      Eigen::VectorXd& Z, double lambda, int threads) {
#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
    for (int a = 0; a < p.num_accounts; ++a) solve_account(p, V, U, Z, lambda, a);
}

void movie_step_serial(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                       Eigen::MatrixXd& V, double lambda) {
    for (int j = 0; j < p.num_movies; ++j) solve_movie(p, U, Z, V, lambda, j);
}

void movie_step_omp(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                    Eigen::MatrixXd& V, double lambda, int threads) {
#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
    for (int j = 0; j < p.num_movies; ++j) solve_movie(p, U, Z, V, lambda, j);
}

double objective(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                 const Eigen::MatrixXd& V, double lambda) {
    double total = 0.0;
    for (int a = 0; a < p.num_accounts; ++a) {
        for (int i = p.acc_ptr[a]; i < p.acc_ptr[a + 1]; ++i) {
            const double res = p.acc_rating[i] - U.row(a).dot(V.row(p.acc_movie[i])) - Z(a);
            total += res * res;
        }
    }
    return total + lambda * (U.squaredNorm() + V.squaredNorm());
}

double mean_squared_error(const Problem& p, const Eigen::MatrixXd& U, const Eigen::VectorXd& Z,
                          const Eigen::MatrixXd& V) {
    double total = 0.0;
    std::size_t count = 0;
    for (int a = 0; a < p.num_accounts; ++a) {
        for (int i = p.acc_ptr[a]; i < p.acc_ptr[a + 1]; ++i) {
            const double res = p.acc_rating[i] - U.row(a).dot(V.row(p.acc_movie[i])) - Z(a);
            total += res * res;
            ++count;
        }
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace fact

namespace {

Eigen::MatrixXd initial_features(const fact::Problem& p, const FactorizeConfig& cfg) {
    const int d = p.d;
    Rng rng(derive_seed(cfg.seed, 0x7ac70));
    const auto cells = static_cast<std::int64_t>(p.num_accounts) * p.num_movies;
    if (cells > cfg.svd_init_max_cells) {
        Eigen::MatrixXd V(p.num_movies, d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (int j = 0; j < p.num_movies; ++j) {
            for (int k = 0; k < d; ++k) V(j, k) = scale * rng.normal();
        }
        return V;
    }
    // Zero-filled centered matrix; its top-d right singular subspace seeds V.
    double mean = 0.0;
    std::size_t nnz = p.acc_rating.size();
    for (double r : p.acc_rating) mean += r;
    if (nnz) mean /= static_cast<double>(nnz);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(p.num_accounts, p.num_movies);
    for (int a = 0; a < p.num_accounts; ++a) {
        for (int i = p.acc_ptr[a]; i < p.acc_ptr[a + 1]; ++i) {
            dense(a, p.acc_movie[i]) = p.acc_rating[i] - mean;
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinV);
    const int rank = std::min<int>(d, static_cast<int>(svd.singularValues().size()));
    Eigen::MatrixXd V(p.num_movies, d);
    for (int k = 0; k < rank; ++k) {
        V.col(k) = svd.matrixV().col(k) * std::sqrt(svd.singularValues()(k));
    }
    for (int k = rank; k < d; ++k) {
        for (int j = 0; j < p.num_movies; ++j) V(j, k) = 1e-3 * rng.normal();
    }
    return V;
}

struct CoreResult {
    Eigen::MatrixXd U, V;
    Eigen::VectorXd Z;
    std::vector<double> trace;
    int iterations = 0;
};

CoreResult factorize_core(const fact::Problem& p, const FactorizeConfig& cfg) {
    CoreResult res;
    res.V = initial_features(p, cfg);
    res.U = Eigen::MatrixXd::Zero(p.num_accounts, p.d);
    res.Z = Eigen::VectorXd::Zero(p.num_accounts);

    const bool parallel = cfg.threads > 1;
    res.trace.push_back(fact::objective(p, res.U, res.Z, res.V, cfg.lambda));
    for (int it = 0; it < cfg.max_iters; ++it) {
        if (parallel) {
            fact::account_step_omp(p, res.V, res.U, res.Z, cfg.lambda, cfg.threads);
        } else {
            fact::account_step_serial(p, res.V, res.U, res.Z, cfg.lambda);
        }
        res.trace.push_back(fact::objective(p, res.U, res.Z, res.V, cfg.lambda));
        if (parallel) {
            fact::movie_step_omp(p, res.U, res.Z, res.V, cfg.lambda, cfg.threads);
        } else {
            fact::movie_step_serial(p, res.U, res.Z, res.V, cfg.lambda);
        }
        res.trace.push_back(fact::objective(p, res.U, res.Z, res.V, cfg.lambda));
        res.iterations = it + 1;

        const double before = res.trace[res.trace.size() - 3];
        const double after = res.trace.back();
        if (!std::isfinite(after)) throw NumericalError("factorization objective diverged");
        if (before > 0.0 && (before - after) / before < cfg.tol) break;
    }
    return res;
}

}  // namespace

FactorizeResult factorize(const RatingsDataset& ds, const FactorizeConfig& cfg) {
    if (cfg.d < 1) throw SchemaError("feature dimension must be >= 1");
    if (ds.ratings.empty()) throw SchemaError("empty dataset");

    double offset = 0.0;
    if (cfg.center_ratings) {
        for (const auto& e : ds.ratings) offset += e.rating;
        offset /= static_cast<double>(ds.ratings.size());
    }

    // sigma2 holdout: carve out a deterministic subset of entries.
    RatingsDataset train = ds;
    std::vector<RatingsDataset::Entry> holdout;
    if (cfg.sigma2_holdout_fraction > 0.0) {
        Rng rng(derive_seed(cfg.seed, 0x5eed));
        std::vector<int> order(ds.ratings.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        const auto keep = static_cast<std::size_t>(
            std::llround((1.0 - cfg.sigma2_holdout_fraction) * ds.ratings.size()));
        train.ratings.clear();
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i < keep) {
                train.ratings.push_back(ds.ratings[order[i]]);
            } else {
                holdout.push_back(ds.ratings[order[i]]);
            }
        }
    }

    const fact::Problem p = fact::build_problem(train, cfg.d, offset);
    for (int j = 0; j < p.num_movies; ++j) {
        if (p.mov_ptr[j] == p.mov_ptr[j + 1]) {
            throw SchemaError("movie " + ds.movie_ids[j] + " has zero ratings");
        }
    }

    CoreResult core = factorize_core(p, cfg);

    FactorizeResult out;
    out.features.vectors = core.V;
    out.objective_trace = std::move(core.trace);
    out.iterations = core.iterations;
    out.train_mse = fact::mean_squared_error(p, core.U, core.Z, core.V);

    out.account_profiles.resize(p.num_accounts);
    for (int a = 0; a < p.num_accounts; ++a) {
        out.account_profiles[a].u = core.U.row(a);
        out.account_profiles[a].z = core.Z(a) + offset;
    }

    double sigma2 = out.train_mse;
    if (!holdout.empty()) {
        double total = 0.0;
        for (const auto& e : holdout) {
            const double res =
                e.rating - offset - core.U.row(e.account).dot(core.V.row(e.movie)) -
                core.Z(e.account);
            total += res * res;
        }
        sigma2 = total / static_cast<double>(holdout.size());
    }
    out.features.sigma2 = std::max(sigma2, 1e-12);

    for (int j = 0; j < p.num_movies; ++j) {
        if (p.mov_ptr[j + 1] - p.mov_ptr[j] < 3) out.features.cold_movies.push_back(j);
    }
    return out;
}

double cross_validate_lambda(const RatingsDataset& ds, FactorizeConfig cfg,
                             const std::vector<double>& grid, int folds) {
    if (grid.empty()) throw SchemaError("empty lambda grid");
    Rng rng(derive_seed(cfg.seed, 0xcf));
    std::vector<int> fold_of(ds.ratings.size());
    for (std::size_t i = 0; i < fold_of.size(); ++i) fold_of[i] = static_cast<int>(i % folds);
    rng.shuffle(fold_of);

    double best_lambda = grid.front();
    double best_rmse = std::numeric_limits<double>::infinity();
    for (double lambda : grid) {
        double sq = 0.0;
        std::size_t count = 0;
        for (int f = 0; f < folds; ++f) {
            RatingsDataset train = ds;
            train.ratings.clear();
            std::vector<RatingsDataset::Entry> test;
            for (std::size_t i = 0; i < ds.ratings.size(); ++i) {
                (fold_of[i] == f ? test : train.ratings).push_back(ds.ratings[i]);
            }
            FactorizeConfig sub = cfg;
            sub.lambda = lambda;
            const fact::Problem p = fact::build_problem(train, cfg.d, 0.0);
            CoreResult core = factorize_core(p, sub);
            for (const auto& e : test) {
                double pred = core.U.row(e.account).dot(core.V.row(e.movie)) + core.Z(e.account);
                pred = std::clamp(pred, ds.scale_min, ds.scale_max);
                sq += (e.rating - pred) * (e.rating - pred);
                ++count;
            }
        }
        const double rmse = std::sqrt(sq / static_cast<double>(count));
        if (rmse < best_rmse) {
            best_rmse = rmse;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

}  // namespace unmix
