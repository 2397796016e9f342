#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mpctune/bayesopt.hpp"
#include "mpctune/rng.hpp"

namespace mpctune::cmaes {

struct CmaConfig {
  double sigma0 = 1.0;  // initial global step size
  int popsize = 2;      // candidates per generation
};

// Minimising (mu/mu_w, lambda) evolution strategy with rank-based selection,
// cumulative step-size adaptation and rank-one covariance updates.
class Cmaes {
 public:
  Cmaes(Eigen::VectorXd mean, const CmaConfig& cfg, const bo::Box& box);

  // Sample one generation of candidates (rows), clipped into the box.
  Eigen::MatrixXd ask(rng::Engine& eng);

  // Rank the generation by fitness (ascending, ties keep candidate order)
  // and update mean, paths, covariance and step size.
  void tell(const Eigen::MatrixXd& candidates,
            const Eigen::VectorXd& fitness);

  const Eigen::VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  int generation() const { return gen_; }
  int resets() const { return resets_; }
  double best_fitness() const { return best_fitness_; }

 private:
  void refresh_eigen();
  void reset_distribution();

  bo::Box box_;
  int dim_;
  int lambda_;
  int mu_;
  Eigen::VectorXd weights_;
  double mu_eff_, cc_, cs_, c1_, cmu_, damps_, chi_n_;

  Eigen::VectorXd mean_, pc_, ps_;
  Eigen::MatrixXd cov_, eigvec_;
  Eigen::VectorXd eigval_sqrt_;
  double sigma_, sigma0_;
  int gen_ = 0;
  int resets_ = 0;
  double best_fitness_;
};

struct CmaRunResult {
  std::vector<bo::ObservationRecord> trace;
  Eigen::VectorXd best_x;   // best observed point
  double best_value = 0.0;  // its scaled observation
};

// Budgeted black-box loop over the episode objective: the start point is
// observed first, then whole generations until `budget` observations are
// recorded.  Fitness is the negated scaled return (the strategy minimises).
CmaRunResult run_cmaes(const bo::EpisodeFn& fn, const bo::Box& box,
                       const Eigen::VectorXd& start,
                       const bo::RewardScaler& scaler, const CmaConfig& cfg,
                       int budget, int n_r, std::uint64_t master_seed,
                       bool timing = false);

}  // namespace mpctune::cmaes
