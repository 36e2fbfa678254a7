#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace cvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All stochastic routines draw from this engine. std::normal_distribution is
// deterministic for a given standard library, which is the reproducibility
// contract we make (not cross-platform bit equality).
using Rng = std::mt19937_64;

// Derives an independent stream for (seed, purpose) so that e.g. ELBO checkpoints
// never perturb the optimizer's own draws.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Vector standard_normal_vector(Rng& rng, int d);
Matrix standard_normal_matrix(Rng& rng, int rows, int cols);

}  // namespace cvi
