#pragma once

// Couplings between a fine feedback variable W and a coarse one W' such that
// E[W' | W] = W. A coupling is a row-stochastic matrix beta over the two
// scales whose rows are barycentric (row j has mean z_j) and whose mixture
// under the fine marginal reproduces the coarse marginal.

#include <optional>
#include <utility>
#include <vector>

#include "ordfb/core_types.hpp"

namespace ordfb {

struct CouplingSpec {
    OrdinalScale fine;
    OrdinalScale coarse;
    std::vector<std::vector<double>> beta;  // |fine| x |coarse|, row-stochastic
    std::vector<double> fine_marginal;      // aligned with fine.levels()
    std::vector<double> coarse_marginal;    // mixture of beta rows
};

struct CouplingTolerances {
    double row_sum = 1e-12;
    double barycenter = 1e-9;
    double marginal = 1e-9;
};

// Validates and assembles a coupling. When `declared_coarse` is given, the
// mixture marginal must match it within tolerance; otherwise the mixture
// itself becomes the coarse marginal.
CouplingSpec build_coupling(const DiscreteMeasure& fine_marginal,
                            const OrdinalScale& coarse,
                            std::vector<std::vector<double>> beta,
                            const std::optional<DiscreteMeasure>& declared_coarse =
                                std::nullopt,
                            const CouplingTolerances& tol = {});

// Coarsening of any feedback variable to a binary one: row j is
// (1 - z_j, z_j), so the coarse marginal is (1 - mean, mean).
CouplingSpec to_binary_coupling(const DiscreteMeasure& fine_marginal,
                                const CouplingTolerances& tol = {});

// The oracle value as a one-point fine scale coupled to any unbiased coarse
// measure. The coarse measure's mean must equal the oracle.
CouplingSpec oracle_coupling(double oracle, const DiscreteMeasure& coarse,
                             const CouplingTolerances& tol = {});

// Joint draws (w, w'): w from the fine marginal, then w' from beta's row.
std::vector<std::pair<double, double>> sample_joint(const CouplingSpec& spec,
                                                    std::size_t n, Rng& rng);

// Searches for any coupling between two given marginals by solving the
// linear feasibility problem (row sums, barycenters, marginal consistency,
// nonnegativity) with a phase-1 simplex. Returns nullopt when infeasible.
std::optional<CouplingSpec> find_coupling(const DiscreteMeasure& fine_marginal,
                                          const DiscreteMeasure& coarse_marginal,
                                          const CouplingTolerances& tol = {});

}  // namespace ordfb
