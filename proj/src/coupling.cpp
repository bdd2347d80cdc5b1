#include "ordfb/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ordfb/feedback.hpp"

namespace ordfb {

namespace {

// Phase-1 simplex for { x >= 0 : A x = b }, b >= 0. Dense tableau with
// Bland's rule, which cannot cycle. Returns a feasible x or nullopt.
std::optional<std::vector<double>> lp_feasible(
    const std::vector<std::vector<double>>& A, const std::vector<double>& b) {
    const std::size_t m = A.size();
    const std::size_t n = m == 0 ? 0 : A[0].size();
    const std::size_t cols = n + m + 1;  // original + artificial + rhs

    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * A[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = sign * b[i];
        basis[i] = n + i;
    }
    // phase-1 objective: minimize sum of artificials, expressed in reduced
    // costs relative to the artificial basis
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += t[i][j];
        t[m][j] = (j >= n && j < n + m) ? 0.0 : -s;
    }

    const double eps = 1e-11;
    for (std::size_t iter = 0; iter < 10000; ++iter) {
        // Bland: entering = lowest-index column with negative reduced cost
        std::size_t enter = cols - 1;
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            if (t[m][j] < -eps) { enter = j; break; }
        }
        if (enter == cols - 1) break;  // optimal
        // ratio test, ties to the lowest basis index
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= eps) continue;
            double ratio = t[i][cols - 1] / t[i][enter];
            if (leave == m || ratio < best - 1e-15 ||
                (std::fabs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) return std::nullopt;  // unbounded; cannot happen here
        double piv = t[leave][enter];
        for (std::size_t j = 0; j < cols; ++j) t[leave][j] /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            double f = t[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    double infeasibility = -t[m][cols - 1];
    if (std::fabs(infeasibility) > 1e-9) return std::nullopt;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = std::max(0.0, t[i][cols - 1]);
    return x;
}

}  // namespace

CouplingSpec build_coupling(const DiscreteMeasure& fine_marginal,
                            const OrdinalScale& coarse,
                            std::vector<std::vector<double>> beta,
                            const std::optional<DiscreteMeasure>& declared_coarse,
                            const CouplingTolerances& tol) {
    const OrdinalScale& fine = fine_marginal.scale();

    if (beta.size() != fine.size())
        raise(Errc::DimensionMismatch, "beta row count != fine level count");
    for (std::size_t j = 0; j < beta.size(); ++j) {
        const auto& row = beta[j];
        if (row.size() != coarse.size())
            raise(Errc::DimensionMismatch, "beta column count != coarse level count");
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0)) raise(Errc::RowNotStochastic, "negative beta entry");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > tol.row_sum)
            raise(Errc::RowNotStochastic, "beta row does not sum to 1");
        double bary = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k)
            bary += row[k] * coarse.level(k);
        if (std::fabs(bary - fine.level(j)) > tol.barycenter) {
            std::ostringstream os;
            os << "row " << j << " has mean " << bary << ", expected "
               << fine.level(j);
            raise(Errc::BarycenterViolation, os.str());
        }
    }

    std::vector<double> coarse_marginal(coarse.size(), 0.0);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < fine.size(); ++j)
            acc += fine_marginal.mass(j) * beta[j][k];
        coarse_marginal[k] = acc;
    }
    if (declared_coarse) {
        if (!(declared_coarse->scale() == coarse))
            raise(Errc::DimensionMismatch, "declared coarse measure on wrong scale");
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            if (std::fabs(coarse_marginal[k] - declared_coarse->mass(k)) >
                tol.marginal)
                raise(Errc::MarginalMismatch,
                      "mixture marginal does not match the declared coarse measure");
        }
    }
    return CouplingSpec{fine, coarse, std::move(beta), fine_marginal.masses(),
                        std::move(coarse_marginal)};
}

CouplingSpec to_binary_coupling(const DiscreteMeasure& fine_marginal,
                                const CouplingTolerances& tol) {
    OrdinalScale binary = scale_preset(ScalePreset::Binary);
    std::vector<std::vector<double>> beta;
    beta.reserve(fine_marginal.scale().size());
    for (std::size_t j = 0; j < fine_marginal.scale().size(); ++j) {
        double z = fine_marginal.scale().level(j);
        beta.push_back({1.0 - z, z});
    }
    return build_coupling(fine_marginal, binary, std::move(beta), std::nullopt, tol);
}

CouplingSpec oracle_coupling(double oracle, const DiscreteMeasure& coarse,
                             const CouplingTolerances& tol) {
    if (std::fabs(coarse.mean() - oracle) > tol.barycenter)
        raise(Errc::BiasedMeasure, "coarse measure mean does not equal the oracle");
    return CouplingSpec{OrdinalScale::singleton(oracle), coarse.scale(),
                        {coarse.masses()}, {1.0}, coarse.masses()};
}

std::vector<std::pair<double, double>> sample_joint(const CouplingSpec& spec,
                                                    std::size_t n, Rng& rng) {
    // conditional rows as measures; built once, reused across draws
    DiscreteMeasure fine(spec.fine.size() == 1
                             ? DiscreteMeasure::dirac(spec.fine, 0)
                             : DiscreteMeasure(spec.fine, spec.fine_marginal));
    std::vector<DiscreteMeasure> rows;
    rows.reserve(spec.beta.size());
    for (const auto& row : spec.beta) {
        std::vector<double> mass = row;
        double total = 0.0;
        for (double v : mass) total += v;
        for (double& v : mass) v /= total;
        rows.emplace_back(spec.coarse, std::move(mass));
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = sample_label(fine, rng);
        std::size_t j = *spec.fine.index_of(w, 1e-12);
        double wp = sample_label(rows[j], rng);
        out.emplace_back(w, wp);
    }
    return out;
}

std::optional<CouplingSpec> find_coupling(const DiscreteMeasure& fine_marginal,
                                          const DiscreteMeasure& coarse_marginal,
                                          const CouplingTolerances& tol) {
    const OrdinalScale& fine = fine_marginal.scale();
    const OrdinalScale& coarse = coarse_marginal.scale();
    const std::size_t mf = fine.size(), mc = coarse.size();

    // unknowns x_{jk} = P(W' = z'_k | W = z_j) for rows with positive fine
    // mass; rows with zero mass are free and get filled with any valid row
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < mf; ++j)
        if (fine_marginal.mass(j) > 0.0) active.push_back(j);

    const std::size_t n = active.size() * mc;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t a = 0; a < active.size(); ++a) {
        std::vector<double> row_sum(n, 0.0), row_bary(n, 0.0);
        for (std::size_t k = 0; k < mc; ++k) {
            row_sum[a * mc + k] = 1.0;
            row_bary[a * mc + k] = coarse.level(k);
        }
        A.push_back(std::move(row_sum));
        b.push_back(1.0);
        A.push_back(std::move(row_bary));
        b.push_back(fine.level(active[a]));
    }
    for (std::size_t k = 0; k < mc; ++k) {
        std::vector<double> row(n, 0.0);
        for (std::size_t a = 0; a < active.size(); ++a)
            row[a * mc + k] = fine_marginal.mass(active[a]);
        A.push_back(std::move(row));
        b.push_back(coarse_marginal.mass(k));
    }

    auto x = lp_feasible(A, b);
    if (!x) return std::nullopt;

    std::vector<std::vector<double>> beta(mf, std::vector<double>(mc, 0.0));
    for (std::size_t a = 0; a < active.size(); ++a) {
        double sum = 0.0;
        for (std::size_t k = 0; k < mc; ++k) sum += (*x)[a * mc + k];
        for (std::size_t k = 0; k < mc; ++k)
            beta[active[a]][k] = (*x)[a * mc + k] / sum;
    }
    for (std::size_t j = 0; j < mf; ++j) {
        if (fine_marginal.mass(j) > 0.0) continue;
        // zero-mass fine level: use its bracketing two-point measure so the
        // row is still barycentric
        try {
            beta[j] = smallest_interval_measure(coarse, fine.level(j)).masses();
        } catch (const Error&) {
            return std::nullopt;  // level outside the coarse hull
        }
    }

    try {
        return build_coupling(fine_marginal, coarse, std::move(beta),
                              coarse_marginal, tol);
    } catch (const Error&) {
        return std::nullopt;  // LP answer failed validation tolerances
    }
}

}  // namespace ordfb
