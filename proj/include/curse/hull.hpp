// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "curse/geometry.hpp"

namespace curse {

//---------------------------------------------------------------------------//
/*!
 * n points in R^d, immutable after construction.
 *
 * Exact (bitwise) duplicate rows are dropped on construction, so indices
 * refer to the deduplicated set. Inner products of the centered points are
 * cached column by column on first use; the cache is safe to populate from
 * several threads at once.
 */
class PointSet {
  public:
    // Row-major n x dim coordinates.
    PointSet(std::size_t dim, std::vector<double> coordinates);
    // As above, and every point must lie in the closed domain.
    PointSet(std::size_t dim, std::vector<double> coordinates, const DomainSpec& domain);

    static PointSet from_rows(const std::vector<std::vector<double>>& rows);

    // n iid uniform points of the domain, drawn from a stream reserved for
    // point sets (independent of Monte Carlo sample streams with the same seed).
    static PointSet sample(const DomainSpec& domain, std::size_t n, std::uint64_t seed);

    // One point per line, comma separated, plain decimal. Blank lines and
    // lines starting with '#' are skipped.
    static PointSet read_csv(std::istream& in);
    void write_csv(std::ostream& out) const;

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> point(std::size_t i) const noexcept;
    std::span<const double> coordinates() const noexcept;

    // Coordinates relative to the centroid; better conditioned inner products.
    std::span<const double> centroid() const noexcept;
    std::span<const double> centered(std::size_t i) const noexcept;

    // <c_i, c_j> for centered points c; column j computed lazily.
    double gram(std::size_t i, std::size_t j) const;

  private:
    struct State;

    std::size_t dim_ = 0;
    std::size_t n_ = 0;
    std::shared_ptr<State> state_;
};

struct ActiveWeight {
    std::size_t index;
    double weight;
};

struct HullProjection {
    std::vector<double> nearest;
    double distance = 0.0;
    std::vector<ActiveWeight> weights;  // convex weights over the active points
};

struct ProjectionOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 0;  // 0: 50 * n * d
};

//---------------------------------------------------------------------------//
/*!
 * Wolfe's minimum-norm-point algorithm on the translated points p_i - x.
 *
 * The active set is kept affinely independent and the affine minimizer is
 * obtained from an incrementally updated Cholesky factor of
 * 11^T + Q^T Q over the active columns Q. Runs until the duality gap
 * ||y||^2 - min_i <y, q_i> drops below tol * (1 + ||y||).
 *
 * Residual distances at the rounding level of the coordinates are reported
 * as 0.
 *
 * One solver holds per-query scratch and must not be shared between
 * threads; the PointSet it refers to may be.
 */
class WolfeSolver {
  public:
    explicit WolfeSolver(const PointSet& points, ProjectionOptions options = {});

    HullProjection project(std::span<const double> x);
    double distance(std::span<const double> x);

    // dist(x, K) <= radius, certified early by either the current iterate
    // (upper bound) or its supporting hyperplane (lower bound).
    bool within(std::span<const double> x, double radius);

    // Iterations used by the last query (major plus minor cycles).
    std::size_t last_iterations() const noexcept { return iterations_; }

  private:
    enum class Stop { converged, inside, outside };

    Stop run(std::span<const double> x, std::optional<double> radius);
    void reset(std::span<const double> x);
    double shifted_inner(std::size_t a, std::size_t b) const;
    bool append_active(std::size_t j);
    void remove_active(std::size_t pos);
    void affine_minimizer(std::vector<double>& v) const;
    void update_iterate();
    void snap_rounding();

    const PointSet& points_;
    ProjectionOptions options_;
    std::size_t max_iterations_;
    std::size_t iterations_ = 0;

    std::vector<double> x_centered_;
    double x_norm2_ = 0.0;
    std::vector<double> x_inner_;  // <c_i, x - centroid>

    std::vector<std::size_t> active_;
    std::vector<char> is_active_;
    std::vector<double> weights_;
    std::vector<double> chol_;  // lower factor, row stride cap_
    std::size_t cap_ = 0;
    std::vector<double> y_;  // current iterate, relative to x
    double y_norm2_ = 0.0;
    double spread_ = 0.0;  // largest distance from the centroid to a point
};

HullProjection project_onto_hull(std::span<const double> x, const PointSet& points, double tol = 1e-10);

// dist(x, K_delta) = max(0, dist(x, K) - delta sqrt(d)).
double dist_to_neighborhood(std::span<const double> x, const PointSet& points, double delta);

// Nearest point of K_delta to x.
std::vector<double> project_onto_neighborhood(std::span<const double> x, const PointSet& points, double delta);

/*!
 * Samples m flat-Dirichlet convex combinations y of the points and checks
 * that each lies in one of the balls B((z + x_i)/2, r/2), up to 1e-12 slack.
 * Every point must lie within distance r of z.
 */
bool elekes_cover_check(const PointSet& points, std::span<const double> z, double r, std::size_t m,
                        std::uint64_t seed);

}  // namespace curse
