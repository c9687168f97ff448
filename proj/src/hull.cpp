// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "curse/errors.hpp"
#include "curse/parallel.hpp"

namespace curse {
namespace {

// Stream index reserved for point-set generation; Monte Carlo chunks use
// small indices.
constexpr std::uint64_t kPointSetStream = 0x8000000000000000ull;

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

std::vector<double> deduplicate(std::size_t dim, std::vector<double> coordinates) {
    const std::size_t n = coordinates.size() / dim;
    std::set<std::string> seen;
    std::vector<double> out;
    out.reserve(coordinates.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string key(reinterpret_cast<const char*>(coordinates.data() + i * dim), dim * sizeof(double));
        if (seen.insert(std::move(key)).second) {
            out.insert(out.end(), coordinates.begin() + i * dim, coordinates.begin() + (i + 1) * dim);
        }
    }
    return out;
}

}  // namespace

struct PointSet::State {
    std::vector<double> points;
    std::vector<double> centered;
    std::vector<double> centroid;
    std::vector<double> gram;
    std::unique_ptr<std::once_flag[]> gram_ready;
};

PointSet::PointSet(std::size_t dim, std::vector<double> coordinates) : dim_(dim) {
    if (dim == 0) throw DomainError("PointSet: dimension must be >= 1");
    if (coordinates.empty()) throw PreconditionError("PointSet: at least one point is required");
    if (coordinates.size() % dim != 0) throw PreconditionError("PointSet: coordinate count is not a multiple of dim");
    for (double v : coordinates) {
        if (!std::isfinite(v)) throw PreconditionError("PointSet: coordinates must be finite");
    }

    state_ = std::make_shared<State>();
    state_->points = deduplicate(dim, std::move(coordinates));
    n_ = state_->points.size() / dim;

    state_->centroid.assign(dim, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < dim; ++k) state_->centroid[k] += state_->points[i * dim + k];
    }
    for (auto& c : state_->centroid) c /= static_cast<double>(n_);
    state_->centered.resize(state_->points.size());
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            state_->centered[i * dim + k] = state_->points[i * dim + k] - state_->centroid[k];
        }
    }
    state_->gram.assign(n_ * n_, 0.0);
    state_->gram_ready = std::make_unique<std::once_flag[]>(n_);
}

PointSet::PointSet(std::size_t dim, std::vector<double> coordinates, const DomainSpec& domain)
    : PointSet(dim, std::move(coordinates)) {
    if (domain.dim() != dim) throw PreconditionError("PointSet: dimension does not match domain");
    for (std::size_t i = 0; i < n_; ++i) {
        if (!domain.contains(point(i), 1e-12)) {
            throw PreconditionError("PointSet: point " + std::to_string(i) + " lies outside the domain");
        }
    }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw PreconditionError("PointSet: at least one point is required");
    const std::size_t dim = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * dim);
    for (const auto& row : rows) {
        if (row.size() != dim) throw PreconditionError("PointSet: rows have inconsistent dimensions");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return PointSet(dim, std::move(flat));
}

PointSet PointSet::sample(const DomainSpec& domain, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw PreconditionError("PointSet: at least one point is required");
    Sampler rng(seed, kPointSetStream);
    std::vector<double> flat(n * domain.dim());
    for (std::size_t i = 0; i < n; ++i) {
        domain.sample(rng, std::span<double>(flat).subspan(i * domain.dim(), domain.dim()));
    }
    return PointSet(domain.dim(), std::move(flat));
}

PointSet PointSet::read_csv(std::istream& in) {
    std::vector<double> flat;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::size_t count = 0;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            const auto rest = std::string(end).find_first_not_of(" \t");
            if (end == cell.c_str() || rest != std::string::npos) {
                throw PreconditionError("PointSet CSV: bad number '" + cell + "' on line " + std::to_string(line_no));
            }
            flat.push_back(v);
            ++count;
        }
        if (dim == 0) dim = count;
        if (count != dim) {
            throw PreconditionError("PointSet CSV: line " + std::to_string(line_no) + " has " + std::to_string(count) +
                                    " columns, expected " + std::to_string(dim));
        }
    }
    if (dim == 0) throw PreconditionError("PointSet CSV: no points");
    return PointSet(dim, std::move(flat));
}

void PointSet::write_csv(std::ostream& out) const {
    char buf[32];
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < dim_; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", state_->points[i * dim_ + k]);
            if (k) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

std::span<const double> PointSet::point(std::size_t i) const noexcept {
    return std::span<const double>(state_->points).subspan(i * dim_, dim_);
}

std::span<const double> PointSet::coordinates() const noexcept { return state_->points; }

std::span<const double> PointSet::centroid() const noexcept { return state_->centroid; }

std::span<const double> PointSet::centered(std::size_t i) const noexcept {
    return std::span<const double>(state_->centered).subspan(i * dim_, dim_);
}

double PointSet::gram(std::size_t i, std::size_t j) const {
    State& s = *state_;
    std::call_once(s.gram_ready[j], [&] {
        const auto cj = centered(j);
        for (std::size_t r = 0; r < n_; ++r) s.gram[r * n_ + j] = dot(centered(r), cj);
    });
    return s.gram[i * n_ + j];
}

//---------------------------------------------------------------------------//

WolfeSolver::WolfeSolver(const PointSet& points, ProjectionOptions options)
    : points_(points), options_(options) {
    if (!(options_.tol > 0.0)) throw PreconditionError("WolfeSolver: tol must be > 0");
    const std::size_t n = points.size();
    const std::size_t d = points.dim();
    max_iterations_ = options_.max_iterations ? options_.max_iterations : 50 * n * d;
    cap_ = std::min(n, d + 1) + 1;
    x_centered_.resize(d);
    x_inner_.resize(n);
    is_active_.assign(n, 0);
    chol_.assign(cap_ * cap_, 0.0);
    y_.resize(d);
    active_.reserve(cap_);
    weights_.reserve(cap_);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = points.centered(i);
        spread_ = std::max(spread_, std::sqrt(dot(c, c)));
    }
}

void WolfeSolver::snap_rounding() {
    // Residuals at the rounding level of the coordinates mean x lies in the hull.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (spread_ + std::sqrt(x_norm2_));
    if (y_norm2_ <= floor * floor) {
        std::fill(y_.begin(), y_.end(), 0.0);
        y_norm2_ = 0.0;
    }
}

double WolfeSolver::shifted_inner(std::size_t a, std::size_t b) const {
    return points_.gram(a, b) - x_inner_[a] - x_inner_[b] + x_norm2_;
}

void WolfeSolver::reset(std::span<const double> x) {
    const std::size_t d = points_.dim();
    if (x.size() != d) throw PreconditionError("WolfeSolver: query dimension does not match point set");
    const auto centroid = points_.centroid();
    for (std::size_t k = 0; k < d; ++k) x_centered_[k] = x[k] - centroid[k];
    x_norm2_ = dot(x_centered_, x_centered_);
    for (std::size_t i = 0; i < points_.size(); ++i) x_inner_[i] = dot(points_.centered(i), x_centered_);
    for (auto a : active_) is_active_[a] = 0;
    active_.clear();
    weights_.clear();
    iterations_ = 0;
}

bool WolfeSolver::append_active(std::size_t j) {
    const std::size_t k = active_.size();
    if (k + 1 > cap_) return false;
    double* row = &chol_[k * cap_];
    double tail = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
        double acc = 1.0 + shifted_inner(active_[b], j);
        const double* lb = &chol_[b * cap_];
        for (std::size_t c = 0; c < b; ++c) acc -= lb[c] * row[c];
        row[b] = acc / lb[b];
        tail += row[b] * row[b];
    }
    const double diag = 1.0 + shifted_inner(j, j);
    const double rho2 = diag - tail;
    if (!(rho2 > 1e-12 * diag)) return false;  // affinely dependent on the active set
    row[k] = std::sqrt(rho2);
    active_.push_back(j);
    is_active_[j] = 1;
    return true;
}

void WolfeSolver::remove_active(std::size_t pos) {
    const std::size_t k = active_.size();
    is_active_[active_[pos]] = 0;
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(pos));
    weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(pos));
    for (std::size_t r = pos; r + 1 < k; ++r) {
        std::copy_n(&chol_[(r + 1) * cap_], k, &chol_[r * cap_]);
    }
    // Rows pos.. now carry one super-diagonal entry; rotate it away.
    for (std::size_t i = pos; i + 1 < k; ++i) {
        const double a = chol_[i * cap_ + i];
        const double b = chol_[i * cap_ + i + 1];
        const double h = std::hypot(a, b);
        const double c = a / h;
        const double s = b / h;
        for (std::size_t t = i; t + 1 < k; ++t) {
            double& u = chol_[t * cap_ + i];
            double& v = chol_[t * cap_ + i + 1];
            const double nu = c * u + s * v;
            const double nv = -s * u + c * v;
            u = nu;
            v = nv;
        }
        chol_[i * cap_ + i] = h;
        chol_[i * cap_ + i + 1] = 0.0;
    }
}

void WolfeSolver::affine_minimizer(std::vector<double>& v) const {
    const std::size_t k = active_.size();
    v.assign(k, 0.0);
    // L z = 1
    for (std::size_t r = 0; r < k; ++r) {
        double acc = 1.0;
        for (std::size_t c = 0; c < r; ++c) acc -= chol_[r * cap_ + c] * v[c];
        v[r] = acc / chol_[r * cap_ + r];
    }
    // L^T u = z
    for (std::size_t r = k; r-- > 0;) {
        double acc = v[r];
        for (std::size_t c = r + 1; c < k; ++c) acc -= chol_[c * cap_ + r] * v[c];
        v[r] = acc / chol_[r * cap_ + r];
    }
    double total = 0.0;
    for (double u : v) total += u;
    for (double& u : v) u /= total;
}

void WolfeSolver::update_iterate() {
    const std::size_t d = points_.dim();
    for (std::size_t k = 0; k < d; ++k) y_[k] = -x_centered_[k];
    for (std::size_t a = 0; a < active_.size(); ++a) {
        const auto c = points_.centered(active_[a]);
        const double w = weights_[a];
        for (std::size_t k = 0; k < d; ++k) y_[k] += w * c[k];
    }
    y_norm2_ = dot(y_, y_);
}

WolfeSolver::Stop WolfeSolver::run(std::span<const double> x, std::optional<double> radius) {
    reset(x);
    const std::size_t n = points_.size();

    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double q2 = shifted_inner(i, i);
        if (q2 < best) {
            best = q2;
            first = i;
        }
    }
    chol_[0] = std::sqrt(1.0 + std::max(0.0, best));
    active_.push_back(first);
    is_active_[first] = 1;
    weights_.push_back(1.0);

    std::vector<double> v;
    const double r2 = radius ? *radius * *radius : 0.0;
    for (;;) {
        update_iterate();
        if (radius && y_norm2_ <= r2) return Stop::inside;

        const double y_dot_x = dot(y_, x_centered_);
        std::size_t j = 0;
        double s_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = dot(y_, points_.centered(i)) - y_dot_x;
            if (s < s_min) {
                s_min = s;
                j = i;
            }
        }
        const double y_norm = std::sqrt(y_norm2_);
        if (radius && s_min > 0.0 && s_min > *radius * y_norm) return Stop::outside;
        if (y_norm2_ - s_min <= options_.tol * (1.0 + y_norm)) return Stop::converged;
        if (is_active_[j]) return Stop::converged;
        if (!append_active(j)) return Stop::converged;
        weights_.push_back(0.0);

        for (;;) {
            if (++iterations_ > max_iterations_) {
                throw IterationLimitError("WolfeSolver: iteration limit of " + std::to_string(max_iterations_) +
                                          " reached");
            }
            affine_minimizer(v);
            if (*std::min_element(v.begin(), v.end()) > 0.0) {
                weights_ = v;
                break;
            }
            double theta = 1.0;
            std::size_t hit = 0;
            for (std::size_t a = 0; a < v.size(); ++a) {
                if (v[a] <= 0.0) {
                    const double t = weights_[a] / (weights_[a] - v[a]);
                    if (t < theta) {
                        theta = t;
                        hit = a;
                    }
                }
            }
            const bool dropping_new = theta == 0.0 && hit + 1 == active_.size();
            for (std::size_t a = 0; a < v.size(); ++a) weights_[a] = (1.0 - theta) * weights_[a] + theta * v[a];
            weights_[hit] = 0.0;
            for (std::size_t a = weights_.size(); a-- > 0;) {
                if (weights_[a] <= 0.0) remove_active(a);
            }
            double total = 0.0;
            for (double w : weights_) total += w;
            for (double& w : weights_) w /= total;
            if (dropping_new) {
                update_iterate();
                return Stop::converged;
            }
        }
        ++iterations_;
    }
}

HullProjection WolfeSolver::project(std::span<const double> x) {
    run(x, std::nullopt);
    snap_rounding();
    HullProjection out;
    out.distance = std::sqrt(y_norm2_);
    out.nearest.assign(x.begin(), x.end());
    for (std::size_t k = 0; k < y_.size(); ++k) out.nearest[k] += y_[k];
    out.weights.reserve(active_.size());
    for (std::size_t a = 0; a < active_.size(); ++a) out.weights.push_back({active_[a], weights_[a]});
    return out;
}

double WolfeSolver::distance(std::span<const double> x) {
    run(x, std::nullopt);
    snap_rounding();
    return std::sqrt(y_norm2_);
}

bool WolfeSolver::within(std::span<const double> x, double radius) {
    if (radius < 0.0) return false;
    switch (run(x, radius)) {
        case Stop::inside:
            return true;
        case Stop::outside:
            return false;
        case Stop::converged:
            break;
    }
    snap_rounding();
    return y_norm2_ <= radius * radius;
}

//---------------------------------------------------------------------------//

HullProjection project_onto_hull(std::span<const double> x, const PointSet& points, double tol) {
    WolfeSolver solver(points, {tol, 0});
    return solver.project(x);
}

double dist_to_neighborhood(std::span<const double> x, const PointSet& points, double delta) {
    if (delta < 0.0) throw PreconditionError("dist_to_neighborhood: delta must be >= 0");
    const double reach = delta * std::sqrt(static_cast<double>(points.dim()));
    return std::max(0.0, project_onto_hull(x, points).distance - reach);
}

std::vector<double> project_onto_neighborhood(std::span<const double> x, const PointSet& points, double delta) {
    if (delta < 0.0) throw PreconditionError("project_onto_neighborhood: delta must be >= 0");
    const double reach = delta * std::sqrt(static_cast<double>(points.dim()));
    auto proj = project_onto_hull(x, points);
    std::vector<double> out(x.begin(), x.end());
    if (proj.distance <= reach) return out;
    const double t = reach / proj.distance;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = proj.nearest[k] + t * (x[k] - proj.nearest[k]);
    return out;
}

bool elekes_cover_check(const PointSet& points, std::span<const double> z, double r, std::size_t m,
                        std::uint64_t seed) {
    const std::size_t d = points.dim();
    const std::size_t n = points.size();
    if (z.size() != d) throw PreconditionError("elekes_cover_check: center dimension mismatch");
    if (m < 1) throw PreconditionError("elekes_cover_check: m must be >= 1");
    for (std::size_t i = 0; i < n; ++i) {
        double dist2 = 0.0;
        const auto p = points.point(i);
        for (std::size_t k = 0; k < d; ++k) dist2 += (p[k] - z[k]) * (p[k] - z[k]);
        if (std::sqrt(dist2) > r * (1.0 + 1e-12)) {
            throw PreconditionError("elekes_cover_check: point " + std::to_string(i) + " is farther than r from z");
        }
    }
    const double reach = 0.5 * r * (1.0 + 1e-12) + 1e-12;
    const auto chunks = chunk_count(m);
    const auto ok = map_chunks<char>(chunks, ExecConfig{}, [&](std::size_t c) -> char {
        Sampler rng(seed, c);
        std::vector<double> w(n), y(d);
        const std::size_t begin = c * kChunkSamples;
        const std::size_t end = std::min(m, begin + kChunkSamples);
        for (std::size_t s = begin; s < end; ++s) {
            rng.simplex(w);
            std::fill(y.begin(), y.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto p = points.point(i);
                for (std::size_t k = 0; k < d; ++k) y[k] += w[i] * p[k];
            }
            bool covered = false;
            for (std::size_t i = 0; i < n && !covered; ++i) {
                const auto p = points.point(i);
                double dist2 = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double diff = y[k] - 0.5 * (z[k] + p[k]);
                    dist2 += diff * diff;
                }
                covered = std::sqrt(dist2) <= reach;
            }
            if (!covered) return 0;
        }
        return 1;
    });
    return std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
}

}  // namespace curse
