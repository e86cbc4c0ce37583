// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/channel_model.hpp"

namespace mubsim {

namespace {

arma::vec2 polar(double radius, double angle_deg) {
    const double a = angle_deg * arma::datum::pi / 180.0;
    return {radius * std::cos(a), radius * std::sin(a)};
}

arma::vec2 rot60(const arma::vec2& v) {
    const double c = 0.5;
    const double s = std::sqrt(3.0) / 2.0;
    return {c * v(0) - s * v(1), s * v(0) + c * v(1)};
}

arma::mat seven_translations(const arma::vec2& t1) {
    const arma::vec2 t2 = rot60(t1);
    arma::mat w(7, 2, arma::fill::zeros);
    w.row(1) = t1.t();
    w.row(2) = -t1.t();
    w.row(3) = t2.t();
    w.row(4) = -t2.t();
    w.row(5) = (t1 - t2).t();
    w.row(6) = (t2 - t1).t();
    return w;
}

} // namespace

NetworkGeometry build_geometry(double cell_radius, double path_loss_exponent) {
    if (cell_radius <= 0.0)
        throw InvalidParameter("cell radius must be positive");
    if (path_loss_exponent <= 0.0)
        throw InvalidParameter("path-loss exponent must be positive");

    NetworkGeometry geo;
    geo.cells = 7;
    geo.cell_radius = cell_radius;
    geo.path_loss_exponent = path_loss_exponent;
    geo.bs_positions.zeros(7, 2);
    const double spacing = std::sqrt(3.0) * cell_radius;
    for (arma::uword n = 0; n < 6; ++n)
        geo.bs_positions.row(n + 1) = polar(spacing, 30.0 + 60.0 * static_cast<double>(n)).t();

    // cluster lattice vector for the 7-cell layout: 2*a1 + a2, length sqrt(21)*R
    const arma::vec2 a1 = polar(spacing, 30.0);
    const arma::vec2 a2 = polar(spacing, 90.0);
    geo.wrap_translations = seven_translations(2.0 * a1 + a2);
    return geo;
}

NetworkGeometry build_single_cell_geometry(double cell_radius, double path_loss_exponent) {
    if (cell_radius <= 0.0)
        throw InvalidParameter("cell radius must be positive");
    if (path_loss_exponent <= 0.0)
        throw InvalidParameter("path-loss exponent must be positive");

    NetworkGeometry geo;
    geo.cells = 1;
    geo.cell_radius = cell_radius;
    geo.path_loss_exponent = path_loss_exponent;
    geo.bs_positions.zeros(1, 2);
    const double spacing = std::sqrt(3.0) * cell_radius;
    geo.wrap_translations = seven_translations(polar(spacing, 30.0));
    return geo;
}

bool point_in_hexagon(double x, double y, double cell_radius) {
    const double apothem = std::sqrt(3.0) / 2.0 * cell_radius;
    const double s3 = std::sqrt(3.0) / 2.0;
    // edge normals at 30, 90, 150 degrees (both signs)
    return std::abs(s3 * x + 0.5 * y) <= apothem && std::abs(y) <= apothem &&
           std::abs(-s3 * x + 0.5 * y) <= apothem;
}

double wrap_distance(const NetworkGeometry& geo, const arma::vec2& a, const arma::vec2& b) {
    // torus distance: reduce the displacement by the closest cluster-lattice
    // vector. Equals the minimum over the seven listed translations for all
    // in-cluster displacements and is exactly shift invariant.
    const double t1x = geo.wrap_translations(1, 0), t1y = geo.wrap_translations(1, 1);
    const double t2x = geo.wrap_translations(3, 0), t2y = geo.wrap_translations(3, 1);
    const double dx = a(0) - b(0), dy = a(1) - b(1);

    const double det = t1x * t2y - t1y * t2x;
    const double cm = (dx * t2y - dy * t2x) / det; // lattice coordinates of d
    const double cn = (t1x * dy - t1y * dx) / det;

    double best = arma::datum::inf;
    for (int m = -1; m <= 1; ++m) {
        for (int n = -1; n <= 1; ++n) {
            const double km = std::round(cm) + m;
            const double kn = std::round(cn) + n;
            const double rx = dx - km * t1x - kn * t2x;
            const double ry = dy - km * t1y - kn * t2y;
            best = std::min(best, std::hypot(rx, ry));
        }
    }
    return best;
}

UserDrop drop_users(const NetworkGeometry& geo, arma::uword k_users, double d_min, RngStream& rng) {
    if (k_users < 1)
        throw InvalidParameter("need at least one user per cell");
    if (d_min < 0.0)
        throw InvalidParameter("minimum distance cannot be negative");

    const double r = geo.cell_radius;
    const double half_height = std::sqrt(3.0) / 2.0 * r;
    UserDrop drop;
    drop.positions.set_size(geo.cells, k_users, 2);
    for (arma::uword j = 0; j < geo.cells; ++j) {
        for (arma::uword k = 0; k < k_users; ++k) {
            double x = 0.0, y = 0.0;
            do {
                x = rng.uniform(-r, r);
                y = rng.uniform(-half_height, half_height);
            } while (!point_in_hexagon(x, y, r) || std::hypot(x, y) < d_min);
            drop.positions(j, k, 0) = geo.bs_positions(j, 0) + x;
            drop.positions(j, k, 1) = geo.bs_positions(j, 1) + y;
        }
    }
    return drop;
}

LargeScaleGains compute_gains(const NetworkGeometry& geo, const UserDrop& drop) {
    const arma::uword j_cells = drop.positions.n_rows;
    const arma::uword k_users = drop.positions.n_cols;
    LargeScaleGains gains;
    gains.g.set_size(j_cells, j_cells, k_users);
    for (arma::uword i = 0; i < j_cells; ++i) {
        const arma::vec2 bs = {geo.bs_positions(i, 0), geo.bs_positions(i, 1)};
        for (arma::uword j = 0; j < j_cells; ++j) {
            for (arma::uword k = 0; k < k_users; ++k) {
                const arma::vec2 ue = {drop.positions(j, k, 0), drop.positions(j, k, 1)};
                gains.g(i, j, k) = std::pow(wrap_distance(geo, ue, bs), -geo.path_loss_exponent);
            }
        }
    }
    return gains;
}

std::vector<ChannelRealization> draw_channels(const LargeScaleGains& gains, arma::uword antennas,
                                              RngStream& rng) {
    if (antennas < 1)
        throw InvalidParameter("need at least one antenna");
    const arma::uword j_cells = gains.g.n_rows;
    const arma::uword k_users = gains.g.n_slices;
    std::vector<ChannelRealization> out;
    out.reserve(j_cells);
    for (arma::uword i = 0; i < j_cells; ++i) {
        ChannelRealization h = rng.cgauss(j_cells * k_users, antennas);
        for (arma::uword j = 0; j < j_cells; ++j)
            for (arma::uword k = 0; k < k_users; ++k)
                h.row(j * k_users + k) *= std::sqrt(gains.g(i, j, k));
        out.push_back(std::move(h));
    }
    return out;
}

arma::cx_mat uplink_receive(const arma::cx_mat& pilots, const ChannelRealization& channel,
                            double sigma_u2, RngStream& rng) {
    if (pilots.n_cols != channel.n_rows)
        throw DimensionMismatch("pilot count must equal stacked channel rows");
    arma::cx_mat y = pilots * channel;
    if (sigma_u2 > 0.0)
        y += std::sqrt(sigma_u2) * rng.cgauss(pilots.n_rows, channel.n_cols);
    return y;
}

} // namespace mubsim
