// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_CHANNEL_MODEL_HPP
#define MUBSIM_CHANNEL_MODEL_HPP

#include <armadillo>
#include <vector>

#include "mubsim/codebook.hpp"
#include "mubsim/errors.hpp"
#include "mubsim/rng.hpp"

namespace mubsim {

/// Hexagonal cell cluster with torus wraparound. Cells are flat-topped
/// hexagons of center-to-vertex radius R; neighbouring base stations sit
/// sqrt(3)*R apart at angles 30 + 60n degrees. Wraparound distance is the
/// minimum over the cluster-lattice translations (including zero).
struct NetworkGeometry {
    arma::uword cells = 0;        // J
    double cell_radius = 0.0;     // meters, center to vertex
    double path_loss_exponent = 0.0;
    arma::mat bs_positions;       // J x 2
    arma::mat wrap_translations;  // 7 x 2, first row zero
};

struct UserDrop {
    arma::cube positions; // J x K x 2
};

/// g(i, j, k): linear power gain from UE(j,k) to BS i
struct LargeScaleGains {
    arma::cube g; // J x J x K
};

/// Per-BS stacked channel, rows ordered cell-major to match codebook columns.
using ChannelRealization = arma::cx_mat; // (J*K) x M

/// Seven-cell wraparound cluster; translation length sqrt(21)*R.
NetworkGeometry build_geometry(double cell_radius, double path_loss_exponent);

/// Single hexagon wrapped on its own lattice (translation length sqrt(3)*R).
NetworkGeometry build_single_cell_geometry(double cell_radius, double path_loss_exponent);

/// Flat-top hexagon membership test, hexagon centered at the origin.
bool point_in_hexagon(double x, double y, double cell_radius);

/// Wraparound distance between two points.
double wrap_distance(const NetworkGeometry& geo, const arma::vec2& a, const arma::vec2& b);

/// Uniform drop in each hexagon, re-drawing points closer than d_min to
/// their own base station.
UserDrop drop_users(const NetworkGeometry& geo, arma::uword k_users, double d_min, RngStream& rng);

LargeScaleGains compute_gains(const NetworkGeometry& geo, const UserDrop& drop);

/// One (J*K) x M Rayleigh realization per base station; entry variance of
/// row (j,k) at BS i equals g(i,j,k).
std::vector<ChannelRealization> draw_channels(const LargeScaleGains& gains, arma::uword antennas,
                                              RngStream& rng);

/// Y = P H + W with W ~ CN(0, sigma_u2) i.i.d.
arma::cx_mat uplink_receive(const arma::cx_mat& pilots, const ChannelRealization& channel,
                            double sigma_u2, RngStream& rng);

} // namespace mubsim

#endif
