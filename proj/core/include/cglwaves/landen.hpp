#pragma once

#include <array>

#include "cglwaves/elliptic.hpp"

namespace cglwaves {

// Lattice with periods (2ω, 2ω') and the lattice with periods (ω, 2ω'), where
// ℘(ω) = e1 on the lower one.
struct LandenPair {
  EllipticInvariants lower;
  EllipticInvariants upper;
  cplx e1;
  cplx omega;  // half-period of the lower lattice with ℘(omega) = e1
};

LandenPair landen_descend(const EllipticInvariants& lower, cplx e1);

// Residuals of the four algebraic relations between (e, g) and (E, G):
// E1 + 2e1, (E2-E3)^2 - 36e1^2 + 4(e2-e3)^2, and the two polynomial relations.
// Each is divided by a natural magnitude of its terms.
std::array<double, 4> landen_relations(const LandenPair& pair);

// Same polynomial relations evaluated on given invariants.
std::array<cplx, 2> landen_polynomials(cplx g2, cplx g3, cplx G2, cplx G3);

// |℘_upper(x) - ℘_lower(x) + (g2 - 12e1^2)/(4(℘_lower(x) - e1))| relative to |℘_upper|
double landen_wp_identity(const LandenPair& pair, cplx x);

// |℘_upper(x) - ℘_lower(x) - ℘_lower(x-ω) + e1| relative to |℘_upper|
double landen_wp_sum_identity(const LandenPair& pair, cplx x);

struct LandenResiduals {
  double zeta;
  double sigma;
};

// ζ_upper(x) = ζ(x) + ζ(x-ω) + e1 x + ζ(ω)
// σ_upper(x) = exp(e1 x^2/2 - ζ(ω) x) σ(x) σ(x+ω) / σ(ω)
LandenResiduals landen_zeta_sigma_identity(const LandenPair& pair, cplx x);

}  // namespace cglwaves
