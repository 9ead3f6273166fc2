#pragma once

#include <array>
#include <complex>

namespace cglwaves {

using cplx = std::complex<double>;

// Lattice data for ℘(z; g2, g3). Half-periods satisfy Im(omega3/omega1) > 0
// and are Gauss-reduced, so |q| <= exp(-pi*sqrt(3)/2).
struct EllipticInvariants {
  cplx g2;
  cplx g3;
  std::array<cplx, 3> roots;  // e1 = ℘(omega1), e2 = ℘(omega1+omega3), e3 = ℘(omega3)
  cplx omega1;
  cplx omega3;
  cplx eta1;  // ζ(omega1)
  cplx eta3;  // ζ(omega3)
  cplx tau;
  cplx q;
  cplx discriminant;
  cplx theta1_prime0;  // θ1'(0; q)
};

struct WpValue {
  cplx p;
  cplx p_prime;
  cplx p_second;
};

// Periods by the complex AGM, validated against (g2, g3).
EllipticInvariants periods_from_invariants(cplx g2, cplx g3);

// Lattice generated by 2*w1, 2*w3 (any basis, any orientation).
EllipticInvariants lattice_from_half_periods(cplx w1, cplx w3);

// z - 2m*omega1 - 2n*omega3 with the representative nearest 0; m, n returned
// through the optional pointers.
cplx reduce_to_cell(const EllipticInvariants& inv, cplx z, long* m = nullptr, long* n = nullptr);

WpValue eval_wp(const EllipticInvariants& inv, cplx z);
cplx eval_zeta(const EllipticInvariants& inv, cplx z);
cplx eval_sigma(const EllipticInvariants& inv, cplx z);

// |℘(x1+x2) + ℘(x1) + ℘(x2) - ((℘'(x1)-℘'(x2))/(℘(x1)-℘(x2)))^2/4|
double check_addition(const EllipticInvariants& inv, cplx x1, cplx x2);

// Solves ℘(z) = p, ℘'(z) = p_prime for z in the reduced cell.
cplx invert_wp(const EllipticInvariants& inv, cplx p, cplx p_prime);

// Smallest lattice vector 2m*omega1 + 2n*omega3 with zero imaginary part and
// positive real part, or 0 if the lattice has no real vector of moderate size.
cplx real_period(const EllipticInvariants& inv);

}  // namespace cglwaves
