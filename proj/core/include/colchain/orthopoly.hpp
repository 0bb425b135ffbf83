// orthopoly.hpp: Orthonormal polynomials for J(w)dw and the chain coefficients they induce
//
// Recurrence convention (orthonormal P_n):
//     P_n(w) = (C_{n-1} w - A_{n-1}) P_{n-1}(w) + B_{n-1} P_{n-2}(w),   P_0 = 1/||p_0||
// In terms of the Jacobi matrix entries a_n (diagonal) and b_n (off-diagonal):
//     C_n = 1/b_{n+1},  A_n = a_n/b_{n+1},  B_n = -b_n/b_{n+1}.
// Chain mode n then has energy eps_n = A_n/C_n = a_n and hopping t_n = 1/C_n = b_{n+1}.

#pragma once

#include <cstddef>
#include <vector>

#include "colchain/specdens.hpp"

namespace colchain {

struct RecurrenceCoefficients {
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> C;
    std::size_t N{0};
    double norm_p0{0.0};  // (integral J dw)^(1/2)
};

struct ChainCoefficients {
    std::vector<double> epsilon;  // on-site energies
    std::vector<double> t;        // t[n] couples modes n and n+1
    double kappa{0.0};            // system to mode-0 coupling, without g
    std::size_t N{0};
};

inline constexpr std::size_t kDefaultQuadPoints = 2000;

// Discretized Stieltjes procedure on a Gauss–Legendre discretization of J(w)dw.
// Requires N >= 1 and quad_points >= 4N.
RecurrenceCoefficients stieltjes_recurrence(const SpectralDensity& sd, std::size_t N,
                                            std::size_t quad_points = kDefaultQuadPoints);

// Same coefficients from Lanczos tridiagonalization of the discretized measure
// (full reorthogonalization); an independent route used as a cross-check.
RecurrenceCoefficients lanczos_recurrence(const SpectralDensity& sd, std::size_t N,
                                          std::size_t quad_points = kDefaultQuadPoints);

ChainCoefficients chain_coefficients(const RecurrenceCoefficients& rc);

// Convenience: stieltjes_recurrence followed by chain_coefficients.
ChainCoefficients chain_coefficients(const SpectralDensity& sd, std::size_t N,
                                     std::size_t quad_points = kDefaultQuadPoints);

// Shifted Legendre polynomial on [0, 1], normalized so that
// integral_0^1 P_n P_m dx = delta_nm. Evaluated by the three-term recurrence.
double shifted_legendre(std::size_t n, double x);

// P_0(x) .. P_nmax(x) in one recurrence pass.
std::vector<double> shifted_legendre_all(std::size_t nmax, double x);

// Eigenvalues of the tridiagonal chain Hamiltonian (ascending).
std::vector<double> chain_spectrum(const ChainCoefficients& chain);

}  // namespace colchain
