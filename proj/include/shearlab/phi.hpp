#pragma once

namespace shearlab {

// Cutoff chi: 1 on [-1,1], exp(1 - 1/(1-(|s|-1)^2)) on 1<|s|<2, 0 beyond.
double chi(double s);

// phi(x) = 1/2 + (1/4) int_0^x chi. Tabulated once with Gauss-Legendre
// panels and evaluated by cubic Hermite interpolation (phi' = chi/4 exact).
double phi(double x);
double phi_prime(double x);

// Limit phi(+inf).
double phi_sup();

}  // namespace shearlab
