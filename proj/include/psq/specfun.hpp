#pragma once

#include <vector>

namespace psq {

// Airy functions and their first derivatives at a real argument.
struct AiryValue {
  double x = 0.0;
  double ai = 0.0;
  double ai_prime = 0.0;
  double bi = 0.0;
  double bi_prime = 0.0;
};

// Ai, Ai', Bi, Bi' on the real line. Absolute error below 1e-12 for
// |x| <= 10; Ai and Ai' keep full relative accuracy for x > 0 and the
// growing Bi, Bi' are accurate to ~1e-13 relative. Throws DomainError on a
// non-finite argument.
AiryValue airy_eval(double x);

// Same as airy_eval but, for x > 0, Ai and Ai' are multiplied by exp(zeta)
// and Bi, Bi' by exp(-zeta), zeta = (2/3) x^{3/2}. Identical to airy_eval
// for x <= 0. Lets callers work far into the decaying region without
// underflow.
AiryValue airy_eval_scaled(double x);

// A zero of Ai. index 0 is the zero closest to the origin.
struct AiryRoot {
  int index = 0;
  double value = 0.0;
};

// A solution of Ai'(r) + (eta/2) Ai(r) = 0 on branch `index`.
// Branches are ordered r_0* > r_1* > ... and interlace the Ai zeros:
// r_{j-1} > r_j*(eta) > r_j.
struct StarRoot {
  int index = 0;
  double eta = 0.0;
  double value = 0.0;
};

// j-th zero of Ai (r_0 ~ -2.338).
double ai_root(int j);

// First `count` zeros of Ai in the order r_0 > r_1 > ...
std::vector<AiryRoot> ai_roots(int count);

// Branch j of Ai'(r) + (eta/2) Ai(r) = 0.
double star_root(double eta, int j);

// First `count` branches at the given eta.
std::vector<StarRoot> star_roots(double eta, int count);

// Ai'(r) + (eta/2) Ai(r).
double star_residual(double eta, double r);

}  // namespace psq
