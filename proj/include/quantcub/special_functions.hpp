#ifndef QUANTCUB_SPECIAL_FUNCTIONS_HPP
#define QUANTCUB_SPECIAL_FUNCTIONS_HPP

namespace qcub {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double z);

/// Standard normal survival function P(Z > z), accurate for large z.
double normal_ccdf(double z);

/// Inverse of the standard normal CDF.
///
/// Wichura's PPND16 rational approximation followed by one Newton
/// refinement against the erfc-based CDF, so the result is accurate to a
/// few ulp over the whole open interval (0,1).
double normal_inv_cdf(double u);

/// P(zl < Z <= zu) computed without cancellation when both endpoints sit
/// in the same tail. Accepts +-infinity endpoints.
double normal_interval_prob(double zl, double zu);

} // namespace qcub

#endif
