#ifndef AFDMSENSE_SPECIAL_HPP
#define AFDMSENSE_SPECIAL_HPP

namespace afdmsense {

/**
 * Natural log of the gamma function, ln Gamma(x).
 *
 * Relative error <= 1e-12 on x in [0.5, 100].
 * Throws std::domain_error for x <= 0.
 */
double log_gamma(double x);

/**
 * Confluent hypergeometric (Kummer) function
 *
 *   1F1(a;b;z) = sum_k (a)_k z^k / ((b)_k k!)
 *
 * for a >= 0.5, b > 0, z >= 0. Direct series for z <= 50; for larger z the
 * value is exp(log_hyp1f1) via the large-z asymptotic expansion.
 * Throws std::domain_error for b <= 0 or z < 0, std::overflow_error if even
 * the log-domain value exceeds double range.
 */
double hyp1f1(double a, double b, double z);

/**
 * ln 1F1(a;b;z), stable for z up to at least 700.
 *
 * Series regime (z <= 50) takes the log of the summed series; the large-z
 * regime uses 1F1(a;b;z) ~ Gamma(b)/Gamma(a) e^z z^{a-b} S(z) with the
 * truncated correction series S(z) = sum_k (b-a)_k (1-a)_k / (k! z^k).
 */
double log_hyp1f1(double a, double b, double z);

/**
 * Ratio 1F1(a1;b1;z) / 1F1(a2;b2;z), evaluated in log domain so the
 * exponential growth of numerator and denominator cancels. Finite and
 * positive for the parameter ranges of the s-step (a in {m, m+1},
 * b in {1, 2}, z in [0, 700]).
 */
double hyp1f1_ratio(double a1, double b1, double a2, double b2, double z);

}  // namespace afdmsense

#endif
