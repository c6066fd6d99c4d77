#pragma once

namespace s2spm {

// Rates below this floor are treated as the floor itself; keeps logs and
// Bessel arguments finite when an exponent saturates.
inline constexpr double kRateFloor = 1e-12;

// ln I_n(x), modified Bessel of the first kind, integer order n >= 0, x >= 0.
// Power series below x = 30, exponentially scaled asymptotic expansion above.
double log_bessel_i(int order, double x);

// ln(e^-x I_n(x)); stable for arbitrarily large x.
double log_bessel_i_scaled(int order, double x);

// I_{n+1}(x) / I_n(x) for x > 0. Lies in (0, 1), increasing in x.
double bessel_ratio(int order, double x);

// ln P(Y = y) for Y = Poisson(lambda_pos) - Poisson(lambda_neg).
double skellam_log_pmf(long y, double lambda_pos, double lambda_neg);

// One observation's negative log likelihood and its rate derivatives.
struct SkellamTerm {
    long y = 0;
    double lambda_pos = 0.0;
    double lambda_neg = 0.0;
    double log_prob = 0.0;  // ln pmf, always <= 0
    double dl_dpos = 0.0;   // d(-log_prob)/d lambda_pos
    double dl_dneg = 0.0;   // d(-log_prob)/d lambda_neg
};

SkellamTerm skellam_nll_grad(long y, double lambda_pos, double lambda_neg);

}  // namespace s2spm
