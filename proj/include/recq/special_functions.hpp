#pragma once

namespace recq {

// Standard normal cdf, absolute accuracy better than 1e-12 on the whole line.
// Throws std::domain_error on non-finite input.
double std_normal_cdf(double x);

// Standard normal density.
double std_normal_pdf(double x);

// Inverse of std_normal_cdf for u in (0,1); throws std::domain_error otherwise.
double std_normal_quantile(double u);

// E[Y 1{a < Y <= b}] for Y ~ N(mean, sd^2). Endpoints may be +-infinity.
// sd == 0 treats Y as the point mass at mean (half-open interval convention).
// Throws std::invalid_argument if a > b or sd < 0.
double gaussian_partial_first_moment(double mean, double sd, double a, double b);

// E[Y^2 1{a < Y <= b}], same conventions as gaussian_partial_first_moment.
double gaussian_partial_second_moment(double mean, double sd, double a, double b);

// P((Z + c)^2 <= y) for Z ~ N(0,1); zero for y <= 0.
// Throws std::domain_error on non-finite input.
double shifted_chi2_cdf(double c, double y);

// E[(Z + c)^2 1{(Z + c)^2 <= y}]; tends to 1 + c^2 as y -> infinity.
double shifted_chi2_partial_first_moment(double c, double y);

// E[(Z + c)^4 1{(Z + c)^2 <= y}], used to assemble cell second moments.
double shifted_chi2_partial_second_moment(double c, double y);

}  // namespace recq
