#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "otoc/normal_form.hpp"
#include "otoc/trace.hpp"

namespace otoc {

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_full(double x);

/// Complex monomial table, one record per line:
///   alpha_1 .. alpha_d beta_1 .. beta_d re im
/// `#` starts a comment; blank lines are skipped. The mode count d is fixed
/// by the first record.
ComplexMonomialTable read_monomial_table(std::istream& in);
ComplexMonomialTable load_monomial_table(const std::string& path);
void write_monomial_table(std::ostream& out, const ComplexMonomialTable& table,
                          const std::vector<std::string>& header_comments = {});

/// Action polynomial, one term per line: n_I n_J1 .. n_Jf coeff.
ActionPolynomial read_action_polynomial(std::istream& in);
ActionPolynomial load_action_polynomial(const std::string& path);
void write_action_polynomial(std::ostream& out, const ActionPolynomial& poly,
                             const std::vector<std::string>& header_comments = {});

/// CSV writers used by the command-line front end. Every file starts with the
/// supplied comment block so a result can be traced back to its full
/// configuration. All numbers are written with 17 significant digits.
void write_series_csv(std::ostream& out, const TraceSeries& series,
                      const std::vector<std::string>& header_comments);
void write_residuals_csv(std::ostream& out, const TraceSeries& series,
                         const std::vector<std::string>& header_comments);
void write_orbits_csv(std::ostream& out, const TraceSeries& series,
                      const std::vector<std::string>& header_comments);

/// The quoted 3-DoF saddle-plus-two-Morse-modes benchmark table: saddle
/// energy, linear rates, the I^2 and I J_k couplings, and a synthetic
/// diagonal J-curvature c = diag(0.05, 0.05) so that the frequency map is
/// invertible (the published model does not fix the J^2 block; the value is
/// a documented stand-in for demonstrations).
ComplexMonomialTable eckart_morse_quoted_table();

/// The table above converted to action form.
ActionPolynomial eckart_morse_polynomial();

} // namespace otoc
