#include "otoc/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "otoc/errors.hpp"

namespace otoc {

std::string format_full(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

/// Strips comments and splits a line into whitespace-separated tokens.
std::vector<std::string> tokenize(const std::string& line)
{
    const std::size_t hash = line.find('#');
    std::istringstream ss(hash == std::string::npos ? line : line.substr(0, hash));
    std::vector<std::string> tokens;
    std::string tok;
    while (ss >> tok)
        tokens.push_back(tok);
    return tokens;
}

int parse_int(const std::string& s, int line_no)
{
    std::size_t pos = 0;
    int v;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
    if (pos != s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

double parse_double(const std::string& s, int line_no)
{
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    if (pos != s.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

std::string winding_string(const WindingVector& m)
{
    std::string s;
    for (std::size_t i = 0; i < m.m.size(); ++i) {
        if (i)
            s += ";";
        s += std::to_string(m.m[i]);
    }
    return s;
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments)
{
    for (const std::string& c : comments)
        out << "# " << c << "\n";
}

} // namespace

ComplexMonomialTable read_monomial_table(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::vector<int> row_lines;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize(line);
        if (tokens.empty())
            continue;
        rows.push_back(std::move(tokens));
        row_lines.push_back(line_no);
    }
    if (rows.empty())
        throw ParseError("monomial table is empty");
    if (rows.front().size() < 4 || rows.front().size() % 2 != 0)
        throw ParseError("line " + std::to_string(row_lines.front()) +
                         ": expected 'alpha.. beta.. re im'");
    const int d = static_cast<int>((rows.front().size() - 2) / 2);
    ComplexMonomialTable table(d);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& tok = rows[r];
        const int ln = row_lines[r];
        if (static_cast<int>(tok.size()) != 2 * d + 2)
            throw ParseError("line " + std::to_string(ln) + ": expected " +
                             std::to_string(2 * d + 2) + " columns, got " +
                             std::to_string(tok.size()));
        std::vector<int> alpha(d), beta(d);
        for (int i = 0; i < d; ++i)
            alpha[i] = parse_int(tok[i], ln);
        for (int i = 0; i < d; ++i)
            beta[i] = parse_int(tok[d + i], ln);
        const double re = parse_double(tok[2 * d], ln);
        const double im = parse_double(tok[2 * d + 1], ln);
        table.add(std::move(alpha), std::move(beta), {re, im});
    }
    return table;
}

ComplexMonomialTable load_monomial_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return read_monomial_table(in);
}

void write_monomial_table(std::ostream& out, const ComplexMonomialTable& table,
                          const std::vector<std::string>& header_comments)
{
    write_comments(out, header_comments);
    for (const MonomialRecord& r : table.records()) {
        for (int e : r.alpha)
            out << e << " ";
        for (int e : r.beta)
            out << e << " ";
        out << format_full(r.coefficient.real()) << " " << format_full(r.coefficient.imag())
            << "\n";
    }
}

ActionPolynomial read_action_polynomial(std::istream& in)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize(line);
        if (tokens.empty())
            continue;
        rows.push_back(std::move(tokens));
        row_lines.push_back(line_no);
    }
    if (rows.empty())
        throw ParseError("action polynomial file is empty");
    if (rows.front().size() < 2)
        throw ParseError("line " + std::to_string(row_lines.front()) +
                         ": expected 'n_I n_J.. coeff'");
    const int f = static_cast<int>(rows.front().size()) - 2;
    ActionPolynomial poly(f);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& tok = rows[r];
        const int ln = row_lines[r];
        if (static_cast<int>(tok.size()) != f + 2)
            throw ParseError("line " + std::to_string(ln) + ": expected " +
                             std::to_string(f + 2) + " columns, got " +
                             std::to_string(tok.size()));
        ExponentKey key(f + 1);
        for (int i = 0; i <= f; ++i)
            key[i] = parse_int(tok[i], ln);
        poly.add_term(key, parse_double(tok[f + 1], ln));
    }
    return poly;
}

ActionPolynomial load_action_polynomial(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return read_action_polynomial(in);
}

void write_action_polynomial(std::ostream& out, const ActionPolynomial& poly,
                             const std::vector<std::string>& header_comments)
{
    write_comments(out, header_comments);
    for (const auto& [key, c] : poly.terms()) {
        for (int e : key)
            out << e << " ";
        out << format_full(c) << "\n";
    }
}

void write_series_csv(std::ostream& out, const TraceSeries& series,
                      const std::vector<std::string>& header_comments)
{
    write_comments(out, header_comments);
    out << "t,C_E";
    for (int k = 1; k <= series.m_max; ++k)
        out << ",residual_" << k;
    out << "\n";
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        out << format_full(series.t[i]) << "," << format_full(series.c_e[i]);
        for (int k = 1; k <= series.m_max; ++k)
            out << "," << format_full(series.residuals[k - 1][i]);
        out << "\n";
    }
}

void write_residuals_csv(std::ostream& out, const TraceSeries& series,
                         const std::vector<std::string>& header_comments)
{
    write_comments(out, header_comments);
    out << "t";
    for (int k = 1; k <= series.m_max; ++k)
        out << ",residual_" << k;
    out << "\n";
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        out << format_full(series.t[i]);
        for (int k = 1; k <= series.m_max; ++k)
            out << "," << format_full(series.residuals[k - 1][i]);
        out << "\n";
    }
}

void write_orbits_csv(std::ostream& out, const TraceSeries& series,
                      const std::vector<std::string>& header_comments)
{
    write_comments(out, header_comments);
    out << "t,m,J,tau,Lambda,S,mu,sigma_H,A,stability_factor,weight\n";
    for (const WeightedOrbit& wo : series.contributions) {
        const OrbitContribution& c = wo.contribution;
        out << format_full(series.t[wo.t_index]) << "," << winding_string(c.torus.m) << ",";
        std::string js;
        for (std::size_t k = 0; k < c.torus.J.size(); ++k) {
            if (k)
                js += ";";
            js += format_full(c.torus.J[k]);
        }
        out << js << "," << format_full(c.torus.tau) << "," << format_full(c.torus.lambda_val)
            << "," << format_full(c.action) << "," << c.maslov << "," << c.hessian_signature
            << "," << format_full(c.amplitude) << "," << format_full(c.stability_factor) << ","
            << format_full(wo.weight) << "\n";
    }
}

ComplexMonomialTable eckart_morse_quoted_table()
{
    ComplexMonomialTable t(3);
    // Constant and linear block (real rate on x1 xi1, imaginary on bath pairs).
    t.add({0, 0, 0}, {0, 0, 0}, {-0.9875, 0.0});
    t.add({1, 0, 0}, {1, 0, 0}, {0.7350, 0.0});
    t.add({0, 1, 0}, {0, 1, 0}, {0.0, 1.8225});
    t.add({0, 0, 1}, {0, 0, 1}, {0.0, 1.267290});
    // Quadratic block: reaction anharmonicity and reaction-bath couplings.
    t.add({2, 0, 0}, {2, 0, 0}, {0.118039, 0.0});
    t.add({1, 1, 0}, {1, 1, 0}, {0.0, -0.012334});
    t.add({1, 0, 1}, {1, 0, 1}, {0.0, 0.0053});
    // Synthetic diagonal bath curvature (see eckart_morse_quoted_table docs):
    // h (x_k xi_k)^2 = -h J_k^2, so h = -0.025 gives +0.05/2 per mode.
    t.add({0, 2, 0}, {0, 2, 0}, {-0.025, 0.0});
    t.add({0, 0, 2}, {0, 0, 2}, {-0.025, 0.0});
    return t;
}

ActionPolynomial eckart_morse_polynomial()
{
    return convert_to_action_polynomial(eckart_morse_quoted_table(), 1e-10);
}

} // namespace otoc
