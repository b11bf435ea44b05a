#include "pevo/coefficients/families.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pevo/common/errors.hpp"
#include "pevo/common/faa_di_bruno.hpp"

namespace pevo::coefficients {

namespace {

// k-th derivative of (1 + x^2)^(-s), all orders 0..d at once.
std::vector<double> decay_derivatives(double s, double x, int d) {
  const double u = 1 + x * x;
  std::vector<double> outer(static_cast<std::size_t>(d + 1));
  double falling = 1.0;
  for (int k = 0; k <= d; ++k) {
    outer[static_cast<std::size_t>(k)] = falling * std::pow(u, -s - k);
    falling *= (-s - k);
  }
  const std::vector<double> inner = {0.0, 2 * x, 2.0};
  const auto B = bell_table(inner, d);
  std::vector<double> out(static_cast<std::size_t>(d + 1));
  out[0] = outer[0];
  for (int m = 1; m <= d; ++m) {
    double v = 0;
    for (int k = 1; k <= m; ++k) v += outer[static_cast<std::size_t>(k)] * B[m][k];
    out[static_cast<std::size_t>(m)] = v;
  }
  return out;
}

double decay_value(double s, double x) {
  const double u = 1 + x * x;
  if (s == 1.0) return 1.0 / u;
  if (s == 0.5) return 1.0 / std::sqrt(u);
  return std::pow(u, -s);
}

std::vector<double> sampled_sup(const std::function<std::vector<double>(double)>& derivs, int d,
                                double range, double step) {
  std::vector<double> sup(static_cast<std::size_t>(d + 1), 0.0);
  for (double x = -range; x <= range + 1e-12; x += step) {
    const auto v = derivs(x);
    for (int k = 0; k <= d; ++k) sup[static_cast<std::size_t>(k)] = std::max(sup[static_cast<std::size_t>(k)], std::abs(v[static_cast<std::size_t>(k)]));
  }
  // small safety margin for the sampling gap
  for (auto& v : sup) v *= 1.0 + 1e-6;
  return sup;
}

std::function<double(double)> make_ap(const FamilySpec& s) {
  const double a0 = s.ap0, a1 = s.ap1, w = s.ap_omega;
  if (a1 == 0.0) return [a0](double) { return a0; };
  return [a0, a1, w](double t) { return a0 + a1 * std::sin(w * t); };
}

// Catmull-Rom interpolation of a table, constant extension outside.
LowerCoefficient table_coefficient(std::vector<TableRow> rows) {
  if (rows.size() < 2) throw DomainError("custom_table needs at least two rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].x > rows[i - 1].x)) throw DomainError("custom_table x values must increase");
  auto data = std::make_shared<std::vector<TableRow>>(std::move(rows));
  auto eval = [data](double, double x, int order) -> cplx {
    const auto& r = *data;
    const std::size_t n = r.size();
    if (x <= r.front().x) return order == 0 ? cplx(r.front().re, r.front().im) : cplx{};
    if (x >= r.back().x) return order == 0 ? cplx(r.back().re, r.back().im) : cplx{};
    const auto it = std::upper_bound(r.begin(), r.end(), x, [](double v, const TableRow& row) { return v < row.x; });
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    const double x0 = r[i].x, x1 = r[i + 1].x, h = x1 - x0;
    const cplx y0(r[i].re, r[i].im), y1(r[i + 1].re, r[i + 1].im);
    auto slope = [&](std::size_t k) -> cplx {
      if (k == 0 || k + 1 == n) return {};
      return (cplx(r[k + 1].re, r[k + 1].im) - cplx(r[k - 1].re, r[k - 1].im)) / (r[k + 1].x - r[k - 1].x);
    };
    const cplx m0 = slope(i) * h, m1 = slope(i + 1) * h;
    const double u = (x - x0) / h;
    const cplx c0 = y0, c1 = m0, c2 = -3.0 * y0 - 2.0 * m0 + 3.0 * y1 - m1, c3 = 2.0 * y0 + m0 - 2.0 * y1 + m1;
    switch (order) {
      case 0: return c0 + u * (c1 + u * (c2 + u * c3));
      case 1: return (c1 + u * (2.0 * c2 + u * 3.0 * c3)) / h;
      case 2: return (2.0 * c2 + 6.0 * u * c3) / (h * h);
      case 3: return 6.0 * c3 / (h * h * h);
      default: return {};
    }
  };
  LowerCoefficient c;
  c.eval = eval;
  c.d_max = 3;
  c.x_independent = false;
  c.t_independent = true;
  const double lo = data->front().x, hi = data->back().x;
  c.deriv_sup.assign(4, 0.0);
  const double step = std::min(1e-3, (hi - lo) / 20000.0);
  for (double x = lo; x <= hi; x += step)
    for (int k = 0; k <= 3; ++k)
      c.deriv_sup[static_cast<std::size_t>(k)] = std::max(c.deriv_sup[static_cast<std::size_t>(k)], std::abs(eval(0, x, k)));
  for (const auto& row : *data)
    for (int k = 0; k <= 3; ++k) {
      c.deriv_sup[static_cast<std::size_t>(k)] = std::max(c.deriv_sup[static_cast<std::size_t>(k)], std::abs(eval(0, row.x, k)));
      c.deriv_sup[static_cast<std::size_t>(k)] = std::max(c.deriv_sup[static_cast<std::size_t>(k)], std::abs(eval(0, std::nextafter(row.x, hi + 1), k)));
    }
  for (auto& v : c.deriv_sup) v *= 1.0 + 1e-6;
  return c;
}

}  // namespace

LowerCoefficient algebraic_decay(double c, double s, double re_part, int d_max) {
  LowerCoefficient out;
  out.eval = [c, s, re_part, d_max](double, double x, int order) -> cplx {
    if (order == 0) return {re_part, c * decay_value(s, x)};
    return {0.0, c * decay_derivatives(s, x, order)[static_cast<std::size_t>(order)]};
  };
  out.d_max = d_max;
  out.deriv_sup = sampled_sup([s, d_max](double x) { return decay_derivatives(s, x, d_max); }, d_max, 12.0, 1e-3);
  for (auto& v : out.deriv_sup) v *= std::abs(c);
  out.deriv_sup[0] = std::hypot(re_part, c) * (1 + 1e-12);
  out.x_independent = c == 0.0;
  out.t_independent = true;
  out.background = [re_part](double) { return cplx(re_part, 0.0); };
  return out;
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"zero", "constant_imag", "decaying_imag", "levi_family",
                                                 "custom_table"};
  return names;
}

CoefficientModel make_family(const FamilySpec& s) {
  if (s.p < 2) throw DomainError("p must be >= 2");
  const double m = std::abs(s.ap0) - std::abs(s.ap1);
  if (!(m > 0)) throw DomainError("a_p = ap0 + ap1 sin(w t) must satisfy |ap0| > |ap1|");
  auto ap = make_ap(s);
  const bool ap_const = s.ap1 == 0.0;
  std::vector<LowerCoefficient> lower(static_cast<std::size_t>(s.p), LowerCoefficient::zero());
  LowerCoefficient& sub = lower[static_cast<std::size_t>(s.p - 1)];

  if (s.name == "zero") {
    sub = LowerCoefficient::constant({s.re_sub, 0.0});
  } else if (s.name == "constant_imag") {
    sub = LowerCoefficient::constant({s.re_sub, s.c});
  } else if (s.name == "decaying_imag") {
    if (!(s.decay > 1.0)) throw DomainError("decaying_imag needs decay exponent > 1");
    sub = algebraic_decay(s.c, s.decay / 2.0, s.re_sub);
  } else if (s.name == "levi_family") {
    // Im a_{p-1} = c a_p(t) / <x>
    auto base = algebraic_decay(s.c, 0.5, 0.0);
    const double re = s.re_sub;
    auto eval = base.eval;
    sub = base;
    sub.eval = [eval, ap, re](double t, double x, int order) -> cplx {
      const cplx v = eval(t, x, order) * ap(t);
      return order == 0 ? v + re : v;
    };
    for (auto& v : sub.deriv_sup) v *= std::abs(s.ap0) + std::abs(s.ap1);
    sub.deriv_sup[0] = std::abs(re) + std::abs(s.c) * (std::abs(s.ap0) + std::abs(s.ap1));
    sub.t_independent = ap_const;
    sub.background = [re](double) { return cplx(re, 0.0); };
  } else if (s.name == "custom_table") {
    sub = table_coefficient(s.table);
    if (s.re_sub != 0.0) {
      auto eval = sub.eval;
      const double re = s.re_sub;
      sub.eval = [eval, re](double t, double x, int order) { return order == 0 ? eval(t, x, 0) + re : eval(t, x, order); };
      sub.deriv_sup[0] += std::abs(re);
    }
  } else {
    throw DomainError("unknown coefficient family '" + s.name + "'");
  }
  return CoefficientModel(s.p, s.T, ap, m, std::move(lower), s.name, ap_const);
}

std::vector<TableRow> read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open coefficient table '" + path + "'");
  std::vector<TableRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    TableRow r{};
    if (!(ss >> r.x >> r.re >> r.im)) continue;  // header row
    rows.push_back(r);
  }
  return rows;
}

}  // namespace pevo::coefficients
