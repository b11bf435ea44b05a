#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pevo/common/primitive_table.hpp"

namespace pevo::coefficients {

using cplx = std::complex<double>;

// One lower-order coefficient a_j(t, x) with x-derivative access.
struct LowerCoefficient {
  // order-th x-derivative of a_j at (t, x)
  std::function<cplx(double t, double x, int order)> eval;
  int d_max = 0;
  std::vector<double> deriv_sup;  // sup |d^b/dx^b a_j| over [0,T] x R, b = 0..d_max
  bool x_independent = true;
  bool t_independent = true;
  // x-independent part b_j(t); a_j - b_j is what the solver treats explicitly
  std::function<cplx(double t)> background;

  cplx value(double t, double x) const { return eval(t, x, 0); }
  cplx derivative(int order, double t, double x) const;
  cplx background_value(double t) const { return background ? background(t) : cplx{}; }
  bool is_zero() const { return is_zero_; }

  static LowerCoefficient zero();
  static LowerCoefficient constant(cplx c);

  bool is_zero_ = false;
};

class CoefficientModel {
 public:
  CoefficientModel(int p, double T, std::function<double(double)> a_p, double m,
                   std::vector<LowerCoefficient> lower, std::string family = "custom",
                   bool a_p_constant = false);

  int p() const { return p_; }
  double T() const { return T_; }
  double m() const { return m_; }
  const std::string& family() const { return family_; }

  double a_p(double t) const { return a_p_(t); }
  double A_p(double t) const;  // int_0^t a_p
  double sup_abs_a_p() const { return sup_abs_a_p_; }
  bool a_p_constant() const { return a_p_constant_; }

  const LowerCoefficient& lower(int j) const { return lower_.at(static_cast<std::size_t>(j)); }
  const std::vector<LowerCoefficient>& lower() const { return lower_; }
  double sub_imag(double t, double x) const { return lower_[static_cast<std::size_t>(p_ - 1)].value(t, x).imag(); }

  // int_0^t b_j for the x-independent part of a_j
  cplx background_integral(int j, double t) const;

  bool time_independent() const;
  bool lower_time_independent() const;
  bool all_x_independent() const;

  // Throws OrderError if some coefficient exposes fewer than `order` derivatives.
  void require_derivatives(int order) const;

  // Same data with a_p replaced by -a_p.
  CoefficientModel negated() const;

  // Checks the invariants on a uniform sample of t and x.
  void validate_samples(int nt = 257, double x_range = 50.0, int nx = 2001) const;

  std::shared_ptr<const CoefficientModel> share() const { return std::make_shared<CoefficientModel>(*this); }

 private:
  int p_;
  double T_;
  std::function<double(double)> a_p_;
  double m_;
  std::vector<LowerCoefficient> lower_;
  std::string family_;
  bool a_p_constant_;
  double sup_abs_a_p_ = 0.0;
  std::shared_ptr<const PrimitiveTable<double>> A_table_;
  std::vector<std::shared_ptr<const PrimitiveTable<cplx>>> b_tables_;
};

}  // namespace pevo::coefficients
