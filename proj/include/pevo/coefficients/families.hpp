#pragma once

#include <string>
#include <vector>

#include "pevo/coefficients/model.hpp"

namespace pevo::coefficients {

struct TableRow {
  double x, re, im;
};

// Named coefficient families. Only a_{p-1} is populated; a_p(t) = ap0 + ap1 sin(ap_omega t).
struct FamilySpec {
  std::string name = "zero";
  int p = 2;
  double T = 1.0;
  double c = 1.0;       // amplitude of Im a_{p-1}
  double decay = 2.0;   // decaying_imag: Im a_{p-1} = c (1 + x^2)^(-decay/2)
  double re_sub = 0.0;  // constant real part of a_{p-1}
  double ap0 = 1.0, ap1 = 0.0, ap_omega = 1.0;
  std::vector<TableRow> table;  // custom_table nodes, x increasing
};

const std::vector<std::string>& family_names();

CoefficientModel make_family(const FamilySpec& spec);

std::vector<TableRow> read_table_csv(const std::string& path);

// c (1 + x^2)^(-s) and its x-derivatives
LowerCoefficient algebraic_decay(double c, double s, double re_part, int d_max = 8);

}  // namespace pevo::coefficients
