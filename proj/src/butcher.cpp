// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/butcher.hpp"

#include <cmath>

#include "mrflow/error.hpp"

namespace mrflow {

void ButcherTable::validate() const {
  const auto s = static_cast<std::size_t>(stages);
  if (stages < 1 || A.size() != s * s || b.size() != s || c.size() != s ||
      (!embedded.empty() && embedded.size() != s)) {
    throw ConfigError("table " + name + ": inconsistent sizes");
  }
  for (int i = 0; i < stages; ++i) {
    for (int j = i; j < stages; ++j) {
      const bool allowed = kind == TableKind::dirk && j == i;
      if (!allowed && a(i, j) != 0.0) throw ConfigError("table " + name + ": not lower triangular");
    }
    double row = 0.0;
    for (int j = 0; j < stages; ++j) row += a(i, j);
    if (std::fabs(row - c[i]) > 1e-14) throw ConfigError("table " + name + ": row sum differs from c");
  }
  double sum = 0.0;
  for (double v : b) sum += v;
  if (std::fabs(sum - 1.0) > 1e-14) throw ConfigError("table " + name + ": weights do not sum to 1");
}

ButcherTable ark324_esdirk() {
  const double g = 1767732205903.0 / 4055673282236.0;
  ButcherTable t;
  t.name = "ark324";
  t.kind = TableKind::dirk;
  t.stages = 4;
  t.A = {
      0.0, 0.0, 0.0, 0.0,
      g, g, 0.0, 0.0,
      2746238789719.0 / 10658868560708.0, -640167445237.0 / 6845629431997.0, g, 0.0,
      1471266399579.0 / 7840856788654.0, -4482444167858.0 / 7529755066697.0,
      11266239266428.0 / 11593286722821.0, g,
  };
  t.b = {t.A[12], t.A[13], t.A[14], t.A[15]};
  t.embedded = {2756255671327.0 / 12835298489170.0, -10771552573575.0 / 22201958757719.0,
                9247589265047.0 / 10645013368117.0, 2193209047091.0 / 5459859503100.0};
  t.c = {0.0, 1767732205903.0 / 2027836641118.0, 3.0 / 5.0, 1.0};
  t.order = 3;
  t.embedded_order = 2;
  return t;
}

ButcherTable bogacki_shampine() {
  ButcherTable t;
  t.name = "bs32";
  t.stages = 4;
  t.A = {
      0.0, 0.0, 0.0, 0.0,
      0.5, 0.0, 0.0, 0.0,
      0.0, 0.75, 0.0, 0.0,
      2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0,
  };
  t.b = {2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0};
  t.embedded = {7.0 / 24.0, 0.25, 1.0 / 3.0, 0.125};
  t.c = {0.0, 0.5, 0.75, 1.0};
  t.order = 3;
  t.embedded_order = 2;
  return t;
}

ButcherTable classical_rk4() {
  ButcherTable t;
  t.name = "rk4";
  t.stages = 4;
  t.A = {
      0.0, 0.0, 0.0, 0.0,
      0.5, 0.0, 0.0, 0.0,
      0.0, 0.5, 0.0, 0.0,
      0.0, 0.0, 1.0, 0.0,
  };
  t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
  t.c = {0.0, 0.5, 0.5, 1.0};
  t.order = 4;
  return t;
}

ButcherTable kw3_slow() {
  ButcherTable t;
  t.name = "kw3";
  t.stages = 3;
  t.A = {
      0.0, 0.0, 0.0,
      1.0 / 3.0, 0.0, 0.0,
      -3.0 / 16.0, 15.0 / 16.0, 0.0,
  };
  t.b = {1.0 / 6.0, 3.0 / 10.0, 8.0 / 15.0};
  t.c = {0.0, 1.0 / 3.0, 3.0 / 4.0};
  t.order = 3;
  return t;
}

ButcherTable table_by_name(const std::string& name) {
  if (name == "ark324") return ark324_esdirk();
  if (name == "bs32") return bogacki_shampine();
  if (name == "rk4") return classical_rk4();
  if (name == "kw3") return kw3_slow();
  throw ConfigError("unknown Runge-Kutta table '" + name + "'");
}

}  // namespace mrflow
