#include "efo/tnorm.hpp"

#include <algorithm>
#include <cmath>

#include "efo/error.hpp"

namespace efo {

namespace {

void check_unit(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    raise(ErrorCode::Validation,
          "truth value outside [0,1]: " + std::to_string(x));
  }
}

}  // namespace

const char* tnorm_name(TNormKind kind) {
  switch (kind) {
    case TNormKind::Godel:
      return "godel";
    case TNormKind::Product:
      return "product";
    case TNormKind::Lukasiewicz:
      return "lukasiewicz";
  }
  return "?";
}

TNormKind tnorm_from_name(const std::string& name) {
  if (name == "godel") return TNormKind::Godel;
  if (name == "product") return TNormKind::Product;
  if (name == "lukasiewicz") return TNormKind::Lukasiewicz;
  raise(ErrorCode::Config, "unknown t-norm: " + name);
}

double tnorm(TNormKind kind, double a, double b) {
  check_unit(a);
  check_unit(b);
  switch (kind) {
    case TNormKind::Godel:
      return std::min(a, b);
    case TNormKind::Product:
      return a * b;
    case TNormKind::Lukasiewicz:
      return std::max(a + b - 1.0, 0.0);
  }
  return 0.0;
}

double tconorm(TNormKind kind, double a, double b) {
  check_unit(a);
  check_unit(b);
  switch (kind) {
    case TNormKind::Godel:
      return std::max(a, b);
    case TNormKind::Product:
      // Clamp: rounding of a+b-ab can land an ulp above 1.
      return std::min(a + b - a * b, 1.0);
    case TNormKind::Lukasiewicz:
      return std::min(a + b, 1.0);
  }
  return 0.0;
}

}  // namespace efo
