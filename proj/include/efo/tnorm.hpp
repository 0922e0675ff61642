#pragma once

#include <string>

namespace efo {

enum class TNormKind { Godel, Product, Lukasiewicz };

const char* tnorm_name(TNormKind kind);
TNormKind tnorm_from_name(const std::string& name);

// Both operands must lie in [0,1]; the result does too. The conorm for each
// kind is the De Morgan dual of its norm, written out directly so that the
// Godel conorm is an exact max (no 1-x round trips).
double tnorm(TNormKind kind, double a, double b);
double tconorm(TNormKind kind, double a, double b);

}  // namespace efo
