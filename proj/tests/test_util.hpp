#pragma once

#include <string>
#include <vector>

#include "efo/kg.hpp"
#include "efo/matrix_builder.hpp"

namespace efo::test {

// Shared fixture: entities a0..a3, relations r0..r1, with
//   (a0,r0,a1) (a0,r0,a2) (a1,r1,a3) (a2,r1,a3) (a2,r1,a1)
inline KnowledgeGraph toy_kg() {
  return KnowledgeGraph(4, 2,
                        {{0, 0, 1}, {0, 0, 2}, {1, 1, 3}, {2, 1, 3},
                         {2, 1, 1}});
}

inline MatrixSet toy_perfect() { return perfect_matrices(toy_kg()); }

inline std::vector<double> dense(const FuzzyVector& v) { return v.values(); }

}  // namespace efo::test
