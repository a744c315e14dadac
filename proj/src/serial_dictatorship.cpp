#include <stdexcept>

#include "bmlab/mechanisms.hpp"

namespace bmlab {

Matching serial_dictatorship(const Market& m, const std::vector<Student>& order) {
  const std::size_t n = m.size();
  if (order.size() != n || !is_permutation_row(order)) {
    throw std::invalid_argument("serial_dictatorship: order must be a permutation of the students");
  }
  std::vector<char> taken(n, 0);
  Matching x;
  x.assignment.assign(n, -1);
  for (Student i : order) {
    for (School s : m.preferences().row(i)) {
      if (!taken[s]) {
        taken[s] = 1;
        x.assignment[i] = s;
        break;
      }
    }
  }
  return x;
}

}  // namespace bmlab
