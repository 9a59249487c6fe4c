#include "perdist/ring_core.hpp"

#include <functional>

namespace perdist {

LatticeWindow::LatticeWindow(int dim, int radius) : dim_(dim), radius_(radius) {
  if (dim < 1) throw PreconditionError("window dimension must be >= 1");
  if (radius < 0) throw PreconditionError("window radius must be >= 0");
  auto table = std::make_shared<Table>();
  std::vector<int> current(static_cast<std::size_t>(dim), 0);
  // Lexicographic: the first coordinate varies slowest.
  std::function<void(int, int)> fill = [&](int axis, int budget) {
    if (axis == dim) {
      table->coords.insert(table->coords.end(), current.begin(), current.end());
      table->norms.push_back(radius - budget);
      return;
    }
    for (int c = -budget; c <= budget; ++c) {
      current[static_cast<std::size_t>(axis)] = c;
      fill(axis + 1, budget - std::abs(c));
    }
  };
  fill(0, radius);
  table_ = std::move(table);
}

std::optional<Index> LatticeWindow::index_of(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != dim_ || norm1(n) > radius_) return std::nullopt;
  // Points are sorted lexicographically, so binary search applies.
  Index lo = 0;
  Index hi = size();
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    auto p = point(mid);
    if (std::lexicographical_compare(p.begin(), p.end(), n.begin(), n.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size()) {
    auto p = point(lo);
    if (std::equal(p.begin(), p.end(), n.begin())) return lo;
  }
  return std::nullopt;
}

std::string LatticeWindow::point_string(Index i) const {
  std::ostringstream os;
  os << "n=(";
  auto p = point(i);
  for (std::size_t j = 0; j < p.size(); ++j) os << (j ? "," : "") << p[j];
  os << ")";
  return os.str();
}

}  // namespace perdist
