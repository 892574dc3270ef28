#include <iostream>
#include "fixtures_common.hpp"
#include "ttk/nielsen.hpp"
using namespace ttk;
using namespace ttk::testing;

int main() {
  auto m = phi_map();
  auto em = eigen_metric(m);
  auto inp = find_inp_metric(em.map, em.lambda, 4);
  std::cout << "candidates: " << inp.paths.size() << "\n";
  for (const auto& c : inp.paths) {
    const auto& g = c.model->map.graph();
    std::cout << "  power " << c.path.power << " len "
              << path_length(g, c.path.path) << ": " << format_path(g, c.path.path) << "\n";
  }
  // collapse the shortest
  std::vector<double> lens;
  for (const auto& c : inp.paths) lens.push_back(path_length(c.model->map.graph(), c.path.path));
  size_t pick = std::min_element(lens.begin(), lens.end()) - lens.begin();
  const auto& cnd = inp.paths[pick];
  std::cout << "collapsing candidate " << pick << "\n";
  try {
    auto res = collapse_inp(cnd.model->map, cnd.model->lambda, cnd.path);
    std::cout << "collapse OK: edges " << res.map.graph().num_edges() << "\n";
    auto next = find_inp_metric(res.map, res.lambda, 0);
    std::cout << "remaining: " << next.paths.size() << "\n";
    for (const auto& c : next.paths) {
      const auto& g = c.model->map.graph();
      std::cout << "  power " << c.path.power << " len " << path_length(g, c.path.path)
                << " (2L = " << 2 * g.total_length() << "): " << format_path(g, c.path.path) << "\n";
    }
  } catch (const error& e) {
    std::cout << "collapse FAILED: " << e.what() << "\n";
  }
  return 0;
}
