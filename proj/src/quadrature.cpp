#include "upimh/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace upimh {

namespace {

// Kronrod-15 abscissae on [0,1] side (symmetric) and weights; the
// embedded Gauss-7 rule uses the odd-indexed nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kWg = {0.129484966168870, 0.279705391489277,
                                       0.381830050505119, 0.417959183673469};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double result_k = 0.0, result_g = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = (j == 7) ? 0.0 : f(center + dx);
    const double fsum = (j == 7) ? f1 : f1 + f2;
    result_k += kWgk[j] * fsum;
    if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
  }
  result_k *= half;
  result_g *= half;
  return {result_k, std::abs(result_k - result_g)};
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: abs_tol must be > 0");
  if (!(a < b)) throw std::invalid_argument("integrate: need a < b");

  std::priority_queue<Panel> panels;
  auto first = gk15(f, a, b);
  panels.push({a, b, first.value, first.error});
  double total_error = first.error;

  constexpr int kMaxPanels = 2000;
  int n_panels = 1;
  while (total_error > abs_tol) {
    if (n_panels >= kMaxPanels)
      throw std::runtime_error("integrate: failed to reach tolerance");
    Panel worst = panels.top();
    panels.pop();
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = gk15(f, worst.a, mid);
    auto right = gk15(f, mid, worst.b);
    panels.push({worst.a, mid, left.value, left.error});
    panels.push({mid, worst.b, right.value, right.error});
    total_error += left.error + right.error;
    ++n_panels;
  }

  double total = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    panels.pop();
  }
  return total;
}

}  // namespace upimh
