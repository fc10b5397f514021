#include "fl/function_bank.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fl {

namespace {

const double kPi = 3.14159265358979323846;

double bump(double x, double c, double w) {
  const double s = (x - c) / w;
  if (std::fabs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double rho_interval(double x) { return 1.0 - std::fabs(x); }

std::vector<BankEntry> make_bank() {
  std::vector<BankEntry> b;
  b.push_back({"b_c0_w30", [](double x) { return bump(x, 0.0, 0.3); }});
  b.push_back({"b_c0_w60", [](double x) { return bump(x, 0.0, 0.6); }});
  b.push_back({"b_p45_w30", [](double x) { return bump(x, 0.45, 0.3); }});
  b.push_back({"b_p45_w45", [](double x) { return bump(x, 0.45, 0.45); }});
  b.push_back({"b_m45_w30", [](double x) { return bump(x, -0.45, 0.3); }});
  b.push_back({"b_m45_w45", [](double x) { return bump(x, -0.45, 0.45); }});
  b.push_back({"odd_pair", [](double x) {
                 return bump(x, 0.35, 0.3) - bump(x, -0.35, 0.3);
               }});
  b.push_back({"even_pair", [](double x) {
                 return bump(x, 0.35, 0.3) + bump(x, -0.35, 0.3);
               }});
  // narrow collar: relaxes on a short time scale, so its parabolic ratios
  // saturate already at moderate horizons
  b.push_back({"bdry_rho03", [](double x) {
                 const double r = rho_interval(x);
                 return std::pow(r, 0.3) * bump(r, 0.0, 0.1);
               }});
  b.push_back({"osc", [](double x) {
                 return std::sin(8.0 * kPi * x) * bump(x, 0.0, 0.7);
               }});
  return b;
}

}  // namespace

const std::vector<BankEntry>& function_bank() {
  static const std::vector<BankEntry> bank = make_bank();
  return bank;
}

GridFunction sample_entry(const BankEntry& e, const GridPtr& g) {
  if (!g || g->nodes.empty())
    throw std::invalid_argument("sample_entry: empty grid");
  GridFunction out;
  out.grid = g;
  out.values.reserve(g->nodes.size());
  for (double x : g->nodes) out.values.push_back(e.f(x));
  return out;
}

std::uint64_t bank_checksum() {
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  const auto feed = [&h](const char* s) {
    for (; *s; ++s) {
      h ^= static_cast<unsigned char>(*s);
      h *= 1099511628211ull;
    }
  };
  char buf[64];
  for (const BankEntry& e : function_bank()) {
    feed(e.name.c_str());
    feed(":");
    for (int k = 0; k < 512; ++k) {
      const double x = -1.0 + 2.0 * (k + 0.5) / 512.0;
      std::snprintf(buf, sizeof buf, "%.17g,", e.f(x));
      feed(buf);
    }
    feed(";");
  }
  return h;
}

}  // namespace fl
